"""Energy error, critical depth, and density sweeps over random MAX-2-SAT ensembles."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import __version__
from .engine import StabilityBounds, ground_overlap, prepare_ansatz, stability_bounds
from .errors import ConsistencyError
from .fitting import LogisticFitResult, ScalingFit, fit_logistic, fit_scaling, logistic
from .sat import (
    DiagonalHamiltonian,
    SatInstance,
    SpectrumSummary,
    analyze_spectrum,
    build_hamiltonian,
    clause_density,
    generate_instance,
    max_clauses,
)
from .training import TrainConfig, TrainResult, iter_layerwise

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_P_CAP",
    "RNG_PROVENANCE",
    "energy_error",
    "CriticalDepthRecord",
    "critical_depth",
    "clause_count",
    "instance_seed",
    "SweepRow",
    "SweepSummary",
    "density_sweep",
    "ErrorProfileRow",
    "error_profile",
    "SweepError",
    "fit_logistic",
    "fit_scaling",
    "logistic",
    "LogisticFitResult",
    "ScalingFit",
]

DEFAULT_EPSILON = 0.3
DEFAULT_P_CAP = 50
RNG_PROVENANCE = "numpy PCG64 seeded via SeedSequence"

_DUST = 1e-8


class SweepError(RuntimeError):
    def __init__(self, instance_id, cause):
        self.instance_id = instance_id
        super().__init__(f"instance {instance_id} failed: {cause!r}")


def energy_error(h: DiagonalHamiltonian, result: TrainResult, spectrum: SpectrumSummary) -> float:
    """Trained energy minus the exact ground energy, floored at zero.

    The trained optimum only upper-bounds the minimum over the ansatz family,
    so this is an upper bound on the ideal energy error.
    """
    f = result.energy - spectrum.ground_energy
    if f < -_DUST:
        raise ConsistencyError(
            f"trained energy {result.energy!r} is below the ground energy {spectrum.ground_energy}"
        )
    return max(f, 0.0)


@dataclass(frozen=True)
class CriticalDepthRecord:
    """Outcome of growing depth until the energy error drops to ``epsilon``.

    ``p_star`` is ``None`` when ``p_cap`` was reached first (a censored
    record); the overlap and bounds are then those at the cap.
    """

    instance_id: str
    n: int
    m: int
    alpha: Fraction
    epsilon: float
    p_star: int | None
    f_trace: tuple[tuple[int, float], ...]
    overlap_trace: tuple[float, ...]
    overlap_at_p_star: float
    bounds_at_p_star: StabilityBounds
    ground_energy: int
    gap: int | None
    max_energy: int
    seed: int | None = None

    @property
    def censored(self) -> bool:
        return self.p_star is None


def critical_depth(
    instance: SatInstance,
    epsilon: float = DEFAULT_EPSILON,
    p_cap: int = DEFAULT_P_CAP,
    cfg: TrainConfig = TrainConfig(),
    instance_id: str | None = None,
) -> CriticalDepthRecord:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if p_cap < 1:
        raise ValueError(f"p_cap must be positive, got {p_cap}")
    h = build_hamiltonian(instance)
    spec = analyze_spectrum(h)
    trace, overlaps = [], []
    p_star = None
    for result in iter_layerwise(h, cfg):
        f = energy_error(h, result, spec)
        trace.append((result.p, f))
        overlaps.append(ground_overlap(prepare_ansatz(h, result.params), spec))
        if f <= epsilon:
            p_star = result.p
            break
        if result.p >= p_cap:
            break
    return CriticalDepthRecord(
        instance_id=instance_id if instance_id is not None else f"n{instance.n}-m{instance.m}",
        n=instance.n,
        m=instance.m,
        alpha=clause_density(instance),
        epsilon=float(epsilon),
        p_star=p_star,
        f_trace=tuple(trace),
        overlap_trace=tuple(overlaps),
        overlap_at_p_star=overlaps[-1],
        bounds_at_p_star=stability_bounds(trace[-1][1], spec.gap, spec.max_energy),
        ground_energy=spec.ground_energy,
        gap=spec.gap,
        max_energy=spec.max_energy,
        seed=instance.seed,
    )


def clause_count(alpha, n: int) -> int:
    """Clause count realizing density ``alpha`` on ``n`` variables (half rounds up)."""
    m = math.floor(Fraction(alpha) * n + Fraction(1, 2))
    return min(max(m, 1), max_clauses(n))


def instance_seed(master_seed: int, *key: int) -> int:
    """64-bit seed derived from the master seed and a position in the sweep."""
    ss = np.random.SeedSequence([master_seed, *key])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepRow:
    requested_alpha: Fraction
    alpha: Fraction
    m: int
    mean_p_star: float | None
    sigma_mean: float | None
    count: int
    censored: int

    @property
    def sigma3(self) -> float | None:
        return None if self.sigma_mean is None else 3.0 * self.sigma_mean


@dataclass(frozen=True)
class SweepSummary:
    rows: tuple[SweepRow, ...]
    records: tuple[CriticalDepthRecord, ...] = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def fit_points(self):
        """``(alpha, mean_p_star, sigma_mean)`` for rows with at least one uncensored record."""
        return [(float(r.alpha), r.mean_p_star, r.sigma_mean) for r in self.rows if r.count]


def _mean_and_sigma(values):
    if not values:
        return None, None
    a = np.asarray(values, dtype=float)
    mean = float(a.mean())
    if a.size < 2:
        return mean, None
    return mean, float(a.std(ddof=1) / math.sqrt(a.size))


def _map(fn, tasks, jobs):
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def _sweep_tasks(n, density_grid, instances_per_density, master_seed, cfg):
    tasks = []
    for i, alpha in enumerate(density_grid):
        m = clause_count(alpha, n)
        for k in range(instances_per_density):
            seed = instance_seed(master_seed, n, i, k)
            tcfg = replace(cfg, rng_seed=instance_seed(cfg.rng_seed, seed))
            tasks.append((f"n{n}-a{i:02d}-m{m}-i{k:03d}", n, m, seed, tcfg))
    return tasks


def _critical_depth_task(args):
    instance_id, n, m, seed, cfg, epsilon, p_cap = args
    try:
        return critical_depth(generate_instance(n, m, seed), epsilon, p_cap, cfg, instance_id)
    except Exception as exc:
        raise SweepError(instance_id, exc) from exc


def density_sweep(
    n: int,
    density_grid,
    instances_per_density: int,
    epsilon: float = DEFAULT_EPSILON,
    p_cap: int = DEFAULT_P_CAP,
    cfg: TrainConfig = TrainConfig(),
    master_seed: int = 0,
    jobs: int | None = 1,
) -> SweepSummary:
    """Mean critical depth per density over freshly generated instances.

    Each requested density maps to ``m = round(alpha * n)``; rows report the
    realized ``m / n``.  Every instance gets its own generation seed and
    training stream derived from ``master_seed``, so the summary does not
    depend on ``jobs``.  Censored instances are counted but left out of the
    mean.
    """
    density_grid = [Fraction(a) for a in density_grid]
    if not density_grid:
        raise ValueError("density grid is empty")
    if instances_per_density < 1:
        raise ValueError("instances_per_density must be positive")
    tasks = _sweep_tasks(n, density_grid, instances_per_density, master_seed, cfg)
    records = _map(_critical_depth_task, [t + (epsilon, p_cap) for t in tasks], jobs)

    rows = []
    for i, alpha in enumerate(density_grid):
        group = records[i * instances_per_density:(i + 1) * instances_per_density]
        solved = [r.p_star for r in group if r.p_star is not None]
        mean, sigma = _mean_and_sigma(solved)
        m = group[0].m
        rows.append(SweepRow(alpha, Fraction(m, n), m, mean, sigma, len(solved), len(group) - len(solved)))
    metadata = {
        "tool": "qaoa_depth",
        "version": __version__,
        "n": n,
        "epsilon": epsilon,
        "p_cap": p_cap,
        "instances_per_density": instances_per_density,
        "master_seed": master_seed,
        "train": cfg.as_dict(),
        "rng": RNG_PROVENANCE,
    }
    return SweepSummary(tuple(rows), tuple(records), metadata)


@dataclass(frozen=True)
class ErrorProfileRow:
    alpha: Fraction
    depth: int
    mean_f: float
    sigma_mean: float | None
    mean_overlap: float
    mean_lower_bound: float
    count: int


def _profile_task(args):
    instance_id, n, m, seed, cfg, depths = args
    try:
        h = build_hamiltonian(generate_instance(n, m, seed))
        spec = analyze_spectrum(h)
        out = {}
        for result in iter_layerwise(h, cfg):
            if result.p in depths:
                f = energy_error(h, result, spec)
                g = ground_overlap(prepare_ansatz(h, result.params), spec)
                out[result.p] = (f, g, stability_bounds(f, spec.gap, spec.max_energy))
            if result.p >= max(depths):
                return out
    except Exception as exc:
        raise SweepError(instance_id, exc) from exc


def error_profile(
    n: int,
    density_grid,
    instances_per_density: int,
    depths,
    cfg: TrainConfig = TrainConfig(),
    master_seed: int = 0,
    jobs: int | None = 1,
) -> list[ErrorProfileRow]:
    """Mean energy error and ground overlap at fixed depths across densities.

    Each instance is trained layerwise once up to ``max(depths)``; rows are
    ordered by density, then depth.
    """
    density_grid = [Fraction(a) for a in density_grid]
    depths = sorted(set(int(d) for d in depths))
    if not density_grid or not depths or depths[0] < 1:
        raise ValueError("need a non-empty density grid and positive depths")
    tasks = _sweep_tasks(n, density_grid, instances_per_density, master_seed, cfg)
    outs = _map(_profile_task, [t + (frozenset(depths),) for t in tasks], jobs)
    rows = []
    for i, alpha in enumerate(density_grid):
        group = outs[i * instances_per_density:(i + 1) * instances_per_density]
        m = clause_count(alpha, n)
        for p in depths:
            fs = [o[p][0] for o in group]
            mean, sigma = _mean_and_sigma(fs)
            rows.append(ErrorProfileRow(
                Fraction(m, n), p, mean, sigma,
                float(np.mean([o[p][1] for o in group])),
                float(np.mean([o[p][2].clamped[0] for o in group])),
                len(fs),
            ))
    return rows
