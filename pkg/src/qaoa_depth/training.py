"""Multi-start L-BFGS-B training and the layerwise depth-growing schedule."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .engine import BETA_PERIOD, GAMMA_PERIOD, QaoaParameters
from .sat import DiagonalHamiltonian

__all__ = ["TrainConfig", "TrainResult", "optimize_at_depth", "layerwise_train", "iter_layerwise"]

# stream tags keeping the random starts of different stages independent
_SCRATCH, _NEW_LAYER = 0, 1

# two stage-1 optima closer than this (max-norm, after folding) are refined only once
_DEDUP_TOL = 1e-7


@dataclass(frozen=True)
class TrainConfig:
    seeds_per_step: int = 25
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    rng_seed: int = 0

    def __post_init__(self):
        if self.seeds_per_step < 1 or self.max_iterations < 1:
            raise ValueError("seeds_per_step and max_iterations must be positive")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a non-negative integer")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrainResult:
    params: QaoaParameters
    energy: float
    iterations_used: int
    seed_of_winner: int

    @property
    def p(self) -> int:
        return self.params.p


def _rng(cfg: TrainConfig, stage: int, depth: int, seed_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([cfg.rng_seed, stage, depth, seed_index])
    return np.random.Generator(np.random.PCG64(ss))


def _random_angles(rng: np.random.Generator, p: int) -> np.ndarray:
    return np.concatenate([rng.uniform(0.0, GAMMA_PERIOD, p), rng.uniform(0.0, BETA_PERIOD, p)])


def _bounds(p: int) -> list[tuple[float, float]]:
    return [(0.0, GAMMA_PERIOD)] * p + [(0.0, BETA_PERIOD)] * p


def _local_run(h: DiagonalHamiltonian, x0: np.ndarray, cfg: TrainConfig, fixed=None):
    """One L-BFGS-B descent; returns (folded params, energy, iterations).

    With ``fixed = (gammas, betas)`` only the last layer is free: ``x0`` then
    holds ``(gamma_new, beta_new)`` and the fixed angles form the prefix.
    """
    energies, n = h.energies, h.n
    if fixed is None:
        p = x0.size // 2

        def fun(x):
            return _kernels.energy_and_gradient(energies, n, x[:p], x[p:])

        bounds = _bounds(p)
    else:
        fg, fb = fixed
        q = fg.size

        def fun(x):
            g = np.append(fg, x[0])
            b = np.append(fb, x[1])
            e, grad = _kernels.energy_and_gradient(energies, n, g, b)
            return e, np.array([grad[q], grad[2 * q + 1]])

        bounds = _bounds(1)

    e0, _ = fun(x0)
    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": cfg.max_iterations, "gtol": cfg.gradient_tolerance},
    )
    x = res.x if res.fun <= e0 else x0
    if fixed is not None:
        x = np.concatenate([fixed[0], x[:1], fixed[1], x[1:]])
    params = QaoaParameters.from_vector(x)
    x = params.to_vector()
    p = params.p
    energy = float(_kernels.energy(energies, n, x[:p], x[p:]))
    return params, energy, int(res.nit)


def _best(runs) -> TrainResult:
    # ties resolve to the lowest seed index so the winner is schedule-independent
    idx, (params, energy, nit) = min(enumerate(runs), key=lambda t: (t[1][1], t[0]))
    return TrainResult(params, energy, nit, idx)


def optimize_at_depth(
    h: DiagonalHamiltonian,
    warm_start: QaoaParameters | None,
    p: int,
    cfg: TrainConfig = TrainConfig(),
) -> TrainResult:
    """Best of ``cfg.seeds_per_step`` bounded quasi-Newton runs at depth ``p``.

    When ``warm_start`` is given it is start number 0 and replaces one of the
    random starts.  ``seed_of_winner`` is the index of the winning start.
    """
    if p < 1:
        raise ValueError(f"depth must be positive, got {p}")
    if warm_start is not None and warm_start.p != p:
        raise ValueError(f"warm start has depth {warm_start.p}, expected {p}")
    starts = []
    for i in range(cfg.seeds_per_step):
        if i == 0 and warm_start is not None:
            starts.append(warm_start.to_vector())
        else:
            starts.append(_random_angles(_rng(cfg, _SCRATCH, p, i), p))
    return _best([_local_run(h, x0, cfg) for x0 in starts])


def _grow(h: DiagonalHamiltonian, prev: TrainResult, cfg: TrainConfig) -> TrainResult:
    """Append one layer to ``prev`` and train it.

    Stage one optimizes the new angles with the old ones frozen, from the
    identity candidate (0, 0) plus ``seeds_per_step`` random draws.  Stage two
    continues every distinct stage-one optimum with all angles free.
    """
    p = prev.p + 1
    fixed = (np.array(prev.params.gamma), np.array(prev.params.beta))
    starts = [np.zeros(2)]
    for i in range(cfg.seeds_per_step):
        rng = _rng(cfg, _NEW_LAYER, p, i)
        starts.append(np.array([rng.uniform(0.0, GAMMA_PERIOD), rng.uniform(0.0, BETA_PERIOD)]))
    stage1 = [_local_run(h, x0, cfg, fixed=fixed) for x0 in starts]

    kept: list[tuple[np.ndarray, tuple]] = []
    by_seed = []
    for params, energy, nit in stage1:
        x = params.to_vector()
        hit = next((r for y, r in kept if np.max(np.abs(x - y)) <= _DEDUP_TOL), None)
        if hit is None:
            params2, energy2, nit2 = _local_run(h, x, cfg)
            if energy2 > energy:
                params2, energy2 = params, energy
            hit = (params2, energy2, nit + nit2)
            kept.append((x, hit))
        by_seed.append(hit)
    best = _best(by_seed)
    if best.energy > prev.energy:
        # unreachable with the identity candidate; kept so depth never regresses
        x = np.concatenate([fixed[0], [0.0], fixed[1], [0.0]])
        energy = float(_kernels.energy(h.energies, h.n, x[:p], x[p:]))
        best = TrainResult(QaoaParameters.from_vector(x), energy, 0, 0)
    return best


def iter_layerwise(h: DiagonalHamiltonian, cfg: TrainConfig = TrainConfig()) -> Iterator[TrainResult]:
    """Yield trained results for depths 1, 2, 3, ... indefinitely."""
    result = optimize_at_depth(h, None, 1, cfg)
    yield result
    while True:
        result = _grow(h, result, cfg)
        yield result


def layerwise_train(h: DiagonalHamiltonian, target_p: int, cfg: TrainConfig = TrainConfig()) -> list[TrainResult]:
    if target_p < 1:
        raise ValueError(f"target depth must be positive, got {target_p}")
    out = []
    for result in iter_layerwise(h, cfg):
        out.append(result)
        if len(out) == target_p:
            return out
