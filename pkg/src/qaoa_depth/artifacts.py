"""Run configuration and the CSV/JSON artifact formats."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .experiments import DEFAULT_EPSILON, DEFAULT_P_CAP, SweepSummary
from .fitting import LogisticFitResult
from .training import TrainConfig

SUMMARY_COLUMNS = ["alpha", "mean_p_star", "sigma3", "count", "censored"]
RESULT_COLUMNS = ["instance_id", "n", "m", "alpha", "seed", "depth", "f", "overlap", "p_star"]


def _num(x) -> str:
    return "" if x is None else repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    """Declarative description of a critical-depth campaign.

    JSON form::

        {"n_list": [8], "densities": ["1/2", "1", ...], "instances_per_density": 20,
         "epsilon": 0.3, "p_cap": 50, "master_seed": 0, "output_dir": "out",
         "train": {"seeds_per_step": 25, "max_iterations": 500,
                   "gradient_tolerance": 1e-6, "rng_seed": 0}}

    ``"n": 8`` may be given instead of ``n_list``.  Densities are exact
    rationals, written as strings (``"1/2"``) or decimal numbers.
    """

    n_list: tuple[int, ...]
    densities: tuple[Fraction, ...]
    instances_per_density: int
    epsilon: float = DEFAULT_EPSILON
    p_cap: int = DEFAULT_P_CAP
    train: TrainConfig = field(default_factory=TrainConfig)
    master_seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        if not self.n_list:
            raise ValueError("config needs 'n' or a non-empty 'n_list'")
        if any(n < 2 for n in self.n_list):
            raise ValueError("every n must be at least 2")
        if not self.densities:
            raise ValueError("density grid is empty")
        if any(a <= 0 for a in self.densities):
            raise ValueError("densities must be positive")
        if self.instances_per_density < 1:
            raise ValueError("instances_per_density must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.p_cap < 1:
            raise ValueError("p_cap must be positive")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {"n", "n_list", "densities", "instances_per_density", "epsilon", "p_cap",
                 "train", "master_seed", "output_dir"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "n_list" in doc:
            n_list = tuple(int(n) for n in doc["n_list"])
        elif "n" in doc:
            n_list = (int(doc["n"]),)
        else:
            n_list = ()
        if "densities" not in doc or "instances_per_density" not in doc:
            raise ValueError("config needs 'densities' and 'instances_per_density'")
        densities = tuple(Fraction(str(a)) for a in doc["densities"])
        train = TrainConfig(**doc.get("train", {}))
        return cls(
            n_list=n_list,
            densities=densities,
            instances_per_density=int(doc["instances_per_density"]),
            epsilon=float(doc.get("epsilon", DEFAULT_EPSILON)),
            p_cap=int(doc.get("p_cap", DEFAULT_P_CAP)),
            train=train,
            master_seed=int(doc.get("master_seed", 0)),
            output_dir=str(doc.get("output_dir", "results")),
        )

    def to_dict(self) -> dict:
        return {
            "n_list": list(self.n_list),
            "densities": [str(a) for a in self.densities],
            "instances_per_density": self.instances_per_density,
            "epsilon": self.epsilon,
            "p_cap": self.p_cap,
            "train": self.train.as_dict(),
            "master_seed": self.master_seed,
            "output_dir": self.output_dir,
        }

    def config_hash(self) -> str:
        """SHA-256 over everything that affects results (not the output location)."""
        doc = self.to_dict()
        del doc["output_dir"]
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def provenance_line(master_seed, config_hash, **extra) -> str:
    parts = [f"tool=qaoa_depth", f"version={__version__}", f"master_seed={master_seed}",
             f"config_hash={config_hash}"]
    parts += [f"{k}={v}" for k, v in extra.items()]
    return "# " + " ".join(parts) + "\n"


def parse_provenance(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        for tok in line[1:].split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                out[k] = v
    return out


def summary_csv(summary: SweepSummary, header: str = "") -> str:
    buf = io.StringIO()
    buf.write(header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in summary.rows:
        w.writerow([_num(r.alpha), _num(r.mean_p_star), _num(r.sigma3), r.count, r.censored])
    return buf.getvalue()


def results_csv(summary: SweepSummary, header: str = "") -> str:
    buf = io.StringIO()
    buf.write(header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for rec in summary.records:
        p_star = "" if rec.p_star is None else rec.p_star
        for (depth, f), g in zip(rec.f_trace, rec.overlap_trace):
            w.writerow([rec.instance_id, rec.n, rec.m, _num(rec.alpha), rec.seed, depth,
                        _num(f), _num(g), p_star])
    return buf.getvalue()


def read_summary_csv(text: str) -> list[tuple[float, float, float | None]]:
    """Fit points ``(alpha, mean_p_star, sigma_mean)`` from a summary CSV.

    Rows without a mean (every instance censored) are skipped.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    missing = set(SUMMARY_COLUMNS[:3]) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"summary CSV lacks columns {sorted(missing)}")
    points = []
    for row in reader:
        if not row["mean_p_star"]:
            continue
        sigma = float(row["sigma3"]) / 3.0 if row["sigma3"] else None
        points.append((float(row["alpha"]), float(row["mean_p_star"]), sigma))
    return points


def fit_json(fit: LogisticFitResult, **extra) -> str:
    doc = fit.as_dict()
    doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
