"""Logistic saturation fits of mean critical depth and linear scaling in ``n``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import FitError

__all__ = ["LogisticFitResult", "logistic", "fit_logistic", "ScalingFit", "fit_scaling"]


def logistic(alpha, p_max, kappa, alpha_c):
    """``p_max / (1 + exp(-kappa (alpha - alpha_c)))``."""
    return p_max * special.expit(kappa * (np.asarray(alpha, dtype=float) - alpha_c))


def _jacobian(alpha, theta):
    p_max, kappa, alpha_c = theta
    s = special.expit(kappa * (alpha - alpha_c))
    ds = s * (1.0 - s)
    return np.column_stack([s, p_max * ds * (alpha - alpha_c), -p_max * ds * kappa])


@dataclass(frozen=True)
class LogisticFitResult:
    p_max: float
    kappa: float
    alpha_c: float
    residual_norm: float
    parameter_standard_errors: tuple[float, float, float]
    iterations: int = 0

    def __call__(self, alpha):
        return logistic(alpha, self.p_max, self.kappa, self.alpha_c)

    def as_dict(self) -> dict:
        return {
            "p_max": self.p_max,
            "kappa": self.kappa,
            "alpha_c": self.alpha_c,
            "stderr": list(self.parameter_standard_errors),
            "residual": self.residual_norm,
        }


def _weights(sigma, count):
    if sigma is None:
        return np.ones(count), False
    sig = np.array([np.nan if s is None else float(s) for s in sigma])
    positive = sig[np.isfinite(sig) & (sig > 0)]
    if positive.size == 0:
        return np.ones(count), False
    # densities where every instance agreed have zero spread; borrow the tightest observed one
    sig = np.where(np.isfinite(sig) & (sig > 0), sig, positive.min())
    return 1.0 / sig**2, True


def fit_logistic(points, max_iter: int = 1000, init=None) -> LogisticFitResult:
    """Weighted Levenberg-Marquardt fit of the logistic saturation model.

    Parameters
    ----------
    points : sequence of (alpha, mean_p_star, sigma_mean)
        ``sigma_mean`` may be ``None``; weights are ``1 / sigma_mean**2``
        and uniform when no point carries a usable sigma.
    max_iter : int
        Iteration budget; exceeding it raises :class:`FitError`.
    init : (p_max, kappa, alpha_c), optional
        Defaults to ``(max(mean_p_star), 2, 1)``.

    Returns
    -------
    LogisticFitResult
        Standard errors come from the inverse Gauss-Newton curvature, scaled
        by the reduced chi-square when the fit is unweighted.
    """
    pts = [tuple(p) + (None,) * (3 - len(p)) for p in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points for a 3-parameter fit, got {len(pts)}")
    alpha = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    if len(set(alpha.tolist())) < 3:
        raise ValueError("need at least 3 distinct densities")
    sig = [p[2] for p in pts]
    w, weighted = _weights(None if all(s is None for s in sig) else sig, len(pts))

    theta = np.array(init if init is not None else (y.max(), 2.0, 1.0), dtype=float)

    def cost(t):
        r = y - logistic(alpha, *t)
        return float(np.sum(w * r * r))

    c = cost(theta)
    lam = 1e-3
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        r = y - logistic(alpha, *theta)
        J = _jacobian(alpha, theta)
        A = J.T @ (w[:, None] * J)
        g = J.T @ (w * r)
        if np.max(np.abs(g)) <= 1e-15 * max(1.0, c):
            converged = True
            break
        improved = False
        while lam < 1e16:
            M = A + lam * np.diag(np.diag(A))
            try:
                step = np.linalg.solve(M, g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + step
            ct = cost(trial)
            if np.isfinite(ct) and ct <= c:
                improved = True
                small = np.max(np.abs(step) / (np.abs(theta) + 1e-12)) < 1e-13
                flat = c - ct <= 1e-16 * max(c, 1e-300)
                theta, c = trial, ct
                lam = max(lam / 10.0, 1e-12)
                if small or flat:
                    converged = True
                break
            lam *= 10.0
        if not improved:
            # no damping level reduces the cost: theta is a local minimum to working precision
            converged = True
        if converged:
            break

    best = {"p_max": float(theta[0]), "kappa": float(theta[1]), "alpha_c": float(theta[2]),
            "residual": math.sqrt(c), "iterations": it}
    if not converged:
        raise FitError(f"no convergence in {max_iter} iterations", best)
    if not np.all(np.isfinite(theta)) or theta[0] <= 0 or theta[1] <= 0:
        raise FitError(f"fit left the admissible region: {theta.tolist()}", best)

    J = _jacobian(alpha, theta)
    A = J.T @ (w[:, None] * J)
    if np.linalg.cond(A) > 1e14:
        raise FitError("singular curvature at the optimum", best)
    cov = np.linalg.inv(A)
    if not weighted:
        dof = len(pts) - 3
        cov = cov * (c / dof if dof > 0 else np.inf)
    stderr = tuple(float(s) for s in np.sqrt(np.clip(np.diag(cov), 0.0, None)))
    return LogisticFitResult(float(theta[0]), float(theta[1]), float(theta[2]), math.sqrt(c), stderr, it)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    correlation: float

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "correlation": self.correlation}


def fit_scaling(per_n_fits) -> ScalingFit:
    """Ordinary least squares of ``p_max`` against qubit count.

    ``per_n_fits`` holds ``(n, fit)`` pairs where ``fit`` is a
    :class:`LogisticFitResult` or a bare ``p_max`` value.
    """
    pairs = [(float(n), float(getattr(f, "p_max", f))) for n, f in per_n_fits]
    if len({n for n, _ in pairs}) < 3:
        raise ValueError("need fits for at least 3 distinct n")
    x, y = np.array(pairs).T
    res = stats.linregress(x, y)
    return ScalingFit(float(res.slope), float(res.intercept), float(res.rvalue))
