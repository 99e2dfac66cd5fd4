"""Statevector simulation of depth-p QAOA for diagonal cost Hamiltonians.

States are plain complex128 arrays of length ``2**n``.  The phase layer is an
elementwise multiply and the transverse-field mixer is ``n`` butterfly passes,
so no generic gate machinery is involved.

Parameter vectors used by the optimizer are laid out as
``[gamma_1, ..., gamma_p, beta_1, ..., beta_p]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapacityError
from .sat import DEFAULT_MAX_QUBITS, DiagonalHamiltonian, SpectrumSummary

__all__ = [
    "GAMMA_PERIOD",
    "BETA_PERIOD",
    "QaoaParameters",
    "StabilityBounds",
    "initial_state",
    "apply_phase_layer",
    "apply_mixer_layer",
    "prepare_ansatz",
    "expectation",
    "ground_overlap",
    "energy_gradient",
    "energy_and_gradient",
    "stability_bounds",
]

GAMMA_PERIOD = 2 * math.pi
BETA_PERIOD = math.pi


@dataclass(frozen=True)
class QaoaParameters:
    """Angles of a depth-``p`` ansatz, ``gamma`` in [0, 2pi) and ``beta`` in [0, pi)."""

    gamma: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        gamma = tuple(float(g) for g in self.gamma)
        beta = tuple(float(b) for b in self.beta)
        if len(gamma) != len(beta) or not gamma:
            raise ValueError(f"need equal, nonzero numbers of angles; got {len(gamma)} and {len(beta)}")
        for g in gamma:
            if not 0.0 <= g < GAMMA_PERIOD:
                raise ValueError(f"gamma={g!r} outside [0, 2pi)")
        for b in beta:
            if not 0.0 <= b < BETA_PERIOD:
                raise ValueError(f"beta={b!r} outside [0, pi)")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)

    @property
    def p(self) -> int:
        return len(self.gamma)

    def to_vector(self) -> np.ndarray:
        return np.array(self.gamma + self.beta, dtype=float)

    @classmethod
    def from_vector(cls, x) -> "QaoaParameters":
        """Build from a ``[gammas, betas]`` vector, folding each angle into its box.

        Folding is exact for the energy: the cost spectrum is integer-valued,
        so ``gamma`` has period 2pi, and ``beta -> beta + pi`` only multiplies
        the state by a global phase.
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size % 2:
            raise ValueError("parameter vector must have even length")
        p = x.size // 2
        return cls(
            tuple(_fold(g, GAMMA_PERIOD) for g in x[:p]),
            tuple(_fold(b, BETA_PERIOD) for b in x[p:]),
        )

    @classmethod
    def zeros(cls, p: int) -> "QaoaParameters":
        return cls((0.0,) * p, (0.0,) * p)


def _fold(x: float, period: float) -> float:
    y = math.fmod(float(x), period)
    if y < 0:
        y += period
    # fmod of a value just below a multiple of period can round up to period
    return 0.0 if y >= period else y


def _check_n(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if not 1 <= n <= max_qubits:
        raise CapacityError(f"n={n} outside [1, {max_qubits}]")


def _n_of(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or state.size != 1 << n:
        raise ValueError(f"state length {state.size} is not a power of two")
    return n


def initial_state(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Uniform superposition ``|+>^n``."""
    _check_n(n, max_qubits)
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def apply_phase_layer(state, h: DiagonalHamiltonian, gamma: float) -> np.ndarray:
    """Return ``exp(-i gamma H) state``."""
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (h.dim,):
        raise ValueError(f"state has shape {state.shape}, Hamiltonian acts on {h.n} qubits")
    return state * np.exp(-1j * gamma * h.energies)


def apply_mixer_layer(state, beta: float) -> np.ndarray:
    """Return ``exp(-i beta sum_l X_l) state``, one 2x2 rotation per qubit."""
    out = np.array(state, dtype=np.complex128)
    n = _n_of(out)
    c, s = math.cos(beta), -1j * math.sin(beta)
    for l in range(n):
        v = out.reshape(-1, 2, 1 << l)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = c * a + s * b
        v[:, 1, :] = c * b + s * a
    return out


def prepare_ansatz(h: DiagonalHamiltonian, params: QaoaParameters) -> np.ndarray:
    state = initial_state(h.n)
    for g, b in zip(params.gamma, params.beta):
        state = apply_mixer_layer(apply_phase_layer(state, h, g), b)
    return state


def expectation(state, h: DiagonalHamiltonian) -> float:
    state = np.asarray(state)
    if state.shape != (h.dim,):
        raise ValueError(f"state has shape {state.shape}, Hamiltonian acts on {h.n} qubits")
    return float(np.sum((state.real**2 + state.imag**2) * h.energies))


def ground_overlap(state, spectrum: SpectrumSummary) -> float:
    """Probability weight of ``state`` on the ground space.

    The cost Hamiltonian is diagonal, so its ground eigenvectors are the
    computational basis states in ``spectrum.ground_set``.
    """
    state = np.asarray(state)
    g = spectrum.ground_set
    if g.size and g[-1] >= state.size:
        raise ValueError("state dimension does not match the spectrum")
    amps = state[g]
    return float(min(1.0, np.sum(amps.real**2 + amps.imag**2)))


def energy_and_gradient(h: DiagonalHamiltonian, x) -> tuple[float, np.ndarray]:
    """Energy and its exact gradient at the parameter vector ``x``.

    Uses a reverse sweep that uncomputes the circuit layer by layer, so the
    cost is roughly three forward passes and memory stays at two states.
    ``x`` is not required to lie in the box.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    p = x.size // 2
    return _kernels.energy_and_gradient(h.energies, h.n, x[:p], x[p:])


def energy_gradient(h: DiagonalHamiltonian, params: QaoaParameters) -> np.ndarray:
    return energy_and_gradient(h, params.to_vector())[1]


@dataclass(frozen=True)
class StabilityBounds:
    """Ground-overlap sandwich implied by an energy error ``f``.

    ``lower`` and ``upper`` are the raw values; ``valid`` is false when the
    energy error is not below the spectral gap, in which case the lower bound
    carries no information.
    """

    lower: float
    upper: float
    valid: bool

    @property
    def clamped(self) -> tuple[float, float]:
        return (min(1.0, max(0.0, self.lower)), min(1.0, max(0.0, self.upper)))


def stability_bounds(f: float, gap: int | None, max_energy: int) -> StabilityBounds:
    if f < 0:
        raise ValueError(f"energy error must be non-negative, got {f}")
    if max_energy < 1:
        raise ValueError(f"max_energy must be >= 1, got {max_energy}")
    if gap is None:
        # single-valued spectrum: every state is a ground state, f can only be 0
        lower = 1.0 if f == 0 else -math.inf
        valid = True
    else:
        lower = 1.0 - f / gap
        valid = f < gap
    return StabilityBounds(lower, 1.0 - f / max_energy, valid)
