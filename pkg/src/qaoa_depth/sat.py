"""Random MAX-2-SAT instances and their diagonal (clause-counting) Hamiltonians.

Conventions shared by the whole package: qubit ``l`` (0-based) holds variable
``l + 1``, bit value 1 means *true*, and the basis index of an assignment is
``z = sum_l z_l 2**l``.  Literals use the DIMACS convention (``+j`` / ``-j``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import CapacityError, ParseError

__all__ = [
    "SatInstance",
    "DiagonalHamiltonian",
    "IsingForm",
    "SpectrumSummary",
    "DEFAULT_MAX_QUBITS",
    "max_clauses",
    "admissible_clauses",
    "generate_instance",
    "clause_density",
    "violated_count",
    "build_hamiltonian",
    "ising_coefficients",
    "analyze_spectrum",
    "read_dimacs",
    "write_dimacs",
    "instance_to_json",
    "instance_from_json",
]

DEFAULT_MAX_QUBITS = 24


def max_clauses(n: int) -> int:
    """Number of admissible 2-clauses on ``n`` variables, ``4 * C(n, 2)``."""
    return 2 * n * (n - 1)


def _normalize_clause(clause) -> tuple[int, int]:
    a, b = (int(lit) for lit in clause)
    return (a, b) if abs(a) <= abs(b) else (b, a)


@dataclass(frozen=True)
class SatInstance:
    """A MAX-2-SAT instance: ``n`` variables and ``m`` distinct 2-clauses.

    Clauses are stored as pairs of signed literals with the lower variable
    first.  ``seed`` records generation provenance and is ``None`` for
    instances read from files.
    """

    n: int
    clauses: tuple[tuple[int, int], ...]
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 variables, got n={self.n}")
        clauses = tuple(_normalize_clause(c) for c in self.clauses)
        seen = set()
        for a, b in clauses:
            for lit in (a, b):
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range for n={self.n}")
            if abs(a) == abs(b):
                raise ValueError(f"clause ({a} {b}) does not use two distinct variables")
            if (a, b) in seen:
                raise ValueError(f"duplicate clause ({a} {b})")
            seen.add((a, b))
        if not 1 <= len(clauses) <= max_clauses(self.n):
            raise ValueError(
                f"m={len(clauses)} outside [1, {max_clauses(self.n)}] for n={self.n}"
            )
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)


def admissible_clauses(n: int) -> list[tuple[int, int]]:
    """All ``4 * C(n, 2)`` non-tautological clauses in a fixed canonical order."""
    out = []
    for j, k in combinations(range(1, n + 1), 2):
        for sj in (1, -1):
            for sk in (1, -1):
                out.append((sj * j, sk * k))
    return out


def generate_instance(n: int, m: int, seed: int) -> SatInstance:
    """Sample ``m`` distinct clauses uniformly without replacement.

    The draw is a pure function of ``(n, m, seed)``; numpy's PCG64 generator
    seeded through ``SeedSequence(seed)`` is used.
    """
    if n < 2:
        raise ValueError(f"need at least 2 variables, got n={n}")
    total = max_clauses(n)
    if not 1 <= m <= total:
        raise ValueError(f"m={m} out of bounds: n={n} admits between 1 and {total} clauses")
    pool = admissible_clauses(n)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    picks = rng.choice(total, size=m, replace=False)
    return SatInstance(n, tuple(pool[i] for i in picks), seed=seed)


def clause_density(instance: SatInstance) -> Fraction:
    return Fraction(instance.m, instance.n)


def violated_count(instance: SatInstance, assignment) -> int:
    """Count clauses whose two literals are both false under ``assignment``.

    ``assignment[l]`` is the truth value of variable ``l + 1``.
    """
    bits = [bool(v) for v in assignment]
    if len(bits) != instance.n:
        raise ValueError(f"assignment has length {len(bits)}, expected {instance.n}")
    count = 0
    for a, b in instance.clauses:
        if bits[abs(a) - 1] != (a > 0) and bits[abs(b) - 1] != (b > 0):
            count += 1
    return count


@dataclass(frozen=True, eq=False)
class DiagonalHamiltonian:
    """Violated-clause count ``E(z)`` for every basis state ``z``."""

    n: int
    energies: np.ndarray = field(repr=False)

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=np.int64)
        if energies.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} energies, got shape {energies.shape}")
        if energies.size and energies.min() < 0:
            raise ValueError("energies must be non-negative")
        energies.setflags(write=False)
        object.__setattr__(self, "energies", energies)

    @property
    def dim(self) -> int:
        return 1 << self.n


def build_hamiltonian(instance: SatInstance, max_qubits: int = DEFAULT_MAX_QUBITS) -> DiagonalHamiltonian:
    n = instance.n
    if n > max_qubits:
        raise CapacityError(f"n={n} exceeds the {max_qubits}-qubit cap")
    z = np.arange(1 << n, dtype=np.int64)
    energies = np.zeros(1 << n, dtype=np.int64)
    for a, b in instance.clauses:
        # a literal is false when its variable's bit differs from its polarity
        fa = ((z >> (abs(a) - 1)) & 1) != (a > 0)
        fb = ((z >> (abs(b) - 1)) & 1) != (b > 0)
        energies += fa & fb
    return DiagonalHamiltonian(n, energies)


@dataclass(frozen=True)
class IsingForm:
    """``E = constant + sum_j h[j] s_j + sum_{j<k} J[j, k] s_j s_k``.

    Spins are ``s_j = (-1)**z_j`` with ``j`` the 0-based qubit index, so a
    qubit in bit state 0 has ``s = +1``.
    """

    n: int
    constant: Fraction
    h: tuple[Fraction, ...]
    J: dict

    def energy(self, z: int) -> Fraction:
        s = [1 - 2 * ((z >> j) & 1) for j in range(self.n)]
        e = self.constant + sum(hj * sj for hj, sj in zip(self.h, s))
        return e + sum(c * s[j] * s[k] for (j, k), c in self.J.items())

    def energies(self) -> np.ndarray:
        """Reconstructed energies for all ``2**n`` states, as exact integers."""
        z = np.arange(1 << self.n, dtype=np.int64)
        s = 1 - 2 * ((z[:, None] >> np.arange(self.n)) & 1)
        four = 4 * self.constant + s @ np.array([4 * x for x in self.h], dtype=np.int64)
        for (j, k), c in self.J.items():
            four = four + int(4 * c) * s[:, j] * s[:, k]
        four = np.asarray(four, dtype=np.int64)
        if np.any(four % 4):
            raise ArithmeticError("Ising reconstruction is not integral")
        return four // 4


def ising_coefficients(instance: SatInstance) -> IsingForm:
    """Expand each clause penalty projector into Pauli-Z terms.

    A positive literal maps to ``(I + Z)/2`` and a negated one to
    ``(I - Z)/2``; the product of the two projectors penalizes exactly the
    violating assignments.
    """
    quarter = Fraction(1, 4)
    constant = Fraction(0)
    h = [Fraction(0)] * instance.n
    J: dict[tuple[int, int], Fraction] = {}
    for a, b in instance.clauses:
        j, k = abs(a) - 1, abs(b) - 1
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        constant += quarter
        h[j] += sa * quarter
        h[k] += sb * quarter
        key = (min(j, k), max(j, k))
        J[key] = J.get(key, Fraction(0)) + sa * sb * quarter
    J = {key: c for key, c in J.items() if c != 0}
    return IsingForm(instance.n, constant, tuple(h), J)


@dataclass(frozen=True, eq=False)
class SpectrumSummary:
    """Exhaustive spectral data of a diagonal Hamiltonian.

    ``gap`` is ``None`` when every basis state has the same energy.
    """

    ground_energy: int
    degeneracy: int
    gap: int | None
    max_energy: int
    ground_set: np.ndarray = field(repr=False)


def analyze_spectrum(h: DiagonalHamiltonian) -> SpectrumSummary:
    e = h.energies
    lam0 = int(e.min())
    lmax = int(e.max())
    ground = np.flatnonzero(e == lam0)
    ground.setflags(write=False)
    excited = e[e > lam0]
    gap = int(excited.min()) - lam0 if excited.size else None
    return SpectrumSummary(lam0, int(ground.size), gap, lmax, ground)


# -- file formats ---------------------------------------------------------


def read_dimacs(text: str) -> SatInstance:
    """Parse DIMACS CNF restricted to exactly two literals per clause."""
    n = m = None
    clauses: list[tuple[int, int]] = []
    clause_lines: list[int] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if n < 2 or m < 1:
                raise ParseError(f"header declares n={n}, m={m}", lineno)
            continue
        if n is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if len(pending) != 2:
                    raise ParseError(f"clause has {len(pending)} literals, expected 2", lineno)
                a, b = pending
                if abs(a) == abs(b):
                    raise ParseError(f"clause ({a} {b}) repeats variable {abs(a)}", lineno)
                clauses.append(_normalize_clause(pending))
                clause_lines.append(lineno)
                pending = []
            elif abs(lit) > n:
                raise ParseError(f"variable {abs(lit)} exceeds n={n}", lineno)
            else:
                pending.append(lit)
    if n is None:
        raise ParseError("missing 'p cnf' header", 0)
    if pending:
        raise ParseError("last clause not terminated by 0", len(text.splitlines()))
    if len(clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}", 0)
    seen = {}
    for c, lineno in zip(clauses, clause_lines):
        if c in seen:
            raise ParseError(f"duplicate clause {c} (first on line {seen[c]})", lineno)
        seen[c] = lineno
    return SatInstance(n, tuple(clauses))


def write_dimacs(instance: SatInstance) -> str:
    lines = [f"p cnf {instance.n} {instance.m}"]
    lines += [f"{a} {b} 0" for a, b in instance.clauses]
    return "\n".join(lines) + "\n"


def instance_to_json(instance: SatInstance) -> str:
    doc = {
        "n": instance.n,
        "m": instance.m,
        "seed": instance.seed,
        "clauses": [list(c) for c in instance.clauses],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def instance_from_json(text: str) -> SatInstance:
    doc = json.loads(text)
    inst = SatInstance(int(doc["n"]), tuple(tuple(c) for c in doc["clauses"]), doc.get("seed"))
    if "m" in doc and int(doc["m"]) != inst.m:
        raise ValueError(f"'m' is {doc['m']} but {inst.m} clauses are listed")
    return inst
