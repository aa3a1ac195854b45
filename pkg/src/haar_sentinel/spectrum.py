"""Observables as spectra: eigenvalues, multiplicities, and eigenbasis layouts.

Everything downstream (moments, thresholds, sampling) depends on an observable
only through its spectrum (distinct eigenvalues with multiplicities) and,
where basis-state bookkeeping matters, through a length-N eigenvalue
assignment.  Full matrices are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, fsum
from typing import Sequence

import numpy as np

MAX_DIMENSION = 2**20  # dense assignments only; desk-scale arrays


@dataclass(frozen=True)
class Spectrum:
    """Distinct non-negative eigenvalues with multiplicities, sorted ascending.

    ``eigenvalues[i]`` occurs ``multiplicities[i]`` times; ``dimension`` is the
    total Hilbert-space dimension.
    """

    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    dimension: int = field(init=False)

    def __post_init__(self):
        if len(self.eigenvalues) == 0:
            raise ValueError("spectrum needs at least one eigenvalue")
        if len(self.eigenvalues) != len(self.multiplicities):
            raise ValueError(
                f"{len(self.eigenvalues)} eigenvalues vs "
                f"{len(self.multiplicities)} multiplicities"
            )
        for lam in self.eigenvalues:
            if not np.isfinite(lam) or lam < 0:
                raise ValueError(f"eigenvalue {lam} is not a finite non-negative real")
        if len(set(self.eigenvalues)) != len(self.eigenvalues):
            raise ValueError("duplicate eigenvalue in spectrum")
        for m in self.multiplicities:
            if not isinstance(m, (int, np.integer)) or m < 1:
                raise ValueError(f"multiplicity {m} is not a positive integer")
        if any(self.eigenvalues[i] > self.eigenvalues[i + 1]
               for i in range(len(self.eigenvalues) - 1)):
            raise ValueError("eigenvalues must be sorted ascending (use make_spectrum)")
        n = int(sum(self.multiplicities))
        if n > MAX_DIMENSION:
            raise ValueError(f"dimension {n} exceeds supported maximum {MAX_DIMENSION}")
        object.__setattr__(self, "dimension", n)

    @property
    def levels(self) -> int:
        """Number of distinct eigenvalues."""
        return len(self.eigenvalues)

    @property
    def min_multiplicity(self) -> int:
        return min(self.multiplicities)

    @property
    def max_eigenvalue(self) -> float:
        return self.eigenvalues[-1]

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "multiplicities": [int(m) for m in self.multiplicities],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Spectrum":
        return make_spectrum(d["eigenvalues"], d["multiplicities"])


@dataclass(frozen=True)
class EigenAssignment:
    """Length-N map from basis-state index to eigenvalue of a diagonal observable."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("empty assignment")
        if len(self.values) > MAX_DIMENSION:
            raise ValueError(f"assignment longer than {MAX_DIMENSION}")
        for v in self.values:
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"assignment value {v} is not a finite non-negative real")

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def collapse(self) -> Spectrum:
        """Recover the Spectrum whose expansion has this multiset of values."""
        distinct = sorted(set(self.values))
        counts = [sum(1 for v in self.values if v == d) for d in distinct]
        return make_spectrum(distinct, counts)


@dataclass(frozen=True)
class Permutation:
    """A bijection on basis-state indices 0..N-1."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        seen = [False] * n
        for i in self.mapping:
            if not 0 <= i < n or seen[i]:
                raise ValueError("mapping is not a bijection on 0..N-1")
            seen[i] = True

    @property
    def dimension(self) -> int:
        return len(self.mapping)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "Permutation":
        if i == j:
            raise ValueError("transposition requires two distinct indices")
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return Permutation(tuple(m))


def make_spectrum(eigenvalues: Sequence[float], multiplicities: Sequence[int]) -> Spectrum:
    """Validate and canonicalize (ascending eigenvalue order) a spectrum."""
    if len(eigenvalues) != len(multiplicities):
        raise ValueError("eigenvalues and multiplicities must have equal length")
    pairs = sorted(zip((float(v) for v in eigenvalues), multiplicities))
    return Spectrum(
        eigenvalues=tuple(p[0] for p in pairs),
        multiplicities=tuple(int(p[1]) for p in pairs),
    )


def trace(s: Spectrum) -> float:
    """Trace of the observable: sum of eigenvalues weighted by multiplicity."""
    return fsum(lam * m for lam, m in zip(s.eigenvalues, s.multiplicities))


def number_operator(n: int) -> Spectrum:
    """Spectrum of the n-qubit excitation counter sum_k (1 - Z_k)/2.

    Eigenvalue k (the number of 1s in a basis state's bit pattern) has
    multiplicity C(n, k), so the dimension is 2**n.
    """
    if not 1 <= n <= 20:
        raise ValueError(f"qubit count {n} outside supported range 1..20")
    return make_spectrum(
        [float(k) for k in range(n + 1)],
        [comb(n, k) for k in range(n + 1)],
    )


def number_operator_assignment(n: int) -> EigenAssignment:
    """Computational-basis diagonal of the n-qubit excitation counter.

    Entry i is the popcount of i, i.e. the eigenvalues in their physical
    basis-state layout rather than the sorted canonical order of expand().
    """
    if not 1 <= n <= 20:
        raise ValueError(f"qubit count {n} outside supported range 1..20")
    bits = np.arange(2**n, dtype=np.uint32)
    pop = np.zeros(2**n, dtype=np.int64)
    while bits.any():
        pop += bits & 1
        bits >>= 1
    return EigenAssignment(tuple(float(v) for v in pop))


def expand(s: Spectrum) -> EigenAssignment:
    """Canonical assignment: each eigenvalue repeated by multiplicity, ascending."""
    values = []
    for lam, m in zip(s.eigenvalues, s.multiplicities):
        values.extend([lam] * m)
    return EigenAssignment(tuple(values))


def apply_permutation(a: EigenAssignment, p: Permutation) -> EigenAssignment:
    """Conjugate a diagonal observable by a basis permutation.

    Entry i of the result is entry p(i) of the input, so the multiset of
    eigenvalues is preserved.
    """
    if a.dimension != p.dimension:
        raise ValueError(f"assignment dimension {a.dimension} != permutation dimension {p.dimension}")
    return EigenAssignment(tuple(a.values[j] for j in p.mapping))


def projector_difference(a: EigenAssignment, i: int, j: int) -> tuple[float, ...]:
    """Diagonal of the observable minus its (i<->j)-transposed conjugate.

    When a[i] = 0 and a[j] is the maximal eigenvalue this is the rank-two
    operator norm(O) * (|j><j| - |i><i|): exactly two nonzero entries.
    """
    n = a.dimension
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("index out of range")
    if i == j:
        raise ValueError("indices must differ")
    swapped = apply_permutation(a, Permutation.transposition(n, i, j))
    return tuple(x - y for x, y in zip(a.values, swapped.values))


def random_spectrum(rng: np.random.Generator, max_levels: int = 6,
                    max_dimension: int = 1024, max_eigenvalue: float = 5.0,
                    allow_zero: bool = True) -> Spectrum:
    """Draw a random valid spectrum; handy for property tests."""
    g = int(rng.integers(1, max_levels + 1))
    lams = np.sort(rng.uniform(0.0, max_eigenvalue, size=g))
    while len(set(lams.tolist())) < g:
        lams = np.sort(rng.uniform(0.0, max_eigenvalue, size=g))
    if allow_zero and rng.random() < 0.3:
        lams[0] = 0.0
    mult = rng.integers(1, 64, size=g)
    n = int(mult.sum())
    if n > max_dimension:
        mult = np.maximum(1, (mult * max_dimension) // n)
    return make_spectrum(lams.tolist(), [int(m) for m in mult])
