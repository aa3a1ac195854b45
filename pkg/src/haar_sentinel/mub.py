"""Complete sets of mutually unbiased bases for prime dimensions and N = 4.

Two orthonormal bases U, V are mutually unbiased when every cross overlap
satisfies |<u_i|v_j>|^2 = 1/N.  A complete set holds N+1 pairwise unbiased
bases (the computational basis included), which is the maximum and exists for
every prime-power dimension.  Here the construction covers:

- N = 2: explicit three-basis table.
- odd prime N: quadratic-phase bases with entries omega^(r i^2 + j i)/sqrt(N),
  omega = exp(2 pi i / N); basis index r, column j.
- N = 4: a fixed verified table (general power-of-two machinery is out of
  scope; 4 keeps two-qubit demonstrations possible).

Whatever the formula, the product is pinned by its output property: the
exhaustive pairwise check below must pass at tolerance 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

UNBIASED_TOL = 1e-10


class UnsupportedDimensionError(ValueError):
    """No complete MUB construction is available for this dimension."""


@dataclass(frozen=True)
class MubBasis:
    """One orthonormal basis, stored as the columns of a unitary matrix."""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("basis matrix must be square")
        if m.shape[0] < 2:
            raise ValueError("dimension must be at least 2")
        dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if dev > UNBIASED_TOL:
            raise ValueError(f"columns not orthonormal (deviation {dev:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MubSet:
    """A complete family of N+1 pairwise unbiased bases for dimension N."""

    bases: tuple[MubBasis, ...]
    dimension: int

    def __post_init__(self):
        if len(self.bases) != self.dimension + 1:
            raise ValueError(f"complete set for N={self.dimension} needs {self.dimension + 1} bases")
        for b in self.bases:
            if b.dimension != self.dimension:
                raise ValueError("mixed dimensions in basis set")

    def __len__(self) -> int:
        return len(self.bases)

    def max_pairwise_deviation(self) -> float:
        worst = 0.0
        for i in range(len(self.bases)):
            for j in range(i + 1, len(self.bases)):
                _, dev = check_mub(self.bases[i], self.bases[j])
                worst = max(worst, dev)
        return worst

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "bases": [
                {
                    "label": b.label,
                    "columns": [[[float(z.real), float(z.imag)] for z in col] for col in b.matrix.T],
                }
                for b in self.bases
            ],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "MubSet":
        bases = []
        for entry in d["bases"]:
            cols = np.array(
                [[complex(re, im) for re, im in col] for col in entry["columns"]]
            ).T
            bases.append(MubBasis(matrix=cols, label=entry["label"]))
        return MubSet(bases=tuple(bases), dimension=int(d["dimension"]))


class MubCheck(NamedTuple):
    unbiased: bool
    max_deviation: float


def check_mub(u: MubBasis, v: MubBasis) -> MubCheck:
    """Whether all squared cross overlaps equal 1/N, and the worst deviation."""
    if u.dimension != v.dimension:
        raise ValueError(f"dimension mismatch: {u.dimension} vs {v.dimension}")
    n = u.dimension
    overlaps = np.abs(v.matrix.conj().T @ u.matrix) ** 2
    dev = float(np.abs(overlaps - 1.0 / n).max())
    return MubCheck(unbiased=dev <= UNBIASED_TOL, max_deviation=dev)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _odd_prime_bases(p: int) -> list[np.ndarray]:
    omega = np.exp(2j * np.pi / p)
    i = np.arange(p)
    bases = []
    for r in range(p):
        phases = np.empty((p, p), dtype=complex)
        for j in range(p):
            phases[:, j] = omega ** ((r * i * i + j * i) % p)
        bases.append(phases / np.sqrt(p))
    return bases


_N2_TABLES = [
    np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2),
]

# Two-qubit table; each row below is one basis vector.  Verified exhaustively
# in tests via the pairwise overlap check.
_I = 1j
_N4_TABLES = [
    np.array(rows, dtype=complex).T / 2.0
    for rows in (
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]],
        [[1, -1, -_I, -_I], [1, 1, -_I, _I], [1, 1, _I, -_I], [1, -1, _I, _I]],
        [[1, -_I, -_I, -1], [1, _I, _I, -1], [1, -_I, _I, 1], [1, _I, -_I, 1]],
        [[1, -_I, -1, -_I], [1, _I, -1, _I], [1, -_I, 1, _I], [1, _I, 1, -_I]],
    )
]


def mub_complete_set(n_dim: int) -> MubSet:
    """Build the N+1 pairwise unbiased bases for prime N or N = 4.

    Raises UnsupportedDimensionError otherwise: no general construction is
    known beyond prime powers, and only the prime + N=4 cases ship here.
    """
    if n_dim < 2:
        raise UnsupportedDimensionError(f"dimension {n_dim} too small (need N >= 2)")
    computational = MubBasis(np.eye(n_dim, dtype=complex), label="computational")
    if n_dim == 2:
        extra = _N2_TABLES
    elif n_dim == 4:
        extra = _N4_TABLES
    elif _is_prime(n_dim):
        extra = _odd_prime_bases(n_dim)
    else:
        raise UnsupportedDimensionError(
            f"no construction available for dimension {n_dim} (prime or 4 required)"
        )
    bases = [computational] + [
        MubBasis(m, label=f"rotated-{r}") for r, m in enumerate(extra)
    ]
    return MubSet(bases=tuple(bases), dimension=n_dim)
