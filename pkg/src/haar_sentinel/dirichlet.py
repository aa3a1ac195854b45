"""Dirichlet distribution engine: sampling, exact mixed moments, aggregation.

The Dirichlet family is the backbone of every closed form in this package:
squared amplitudes of uniformly random states live on the probability simplex,
and grouping coordinates by eigenvalue turns the symmetric case into the
general one with parameters proportional to multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, fsum, lgamma
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class DirichletParams:
    """Concentration vector alpha (all entries positive) with cached total."""

    alpha: tuple[float, ...]
    alpha0: float = field(init=False)

    def __post_init__(self):
        if len(self.alpha) == 0:
            raise ValueError("alpha must be non-empty")
        for a in self.alpha:
            if not np.isfinite(a) or a <= 0:
                raise ValueError(f"alpha entry {a} is not a positive real")
        object.__setattr__(self, "alpha0", fsum(self.alpha))

    @property
    def dim(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class SimplexPoint:
    """A point on the standard simplex: non-negative coordinates summing to 1."""

    x: tuple[float, ...]

    def __post_init__(self):
        for v in self.x:
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"coordinate {v} is negative or not finite")
        total = fsum(self.x)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"coordinates sum to {total}, not 1")

    @property
    def dim(self) -> int:
        return len(self.x)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


def sample_dirichlet(params: DirichletParams, rng: np.random.Generator) -> SimplexPoint:
    """One draw: normalize independent Gamma(alpha_i, 1) variates."""
    g = rng.gamma(shape=np.asarray(params.alpha))
    total = g.sum()
    if total == 0.0:
        # all components underflowed; retry (probability is astronomically small)
        return sample_dirichlet(params, rng)
    return SimplexPoint(tuple(float(v) for v in g / total))


def sample_dirichlet_array(params: DirichletParams, rng: np.random.Generator,
                           size: int) -> np.ndarray:
    """Batch of draws as a (size, dim) array; rows sum to 1."""
    g = rng.gamma(shape=np.asarray(params.alpha), size=(size, params.dim))
    return g / g.sum(axis=1, keepdims=True)


def dirichlet_mixed_moment(params: DirichletParams, k: Sequence[int]) -> float:
    """Exact mixed moment E[prod_i x_i^(k_i)] for non-negative integer orders.

    Evaluated as a sum of log-gamma differences and exponentiated once, so
    large totals never overflow the intermediate gamma ratios.
    """
    if len(k) != params.dim:
        raise ValueError(f"order vector length {len(k)} != alpha length {params.dim}")
    for ki in k:
        if not isinstance(ki, (int, np.integer)) or ki < 0:
            raise ValueError(f"moment order {ki} is not a non-negative integer")
    k0 = int(sum(k))
    log_val = lgamma(params.alpha0) - lgamma(params.alpha0 + k0)
    for a, ki in zip(params.alpha, k):
        if ki:
            log_val += lgamma(a + ki) - lgamma(a)
    return exp(log_val)


def aggregate(params: DirichletParams, partition: Sequence[Sequence[int]]) -> DirichletParams:
    """Sum alpha over groups of a set partition of the coordinate indices.

    Summing Dirichlet coordinates over each group yields a Dirichlet vector
    with exactly these summed parameters, so this is the distribution-level
    counterpart of coordinate grouping.
    """
    seen = [False] * params.dim
    for group in partition:
        for i in group:
            if not 0 <= i < params.dim or seen[i]:
                raise ValueError("partition must cover each index exactly once")
            seen[i] = True
    if not all(seen):
        raise ValueError("partition must cover all indices")
    return DirichletParams(tuple(fsum(params.alpha[i] for i in group) for group in partition))
