"""Counter-based random streams with per-sample addressing.

Reproducibility contract: every Monte Carlo sample owns a fixed range of raw
64-bit words inside a Philox stream keyed by (seed, basis index, permutation
index).  Word w of the stream lives at Philox counter w // 4, so any
contiguous block of samples can be generated in one vectorized call and the
bits can never depend on chunking, scheduling, or worker count.

All transforms applied to those words consume a fixed number of words per
sample (inverse-CDF transforms; gamma variates with half-integer shape are
built from exact exponential and half-normal-squared summands), which is what
keeps the per-sample word ranges static.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np
from numpy.random import Philox
from scipy.special import gammaincinv, ndtri

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_ROOT = 0x243F6A8885A308D3

CHUNK_SAMPLES = 8192


def _mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijective avalanche on 64-bit words."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_id(*labels: int) -> int:
    """Fold integer labels into a 64-bit substream identifier."""
    h = _ROOT
    for label in labels:
        h = _mix64(h ^ _mix64(int(label) & _MASK64))
    return h


def stream_key(seed: int, basis_index: int = 0, perm_index: int = 0) -> int:
    """128-bit Philox key for one leaf of the seed tree.

    The tree is seed -> basis index -> permutation index; sample index is
    resolved below via counter addressing, not via the key.
    """
    return ((int(seed) & _MASK64) << 64) | substream_id(basis_index, perm_index)


def raw_words(key: int, word_start: int, count: int) -> np.ndarray:
    """Words [word_start, word_start+count) of the keyed Philox stream."""
    block, offset = divmod(int(word_start), 4)
    raw = Philox(key=key, counter=block).random_raw(offset + count)
    return raw[offset:offset + count]


def uniforms(key: int, word_start: int, count: int) -> np.ndarray:
    """Strictly interior uniforms on (0, 1), one word each.

    The half-step offset keeps inverse-CDF transforms away from the poles at
    0 and 1.
    """
    w = raw_words(key, word_start, count)
    return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def standard_normals(key: int, word_start: int, count: int) -> np.ndarray:
    return ndtri(uniforms(key, word_start, count))


def halfint_gamma_words(alpha: Sequence[float]) -> int:
    """Words consumed per sample by halfint_gamma_matrix for this alpha."""
    total = 0
    for a in alpha:
        m = int(a)
        if a - m not in (0.0, 0.5) or a <= 0:
            raise ValueError(f"shape {a} is not a positive half-integer")
        total += m + (1 if a - m == 0.5 else 0)
    return total


def halfint_gamma_matrix(key: int, start_sample: int, count: int,
                         alpha: Sequence[float]) -> np.ndarray:
    """(count, len(alpha)) exact Gamma(alpha_j, 1) variates, fixed word budget.

    Gamma(m) is a sum of m unit exponentials; Gamma(1/2) is half a squared
    standard normal; Gamma(m + 1/2) is their independent sum.  Each column
    therefore consumes exactly int(a) + (a is half-integral) words.
    """
    words_per = halfint_gamma_words(alpha)
    u = uniforms(key, start_sample * words_per, count * words_per)
    u = u.reshape(count, words_per)
    out = np.empty((count, len(alpha)))
    col = 0
    for j, a in enumerate(alpha):
        m = int(a)
        g = np.zeros(count)
        if m:
            g -= np.log(u[:, col:col + m]).sum(axis=1)
            col += m
        if a - m == 0.5:
            z = ndtri(u[:, col])
            g += 0.5 * z * z
            col += 1
        out[:, j] = g
    return out


def general_gamma_matrix(key: int, start_sample: int, count: int,
                         alpha: Sequence[float]) -> np.ndarray:
    """Gamma variates for arbitrary positive shapes via inverse lower-gamma.

    One word per variate; slower than the half-integer path but exact in
    distribution for any alpha.
    """
    d = len(alpha)
    u = uniforms(key, start_sample * d, count * d).reshape(count, d)
    return gammaincinv(np.asarray(alpha, dtype=float), u)


def chunked_samples(total: int, compute: Callable[[int, int], np.ndarray],
                    workers: int = 1) -> np.ndarray:
    """Assemble compute(start, count) over a fixed chunk grid, in index order.

    The grid depends only on CHUNK_SAMPLES, so the output is bit-identical
    for any worker count; threads only change who evaluates which chunk.
    """
    if total == 0:
        return np.empty(0)
    starts = list(range(0, total, CHUNK_SAMPLES))
    jobs = [(s, min(CHUNK_SAMPLES, total - s)) for s in starts]
    if workers <= 1 or len(jobs) == 1:
        parts = [compute(s, c) for s, c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: compute(*job), jobs))
    return np.concatenate(parts)
