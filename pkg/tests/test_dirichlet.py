import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import beta as beta_dist
from scipy.stats import kstest, ks_2samp

from haar_sentinel.dirichlet import (
    DirichletParams,
    SimplexPoint,
    aggregate,
    dirichlet_mixed_moment,
    sample_dirichlet,
    sample_dirichlet_array,
)


def beta_moment_by_quadrature(a, b, t):
    """Independent oracle: t-th moment of Beta(a, b) by numerical integration.

    The endpoint singularities x^(a-1) (1-x)^(b-1) are handled by the
    algebraic-weight quadrature rule, leaving a smooth integrand.
    """
    from scipy.special import beta as beta_fn

    value, err = quad(lambda x: x**t / beta_fn(a, b), 0.0, 1.0,
                      weight="alg", wvar=(a - 1.0, b - 1.0))
    assert err < 1e-12
    return value


def test_params_validation():
    p = DirichletParams((0.5, 1.5))
    assert p.alpha0 == 2.0
    with pytest.raises(ValueError):
        DirichletParams((0.5, 0.0))
    with pytest.raises(ValueError):
        DirichletParams(())


def test_simplex_point_validation():
    SimplexPoint((0.25, 0.75))
    with pytest.raises(ValueError):
        SimplexPoint((0.5, 0.6))
    with pytest.raises(ValueError):
        SimplexPoint((-0.1, 1.1))


def test_mixed_moment_trivial_cases():
    p = DirichletParams((0.5, 0.5))
    assert dirichlet_mixed_moment(p, (0, 0)) == 1.0
    assert abs(dirichlet_mixed_moment(p, (1, 0)) - 0.5) < 1e-15


def test_mixed_moment_against_quadrature_oracle():
    # the first coordinate of Dir(1/2, 1/2) is Beta(1/2, 1/2)
    p = DirichletParams((0.5, 0.5))
    for t in (1, 2, 3, 4):
        oracle = beta_moment_by_quadrature(0.5, 0.5, t)
        assert abs(dirichlet_mixed_moment(p, (t, 0)) - oracle) < 1e-12
    assert abs(dirichlet_mixed_moment(p, (2, 0)) - 0.375) < 1e-15


def test_mixed_moment_length_mismatch():
    with pytest.raises(ValueError):
        dirichlet_mixed_moment(DirichletParams((1.0, 1.0)), (1,))


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(min_value=0.1, max_value=20.0), min_size=1, max_size=8),
    st.data(),
)
def test_first_moment_is_alpha_ratio(alpha, data):
    p = DirichletParams(tuple(alpha))
    i = data.draw(st.integers(min_value=0, max_value=p.dim - 1))
    k = [0] * p.dim
    k[i] = 1
    assert abs(dirichlet_mixed_moment(p, k) - p.alpha[i] / p.alpha0) < 1e-12


def test_mixed_moment_against_monte_carlo():
    # every mixed moment with d <= 4 and |k| <= 4 must agree with simulation
    rng = np.random.default_rng(2024)
    cases = [
        ((0.5, 0.5, 1.5, 2.0), (2, 1, 0, 1)),
        ((1.0, 3.0), (2, 2)),
        ((0.5, 0.5, 0.5), (4, 0, 0)),
        ((2.5, 4.0, 1.0), (1, 1, 2)),
    ]
    for alpha, k in cases:
        p = DirichletParams(alpha)
        x = sample_dirichlet_array(p, rng, 1_000_000)
        prod = np.prod(x ** np.asarray(k), axis=1)
        mc, se = prod.mean(), prod.std(ddof=1) / 1000.0
        exact = dirichlet_mixed_moment(p, k)
        assert abs(exact - mc) < 5 * se, (alpha, k, exact, mc, se)


def test_sample_on_simplex():
    rng = np.random.default_rng(11)
    p = DirichletParams((0.5, 1.0, 2.0))
    for _ in range(100):
        pt = sample_dirichlet(p, rng)
        assert pt.dim == 3  # construction enforces the simplex invariant


def test_sample_single_component():
    pt = sample_dirichlet(DirichletParams((2.0,)), np.random.default_rng(0))
    assert pt.x == (1.0,)


def test_symmetric_mean():
    rng = np.random.default_rng(3)
    x = sample_dirichlet_array(DirichletParams((1.0, 1.0)), rng, 100_000)
    se = x[:, 0].std(ddof=1) / np.sqrt(100_000)
    assert abs(x[:, 0].mean() - 0.5) < 3 * se


def test_arcsine_marginal_goodness_of_fit():
    rng = np.random.default_rng(8)
    x = sample_dirichlet_array(DirichletParams((0.5, 0.5)), rng, 100_000)
    assert kstest(x[:, 0], beta_dist(0.5, 0.5).cdf).pvalue > 0.01


def test_aggregate_examples():
    p = DirichletParams((0.5, 0.5, 0.5, 0.5))
    assert aggregate(p, [(0,), (1, 2), (3,)]).alpha == (0.5, 1.0, 0.5)
    assert aggregate(p, [(0,), (1,), (2,), (3,)]) == p
    assert aggregate(DirichletParams((0.5,) * 8), [tuple(range(8))]).alpha == (4.0,)


def test_aggregate_rejects_non_partition():
    p = DirichletParams((1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        aggregate(p, [(0, 1)])  # missing index
    with pytest.raises(ValueError):
        aggregate(p, [(0, 1), (1, 2)])  # duplicated index
    with pytest.raises(ValueError):
        aggregate(p, [(0, 1), (2, 3)])  # out of range


def test_aggregation_matches_group_sums_in_distribution():
    # group sums of Dirichlet samples vs direct samples of aggregated params,
    # two-sample KS per group at significance 0.01
    rng = np.random.default_rng(7)
    for _ in range(5):
        d = int(rng.integers(3, 9))
        alpha = tuple(float(a) for a in rng.uniform(0.3, 3.0, size=d))
        n_groups = int(rng.integers(2, d + 1))
        labels = rng.integers(0, n_groups, size=d)
        while len(set(labels.tolist())) < n_groups:
            labels = rng.integers(0, n_groups, size=d)
        partition = [tuple(int(i) for i in np.flatnonzero(labels == g)) for g in range(n_groups)]
        p = DirichletParams(alpha)
        direct = sample_dirichlet_array(aggregate(p, partition), rng, 100_000)
        summed = np.stack(
            [sample_dirichlet_array(p, rng, 100_000)[:, list(g)].sum(axis=1) for g in partition],
            axis=1,
        )
        for j in range(n_groups):
            assert ks_2samp(summed[:, j], direct[:, j]).pvalue > 0.01
