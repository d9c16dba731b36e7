import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailix import DomainError, ParetoLaw, SeedSpec, pareto_quantile, sample_pareto

from oracles import ecdf_sup_distance, pareto_quantile_bisect


def test_quantile_at_zero_is_lower_endpoint():
    assert pareto_quantile(ParetoLaw(0.5), 0.0) == 1.0


def test_quantile_median_of_unit_law():
    assert pareto_quantile(ParetoLaw(1.0), 0.5) == pytest.approx(2.0, abs=1e-14)


def test_quantile_matches_bisection():
    assert pareto_quantile(ParetoLaw(0.5), 0.75) == pytest.approx(16.0, rel=1e-12)
    assert pareto_quantile_bisect(0.5, 0.75) == pytest.approx(16.0, rel=1e-10)
    for alpha in (0.1, 0.7, 1.3, 2.0):
        for u in (0.01, 0.3, 0.9, 0.999):
            assert pareto_quantile(ParetoLaw(alpha), u) == pytest.approx(
                pareto_quantile_bisect(alpha, u), rel=1e-9)


@pytest.mark.parametrize("u", [-0.1, 1.0, 1.5, float("nan")])
def test_quantile_rejects_levels_outside_unit_interval(u):
    with pytest.raises(DomainError):
        pareto_quantile(ParetoLaw(1.0), u)


def test_quantile_vectorised():
    u = np.array([0.0, 0.5, 0.75])
    np.testing.assert_allclose(pareto_quantile(ParetoLaw(1.0), u), [1.0, 2.0, 4.0])


@given(st.floats(0.05, 2.0), st.floats(0.0, 0.999999), st.floats(0.0, 0.999999))
def test_quantile_strictly_increasing(alpha, u1, u2):
    if u1 == u2:
        return
    lo, hi = sorted((u1, u2))
    law = ParetoLaw(alpha)
    assert pareto_quantile(law, lo) <= pareto_quantile(law, hi)
    if hi - lo > 1e-12:  # closer levels can round to the same double
        assert pareto_quantile(law, lo) < pareto_quantile(law, hi)


@given(st.floats(0.05, 2.0), st.floats(0.0, 0.9999))
def test_cdf_inverts_quantile(alpha, u):
    law = ParetoLaw(alpha)
    assert float(law.cdf(law.quantile(u))) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.0, -1.0, 2.01, float("nan")])
def test_law_rejects_bad_alpha(alpha):
    with pytest.raises(DomainError):
        ParetoLaw(alpha)


def test_cdf_zero_below_support():
    assert float(ParetoLaw(1.0).cdf(0.5)) == 0.0


def test_small_sample_support_and_determinism():
    law, seed = ParetoLaw(1.0), SeedSpec(123, 4)
    a = sample_pareto(law, 3, seed)
    b = sample_pareto(law, 3, seed)
    assert len(a) == 3
    assert np.all(a.values >= 1.0)
    np.testing.assert_array_equal(a.values, b.values)


def test_distinct_streams_differ():
    law = ParetoLaw(1.0)
    a = sample_pareto(law, 50, SeedSpec(1, 0)).values
    assert not np.array_equal(a, sample_pareto(law, 50, SeedSpec(1, 1)).values)
    assert not np.array_equal(a, sample_pareto(law, 50, SeedSpec(1, 0, row_index=1)).values)
    assert not np.array_equal(a, sample_pareto(law, 50, SeedSpec(2, 0)).values)


def test_longer_draw_extends_shorter_one():
    law, seed = ParetoLaw(0.7), SeedSpec(9, 3)
    short = sample_pareto(law, 100, seed).values
    long = sample_pareto(law, 1000, seed).values
    np.testing.assert_array_equal(long[:100], short)


def test_zero_size_rejected():
    with pytest.raises(DomainError):
        sample_pareto(ParetoLaw(1.0), 0, SeedSpec(0))


@pytest.mark.parametrize("kwargs", [dict(base_seed=-1), dict(base_seed=2**64),
                                    dict(base_seed=0, trial_index=-1)])
def test_seed_spec_validation(kwargs):
    with pytest.raises(DomainError):
        SeedSpec(**kwargs)


def test_empirical_cdf_close_to_law():
    law = ParetoLaw(0.5)
    x = sample_pareto(law, 100_000, SeedSpec(2024)).values
    assert ecdf_sup_distance(x.tolist(), lambda v: 1 - v ** -0.5) < 0.01


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
def test_empirical_frequencies_within_three_root_n(alpha):
    n = 100_000
    x = sample_pareto(ParetoLaw(alpha), n, SeedSpec(77, int(alpha * 10))).values
    assert x.min() >= 1.0
    for point in (2.0, 10.0, 100.0):
        freq = np.mean(x <= point)
        assert abs(freq - (1 - point ** -alpha)) <= 3 / math.sqrt(n)


@settings(max_examples=25)
@given(st.integers(0, 2**64 - 1), st.integers(0, 10**6))
def test_draws_never_below_one(seed, trial):
    x = sample_pareto(ParetoLaw(2.0), 20, SeedSpec(seed, trial)).values
    assert np.all(x >= 1.0)
