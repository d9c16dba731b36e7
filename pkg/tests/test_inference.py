import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailix import (AdmissibilityWarning, Branch, DomainError, Hypothesis, ParetoLaw, SeedSpec,
                    SolverConfig, TruncationSchedule, baseline_test_stat, boundary_test_stat, decide,
                    estimate, sample_pareto, truncated_test_stat)
from tailix.inference import asymptotic_variance

N = 10000

# the boundary levels used below sit above the growth limit on purpose
pytestmark = pytest.mark.filterwarnings("ignore::tailix.AdmissibilityWarning")


def test_zero_deviation_gives_zero_statistic():
    b = N ** 1.7
    assert truncated_test_stat(0.5, Hypothesis(0.5), N, b) == 0.0
    assert boundary_test_stat(1.0, 1, N, N ** 0.9) == 0.0
    for est in ("hill", "qq", "moment", "thill", "tlghill"):
        assert baseline_test_stat(est, 0.7, Hypothesis(0.7), 100) == 0.0


def test_statistic_inverts_to_critical_value():
    a0, b = 0.5, N ** 1.7
    shift = (1 - a0) * b ** (a0 / 2) * 1.96 / (math.sqrt(N) * math.sqrt(a0 * (2 - a0)) * math.log(b))
    assert truncated_test_stat(a0 + shift, Hypothesis(a0), N, b) == pytest.approx(1.96, rel=1e-12)


def test_upper_statistic_inverts_to_critical_value():
    a0, b = 1.5, N ** 0.61
    shift = (2 - a0) * b ** (a0 / 2) * 1.96 / (math.sqrt(N) * math.sqrt(a0 * (4 - a0)) * math.log(b))
    assert truncated_test_stat(a0 - shift, Hypothesis(a0), N, b) == pytest.approx(1.96, rel=1e-12)


@given(st.floats(0.05, 1.95).filter(lambda a: abs(a - 1) > 1e-3), st.floats(0.0, 0.3))
def test_truncated_statistic_symmetric(a0, d):
    b = N ** 0.6
    h = Hypothesis(a0)
    assert truncated_test_stat(a0 + d, h, N, b) == pytest.approx(truncated_test_stat(a0 - d, h, N, b), rel=1e-9, abs=1e-12)


def test_boundary_routing():
    b = N ** 0.9
    assert truncated_test_stat(1.1, Hypothesis(1.0), N, b) == boundary_test_stat(1.1, 1, N, b)
    b2 = N ** 0.45
    assert truncated_test_stat(1.9, Hypothesis(2.0), N, b2) == boundary_test_stat(1.9, 2, N, b2)


def test_boundary_statistic_formulas():
    b = N ** 0.9
    assert boundary_test_stat(1.2, 1, N, b) == pytest.approx(math.sqrt(N) * 0.2 * math.log(b) / math.sqrt(b))
    b2 = N ** 0.45
    assert boundary_test_stat(1.7, 2, N, b2) == pytest.approx(math.sqrt(N) * 0.3 * math.log(b2) / b2)


def test_boundary_warns_when_level_grows_too_fast():
    with pytest.warns(AdmissibilityWarning):
        boundary_test_stat(1.0, 1, N, float(N))
    with pytest.warns(AdmissibilityWarning):
        boundary_test_stat(2.0, 2, N, N ** 0.5)


def test_boundary_target_checked():
    with pytest.raises(DomainError):
        boundary_test_stat(1.0, 3, N, 10.0)


def test_baseline_scales():
    a0, m, ah = 0.5, 100, 0.6
    d = abs(1 / ah - 1 / a0)
    h = Hypothesis(a0)
    assert baseline_test_stat("hill", ah, h, m) == pytest.approx(a0 * 10 * d)
    assert baseline_test_stat("qq", ah, h, m) == pytest.approx(a0 * math.sqrt(50) * d)
    assert baseline_test_stat("moment", ah, h, m) == pytest.approx(a0 * 10 / math.sqrt(1.25) * d)
    assert baseline_test_stat("thill", ah, h, m) == pytest.approx(a0 * math.sqrt(1.25) * 10 / 1.5 * d)
    assert baseline_test_stat("tlghill", ah, h, m) == pytest.approx(a0 * 10 / (2 * math.sqrt(2)) * d)


@pytest.mark.parametrize("ah", [0.0, -1.0, math.inf, math.nan])
def test_baseline_rejects_bad_estimate(ah):
    with pytest.raises(DomainError):
        baseline_test_stat("hill", ah, Hypothesis(0.5), 100)


def test_baseline_rejects_unknown_estimator_and_small_m():
    with pytest.raises(DomainError):
        baseline_test_stat("ipo", 0.5, Hypothesis(0.5), 100)
    with pytest.raises(DomainError):
        baseline_test_stat("hill", 0.5, Hypothesis(0.5), 0)


def test_decide_examples():
    h = Hypothesis(0.5)
    assert not decide(0.0, h).reject
    assert not decide(1.96, h).reject  # strict inequality
    d = decide(2.0, h, "hill")
    assert d.reject and d.threshold == 1.96 and d.estimator_id == "hill"


def test_decide_rejects_negative_statistic():
    with pytest.raises(DomainError):
        decide(-0.1, Hypothesis(0.5))


@given(st.floats(0, 10), st.floats(0, 10))
def test_decide_monotone(s1, s2):
    lo, hi = sorted((s1, s2))
    h = Hypothesis(0.5)
    if decide(lo, h).reject:
        assert decide(hi, h).reject


@pytest.mark.parametrize("a0", [0.0, -0.5, 2.5])
def test_hypothesis_domain(a0):
    with pytest.raises(DomainError):
        Hypothesis(a0)


def test_variance_positive_on_grid():
    for a in np.linspace(0.01, 0.99, 99).tolist() + np.linspace(1.01, 1.99, 99).tolist():
        v = asymptotic_variance(a)
        assert math.isfinite(v) and v > 0


@pytest.mark.parametrize("a", [0.0, 1.0, 2.0])
def test_variance_undefined_at_endpoints(a):
    with pytest.raises(DomainError):
        asymptotic_variance(a)


# -- simulated rejection rates ------------------------------------------------

def _rejection_rate(alpha, q, branch, reps=1000, seed=61):
    h = Hypothesis(alpha)
    hits = 0
    for t in range(reps):
        s = sample_pareto(ParetoLaw(alpha), N, SeedSpec(seed, t))
        out = estimate(s, TruncationSchedule(q), SolverConfig(), branch)
        hits += decide(truncated_test_stat(out.alpha_hat, h, out.n, out.b_n), h).reject
    return hits / reps


@pytest.mark.parametrize("alpha,q", [(0.3, 2.0), (0.5, 1.7), (0.7, 1.3)])
def test_truncated_type1_error_band(alpha, q):
    # Known to fail: the finite-sample spread is wider than the limit law at these
    # settings, so the test over-rejects.
    assert 0.02 <= _rejection_rate(alpha, q, Branch.LOWER) <= 0.10


def test_boundary_one_rejection_rate():
    assert 0.02 <= _rejection_rate(1.0, 0.9, Branch.BOUNDARY_ONE) <= 0.09


def test_boundary_two_rejection_rate():
    assert 0.02 <= _rejection_rate(2.0, 0.45, Branch.BOUNDARY_TWO) <= 0.09


def test_clt_scaling_at_half():
    # Known to fail for the same reason as the Type I band above.
    a, b = 0.5, N ** 1.7
    scale = math.sqrt(a * (2 - a)) / (1 - a)
    zs = []
    for t in range(1000):
        s = sample_pareto(ParetoLaw(a), N, SeedSpec(71, t))
        out = estimate(s, TruncationSchedule(1.7), SolverConfig(), Branch.LOWER)
        zs.append(math.sqrt(N) * (out.alpha_hat - a) * math.log(b) / b ** (a / 2) * scale)
    zs = np.asarray(zs)
    assert -0.15 <= zs.mean() <= 0.15
    assert 0.85 <= zs.std(ddof=1) <= 1.15
