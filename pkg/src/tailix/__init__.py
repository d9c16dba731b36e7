"""Tail-index estimation from truncated moments, with order-statistics baselines."""

from tailix.baselines import hill, m_stat, moment, qq, t_hill, t_lg_hill
from tailix.distributions import ParetoLaw, SeedSpec, pareto_quantile, sample_pareto
from tailix.errors import AdmissibilityWarning, DegenerateEstimateError, DomainError
from tailix.inference import (Hypothesis, TestDecision, baseline_test_stat, boundary_test_stat,
                              decide, truncated_test_stat)
from tailix.sample import OrderStatView, Sample
from tailix.truncated import (Branch, EstimatorOutcome, SolverConfig, TruncationSchedule,
                              boundary_lower, boundary_upper, convergence_bound, estimate, g1, g2,
                              initial_value, solve_lower, solve_upper, truncated_mean,
                              truncated_second_moment, truncation_level)

__version__ = "0.1.0"
