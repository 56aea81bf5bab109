import math

import numpy as np
import pytest

from nnmix.closed_form import GaussianScenarioParams as P
from nnmix.closed_form import theorem1_success, theorem2_p_star_star, theorem2_success
from nnmix.distributions import Gaussian, Scenario, Source, Uniform
from nnmix.experiments import (
    CHUNK_SIZE,
    Estimate,
    Method,
    TiePolicy,
    mc_conditional_success,
    mc_success_probability,
    rule_agreement_matrix,
    w_expectations,
)
from nnmix.experiments.montecarlo import _proportion

SAME = Scenario(Gaussian(0, 1), Gaussian(0, 1))


def within(est: Estimate, target: float, k: float = 3.0) -> bool:
    return abs(est.value - target) < k * est.std_error


def test_identical_components_coin_flip():
    e = mc_success_probability(SAME, "nearest_neighbor", 1_000_000, seed=1)
    assert within(e, 0.5)
    assert e.method is Method.MONTE_CARLO and e.n_samples == 1_000_000


def test_theorem1_monte_carlo():
    e = mc_success_probability(Scenario(Gaussian(0, 1), Gaussian(1, 1)), "nearest_neighbor", 10_000_000, seed=2)
    assert within(e, theorem1_success(1.0, 1.0))
    assert e.std_error == pytest.approx(math.sqrt(e.value * (1 - e.value) / e.n_samples))


def test_asymmetry_conditional():
    s = Scenario(Gaussian(0, 1), Gaussian(0.1, 0.5))
    e = mc_conditional_success(s, "nearest_neighbor", Source.FROM_X, 10_000_000, seed=3)
    assert abs(e.value - 0.445) < 0.005


def test_p_star_star_monte_carlo():
    p = P(1.0, 1.0, 2.0)
    e = mc_conditional_success(p.to_scenario(), "nearest_neighbor", Source.FROM_Z, 10_000_000, seed=4)
    assert within(e, theorem2_p_star_star(p))


def test_equal_variance_conditionals_agree():
    s = Scenario(Gaussian(0, 1), Gaussian(0.7, 1))
    a = mc_conditional_success(s, "nearest_neighbor", Source.FROM_X, 1_000_000, seed=5)
    b = mc_conditional_success(s, "nearest_neighbor", Source.FROM_Z, 1_000_000, seed=6)
    assert abs(a.value - b.value) < 3 * math.hypot(a.std_error, b.std_error)


def test_total_probability():
    s = Scenario(Gaussian(0, 1), Gaussian(0.5, 3))
    a = mc_conditional_success(s, "nearest_neighbor", Source.FROM_X, 2_000_000, seed=7)
    b = mc_conditional_success(s, "nearest_neighbor", Source.FROM_Z, 2_000_000, seed=8)
    u = mc_success_probability(s, "nearest_neighbor", 2_000_000, seed=9)
    avg = 0.5 * (a.value + b.value)
    assert abs(avg - u.value) < 3 * math.sqrt(0.25 * a.std_error**2 + 0.25 * b.std_error**2 + u.std_error**2)


def test_bayes_rule_monte_carlo():
    s = Scenario(Gaussian(0, 1), Gaussian(1, 1))
    e = mc_success_probability(s, "bayes", 10_000_000, seed=10)
    assert within(e, 0.69146246127401310364)
    s4 = Scenario(Gaussian(0, 1), Gaussian(4, 1))
    e4 = mc_success_probability(s4, "bayes", 10_000_000, seed=11)
    assert within(e4, 0.97724986805182079280)


@pytest.mark.parametrize("n", [1, 1000, CHUNK_SIZE, 3 * CHUNK_SIZE + 17])
def test_deterministic_across_threads(n):
    s = Scenario(Gaussian(0, 1), Uniform(-1, 2))
    runs = [mc_success_probability(s, "nearest_neighbor", n, seed=12, threads=t) for t in (1, 2, 5)]
    assert runs[0] == runs[1] == runs[2]
    c = [mc_conditional_success(s, "cusum", Source.FROM_Z, n, seed=12, threads=t) for t in (1, 3)]
    assert c[0] == c[1]
    w = [w_expectations(s, n, seed=12, threads=t) for t in (1, 4)]
    assert w[0] == w[1]


def test_seed_changes_result():
    s = Scenario(Gaussian(0, 1), Gaussian(1, 1))
    a = mc_success_probability(s, "nearest_neighbor", 100_000, seed=1)
    b = mc_success_probability(s, "nearest_neighbor", 100_000, seed=2)
    assert a.value != b.value


def test_n_must_be_positive():
    with pytest.raises(ValueError):
        mc_success_probability(SAME, "nearest_neighbor", 0, seed=1)


def test_tie_policies():
    half = _proportion(60, 10, 100, TiePolicy.HALF_CREDIT)
    assert half.value == pytest.approx(0.65) and half.tie_count == 10
    excl = _proportion(60, 10, 100, TiePolicy.EXCLUDE)
    assert excl.value == pytest.approx(60 / 90)
    assert excl.std_error == pytest.approx(math.sqrt(excl.value * (1 - excl.value) / 90))
    with pytest.raises(ValueError):
        _proportion(0, 5, 5, TiePolicy.EXCLUDE)
    # no ties in continuous scenarios, so the two policies coincide
    s = Scenario(Gaussian(0, 1), Gaussian(1, 1))
    a = mc_success_probability(s, "nearest_neighbor", 50_000, 3, TiePolicy.HALF_CREDIT)
    b = mc_success_probability(s, "nearest_neighbor", 50_000, 3, TiePolicy.EXCLUDE)
    assert a.value == b.value and a.tie_count == 0


def test_estimate_round_trip():
    e = mc_success_probability(SAME, "nearest_neighbor", 1000, seed=4)
    assert Estimate.from_dict(e.to_dict()) == e


def test_w_expectations_sum_to_two():
    for s in [SAME, Scenario(Gaussian(0, 1), Gaussian(1, 2)), Scenario(Uniform(0, 1), Gaussian(2, 0.3))]:
        w1, w2 = w_expectations(s, 1_000_000, seed=13)
        assert abs(w1.value + w2.value - 2.0) < 3 * math.hypot(w1.std_error, w2.std_error)
    w1, w2 = w_expectations(SAME, 1_000_000, seed=14)
    assert within(w1, 1.0) and within(w2, 1.0)


def test_w1_matches_twice_theorem2():
    p = P(1.0, 1.0, 2.0)
    w1, w2 = w_expectations(p.to_scenario(), 2_000_000, seed=15)
    assert w1.value > w2.value
    assert within(w1, 2 * theorem2_success(p))


def test_agreement_matrix_equivalent_rules():
    s = Scenario(Gaussian(-0.5, 2), Gaussian(1, 0.3))
    rules = ["nearest_neighbor", "cusum", "max_likelihood", "kernel_linear"]
    m = rule_agreement_matrix(s, rules, 100_000, seed=16)
    assert np.all(m.rates == 1.0)
    assert m.exemplars == []


def test_agreement_matrix_polynomial_disagrees():
    s = Scenario(Gaussian(1, 0.05), Gaussian(2.9, 0.05))
    m = rule_agreement_matrix(s, ["nearest_neighbor", "kernel_poly:2"], 100_000, seed=17)
    assert m.rate("nearest_neighbor", "kernel_poly:2") < 1.0
    assert m.rate("kernel_poly:2", "kernel_poly:2") == 1.0
    assert m.exemplars and m.exemplars[0]["verdicts"]["nearest_neighbor"] != m.exemplars[0]["verdicts"]["kernel_poly:2"]


def test_agreement_matrix_validation():
    with pytest.raises(ValueError):
        rule_agreement_matrix(SAME, ["nearest_neighbor"], 10, seed=1)
    with pytest.raises(ValueError):
        rule_agreement_matrix(SAME, ["nearest_neighbor", "oracle"], 10, seed=1)
