import json

import numpy as np
import pytest

from elicit import convex, props, scores
from elicit.dist import Functional, Gaussian, Uniform, discrete, obs_power
from elicit.domain import PredicateDomain
from elicit.errors import DomainError, NonUniqueError
from elicit.props import (
    HOLDS,
    INCONCLUSIVE,
    VIOLATED,
    CheckConfig,
    Homogeneity,
    MixedHomogeneity,
    Translation,
)
from elicit.scores import canonical_identification, negate

N01 = Gaussian(0, 1)
TWO_POINT = discrete([(0, 0.5), (1, 0.5)])
FAST = CheckConfig(n_grid=61)


# -- consistency -------------------------------------------------------------


def test_pinball_median_consistency():
    rep = props.check_consistency(scores.pinball(0.5), Functional.quantile(0.5), [N01], CheckConfig(grid=((-3, 3, 201),)))
    assert rep.verdict == HOLDS
    assert abs(rep.details[0]["argmin"][0]) <= 6 / 200 + 1e-12


def test_expectile_consistency_two_point():
    rep = props.check_consistency(scores.asym_squared(0.8), Functional.expectile(0.8), [TWO_POINT])
    assert rep.verdict == HOLDS
    d = rep.details[0]
    assert abs(d["argmin"][0] - 0.8) <= d["grid_step"][0]


def test_stripe_score_flags_region_outside_the_stripe():
    S = scores.var_es_translation(1.0, 0.5)
    outside = PredicateDomain(2, lambda X, strict: X[0] - X[1] >= 1.0, "x1 >= x2 + 1")
    rep = props.check_consistency(S, Functional.var_es(0.5), [N01], FAST, probe_domain=outside)
    assert rep.verdict == VIOLATED
    inside = props.check_consistency(S, Functional.var_es(0.5), [N01], FAST)
    assert inside.verdict == HOLDS


def test_genuine_local_minimum_away_from_center_is_reported():
    welsch = scores.phi_loss(lambda u: 1.0 - np.exp(-(u**2)), "welsch")
    F = discrete([(-2, 0.25), (0, 0.5), (2, 0.25)])
    rep = props.check_consistency(welsch, Functional.center(), [F], CheckConfig(n_grid=201))
    assert rep.verdict == VIOLATED
    kinds = {w["kind"] for w in rep.witnesses}
    assert kinds == {"local_minimum"}
    assert all(abs(abs(w["x"][0]) - 1.9) < 0.05 for w in rep.witnesses)


def test_grid_artefacts_in_curved_valleys_are_dismissed():
    S = scores.mean_variance(convex.quadratic(2))
    rep = props.check_consistency(S, Functional.mean_variance(), [Uniform(-1, 3)], CheckConfig(n_grid=201))
    assert rep.verdict == HOLDS
    assert rep.details[0]["grid_local_minima_dismissed"] > 0


def test_non_unique_functional_value_is_rejected():
    with pytest.raises(NonUniqueError):
        props.check_self_calibration(scores.pinball(0.5), Functional.quantile(0.5), [TWO_POINT], [0.5])


# -- order-sensitivity -------------------------------------------------------


def test_mean_score_is_metrically_order_sensitive():
    rep = props.check_order_sensitivity(scores.mean_score(), Functional.mean(), "metrical", [N01], FAST)
    assert rep.verdict == HOLDS


def test_pinball_is_not_metrically_order_sensitive():
    rep = props.check_order_sensitivity(scores.pinball(0.1), Functional.quantile(0.1), "metrical", [N01], FAST)
    assert rep.verdict == VIOLATED
    assert rep.worst_margin() > 1e-6
    text = " ".join(rep.notes).lower()
    assert "no score" not in text and "exist" not in text


def test_mv_homogeneous_line_segments_on_gaussian():
    rep = props.check_order_sensitivity(scores.mv_homogeneous(), Functional.mean_variance(), "line_segments", [N01])
    assert rep.verdict == HOLDS


@pytest.mark.parametrize(
    "S, F",
    [
        (scores.mean_score(), N01),
        (scores.pinball(0.3), N01),
        (scores.asym_squared(0.8), Uniform(-1, 2)),
        (scores.exp_bregman(), discrete([(-1, 0.3), (0.5, 0.3), (2, 0.4)])),
    ],
    ids=["mean", "pinball", "expectile", "exp_bregman"],
)
def test_one_dimensional_scores_are_order_sensitive_on_line_segments(S, F):
    rep = props.check_order_sensitivity(S, S.target, "line_segments", [F], FAST)
    assert rep.verdict == HOLDS


def test_metrical_implies_componentwise_on_shared_probes():
    S = scores.bregman_ratio_multi([obs_power(1), obs_power(2)])
    T = S.target
    laws = [N01, discrete([(-1, 0.3), (0.5, 0.3), (2, 0.4)])]
    met = props.check_order_sensitivity(S, T, "metrical", laws, FAST)
    comp = props.check_order_sensitivity(S, T, "componentwise", laws, FAST)
    assert met.verdict == HOLDS
    assert comp.verdict == HOLDS


def test_unknown_notion_rejected():
    with pytest.raises(DomainError):
        props.check_order_sensitivity(scores.mean_score(), Functional.mean(), "diagonal", [N01])


# -- self-calibration --------------------------------------------------------


def test_mean_score_self_calibration_curve():
    rep = props.check_self_calibration(scores.mean_score(), Functional.mean(), [N01], [0.5, 1.0], FAST)
    assert rep.verdict == HOLDS
    curve = dict((e, d) for e, d in rep.details[0]["curve"])
    assert curve[0.5] == pytest.approx(0.125, abs=1e-9)
    assert curve[1.0] == pytest.approx(0.5, abs=1e-9)


def test_self_calibration_beyond_grid_is_inconclusive():
    rep = props.check_self_calibration(scores.mean_score(), Functional.mean(), [N01], [10.0], FAST)
    assert rep.verdict == INCONCLUSIVE
    assert rep.notes


# -- orientation and identification -----------------------------------------


def test_quantile_identification_is_oriented():
    T = Functional.quantile(0.3)
    assert props.check_orientation(canonical_identification(T), T, [N01]).verdict == HOLDS


def test_negated_mean_identification_is_not_oriented():
    T = Functional.mean()
    rep = props.check_orientation(negate(canonical_identification(T)), T, [N01])
    assert rep.verdict == VIOLATED


def test_mean_variance_identification_oriented_along_first_axis():
    T = Functional.mean_variance()
    rep = props.check_orientation(
        canonical_identification(T), T, [N01], CheckConfig(directions=((1.0, 0.0),))
    )
    assert rep.verdict == HOLDS


def test_identification_requires_cdf_level_for_quantiles():
    T = Functional.quantile(0.1)
    three = discrete([(-10, 0.05), (0, 0.9), (10, 0.05)])
    rep = props.check_identification(canonical_identification(T), T, [three])
    assert rep.verdict == VIOLATED
    assert props.check_identification(canonical_identification(T), T, [N01]).verdict == HOLDS
    assert props.NEEDS_CDF_AT_LEVEL["identification"] is True


# -- equivariance ------------------------------------------------------------


def test_stripe_score_translation_invariance_hand_probe():
    S = scores.var_es_translation(1.0, 0.5)
    rep = props.check_equivariance(
        S, Translation(((1.0,),), ((1.0,), (1.0,))), [[0.0, 0.0]], [-1.0], [1.0], tol=1e-12, pointwise=True
    )
    assert rep.verdict == HOLDS
    w = rep.details[0]["worst_probe"]
    assert w["lhs"] == pytest.approx(1.0) and w["rhs"] == pytest.approx(1.0)


def test_mv_homogeneous_mixed_homogeneity():
    rng = np.random.default_rng(3)
    pts = np.column_stack([rng.normal(size=10), rng.uniform(0.2, 3, size=10)])
    rep = props.check_equivariance(
        scores.mv_homogeneous(), MixedHomogeneity(-2.0, (1.0, 2.0)), pts, [-1.0, 0.5], [0.5, 2.0, 10.0], tol=1e-12
    )
    assert rep.verdict == HOLDS


def test_pinball_degree_one_homogeneity_and_mean_score_degree_two():
    pts = [[-1.0], [0.3], [2.0]]
    rep = props.check_equivariance(scores.pinball(0.2), Homogeneity(1.0), pts, [-0.5, 1.0], [0.5, 3.0], tol=1e-12)
    assert rep.verdict == HOLDS
    bad = props.check_equivariance(scores.pinball(0.2), Homogeneity(2.0), pts, [-0.5, 1.0], [0.5, 3.0], tol=1e-12)
    assert bad.verdict == VIOLATED


def test_var_es_score_is_not_translation_invariant():
    S = scores.var_es(0.1)
    rep = props.check_equivariance(
        S, Translation(((1.0,),), ((1.0,), (1.0,))), [[-1.0, -2.0], [-0.5, -1.0]], [-1.5, 0.5], [-0.3], tol=1e-9
    )
    assert rep.verdict == VIOLATED


# -- conditions on generators -----------------------------------------------


def _mv_grid(n=41):
    m1 = np.linspace(-2, 2, n)
    u = np.linspace(0.1, 4, n)
    M1, U = np.meshgrid(m1, u)
    return np.column_stack([M1.ravel(), (U + M1**2).ravel()])


def test_inverse_generator_meets_mean_variance_conditions_with_equality():
    spec = convex.mv_inverse()
    eq = props.check_convex_conditions(spec, "mv_eq", _mv_grid())
    ineq = props.check_convex_conditions(spec, "mv_ineq", _mv_grid())
    assert eq.verdict == HOLDS and ineq.verdict == HOLDS
    assert ineq.details[0]["max_abs_relative_slack"] <= 1e-9


def test_quadratic_generator_fails_mean_variance_equality():
    rep = props.check_convex_conditions(convex.quadratic(2), "mv_eq", _mv_grid(11))
    assert rep.verdict == VIOLATED


@pytest.mark.parametrize("b", [0.25, 0.5, 1.0])
def test_es_sufficient_condition_phi_b(b):
    xs = -np.logspace(-2, 2, 30)
    pairs = [(x, z) for x in xs for z in xs]
    rep = props.check_convex_conditions(convex.phi_b(b), "es_sufficient", pairs, tol=1e-12)
    assert rep.verdict == HOLDS
    assert rep.details[0]["min_margin"] >= -1e-12


def test_es_sufficient_fails_for_exponential_generator():
    xs = np.linspace(-3, 3, 13)
    pairs = [(x, z) for x in xs for z in xs]
    assert props.check_convex_conditions(convex.exponential(), "es_sufficient", pairs).verdict == VIOLATED


def test_separable_psi_generator_is_mixed_homogeneous():
    b = 2.0
    spec = convex.separable([convex.psi_b(b), convex.psi_b(b / 2)])
    pts = np.column_stack([np.linspace(0.2, 3, 9), np.linspace(0.5, 4, 9)])
    rep = props.check_convex_conditions(spec, "mixed_hom", pts, tol=1e-12, b=b, degrees=(1.0, 2.0))
    assert rep.verdict == HOLDS


def test_absolute_loss_strictness_fails_without_mass_near_the_center():
    F = discrete([(-2, 0.5), (2, 0.5)])
    rep = props.check_convex_conditions(np.abs, "phi_symmetric", [(1.0, 0.5), (1.5, 0.0)], F=F)
    assert rep.verdict == VIOLATED
    assert all(w["mass"] == 0.0 for w in rep.witnesses)


def test_absolute_loss_strict_with_mass_at_the_center():
    F = discrete([(-2, 0.25), (0, 0.5), (2, 0.25)])
    rep = props.check_convex_conditions(np.abs, "phi_symmetric", [(1.0, 0.5), (1.5, 0.0)], F=F)
    assert rep.verdict == HOLDS


# -- separability and mixture paths -----------------------------------------


def test_ratio_multi_is_separable():
    S = scores.bregman_ratio_multi([obs_power(1), obs_power(2)])
    rep = props.check_separability(S, S.target, [N01])
    assert rep.verdict == HOLDS
    assert rep.details[0]["max_abs_mixed_difference"] < 1e-10


def test_exponential_coupled_generator_is_not_separable():
    S = scores.bregman_general([obs_power(1), obs_power(2)], obs_power(0), convex.exp_coupled())
    rep = props.check_separability(S, S.target, probes=[((0.0, 0.0), 0.5)])
    assert rep.verdict == VIOLATED
    assert rep.worst_margin() > 1e-3


def test_separability_needs_two_coordinates():
    with pytest.raises(DomainError):
        props.check_separability(scores.mean_score(), Functional.mean(), [N01])


def test_expected_score_increases_along_mixture_path():
    rep = props.check_mixture_path(scores.mean_score(), Functional.mean(), N01, Gaussian(3, 1), 11)
    assert rep.verdict == HOLDS
    vals = rep.details[0]["expected_scores"]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


# -- reports -----------------------------------------------------------------


def test_reports_are_reproducible_and_serialisable():
    def run():
        return props.check_order_sensitivity(
            scores.mv_homogeneous(), Functional.mean_variance(), "line_segments", [N01], CheckConfig(rng_seed=7)
        )

    a, b = run(), run()
    assert a.to_json() == b.to_json()
    d = json.loads(a.to_json())
    assert d["verdict"] == HOLDS and d["seed"] == 7
    assert {"property", "verdict", "tolerances", "witnesses", "config", "seed"} <= set(d)


def test_check_config_rejects_bad_input():
    with pytest.raises(DomainError):
        CheckConfig(n_grid=2)
    with pytest.raises(DomainError):
        CheckConfig(directions=((1.0, 1.0),))
    with pytest.raises(DomainError):
        CheckConfig(p=0.5)


def test_default_directions():
    dirs = CheckConfig().direction_set(2)
    assert dirs.shape == (4 + 16, 2)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
