import math

import numpy as np
import pytest

from elicit import dist
from elicit.dist import (
    FiniteDiscrete,
    Functional,
    Gaussian,
    Mixture,
    Uniform,
    discrete,
    evaluate_functional,
    expectation,
    mix,
    point_mass,
)
from elicit.errors import (
    DenominatorError,
    DomainError,
    NonFiniteIntegrand,
    NonUniqueError,
    NotSymmetricError,
    PathEvaluationError,
)

THREE_POINT = discrete([(-10, 0.05), (0, 0.9), (10, 0.05)])
TWO_POINT = discrete([(0, 0.5), (1, 0.5)])

ALL_LAWS = [
    TWO_POINT,
    THREE_POINT,
    Gaussian(0.3, 1.7),
    Uniform(-1.0, 3.0),
    Mixture(0.3, Gaussian(0.0, 1.0), Uniform(2.0, 4.0)),
    mix(Gaussian(0, 1), point_mass(2.0), 0.4),
]


# -- expectation ------------------------------------------------------------


def test_expectation_identity_two_point():
    assert expectation(lambda y: y, TWO_POINT) == 0.5


def test_expectation_second_moment_normal():
    assert expectation(lambda y: y**2, Gaussian(0, 1)) == pytest.approx(1.0, abs=1e-9)


def test_expectation_second_moment_three_point():
    assert expectation(lambda y: y**2, THREE_POINT) == pytest.approx(10.0, abs=1e-12)


@pytest.mark.parametrize("F", ALL_LAWS, ids=str)
def test_expectation_of_one_is_one(F):
    assert expectation(lambda y: np.ones_like(y), F) == pytest.approx(1.0, abs=1e-12)


def test_uniform_moments():
    F = Uniform(-1.0, 3.0)
    assert expectation(lambda y: y, F) == pytest.approx(1.0, abs=1e-12)
    assert expectation(lambda y: y**2, F) == pytest.approx(7.0 / 3.0, abs=1e-12)


def test_expectation_with_breakpoint_handles_indicator():
    F = Gaussian(0, 1)
    p = expectation(lambda y: (y <= 0.5).astype(float), F, breakpoints=(0.5,))
    assert p == pytest.approx(0.6914624612740131, abs=1e-12)


def test_expectation_rejects_non_finite_values():
    with pytest.raises(NonFiniteIntegrand), np.errstate(divide="ignore"):
        expectation(lambda y: 1.0 / y, discrete([(0, 0.5), (1, 0.5)]))


# -- construction and mixing ------------------------------------------------


def test_discrete_canonicalisation_merges_and_sorts():
    F = FiniteDiscrete(((1.0, 0.25), (0.0, 0.5), (1.0, 0.25), (5.0, 0.0)))
    assert F.points == ((0.0, 0.5), (1.0, 0.5))


@pytest.mark.parametrize(
    "make",
    [
        lambda: discrete([(0, 0.5), (1, 0.4)]),
        lambda: discrete([(0, -0.5), (1, 1.5)]),
        lambda: Gaussian(0, 0),
        lambda: Uniform(1, 1),
        lambda: Mixture(1.5, Gaussian(0, 1), Gaussian(1, 1)),
    ],
)
def test_invalid_parameters_rejected(make):
    with pytest.raises(DomainError):
        make()


def test_mix_endpoint_returns_first_law():
    F, G = Gaussian(0, 1), Uniform(0, 1)
    assert mix(F, G, 0.0) == F
    assert mix(F, G, 1.0) == G


def test_mix_point_masses():
    assert mix(point_mass(0), point_mass(1), 0.25) == discrete([(0, 0.75), (1, 0.25)])


def test_mix_mean_is_linear():
    F = mix(Gaussian(0, 1), Gaussian(2, 3), 0.5)
    assert dist.mean(F) == pytest.approx(1.0, abs=1e-12)
    assert expectation(lambda y: y, F) == pytest.approx(1.0, abs=1e-12)


def test_mix_rejects_weight_outside_unit_interval():
    with pytest.raises(DomainError):
        mix(point_mass(0), point_mass(1), 1.2)


def test_mix_commutes_with_expectation_discrete():
    F = discrete([(0, 0.2), (3, 0.8)])
    G = discrete([(1, 0.5), (3, 0.5)])
    lam = 0.3

    def f(y):
        return np.sin(y) + y**3

    lhs = expectation(f, mix(F, G, lam))
    rhs = (1 - lam) * expectation(f, F) + lam * expectation(f, G)
    assert lhs == pytest.approx(rhs, abs=1e-12)


# -- transforms -------------------------------------------------------------


def test_translate_gaussian():
    assert dist.translate(Gaussian(0, 1), 3) == Gaussian(3, 1)


def test_scale_point_mass():
    assert dist.scale(discrete([(1, 1.0)]), 2) == discrete([(2, 1.0)])


def test_scale_quadruples_variance():
    F = discrete([(-1, 0.5), (1, 0.5)])
    assert dist.variance(F) == pytest.approx(1.0)
    assert dist.variance(dist.scale(F, 2)) == pytest.approx(4.0, abs=1e-12)
    G = dist.scale(F, 2)
    m = expectation(lambda y: y, G)
    assert expectation(lambda y: (y - m) ** 2, G) == pytest.approx(4.0, abs=1e-12)


def test_scale_rejects_non_positive_factor():
    with pytest.raises(DomainError):
        dist.scale(Gaussian(0, 1), 0.0)


def test_transform_maps_mixture_components():
    F = Mixture(0.5, Gaussian(0, 1), Uniform(0, 2))
    G = dist.transform(F, "scale", 3.0)
    assert G == Mixture(0.5, Gaussian(0, 3), Uniform(0, 6))


def test_translation_equivariance_of_the_mean():
    F = discrete([(-1.5, 0.2), (0.25, 0.3), (4.0, 0.5)])
    z = 2.75
    shifted = evaluate_functional(Functional.mean(), dist.translate(F, z))[0]
    assert shifted == pytest.approx(evaluate_functional(Functional.mean(), F)[0] + z, abs=1e-12)


# -- functionals ------------------------------------------------------------


def test_expectile_two_point():
    assert evaluate_functional(Functional.expectile(0.8), TWO_POINT)[0] == pytest.approx(0.8, abs=1e-10)


def test_expectile_two_point_matches_brute_force_minimisation():
    grid = np.linspace(-1, 2, 30001)
    loss = 0.5 * (np.abs((0 <= grid) - 0.8) * grid**2 + np.abs((1 <= grid) - 0.8) * (grid - 1) ** 2)
    assert grid[np.argmin(loss)] == pytest.approx(0.8, abs=1e-4)


@pytest.mark.parametrize("F", ALL_LAWS, ids=str)
def test_half_expectile_is_the_mean(F):
    e = evaluate_functional(Functional.expectile(0.5), F)[0]
    assert e == pytest.approx(dist.mean(F), abs=1e-9)


def test_var_es_three_point():
    v, e = evaluate_functional(Functional.var_es(0.1), THREE_POINT)
    assert (v, e) == (0.0, -5.0)


def test_var_es_gaussian_closed_form():
    from scipy.stats import norm

    alpha = 0.05
    v, e = evaluate_functional(Functional.var_es(alpha), Gaussian(0, 1))
    assert v == pytest.approx(norm.ppf(alpha), abs=1e-10)
    assert e == pytest.approx(-norm.pdf(norm.ppf(alpha)) / alpha, abs=1e-8)


def test_lower_quantile_at_exact_crossing():
    F = discrete([(0, 0.25), (1, 0.5), (2, 0.25)])
    q = dist.quantile(F, 0.75)
    assert q == 1.0
    assert dist.cdf(F, q) >= 0.75
    assert dist.cdf_left(F, q) <= 0.75


def test_flat_cdf_makes_quantile_non_unique():
    with pytest.raises(NonUniqueError):
        evaluate_functional(Functional.quantile(0.5), TWO_POINT)


def test_quantile_uniform_and_gaussian():
    assert evaluate_functional(Functional.quantile(0.25), Uniform(0, 4))[0] == pytest.approx(1.0, abs=1e-12)
    assert evaluate_functional(Functional.quantile(0.5), Gaussian(1.5, 2))[0] == pytest.approx(1.5, abs=1e-12)


def test_mean_variance_and_moments():
    F = Gaussian(1.0, 2.0)
    assert evaluate_functional(Functional.mean_variance(), F) == pytest.approx([1.0, 4.0], abs=1e-10)
    assert evaluate_functional(Functional.moments(3), F) == pytest.approx([1.0, 5.0, 13.0], abs=1e-9)


def test_ratio_of_expectations():
    T = Functional.ratio([dist.obs_power(2)], dist.obs_power(1))
    F = discrete([(1, 0.5), (3, 0.5)])
    assert evaluate_functional(T, F)[0] == pytest.approx(5.0 / 2.0)


def test_ratio_with_non_positive_denominator():
    T = Functional.ratio([dist.obs_power(2)], dist.obs_power(1))
    with pytest.raises(DenominatorError):
        evaluate_functional(T, discrete([(-1, 0.5), (0.5, 0.5)]))


def test_center_of_symmetry():
    assert evaluate_functional(Functional.center(), Uniform(-1, 3))[0] == pytest.approx(1.0, abs=1e-12)
    F = Mixture(0.5, Gaussian(-2, 1), Gaussian(2, 1))
    assert evaluate_functional(Functional.center(), F)[0] == pytest.approx(dist.mean(F), abs=1e-9)


def test_center_of_asymmetric_law_rejected():
    with pytest.raises(NotSymmetricError):
        evaluate_functional(Functional.center(), discrete([(0, 0.3), (1, 0.7)]))


def test_output_dims_and_domains():
    assert Functional.var_es(0.1).output_dim == 2
    assert Functional.moments(4).output_dim == 4
    assert Functional.var_es(0.1).domain.contains([0.0, -1.0])
    assert not Functional.var_es(0.1).domain.contains([0.0, 1.0])
    assert not Functional.mean_variance().domain.contains([0.0, -1.0])


# -- mixture paths ----------------------------------------------------------


def test_mixture_path_mean_is_injective():
    path = dist.mixture_path(Functional.mean(), point_mass(0), point_mass(1), 5)
    assert path.values[:, 0] == pytest.approx([0, 0.25, 0.5, 0.75, 1.0])
    assert path.verdict == "injective"


def test_mixture_path_identical_endpoints_is_constant():
    F = Gaussian(0.5, 1)
    assert dist.mixture_path(Functional.mean(), F, F, 7).verdict == "constant"


def test_mixture_path_mean_variance():
    path = dist.mixture_path(Functional.mean_variance(), point_mass(0), point_mass(2), 3)
    assert path.values == pytest.approx(np.array([[0, 0], [1, 1], [2, 0]]), abs=1e-12)
    assert path.verdict == "injective"


def test_mixture_path_reports_offending_lambda():
    T = Functional.ratio([dist.obs_power(0)], dist.obs_power(1))
    with pytest.raises(PathEvaluationError) as info:
        dist.mixture_path(T, point_mass(1.0), point_mass(-1.0), 5)
    assert info.value.lam == pytest.approx(0.5)


# -- literals ---------------------------------------------------------------


@pytest.mark.parametrize("F", ALL_LAWS, ids=str)
def test_literal_round_trip(F):
    from elicit.literals import parse_distribution

    assert parse_distribution(dist.to_literal(F)) == F


def test_support_bounds_cover_the_mass():
    lo, hi = dist.support_bounds(Gaussian(1, 2))
    assert lo < 1 - 10 and hi > 1 + 10
    assert math.isfinite(lo) and math.isfinite(hi)
