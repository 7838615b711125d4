"""Acceptance suite: one test per criterion, each with its stated tolerance and runtime bound.

``conftest.py`` prints an ``ACCEPTANCE`` pass/fail line per criterion at the
end of the session.
"""

import json
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from elicit import convex, props, scores
from elicit.cli import EXIT_VIOLATED, main
from elicit.dist import Functional, Gaussian, Uniform, discrete, evaluate_functional, obs_power
from elicit.literals import parse_distribution, parse_score
from elicit.mest import consistency_experiment, fit
from elicit.props import HOLDS, VIOLATED, CheckConfig, MixedHomogeneity, Homogeneity, Translation

FIXTURES = Path(__file__).parent / "fixtures"


@contextmanager
def within(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f} s, bound is {seconds} s"


# Test laws: two finite discrete laws, a Gaussian and a uniform, chosen per
# functional so that the target exists, is unique and lies in the action domain.
GENERIC = [
    discrete([(-1, 0.2), (0, 0.5), (2, 0.3)]),
    discrete([(-3, 0.15), (-1, 0.45), (1, 0.4)]),
    Gaussian(0, 1),
    Uniform(-1, 3),
]
SYMMETRIC = [
    discrete([(-1, 0.25), (0, 0.5), (1, 0.25)]),
    discrete([(0, 0.3), (2, 0.4), (4, 0.3)]),
    Gaussian(0.5, 1),
    Uniform(-1, 3),
]
POSITIVE = [
    discrete([(1, 0.3), (2, 0.5), (4, 0.2)]),
    discrete([(0.5, 0.5), (3, 0.5)]),
    Gaussian(3, 0.5),
    Uniform(1, 3),
]

CATALOG = [
    ("pinball:alpha=0.1", "quantile:alpha=0.1", GENERIC),
    ("pinball:alpha=0.5", "quantile:alpha=0.5", GENERIC),
    ("pinball:alpha=0.9", "quantile:alpha=0.9", GENERIC),
    ("asym_squared:tau=0.2", "expectile:tau=0.2", GENERIC),
    ("asym_squared:tau=0.8", "expectile:tau=0.8", GENERIC),
    ("mean_sq", "mean", GENERIC),
    ("exp_bregman", "mean", GENERIC),
    ("bregman_ratio_quadratic:p=y^2,q=y", "ratio:p=y^2,q=y", POSITIVE),
    ("bregman_ratio_multi:p=y;y^2,q=1", "ratio:p=y;y^2,q=1", GENERIC),
    ("abs", "center", SYMMETRIC),
    ("huber:k=1", "center", SYMMETRIC),
    ("mv", "mean_variance", GENERIC),
    ("mv:phi=mv_inverse", "mean_variance", GENERIC),
    ("mv_hom", "mean_variance", GENERIC),
    ("var_es:alpha=0.1", "var_es:alpha=0.1", GENERIC),
    ("var_es:alpha=0.1,phi=phi_b(0.5),g=identity", "var_es:alpha=0.1", GENERIC),
    ("var_es_c:alpha=0.1,c=10", "var_es:alpha=0.1", GENERIC),
]


def test_criterion_01_consistency_suite():
    from elicit.literals import parse_functional

    cfg = CheckConfig(n_grid=201)
    failures = []
    with within(10.0):
        for s_lit, t_lit, laws in CATALOG:
            S, T = parse_score(s_lit), parse_functional(t_lit)
            assert len(laws) >= 4
            rep = props.check_consistency(S, T, laws, cfg)
            for d in rep.details:
                t = np.asarray(d["t"])
                step = np.asarray(d["grid_step"])
                if not np.all(np.abs(np.asarray(d["argmin"]) - t) <= step * (1 + 1e-9)):
                    failures.append((s_lit, d["F"], d["argmin"], t.tolist()))
            if rep.verdict != HOLDS:
                failures.append((s_lit, rep.verdict, rep.worst_margin()))
    assert not failures, failures


def test_criterion_02_expectile_oracle():
    with within(1.0):
        F = discrete([(0, 0.5), (1, 0.5)])
        assert abs(evaluate_functional(Functional.expectile(0.8), F)[0] - 0.8) <= 1e-10
        assert abs(fit(scores.asym_squared(0.8), None, [0.0, 1.0])[0] - 0.8) <= 1e-6


def test_criterion_03_var_es_oracle():
    with within(5.0):
        F = discrete([(-10, 0.05), (0, 0.9), (10, 0.05)])
        v, e = evaluate_functional(Functional.var_es(0.1), F)
        assert (v, e) == (0.0, -5.0)
        rep = props.check_consistency(scores.var_es(0.1), Functional.var_es(0.1), [F], CheckConfig(n_grid=201))
        d = rep.details[0]
        assert np.all(np.abs(np.asarray(d["argmin"]) - [0.0, -5.0]) <= np.asarray(d["grid_step"]))
        assert rep.verdict == HOLDS


def test_criterion_04_metrical_symmetry():
    laws = GENERIC + SYMMETRIC + POSITIVE
    with within(2.0):
        S, T = scores.mean_score(), Functional.mean()
        for F in laws:
            for d in (0.1, 0.5, 1.0, 2.0):
                assert abs(props.symmetry_gap(S, T, F, d)) <= 1e-10
        rep = props.check_order_sensitivity(
            scores.pinball(0.1), Functional.quantile(0.1), "metrical", [Gaussian(0, 1)], CheckConfig(n_grid=61)
        )
        assert rep.verdict == VIOLATED
        assert rep.worst_margin() > 1e-6


def test_criterion_05_expectile_metrical_falsification():
    w = json.loads((FIXTURES / "expectile_witness.json").read_text())
    with within(2.0):
        S = parse_score(w["score"])
        T = Functional.expectile(0.8)
        laws = [parse_distribution(s) for s in w["distributions"]]
        targets = [evaluate_functional(T, F)[0] for F in laws]
        assert targets == pytest.approx(w["targets"], abs=1e-9)
        gap = props.symmetry_gap(S, T, parse_distribution(w["witness"]["distribution"]), w["witness"]["d"])
        assert gap == pytest.approx(w["witness"]["gap"], rel=1e-9)
        assert abs(gap) > 1e-6
        rep = props.check_order_sensitivity(S, T, "metrical", laws, CheckConfig(radii=tuple(w["radii"])))
        assert rep.verdict == VIOLATED
        assert rep.worst_margin() > 1e-6


def _a_prime_grid(n=41):
    m1 = np.linspace(-2.0, 2.0, n)
    v = np.linspace(0.05, 4.0, n)
    M1, V = np.meshgrid(m1, v)
    return np.column_stack([M1.ravel(), (V + M1**2).ravel()])


def test_criterion_06_mean_variance_conditions():
    with within(10.0):
        spec = convex.mv_inverse()
        grid = _a_prime_grid()
        assert grid.shape == (41 * 41, 2)
        eq = props.check_convex_conditions(spec, "mv_eq", grid, tol=1e-9)
        ineq = props.check_convex_conditions(spec, "mv_ineq", grid, tol=1e-9)
        assert eq.verdict == HOLDS and eq.details[0]["max_relative_gap"] <= 1e-9
        assert ineq.verdict == HOLDS and ineq.details[0]["max_abs_relative_slack"] <= 1e-9
        cfg = CheckConfig()
        assert cfg.direction_set(2).shape[0] == 20
        rep = props.check_order_sensitivity(scores.mv_homogeneous(), Functional.mean_variance(), "line_segments", GENERIC, cfg)
        assert rep.verdict == HOLDS


def test_criterion_07_homogeneity():
    rng = np.random.default_rng(20261016)
    with within(1.0):
        pts = np.column_stack([rng.normal(0, 2, 10), rng.uniform(0.1, 5, 10)])
        ys = rng.normal(0, 2, 10)
        rep = props.check_equivariance(
            scores.mv_homogeneous(), MixedHomogeneity(-2.0, (1.0, 2.0)), pts, ys, [0.5, 2.0, 10.0], tol=1e-12
        )
        assert rep.details[0]["compared"] == 300
        assert rep.verdict == HOLDS
        pts1 = rng.normal(0, 2, (10, 1))
        rep = props.check_equivariance(scores.pinball(0.1), Homogeneity(1.0), pts1, ys, [0.5, 2.0, 10.0], tol=1e-12)
        assert rep.details[0]["compared"] == 300
        assert rep.verdict == HOLDS


def test_criterion_08_translation_invariance_and_es_condition():
    rng = np.random.default_rng(7)
    c = 2.0
    S = scores.var_es_translation(c, 0.1)
    shift = Translation(((1.0,),), ((1.0,), (1.0,)))
    with within(2.0):
        hand = props.check_equivariance(scores.var_es_translation(1.0, 0.5), shift, [[0.0, 0.0]], [-1.0], [1.0], tol=1e-12, pointwise=True)
        w = hand.details[0]["worst_probe"]
        assert hand.verdict == HOLDS and w["rhs"] == pytest.approx(1.0, abs=1e-12)
        x2 = rng.uniform(-3, 3, 4)
        pts = np.column_stack([x2 + rng.uniform(0, c, 4) * 0.999, x2])
        rep = props.check_equivariance(S, shift, pts, rng.normal(0, 2, 5), rng.normal(0, 3, 5), tol=1e-12, pointwise=True)
        assert rep.details[0]["compared"] + 1 >= 100
        assert rep.verdict == HOLDS
        xs = -np.logspace(-3, 3, 40)
        pairs = [(x, z) for x in xs for z in xs]
        for b in (0.25, 0.5, 1.0):
            r = props.check_convex_conditions(convex.phi_b(b), "es_sufficient", pairs, tol=1e-12)
            assert r.verdict == HOLDS
            assert r.details[0]["min_margin"] >= -1e-12


def test_criterion_09_path_integral_reconstruction():
    rng = np.random.default_rng(9)
    triples = rng.uniform(-3, 3, (50, 3))
    one = lambda x: 1.0  # noqa: E731
    with within(2.0):
        for T, S in ((Functional.mean(), scores.mean_score()), (Functional.quantile(0.3), scores.pinball(0.3))):
            V = scores.canonical_identification(T)
            for x, z, y in triples:
                got = scores.score_difference_via_path(one, V, [x], [z], y)
                want = S(x, y) - S(z, y)
                assert abs(got - want) <= 1e-9, (T.label(), x, z, y, got, want)


def test_criterion_10_m_estimation_trend():
    with within(30.0):
        for S, T in ((scores.mean_score(), Functional.mean()), (scores.pinball(0.5), Functional.quantile(0.5))):
            res = consistency_experiment(S, T, Gaussian(0, 1), (100, 1000, 10000), 20, 20261016)
            means = [a["mean_error"] for a in res.summary["per_n"]]
            assert means[0] > means[1] > means[2], means


def test_criterion_11_separability():
    probe = json.loads((FIXTURES / "separability_probe.json").read_text())
    with within(1.0):
        S = scores.bregman_ratio_multi([obs_power(1), obs_power(2)])
        rep = props.check_separability(S, S.target, [Gaussian(0, 1), Uniform(-1, 3)])
        assert rep.verdict == HOLDS
        assert rep.details[0]["max_abs_mixed_difference"] < 1e-10
        G = scores.bregman_general([obs_power(1), obs_power(2)], obs_power(0), convex.exp_coupled())
        bad = props.check_separability(G, G.target, probes=[(probe["x"], probe["y"])], h=probe["h"])
        assert bad.verdict == VIOLATED
        assert bad.worst_margin() > 1e-3


def test_criterion_12_cli_end_to_end(tmp_path):
    expected = (FIXTURES / "compare_3row_pinball025.expected").read_bytes()
    with within(1.0):
        code = main(["compare", "--data", str(FIXTURES / "compare_3row.csv"), "--score", "pinball:alpha=0.25", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "compare.csv").read_bytes() == expected
        assert main(["properties", "--config", str(FIXTURES / "pinball_metrical.ini"), "--out", str(tmp_path)]) == EXIT_VIOLATED
    proc = subprocess.run(
        [sys.executable, "-m", "elicit.cli", "compare", "--data", str(FIXTURES / "compare_3row.csv"), "--score", "pinball:alpha=0.25"],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == expected
