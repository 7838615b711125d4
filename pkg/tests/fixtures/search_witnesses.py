"""Coarse searches that produced the frozen witness fixtures.

Run from the repository root to regenerate::

    python3 tests/fixtures/search_witnesses.py

The tests only read the JSON files; this script documents where they came from.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np

from elicit import dist, scores
from elicit.dist import Functional, Gaussian, evaluate_functional, to_literal
from elicit.props import symmetry_gap

HERE = Path(__file__).resolve().parent


def expectile_witness(tau=0.8):
    """Two Gaussians sharing the tau-expectile; pick the radius with the largest asymmetry."""
    T = Functional.expectile(tau)
    S = scores.asym_squared(tau)
    e = dist.expectile(Gaussian(0.0, 1.0), tau)
    # the expectile is location-scale equivariant: e(mu + s Z) = mu + s e(Z)
    # so N(e - 2 e, 2) has expectile e as well, with half the density there
    laws = [Gaussian(0.0, 1.0), Gaussian(-e, 2.0)]
    t = [float(evaluate_functional(T, F)[0]) for F in laws]
    best = None
    for F, d in itertools.product(laws, np.round(np.arange(0.1, 3.01, 0.1), 10)):
        gap = symmetry_gap(S, T, F, float(d))
        if best is None or abs(gap) > abs(best[2]):
            best = (F, float(d), gap)
    F, d, gap = best
    gaps = {to_literal(G): {f"{r:g}": symmetry_gap(S, T, G, r) for r in (0.5, 1.0, d)} for G in laws}
    return {
        "score": S.name,
        "functional": T.label(),
        "distributions": [to_literal(G) for G in laws],
        "targets": t,
        "witness": {"distribution": to_literal(F), "d": d, "gap": gap},
        "radii": [0.5, 1.0, d],
        "gaps": gaps,
    }


def ranking_witness():
    """Skewed two-point law where the mean score and the exp-Bregman score rank two forecasts differently.

    Forecasts symmetric about the mean always tie under the mean score, so
    the search shifts them asymmetrically and keeps the pair whose weaker
    preference is strongest.
    """
    S1, S2 = scores.mean_score(), scores.exp_bregman()
    best = None
    for v, p in itertools.product((2.0, 3.0, 5.0, 8.0), (0.1, 0.2, 0.3)):
        F = dist.discrete([(0.0, 1.0 - p), (v, p)])
        t = dist.mean(F)
        for da, db in itertools.product(np.arange(0.2, 2.01, 0.2), np.arange(0.2, 2.01, 0.2)):
            a, b = t + float(da), t - float(db)
            d1 = scores.expected_score(S1, [a], F) - scores.expected_score(S1, [b], F)
            d2 = scores.expected_score(S2, [a], F) - scores.expected_score(S2, [b], F)
            if np.sign(d1) * np.sign(d2) >= 0:
                continue
            strength = min(abs(d1), abs(d2))
            if best is None or strength > best[0]:
                best = (strength, F, round(a, 10), round(b, 10), d1, d2)
    _, F, a, b, d1, d2 = best
    return {
        "scores": [S1.name, S2.name],
        "functional": "mean",
        "distribution": to_literal(F),
        "forecast_a": a,
        "forecast_b": b,
        "expected_diff": [d1, d2],
    }


if __name__ == "__main__":
    for name, obj in (("expectile_witness.json", expectile_witness()), ("ranking_witness.json", ranking_witness())):
        (HERE / name).write_text(json.dumps(obj, indent=2) + "\n")
        print(name, json.dumps(obj["witness"] if "witness" in obj else obj, indent=None))
