"""M-estimation by empirical score minimisation, sampling and small experiments.

Random numbers come from numpy's ``Philox`` counter-based generator seeded
through ``SeedSequence``; samples are drawn by inversion.  Every output is a
pure function of its inputs and the integer seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
import io
import json
import math
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .dist import (
    Distribution,
    FiniteDiscrete,
    Functional,
    Gaussian,
    Mixture,
    Uniform,
    evaluate_functional,
    to_literal,
)
from .errors import DomainError, Diverged
from .scores import Score, expected_score

RNG_NAME = "numpy.random.Philox (SeedSequence entropy [seed, ..., n])"
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Sample:
    observations: np.ndarray = field(compare=False)
    seed: object
    source: str

    def __len__(self):
        return int(self.observations.size)


def _rng(seed, n):
    key = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key] + [int(n)])))


def _uniforms(rng, n):
    u = rng.random(n)
    # rng.random can return exactly 0; nudge it into the open interval
    return np.where(u == 0.0, 2.0**-54, u)


def _draw(F, n, rng):
    if isinstance(F, FiniteDiscrete):
        cum = np.cumsum(F.weights)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, _uniforms(rng, n), side="left")
        return F.values[np.minimum(idx, cum.size - 1)]
    if isinstance(F, Gaussian):
        return F.mu + F.sigma * ndtri(_uniforms(rng, n))
    if isinstance(F, Uniform):
        return F.a + (F.b - F.a) * _uniforms(rng, n)
    if isinstance(F, Mixture):
        pick = _uniforms(rng, n) < F.lam
        left = _draw(F.left, n, rng)
        right = _draw(F.right, n, rng)
        return np.where(pick, right, left)
    raise DomainError(f"cannot sample from {F!r}")


def sample(F: Distribution, n: int, seed) -> Sample:
    """Draw ``n`` observations from ``F`` by inversion.

    ``seed`` is an integer or a tuple of integers; together with ``n`` it
    fixes the output on every platform.
    """
    if n < 1:
        raise DomainError("sample size must be at least 1")
    obs = _draw(F, int(n), _rng(seed, n))
    return Sample(np.asarray(obs, float), seed, to_literal(F))


# ---------------------------------------------------------------------------
# optimisation
# ---------------------------------------------------------------------------


def golden_section(f, a: float, b: float, tol: float = 1e-8, max_iter: int = 200) -> float:
    """Minimise a unimodal ``f`` on ``[a, b]``; exact ties move the bracket left."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _default_bounds(S: Score, y: np.ndarray):
    lo, hi = float(np.min(y)), float(np.max(y))
    span = hi - lo
    pad = 0.25 * span + 1.0
    T = S.target
    kind = T.kind if T is not None else None
    if kind == "mean_variance":
        return [(lo - pad, hi + pad), (0.0, 0.25 * span * span + pad)]
    if kind == "var_es":
        return [(lo - pad, hi + pad), (lo - pad, hi + pad)]
    if kind == "moments":
        out = []
        for j in range(1, T.k + 1):
            yj = y**j
            pj = 0.25 * float(np.ptp(yj)) + 1.0
            out.append((float(np.min(yj)) - pj, float(np.max(yj)) + pj))
        return out
    return [(lo - pad, hi + pad)] * S.dim


def _clip_box(bounds, domain):
    lower = getattr(domain, "lower", None)
    upper = getattr(domain, "upper", None)
    out = []
    for i, (a, b) in enumerate(bounds):
        if lower is not None and math.isfinite(lower[i]) and a < lower[i]:
            a = lower[i] if domain.lower_closed[i] else lower[i] + 1e-9 * max(1.0, abs(lower[i]))
        if upper is not None and math.isfinite(upper[i]) and b > upper[i]:
            b = upper[i] if domain.upper_closed[i] else upper[i] - 1e-9 * max(1.0, abs(upper[i]))
        out.append((a, b))
    return out


def fit(
    S: Score,
    domain=None,
    sample_obs=None,
    bounds: Sequence | None = None,
    n_grid: int | None = None,
    tol: float = 1e-8,
    sweeps: int = 3,
    max_expand: int = 8,
) -> np.ndarray:
    """Minimise ``x -> mean_i S(x, y_i)`` over the action domain.

    A coarse grid scan (201 points for k = 1, 61 per coordinate for k = 2)
    brackets the minimiser, which is then refined coordinate-wise by
    golden-section search to ``tol``.  Grid ties resolve to the lowest
    grid point, so set-valued pinball minimisers return their left end,
    the lower sample quantile.

    Raises
    ------
    Diverged
        The grid minimum stays on the edge of the search box after
        ``max_expand`` enlargements.
    """
    y = np.asarray(sample_obs.observations if isinstance(sample_obs, Sample) else sample_obs, float).ravel()
    if y.size == 0:
        raise DomainError("empty sample")
    dom = domain if domain is not None else S.domain
    k = S.dim
    n = n_grid or (201 if k == 1 else 61)
    box = [tuple(map(float, b)) for b in (bounds or _default_bounds(S, y))]

    def objective(X):
        X = np.asarray(X, float).reshape(k, -1)
        out = np.full(X.shape[1], np.inf)
        ok = dom.mask(X)
        if ok.any():
            vals = S.values(X[:, ok], y).mean(axis=1)
            out[ok] = np.where(np.isfinite(vals), vals, np.inf)
        return out

    for attempt in range(max_expand + 1):
        box = _clip_box(box, dom)
        axes = [np.linspace(a, b, n) for a, b in box]
        mesh = np.meshgrid(*axes, indexing="ij")
        X = np.stack([m.ravel() for m in mesh])
        vals = objective(X).reshape(mesh[0].shape)
        if not np.isfinite(vals).any():
            raise Diverged("empirical score is not finite anywhere on the search grid")
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        on_edge = [i for i, j in enumerate(idx) if j in (0, n - 1)]
        expandable = [i for i in on_edge if _can_expand(box[i], idx[i], n, dom, i)]
        if not expandable:
            break
        if attempt == max_expand:
            raise Diverged(f"empirical score keeps decreasing towards the edge of {box}")
        for i in expandable:
            a, b = box[i]
            w = b - a
            box[i] = (a - w, b) if idx[i] == 0 else (a, b + w)
    x = np.array([axes[i][j] for i, j in enumerate(idx)])
    steps = np.array([ax[1] - ax[0] for ax in axes])
    for _ in range(max(1, sweeps) if k > 1 else 1):
        x_old = x.copy()
        for m in range(k):
            def line(v, m=m):
                p = x.copy()
                p[m] = v
                return float(objective(p[:, None])[0])

            x[m] = golden_section(line, x[m] - steps[m], x[m] + steps[m], tol)
            x[m] = _snap_left(line, x[m], y, 2.0 * steps[m], tol)
        if np.max(np.abs(x - x_old)) <= tol:
            break
    return x


def _snap_left(line, x, y, window, tol):
    """Move to the lowest observation that attains the refined minimum.

    Piecewise-linear empirical scores are flat between order statistics;
    this pins the set-valued minimiser to its left end.  On smooth
    objectives only observations within a few ``tol`` can qualify.
    """
    f_star = line(x)
    tie = 8.0 * np.finfo(float).eps * max(1.0, abs(f_star))
    cand = np.unique(y[(y >= x - window) & (y <= x + tol)])
    for c in cand:
        if line(float(c)) <= f_star + tie:
            return float(c)
    return x


def _can_expand(interval, j, n, dom, i):
    lower = getattr(dom, "lower", None)
    upper = getattr(dom, "upper", None)
    a, b = interval
    if j == 0 and lower is not None and math.isfinite(lower[i]) and a <= lower[i] + 1e-9 * max(1.0, abs(lower[i])):
        return False
    if j == n - 1 and upper is not None and math.isfinite(upper[i]) and b >= upper[i] - 1e-9 * max(1.0, abs(upper[i])):
        return False
    return True


def fit_population(S: Score, F: Distribution, bounds: Sequence, n_grid: int | None = None, tol: float = 1e-8):
    """Minimise the expected score itself; the population analogue of :func:`fit`."""
    from .scores import expected_scores

    k = S.dim
    n = n_grid or (201 if k == 1 else 61)
    axes = [np.linspace(a, b, n) for a, b in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh])
    vals = expected_scores(S, X, F, outside="nan").reshape(mesh[0].shape)
    idx = np.unravel_index(int(np.nanargmin(vals)), vals.shape)
    x = np.array([axes[i][j] for i, j in enumerate(idx)])
    steps = np.array([ax[1] - ax[0] for ax in axes])

    def value(p):
        return expected_score(S, p, F) if S.domain.contains(p) else math.inf

    for _ in range(3 if k > 1 else 1):
        for m in range(k):
            def line(v, m=m):
                p = x.copy()
                p[m] = v
                return value(p)

            x[m] = golden_section(line, x[m] - steps[m], x[m] + steps[m], tol)
    return x


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    kind: str
    rows: list
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        if not self.rows:
            return ""
        cols = list(self.rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_cell(r[c]) for c in cols])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary, indent=2)


def _cell(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_cell(x) for x in v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def aggregate(rows: list) -> list:
    """Per-n mean and max error, recomputed from raw replication rows."""
    ns = sorted({r["n"] for r in rows})
    out = []
    for n in ns:
        errs = np.array([r["error"] for r in rows if r["n"] == n])
        out.append({"n": n, "mean_error": float(errs.mean()), "max_error": float(errs.max()), "reps": int(errs.size)})
    return out


def consistency_experiment(
    S: Score,
    T: Functional,
    F: Distribution,
    ns: Sequence[int],
    reps: int,
    seed: int,
    slack: float = 1.5,
    **fit_kw,
) -> ExperimentResult:
    """Fit ``S`` on fresh samples of each size and track ``|estimate - T(F)|``.

    The verdict is ``"consistent-trend"`` when each mean error is at most
    ``slack`` times the previous one.  Uniform convergence of the empirical
    score, which the consistency theorem assumes, is not checked.
    """
    if reps < 1:
        raise DomainError("reps must be at least 1")
    ns = [int(n) for n in ns]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("ns must be a non-empty increasing sequence")
    t = evaluate_functional(T, F)
    rows = []
    for n in ns:
        for r in range(reps):
            smp = sample(F, n, (seed, r))
            est = fit(S, None, smp, **fit_kw)
            rows.append({"n": n, "rep": r, "estimate": est.tolist(), "error": float(np.linalg.norm(est - t))})
    agg = aggregate(rows)
    means = [a["mean_error"] for a in agg]
    trend = all(b <= slack * a for a, b in zip(means, means[1:]))
    summary = {
        "experiment": "consistency",
        "score": S.name,
        "functional": T.label(),
        "distribution": to_literal(F),
        "target": t.tolist(),
        "ns": ns,
        "reps": reps,
        "seed": seed,
        "rng": RNG_NAME,
        "slack": slack,
        "per_n": agg,
        "verdict": "consistent-trend" if trend else "no-trend",
        "note": "uniform convergence of the empirical score is assumed, not verified",
    }
    return ExperimentResult("consistency", rows, summary)


def _rank(d, tol=1e-12):
    if abs(d) <= tol:
        return "tie"
    return "a" if d < 0 else "b"


def ranking_experiment(
    S1: Score,
    S2: Score,
    T: Functional,
    F: Distribution,
    forecast_a,
    forecast_b,
    n: int,
    reps: int,
    seed: int,
) -> ExperimentResult:
    """How often do two scores rank two fixed forecasts differently?

    Per replication the realised mean score differences ``a - b`` are
    computed under both scores; the replication counts as a disagreement
    when the signs differ.  Population rankings come from expected scores.
    """
    if reps < 1:
        raise DomainError("reps must be at least 1")
    a = np.asarray(forecast_a, float).reshape(S1.dim)
    b = np.asarray(forecast_b, float).reshape(S1.dim)
    rows = []
    for r in range(reps):
        y = sample(F, n, (seed, r)).observations
        d1 = float(np.mean(S1.evaluate(a, y) - S1.evaluate(b, y)))
        d2 = float(np.mean(S2.evaluate(a, y) - S2.evaluate(b, y)))
        rows.append({"rep": r, "diff_s1": d1, "diff_s2": d2, "disagree": int(_rank(d1) != _rank(d2))})
    p1 = expected_score(S1, a, F) - expected_score(S1, b, F)
    p2 = expected_score(S2, a, F) - expected_score(S2, b, F)
    t = evaluate_functional(T, F)
    summary = {
        "experiment": "ranking",
        "scores": [S1.name, S2.name],
        "functional": T.label(),
        "distribution": to_literal(F),
        "target": t.tolist(),
        "forecast_a": a.tolist(),
        "forecast_b": b.tolist(),
        "n": n,
        "reps": reps,
        "seed": seed,
        "rng": RNG_NAME,
        "disagreement_fraction": float(np.mean([r["disagree"] for r in rows])),
        "population": {
            "s1": {"expected_diff": p1, "prefers": _rank(p1)},
            "s2": {"expected_diff": p2, "prefers": _rank(p2)},
        },
        "population_rankings_differ": _rank(p1) != _rank(p2),
    }
    return ExperimentResult("ranking", rows, summary)
