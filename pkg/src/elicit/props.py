"""Probe-based verification and falsification of score properties.

Every verifier returns a :class:`PropertyReport`.  ``holds_on_probes`` is
the strongest positive verdict: the property held at every probe, which is
evidence and not a proof.  ``violated`` always comes with at least one
witness whose margin exceeds the relevant tolerance.  A violation shows
that *this* score fails the property; it never shows that no score with
the property exists.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
import itertools
import json
import math
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dist import Distribution, Functional, atoms, evaluate_functional, mixture_path, to_literal
from .errors import DomainError
from .scores import IdentificationFn, Score, expected_identification, expected_scores

HOLDS = "holds_on_probes"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

# Verifiers whose conclusion relies on F(T(F)) = alpha for quantile-type
# functionals.  Everything else accepts any law with a unique quantile.
NEEDS_CDF_AT_LEVEL = {
    "consistency": False,
    "order_sensitivity": False,
    "self_calibration": False,
    "orientation": False,
    "identification": True,
    "separability": False,
    "mixture_path": False,
}


@dataclass(frozen=True)
class CheckConfig:
    """Probe configuration shared by the verifiers.

    Parameters
    ----------
    grid : tuple of (lo, hi, n) or None
        Per-coordinate grid.  ``None`` centres a grid of ``n_grid`` points
        and half-width ``radius`` on ``T(F)`` (offset so that ``T(F)`` is
        not itself a grid point).
    directions : tuple of unit vectors or None
        ``None`` gives the 2k axis directions plus ``n_random`` seeded
        random unit vectors.
    """

    grid: tuple | None = None
    n_grid: int = 201
    radius: float = 3.0
    directions: tuple | None = None
    n_random: int = 16
    tol_eq: float = 1e-9
    tol_mono: float = 1e-9
    rng_seed: int = 0
    s_max: float = 2.0
    n_s: int = 41
    radii: tuple = (0.1, 0.5, 1.0, 2.0)
    p: float = 2.0
    n_chains: int = 24

    def __post_init__(self):
        if self.grid is not None:
            grid = tuple((float(lo), float(hi), int(n)) for lo, hi, n in self.grid)
            for lo, hi, n in grid:
                if n < 3 or not lo < hi:
                    raise DomainError("every grid coordinate needs lo < hi and n >= 3")
            object.__setattr__(self, "grid", grid)
        if self.n_grid < 3:
            raise DomainError("n_grid must be at least 3")
        if self.directions is not None:
            dirs = tuple(tuple(float(c) for c in v) for v in self.directions)
            for v in dirs:
                if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                    raise DomainError(f"direction {v} is not a unit vector")
            object.__setattr__(self, "directions", dirs)
        if not 1.0 <= self.p <= math.inf:
            raise DomainError(f"p-norm order must lie in [1, inf], got {self.p}")

    def direction_set(self, k: int) -> np.ndarray:
        if self.directions is not None:
            dirs = np.array(self.directions, float)
            if dirs.shape[1] != k:
                raise DomainError(f"directions have dimension {dirs.shape[1]}, expected {k}")
            return dirs
        eye = np.eye(k)
        dirs = [eye[i] * s for i in range(k) for s in (1.0, -1.0)]
        if k > 1 and self.n_random > 0:
            rng = np.random.default_rng(self.rng_seed)
            raw = rng.standard_normal((self.n_random, k))
            dirs += list(raw / np.linalg.norm(raw, axis=1, keepdims=True))
        return np.array(dirs)

    def axes(self, t: np.ndarray) -> list:
        k = t.size
        if self.grid is not None:
            if len(self.grid) != k:
                raise DomainError(f"grid has {len(self.grid)} coordinates, expected {k}")
            return [np.linspace(lo, hi, n) for lo, hi, n in self.grid]
        step = 2.0 * self.radius / (self.n_grid - 1)
        return [np.linspace(ti - self.radius + 0.37 * step, ti + self.radius + 0.37 * step, self.n_grid) for ti in t]

    def echo(self) -> dict:
        d = asdict(self)
        return _jsonable(d)


@dataclass
class PropertyReport:
    prop: str
    verdict: str
    witnesses: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seed: int | None = None
    details: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    skipped: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def violated(self) -> bool:
        return self.verdict == VIOLATED

    def worst_margin(self) -> float:
        ms = [w["margin"] for w in self.witnesses if isinstance(w.get("margin"), (int, float))]
        return max(ms) if ms else 0.0

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "property": self.prop,
                "verdict": self.verdict,
                "tolerances": self.tolerances,
                "witnesses": self.witnesses,
                "details": self.details,
                "notes": self.notes,
                "skipped": self.skipped,
                "config": self.config,
                "seed": self.seed,
            }
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Distribution):
        return to_literal(obj)
    return obj


def _verdict(witnesses, tol, any_probe=True):
    if any(w.get("margin", 0.0) > tol for w in witnesses):
        return VIOLATED
    return HOLDS if any_probe else INCONCLUSIVE


def _report(prop, witnesses, tol, cfg, any_probe=True, **kw):
    witnesses = sorted(witnesses, key=lambda w: -w.get("margin", 0.0))
    return PropertyReport(
        prop,
        _verdict(witnesses, tol, any_probe),
        witnesses,
        tolerances={"tol_eq": cfg.tol_eq, "tol_mono": cfg.tol_mono} if cfg else {"tol": tol},
        config=cfg.echo() if cfg else {},
        seed=cfg.rng_seed if cfg else None,
        **kw,
    )


def _pt(x):
    return [float(v) for v in np.ravel(x)]


# ---------------------------------------------------------------------------
# consistency
# ---------------------------------------------------------------------------


def _scan(S, axes, F, domain=None):
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh])
    S_eval = S if domain is None else replace(S, domain=domain)
    vals = expected_scores(S_eval, X, F, outside="nan")
    return X, vals.reshape(mesh[0].shape)


def _local_minima(V):
    """Indices of strict local minima of an n-d array over its 2k axis neighbours."""
    finite = np.isfinite(V)
    is_min = finite.copy()
    for ax in range(V.ndim):
        for shift in (1, -1):
            nb = np.roll(V, shift, axis=ax)
            edge = [slice(None)] * V.ndim
            edge[ax] = 0 if shift == 1 else -1
            valid = np.isfinite(nb)
            valid[tuple(edge)] = False
            gap = np.where(valid, nb - V, -np.inf)
            is_min &= gap > 0
    return np.argwhere(is_min)


def _descends_to_target(S_eval, F, x0, t, steps):
    """Does a Nelder-Mead descent from the grid local minimum ``x0`` reach ``T(F)``?

    A curved valley that is not aligned with the grid axes produces grid
    points lower than their axis neighbours although the continuous
    function keeps decreasing; such candidates descend to ``T(F)``.
    """

    def f(x):
        if not S_eval.domain.contains(x):
            return np.inf
        v = float(expected_scores(S_eval, np.asarray(x, float)[:, None], F, outside="nan")[0])
        return v if math.isfinite(v) else np.inf

    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(x0.size)[i] for i in range(x0.size)])
    res = minimize(f, x0, method="Nelder-Mead", options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 0.0, "maxiter": 4000})
    return bool(np.all(np.abs(res.x - t) <= steps))


def check_consistency(
    S: Score,
    T: Functional,
    test_dists: Sequence[Distribution],
    cfg: CheckConfig | None = None,
    probe_domain=None,
) -> PropertyReport:
    """Grid scan of ``x -> E_F S(x, Y)`` around ``T(F)``.

    For every ``F`` the global grid minimiser must sit within one grid step
    of ``T(F)``, ``E_F S(T(F), Y)`` must not exceed any grid value by more
    than ``tol_eq`` and no strict local minimum may appear further than one
    step away from ``T(F)``.  A grid local minimum from which a continuous
    Nelder-Mead descent reaches ``T(F)`` is a discretisation artefact; it
    is counted in ``grid_local_minima_dismissed`` rather than reported.

    ``probe_domain`` replaces the score's action domain for the scan, which
    lets callers probe a formula outside the region it is declared on.
    """
    cfg = cfg or CheckConfig()
    witnesses, details, notes = [], [], []
    any_probe = False
    for F in test_dists:
        t = evaluate_functional(T, F)
        axes = cfg.axes(t)
        steps = np.array([a[1] - a[0] for a in axes])
        X, vals = _scan(S, axes, F, probe_domain)
        finite = np.isfinite(vals)
        if not finite.any():
            notes.append(f"no grid point of {to_literal(F)} lies in the probed domain")
            continue
        any_probe = True
        S_eval = S if probe_domain is None else replace(S, domain=probe_domain)
        t_in = S_eval.domain.contains(t)
        S_t = float(expected_scores(S_eval, t[:, None], F)[0]) if t_in else float(
            expected_scores(replace(S, domain=_Everywhere(S.dim)), t[:, None], F)[0]
        )
        flat_i = int(np.nanargmin(np.where(finite, vals, np.inf)))
        idx = np.unravel_index(flat_i, vals.shape)
        x_min = np.array([axes[i][j] for i, j in enumerate(idx)])
        v_min = float(vals[idx])
        near = bool(np.all(np.abs(x_min - t) <= steps * (1 + 1e-9)))
        details.append(
            {
                "F": to_literal(F),
                "t": _pt(t),
                "argmin": _pt(x_min),
                "min_value": v_min,
                "value_at_t": S_t,
                "grid_step": _pt(steps),
                "argmin_within_step": near,
                "n_probes": int(finite.sum()),
            }
        )
        if S_t > v_min + cfg.tol_eq or not near:
            witnesses.append(
                {
                    "kind": "grid_minimum",
                    "F": to_literal(F),
                    "t": _pt(t),
                    "x": _pt(x_min),
                    "value_at_t": S_t,
                    "value_at_x": v_min,
                    "margin": S_t - v_min,
                }
            )
            if not near and S_t <= v_min + cfg.tol_eq:
                notes.append(f"near tie away from T(F) for {to_literal(F)}; strictness not resolved at grid scale")
        dismissed = 0
        for ind in _local_minima(vals):
            x_loc = np.array([axes[i][j] for i, j in enumerate(ind)])
            if np.all(np.abs(x_loc - t) <= steps * (1 + 1e-9)):
                continue
            if _descends_to_target(S_eval, F, x_loc, t, steps):
                dismissed += 1
                continue
            nb = []
            for ax in range(vals.ndim):
                for d in (-1, 1):
                    j = list(ind)
                    j[ax] += d
                    nb.append(vals[tuple(j)])
            witnesses.append(
                {
                    "kind": "local_minimum",
                    "F": to_literal(F),
                    "t": _pt(t),
                    "x": _pt(x_loc),
                    "value_at_x": float(vals[tuple(ind)]),
                    "margin": float(min(nb) - vals[tuple(ind)]),
                }
            )
        details[-1]["grid_local_minima_dismissed"] = dismissed
    rep = _report("consistency", witnesses, cfg.tol_eq, cfg, any_probe, details=details, notes=notes)
    rep.notes.append("local minima are reported whatever their depth; only margins above tol_eq count")
    return rep


@dataclass(frozen=True)
class _Everywhere:
    dim: int

    def mask(self, X, strict=False):
        X = np.asarray(X, float)
        return np.all(np.isfinite(X), axis=0)

    def contains(self, x, strict=False):
        return bool(np.all(np.isfinite(x)))


# ---------------------------------------------------------------------------
# order-sensitivity
# ---------------------------------------------------------------------------


def _pnorm(v, p):
    return np.linalg.norm(v, ord=p, axis=0)


def _componentwise(S, T, test_dists, cfg):
    witnesses, details = [], []
    skipped, compared = 0, 0
    rng = np.random.default_rng(cfg.rng_seed)
    for F in test_dists:
        t = evaluate_functional(T, F)
        k = t.size
        axes = cfg.axes(t)
        steps = np.array([a[1] - a[0] for a in axes])
        # random starting points drawn from the grid
        starts = np.stack([rng.choice(a, size=cfg.n_chains) for a in axes])
        for j in range(cfg.n_chains):
            z = starts[:, j]
            for m in range(k):
                n_move = int(np.floor(abs(t[m] - z[m]) / steps[m] + 1e-12))
                if n_move == 0:
                    continue
                sgn = np.sign(t[m] - z[m])
                chain = np.repeat(z[:, None], n_move + 1, axis=1)
                chain[m] = z[m] + sgn * steps[m] * np.arange(n_move + 1)
                vals = expected_scores(S, chain, F, outside="nan")
                ok = np.isfinite(vals)
                skipped += int((~ok).sum())
                for i in range(n_move):
                    if not (ok[i] and ok[i + 1]):
                        continue
                    compared += 1
                    rise = float(vals[i + 1] - vals[i])
                    if rise > cfg.tol_mono:
                        witnesses.append(
                            {
                                "kind": "componentwise",
                                "F": to_literal(F),
                                "t": _pt(t),
                                "coordinate": m,
                                "z": _pt(chain[:, i]),
                                "x": _pt(chain[:, i + 1]),
                                "value_at_z": float(vals[i]),
                                "value_at_x": float(vals[i + 1]),
                                "margin": rise,
                            }
                        )
        details.append({"F": to_literal(F), "t": _pt(t)})
    return witnesses, details, skipped, compared


def _line_segments(S, T, test_dists, cfg):
    witnesses, details = [], []
    skipped, compared = 0, 0
    s = np.linspace(0.0, cfg.s_max, cfg.n_s)
    for F in test_dists:
        t = evaluate_functional(T, F)
        dirs = cfg.direction_set(t.size)
        for v in dirs:
            P = t[:, None] + v[:, None] * s[None, :]
            vals = expected_scores(S, P, F, outside="nan")
            ok = np.isfinite(vals)
            # stop the ray at its first exit from the domain
            n_ok = int(np.argmin(ok)) if not ok.all() else ok.size
            skipped += ok.size - n_ok
            for i in range(n_ok - 1):
                compared += 1
                drop = float(vals[i] - vals[i + 1])
                if drop > cfg.tol_mono:
                    witnesses.append(
                        {
                            "kind": "line_segment",
                            "F": to_literal(F),
                            "t": _pt(t),
                            "direction": _pt(v),
                            "s": [float(s[i]), float(s[i + 1])],
                            "values": [float(vals[i]), float(vals[i + 1])],
                            "margin": drop,
                        }
                    )
        details.append({"F": to_literal(F), "t": _pt(t), "n_directions": int(len(dirs))})
    return witnesses, details, skipped, compared


def _metrical(S, T, test_dists, cfg):
    witnesses, details = [], []
    skipped, compared = 0, 0
    p = cfg.p
    for F in test_dists:
        t = evaluate_functional(T, F)
        dirs = cfg.direction_set(t.size)
        dirs = dirs / _pnorm(dirs.T, p)[:, None]
        radii = np.array(sorted(cfg.radii), float)
        table = np.full((radii.size, len(dirs)), np.nan)
        for ri, r in enumerate(radii):
            P = t[:, None] + r * dirs.T
            table[ri] = expected_scores(S, P, F, outside="nan")
        ok = np.isfinite(table)
        skipped += int((~ok).sum())
        # symmetry on spheres
        for ri, r in enumerate(radii):
            row = table[ri][ok[ri]]
            if row.size < 2:
                continue
            compared += row.size - 1
            hi, lo = int(np.nanargmax(table[ri])), int(np.nanargmin(table[ri]))
            spread = float(table[ri, hi] - table[ri, lo])
            if spread > cfg.tol_eq:
                witnesses.append(
                    {
                        "kind": "sphere_asymmetry",
                        "F": to_literal(F),
                        "t": _pt(t),
                        "radius": float(r),
                        "x": _pt(t + r * dirs[hi]),
                        "z": _pt(t + r * dirs[lo]),
                        "value_at_x": float(table[ri, hi]),
                        "value_at_z": float(table[ri, lo]),
                        "margin": spread,
                    }
                )
        # monotonicity in the radius
        for di in range(len(dirs)):
            col = table[:, di]
            for ri in range(radii.size - 1):
                if not (ok[ri, di] and ok[ri + 1, di]):
                    continue
                compared += 1
                drop = float(col[ri] - col[ri + 1])
                if drop > cfg.tol_mono:
                    witnesses.append(
                        {
                            "kind": "radius_monotonicity",
                            "F": to_literal(F),
                            "t": _pt(t),
                            "direction": _pt(dirs[di]),
                            "radii": [float(radii[ri]), float(radii[ri + 1])],
                            "values": [float(col[ri]), float(col[ri + 1])],
                            "margin": drop,
                        }
                    )
        details.append({"F": to_literal(F), "t": _pt(t), "radii": radii.tolist(), "p": p})
    return witnesses, details, skipped, compared


def check_order_sensitivity(
    S: Score,
    T: Functional,
    notion: str,
    test_dists: Sequence[Distribution],
    cfg: CheckConfig | None = None,
) -> PropertyReport:
    """Probe one of the three order-sensitivity notions.

    Parameters
    ----------
    notion : {"componentwise", "line_segments", "metrical"}
        ``metrical`` uses the p-norm ``cfg.p``: expected scores must agree
        on every probed sphere around ``T(F)`` (within ``tol_eq``) and grow
        with the radius (within ``tol_mono``).
    """
    cfg = cfg or CheckConfig()
    runners = {"componentwise": _componentwise, "line_segments": _line_segments, "metrical": _metrical}
    if notion not in runners:
        raise DomainError(f"unknown order-sensitivity notion {notion!r}")
    witnesses, details, skipped, compared = runners[notion](S, T, test_dists, cfg)
    tol = min(cfg.tol_eq, cfg.tol_mono)
    rep = _report(f"order_sensitivity:{notion}", witnesses, tol, cfg, compared > 0, details=details, skipped=skipped)
    if notion == "metrical":
        rep.notes.append(
            "sphere symmetry characterises metrical order-sensitivity only for convex classes of "
            "mixture-continuous functionals with surjective range; those hypotheses are the caller's"
        )
    if compared == 0:
        rep.notes.append("every probe left the action domain")
    return rep


# ---------------------------------------------------------------------------
# self-calibration
# ---------------------------------------------------------------------------


def check_self_calibration(
    S: Score,
    T: Functional,
    test_dists: Sequence[Distribution],
    epsilons: Sequence[float],
    cfg: CheckConfig | None = None,
) -> PropertyReport:
    """Estimate ``delta(eps, F) = inf{S(x) - S(t) : |x - t| >= eps}`` on probes.

    The infimum is taken over grid points at distance at least ``eps`` and
    over the points ``t + eps * v`` for the configured directions.  A
    value of ``eps`` that leaves no grid point far enough away makes the
    verdict inconclusive.
    """
    cfg = cfg or CheckConfig()
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps):
        raise DomainError("epsilons must be positive")
    witnesses, details, notes = [], [], []
    conclusive = True
    for F in test_dists:
        t = evaluate_functional(T, F)
        axes = cfg.axes(t)
        X, vals = _scan(S, axes, F)
        vals = vals.ravel()
        S_t = float(expected_scores(S, t[:, None], F)[0])
        dist = np.linalg.norm(X - t[:, None], axis=0)
        dirs = cfg.direction_set(t.size)
        curve = []
        for e in eps:
            far = (dist >= e) & np.isfinite(vals)
            if not far.any():
                conclusive = False
                notes.append(f"eps={e:g} exceeds the probed radius around T(F) for {to_literal(F)}")
                curve.append([e, None])
                continue
            sphere = expected_scores(S, t[:, None] + e * dirs.T, F, outside="nan")
            cand = np.concatenate([vals[far], sphere[np.isfinite(sphere)]])
            delta = float(np.min(cand) - S_t)
            curve.append([e, delta])
            if delta < -cfg.tol_mono:
                witnesses.append({"F": to_literal(F), "t": _pt(t), "eps": e, "delta": delta, "margin": -delta})
            elif delta <= cfg.tol_mono:
                conclusive = False
                notes.append(f"delta({e:g}) = {delta:.3g} is not separated from zero for {to_literal(F)}")
        details.append({"F": to_literal(F), "t": _pt(t), "curve": curve})
    rep = _report("self_calibration", witnesses, cfg.tol_mono, cfg, True, details=details, notes=notes)
    if rep.verdict == HOLDS and not conclusive:
        rep.verdict = INCONCLUSIVE
    return rep


# ---------------------------------------------------------------------------
# identification functions
# ---------------------------------------------------------------------------


def check_orientation(
    V: IdentificationFn,
    T: Functional,
    test_dists: Sequence[Distribution],
    cfg: CheckConfig | None = None,
) -> PropertyReport:
    """Sign pattern of ``v' E_F V(t + s v, Y)``: it must have the sign of ``s``."""
    cfg = cfg or CheckConfig()
    if V.target is not None and V.target != T:
        raise DomainError(f"identification function targets {V.target.label()}, not {T.label()}")
    witnesses, details = [], []
    skipped = strong = weak = 0
    s_pos = np.linspace(0.0, cfg.s_max, cfg.n_s)[1:]
    s_all = np.concatenate([-s_pos[::-1], s_pos])
    dom = T.domain
    for F in test_dists:
        t = evaluate_functional(T, F)
        dirs = cfg.direction_set(t.size)
        if t.size == 1:
            dirs = dirs[dirs[:, 0] > 0][:1]
        for v in dirs:
            for s in s_all:
                x = t + s * v
                if not dom.contains(x):
                    skipped += 1
                    continue
                val = float(v @ expected_identification(V, x, F))
                signed = math.copysign(1.0, s) * val
                if signed < -cfg.tol_eq:
                    witnesses.append(
                        {
                            "F": to_literal(F),
                            "t": _pt(t),
                            "direction": _pt(v),
                            "s": float(s),
                            "projection": val,
                            "margin": -signed,
                        }
                    )
                elif abs(val) <= cfg.tol_eq:
                    weak += 1
                else:
                    strong += 1
        details.append({"F": to_literal(F), "t": _pt(t)})
    rep = _report("orientation", witnesses, cfg.tol_eq, cfg, strong > 0, details=details, skipped=skipped)
    if weak:
        rep.notes.append(f"{weak} probes with |v'V| <= tol_eq (sign undetermined)")
    return rep


def check_identification(
    V: IdentificationFn, T: Functional, test_dists: Sequence[Distribution], tol: float = 1e-9
) -> PropertyReport:
    """``E_F V(T(F), Y) = 0`` for every test law.

    For quantile-type functionals this needs ``F(T(F)) = alpha``, which
    fails for laws with an atom at the quantile.
    """
    witnesses, details = [], []
    for F in test_dists:
        t = evaluate_functional(T, F)
        vbar = expected_identification(V, t, F)
        err = float(np.max(np.abs(vbar)))
        details.append({"F": to_literal(F), "t": _pt(t), "expected_V": _pt(vbar)})
        if err > tol:
            witnesses.append({"F": to_literal(F), "t": _pt(t), "expected_V": _pt(vbar), "margin": err})
    rep = PropertyReport("identification", _verdict(witnesses, tol), witnesses, {"tol": tol}, details=details)
    if NEEDS_CDF_AT_LEVEL["identification"] and T.kind in ("quantile", "var_es"):
        rep.notes.append("requires F(T(F)) = alpha at the quantile level")
    return rep


# ---------------------------------------------------------------------------
# equivariance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Translation:
    """``y -> y + M_O z`` and ``x -> x + M_A z``."""

    m_obs: tuple = ((1.0,),)
    m_act: tuple = ((1.0,),)


@dataclass(frozen=True)
class Homogeneity:
    """``S(c x, c y) - S(c z, c y) = c^b (S(x, y) - S(z, y))``."""

    b: float


@dataclass(frozen=True)
class MixedHomogeneity:
    """Like :class:`Homogeneity` with ``c x`` replaced by ``diag(c^d_i) x``."""

    b: float
    degrees: tuple


def _action_map(kind, k):
    if isinstance(kind, Translation):
        MO = np.atleast_2d(np.asarray(kind.m_obs, float))
        MA = np.atleast_2d(np.asarray(kind.m_act, float))
        if MA.shape[0] != k:
            raise DomainError(f"M_A has {MA.shape[0]} rows, expected {k}")

        def fx(x, z):
            return x + MA @ np.atleast_1d(z)

        def fy(y, z):
            return y + float((MO @ np.atleast_1d(z))[0])

        return fx, fy, lambda z: 1.0
    if isinstance(kind, Homogeneity):
        b = float(kind.b)
        return (lambda x, c: c * x), (lambda y, c: c * y), (lambda c: c**b)
    if isinstance(kind, MixedHomogeneity):
        b = float(kind.b)
        deg = np.asarray(kind.degrees, float)
        if deg.size != k:
            raise DomainError(f"degree vector has length {deg.size}, expected {k}")
        return (lambda x, c: c**deg * x), (lambda y, c: c * y), (lambda c: c**b)
    raise DomainError(f"unknown equivariance kind {kind!r}")


def check_equivariance(
    S: Score,
    kind,
    probe_points: Sequence,
    probe_obs: Sequence[float],
    factors: Sequence,
    tol: float = 1e-9,
    pointwise: bool = False,
) -> PropertyReport:
    """Compare transformed score differences with scaled original differences.

    The probe set is the product of ``probe_points`` (each paired with the
    next point, cyclically, as the comparison action), ``probe_obs`` and
    ``factors`` (shifts ``z`` for :class:`Translation`, scales ``c``
    otherwise).  With ``pointwise=True`` the scores themselves are compared
    instead of differences.  Deviations are measured relative to
    ``max(1, |terms|)``.
    """
    P = [np.asarray(p, float).reshape(S.dim) for p in probe_points]
    fx, fy, lam = _action_map(kind, S.dim)
    n = len(P)
    worst, worst_w = 0.0, None
    skipped = compared = 0
    witnesses = []
    for i, y, c in itertools.product(range(n), probe_obs, factors):
        x, z = P[i], P[(i + 1) % n]
        if not (S.domain.contains(x) and S.domain.contains(z)):
            skipped += 1
            continue
        x2, z2, y2 = fx(x, c), fx(z, c), fy(float(y), c)
        if not (S.domain.contains(x2) and S.domain.contains(z2)):
            skipped += 1
            continue
        compared += 1
        L = float(lam(c))
        if pointwise:
            lhs, rhs = S.fn(x2, y2), L * S.fn(x, float(y))
            scale = max(1.0, abs(lhs), abs(rhs))
        else:
            a, b_ = S.fn(x2, y2), S.fn(z2, y2)
            a0, b0 = S.fn(x, float(y)), S.fn(z, float(y))
            lhs, rhs = a - b_, L * (a0 - b0)
            scale = max(1.0, abs(a), abs(b_), abs(L * a0), abs(L * b0))
        dev = abs(float(lhs) - float(rhs)) / scale
        w = {"x": _pt(x), "z": _pt(z), "y": float(y), "factor": _pt(c), "lhs": float(lhs), "rhs": float(rhs), "margin": dev}
        if dev > worst or worst_w is None:
            worst, worst_w = dev, w
        if dev > tol:
            witnesses.append(w)
    rep = PropertyReport(
        f"equivariance:{type(kind).__name__.lower()}",
        _verdict(witnesses, tol, compared > 0),
        sorted(witnesses, key=lambda w: -w["margin"])[:20],
        {"tol": tol},
        config=_jsonable({"kind": asdict(kind), "pointwise": pointwise, "n_points": n}),
        details=[{"worst_relative_deviation": worst, "worst_probe": worst_w, "compared": compared}],
        skipped=skipped,
    )
    if compared == 0:
        rep.notes.append("every transformed probe left the action domain")
    return rep


# ---------------------------------------------------------------------------
# conditions on generators
# ---------------------------------------------------------------------------


def check_convex_conditions(spec, which: str, probe_grid, tol: float = 1e-9, **kw) -> PropertyReport:
    """Closed-form conditions on a convex generator.

    Parameters
    ----------
    spec : ConvexSpec or callable
        The generator, or the even convex ``Phi`` for ``phi_symmetric``.
    which : str
        ``"mv_eq"``: ``phi_12 = -2 m1 phi_22``;
        ``"mv_ineq"``: ``phi_11 >= (m2 + 3 m1^2) phi_22``;
        ``"es_sufficient"``: ``phi'(x) + (x - z) phi''(x) >= 0`` over all
        probe pairs ``(x, z)``;
        ``"mixed_hom"``: ``x -> grad phi(L(c) x) L(c) - c^b grad phi(x)``
        is constant in ``x`` (keywords ``b``, ``degrees``, ``factors``);
        ``"phi_symmetric"``: mass of ``Y - C(F)`` on
        ``M_{x,z} = {u : Psi_x(u) > Psi_z(u)}`` for ``|x| > |z|``
        (keyword ``F``);
        ``"psd"``: Hessian positive semi-definite.
    probe_grid : array_like
        Probe points, one per row (pairs ``(x, z)`` for ``es_sufficient``
        and ``phi_symmetric``).
    tol : float
        Relative tolerance, scaled by ``max(1, |terms|)``.
    """
    pts = np.asarray(probe_grid, float)
    runners = {
        "mv_eq": _mv_eq,
        "mv_ineq": _mv_ineq,
        "es_sufficient": _es_sufficient,
        "mixed_hom": _mixed_hom,
        "phi_symmetric": _phi_symmetric,
        "psd": _psd,
    }
    if which not in runners:
        raise DomainError(f"unknown condition {which!r}")
    try:
        witnesses, detail, any_probe, notes = runners[which](spec, pts, tol, **kw)
    except (FloatingPointError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
        return PropertyReport(f"convex:{which}", INCONCLUSIVE, [], {"tol": tol}, notes=[f"derivative evaluation failed: {exc}"])
    rep = PropertyReport(
        f"convex:{which}",
        _verdict(witnesses, tol, any_probe),
        sorted(witnesses, key=lambda w: -w["margin"])[:20],
        {"tol": tol},
        config={"generator": getattr(spec, "name", getattr(spec, "__name__", "Phi")), "n_probes": int(len(pts))},
        details=[detail],
        notes=notes,
    )
    return rep


def _in_domain(spec, pts):
    return spec.domain.mask(pts.T, strict=True)


def _mv_terms(spec, pts):
    ok = _in_domain(spec, pts)
    P = pts[ok].T
    H = np.asarray(spec.hessian(P), float)
    return P, H, int((~ok).sum())


def _mv_eq(spec, pts, tol):
    P, H, skipped = _mv_terms(spec, pts)
    lhs, rhs = H[0, 1], -2.0 * P[0] * H[1, 1]
    dev = np.abs(lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    wit = [
        {"m": _pt(P[:, i]), "lhs": float(lhs[i]), "rhs": float(rhs[i]), "margin": float(dev[i])}
        for i in np.flatnonzero(dev > tol)
    ]
    detail = {"max_relative_gap": float(dev.max()) if dev.size else None, "skipped": skipped}
    return wit, detail, dev.size > 0, []


def _mv_ineq(spec, pts, tol):
    P, H, skipped = _mv_terms(spec, pts)
    lhs, rhs = H[0, 0], (P[1] + 3.0 * P[0] ** 2) * H[1, 1]
    gap = (lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    wit = [
        {"m": _pt(P[:, i]), "lhs": float(lhs[i]), "rhs": float(rhs[i]), "margin": float(-gap[i])}
        for i in np.flatnonzero(-gap > tol)
    ]
    detail = {
        "min_relative_slack": float(gap.min()) if gap.size else None,
        "max_abs_relative_slack": float(np.abs(gap).max()) if gap.size else None,
        "skipped": skipped,
    }
    return wit, detail, gap.size > 0, []


def _es_sufficient(spec, pts, tol):
    pts = pts.reshape(-1, 2)
    x, z = pts[:, 0], pts[:, 1]
    ok = spec.domain.mask(x[None], strict=True) & spec.domain.mask(z[None], strict=True)
    x, z = x[ok], z[ok]
    d1, d2 = spec.d1(x), spec.d2(x)
    margin = d1 + (x - z) * d2
    scale = np.maximum(1.0, np.maximum(np.abs(d1), np.abs((x - z) * d2)))
    rel = margin / scale
    wit = [
        {"x": float(x[i]), "z": float(z[i]), "value": float(margin[i]), "margin": float(-rel[i])}
        for i in np.flatnonzero(-rel > tol)
    ]
    detail = {"min_margin": float(margin.min()) if margin.size else None, "skipped": int((~ok).sum())}
    return wit, detail, margin.size > 0, []


def _mixed_hom(spec, pts, tol, b, degrees, factors=(0.5, 2.0, 10.0)):
    deg = np.asarray(degrees, float)
    ok = _in_domain(spec, pts)
    P = pts[ok].T
    wit, spreads = [], []
    for c in factors:
        Lam = c**deg
        Q = Lam[:, None] * P
        keep = spec.domain.mask(Q, strict=True)
        G = np.asarray(spec.gradient(Q[:, keep]), float) * Lam[:, None] - c**b * np.asarray(
            spec.gradient(P[:, keep]), float
        )
        if G.shape[1] < 2:
            continue
        spread = np.max(G, axis=1) - np.min(G, axis=1)
        scale = max(1.0, float(np.max(np.abs(G))))
        rel = float(np.max(spread)) / scale
        spreads.append([float(c), rel])
        if rel > tol:
            i = int(np.argmax(spread))
            wit.append(
                {
                    "factor": float(c),
                    "component": i,
                    "x_high": _pt(P[:, keep][:, int(np.argmax(G[i]))]),
                    "x_low": _pt(P[:, keep][:, int(np.argmin(G[i]))]),
                    "margin": rel,
                }
            )
    return wit, {"spread_by_factor": spreads, "b": b, "degrees": deg.tolist()}, bool(spreads), []


def _phi_symmetric(Phi, pts, tol, F):
    from .dist import center_of_symmetry, quadrature_rule

    c = center_of_symmetry(F)
    pts = pts.reshape(-1, 2)
    y, w = quadrature_rule(F)
    u = y - c
    wit, masses = [], []
    notes = ["zero mass on M_{x,z} means the sufficient condition for strictness fails at that pair"]
    for x, z in pts:
        if not abs(x) > abs(z):
            continue
        psi_x = 0.5 * (Phi(x - u) + Phi(-x - u))
        psi_z = 0.5 * (Phi(z - u) + Phi(-z - u))
        inside = psi_x - psi_z > 0
        mass = float(w @ inside)
        gain = float(w @ (psi_x - psi_z))
        masses.append([float(x), float(z), mass])
        if mass <= tol:
            # strictness fails: the expected scores at c + x and c + z coincide
            wit.append(
                {"x": float(x), "z": float(z), "mass": mass, "score_gap": gain, "margin": abs(x) - abs(z)}
            )
    if len(atoms(F)) == 0:
        notes.append("continuous law: mass estimated on the quadrature nodes")
    return wit, {"center": c, "masses": masses}, bool(masses), notes


def _psd(spec, pts, tol):
    ok = _in_domain(spec, pts)
    P = pts[ok]
    wit, low = [], []
    for p in P:
        H = np.asarray(spec.hessian(p), float).reshape(spec.dim, spec.dim)
        ev = float(np.min(np.linalg.eigvalsh(H)))
        rel = ev / max(1.0, float(np.max(np.abs(H))))
        low.append(rel)
        if -rel > tol:
            wit.append({"m": _pt(p), "min_eigenvalue": ev, "margin": -rel})
    return wit, {"min_relative_eigenvalue": min(low) if low else None}, bool(low), []


# ---------------------------------------------------------------------------
# separability and mixture paths
# ---------------------------------------------------------------------------


def check_separability(
    S: Score,
    T: Functional,
    test_dists: Sequence[Distribution] = (),
    cfg: CheckConfig | None = None,
    probes: Sequence | None = None,
    h: float = 0.5,
    tol: float = 1e-10,
) -> PropertyReport:
    """Mixed second differences of ``x -> S(x, y)`` in distinct coordinates.

    ``probes`` is a list of ``(x, y)`` pairs; by default the points of a
    small grid around ``T(F)`` are paired with the 10%, 50% and 90%
    quantiles of each test law.
    """
    if T.output_dim < 2:
        raise DomainError("separability needs at least two action coordinates")
    cfg = cfg or CheckConfig()
    k = T.output_dim
    if probes is None:
        from .dist import quantile

        probes = []
        for F in test_dists:
            t = evaluate_functional(T, F)
            ys = [quantile(F, a) for a in (0.1, 0.5, 0.9)]
            for off in itertools.product((-1.0, 0.0, 1.0), repeat=k):
                for yv in ys:
                    probes.append((t + np.array(off), yv))
    witnesses, worst = [], 0.0
    compared = 0
    eye = np.eye(k)
    for x, y in probes:
        x = np.asarray(x, float).reshape(k)
        for l, r in itertools.combinations(range(k), 2):
            pts = [x + h * eye[l] + h * eye[r], x + h * eye[l], x + h * eye[r], x]
            if not all(S.domain.contains(p) for p in pts):
                continue
            compared += 1
            a, b, c, d = (float(S.fn(p, float(y))) for p in pts)
            diff = a - b - c + d
            worst = max(worst, abs(diff))
            if abs(diff) > tol:
                witnesses.append({"x": _pt(x), "y": float(y), "coords": [l, r], "h": h, "mixed_difference": diff, "margin": abs(diff)})
    return PropertyReport(
        "separability",
        _verdict(witnesses, tol, compared > 0),
        sorted(witnesses, key=lambda w: -w["margin"])[:20],
        {"tol": tol},
        config={"h": h, "n_probes": len(probes)},
        details=[{"max_abs_mixed_difference": worst, "compared": compared}],
    )


def check_mixture_path(
    S: Score, T: Functional, F: Distribution, G: Distribution, n_grid: int = 21, tol: float = 1e-9
) -> PropertyReport:
    """Along ``g(lam) = T((1 - lam) F + lam G)`` the expected score under ``F``
    must not decrease as ``lam`` moves away from 0."""
    path = mixture_path(T, F, G, n_grid)
    vals = expected_scores(S, path.values.T, F, outside="nan")
    witnesses = []
    for i in range(n_grid - 1):
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]):
            drop = float(vals[i] - vals[i + 1])
            if drop > tol:
                witnesses.append(
                    {
                        "lambda": [float(path.lambdas[i]), float(path.lambdas[i + 1])],
                        "values": [float(vals[i]), float(vals[i + 1])],
                        "margin": drop,
                    }
                )
    return PropertyReport(
        "mixture_path",
        _verdict(witnesses, tol, bool(np.isfinite(vals).any())),
        witnesses,
        {"tol": tol},
        details=[
            {
                "F": to_literal(F),
                "G": to_literal(G),
                "path_verdict": path.verdict,
                "lambdas": path.lambdas.tolist(),
                "points": path.values.tolist(),
                "expected_scores": vals.tolist(),
            }
        ],
    )


def symmetry_gap(S: Score, T: Functional, F: Distribution, d: float) -> float:
    """``E_F S(t + d, Y) - E_F S(t - d, Y)`` for a scalar functional."""
    t = evaluate_functional(T, F)
    v = expected_scores(S, np.array([[t[0] + d, t[0] - d]]), F)
    return float(v[0] - v[1])


__all__ = [
    "CheckConfig",
    "PropertyReport",
    "Translation",
    "Homogeneity",
    "MixedHomogeneity",
    "check_consistency",
    "check_order_sensitivity",
    "check_self_calibration",
    "check_orientation",
    "check_identification",
    "check_equivariance",
    "check_convex_conditions",
    "check_separability",
    "check_mixture_path",
    "symmetry_gap",
    "HOLDS",
    "VIOLATED",
    "INCONCLUSIVE",
]
