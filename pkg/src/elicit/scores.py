"""Scoring functions, identification functions and expected scores.

A :class:`Score` wraps a vectorised formula ``fn(x, y)``.  The action ``x``
is indexed along its first axis (``x[0]``, ``x[1]``, ...) and every
component broadcasts against the observations ``y``; this lets one call
evaluate a whole grid of actions against a whole quadrature rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math
from typing import Callable, Sequence

import numpy as np

from . import convex
from .convex import ConvexSpec
from .dist import Distribution, FiniteDiscrete, Functional, ObsMap, components, obs_power, quadrature_rule
from .domain import ActionDomain, PredicateDomain, stripe_domain, var_es_domain
from .errors import (
    ConvexityError,
    DomainError,
    DomainViolation,
    NonFiniteIntegrand,
    PathOutsideDomain,
    Unsupported,
)

MV_EPS = 1e-8


@dataclass(frozen=True)
class ScalarFn:
    """A differentiable scalar function with a name, used for ``g`` in (VaR, ES) scores."""

    name: str
    f: Callable = field(compare=False)
    df: Callable = field(compare=False)

    def __call__(self, x):
        return self.f(x)


G_ZERO = ScalarFn("zero", lambda x: 0.0 * np.asarray(x, float), lambda x: 0.0 * np.asarray(x, float))
G_IDENTITY = ScalarFn("identity", lambda x: np.asarray(x, float), lambda x: np.ones_like(np.asarray(x, float)))


@dataclass(frozen=True)
class Score:
    """Scoring function ``S(x, y)`` together with its action domain.

    Attributes
    ----------
    family : str
        Catalog tag, e.g. ``"pinball"``.
    params : tuple
        ``(name, value)`` pairs echoed in reports.
    dim : int
        Dimension of the action ``x``.
    domain : ActionDomain or PredicateDomain
        Actions on which the score is defined.
    fn : callable
        Vectorised formula, see the module docstring.
    kinks : callable or None
        ``kinks(x)`` returns the observation values where ``y -> S(x, y)``
        is not smooth; expectations are split there.
    h : callable or None
        Matrix with ``grad_x S(x, y) = h(x) V(x, y)`` for the canonical
        identification function of ``target``.
    target : Functional or None
        The functional the score is built for.
    """

    family: str
    params: tuple
    dim: int
    domain: object
    fn: Callable = field(compare=False, repr=False)
    kinks: Callable | None = field(default=None, compare=False, repr=False)
    h: Callable | None = field(default=None, compare=False, repr=False)
    target: Functional | None = None

    @property
    def name(self) -> str:
        if not self.params:
            return self.family
        return self.family + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in self.params)

    def evaluate(self, x, y):
        """``S(x, y)`` for one action and a scalar or array of observations."""
        x = np.asarray(x, float).reshape(self.dim)
        if not self.domain.contains(x):
            raise DomainViolation(f"{self.name}: action {x.tolist()} outside the action domain")
        out = self.fn(x, np.asarray(y, float))
        return float(out) if np.ndim(out) == 0 else np.asarray(out, float)

    __call__ = evaluate

    def values(self, X, y):
        """Matrix ``S(X[:, i], y[j])`` for actions stacked along axis 1 (no domain check)."""
        X = np.asarray(X, float).reshape(self.dim, -1)
        y = np.asarray(y, float).ravel()
        out = self.fn(X[:, :, None], y[None, :])
        return np.broadcast_to(out, (X.shape[1], y.size))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# expected scores
# ---------------------------------------------------------------------------


def _is_discrete(F):
    return all(isinstance(G, FiniteDiscrete) for _, G in components(F))


def expected_scores(S: Score, X, F: Distribution, outside: str = "raise") -> np.ndarray:
    """Expected scores for many actions at once.

    Parameters
    ----------
    S : Score
    X : array_like, shape (k, M)
        Actions stacked along axis 1.
    F : Distribution
    outside : {"raise", "nan"}
        What to do with actions outside ``S.domain``.
    """
    X = np.asarray(X, float).reshape(S.dim, -1)
    mask = S.domain.mask(X)
    if not np.all(mask):
        if outside == "raise":
            bad = X[:, np.argmin(mask)]
            raise DomainViolation(f"{S.name}: action {bad.tolist()} outside the action domain")
    out = np.full(X.shape[1], np.nan)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return out
    if S.kinks is None or _is_discrete(F):
        y, w = quadrature_rule(F)
        out[idx] = _weighted(S, X[:, idx], y, w)
        return out
    bps = np.stack([np.broadcast_to(b, idx.shape) for b in S.kinks(X[:, idx])], axis=1)
    uniq, inv = np.unique(bps, axis=0, return_inverse=True)
    inv = inv.ravel()
    for g in range(uniq.shape[0]):
        sel = idx[inv == g]
        y, w = quadrature_rule(F, uniq[g])
        out[sel] = _weighted(S, X[:, sel], y, w)
    return out


def _weighted(S, X, y, w):
    vals = S.values(X, y)
    if not np.all(np.isfinite(vals)):
        i, j = np.argwhere(~np.isfinite(vals))[0]
        raise NonFiniteIntegrand(f"{S.name}: score is {vals[i, j]} at x={X[:, i].tolist()}, y={y[j]!r}")
    return vals @ w


def expected_score(S: Score, x, F: Distribution) -> float:
    """``E_F S(x, Y)``; raises :class:`DomainViolation` outside the action domain."""
    return float(expected_scores(S, np.asarray(x, float).reshape(S.dim, 1), F)[0])


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _unit(a, name):
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"{name} = {a} outside (0, 1)")
    return a


def pinball(alpha: float) -> Score:
    """``(1{y <= x} - alpha)(x - y)``."""
    a = _unit(alpha, "alpha")
    return Score(
        "pinball",
        (("alpha", a),),
        1,
        ActionDomain(1),
        fn=lambda x, y: ((y <= x[0]) - a) * (x[0] - y),
        kinks=lambda x: [x[0]],
        h=lambda x: np.eye(1),
        target=Functional.quantile(a),
    )


def asym_squared(tau: float) -> Score:
    """``|1{y <= x} - tau| (x - y)^2``."""
    t = _unit(tau, "tau")
    return Score(
        "asym_squared",
        (("tau", t),),
        1,
        ActionDomain(1),
        fn=lambda x, y: np.abs((y <= x[0]) - t) * (x[0] - y) ** 2,
        kinks=lambda x: [x[0]],
        h=lambda x: np.eye(1),
        target=Functional.expectile(t),
    )


def phi_loss(Phi: Callable, name: str = "phi_loss", kink_offsets: Sequence[float] = (0.0,), params=()) -> Score:
    """``Phi(x - y)`` for a convex even ``Phi``; targets the center of symmetry."""
    offs = tuple(float(o) for o in kink_offsets)
    return Score(
        name,
        tuple(params),
        1,
        ActionDomain(1),
        fn=lambda x, y: Phi(x[0] - y),
        kinks=(lambda x: [x[0] - o for o in offs]) if offs else None,
        target=Functional.center(),
    )


def huber_phi(k: float):
    def Phi(t):
        at = np.abs(t)
        return np.where(at < k, 0.5 * t * t, k * at - 0.5 * k * k)

    return Phi


def huber(k: float) -> Score:
    """Huber loss: ``t^2/2`` for ``|t| < k`` and ``k|t| - k^2/2`` otherwise."""
    k = float(k)
    if not k > 0:
        raise DomainError(f"huber threshold must be positive, got {k}")
    return phi_loss(huber_phi(k), "huber", (-k, k), (("k", k),))


def absolute() -> Score:
    return phi_loss(np.abs, "abs", (0.0,))


def bregman_ratio_quadratic(p: ObsMap | None = None, q: ObsMap | None = None) -> Score:
    """``q(y) x^2 / 2 - p(y) x``; with the defaults this is the mean score."""
    p = p or obs_power(1)
    q = q or obs_power(0)
    family = "mean_sq" if (p.name, q.name) == ("y", "1") else "bregman_ratio_quadratic"
    params = () if family == "mean_sq" else (("p", p.name), ("q", q.name))
    target = Functional.mean() if family == "mean_sq" else Functional.ratio((p,), q)
    return Score(
        family,
        params,
        1,
        ActionDomain(1),
        fn=lambda x, y: 0.5 * q(y) * x[0] ** 2 - p(y) * x[0],
        h=lambda x: np.eye(1),
        target=target,
    )


def mean_score() -> Score:
    return bregman_ratio_quadratic()


def bregman_ratio_multi(p: Sequence[ObsMap], q: ObsMap | None = None) -> Score:
    """``sum_m (q(y) x_m^2 / 2 - p_m(y) x_m)``."""
    p = tuple(p)
    q = q or obs_power(0)
    k = len(p)

    def fn(x, y):
        qy = q(y)
        return sum(0.5 * qy * x[m] ** 2 - p[m](y) * x[m] for m in range(k))

    return Score(
        "bregman_ratio_multi",
        (("p", ";".join(m.name for m in p)), ("q", q.name)),
        k,
        ActionDomain(k),
        fn=fn,
        h=lambda x: np.eye(k),
        target=Functional.ratio(p, q),
    )


def bregman_general(p: Sequence[ObsMap], q: ObsMap, phi: ConvexSpec, validate: bool = True) -> Score:
    """``-phi(x) q(y) + grad phi(x) . (q(y) x - p(y))``."""
    p = tuple(p)
    k = len(p)
    if phi.dim != k:
        raise DomainError(f"generator dimension {phi.dim} does not match len(p) = {k}")
    if validate:
        phi.validate()

    def fn(x, y):
        xs = np.stack([np.asarray(x[m], float) for m in range(k)])
        qy = q(y)
        g = phi.gradient(xs)
        out = -phi.value(xs) * qy
        for m in range(k):
            out = out + g[m] * (qy * xs[m] - p[m](y))
        return out

    return Score(
        "bregman_general",
        (("p", ";".join(m.name for m in p)), ("q", q.name), ("phi", phi.name)),
        k,
        phi.domain,
        fn=fn,
        h=lambda x: np.asarray(phi.hessian(np.asarray(x, float)), float).reshape(k, k),
        target=Functional.ratio(p, q),
    )


def exp_bregman() -> Score:
    """Bregman score for the mean generated by ``phi(x) = exp(x)``."""
    s = bregman_general((obs_power(1),), obs_power(0), convex.exponential())
    return replace(s, family="exp_bregman", params=(), target=Functional.mean())


def _mv_m(x):
    x1, x2 = np.asarray(x[0], float), np.asarray(x[1], float)
    return np.stack([x1, x2 + x1 * x1])


def _mv_h(phi):
    def h(x):
        x = np.asarray(x, float)
        J = np.array([[1.0, 0.0], [2.0 * x[0], 1.0]])
        return J.T @ np.asarray(phi.hessian(_mv_m(x)), float)

    return h


def mean_variance(phi: ConvexSpec, validate: bool = True) -> Score:
    """Score for (mean, variance) from a generator ``phi`` on ``m = (x1, x2 + x1^2)``.

    ``-phi(m) + grad phi(m) . (x1 - y, x2 + x1^2 - y^2)``.
    """
    if phi.dim != 2:
        raise DomainError("mean-variance generators are bivariate")
    if validate:
        phi.validate()

    def fn(x, y):
        m = _mv_m(x)
        g = phi.gradient(m)
        return -phi.value(m) + g[0] * (m[0] - y) + g[1] * (m[1] - y * y)

    def inside(X, strict):
        return phi.domain.mask(_mv_m(X), strict) & (X[1] >= MV_EPS)

    return Score(
        "mv",
        (("phi", phi.name),),
        2,
        PredicateDomain(2, inside, f"x2 >= {MV_EPS:g} and (x1, x2 + x1^2) in {phi.name}"),
        fn=fn,
        h=_mv_h(phi),
        target=Functional.mean_variance(),
    )


def mv_homogeneous(eps: float = MV_EPS) -> Score:
    """``x2^-2 (x1^2 - 2 x2 - 2 x1 y + y^2)``, defined for ``x2 >= eps``."""

    def fn(x, y):
        x1, x2 = x[0], x[1]
        return (x1 * x1 - 2.0 * x2 - 2.0 * x1 * y + y * y) / (x2 * x2)

    return Score(
        "mv_hom",
        (),
        2,
        ActionDomain(2, lower=(-math.inf, float(eps))),
        fn=fn,
        h=_mv_h(convex.mv_inverse()),
        target=Functional.mean_variance(),
    )


def _check_es_generator(phi: ConvexSpec):
    phi.validate()
    for (p,) in phi.probes:
        if not (phi.d1(p) > 0 and phi.d2(p) > 0):
            raise ConvexityError(f"{phi.name}: needs phi' > 0 and phi'' > 0, fails at {p}")


def var_es(alpha: float, g: ScalarFn | None = None, phi: ConvexSpec | None = None) -> Score:
    """Joint score for (VaR, ES) built from an increasing ``g`` and a convex ``phi``.

    ``(1{y<=x1} - a) g(x1) - 1{y<=x1} g(y)
    + phi'(x2) (x2 - x1 + 1{y<=x1}(x1 - y)/a) - phi(x2)``.
    """
    a = _unit(alpha, "alpha")
    g = g or G_ZERO
    phi = phi or convex.phi_b(1.0)
    if phi.dim != 1:
        raise DomainError("the ES generator must be scalar")
    _check_es_generator(phi)
    pd = phi.domain
    domain = var_es_domain().intersect(
        ActionDomain(
            2,
            lower=(-math.inf, pd.lower[0]),
            upper=(math.inf, pd.upper[0]),
            lower_closed=(True, pd.lower_closed[0]),
            upper_closed=(True, pd.upper_closed[0]),
        )
    )

    def fn(x, y):
        x1, x2 = x[0], x[1]
        ind = y <= x1
        return (
            (ind - a) * g(x1)
            - ind * g(y)
            + phi.d1(x2) * (x2 - x1 + ind * (x1 - y) / a)
            - phi(np.asarray(x2, float)[None])
        )

    def h(x):
        x1, x2 = float(x[0]), float(x[1])
        return np.diag([float(g.df(x1)) + float(phi.d1(x2)) / a, float(phi.d2(x2))])

    return Score(
        "var_es",
        (("alpha", a), ("phi", phi.name), ("g", g.name)),
        2,
        domain,
        fn=fn,
        kinks=lambda x: [x[0]],
        h=h,
        target=Functional.var_es(a),
    )


def var_es_translation(c: float, alpha: float) -> Score:
    """Translation-invariant (VaR, ES) score on the stripe ``x2 <= x1 < x2 + c``.

    ``(1{y<=x1} - a) c (x1 - y) + a (x2^2/2 + x1^2/2 - x1 x2)
    + 1{y<=x1} (-x2 (y - x1) + y^2/2 - x1^2/2)``.
    """
    a = _unit(alpha, "alpha")
    c = float(c)
    if not c > 0:
        raise DomainError(f"stripe width c must be positive, got {c}")

    def fn(x, y):
        x1, x2 = x[0], x[1]
        ind = y <= x1
        return (
            (ind - a) * c * (x1 - y)
            + a * (0.5 * x2 * x2 + 0.5 * x1 * x1 - x1 * x2)
            + ind * (-x2 * (y - x1) + 0.5 * y * y - 0.5 * x1 * x1)
        )

    return Score(
        "var_es_c",
        (("alpha", a), ("c", c)),
        2,
        stripe_domain(c),
        fn=fn,
        kinks=lambda x: [x[0]],
        h=lambda x: np.diag([c - float(x[0]) + float(x[1]), a]),
        target=Functional.var_es(a),
    )


def psi_b(b: float, **kw) -> ConvexSpec:
    """Generator family for homogeneous Bregman scores (see :func:`elicit.convex.psi_b`)."""
    return convex.psi_b(b, **kw)


def make_score(family: str, **params) -> Score:
    """Construct a catalog score by tag."""
    table = {
        "pinball": lambda: pinball(params["alpha"]),
        "asym_squared": lambda: asym_squared(params["tau"]),
        "huber": lambda: huber(params["k"]),
        "abs": absolute,
        "mean_sq": mean_score,
        "exp_bregman": exp_bregman,
        "bregman_ratio_quadratic": lambda: bregman_ratio_quadratic(params.get("p"), params.get("q")),
        "bregman_ratio_multi": lambda: bregman_ratio_multi(params["p"], params.get("q")),
        "bregman_general": lambda: bregman_general(params["p"], params["q"], params["phi"]),
        "phi_loss": lambda: phi_loss(params["Phi"]),
        "mv": lambda: mean_variance(params["phi"]),
        "mv_hom": lambda: mv_homogeneous(params.get("eps", MV_EPS)),
        "var_es": lambda: var_es(params["alpha"], params.get("g"), params.get("phi")),
        "var_es_c": lambda: var_es_translation(params["c"], params["alpha"]),
    }
    if family not in table:
        raise DomainError(f"unknown score family {family!r}")
    try:
        return table[family]()
    except KeyError as exc:
        raise DomainError(f"{family} needs parameter {exc.args[0]!r}") from None


# ---------------------------------------------------------------------------
# equivalence and normalisation
# ---------------------------------------------------------------------------


def equivalent(S: Score, lam: float = 1.0, offset: Callable | None = None, offset_name: str = "") -> Score:
    """``lam * S(x, y) + a(y)`` with ``lam > 0``; ranks forecasts exactly like ``S``."""
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"equivalence needs a positive scale, got {lam}")
    a = offset or (lambda y: 0.0)
    base_h = S.h
    params = S.params + (("scale", lam),) + ((("offset", offset_name),) if offset_name else ())
    return replace(
        S,
        params=params,
        fn=lambda x, y: lam * S.fn(x, y) + a(y),
        h=(lambda x: lam * base_h(x)) if base_h else None,
    )


def _point_mass_values(T: Functional, y):
    y = np.asarray(y, float)
    kind = T.kind
    if kind in ("mean", "quantile", "expectile", "center"):
        return [y]
    if kind == "var_es":
        return [y, y]
    if kind == "mean_variance":
        return [y, np.zeros_like(y)]
    if kind == "moments":
        return [y**j for j in range(1, T.k + 1)]
    qy = T.q(y)
    return [p(y) / qy for p in T.p]


def normalize_score(S: Score, T: Functional | None = None) -> Score:
    """``S_0(x, y) = S(x, y) - S(T(delta_y), y)``."""
    T = T or S.target
    if T is None:
        raise Unsupported(f"{S.name}: no target functional to normalise against")
    if T.output_dim != S.dim:
        raise Unsupported(f"{S.name}: functional {T.label()} has the wrong dimension")
    dom = S.domain

    def fn(x, y):
        y = np.asarray(y, float)
        t = _point_mass_values(T, y)
        if not np.all(dom.mask(np.stack([np.broadcast_to(c, y.shape).ravel() for c in t]))):
            raise DomainViolation(f"{S.name}: T(delta_y) leaves the action domain for some y")
        return S.fn(x, y) - S.fn(t, y)

    return replace(S, family=S.family, params=S.params + (("normalized", True),), fn=fn)


# ---------------------------------------------------------------------------
# identification functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentificationFn:
    """``V(x, y)`` with values in R^k; ``indicator_coords`` lists the action
    coordinates whose comparison with ``y`` makes ``V`` jump."""

    name: str
    target: Functional | None
    dim: int
    fn: Callable = field(compare=False, repr=False)
    indicator_coords: tuple = ()

    def evaluate(self, x, y):
        x = np.asarray(x, float).reshape(self.dim)
        return np.asarray(self.fn(x, np.asarray(y, float)), float)

    __call__ = evaluate


def canonical_identification(T: Functional, centered: bool = False) -> IdentificationFn:
    """Canonical identification function of ``T``.

    ``centered`` selects ``(x1 - y, x2 - (x1 - y)^2)`` instead of
    ``(x1 - y, x2 + x1^2 - y^2)`` for the (mean, variance) pair.
    """
    kind = T.kind
    if kind == "mean":
        return IdentificationFn("mean", T, 1, lambda x, y: np.stack([x[0] - y]))
    if kind == "quantile":
        a = T.alpha
        return IdentificationFn("quantile", T, 1, lambda x, y: np.stack([(y <= x[0]) - a + 0.0 * y]), (0,))
    if kind == "expectile":
        t = T.tau
        return IdentificationFn(
            "expectile", T, 1, lambda x, y: np.stack([2.0 * np.abs((y <= x[0]) - t) * (x[0] - y)]), (0,)
        )
    if kind == "mean_variance":
        if centered:
            return IdentificationFn(
                "mean_variance_centered", T, 2, lambda x, y: np.stack([x[0] - y, x[1] - (x[0] - y) ** 2])
            )
        return IdentificationFn(
            "mean_variance", T, 2, lambda x, y: np.stack([x[0] - y, x[1] + x[0] ** 2 - y**2])
        )
    if kind == "var_es":
        a = T.alpha

        def fn(x, y):
            ind = y <= x[0]
            return np.stack([ind - a + 0.0 * x[1], x[1] - x[0] + ind * (x[0] - y) / a])

        return IdentificationFn("var_es", T, 2, fn, (0,))
    if kind == "moments":
        k = T.k
        return IdentificationFn("moments", T, k, lambda x, y: np.stack([x[j] - y ** (j + 1) for j in range(k)]))
    if kind == "ratio":
        p, q = T.p, T.q
        return IdentificationFn(
            "ratio", T, len(p), lambda x, y: np.stack([q(y) * x[m] - p[m](y) for m in range(len(p))])
        )
    raise Unsupported(f"no canonical identification function for {T.label()}")


def negate(V: IdentificationFn) -> IdentificationFn:
    return replace(V, name="-" + V.name, fn=lambda x, y: -V.fn(x, y))


def expected_identification(V: IdentificationFn, x, F: Distribution) -> np.ndarray:
    """``E_F V(x, Y)``."""
    x = np.asarray(x, float).reshape(V.dim)
    y, w = quadrature_rule(F, [x[c] for c in V.indicator_coords])
    vals = np.broadcast_to(V.fn(x, y), (V.dim, y.size))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand(f"{V.name}: non-finite identification value at x={x.tolist()}")
    return vals @ w


# ---------------------------------------------------------------------------
# path integral
# ---------------------------------------------------------------------------


def _legendre16():
    from .dist import _legendre

    return _legendre(16)


def score_difference_via_path(
    h: Callable,
    V: IdentificationFn,
    x,
    z,
    y: float,
    path: Sequence | None = None,
    n_steps: int = 16,
    domain=None,
) -> float:
    """Reconstruct ``S(x, y) - S(z, y)`` from ``h`` and ``V`` by a line integral.

    The integrand ``(h(g) V(g, y)) . g'`` is integrated along the polyline
    ``x -> path[0] -> ... -> z`` (straight segment when ``path`` is empty)
    in reverse, from ``z`` to ``x``.  Each segment is cut into ``n_steps``
    pieces, further split where a coordinate listed in
    ``V.indicator_coords`` crosses ``y``, and every piece gets a 16-node
    Gauss-Legendre rule.

    Parameters
    ----------
    h : callable
        ``h(point)`` returning a scalar or a ``(k, k)`` matrix.
    V : IdentificationFn
    x, z : array_like
        End points.
    y : float
        Observation.
    path : sequence of points, optional
        Intermediate vertices listed from ``x`` towards ``z``.
    n_steps : int
        Pieces per segment, at least 2.
    domain : optional
        Region whose interior must contain every node; defaults to the
        domain of ``V.target``.

    Raises
    ------
    PathOutsideDomain
        A quadrature node lies outside the interior; ``lam`` is its path
        parameter with ``lam = 0`` at ``x`` and ``lam = 1`` at ``z``.
    """
    if n_steps < 2:
        raise DomainError("n_steps must be at least 2")
    k = V.dim
    x = np.asarray(x, float).reshape(k)
    z = np.asarray(z, float).reshape(k)
    verts = [x] + [np.asarray(p, float).reshape(k) for p in (path or [])] + [z]
    if domain is None and V.target is not None:
        domain = V.target.domain
    seg_len = [np.linalg.norm(b - a) for a, b in zip(verts[:-1], verts[1:])]
    total = sum(seg_len)
    if total == 0.0:
        return 0.0
    nodes, weights = _legendre16()
    y = float(y)
    result = 0.0
    start = 0.0  # arc length from x at the start of the current segment
    for (a, b), L in zip(zip(verts[:-1], verts[1:]), seg_len):
        if L == 0.0:
            continue
        d = a - b  # integrate from b towards a, i.e. from the z side to the x side
        cuts = set(np.linspace(0.0, 1.0, n_steps + 1).tolist())
        for c in V.indicator_coords:
            if d[c] != 0.0:
                t = (y - b[c]) / d[c]
                if 0.0 < t < 1.0:
                    cuts.add(t)
        cuts = np.array(sorted(cuts))
        for t0, t1 in zip(cuts[:-1], cuts[1:]):
            if t1 - t0 <= 0.0:
                continue
            ts = 0.5 * (t1 - t0) * nodes + 0.5 * (t1 + t0)
            P = b[:, None] + d[:, None] * ts[None, :]
            if domain is not None:
                inside = domain.mask(P, strict=True)
                if not np.all(inside):
                    t_bad = ts[np.argmin(inside)]
                    lam = (start + (1.0 - t_bad) * L) / total
                    raise PathOutsideDomain(
                        f"path leaves the interior of the domain at lambda={lam:.6g}", lam=lam
                    )
            Vv = np.broadcast_to(V.fn(P, y), (k, ts.size))
            acc = 0.0
            for j in range(ts.size):
                H = np.asarray(h(P[:, j]), float)
                hv = H * Vv[:, j] if H.ndim == 0 else H.reshape(k, k) @ Vv[:, j]
                acc += weights[j] * float(d @ hv)
            result += 0.5 * (t1 - t0) * acc
        start += L
    return result


def canonical_h(S: Score) -> Callable:
    if S.h is None:
        raise Unsupported(f"{S.name}: no canonical h recorded")
    return S.h


__all__ = [
    "Score",
    "ScalarFn",
    "G_ZERO",
    "G_IDENTITY",
    "IdentificationFn",
    "pinball",
    "asym_squared",
    "huber",
    "absolute",
    "phi_loss",
    "mean_score",
    "bregman_ratio_quadratic",
    "bregman_ratio_multi",
    "bregman_general",
    "exp_bregman",
    "mean_variance",
    "mv_homogeneous",
    "var_es",
    "var_es_translation",
    "psi_b",
    "make_score",
    "expected_score",
    "expected_scores",
    "equivalent",
    "normalize_score",
    "canonical_identification",
    "expected_identification",
    "negate",
    "score_difference_via_path",
    "canonical_h",
]
