"""Distributions on the real line, expectations and statistical functionals.

Four laws are supported: finite discrete, Gaussian, uniform and binary
mixtures of those.  Expectations are exact sums for discrete laws and
fixed-node Gaussian quadrature otherwise; integrands with kinks or jumps
are handled by splitting the integration range at caller-supplied
breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .domain import ActionDomain, LinearConstraint
from .errors import (
    DenominatorError,
    DomainError,
    DomainViolation,
    NonFiniteIntegrand,
    NonUniqueError,
    NotSymmetricError,
    PathEvaluationError,
)

N_NODES = 64  # Gauss-Hermite / Gauss-Legendre nodes for smooth pieces
PANEL_NODES = 16  # nodes per panel when a Gaussian integral is split
GAUSS_SPAN = 12.0  # Gaussian integrals are truncated at mu +- 12 sigma
WEIGHT_TOL = 1e-12
FLAT_TOL = 1e-9


# ---------------------------------------------------------------------------
# distribution types
# ---------------------------------------------------------------------------


class Distribution:
    """Common base of the four distribution variants."""

    def __str__(self):
        return to_literal(self)


@dataclass(frozen=True, eq=True)
class FiniteDiscrete(Distribution):
    """Finitely supported law given as ``(value, weight)`` pairs.

    The pairs are canonicalised on construction: zero weights are dropped,
    duplicate values merged and values sorted.
    """

    points: tuple

    def __post_init__(self):
        pts = {}
        for v, w in self.points:
            v, w = float(v), float(w)
            if not (math.isfinite(v) and math.isfinite(w)):
                raise DomainError("support points and weights must be finite")
            if w < 0:
                raise DomainError(f"negative weight {w} at {v}")
            if w == 0:
                continue
            v = v + 0.0  # fold -0.0 into 0.0
            pts[v] = pts.get(v, 0.0) + w
        if not pts:
            raise DomainError("a discrete law needs at least one positive weight")
        total = math.fsum(pts.values())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {total!r}, not 1")
        canon = tuple((v, pts[v]) for v in sorted(pts))
        object.__setattr__(self, "points", canon)

    @property
    def values(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def weights(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)) or self.sigma <= 0:
            raise DomainError(f"Gaussian needs finite mu and sigma > 0, got {self.mu}, {self.sigma}")


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise DomainError(f"Uniform needs finite a < b, got {self.a}, {self.b}")


@dataclass(frozen=True)
class Mixture(Distribution):
    """The law ``(1 - lam) * left + lam * right``."""

    lam: float
    left: Distribution
    right: Distribution

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"mixture weight {self.lam} outside [0, 1]")


def point_mass(y: float) -> FiniteDiscrete:
    return FiniteDiscrete(((y, 1.0),))


def discrete(pairs) -> FiniteDiscrete:
    return FiniteDiscrete(tuple(pairs))


def mix(F: Distribution, G: Distribution, lam: float) -> Distribution:
    """Return the law ``(1 - lam) F + lam G``.

    Discrete inputs are flattened into a single canonical discrete law.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"mixture weight {lam} outside [0, 1]")
    if lam == 0.0:
        return F
    if lam == 1.0:
        return G
    if isinstance(F, FiniteDiscrete) and isinstance(G, FiniteDiscrete):
        pairs = [(v, (1 - lam) * w) for v, w in F.points]
        pairs += [(v, lam * w) for v, w in G.points]
        return _discrete_renormalised(pairs)
    return Mixture(lam, F, G)


def _discrete_renormalised(pairs):
    # floating point drift in products of weights can reach a few ulps
    total = math.fsum(w for _, w in pairs)
    return FiniteDiscrete(tuple((v, w / total) for v, w in pairs))


def translate(F: Distribution, z: float) -> Distribution:
    z = float(z)
    if isinstance(F, FiniteDiscrete):
        return FiniteDiscrete(tuple((v + z, w) for v, w in F.points))
    if isinstance(F, Gaussian):
        return Gaussian(F.mu + z, F.sigma)
    if isinstance(F, Uniform):
        return Uniform(F.a + z, F.b + z)
    return Mixture(F.lam, translate(F.left, z), translate(F.right, z))


def scale(F: Distribution, c: float) -> Distribution:
    c = float(c)
    if not c > 0:
        raise DomainError(f"scale factor must be positive, got {c}")
    if isinstance(F, FiniteDiscrete):
        return FiniteDiscrete(tuple((c * v, w) for v, w in F.points))
    if isinstance(F, Gaussian):
        return Gaussian(c * F.mu, c * F.sigma)
    if isinstance(F, Uniform):
        return Uniform(c * F.a, c * F.b)
    return Mixture(F.lam, scale(F.left, c), scale(F.right, c))


def transform(F: Distribution, kind: str, value) -> Distribution:
    """Push ``F`` forward under ``y -> y + value`` or ``y -> value * y``."""
    if kind == "translate":
        z = np.ravel(np.asarray(value, float))
        if z.size != 1:
            raise DomainError("observations are scalar; translation must be a scalar")
        return translate(F, z[0])
    if kind == "scale":
        return scale(F, value)
    raise DomainError(f"unknown transform {kind!r}")


def components(F: Distribution):
    """Yield ``(weight, law)`` pairs of the non-mixture components of ``F``."""
    if isinstance(F, Mixture):
        for w, G in components(F.left):
            if (1 - F.lam) * w > 0:
                yield (1 - F.lam) * w, G
        for w, G in components(F.right):
            if F.lam * w > 0:
                yield F.lam * w, G
    else:
        yield 1.0, F


def atoms(F: Distribution) -> np.ndarray:
    vals = [v for _, G in components(F) if isinstance(G, FiniteDiscrete) for v in G.values]
    return np.unique(np.array(vals, float))


def support_bounds(F: Distribution, span: float = 8.0) -> tuple:
    """Interval carrying essentially all mass; Gaussians are cut at ``span`` sigma."""
    lo, hi = math.inf, -math.inf
    for _, G in components(F):
        if isinstance(G, FiniteDiscrete):
            a, b = G.points[0][0], G.points[-1][0]
        elif isinstance(G, Gaussian):
            a, b = G.mu - span * G.sigma, G.mu + span * G.sigma
        else:
            a, b = G.a, G.b
        lo, hi = min(lo, a), max(hi, b)
    return lo, hi


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _hermite(n):
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / math.sqrt(2.0 * math.pi)


def _legendre_on(a, b, n):
    x, w = _legendre(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def _interior_breaks(lo, hi, breakpoints):
    bp = np.asarray(breakpoints, float).ravel()
    bp = bp[np.isfinite(bp) & (bp > lo) & (bp < hi)]
    return np.unique(bp)


def _rule_single(G, breakpoints, n_nodes):
    if isinstance(G, FiniteDiscrete):
        return G.values, G.weights
    if isinstance(G, Uniform):
        edges = np.concatenate(([G.a], _interior_breaks(G.a, G.b, breakpoints), [G.b]))
        xs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            x, w = _legendre_on(a, b, n_nodes)
            xs.append(x)
            ws.append(w / (G.b - G.a))
        return np.concatenate(xs), np.concatenate(ws)
    # Gaussian
    bps = _interior_breaks(G.mu - GAUSS_SPAN * G.sigma, G.mu + GAUSS_SPAN * G.sigma, breakpoints)
    if bps.size == 0:
        x, w = _hermite(n_nodes)
        return G.mu + G.sigma * x, w
    std_edges = np.linspace(-GAUSS_SPAN, GAUSS_SPAN, int(2 * GAUSS_SPAN) + 1)
    edges = np.unique(np.concatenate((std_edges, (bps - G.mu) / G.sigma)))
    # drop slivers created next to a breakpoint
    keep = np.concatenate(([True], np.diff(edges) > 1e-12))
    edges = edges[keep]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _legendre_on(a, b, PANEL_NODES)
        xs.append(x)
        ws.append(w * np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi))
    x, w = np.concatenate(xs), np.concatenate(ws)
    return G.mu + G.sigma * x, w


def quadrature_rule(F: Distribution, breakpoints: Sequence[float] = (), n_nodes: int = N_NODES):
    """Nodes and weights with ``sum(w * f(x)) ~ E_F f(Y)``.

    Parameters
    ----------
    F : Distribution
    breakpoints : sequence of float
        Points where the integrand may fail to be smooth.  Continuous
        pieces are integrated separately on each side.
    n_nodes : int
        Nodes for smooth Gauss-Hermite / Gauss-Legendre pieces.
    """
    xs, ws = [], []
    for weight, G in components(F):
        x, w = _rule_single(G, breakpoints, n_nodes)
        xs.append(x)
        ws.append(weight * w)
    return np.concatenate(xs), np.concatenate(ws)


def expectation(f: Callable, F: Distribution, breakpoints: Sequence[float] = (), n_nodes: int = N_NODES):
    """Expected value of ``f(Y)`` under ``F``.

    ``f`` receives a 1-d array of observations and returns an array whose
    last axis runs over those observations (leading axes are kept, which
    lets callers evaluate many actions at once).

    Raises
    ------
    NonFiniteIntegrand
        If ``f`` is not finite at a node carrying positive weight.
    """
    y, w = quadrature_rule(F, breakpoints, n_nodes)
    vals = np.asarray(f(y), float)
    if vals.ndim == 0:
        vals = np.full(y.shape, float(vals))
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise NonFiniteIntegrand(f"integrand is {vals[tuple(bad)]} at y = {y[bad[-1]]!r}")
    out = vals @ w
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# distribution functions and quantiles
# ---------------------------------------------------------------------------


def _cdf_single(G, x, left):
    x = np.asarray(x, float)
    if isinstance(G, FiniteDiscrete):
        v, w = G.values, G.weights
        mask = v[:, None] < x.ravel()[None, :] if left else v[:, None] <= x.ravel()[None, :]
        return (w @ mask).reshape(x.shape)
    if isinstance(G, Gaussian):
        return ndtr((x - G.mu) / G.sigma)
    return np.clip((x - G.a) / (G.b - G.a), 0.0, 1.0)


def cdf(F: Distribution, x):
    """``F(x) = P(Y <= x)``."""
    out = sum(w * _cdf_single(G, x, False) for w, G in components(F))
    return float(out) if np.ndim(out) == 0 else out


def cdf_left(F: Distribution, x):
    """``F(x-) = P(Y < x)``."""
    out = sum(w * _cdf_single(G, x, True) for w, G in components(F))
    return float(out) if np.ndim(out) == 0 else out


def quantile(F: Distribution, alpha: float) -> float:
    """Lower alpha-quantile ``inf{x : F(x) >= alpha}``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"quantile level {alpha} outside (0, 1)")
    if isinstance(F, FiniteDiscrete):
        cum = np.cumsum(F.weights)
        i = int(np.searchsorted(cum, alpha - 1e-15, side="left"))
        return float(F.values[min(i, len(cum) - 1)])
    if isinstance(F, Gaussian):
        return float(F.mu + F.sigma * ndtri(alpha))
    if isinstance(F, Uniform):
        return F.a + alpha * (F.b - F.a)
    lo, hi = support_bounds(F, span=40.0)
    lo -= 1.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if cdf(F, mid) >= alpha:
            hi = mid
        else:
            lo = mid
    for a in atoms(F):
        if abs(a - hi) <= 1e-12 * max(1.0, abs(a)) and cdf(F, a) >= alpha:
            return float(a)
    return float(hi)


def quantile_is_unique(F: Distribution, alpha: float, q: float | None = None) -> bool:
    """False when ``F`` is flat at level alpha over an interval wider than 1e-9."""
    if q is None:
        q = quantile(F, alpha)
    if isinstance(F, FiniteDiscrete):
        cum = np.cumsum(F.weights)
        i = int(np.searchsorted(F.values, q))
        return not (abs(cum[i] - alpha) <= 1e-14 and i < len(cum) - 1)
    return cdf(F, q + FLAT_TOL) > alpha + 1e-15


def upper_quantile(F: Distribution, alpha: float) -> float:
    """``sup{x : F(x-) <= alpha}``, the right end of the alpha-quantile interval."""
    if isinstance(F, FiniteDiscrete):
        cum = np.cumsum(F.weights)
        i = int(np.searchsorted(cum, alpha + 1e-15, side="right"))
        return float(F.values[min(i, len(cum) - 1)])
    if isinstance(F, (Gaussian, Uniform)):
        return quantile(F, alpha)
    lo, hi = support_bounds(F, span=40.0)
    hi += 1.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if cdf_left(F, mid) <= alpha:
            lo = mid
        else:
            hi = mid
    for a in atoms(F):
        if abs(a - lo) <= 1e-12 * max(1.0, abs(a)):
            return float(a)
    return float(lo)


def mean(F: Distribution) -> float:
    return expectation(lambda y: y, F)


def variance(F: Distribution) -> float:
    m = mean(F)
    return expectation(lambda y: (y - m) ** 2, F)


def expectile(F: Distribution, tau: float) -> float:
    """Root of ``t -> E|1{Y <= t} - tau| (t - Y)``.

    Exact for discrete laws, bisection to 1e-12 otherwise.
    """
    if not 0.0 < tau < 1.0:
        raise DomainError(f"expectile level {tau} outside (0, 1)")
    if isinstance(F, FiniteDiscrete):
        v, w = F.values, F.weights
        for i in range(1, len(v) + 1):
            wl, wh = w[:i], w[i:]
            slope = (1 - tau) * wl.sum() + tau * wh.sum()
            t = ((1 - tau) * (wl @ v[:i]) + tau * (wh @ v[i:])) / slope
            lo_ok = t >= v[i - 1] - 1e-12 * max(1.0, abs(t))
            hi_ok = i == len(v) or t <= v[i] + 1e-12 * max(1.0, abs(t))
            if lo_ok and hi_ok:
                return float(t)
        raise AssertionError("expectile segment search failed")

    def ident(t):
        return expectation(lambda y: np.abs((y <= t) - tau) * (t - y), F, breakpoints=(t,))

    m = mean(F)
    sd = math.sqrt(max(variance(F), 1e-300))
    lo, hi = m - sd, m + sd
    while ident(lo) > 0:
        lo -= 2 * (hi - lo)
    while ident(hi) < 0:
        hi += 2 * (hi - lo)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        if ident(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def var_es(F: Distribution, alpha: float) -> tuple:
    """``(VaR_alpha, ES_alpha)`` with the jump-corrected tail average."""
    q = quantile(F, alpha)
    tail = expectation(lambda y: y * (y <= q), F, breakpoints=(q,))
    es = tail / alpha + q * (alpha - cdf(F, q)) / alpha
    # ES <= VaR holds exactly; rounding can push it a few ulps above
    return q, min(es, q)


def center_of_symmetry(F: Distribution, tol: float = 1e-9) -> float:
    """Midpoint of the median interval, after checking that ``F`` is symmetric about it."""
    c = 0.5 * (quantile(F, 0.5) + upper_quantile(F, 0.5))
    lo, hi = support_bounds(F)
    radius = max(hi - c, c - lo, 1.0)
    probes = np.concatenate((np.linspace(0.0, radius, 201), np.abs(atoms(F) - c)))
    gap = np.abs(cdf(F, c + probes) - (1.0 - cdf_left(F, c - probes)))
    if np.max(gap) > tol:
        i = int(np.argmax(gap))
        raise NotSymmetricError(
            f"law is not symmetric about {c!r}: F(c+x) and 1-F((c-x)-) differ by {gap[i]:.3g} at x={probes[i]!r}"
        )
    return c


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObsMap:
    """A named scalar function of the observation (used by ratio functionals)."""

    name: str
    fn: Callable = field(compare=False, repr=False)

    def __call__(self, y):
        return self.fn(np.asarray(y, float))


def obs_power(k: int) -> ObsMap:
    if k == 0:
        return ObsMap("1", lambda y: np.ones_like(y))
    if k == 1:
        return ObsMap("y", lambda y: y)
    return ObsMap(f"y^{k}", lambda y: y**k)


KINDS = ("mean", "quantile", "expectile", "ratio", "mean_variance", "var_es", "moments", "center")


@dataclass(frozen=True)
class Functional:
    """A statistical functional ``T`` with its output dimension and action domain.

    Build instances with the classmethods (``Functional.mean()``,
    ``Functional.quantile(0.1)``, ...).
    """

    kind: str
    alpha: float | None = None
    tau: float | None = None
    k: int | None = None
    p: tuple = ()
    q: ObsMap | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown functional kind {self.kind!r}")
        for name in ("alpha", "tau"):
            val = getattr(self, name)
            if val is not None and not 0.0 < val < 1.0:
                raise DomainError(f"{name} = {val} outside (0, 1)")
        if self.kind == "moments" and (self.k is None or self.k < 1):
            raise DomainError("moment vector needs k >= 1")
        if self.kind == "ratio" and (not self.p or self.q is None):
            raise DomainError("ratio functional needs p and q")

    @classmethod
    def mean(cls):
        return cls("mean")

    @classmethod
    def quantile(cls, alpha):
        return cls("quantile", alpha=float(alpha))

    @classmethod
    def expectile(cls, tau):
        return cls("expectile", tau=float(tau))

    @classmethod
    def ratio(cls, p, q):
        return cls("ratio", p=tuple(p), q=q)

    @classmethod
    def mean_variance(cls):
        return cls("mean_variance")

    @classmethod
    def var_es(cls, alpha):
        return cls("var_es", alpha=float(alpha))

    @classmethod
    def moments(cls, k):
        return cls("moments", k=int(k))

    @classmethod
    def center(cls):
        return cls("center")

    @property
    def output_dim(self) -> int:
        if self.kind in ("mean_variance", "var_es"):
            return 2
        if self.kind == "moments":
            return self.k
        if self.kind == "ratio":
            return len(self.p)
        return 1

    @property
    def domain(self) -> ActionDomain:
        if self.kind == "mean_variance":
            return ActionDomain(2, lower=(-math.inf, 0.0))
        if self.kind == "var_es":
            return ActionDomain(2, constraints=(LinearConstraint((-1.0, 1.0), "<=", 0.0),))
        return ActionDomain(self.output_dim)

    def point_mass_value(self, y: float) -> np.ndarray:
        """``T(delta_y)``."""
        y = float(y)
        if self.kind in ("mean", "quantile", "expectile", "center"):
            return np.array([y])
        if self.kind == "var_es":
            return np.array([y, y])
        if self.kind == "mean_variance":
            return np.array([y, 0.0])
        if self.kind == "moments":
            return np.array([y**j for j in range(1, self.k + 1)])
        qy = float(self.q(y))
        if qy <= 0:
            raise DenominatorError(f"q({y}) = {qy} is not positive")
        return np.array([float(p(y)) for p in self.p]) / qy

    def label(self) -> str:
        if self.kind == "quantile":
            return f"quantile:alpha={self.alpha!r}"
        if self.kind == "expectile":
            return f"expectile:tau={self.tau!r}"
        if self.kind == "var_es":
            return f"var_es:alpha={self.alpha!r}"
        if self.kind == "moments":
            return f"moments:k={self.k}"
        if self.kind == "ratio":
            return f"ratio:p={';'.join(m.name for m in self.p)},q={self.q.name}"
        return self.kind


def evaluate_functional(T: Functional, F: Distribution, require_unique: bool = True) -> np.ndarray:
    """Compute ``T(F)`` as a length-``k`` array.

    Raises
    ------
    NonUniqueError
        Quantile-type functional whose level set at alpha is an interval.
    DenominatorError
        Ratio functional with ``E_F q(Y) <= 0``.
    NotSymmetricError
        Center of symmetry requested for an asymmetric law.
    DomainViolation
        The value falls outside ``T.domain``.
    """
    kind = T.kind
    if kind == "mean":
        out = [mean(F)]
    elif kind == "quantile":
        qv = quantile(F, T.alpha)
        if require_unique and not quantile_is_unique(F, T.alpha, qv):
            raise NonUniqueError(f"the {T.alpha}-quantile of {F} is not unique")
        out = [qv]
    elif kind == "expectile":
        out = [expectile(F, T.tau)]
    elif kind == "mean_variance":
        out = [mean(F), variance(F)]
    elif kind == "var_es":
        qv = quantile(F, T.alpha)
        if require_unique and not quantile_is_unique(F, T.alpha, qv):
            raise NonUniqueError(f"the {T.alpha}-quantile of {F} is not unique")
        out = list(var_es(F, T.alpha))
    elif kind == "moments":
        out = [expectation(lambda y, j=j: y**j, F) for j in range(1, T.k + 1)]
    elif kind == "ratio":
        den = expectation(T.q, F)
        if den <= 0:
            raise DenominatorError(f"E[q(Y)] = {den} is not positive")
        out = [expectation(p, F) / den for p in T.p]
    else:
        out = [center_of_symmetry(F)]
    x = np.array(out, float)
    if not T.domain.contains(x):
        raise DomainViolation(f"{T.label()} value {x.tolist()} lies outside its action domain")
    return x


@dataclass(frozen=True)
class MixturePath:
    lambdas: np.ndarray
    values: np.ndarray
    verdict: str  # "constant", "injective" or "neither"


def mixture_path(T: Functional, F: Distribution, G: Distribution, n_grid: int, tol: float = 1e-9) -> MixturePath:
    """Sample ``lam -> T((1 - lam) F + lam G)`` on an equispaced grid."""
    if n_grid < 2:
        raise DomainError("n_grid must be at least 2")
    lams = np.linspace(0.0, 1.0, n_grid)
    vals = []
    for lam in lams:
        try:
            vals.append(evaluate_functional(T, mix(F, G, lam)))
        except Exception as exc:  # noqa: BLE001 - re-raised with the path location
            raise PathEvaluationError(f"evaluation failed at lambda={lam!r}: {exc}", lam) from exc
    vals = np.array(vals)
    dist = np.linalg.norm(vals[:, None, :] - vals[None, :, :], axis=-1)
    off = dist[~np.eye(n_grid, dtype=bool)]
    if np.all(off <= tol):
        verdict = "constant"
    elif np.all(off > tol):
        verdict = "injective"
    else:
        verdict = "neither"
    return MixturePath(lams, vals, verdict)


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------


def to_literal(F: Distribution) -> str:
    """Inverse of :func:`elicit.literals.parse_distribution`."""
    if isinstance(F, FiniteDiscrete):
        return "discrete: " + ", ".join(f"{v!r}:{w!r}" for v, w in F.points)
    if isinstance(F, Gaussian):
        return f"normal: {F.mu!r}, {F.sigma!r}"
    if isinstance(F, Uniform):
        return f"uniform: {F.a!r}, {F.b!r}"
    return f"mix: {F.lam!r} | <{to_literal(F.left)}> | <{to_literal(F.right)}>"
