"""Text literals for distributions, scores and functionals.

Distributions::

    discrete: 0:0.5, 1:0.5
    normal: 0, 1
    uniform: -1, 3
    mix: 0.25 | <normal: 0, 1> | <discrete: 2:1>

Nested mixtures may also be written in prefix form without angle brackets
(``mix: 0.5 | mix: 0.5 | normal: 0, 1 | uniform: 0, 1 | normal: 3, 1``).

Scores are ``family[:key=value,...]``, e.g. ``pinball:alpha=0.05`` or
``var_es:alpha=0.05,phi=psi_b(0.5)``.  Two modifiers apply to every family:
``scale=<lam>`` multiplies the score by ``lam > 0`` and ``offset=<a>`` adds
``a(y)``, where ``a`` is a number, ``y`` or ``y^k``.  Both leave forecast
rankings unchanged.

Functionals are ``mean``, ``quantile:alpha=a``, ``expectile:tau=t``,
``mean_variance``, ``var_es:alpha=a``, ``moments:k=K``, ``center`` and
``ratio:p=y;y^2,q=1``.
"""

from __future__ import annotations

import math
import re

import numpy as np

from . import convex
from .dist import Distribution, FiniteDiscrete, Functional, Gaussian, Mixture, ObsMap, Uniform, obs_power
from .errors import ElicitError, UsageError
from .scores import G_IDENTITY, G_ZERO, MV_EPS, Score, equivalent, make_score

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*\(\s*([^()]*)\)\s*$")


def _real(token: str, what: str) -> float:
    try:
        v = float(token.strip())
    except ValueError:
        raise UsageError(f"{what}: {token.strip()!r} is not a number") from None
    if not math.isfinite(v):
        raise UsageError(f"{what}: {token.strip()!r} is not finite")
    return v


def _split_top(text: str, sep: str, open_="<(", close=">)") -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in open_:
            depth += 1
        elif ch in close:
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise UsageError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


def parse_distribution(text: str) -> Distribution:
    """Parse a distribution literal (inverse of :func:`elicit.dist.to_literal`)."""
    text = text.strip()
    dist, j = _parse_dist_parts(_split_top(text, "|"), 0)
    if j != len(_split_top(text, "|")):
        raise UsageError(f"trailing components in distribution literal {text!r}")
    return dist


def _parse_dist_parts(parts, i):
    if i >= len(parts):
        raise UsageError("mixture literal is missing a component")
    part = parts[i].strip()
    if part.startswith("<") and part.endswith(">"):
        return parse_distribution(part[1:-1]), i + 1
    head, sep, body = part.partition(":")
    kind = head.strip().lower()
    if not sep:
        raise UsageError(f"distribution literal {part!r} lacks 'kind:'")
    try:
        if kind == "mix":
            lam = _real(body, "mix weight")
            left, j = _parse_dist_parts(parts, i + 1)
            right, j = _parse_dist_parts(parts, j)
            return Mixture(lam, left, right), j
        if kind == "discrete":
            pairs = []
            for item in body.split(","):
                v, colon, w = item.partition(":")
                if not colon:
                    raise UsageError(f"discrete atom {item.strip()!r} is not 'value:weight'")
                pairs.append((_real(v, "atom value"), _real(w, "atom weight")))
            return FiniteDiscrete(tuple(pairs)), i + 1
        args = [_real(a, kind) for a in body.split(",")]
        if kind in ("normal", "gaussian"):
            if len(args) != 2:
                raise UsageError(f"normal takes 'mu, sigma', got {body.strip()!r}")
            return Gaussian(*args), i + 1
        if kind == "uniform":
            if len(args) != 2:
                raise UsageError(f"uniform takes 'a, b', got {body.strip()!r}")
            return Uniform(*args), i + 1
    except UsageError:
        raise
    except ElicitError as exc:
        raise UsageError(f"{part!r}: {exc}") from None
    raise UsageError(f"unknown distribution kind {head.strip()!r}")


# ---------------------------------------------------------------------------
# scores
# ---------------------------------------------------------------------------


def parse_params(text: str) -> dict:
    """``k=v,k=v`` with commas inside parentheses left alone."""
    out = {}
    if not text.strip():
        return out
    for item in _split_top(text, ",", "(", ")"):
        key, eq, val = item.partition("=")
        if not eq or not key.strip():
            raise UsageError(f"parameter {item.strip()!r} is not 'key=value'")
        out[key.strip()] = val.strip()
    return out


def parse_obs_map(token: str) -> ObsMap:
    t = token.strip().replace(" ", "")
    if t == "1":
        return obs_power(0)
    if t == "y":
        return obs_power(1)
    m = re.fullmatch(r"y\^(\d+)", t)
    if m:
        return obs_power(int(m.group(1)))
    raise UsageError(f"observation map {token.strip()!r} is not '1', 'y' or 'y^k'")


def parse_convex(token: str) -> convex.ConvexSpec:
    """``phi_b(b)``, ``psi_b(b)`` (an alias for ``phi_b``) or a preset name."""
    m = _CALL.match(token)
    if m:
        name, arg = m.group(1), m.group(2)
        if name in ("phi_b", "psi_b"):
            return convex.phi_b(_real(arg, name))
        raise UsageError(f"unknown generator {token.strip()!r}")
    try:
        return convex.from_name(token.strip())
    except ElicitError:
        raise UsageError(f"unknown generator {token.strip()!r}") from None


def _parse_offset(token: str):
    t = token.strip().replace(" ", "")
    try:
        c = float(t)
    except ValueError:
        g = parse_obs_map(t)
        return (lambda y: g(y)), t
    if not math.isfinite(c):
        raise UsageError(f"offset {token.strip()!r} is not finite")
    return (lambda y: c + 0.0 * np.asarray(y, float)), t


_NUMERIC = {
    "pinball": ("alpha",),
    "asym_squared": ("tau",),
    "huber": ("k",),
    "abs": (),
    "mean_sq": (),
    "exp_bregman": (),
    "mv": (),
    "mv_hom": ("eps",),
    "var_es": ("alpha",),
    "var_es_c": ("alpha", "c"),
    "bregman_ratio_quadratic": (),
    "bregman_ratio_multi": (),
}
_EXTRA = {
    "mv": ("phi",),
    "var_es": ("phi", "g"),
    "bregman_ratio_quadratic": ("p", "q"),
    "bregman_ratio_multi": ("p", "q"),
}


def parse_score(text: str) -> Score:
    """Parse a score literal such as ``pinball:alpha=0.05``."""
    head, _, body = text.strip().partition(":")
    family = head.strip()
    if family not in _NUMERIC:
        raise UsageError(f"unknown score family {family!r}")
    raw = parse_params(body)
    scale = raw.pop("scale", None)
    offset = raw.pop("offset", None)
    allowed = set(_NUMERIC[family]) | set(_EXTRA.get(family, ()))
    for key in raw:
        if key not in allowed:
            raise UsageError(f"{family} does not take parameter {key!r}")
    params = {k: _real(v, f"{family}:{k}") for k, v in raw.items() if k in _NUMERIC[family]}
    if "phi" in raw:
        phi = parse_convex(raw["phi"])
        params["phi"] = phi
    elif family == "mv":
        params["phi"] = convex.quadratic(2)
    if "g" in raw:
        g = {"zero": G_ZERO, "identity": G_IDENTITY}.get(raw["g"])
        if g is None:
            raise UsageError(f"g must be 'zero' or 'identity', got {raw['g']!r}")
        params["g"] = g
    if "p" in raw:
        ps = [parse_obs_map(t) for t in raw["p"].split(";")]
        params["p"] = ps if family == "bregman_ratio_multi" else ps[0]
    if "q" in raw:
        params["q"] = parse_obs_map(raw["q"])
    if family == "mv_hom":
        params.setdefault("eps", MV_EPS)
    if family == "bregman_ratio_multi" and "p" not in params:
        raise UsageError("bregman_ratio_multi needs p=<map>;<map>...")
    try:
        S = make_score(family, **params)
        if scale is not None or offset is not None:
            a, a_name = _parse_offset(offset) if offset is not None else (None, "")
            S = equivalent(S, _real(scale, "scale") if scale is not None else 1.0, a, a_name)
    except UsageError:
        raise
    except ElicitError as exc:
        raise UsageError(f"{text.strip()!r}: {exc}") from None
    return S


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------


def parse_functional(text: str) -> Functional:
    """Parse a functional literal; accepts the output of ``Functional.label()``."""
    head, _, body = text.strip().partition(":")
    kind = head.strip()
    raw = parse_params(body)
    need = {
        "mean": (),
        "center": (),
        "mean_variance": (),
        "quantile": ("alpha",),
        "expectile": ("tau",),
        "var_es": ("alpha",),
        "moments": ("k",),
        "ratio": ("p", "q"),
    }
    if kind not in need:
        raise UsageError(f"unknown functional {kind!r}")
    for key in raw:
        if key not in need[kind]:
            raise UsageError(f"{kind} does not take parameter {key!r}")
    for key in need[kind]:
        if key not in raw:
            raise UsageError(f"{kind} needs parameter {key!r}")
    try:
        if kind == "quantile":
            return Functional.quantile(_real(raw["alpha"], "alpha"))
        if kind == "expectile":
            return Functional.expectile(_real(raw["tau"], "tau"))
        if kind == "var_es":
            return Functional.var_es(_real(raw["alpha"], "alpha"))
        if kind == "moments":
            k = _real(raw["k"], "k")
            if k != int(k):
                raise UsageError(f"moments:k must be an integer, got {raw['k']!r}")
            return Functional.moments(int(k))
        if kind == "ratio":
            return Functional.ratio([parse_obs_map(t) for t in raw["p"].split(";")], parse_obs_map(raw["q"]))
        return getattr(Functional, kind)()
    except UsageError:
        raise
    except ElicitError as exc:
        raise UsageError(f"{text.strip()!r}: {exc}") from None


def parse_point(text: str, dim: int | None = None) -> np.ndarray:
    """A forecast written as ``1.5`` or ``0, -1``."""
    x = np.array([_real(t, "point") for t in text.split(",")])
    if dim is not None and x.size != dim:
        raise UsageError(f"point {text.strip()!r} has {x.size} components, expected {dim}")
    return x


__all__ = [
    "parse_distribution",
    "parse_score",
    "parse_functional",
    "parse_params",
    "parse_obs_map",
    "parse_convex",
    "parse_point",
]
