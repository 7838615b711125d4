"""Action domains: boxes intersected with finitely many linear half-spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class LinearConstraint:
    """``coef . x  rel  offset`` with ``rel`` one of ``"<="`` or ``"<"``."""

    coef: tuple
    rel: str
    offset: float

    def __post_init__(self):
        if self.rel not in ("<=", "<"):
            raise ValueError(f"unknown relation {self.rel!r}")

    def margin(self, x):
        # positive means satisfied with room to spare
        return self.offset - np.tensordot(np.asarray(self.coef, float), x, axes=(0, 0))


@dataclass(frozen=True)
class ActionDomain:
    dim: int
    lower: tuple = None
    upper: tuple = None
    lower_closed: tuple = None
    upper_closed: tuple = None
    constraints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        k = self.dim
        if k < 1:
            raise ValueError("dim must be positive")
        defaults = {
            "lower": (-INF,) * k,
            "upper": (INF,) * k,
            "lower_closed": (True,) * k,
            "upper_closed": (True,) * k,
        }
        for name, default in defaults.items():
            val = getattr(self, name)
            val = default if val is None else tuple(val)
            if len(val) != k:
                raise ValueError(f"{name} must have length {k}")
            object.__setattr__(self, name, val)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @classmethod
    def real_line(cls):
        return cls(1)

    @classmethod
    def euclidean(cls, k):
        return cls(k)

    def contains(self, x, strict=False):
        """Membership of a single point; ``strict`` tests the interior."""
        return bool(np.all(self.mask(np.asarray(x, float).reshape(self.dim, -1), strict)))

    def contains_interior(self, x):
        return self.contains(x, strict=True)

    def mask(self, X, strict=False):
        """Vectorised membership for points stacked along axis 1 (shape ``(k, n)``)."""
        X = np.asarray(X, float)
        ok = np.all(np.isfinite(X), axis=0)
        for i in range(self.dim):
            lo, hi = self.lower[i], self.upper[i]
            if strict or not self.lower_closed[i]:
                ok &= X[i] > lo
            else:
                ok &= X[i] >= lo
            if strict or not self.upper_closed[i]:
                ok &= X[i] < hi
            else:
                ok &= X[i] <= hi
        for c in self.constraints:
            m = c.margin(X)
            ok &= (m > 0) if (strict or c.rel == "<") else (m >= 0)
        return ok

    def intersect(self, other: ActionDomain) -> ActionDomain:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        lower, upper, lc, uc = [], [], [], []
        for i in range(self.dim):
            a, b = (self.lower[i], self.lower_closed[i]), (other.lower[i], other.lower_closed[i])
            lo = max(a, b, key=lambda t: (t[0], not t[1]))
            a, b = (self.upper[i], self.upper_closed[i]), (other.upper[i], other.upper_closed[i])
            hi = min(a, b, key=lambda t: (t[0], t[1]))
            lower.append(lo[0])
            lc.append(lo[1])
            upper.append(hi[0])
            uc.append(hi[1])
        return ActionDomain(self.dim, lower, upper, lc, uc, self.constraints + other.constraints)

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "lower": [_num(v) for v in self.lower],
            "upper": [_num(v) for v in self.upper],
            "lower_closed": list(self.lower_closed),
            "upper_closed": list(self.upper_closed),
            "constraints": [
                {"coef": list(c.coef), "rel": c.rel, "offset": c.offset} for c in self.constraints
            ],
        }


def _num(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def halfline(lower=-INF, upper=INF, lower_closed=True, upper_closed=True):
    return ActionDomain(1, (lower,), (upper,), (lower_closed,), (upper_closed,))


def var_es_domain():
    """``{x : x2 <= x1}``."""
    return ActionDomain(2, constraints=(LinearConstraint((-1.0, 1.0), "<=", 0.0),))


def stripe_domain(c):
    """``A_c = {x : x2 <= x1 < x2 + c}``."""
    return ActionDomain(
        2,
        constraints=(
            LinearConstraint((-1.0, 1.0), "<=", 0.0),
            LinearConstraint((1.0, -1.0), "<", float(c)),
        ),
    )


@dataclass(frozen=True)
class PredicateDomain:
    """A region given by a vectorised membership predicate.

    Used where the natural domain is not polyhedral, e.g. ``{m : m1**2 < m2}``.
    ``predicate(X, strict)`` receives points stacked along axis 1.
    """

    dim: int
    predicate: object = field(compare=False)
    description: str = ""

    def mask(self, X, strict=False):
        X = np.asarray(X, float)
        return np.all(np.isfinite(X), axis=0) & np.asarray(self.predicate(X, strict), bool)

    def contains(self, x, strict=False):
        return bool(np.all(self.mask(np.asarray(x, float).reshape(self.dim, -1), strict)))

    def contains_interior(self, x):
        return self.contains(x, strict=True)

    def describe(self) -> dict:
        return {"dim": self.dim, "predicate": self.description}
