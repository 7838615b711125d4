"""Convex generators with analytic gradients and Hessians.

Every callable works on points stacked along the first axis: ``value(m)``
takes ``m`` of shape ``(k, ...)`` and returns shape ``(...)``, ``gradient``
returns ``(k, ...)`` and ``hessian`` returns ``(k, k, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import ActionDomain, PredicateDomain, halfline
from .errors import ConvexityError, DomainError


@dataclass(frozen=True)
class ConvexSpec:
    name: str
    dim: int
    domain: object
    value: Callable = field(compare=False, repr=False)
    gradient: Callable = field(compare=False, repr=False)
    hessian: Callable = field(compare=False, repr=False)
    probes: tuple = field(default=(), compare=False, repr=False)

    def __call__(self, m):
        return self.value(np.asarray(m, float))

    def d1(self, x):
        """First derivative of a scalar generator, elementwise."""
        x = np.asarray(x, float)
        return self.gradient(x[None])[0]

    def d2(self, x):
        """Second derivative of a scalar generator, elementwise."""
        x = np.asarray(x, float)
        return self.hessian(x[None])[0, 0]

    def validate(self, points=None, rtol: float = 1e-6, check_convex: bool = True):
        """Check derivatives against central differences and the Hessian for PSD.

        Raises
        ------
        ConvexityError
            On the first probe point that fails.
        """
        pts = np.asarray(self.probes if points is None else points, float)
        if pts.size == 0:
            return
        pts = pts.reshape(-1, self.dim)
        for p in pts:
            _check_point(self, p, rtol, check_convex)


def _check_point(spec, p, rtol, check_convex):
    k = spec.dim
    g = np.asarray(spec.gradient(p), float)
    H = np.asarray(spec.hessian(p), float)
    if not np.allclose(H, H.T, rtol=1e-12, atol=1e-12):
        raise ConvexityError(f"{spec.name}: Hessian not symmetric at {p.tolist()}")
    g_fd = np.empty(k)
    H_fd = np.empty((k, k))
    for i in range(k):
        h = 1e-5 * max(1.0, abs(p[i]))
        e = np.zeros(k)
        e[i] = h
        g_fd[i] = (spec.value(p + e) - spec.value(p - e)) / (2 * h)
        H_fd[:, i] = (np.asarray(spec.gradient(p + e)) - np.asarray(spec.gradient(p - e))) / (2 * h)
    scale_g = max(1.0, np.max(np.abs(g)))
    scale_h = max(1.0, np.max(np.abs(H)))
    if np.max(np.abs(g - g_fd)) > rtol * scale_g:
        raise ConvexityError(f"{spec.name}: gradient disagrees with finite differences at {p.tolist()}")
    if np.max(np.abs(H - H_fd)) > rtol * scale_h:
        raise ConvexityError(f"{spec.name}: Hessian disagrees with finite differences at {p.tolist()}")
    if check_convex and np.min(np.linalg.eigvalsh(H)) < -1e-10 * scale_h:
        raise ConvexityError(f"{spec.name}: Hessian not positive semi-definite at {p.tolist()}")


def _scalar(name, domain, f, f1, f2, probes):
    return ConvexSpec(
        name,
        1,
        domain,
        value=lambda m: f(np.asarray(m, float)[0]),
        gradient=lambda m: f1(np.asarray(m, float)[0])[None],
        hessian=lambda m: f2(np.asarray(m, float)[0])[None, None],
        probes=tuple((p,) for p in probes),
    )


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def quadratic(k: int = 1) -> ConvexSpec:
    """``phi(x) = |x|^2 / 2`` on R^k."""

    def hess(m):
        m = np.asarray(m, float)
        eye = np.eye(k).reshape((k, k) + (1,) * (m.ndim - 1))
        return np.broadcast_to(eye, (k, k) + m.shape[1:]).copy()

    return ConvexSpec(
        f"quadratic{k}",
        k,
        ActionDomain(k),
        value=lambda m: 0.5 * np.sum(np.asarray(m, float) ** 2, axis=0),
        gradient=lambda m: np.asarray(m, float).copy(),
        hessian=hess,
        probes=tuple(tuple(r) for r in np.linspace(-2, 2, 3 * k).reshape(3, k)),
    )


def quadratic_form(A) -> ConvexSpec:
    """``phi(x) = x' A x / 2`` for a symmetric positive definite ``A``."""
    A = np.asarray(A, float)
    k = A.shape[0]
    if not np.allclose(A, A.T) or np.min(np.linalg.eigvalsh(A)) <= 0:
        raise ConvexityError("quadratic form needs a symmetric positive definite matrix")

    def hess(m):
        m = np.asarray(m, float)
        return np.broadcast_to(A.reshape((k, k) + (1,) * (m.ndim - 1)), (k, k) + m.shape[1:]).copy()

    return ConvexSpec(
        "quadratic_form",
        k,
        ActionDomain(k),
        value=lambda m: 0.5 * np.einsum("i...,ij,j...->...", m, A, m),
        gradient=lambda m: np.einsum("ij,j...->i...", A, np.asarray(m, float)),
        hessian=hess,
        probes=((0.0,) * k, (1.0,) * k, tuple(np.linspace(-1, 2, k))),
    )


def exponential() -> ConvexSpec:
    """``phi(x) = exp(x)`` on R."""
    return _scalar("exp", ActionDomain(1), np.exp, np.exp, np.exp, (-2.0, 0.0, 1.5))


def exp_coupled() -> ConvexSpec:
    """``phi(x) = exp(x1 + x2)`` on R^2 (convex, not additively separable)."""

    def value(m):
        return np.exp(m[0] + m[1])

    def grad(m):
        e = np.exp(m[0] + m[1])
        return np.stack([e, e])

    def hess(m):
        e = np.exp(m[0] + m[1])
        return np.stack([np.stack([e, e]), np.stack([e, e])])

    return ConvexSpec("exp_coupled", 2, ActionDomain(2), value, grad, hess, ((0.0, 0.0), (-1.0, 0.5)))


def phi_b(b: float) -> ConvexSpec:
    """Generator on (-inf, 0) with ``phi'(x) = (-x)^(-b)`` and ``phi''(x) = b (-x)^(-b-1)``.

    ``phi_1(x) = -log(-x)`` and ``phi_b(x) = (-x)^(1-b) / (b-1)`` otherwise.
    """
    b = float(b)
    if not b > 0:
        raise DomainError(f"phi_b needs b > 0, got {b}")
    dom = halfline(upper=0.0, upper_closed=False)
    if b == 1.0:
        f = lambda x: -np.log(-x)  # noqa: E731
    else:
        f = lambda x: (-x) ** (1.0 - b) / (b - 1.0)  # noqa: E731
    return _scalar(
        f"phi_b({b:g})",
        dom,
        f,
        lambda x: (-x) ** (-b),
        lambda x: b * (-x) ** (-b - 1.0),
        (-3.0, -1.0, -0.4),
    )


def psi_b(b: float, d1: float = 1.0, d0: float = 0.0, d2: float = 0.0) -> ConvexSpec:
    """Generator on (0, inf) whose Bregman score is homogeneous of degree ``b``.

    ``d0 + d1 y^b / (b (b-1))`` in general, ``d0 + d1 y log y + d2 y`` for
    ``b = 1`` and ``d0 - d1 log y + d2 y`` for ``b = 0``.
    """
    b = float(b)
    if not d1 > 0:
        raise DomainError("psi_b needs d1 > 0")
    dom = halfline(lower=0.0, lower_closed=False)
    if b == 1.0:
        f = lambda y: d0 + d1 * y * np.log(y) + d2 * y  # noqa: E731
        f1 = lambda y: d1 * (np.log(y) + 1.0) + d2  # noqa: E731
        f2 = lambda y: d1 / y  # noqa: E731
    elif b == 0.0:
        f = lambda y: d0 - d1 * np.log(y) + d2 * y  # noqa: E731
        f1 = lambda y: -d1 / y + d2  # noqa: E731
        f2 = lambda y: d1 / y**2  # noqa: E731
    else:
        f = lambda y: d0 + d1 * y**b / (b * (b - 1.0))  # noqa: E731
        f1 = lambda y: d1 * y ** (b - 1.0) / (b - 1.0)  # noqa: E731
        f2 = lambda y: d1 * y ** (b - 2.0)  # noqa: E731
    return _scalar(f"psi_b({b:g})", dom, f, f1, f2, (0.3, 1.0, 2.5))


def separable(parts) -> ConvexSpec:
    """``phi(x) = sum_m phi_m(x_m)`` from scalar generators ``phi_m``."""
    parts = tuple(parts)
    k = len(parts)
    for p in parts:
        if p.dim != 1:
            raise DomainError("separable generators are built from scalar parts")

    def value(m):
        m = np.asarray(m, float)
        return sum(p.value(m[i : i + 1]) for i, p in enumerate(parts))

    def grad(m):
        m = np.asarray(m, float)
        return np.stack([p.gradient(m[i : i + 1])[0] for i, p in enumerate(parts)])

    def hess(m):
        m = np.asarray(m, float)
        out = np.zeros((k, k) + m.shape[1:])
        for i, p in enumerate(parts):
            out[i, i] = p.hessian(m[i : i + 1])[0, 0]
        return out

    def inside(X, strict):
        return np.all([p.domain.mask(X[i : i + 1], strict) for i, p in enumerate(parts)], axis=0)

    probes = tuple(zip(*[[q[0] for q in p.probes] for p in parts]))
    dom = PredicateDomain(k, inside, " x ".join(p.name for p in parts))
    name = "separable(" + ", ".join(p.name for p in parts) + ")"
    return ConvexSpec(name, k, dom, value, grad, hess, probes)


def _mv_region(X, strict):
    return X[0] ** 2 < X[1] if strict else X[0] ** 2 <= X[1]


def mv_inverse() -> ConvexSpec:
    """``phi(m1, m2) = 1 / (m2 - m1^2)`` on ``{m1^2 < m2}``."""

    def value(m):
        return 1.0 / (m[1] - m[0] ** 2)

    def grad(m):
        u = m[1] - m[0] ** 2
        return np.stack([2.0 * m[0] / u**2, -1.0 / u**2])

    def hess(m):
        u = m[1] - m[0] ** 2
        h11 = 2.0 * (m[1] + 3.0 * m[0] ** 2) / u**3
        h12 = -4.0 * m[0] / u**3
        h22 = 2.0 / u**3
        return np.stack([np.stack([h11, h12]), np.stack([h12, h22])])

    dom = PredicateDomain(2, lambda X, strict: X[0] ** 2 < X[1], "m1^2 < m2")
    return ConvexSpec("mv_inverse", 2, dom, value, grad, hess, ((0.0, 1.0), (1.0, 3.0), (-0.5, 0.5)))


def mv_quadratic() -> ConvexSpec:
    """``phi(m1, m2) = (m1^2 + m2^2) / 2`` restricted to ``{m1^2 <= m2}``."""
    q = quadratic(2)
    dom = PredicateDomain(2, _mv_region, "m1^2 <= m2")
    return ConvexSpec("mv_quadratic", 2, dom, q.value, q.gradient, q.hessian, ((0.0, 1.0), (1.0, 3.0)))


def from_name(name: str, **kw) -> ConvexSpec:
    table = {
        "quadratic": lambda: quadratic(kw.get("k", 1)),
        "exp": exponential,
        "exp_coupled": exp_coupled,
        "inverse": mv_inverse,
        "mv_inverse": mv_inverse,
        "mv_quadratic": mv_quadratic,
    }
    if name not in table:
        raise DomainError(f"unknown convex generator {name!r}")
    return table[name]()


__all__ = [
    "ConvexSpec",
    "quadratic",
    "quadratic_form",
    "exponential",
    "exp_coupled",
    "phi_b",
    "psi_b",
    "separable",
    "mv_inverse",
    "mv_quadratic",
    "from_name",
]
