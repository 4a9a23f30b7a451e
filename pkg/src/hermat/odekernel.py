"""Kernel functions for ``Q(d/dt) u = h`` and the resulting IVP solver.

Writing the interpolant of ``z -> exp(tz)`` in powers of ``z`` gives

    P(e^{tz}, z) = g_{d-1}(t) z^{d-1} + ... + g_1(t) z + g_0(t),

and each ``g_j`` is an exponential-polynomial ``sum_p e^{a_p t} r_{p,j}(t)``.
The solution of the initial-value problem is then

    u(t) = sum_j u^(j)(0) g_j(t) + int_0^t g_{d-1}(t - y) h(y) dy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .annihilator import SEPARATION_RTOL, AnnihilatorSpec, build_q, cofactor
from .hermite import taylor_coeffs_closed_form
from .poly import Polynomial, poly_add, poly_derivative, poly_eval, poly_mul
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "ExpPoly",
    "IVProblem",
    "apply_operator",
    "exppoly_derivative",
    "exppoly_eval",
    "kernel_basis",
    "parse_forcing",
    "solve_ivp",
]


@dataclass(frozen=True, init=False)
class ExpPoly:
    """``t -> sum e^{a t} r(t)`` over ``terms = ((a, r), ...)`` with distinct ``a``."""

    terms: tuple[tuple[complex, Polynomial], ...]

    def __init__(self, terms: Sequence[tuple[complex, Polynomial]] = ()):
        object.__setattr__(self, "terms", _merge(terms))

    def __call__(self, t: float) -> complex:
        return exppoly_eval(self, t)

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly(self.terms + other.terms)

    def scale(self, c: complex) -> "ExpPoly":
        return ExpPoly([(a, r * c) for a, r in self.terms])

    def max_coeff(self) -> float:
        return max((float(np.max(np.abs(r.coeffs))) for _, r in self.terms), default=0.0)


def _merge(terms) -> tuple[tuple[complex, Polynomial], ...]:
    out: list[tuple[complex, Polynomial]] = []
    for a, r in terms:
        a = complex(a)
        for i, (b, s) in enumerate(out):
            if abs(a - b) <= SEPARATION_RTOL * (1.0 + abs(a)):
                out[i] = (b, poly_add(s, r))
                break
        else:
            out.append((a, r))
    return tuple((a, r) for a, r in out if not r.is_zero())


def exppoly_eval(g: ExpPoly, t: float) -> complex:
    return sum((cmath.exp(a * t) * poly_eval(r, t) for a, r in g.terms), 0j)


def exppoly_derivative(g: ExpPoly) -> ExpPoly:
    """Termwise ``(a, r) -> (a, r' + a r)``."""
    return ExpPoly([(a, poly_add(poly_derivative(r), r * a)) for a, r in g.terms])


def apply_operator(q: Polynomial, g: ExpPoly) -> ExpPoly:
    """``q(d/dt) g`` formed symbolically."""
    out = ExpPoly()
    deriv = g
    for m, c in enumerate(q.coeffs):
        if m:
            deriv = exppoly_derivative(deriv)
        if c != 0:
            out = out + deriv.scale(c)
    return out


def kernel_basis(spec: AnnihilatorSpec) -> list[ExpPoly]:
    """``[g_0, ..., g_{d-1}]`` for the given spec."""
    d = spec.d
    parts: list[list[tuple[complex, Polynomial]]] = [[] for _ in range(d)]
    for p, (a_p, alpha) in enumerate(spec.roots):
        b = taylor_coeffs_closed_form(spec, p, alpha)
        # monomial coefficients of (z - a_p)^q Q_p(z), one row per q
        rows = np.zeros((alpha + 1, d), dtype=complex)
        term = cofactor(spec, p)
        for q in range(alpha + 1):
            if q:
                term = poly_mul(term, Polynomial([-a_p, 1.0]))
            rows[q, : len(term)] = term.coeffs
        # t^j coefficient of r_{p,m}: (1/j!) sum_{q >= j} b[q - j] rows[q, m]
        r = np.zeros((alpha + 1, d), dtype=complex)
        for j in range(alpha + 1):
            for q in range(j, alpha + 1):
                r[j] += b[q - j] * rows[q]
            r[j] /= math.factorial(j)
        for m in range(d):
            parts[m].append((a_p, Polynomial(r[:, m])))
    return [ExpPoly(terms) for terms in parts]


_NAMED_FORCING: dict[str, Callable[[float], complex]] = {
    "cos": lambda y: complex(math.cos(y)),
    "sin": lambda y: complex(math.sin(y)),
}


def parse_forcing(selector: str) -> Callable[[float], complex] | None:
    """Forcing oracle from a selector; ``None`` means zero forcing.

    Accepted: ``zero``, ``const:<re,im>``, ``cos``, ``sin``,
    ``exp:<re,im>`` (``y -> e^{(re + i im) y}``), ``poly:<c0,c1,...>``.
    """
    if selector == "zero":
        return None
    if selector in _NAMED_FORCING:
        return _NAMED_FORCING[selector]
    head, sep, arg = selector.partition(":")
    if sep and head in ("const", "exp"):
        parts = arg.split(",")
        if len(parts) != 2:
            raise ValueError(f"{head} forcing needs <re,im>, got {arg!r}")
        c = complex(float(parts[0]), float(parts[1]))
        if head == "const":
            return lambda y: c
        return lambda y: cmath.exp(c * y)
    if sep and head == "poly" and arg:
        p = Polynomial([complex(s.strip()) for s in arg.split(",")])
        return lambda y: poly_eval(p, y)
    raise ValueError(f"unknown forcing selector {selector!r}")


@dataclass(frozen=True, eq=False)
class IVProblem:
    """``Q(d/dt) u = h`` with ``u^(j)(0) = init[j]`` for ``j < d``.

    ``forcing=None`` is the homogeneous problem and skips quadrature.
    """

    spec: AnnihilatorSpec
    init: tuple[complex, ...]
    forcing: Callable[[float], complex] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "init", tuple(complex(c) for c in self.init))
        if len(self.init) != self.spec.d:
            raise ValueError(f"need {self.spec.d} initial values, got {len(self.init)}")

    @cached_property
    def kernels(self) -> list[ExpPoly]:
        return kernel_basis(self.spec)

    @cached_property
    def q(self) -> Polynomial:
        return build_q(self.spec)


def solve_ivp(prob: IVProblem, t: float, quad_tol: float = 1e-10) -> complex:
    """``u(t)``; the forcing integral uses adaptive Gauss-Legendre on ``[0, t]``.

    Raises :class:`~hermat.quadrature.QuadratureError` if the integral does
    not settle.  Negative ``t`` integrates with the signed convention.
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    g = prob.kernels
    u = sum((c * exppoly_eval(gj, t) for c, gj in zip(prob.init, g) if c != 0), 0j)
    if prob.forcing is None:
        return u
    g_last = g[-1]
    h = prob.forcing
    return u + adaptive_gauss_legendre(lambda y: exppoly_eval(g_last, t - y) * h(y), 0.0, t, quad_tol)
