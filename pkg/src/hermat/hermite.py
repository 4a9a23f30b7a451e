"""Hermite interpolation of entire functions on the roots of ``Q``.

For a spec ``Q = prod (z - a_p)**(alpha_p + 1)`` the interpolant of ``f`` is

    P(z) = sum_p sum_{q <= alpha_p} c[p][q] * (z - a_p)**q * Q_p(z),
    c[p][q] = sum_{j <= q} f^(j)(a_p) / j! * b[p][q - j],

where ``b[p][n]`` is the n-th Taylor coefficient of ``1/Q_p`` at ``a_p``.
Those coefficients have a closed form as a sum over compositions of ``n``
(:func:`taylor_coeffs_closed_form`); :func:`taylor_coeffs_series` gets them
by series division instead and is kept as an independent check.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .annihilator import AnnihilatorSpec, cofactor
from .poly import (
    Polynomial,
    PowerSeries,
    poly_add,
    poly_derivative,
    poly_eval,
    poly_mul,
    series_mul,
    series_reciprocal,
)

__all__ = [
    "EntireFunction",
    "HermiteInterpolant",
    "compositions",
    "cos",
    "cosh",
    "exp",
    "exp_scaled",
    "hermite_interpolant",
    "parse_function",
    "polynomial",
    "sin",
    "sinh",
    "taylor_coeffs_closed_form",
    "taylor_coeffs_series",
]


@dataclass(frozen=True)
class EntireFunction:
    """An entire function known through its derivatives.

    ``deriv(j, a)`` must return ``f^(j)(a)`` for every ``j >= 0``.
    """

    name: str
    deriv: Callable[[int, complex], complex] = field(repr=False)

    def derivative_at(self, j: int, a: complex) -> complex:
        if j < 0:
            raise ValueError("derivative order must be nonnegative")
        return complex(self.deriv(j, complex(a)))

    def __call__(self, a: complex) -> complex:
        return self.derivative_at(0, a)


def exp_scaled(t: float) -> EntireFunction:
    """``z -> exp(t z)``; the j-th derivative is ``t**j exp(t a)``."""
    t = float(t)
    return EntireFunction(f"exp:t={t!r}", lambda j, a: t**j * cmath.exp(t * a))


exp = EntireFunction("exp", lambda j, a: cmath.exp(a))
# derivatives of sin/cos cycle with period 4, sinh/cosh with period 2
sin = EntireFunction("sin", lambda j, a: (cmath.sin, cmath.cos, lambda x: -cmath.sin(x),
                                         lambda x: -cmath.cos(x))[j % 4](a))
cos = EntireFunction("cos", lambda j, a: (cmath.cos, lambda x: -cmath.sin(x),
                                         lambda x: -cmath.cos(x), cmath.sin)[j % 4](a))
sinh = EntireFunction("sinh", lambda j, a: (cmath.sinh, cmath.cosh)[j % 2](a))
cosh = EntireFunction("cosh", lambda j, a: (cmath.cosh, cmath.sinh)[j % 2](a))


def polynomial(p: Polynomial | Sequence[complex]) -> EntireFunction:
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    derivs = [p]
    for _ in range(max(p.degree, 0)):
        derivs.append(poly_derivative(derivs[-1]))

    def deriv(j: int, a: complex) -> complex:
        return poly_eval(derivs[j], a) if j < len(derivs) else 0j

    return EntireFunction("poly:" + ",".join(repr(complex(c)) for c in p.coeffs), deriv)


_NAMED = {"exp": exp, "sin": sin, "cos": cos, "sinh": sinh, "cosh": cosh}


def parse_function(selector: str) -> EntireFunction:
    """Function from a selector string.

    Accepted: ``exp``, ``exp:t=<real>``, ``sin``, ``cos``, ``sinh``, ``cosh``,
    ``poly:<c0,c1,...>`` (coefficients are Python complex literals).
    """
    if selector in _NAMED:
        return _NAMED[selector]
    head, sep, arg = selector.partition(":")
    if sep and head == "exp" and arg.startswith("t="):
        return exp_scaled(float(arg[2:]))
    if sep and head == "poly" and arg:
        return polynomial([complex(c.strip()) for c in arg.split(",")])
    raise ValueError(f"unknown function selector {selector!r}")


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``n``."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    # stars and bars: choose the positions of parts - 1 separators
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield tuple(out)


def taylor_coeffs_closed_form(spec: AnnihilatorSpec, p: int, n_max: int) -> np.ndarray:
    """``b[p][0..n_max]`` from the composition-sum formula.

    b[p][n] = (-1)**n * sum over beta (indexed by j != p, |beta| = n) of
              prod_{j != p} C(alpha_j + beta_j, alpha_j) / (a_p - a_j)**(alpha_j + 1 + beta_j)
    """
    if not 0 <= p < spec.k:
        raise IndexError(f"root index {p} out of range for k={spec.k}")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    a_p = spec.roots[p][0]
    others = [(a_p - a, alpha) for j, (a, alpha) in enumerate(spec.roots) if j != p]
    out = np.zeros(n_max + 1, dtype=complex)
    if not others:
        out[0] = 1.0
        return out
    inv = [1.0 / diff for diff, _ in others]
    base = math.prod(inv[i] ** (alpha + 1) for i, (_, alpha) in enumerate(others))
    for n in range(n_max + 1):
        total = 0j
        for beta in compositions(n, len(others)):
            term = base
            for i, b in enumerate(beta):
                if b:
                    term *= math.comb(others[i][1] + b, b) * inv[i] ** b
            total += term
        out[n] = -total if n % 2 else total
    return out


def taylor_coeffs_series(spec: AnnihilatorSpec, p: int, n_max: int) -> np.ndarray:
    """``b[p][0..n_max]`` by inverting the Taylor series of ``Q_p`` at ``a_p``."""
    if not 0 <= p < spec.k:
        raise IndexError(f"root index {p} out of range for k={spec.k}")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    a_p = spec.roots[p][0]
    order = n_max + 1
    one = np.zeros(order, dtype=complex)
    one[0] = 1.0
    qp = PowerSeries(a_p, one)
    for j, (a, alpha) in enumerate(spec.roots):
        if j == p:
            continue
        # z - a_j = (a_p - a_j) + (z - a_p)
        lin = np.zeros(order, dtype=complex)
        lin[0] = a_p - a
        if order > 1:
            lin[1] = 1.0
        factor = PowerSeries(a_p, lin)
        for _ in range(alpha + 1):
            qp = series_mul(qp, factor)
    return np.array(series_reciprocal(qp).coeffs)


def _centered_term(spec: AnnihilatorSpec, p: int, q: int, qp: Polynomial) -> Polynomial:
    a_p = spec.roots[p][0]
    out = qp
    for _ in range(q):
        out = poly_mul(out, Polynomial([-a_p, 1.0]))
    return out


@dataclass(frozen=True, eq=False)
class HermiteInterpolant:
    """``P(f, z)`` kept in centered form ``sum c[p][q] (z - a_p)**q Q_p(z)``.

    ``b`` holds the Taylor coefficients of ``1/Q_p`` used to build ``terms``.
    """

    spec: AnnihilatorSpec
    terms: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...] = field(repr=False)

    @cached_property
    def expanded(self) -> Polynomial:
        total = Polynomial([0.0])
        for p, cp in enumerate(self.terms):
            qp = cofactor(self.spec, p)
            for q, c in enumerate(cp):
                if c != 0:
                    total = poly_add(total, _centered_term(self.spec, p, q, qp) * c)
        return total

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        total = 0j
        for p, cp in enumerate(self.terms):
            a_p = self.spec.roots[p][0]
            qz = math.prod(
                (z - a) ** (alpha + 1) for j, (a, alpha) in enumerate(self.spec.roots) if j != p
            )
            total += qz * sum(c * (z - a_p) ** q for q, c in enumerate(cp))
        return total


def hermite_interpolant(f: EntireFunction, spec: AnnihilatorSpec) -> HermiteInterpolant:
    terms = []
    bs = []
    for p, (a_p, alpha) in enumerate(spec.roots):
        b = taylor_coeffs_closed_form(spec, p, alpha)
        scaled = np.empty(alpha + 1, dtype=complex)
        fact = 1.0
        for j in range(alpha + 1):
            if j:
                fact *= j
            scaled[j] = f.derivative_at(j, a_p) / fact
        c = np.array([np.dot(scaled[: q + 1], b[q::-1]) for q in range(alpha + 1)])
        terms.append(c)
        bs.append(b)
    return HermiteInterpolant(spec, tuple(terms), tuple(bs))
