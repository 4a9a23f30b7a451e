"""Dense complex polynomials and truncated power series.

Polynomials are stored as coefficient arrays in the monomial basis, index
``m`` holding the coefficient of ``z**m``.  Power series carry a center and
a fixed number of retained Taylor coefficients; they exist mainly so the
Taylor coefficients of ``1/Q_p`` can be computed by plain series division
and compared against the closed form in :mod:`hermat.hermite`.
"""

from __future__ import annotations

import cmath
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "PowerSeries",
    "SingularSeriesError",
    "poly_eval",
    "poly_mul",
    "poly_add",
    "poly_derivative",
    "series_mul",
    "series_reciprocal",
    "taylor_shift",
]

TRIM_RTOL = 1e-14


class SingularSeriesError(ZeroDivisionError):
    """Raised when a series with vanishing constant term is inverted."""


def _as_finite_complex(z) -> complex:
    z = complex(z)
    if not (cmath.isfinite(z)):
        raise ValueError(f"non-finite complex value {z!r}")
    return z


def _trim(c: np.ndarray) -> np.ndarray:
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    k = c.size - 1
    while k > 0 and abs(c[k]) < TRIM_RTOL * scale:
        k -= 1
    return c[: k + 1]


class Polynomial:
    """Immutable polynomial with complex coefficients (lowest degree first).

    Construction normalizes: trailing coefficients smaller than
    ``1e-14 * max|c|`` are dropped, and an all-zero input becomes ``[0]``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c = _trim(c).copy()
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: complex) -> "Polynomial":
        return cls([value])

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls([0.0, 1.0])

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "Polynomial":
        """Monic polynomial ``prod (z - r)`` over the given roots."""
        out = cls([1.0])
        for r in roots:
            out = poly_mul(out, cls([-complex(r), 1.0]))
        return out

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        if self._c.size == 1 and self._c[0] == 0:
            return -1
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self.degree == -1

    def __call__(self, z: complex) -> complex:
        return poly_eval(self, z)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, other)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, -other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._c)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return Polynomial(self._c * complex(other))

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return poly_derivative(self)

    def __len__(self) -> int:
        return self._c.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def __repr__(self) -> str:
        return f"Polynomial({self._c.tolist()!r})"


def poly_eval(p: Polynomial, z: complex) -> complex:
    """Evaluate ``p`` at ``z`` by Horner's rule."""
    z = complex(z)
    acc = 0j
    for c in p.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero() or b.is_zero():
        return Polynomial([0.0])
    return Polynomial(np.convolve(a.coeffs, b.coeffs))


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    n = max(len(a), len(b))
    c = np.zeros(n, dtype=complex)
    c[: len(a)] += a.coeffs
    c[: len(b)] += b.coeffs
    return Polynomial(c)


def poly_derivative(p: Polynomial) -> Polynomial:
    if len(p) == 1:
        return Polynomial([0.0])
    m = np.arange(1, len(p))
    return Polynomial(p.coeffs[1:] * m)


class PowerSeries:
    """Truncated Taylor series ``sum c[n] * (z - center)**n``, ``n < order``."""

    __slots__ = ("center", "_c")

    def __init__(self, center: complex, coeffs: Iterable[complex]):
        self.center = _as_finite_complex(center)
        c = np.array(list(coeffs), dtype=complex)
        if c.size == 0:
            raise ValueError("a power series needs at least one coefficient")
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size

    def __repr__(self) -> str:
        return f"PowerSeries(center={self.center!r}, coeffs={self._c.tolist()!r})"


def series_mul(s: PowerSeries, t: PowerSeries) -> PowerSeries:
    """Truncated Cauchy product; the order is the smaller of the two."""
    if s.center != t.center:
        raise ValueError("series must share a center")
    n = min(s.order, t.order)
    return PowerSeries(s.center, np.convolve(s.coeffs[:n], t.coeffs[:n])[:n])


def series_reciprocal(s: PowerSeries) -> PowerSeries:
    """Series ``t`` with ``s * t = 1`` through ``s.order`` terms."""
    s0 = s.coeffs[0]
    if s0 == 0:
        raise SingularSeriesError("constant term of the series is zero")
    c = s.coeffs
    t = np.zeros(s.order, dtype=complex)
    t[0] = 1.0 / s0
    for n in range(1, s.order):
        t[n] = -np.dot(c[1 : n + 1], t[n - 1 :: -1][:n]) / s0
    return PowerSeries(s.center, t)


def taylor_shift(p: Polynomial, center: complex, order: int | None = None) -> PowerSeries:
    """Re-expand ``p`` around ``center`` (repeated synthetic division)."""
    center = _as_finite_complex(center)
    c = np.array(p.coeffs, dtype=complex)
    n = c.size
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += center * c[j + 1]
    if order is None:
        order = n
    out = np.zeros(order, dtype=complex)
    m = min(order, n)
    out[:m] = c[:m]
    return PowerSeries(center, out)
