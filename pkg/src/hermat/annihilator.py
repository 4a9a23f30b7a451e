"""Annihilating polynomials given by their roots and multiplicities.

``Q(z) = prod_p (z - a_p)**(alpha_p + 1)`` is carried as an
:class:`AnnihilatorSpec`.  Specs are normally supplied by the caller; the
matrix-derived path (:func:`spec_from_matrix`) goes through the
characteristic polynomial and a clustered Durand-Kerner root solve, and is
lossy at repeated eigenvalues.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .poly import Polynomial, poly_derivative, poly_eval, poly_mul

__all__ = [
    "AnnihilatorSpec",
    "ConfluentRootsWarning",
    "RootFindingError",
    "build_q",
    "characteristic_polynomial",
    "cluster_roots",
    "cofactor",
    "companion",
    "durand_kerner",
    "spec_from_matrix",
    "verify_annihilates",
]

SEPARATION_RTOL = 1e-8
# specs whose closest root pair is nearer than this (relative) get a warning
CONFLUENT_WARN_RTOL = 1e-4


class ConfluentRootsWarning(UserWarning):
    """Distinct roots so close that the cofactor expansions lose accuracy."""


class RootFindingError(ArithmeticError):
    """Durand-Kerner iteration did not settle.

    ``roots`` holds the last iterate.
    """

    def __init__(self, msg: str, roots: np.ndarray):
        super().__init__(msg)
        self.roots = roots


@dataclass(frozen=True, init=False)
class AnnihilatorSpec:
    """Distinct roots ``a_p`` with exponents ``alpha_p + 1``."""

    roots: tuple[tuple[complex, int], ...]

    def __init__(self, roots: Iterable[tuple[complex, int]], *, separation_tol: float | None = None):
        entries = []
        for a, alpha in roots:
            a = complex(a)
            if not cmath.isfinite(a):
                raise ValueError(f"root {a!r} is not finite")
            if int(alpha) != alpha or alpha < 0:
                raise ValueError(f"alpha must be a nonnegative integer, got {alpha!r}")
            entries.append((a, int(alpha)))
        if not entries:
            raise ValueError("an annihilator needs at least one root")
        object.__setattr__(self, "roots", tuple(entries))

        scale = 1.0 + max(abs(a) for a, _ in entries)
        tol = SEPARATION_RTOL * scale if separation_tol is None else separation_tol
        sep = self.min_separation()
        if sep <= tol:
            raise ValueError(
                f"roots must be distinct: closest pair is {sep:.3g} apart (tolerance {tol:.3g})"
            )
        if sep < CONFLUENT_WARN_RTOL * scale:
            warnings.warn(
                f"near-confluent roots (separation {sep:.3g}); cofactor coefficients "
                "grow like separation**-(alpha+1+n)",
                ConfluentRootsWarning,
                stacklevel=2,
            )

    @property
    def k(self) -> int:
        return len(self.roots)

    @property
    def d(self) -> int:
        return sum(alpha + 1 for _, alpha in self.roots)

    @property
    def points(self) -> list[complex]:
        return [a for a, _ in self.roots]

    @property
    def alphas(self) -> list[int]:
        return [alpha for _, alpha in self.roots]

    def min_separation(self) -> float:
        pts = self.points
        if len(pts) < 2:
            return math.inf
        return min(abs(pts[i] - pts[j]) for i in range(len(pts)) for j in range(i))

    def permuted(self, order: Sequence[int]) -> "AnnihilatorSpec":
        return AnnihilatorSpec([self.roots[i] for i in order])

    def to_json(self) -> dict:
        return {"roots": [{"a": [a.real, a.imag], "alpha": alpha} for a, alpha in self.roots]}



def _linear_power(a: complex, m: int) -> Polynomial:
    out = Polynomial([1.0])
    for _ in range(m):
        out = poly_mul(out, Polynomial([-a, 1.0]))
    return out


def build_q(spec: AnnihilatorSpec) -> Polynomial:
    """Expanded monic ``Q`` of degree ``spec.d``."""
    out = Polynomial([1.0])
    for a, alpha in spec.roots:
        out = poly_mul(out, _linear_power(a, alpha + 1))
    return out


def cofactor(spec: AnnihilatorSpec, p: int) -> Polynomial:
    """``Q_p``: ``Q`` with the ``(z - a_p)**(alpha_p + 1)`` factor removed."""
    if not 0 <= p < spec.k:
        raise IndexError(f"root index {p} out of range for k={spec.k}")
    out = Polynomial([1.0])
    for j, (a, alpha) in enumerate(spec.roots):
        if j != p:
            out = poly_mul(out, _linear_power(a, alpha + 1))
    return out


def companion(q: Polynomial) -> np.ndarray:
    """Companion matrix of monic ``q``; its characteristic polynomial is ``q``."""
    c = np.asarray(q.coeffs, dtype=complex) / q.coeffs[-1]
    n = c.size - 1
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1]
    return C


def verify_annihilates(A: np.ndarray, spec: AnnihilatorSpec) -> float:
    """Frobenius norm of ``Q(A)`` formed as a product of shifted factors."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    out = eye
    for a, alpha in spec.roots:
        shifted = A - a * eye
        for _ in range(alpha + 1):
            out = out @ shifted
    return float(np.linalg.norm(out))


def characteristic_polynomial(A: np.ndarray) -> Polynomial:
    """Monic ``det(zI - A)`` by the Faddeev-LeVerrier recurrence."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    eye = np.eye(n, dtype=complex)
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + c[n - k + 1] * eye
        c[n - k] = -np.trace(A @ M) / k
    return Polynomial(c)


def _horner_with_bound(c: np.ndarray, z: complex) -> tuple[complex, float]:
    val = 0j
    bound = 0.0
    az = abs(z)
    for coef in c[::-1]:
        val = val * z + coef
        bound = bound * az + abs(coef)
    return val, bound


def durand_kerner(p: Polynomial, max_iter: int = 500) -> np.ndarray:
    """All roots of ``p`` by simultaneous Weierstrass iteration.

    Stops when the largest update is below ``1e-13 * (1 + max|z|)``, or when
    every iterate is a root to within the rounding noise of Horner
    evaluation (the only reachable state for multiple roots).
    """
    if p.degree < 1:
        raise ValueError("need a polynomial of degree at least one")
    c = np.asarray(p.coeffs, dtype=complex) / p.coeffs[-1]
    n = c.size - 1
    if n == 1:
        return np.array([-c[0]])
    # Cauchy bound for the starting radius
    radius = 1.0 + float(np.max(np.abs(c[:-1])))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = 0.5 * radius * np.exp(1j * angles)
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        new = z.copy()
        noise_level = True
        for i in range(n):
            val, bound = _horner_with_bound(c, new[i])
            if abs(val) > 8.0 * n * eps * bound:
                noise_level = False
            denom = np.prod(new[i] - np.delete(new, i))
            if denom == 0:
                denom = eps * (1.0 + abs(new[i]))
            new[i] = new[i] - val / denom
        step = float(np.max(np.abs(new - z)))
        z = new
        if step < 1e-13 * (1.0 + float(np.max(np.abs(z)))) or noise_level:
            return z
    raise RootFindingError(f"Durand-Kerner did not converge in {max_iter} iterations", z)


def cluster_roots(roots: Sequence[complex], tol: float) -> list[tuple[complex, int]]:
    """Merge roots closer than ``tol`` (single linkage) into ``(mean, alpha)``."""
    roots = [complex(r) for r in roots]
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i):
            if abs(roots[i] - roots[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, r in enumerate(roots):
        groups.setdefault(find(i), []).append(r)
    out = [(sum(g) / len(g), len(g) - 1) for g in groups.values()]
    out.sort(key=lambda e: (round(e[0].real, 9), round(e[0].imag, 9)))
    return out


def _polish(p: Polynomial, z: complex, m: int, radius: float) -> complex:
    """Newton on ``p^(m-1)``, where an m-fold root of ``p`` is simple.

    Falls back to ``z`` if the iteration leaves the cluster radius.
    """
    if m == 1:
        return z
    f = p
    for _ in range(m - 1):
        f = poly_derivative(f)
    df = poly_derivative(f)
    w = z
    for _ in range(8):
        slope = poly_eval(df, w)
        if slope == 0:
            break
        step = poly_eval(f, w) / slope
        w -= step
        if abs(step) <= 4 * np.finfo(float).eps * (1.0 + abs(w)):
            break
    return w if abs(w - z) <= radius else z


def spec_from_matrix(A: np.ndarray, cluster_tol: float = 1e-6) -> AnnihilatorSpec:
    """Annihilator of ``A`` from its characteristic polynomial.

    ``cluster_tol`` is scaled by ``1 + max|root|``.  Multiplicities can
    exceed those of the minimal polynomial, which is harmless.
    """
    charpoly = characteristic_polynomial(A)
    if charpoly.degree < 1:
        raise ValueError("empty matrix")
    roots = durand_kerner(charpoly)
    tol = cluster_tol * (1.0 + float(np.max(np.abs(roots))))
    entries = [(_polish(charpoly, a, alpha + 1, tol), alpha) for a, alpha in cluster_roots(roots, tol)]
    # single linkage leaves clusters more than tol apart
    return AnnihilatorSpec(entries, separation_tol=min(tol, SEPARATION_RTOL))
