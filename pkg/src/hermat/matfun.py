"""Matrix functions, spectral projectors and the Jordan split.

Everything is evaluated in centered form: ``Q_p(A)`` is formed once per
root as a product of shifted factors and multiplied by powers of
``A - a_p I``.  The expanded monomial interpolant is never substituted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .annihilator import AnnihilatorSpec, verify_annihilates
from .hermite import EntireFunction, hermite_interpolant, taylor_coeffs_closed_form
from .poly import Polynomial

__all__ = [
    "AnnihilationError",
    "InvariantWarning",
    "SpectralDecomposition",
    "apply_function",
    "as_matrix",
    "cofactor_at",
    "jordan_parts",
    "mat_poly_eval",
    "spectral_decomposition",
]

ANNIHILATION_RTOL = 1e-8


class AnnihilationError(ValueError):
    """``Q(A)`` is not small enough for the spec to be trusted."""

    def __init__(self, residual: float, bound: float, spec: AnnihilatorSpec):
        super().__init__(
            f"spec does not annihilate the matrix: |Q(A)|_F = {residual:.3e} > {bound:.3e}"
        )
        self.residual = residual
        self.bound = bound
        self.spec = spec


class InvariantWarning(UserWarning):
    """A projector identity failed its tolerance (poorly conditioned spec)."""


def as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def annihilation_bound(A: np.ndarray, spec: AnnihilatorSpec, rtol: float = ANNIHILATION_RTOL) -> float:
    return rtol * (1.0 + float(np.linalg.norm(A))) ** spec.d


def check_annihilates(A: np.ndarray, spec: AnnihilatorSpec, rtol: float = ANNIHILATION_RTOL) -> float:
    """Residual ``|Q(A)|_F``; raises :class:`AnnihilationError` above the bound."""
    residual = verify_annihilates(A, spec)
    bound = annihilation_bound(A, spec, rtol)
    if not residual <= bound:
        raise AnnihilationError(residual, bound, spec)
    return residual


def mat_poly_eval(p: Polynomial, A) -> np.ndarray:
    """``p(A)`` by Horner's rule."""
    A = as_matrix(A)
    eye = np.eye(A.shape[0], dtype=complex)
    c = p.coeffs
    out = c[-1] * eye
    for coef in c[-2::-1]:
        out = out @ A + coef * eye
    return out


def cofactor_at(A: np.ndarray, spec: AnnihilatorSpec, p: int) -> np.ndarray:
    """``Q_p(A)`` as a product of shifted factors."""
    eye = np.eye(A.shape[0], dtype=complex)
    out = eye
    for j, (a, alpha) in enumerate(spec.roots):
        if j == p:
            continue
        shifted = A - a * eye
        for _ in range(alpha + 1):
            out = out @ shifted
    return out


def _centered_sum(A: np.ndarray, spec: AnnihilatorSpec, p: int, coeffs, qp_A: np.ndarray,
                  shift: int = 0) -> np.ndarray:
    """``sum_q coeffs[q] (A - a_p)**(q + shift) Q_p(A)``."""
    eye = np.eye(A.shape[0], dtype=complex)
    shifted = A - spec.roots[p][0] * eye
    power = qp_A
    for _ in range(shift):
        power = shifted @ power
    out = np.zeros_like(A)
    for q, c in enumerate(coeffs):
        if q:
            power = shifted @ power
        out += c * power
    return out


def apply_function(f: EntireFunction, A, spec: AnnihilatorSpec, *, check: bool = True,
                   rtol: float = ANNIHILATION_RTOL) -> np.ndarray:
    """``f(A)`` as the Hermite interpolant of ``f`` on ``spec`` evaluated at ``A``."""
    A = as_matrix(A)
    if check:
        check_annihilates(A, spec, rtol)
    interp = hermite_interpolant(f, spec)
    out = np.zeros_like(A)
    for p, cp in enumerate(interp.terms):
        out += _centered_sum(A, spec, p, cp, cofactor_at(A, spec, p))
    return out


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Projectors ``E_p`` and nilpotents ``N_p`` of ``A`` for each root of the spec.

    ``deviations`` maps each checked identity to its measured error and
    ``bounds`` to the tolerance it was held against.
    """

    spec: AnnihilatorSpec
    A: np.ndarray = field(repr=False)
    projectors: tuple[np.ndarray, ...] = field(repr=False)
    nilpotents: tuple[np.ndarray, ...] = field(repr=False)
    S: np.ndarray = field(repr=False)
    N: np.ndarray = field(repr=False)
    annihilation_residual: float
    deviations: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    vacuous_roots: tuple[int, ...] = ()

    def worst_ratio(self) -> float:
        """Largest ``deviation / bound`` over the checked identities."""
        return max((self.deviations[k] / self.bounds[k] for k in self.deviations), default=0.0)

    def violations(self) -> list[str]:
        return [k for k in self.deviations if not self.deviations[k] <= self.bounds[k]]


def _fro(M: np.ndarray) -> float:
    return float(np.linalg.norm(M))


def _check_invariants(A, spec, E, Nil, S, N):
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    norm_a = _fro(A)
    dev: dict[str, float] = {}
    bnd: dict[str, float] = {}

    dev["sum_projectors"] = _fro(sum(E) - eye)
    bnd["sum_projectors"] = 1e-8 * n

    e_norm = max(_fro(e) for e in E)
    worst = 0.0
    for p in range(len(E)):
        for q in range(len(E)):
            target = E[p] if p == q else 0.0
            worst = max(worst, _fro(E[p] @ E[q] - target))
    dev["projector_products"] = worst
    bnd["projector_products"] = 1e-8 * n * (1.0 + e_norm) ** 2

    nil_dev, nil_bnd = 0.0, 0.0
    ratio = 0.0
    for (_, alpha), Np in zip(spec.roots, Nil):
        size = _fro(Np)
        dev_p = _fro(np.linalg.matrix_power(Np, alpha + 1))
        # noise-level N_p (diagonalizable block) falls back to an absolute bound
        bound_p = 1e-7 * max(size ** (alpha + 1), 1.0)
        if dev_p / bound_p >= ratio:
            ratio, nil_dev, nil_bnd = dev_p / bound_p, dev_p, bound_p
    dev["nilpotency"] = nil_dev
    bnd["nilpotency"] = nil_bnd

    scale = 1e-8 * max(norm_a, 1.0)
    dev["reconstruction"] = _fro(S + N - A)
    bnd["reconstruction"] = scale
    dev["sn_commute"] = _fro(S @ N - N @ S)
    bnd["sn_commute"] = scale
    dev["projector_commute"] = max(_fro(e @ A - A @ e) for e in E)
    bnd["projector_commute"] = scale * max(e_norm, 1.0)
    return dev, bnd


def spectral_decomposition(A, spec: AnnihilatorSpec, *, check: bool = True,
                           rtol: float = ANNIHILATION_RTOL) -> SpectralDecomposition:
    """``E_p`` and ``N_p`` from the Taylor coefficients of ``1/Q_p``.

    E_p = sum_{q <= alpha_p}     b[p][q] (A - a_p)**q     Q_p(A)
    N_p = sum_{q <= alpha_p - 1} b[p][q] (A - a_p)**(q+1) Q_p(A)

    The projector identities are measured afterwards; failures raise an
    :class:`InvariantWarning` rather than an error.
    """
    A = as_matrix(A)
    residual = check_annihilates(A, spec, rtol) if check else verify_annihilates(A, spec)
    n = A.shape[0]
    E, Nil = [], []
    for p, (a_p, alpha) in enumerate(spec.roots):
        b = taylor_coeffs_closed_form(spec, p, alpha)
        qp_A = cofactor_at(A, spec, p)
        E.append(_centered_sum(A, spec, p, b, qp_A))
        if alpha == 0:
            Nil.append(np.zeros((n, n), dtype=complex))
        else:
            Nil.append(_centered_sum(A, spec, p, b[:alpha], qp_A, shift=1))
    S = sum(a * e for (a, _), e in zip(spec.roots, E))
    N = sum(Nil)
    dev, bnd = _check_invariants(A, spec, E, Nil, S, N)
    vacuous = tuple(p for p, e in enumerate(E) if _fro(e) <= 1e-8 * n)
    dec = SpectralDecomposition(spec, A, tuple(E), tuple(Nil), S, N, residual, dev, bnd, vacuous)
    bad = dec.violations()
    if bad:
        warnings.warn(
            "projector identities off tolerance: "
            + ", ".join(f"{k}={dev[k]:.3e} (bound {bnd[k]:.3e})" for k in bad),
            InvariantWarning,
            stacklevel=2,
        )
    return dec


def jordan_parts(dec: SpectralDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Semisimple and nilpotent parts ``(S, N)`` with ``A = S + N``."""
    return dec.S, dec.N

