"""Matrix functions, spectral projectors and linear ODE kernels from Hermite
interpolation on the roots of an annihilating polynomial."""

from .annihilator import (
    AnnihilatorSpec,
    build_q,
    characteristic_polynomial,
    cofactor,
    spec_from_matrix,
    verify_annihilates,
)
from .hermite import (
    EntireFunction,
    HermiteInterpolant,
    exp,
    exp_scaled,
    hermite_interpolant,
    taylor_coeffs_closed_form,
    taylor_coeffs_series,
)
from .matfun import (
    AnnihilationError,
    SpectralDecomposition,
    apply_function,
    jordan_parts,
    mat_poly_eval,
    spectral_decomposition,
)
from .odekernel import ExpPoly, IVProblem, kernel_basis, solve_ivp
from .poly import Polynomial, PowerSeries

__version__ = "0.1.0"
