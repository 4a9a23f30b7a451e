import math

import pytest

from hermat.quadrature import QuadratureError, adaptive_gauss_legendre


def test_polynomials_are_exact_on_one_panel():
    # 7 nodes integrate degree 13 exactly
    assert adaptive_gauss_legendre(lambda y: y**13 + 1, 0.0, 1.0) == pytest.approx(1 + 1 / 14, abs=1e-15)


@pytest.mark.parametrize("f,a,b,ref", [
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, -1.0, 2.0, math.e**2 - math.exp(-1)),
    (lambda y: 1 / (1 + 25 * y * y), -1.0, 1.0, 0.4 * math.atan(5)),
    (lambda y: y**1.5, 0.0, 1.0, 0.4),
])
def test_reference_integrals(f, a, b, ref):
    assert abs(adaptive_gauss_legendre(f, a, b, 1e-12) - ref) <= 1e-10


def test_complex_and_signed():
    val = adaptive_gauss_legendre(lambda y: complex(math.cos(y), math.sin(y)), 0.0, math.pi / 2)
    assert val == pytest.approx(1 + 1j, abs=1e-13)
    assert adaptive_gauss_legendre(math.exp, 1.0, 0.0) == pytest.approx(1 - math.e, abs=1e-13)
    assert adaptive_gauss_legendre(math.exp, 1.0, 1.0) == 0


def test_non_convergence_reports_estimate():
    with pytest.raises(QuadratureError) as info:
        adaptive_gauss_legendre(lambda y: math.exp(30 * y), 0.0, 1.0, tol=1e-300)
    err = info.value
    assert err.achieved > 0
    # the unrefined right-hand panels limit the estimate's accuracy
    assert err.estimate.real == pytest.approx(math.expm1(30) / 30, rel=1e-3)


def test_rejects_bad_tol():
    with pytest.raises(ValueError):
        adaptive_gauss_legendre(math.exp, 0, 1, tol=0)
