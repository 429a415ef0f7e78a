from __future__ import annotations

import math

import pytest
from scipy.integrate import quad

from brodylab.constants import elliptic_integral, torus_constant


def test_torus_constant_value():
    rep = torus_constant()
    assert rep.value == pytest.approx(0.6150198678198, abs=1e-9)
    assert rep.error_estimate < 1e-12


def test_integral_is_consistent_with_constant():
    rep = torus_constant()
    implied = math.sqrt(2 * math.pi / (math.sqrt(3) * 0.6150198678198))
    assert rep.integral == pytest.approx(implied, rel=1e-12)
    assert rep.integral == pytest.approx(2.42865, abs=1e-5)


def test_integral_matches_library_quadrature():
    # split at 2: algebraic endpoint weight on [1, 2], plain tail beyond
    near, _ = quad(lambda x: 1 / math.sqrt(x * x + x + 1), 1, 2, weight="alg", wvar=(-0.5, 0), epsabs=1e-14, epsrel=1e-14)
    far, _ = quad(lambda x: 1 / math.sqrt(x**3 - 1), 2, math.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    ref = near + far
    val, err, _ = elliptic_integral()
    assert val == pytest.approx(ref, rel=1e-10)
    assert err < 1e-13


def test_doubling_is_converged():
    assert torus_constant().doubling_change < 1e-11
