from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brodylab.curves import Weierstrass, constant_curve, exp_curve, spherical_derivative, sup_spherical_derivative
from brodylab.elliptic import (
    Lattice,
    brody_rescale,
    eisenstein_direct,
    hexagonal_lattice,
    wp,
    wp_and_prime,
    wp_prime,
)
from brodylab.errors import DegenerateCurve, PoleAt
from brodylab.regions import Region

LATTICES = [hexagonal_lattice(1.0), hexagonal_lattice(2.0), Lattice(1.0, 0.3 + 1.1j)]
coord = st.floats(-3, 3, allow_nan=False)
points = st.builds(complex, coord, coord)


def away_from_lattice(lat, z, margin=0.05):
    return abs(z - lat.nearest_lattice_point(z)) > margin


@pytest.mark.parametrize("lat", LATTICES, ids=["hex1", "hex2", "generic"])
@given(z=points)
def test_wp_is_even(lat, z):
    if not away_from_lattice(lat, z):
        return
    assert wp(-z, lat) == pytest.approx(wp(z, lat), rel=1e-11, abs=1e-11)
    assert wp_prime(-z, lat) == pytest.approx(-wp_prime(z, lat), rel=1e-11, abs=1e-10)


@pytest.mark.parametrize("lat", LATTICES, ids=["hex1", "hex2", "generic"])
@given(z=points)
def test_wp_is_periodic(lat, z):
    if not away_from_lattice(lat, z):
        return
    for w in (2 * lat.omega1, 2 * lat.omega2, 4 * lat.omega1 - 6 * lat.omega2):
        a, b = wp(z + w, lat), wp(z, lat)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


@pytest.mark.parametrize("lat", LATTICES, ids=["hex1", "hex2", "generic"])
def test_wp_satisfies_its_differential_equation(lat):
    g2, g3 = lat.invariants
    rng = np.random.default_rng(1)
    z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(-2, 2, 200)
    z = z[[away_from_lattice(lat, x, 0.1) for x in z]]
    P, dP = wp_and_prime(z, lat)
    resid = np.abs(dP**2 - (4 * P**3 - g2 * P - g3)) / np.maximum(1.0, np.abs(P) ** 3)
    assert np.max(resid) <= 1e-11


def test_wp_near_a_lattice_point_matches_laurent_series():
    lat = hexagonal_lattice(1.0)
    c = lat.laurent_coefficients(4)  # coefficients of z^2, z^4, ...
    for r in (1e-1, 1e-2, 1e-3):
        z = r * np.exp(0.7j)
        lhs = z * z * wp(z, lat) - 1
        series = sum(ck * z ** (2 * k + 4) for k, ck in enumerate(c))
        assert abs(lhs - series) <= 1e-12 * max(1.0, abs(z) ** 2) + 1e-14
        # leading behaviour: |z^2 wp - 1| = O(|z|^4) for the hexagonal lattice (g2 = 0)
        assert abs(lhs) <= 1.0 * r**4 + 1e-14


def test_hexagonal_invariant_g2_vanishes():
    g2, g3 = hexagonal_lattice(1.0).invariants
    assert abs(g2) / abs(g3) <= 1e-10


@pytest.mark.parametrize("s", [0.5, math.sqrt(2), 3.0])
def test_g3_scales_with_inverse_sixth_power(s):
    _, g3_1 = hexagonal_lattice(1.0).invariants
    _, g3_s = hexagonal_lattice(s).invariants
    assert g3_s == pytest.approx(g3_1 * s**-6, rel=1e-12)


def test_invariants_match_direct_lattice_sum():
    lat = Lattice(1.0, 0.3 + 1.1j)
    g2, g3 = lat.invariants
    d2, d3 = eisenstein_direct(lat, half_width=300)
    # the direct sum converges slowly (tail ~ 1/half_width^2 for g2)
    assert abs(g2 - d2) <= 1e-4 * abs(g2)
    assert abs(g3 - d3) <= 1e-5 * max(1.0, abs(g3))


@pytest.mark.parametrize("s", [1.0, 2.0, 0.7])
def test_area_matches_determinant(s):
    lat = hexagonal_lattice(s)
    w1, w2 = lat.omega1, lat.omega2
    # omega1, omega2 are half-periods
    assert lat.area == pytest.approx(4 * abs((w1.conjugate() * w2).imag), rel=1e-14)
    assert lat.area == pytest.approx(s * s * math.sin(math.pi / 3) * 4, rel=1e-12)


def test_wp_raises_at_a_pole():
    lat = hexagonal_lattice(1.0)
    with pytest.raises(PoleAt):
        wp(2 * lat.omega1, lat)
    with pytest.raises(PoleAt):
        wp(np.array([0.3, 2 * lat.omega1 + 2 * lat.omega2]), lat)


def test_weierstrass_curve_is_smooth_through_poles():
    lat = hexagonal_lattice(1.0)
    curve = Weierstrass(lat)
    poles = np.array([0, 2 * lat.omega1, 2 * lat.omega2 - 2 * lat.omega1])
    assert np.all(spherical_derivative(curve, poles) <= 1e-15)
    # the lift z^2 (1, wp) gives |df| ~ 2|z - w| / sqrt(pi) next to a pole
    for h in (1e-9, 1e-6j, 1e-4 * np.exp(1j)):
        v = spherical_derivative(curve, poles + h)
        assert np.allclose(v, 2 * abs(h) / math.sqrt(math.pi), rtol=1e-6)


def test_rescale_of_constant_is_degenerate():
    with pytest.raises(DegenerateCurve):
        brody_rescale(constant_curve([1, 0]), window=Region.centered_square(0, 2))


def test_rescale_of_exponential_recovers_closed_form():
    _, c = brody_rescale(exp_curve(1.0), window=Region.centered_square(0, 4))
    assert c == pytest.approx(2 * math.sqrt(math.pi), rel=1e-9)


def test_rescaled_weierstrass_has_unit_sup():
    g, _ = brody_rescale(Weierstrass(hexagonal_lattice(1.0)))
    v, _ = sup_spherical_derivative(g, Region.centered_square(0.37 + 0.1j, 6), 0.02)
    assert v == pytest.approx(1.0, abs=1e-6)
