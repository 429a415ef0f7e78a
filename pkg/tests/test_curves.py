from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brodylab.curves import (
    ExpSum,
    Postcomposed,
    Precomposed,
    ProjectivePoint,
    Rational,
    constant_curve,
    evaluate_point,
    exp_curve,
    fs_distance,
    identity_curve,
    lift,
    spherical_derivative,
    spherical_derivative_from_lift,
    sup_spherical_derivative,
    unitary_to_origin,
)
from brodylab.errors import LiftUndefined
from brodylab.regions import Region

SQRT_PI = math.sqrt(math.pi)

finite = st.floats(-6, 6, allow_nan=False, allow_infinity=False)
points = st.builds(complex, finite, finite)
vec3 = st.lists(st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


# lifts ---------------------------------------------------------------------


def test_constant_lift_has_zero_derivative():
    L = lift(constant_curve([1, 0]), 0.7 - 2j)
    assert L.F[1] == 0 and L.F[0] != 0
    assert np.all(L.dF == 0)


def test_identity_lift_is_proportional_to_chart():
    L = lift(identity_curve(), 2.0)
    ratio = L.F[1] / L.F[0]
    assert ratio == pytest.approx(2.0)
    assert L.dF[0] == 0
    # the same scalar multiplies F and dF
    assert L.dF[1] / L.F[0] == pytest.approx(1.0)


def test_lift_of_vanishing_tuple_raises():
    with pytest.raises(LiftUndefined):
        Rational(((0,), (0,))).lift_arrays(np.array([0.0]))


@given(points, st.integers(-200, 200))
def test_spherical_derivative_ignores_lift_scale(z, k):
    F, dF = exp_curve(1.0).lift_arrays(np.array([z]))
    s = 2.0**k * np.exp(1j * k)
    base = spherical_derivative_from_lift(F, dF)
    scaled = spherical_derivative_from_lift(F * s, dF * s)
    assert scaled[0] == pytest.approx(base[0], rel=1e-12)


# spherical derivative -----------------------------------------------------


def test_constant_curve_has_zero_derivative_everywhere():
    z = np.linspace(-5, 5, 11) + 1j
    assert np.all(spherical_derivative(constant_curve([2, 1 - 1j]), z) == 0)


def test_identity_derivative_at_origin():
    assert spherical_derivative(identity_curve(), 0) == pytest.approx(0.5641895835, abs=1e-10)


@given(points)
def test_identity_derivative_closed_form(z):
    expected = 1 / (SQRT_PI * (1 + abs(z) ** 2))
    assert spherical_derivative(identity_curve(), z) == pytest.approx(expected, rel=1e-12)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_exponential_derivative_closed_form(x, y):
    expected = 1 / (2 * SQRT_PI * math.cosh(x))
    assert spherical_derivative(exp_curve(1.0), complex(x, y)) == pytest.approx(expected, rel=1e-11)


def test_exponential_derivative_at_origin():
    assert spherical_derivative(exp_curve(1.0), 0) == pytest.approx(0.2820947918, abs=1e-10)


def test_exponential_far_out_stays_finite():
    v = spherical_derivative(exp_curve(1.0), np.array([800.0, -800.0, 2000.0]))
    assert np.all(np.isfinite(v)) and np.all(v >= 0)


@given(points, st.integers(0, 10_000))
def test_unitary_postcomposition_preserves_field(z, seed):
    f = ExpSum((((1, 0, 1),), ((2, 1, -0.5j),)))
    g = Postcomposed(f, random_unitary(3, seed))
    assert spherical_derivative(g, z) == pytest.approx(spherical_derivative(f, z), rel=1e-10, abs=1e-14)


@given(points, st.floats(0.1, 3), st.floats(-1, 1))
def test_precomposition_chain_rule(z, c, b):
    f = Rational(((1, 0, 0, 1 / 8), (0, 1, 1 / 4)))
    g = Precomposed(f, c, b)
    assert spherical_derivative(g, z) == pytest.approx(c * spherical_derivative(f, c * z + b), rel=1e-9, abs=1e-14)


def test_scaling_composes():
    f = exp_curve(1.0)
    z = np.linspace(-3, 3, 41) + 0.3j
    twice = Precomposed(Precomposed(f, 0.5, 0), 0.5, 0)
    once = Precomposed(f, 0.25, 0)
    assert np.max(np.abs(spherical_derivative(twice, z) - spherical_derivative(once, z))) <= 1e-12


def test_rational_inversion_is_the_same_curve():
    f = Rational(((1, 0, 0, 1 / 8), (0, 1, 1 / 4)))
    g = f.inverted()
    z = np.array([0.3 + 0.2j, 2 - 1j, -5j])
    assert np.allclose(spherical_derivative(g, 1 / z) * np.abs(1 / z) ** 2, spherical_derivative(f, z), rtol=1e-10)


def test_rational_degree():
    assert Rational(((1, 0, 0, 1 / 8), (0, 1, 1 / 4))).degree == 3
    assert identity_curve().degree == 1
    assert constant_curve([1, 2]).degree == 0


# distance -------------------------------------------------------------------


def test_distance_to_self_is_zero():
    p = ProjectivePoint([1, 2j, -1])
    assert fs_distance(p, p) == 0


def test_distance_between_coordinate_points():
    assert fs_distance(ProjectivePoint([1, 0]), ProjectivePoint([0, 1])) == pytest.approx(0.8862269255, abs=1e-10)


def test_small_distance_is_first_order():
    w = 1e-3 * np.exp(0.4j)
    d = fs_distance(ProjectivePoint([1, 0]), ProjectivePoint([1, w]))
    assert d == pytest.approx(abs(w) / SQRT_PI, rel=1e-6)
    # second-order term is |w|^3/3, so a tighter check also holds
    assert d == pytest.approx(math.atan(abs(w)) / SQRT_PI, rel=1e-12)


@given(vec3, vec3, vec3)
def test_distance_is_a_metric(a, b, c):
    p, q, r = (ProjectivePoint(v) for v in (a, b, c))
    dpq, dqr, dpr = fs_distance(p, q), fs_distance(q, r), fs_distance(p, r)
    assert dpq == pytest.approx(fs_distance(q, p), abs=1e-15)
    assert 0 <= dpq <= SQRT_PI / 2 + 1e-15
    assert dpr <= dpq + dqr + 1e-12


@given(vec3, vec3, st.integers(0, 10_000))
def test_distance_is_unitarily_invariant(a, b, seed):
    U = random_unitary(3, seed)
    d0 = fs_distance(ProjectivePoint(a), ProjectivePoint(b))
    d1 = fs_distance(ProjectivePoint(U @ np.asarray(a)), ProjectivePoint(U @ np.asarray(b)))
    assert d1 == pytest.approx(d0, abs=1e-12)


@given(vec3, vec3)
def test_distance_dominates_chordal(a, b):
    u = np.asarray(a) / np.linalg.norm(a)
    v = np.asarray(b) / np.linalg.norm(b)
    chordal = math.sqrt(max(0.0, 1 - abs(np.vdot(u, v)) ** 2))
    d = fs_distance(ProjectivePoint(a), ProjectivePoint(b))
    # the oracle loses half the digits through 1 - |<u,v>|^2
    assert chordal / SQRT_PI <= d + 1e-7
    assert d <= chordal / SQRT_PI * math.pi / 2 + 1e-7


# normalisation to the origin ---------------------------------------------------


def test_normalise_constant_at_first_axis_is_identity():
    _, U = unitary_to_origin(constant_curve([1, 0]), 0)
    assert np.allclose(U, np.eye(2))


def test_normalise_constant_at_second_axis_swaps():
    g, U = unitary_to_origin(constant_curve([0, 1]), 0)
    assert fs_distance(evaluate_point(g, 0), ProjectivePoint([1, 0])) <= 1e-15
    assert abs(U[0, 1]) == pytest.approx(1) and abs(U[1, 0]) == pytest.approx(1)


def test_normalise_identity_at_one():
    f = identity_curve()
    g, _ = unitary_to_origin(f, 1.0)
    assert fs_distance(evaluate_point(g, 0), ProjectivePoint([1, 0])) <= 1e-15
    xs = np.linspace(-3, 3, 13)
    z = (xs[:, None] + 1j * xs[None, :]).ravel()
    assert np.max(np.abs(spherical_derivative(g, z) - spherical_derivative(f, z + 1))) <= 1e-10


# sup search ---------------------------------------------------------------------


def test_sup_of_constant_is_zero():
    v, _ = sup_spherical_derivative(constant_curve([1, 1]), Region.disk(0, 3), 0.1)
    assert v == 0


def test_sup_of_identity_on_disk_is_at_centre():
    v, a = sup_spherical_derivative(identity_curve(), Region.disk(0, 2), 0.05)
    assert v == pytest.approx(1 / SQRT_PI, rel=1e-12)
    assert abs(a) < 1e-6


def test_sup_of_exponential_on_unit_square_is_on_left_edge():
    v, a = sup_spherical_derivative(exp_curve(1.0), Region.square(0, 1), 0.05)
    assert v == pytest.approx(1 / (2 * SQRT_PI), rel=1e-12)
    assert abs(a.real) < 1e-9
