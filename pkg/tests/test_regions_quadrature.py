from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brodylab.errors import QuadratureNonConvergent
from brodylab.parallel import exact_sum, pmap
from brodylab.quadrature import QuadratureOptions, fixed_rule, gauss_legendre, initial_tiles, integrate_tiles
from brodylab.regions import Region

coord = st.floats(-20, 20, allow_nan=False)


def test_region_geometry():
    d = Region.disk(1 + 2j, 3)
    s = Region.square(-1 - 1j, 2)
    c = Region.centered_square(0, 2)
    assert d.area == pytest.approx(9 * math.pi)
    assert d.perimeter == pytest.approx(6 * math.pi)
    assert s.center == 0 and c.center == 0
    assert s.bbox == c.bbox == (-1, 1, -1, 1)
    assert d.contains(1 + 2j + 2.9) and not d.contains(1 + 2j + 3.1)
    assert s.area == 4 and s.perimeter == 8


@given(st.builds(complex, coord, coord), st.builds(complex, coord, coord))
def test_region_round_trip_and_translation(anchor, shift):
    for r in (Region.disk(anchor, 2.5), Region.square(anchor, 1.5)):
        assert Region.from_dict(r.to_dict()) == r
        moved = r.translate(shift)
        assert moved.area == r.area
        assert moved.center == pytest.approx(r.center + shift)


@given(st.builds(complex, coord, coord))
def test_projection_lands_inside(z):
    for r in (Region.disk(0.5j, 2), Region.square(-1, 3)):
        assert r.contains(r.project(z), slack=1e-12)


def test_grid_stays_inside_region():
    for r in (Region.disk(0.5j, 2), Region.square(-1, 3)):
        g = r.grid(0.1)
        assert g.size > 100
        assert np.all(r.contains(g, slack=1e-12))


@pytest.mark.parametrize("order", [4, 8, 16])
def test_gauss_legendre_exact_for_polynomials(order):
    x, w = gauss_legendre(order)
    for k in range(2 * order):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert exact_sum(w * x**k) == pytest.approx(exact, abs=1e-13)


def test_adaptive_integral_of_smooth_function():
    tiles = initial_tiles(0.0, 2.0, -1.0, 1.0, 2, 2)
    res = integrate_tiles(lambda u, v: np.exp(u) * np.cos(v), tiles)
    assert res.value == pytest.approx((math.e**2 - 1) * 2 * math.sin(1), rel=1e-12)
    assert res.error <= 1e-9


def test_adaptive_integral_refines_near_a_spike():
    tiles = initial_tiles(-1.0, 1.0, -1.0, 1.0, 1, 1)
    eps = 1e-2
    res = integrate_tiles(lambda u, v: eps**2 / (u * u + v * v + eps**2) ** 2 / math.pi, tiles)
    exact_disk_limit = 1.0  # integral over the plane; the square misses ~eps^2
    assert res.value == pytest.approx(exact_disk_limit, abs=2 * eps**2)
    assert res.depth > 2


def test_fixed_rule_weights_sum_to_area():
    tiles = initial_tiles(0.0, 3.0, 0.0, 2.0, 3, 2)
    u, v, weights = fixed_rule(tiles, 8)
    assert exact_sum(weights) == pytest.approx(6.0, rel=1e-14)
    assert exact_sum(weights * u * v) == pytest.approx(9.0, rel=1e-13)


def test_non_convergence_is_reported():
    tiles = initial_tiles(-1.0, 1.0, -1.0, 1.0, 1, 1)
    opts = QuadratureOptions(max_depth=2, fail_tol=1e-12)
    with pytest.raises(QuadratureNonConvergent):
        integrate_tiles(lambda u, v: 1.0 / np.sqrt(u * u + v * v + 1e-12), tiles, opts)


def test_results_do_not_depend_on_threads():
    tiles = initial_tiles(0.0, 1.0, 0.0, 1.0, 4, 4)
    fn = lambda u, v: np.sin(7 * u * v) / (1 + u * u)  # noqa: E731
    one = integrate_tiles(fn, tiles, QuadratureOptions(threads=1, batch_points=500))
    many = integrate_tiles(fn, tiles, QuadratureOptions(threads=8, batch_points=500))
    assert one.value == many.value and one.error == many.error


def test_pmap_preserves_order():
    assert pmap(lambda x: x * x, range(50), threads=4) == [x * x for x in range(50)]
