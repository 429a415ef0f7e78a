from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brodylab import corpus
from brodylab.curves import Precomposed, Rational, Weierstrass, constant_curve, exp_curve, identity_curve
from brodylab.elliptic import hexagonal_lattice
from brodylab.energy import (
    FolnerSequence,
    energy,
    folner_agreement,
    nsa_characteristic,
    nsa_profile,
    period_lattice,
    plane_energy,
    rho_elliptic,
    rho_estimate,
    rho_nsa_estimate,
    sup_translate_energy,
    template,
)
from brodylab.errors import NotPeriodic, WindowTooSmall
from brodylab.regions import Region

RATIONAL3 = Rational(((1, 0, 0, 1 / 8), (0, 1, 1 / 4)))


@pytest.fixture(scope="module")
def hex_curve():
    return corpus.get("wp_hex_1").curve


def identity_disk_energy(R):
    return R * R / (1 + R * R)


def identity_nsa(r):
    return 0.5 * math.log((1 + r * r) / 2)


# energy --------------------------------------------------------------------------


@pytest.mark.parametrize("region", [Region.disk(0, 3), Region.square(-2 + 5j, 4)])
def test_constant_curve_has_no_energy(region):
    assert energy(constant_curve([1, 1j]), region).value == 0


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0, 20.0])
def test_identity_disk_energy_closed_form(R):
    res = energy(identity_curve(), Region.disk(0, R))
    assert res.value == pytest.approx(identity_disk_energy(R), abs=1e-9)


def test_identity_unit_disk_energy_is_half():
    assert energy(identity_curve(), Region.disk(0, 1)).value == pytest.approx(0.5, abs=1e-9)


def test_exponential_unit_square_energy():
    res = energy(exp_curve(1.0), Region.square(0, 1))
    assert res.value == pytest.approx(math.tanh(1) / (4 * math.pi), rel=1e-9)


@pytest.mark.parametrize("curve,degree", [(identity_curve(), 1), (RATIONAL3, 3), (Rational(((1, 0, 1), (0, 0, 0, 0, 1))), 4)])
def test_plane_energy_equals_degree(curve, degree):
    res = plane_energy(curve)
    assert res["value"] == pytest.approx(degree, abs=1e-6)
    assert res["tail"] <= res["tail_bound"] * (1 + 1e-6)


def test_large_disk_energy_approaches_degree():
    for R in (10.0, 100.0, 1000.0):
        val = energy(RATIONAL3, Region.disk(0, R)).value
        assert 3 - val <= 20 / R**2


def test_energy_adds_over_disjoint_tiles():
    f = corpus.get("rational3").curve
    whole = energy(f, Region.square(-1 - 1j, 2)).value
    parts = sum(energy(f, Region.square(c, 1)).value for c in (-1 - 1j, -1j, -1, 0))
    assert whole == pytest.approx(parts, rel=1e-9)


@settings(max_examples=10)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_energy_is_translation_invariant(x, y):
    b = complex(x, y)
    f = exp_curve(1.0)
    region = Region.disk(0.3, 1.5)
    moved = energy(Precomposed(f, 1.0, b), region).value
    assert moved == pytest.approx(energy(f, region.translate(b)).value, rel=1e-9)


# sup over translates --------------------------------------------------------------


def test_translate_sup_of_constant_is_zero():
    res = sup_translate_energy(constant_curve([1, 0]), template("disk", 1), Region.disk(0, 10))
    assert res.value == 0


def test_translate_sup_for_identity_is_centred():
    res = sup_translate_energy(identity_curve(), template("disk", 1), Region.disk(0, 10))
    assert res.value == pytest.approx(0.5, abs=1e-6)
    assert abs(res.argmax) < 0.05


def test_translate_sup_window_too_small():
    with pytest.raises(WindowTooSmall):
        sup_translate_energy(identity_curve(), template("disk", 3), Region.centered_square(0, 4))


def test_translate_sup_of_periodic_curve_ignores_window(hex_curve):
    shape = template("disk", 1.0)
    vals = [sup_translate_energy(hex_curve, shape, Region.centered_square(c, 8)).value for c in (0, 3.3 - 1.1j)]
    assert abs(vals[0] - vals[1]) <= 0.01 * vals[0]


# density estimates ----------------------------------------------------------------


def test_rho_of_constant_is_zero():
    est = rho_estimate(constant_curve([1, 0]), FolnerSequence("disk", (1, 2, 4)), Region.centered_square(0, 20))
    assert est.values() == [0, 0, 0]


def test_rho_of_exponential_decays_like_inverse_radius():
    sizes = (2.0, 5.0, 10.0, 20.0)
    est = rho_estimate(exp_curve(1.0), FolnerSequence("disk", sizes), Region.centered_square(0, 44))
    for R, v in zip(sizes, est.values()):
        assert v <= 4 / math.pi / R * 1.02
    assert est.values()[-1] < est.values()[0] / 5


def test_folner_sequence_boundary_ratio_shrinks():
    for shape in ("disk", "square"):
        ratios = FolnerSequence(shape, (2, 4, 8, 16, 32)).boundary_ratio(1.0)
        assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_torus_average_of_constant_like_cases():
    with pytest.raises(NotPeriodic):
        rho_elliptic(exp_curve(1.0))


def test_period_lattice_follows_rescaling():
    lat = hexagonal_lattice(1.0)
    scaled = period_lattice(Precomposed(Weierstrass(lat), 0.5, 0))
    assert scaled.area == pytest.approx(4 * lat.area)


def test_torus_average_scales_quadratically(hex_curve):
    base = rho_elliptic(hex_curve)["value"]
    half = rho_elliptic(Precomposed(hex_curve, 0.5, 0))["value"]
    assert half / base == pytest.approx(0.25, abs=1e-3)


def test_hexagonal_torus_average(hex_curve):
    # frozen from an independent midpoint-rule oracle on a 2000 x 2000 cell grid
    assert rho_elliptic(hex_curve)["value"] == pytest.approx(0.141423, abs=2e-5)


def test_disk_estimate_converges_to_torus_average(hex_curve):
    torus = rho_elliptic(hex_curve)["value"]
    period = abs(period_lattice(hex_curve).reduced_basis[0])
    R = 6 * period
    est = rho_estimate(hex_curve, FolnerSequence("disk", (R,)), Region.centered_square(0, 2 * R + 2 * period))
    assert abs(est.values()[0] - torus) <= 0.02 * torus


def test_folner_agreement_is_trivial_for_constant():
    rep = folner_agreement(constant_curve([1, 0]), Region.centered_square(0, 20), (1.0, 2.0))
    assert all(row["relative_disagreement"] == 0 for row in rep["rows"])


def test_folner_agreement_for_identity_both_vanish():
    rep = folner_agreement(identity_curve(), Region.centered_square(0, 80), (5.0, 20.0))
    assert rep["rows"][-1]["disk"] < 1e-3 and rep["rows"][-1]["square"] < 1e-3


# Nevanlinna characteristic ---------------------------------------------------------


def test_characteristic_of_constant_is_zero():
    assert nsa_characteristic(constant_curve([1, 0]), 5.0)["value"] == 0


@pytest.mark.parametrize("r", [1.0, 2.0, 3.0, 10.0, 100.0])
def test_characteristic_of_identity(r):
    assert nsa_characteristic(identity_curve(), r)["value"] == pytest.approx(identity_nsa(r), abs=1e-8)


def test_characteristic_of_identity_at_three():
    assert nsa_characteristic(identity_curve(), 3.0)["value"] == pytest.approx(0.8047189562, abs=1e-6)


def test_profile_matches_single_evaluations():
    radii = [1.5, 4.0, 9.0]
    prof = nsa_profile(exp_curve(1.0), radii)
    for p, r in zip(prof, radii):
        assert p["value"] == pytest.approx(nsa_characteristic(exp_curve(1.0), r)["value"], rel=1e-9)


@pytest.mark.parametrize("cid", ["identity", "exp", "exp_brody", "wp_hex_1", "glued"])
def test_characteristic_obeys_brody_bound(cid):
    for p in nsa_profile(corpus.get(cid).curve, [1, 2, 4, 8]):
        assert p["value"] <= p["brody_bound"] + p["error_estimate"] + 1e-9


def test_nsa_proxy_of_identity_is_small():
    assert rho_nsa_estimate(identity_curve(), 100.0)["value"] <= 1e-3


def test_nsa_proxy_of_constant_is_zero():
    assert rho_nsa_estimate(constant_curve([0, 1]), 8.0)["value"] == 0


def test_nsa_proxy_of_elliptic_matches_torus_average(hex_curve):
    torus = rho_elliptic(hex_curve)["value"]
    period = abs(period_lattice(hex_curve).reduced_basis[0])
    proxy = rho_nsa_estimate(hex_curve, 12 * period)["value"]
    assert abs(proxy - torus) <= 0.03 * torus
