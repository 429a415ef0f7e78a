"""Weierstrass elliptic functions on arbitrary lattices.

The lattice is ``2*omega1*Z + 2*omega2*Z``.  Internally the period basis is
Gauss-reduced and normalised to ``Z + tau*Z`` so that every evaluation runs in
the well-conditioned fundamental domain.  ``wp`` is evaluated with the
row-summed cosecant series

    wp(u) = C(tau) + sum_n pi^2 / sin^2(pi (u + n tau)),

which converges like ``exp(-2 pi |n| Im tau)``; the invariants g2, g3 come
from the Eisenstein q-expansions.  The Laurent recurrence is kept for use
near lattice points (see ``curves``) and as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateCurve, PoleAt

POLE_RADIUS = 1e-12
_PI = math.pi


def _gauss_reduce(b1: complex, b2: complex) -> tuple[complex, complex]:
    """Lagrange-Gauss reduction of a planar lattice basis."""
    for _ in range(200):
        if abs(b2) < abs(b1):
            b1, b2 = b2, b1
        mu = round((b2 * b1.conjugate()).real / abs(b1) ** 2)
        if mu == 0:
            break
        b2 = b2 - mu * b1
    if abs(b2) < abs(b1):
        b1, b2 = b2, b1
    if (b2 / b1).imag < 0:
        b2 = -b2
    return b1, b2


def _divisor_sum(n: int, power: int) -> int:
    return sum(d**power for d in range(1, n + 1) if n % d == 0)


def _eisenstein_E4_E6(tau: complex, terms: int = 40) -> tuple[complex, complex]:
    q = np.exp(2j * _PI * tau)
    e4 = 1.0 + 0j
    e6 = 1.0 + 0j
    qn = 1.0 + 0j
    for n in range(1, terms + 1):
        qn *= q
        if abs(qn) < 1e-30:
            break
        e4 += 240 * _divisor_sum(n, 3) * qn
        e6 -= 504 * _divisor_sum(n, 5) * qn
    return complex(e4), complex(e6)


@dataclass(frozen=True)
class Lattice:
    """Period lattice generated by the half-periods ``omega1`` and ``omega2``."""

    omega1: complex
    omega2: complex
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "omega1", complex(self.omega1))
        object.__setattr__(self, "omega2", complex(self.omega2))
        if self.omega1 == 0 or (self.omega2 / self.omega1).imag <= 0:
            raise ValueError("lattice requires Im(omega2/omega1) > 0")

    @cached_property
    def reduced_basis(self) -> tuple[complex, complex]:
        return _gauss_reduce(2 * self.omega1, 2 * self.omega2)

    @property
    def tau(self) -> complex:
        p1, p2 = self.reduced_basis
        return p2 / p1

    @property
    def area(self) -> float:
        return abs(((2 * self.omega1).conjugate() * (2 * self.omega2)).imag)

    @cached_property
    def invariants(self) -> tuple[complex, complex]:
        p1, _ = self.reduced_basis
        e4, e6 = _eisenstein_E4_E6(self.tau)
        g2 = 60 * (_PI**4 / 45) * e4 / p1**4
        g3 = 140 * (2 * _PI**6 / 945) * e6 / p1**6
        return complex(g2), complex(g3)

    @property
    def g2(self) -> complex:
        return self.invariants[0]

    @property
    def g3(self) -> complex:
        return self.invariants[1]

    @cached_property
    def _series_constant(self) -> complex:
        # fixes wp(u) - 1/u^2 -> 0; pi^2/sin^2(pi u) = 1/u^2 + pi^2/3 + O(u^2)
        tau = self.tau
        rows = 0.0 + 0j
        for n in range(1, 64):
            term = 2 * _PI**2 / np.sin(_PI * n * tau) ** 2
            rows += term
            if abs(term) < 1e-20:
                break
        return complex(-(_PI**2) / 3 - rows)

    @cached_property
    def _rows(self) -> int:
        return int(math.ceil(0.5 + 44.0 / (2 * _PI * self.tau.imag))) + 1

    def nearest_lattice_point(self, z):
        """Nearest lattice point to ``z`` (vectorised)."""
        z = np.asarray(z, dtype=complex)
        p1, _ = self.reduced_basis
        tau = self.tau
        u = z / p1
        y = u.imag / tau.imag
        x = u.real - y * tau.real
        n0 = np.floor(y)
        m0 = np.floor(x)
        best = None
        best_d = None
        for dn in (-1, 0, 1, 2):
            for dm in (-1, 0, 1, 2):
                cand = (m0 + dm) + (n0 + dn) * tau
                d = np.abs(u - cand)
                if best is None:
                    best, best_d = cand, d
                else:
                    closer = d < best_d
                    best = np.where(closer, cand, best)
                    best_d = np.where(closer, d, best_d)
        return best * p1

    def laurent_coefficients(self, count: int) -> np.ndarray:
        """Coefficients ``c_k`` (k = 2..count+1) of wp(z) = z^-2 + sum c_k z^(2k-2)."""
        c = np.zeros(count + 2, dtype=complex)
        g2, g3 = self.invariants
        if count >= 1:
            c[2] = g2 / 20
        if count >= 2:
            c[3] = g3 / 28
        for k in range(4, count + 2):
            s = sum(c[m] * c[k - m] for m in range(2, k - 1))
            c[k] = 3 * s / ((2 * k + 1) * (k - 3))
        return c[2:]


def hexagonal_lattice(scale: float = 1.0) -> Lattice:
    """Equianharmonic lattice (g2 = 0) with half-periods ``scale`` and ``scale*e^{i pi/3}``."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return Lattice(scale, scale * complex(math.cos(_PI / 3), math.sin(_PI / 3)), label=f"hexagonal:{scale!r}")


def _reduce(z, lattice: Lattice):
    z = np.asarray(z, dtype=complex)
    p1, _ = lattice.reduced_basis
    tau = lattice.tau
    u = z / p1
    n = np.round(u.imag / tau.imag)
    u = u - n * tau
    u = u - np.round(u.real)
    return u


def _check_poles(z, lattice: Lattice):
    z = np.asarray(z, dtype=complex)
    w = lattice.nearest_lattice_point(z)
    near = np.abs(z - w) < POLE_RADIUS
    if np.any(near):
        idx = np.argmax(near)
        raise PoleAt(complex(z.flat[idx]), complex(np.asarray(w).flat[idx]))


def wp_and_prime(z, lattice: Lattice, check_poles: bool = True):
    """Return ``(wp(z), wp'(z))``; vectorised over ``z``."""
    scalar = np.ndim(z) == 0
    if check_poles:
        _check_poles(z, lattice)
    p1, _ = lattice.reduced_basis
    tau = lattice.tau
    u = _reduce(z, lattice)
    rows = lattice._rows
    # rows of the csc^2 series in the variable X = exp(2 pi i (u + n tau)):
    # pi^2/sin^2 = -4 pi^2 X/(1-X)^2 and its u-derivative -8 pi^3 i X(1+X)/(1-X)^3;
    # rows with n < 0 use 1/X, which keeps every |X| below one.
    x0 = np.exp(2j * _PI * u)
    one_minus = -np.expm1(2j * _PI * u)
    wp_u = -4 * _PI**2 * x0 / one_minus**2
    wpp_u = -8j * _PI**3 * x0 * (1 + x0) / one_minus**3
    q = np.exp(2j * _PI * tau)
    xinv = 1.0 / x0
    qn = 1.0 + 0j
    for _ in range(rows):
        qn = qn * q
        xp = x0 * qn
        xm = xinv * qn
        dp = 1.0 / (1.0 - xp)
        dm = 1.0 / (1.0 - xm)
        wp_u = wp_u - 4 * _PI**2 * (xp * dp * dp + xm * dm * dm)
        wpp_u = wpp_u - 8j * _PI**3 * (xp * (1 + xp) * dp**3 - xm * (1 + xm) * dm**3)
    wp_u = wp_u + lattice._series_constant
    wp_z = wp_u / p1**2
    wpp_z = wpp_u / p1**3
    if scalar:
        return complex(wp_z), complex(wpp_z)
    return wp_z, wpp_z


def wp(z, lattice: Lattice):
    return wp_and_prime(z, lattice)[0]


def wp_prime(z, lattice: Lattice):
    return wp_and_prime(z, lattice)[1]


def eisenstein_direct(lattice: Lattice, half_width: int = 200) -> tuple[complex, complex]:
    """g2, g3 by brute-force lattice summation over ``|m|, |n| <= half_width``.

    Independent of the q-series route and slow to converge (tail ~ 1/M^2 for
    G4); used only as a cross-check.
    """
    w1, w2 = 2 * lattice.omega1, 2 * lattice.omega2
    m = np.arange(-half_width, half_width + 1)
    M, N = np.meshgrid(m, m, indexing="ij")
    pts = (M * w1 + N * w2).ravel()
    pts = pts[pts != 0]
    inv2 = 1.0 / pts**2
    inv4 = inv2 * inv2
    inv6 = inv4 * inv2
    g2 = 60 * math.fsum(inv4.real) + 60j * math.fsum(inv4.imag)
    g3 = 140 * math.fsum(inv6.real) + 140j * math.fsum(inv6.imag)
    return complex(g2), complex(g3)


def brody_rescale(curve, window=None, target: float = 1.0, resolution: float | None = None):
    """Precompose ``curve`` with ``z -> c z`` so its measured sup of |df| equals ``target``.

    Returns ``(rescaled_curve, c)``.  For Weierstrass curves the default window
    is one fundamental parallelogram (covered by a bounding square), which
    makes the measured sup global.  The measured sup of ``f(c .)`` over the
    window scaled by ``1/c`` is exactly ``c`` times the sup of ``f``, so the
    bisection runs on that measured quantity and converges to the closed form.
    """
    from .curves import Precomposed, Weierstrass, sup_spherical_derivative
    from .regions import Region

    if window is None:
        if isinstance(curve, Weierstrass):
            lat = curve.lattice
            p1, p2 = lat.reduced_basis
            side = abs(p1) + abs(p2)
            window = Region.square(complex(-side / 2, -side / 2), side)
        else:
            raise ValueError("window required for non-periodic curves")
    if resolution is None:
        resolution = window.size / 200
    s, _ = sup_spherical_derivative(curve, window, resolution)
    if s <= 0:
        raise DegenerateCurve("sup of |df| over window is zero")
    lo, hi = 0.0, 2 * target / s
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if mid * s < target:
            lo = mid
        else:
            hi = mid
    c = lo if abs(lo * s - target) <= abs(hi * s - target) else hi
    return Precomposed(curve, c, 0j), c
