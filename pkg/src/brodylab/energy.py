"""Energy integrals of |df|^2, energy-density estimators and the
Nevanlinna-Shimizu-Ahlfors characteristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elliptic
from .curves import CurveMap, Glued, Postcomposed, Precomposed, Rational, Weierstrass, spherical_derivative_from_lift
from .errors import NotPeriodic, WindowTooSmall
from .parallel import pmap
from .quadrature import QuadratureOptions, fixed_rule, initial_tiles, integrate_tiles
from .regions import Region

__all__ = [
    "Region",
    "EnergyEstimate",
    "FolnerSequence",
    "energy",
    "energy_density",
    "plane_energy",
    "sup_translate_energy",
    "rho_estimate",
    "rho_elliptic",
    "period_lattice",
    "nsa_characteristic",
    "nsa_profile",
    "rho_nsa_estimate",
    "folner_agreement",
]

DEFAULT_QUAD = QuadratureOptions()


def energy_density(curve: CurveMap):
    """Vectorised ``z -> |df|^2(z)``."""

    def fn(z):
        F, dF = curve.lift_arrays(z)
        s = spherical_derivative_from_lift(F, dF)
        return s * s

    return fn


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    error_estimate: float
    region: Region
    order: int
    depth: int
    tiles: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "region": self.region.to_dict(),
            "quadrature": {"order": self.order, "depth": self.depth, "tiles": self.tiles},
        }


# ---------------------------------------------------------------------------
# tilings of the supported domains


def _radial_breaks(r0: float, r1: float, cell: float) -> list[float]:
    breaks = [r0]
    r = r0
    uniform_until = r0 + 32 * cell
    while r < r1:
        step = cell if r < uniform_until else max(cell, r - r0)
        r = min(r + step, r1)
        breaks.append(r)
    return breaks


def _polar_tiles(r0: float, r1: float, cell: float, max_angular: int = 256) -> np.ndarray:
    rows = []
    br = _radial_breaks(r0, r1, cell)
    for a, b in zip(br[:-1], br[1:]):
        nt = int(min(max(math.ceil(2 * math.pi * b / cell), 4), max_angular))
        rows.append(initial_tiles(a, b, 0.0, 2 * math.pi, 1, nt))
    return np.concatenate(rows)


def _square_tiles(region: Region, cell: float) -> np.ndarray:
    xmin, xmax, ymin, ymax = region.bbox
    n = max(int(math.ceil(region.size / cell)), 1)
    return initial_tiles(xmin, xmax, ymin, ymax, n, n)


def _polar_integrand(dens, center: complex, weight=None):
    def fn(r, t):
        z = center + r * np.exp(1j * t)
        v = dens(z) * r
        if weight is not None:
            v = v * weight(r)
        return v

    return fn


def _cartesian_integrand(dens):
    return lambda x, y: dens(x + 1j * y)


def _region_rule(region: Region, cell: float):
    """``(integrand_factory, tiles)`` for a region; the factory wraps a density."""
    if region.kind == "disk":
        tiles = _polar_tiles(0.0, region.size, cell)
        return (lambda dens: _polar_integrand(dens, region.anchor)), tiles
    tiles = _square_tiles(region, cell)
    return _cartesian_integrand, tiles


def energy(curve: CurveMap, region: Region, opts: QuadratureOptions = DEFAULT_QUAD) -> EnergyEstimate:
    """``int_region |df|^2 dx dy`` by adaptive tensor Gauss-Legendre quadrature."""
    factory, tiles = _region_rule(region, opts.initial_cell)
    res = integrate_tiles(factory(energy_density(curve)), tiles, opts)
    return EnergyEstimate(res.value, res.error, region, opts.order, res.depth, res.tiles)


def annulus_energy(curve: CurveMap, center: complex, r0: float, r1: float, weight=None, opts=DEFAULT_QUAD):
    tiles = _polar_tiles(r0, r1, opts.initial_cell)
    return integrate_tiles(_polar_integrand(energy_density(curve), complex(center), weight), tiles, opts)


def parallelogram_energy(curve: CurveMap, origin: complex, e1: complex, e2: complex, opts=DEFAULT_QUAD):
    """Energy over ``{origin + u e1 + v e2 : 0 <= u, v <= 1}``."""
    dens = energy_density(curve)
    jac = abs((complex(e1).conjugate() * complex(e2)).imag)
    n1 = max(int(math.ceil(abs(e1) / opts.initial_cell)), 1)
    n2 = max(int(math.ceil(abs(e2) / opts.initial_cell)), 1)
    tiles = initial_tiles(0.0, 1.0, 0.0, 1.0, n1, n2)
    return integrate_tiles(lambda u, v: dens(origin + u * e1 + v * e2) * jac, tiles, opts)


def plane_energy(curve: Rational, cutoff: float = 1e4, opts: QuadratureOptions = DEFAULT_QUAD) -> dict:
    """Total energy of a rational curve over the whole plane.

    The disk ``|z| < cutoff`` is integrated directly; the complement is the
    disk ``|w| < 1/cutoff`` for the inverted curve ``f(1/w)`` (energy is the
    pulled-back area form, so the change of chart is exact).  ``tail_bound``
    is ``pi/cutoff^2 * sup |d f(1/w)|^2`` over that small disk.
    """
    inner = energy(curve, Region.disk(0, cutoff), opts)
    inv = curve.inverted()
    tail = energy(inv, Region.disk(0, 1.0 / cutoff), opts)
    pts = Region.disk(0, 1.0 / cutoff).grid(1.0 / cutoff / 16)
    s = float(np.max(energy_density(inv)(pts)))
    bound = math.pi / cutoff**2 * s
    return {
        "value": inner.value + tail.value,
        "error_estimate": inner.error_estimate + tail.error_estimate,
        "inner": inner.value,
        "tail": tail.value,
        "tail_bound": bound,
        "cutoff": cutoff,
    }


# ---------------------------------------------------------------------------
# sup over translates


def template(kind: str, size: float) -> Region:
    """Shape centred at the origin: disk of radius ``size`` or square of side ``size``."""
    if kind == "disk":
        return Region.disk(0, size)
    return Region.centered_square(0, size)


def _translate_domain(shape: Region, window: Region) -> Region | None:
    """Centres ``a`` for which ``shape`` moved to centre ``a`` lies inside ``window``."""
    if shape.kind == "disk":
        reach = shape.size
    else:
        reach = shape.size / 2
    if window.kind == "disk":
        if shape.kind == "square":
            reach = reach * math.sqrt(2)
        r = window.size - reach
        return Region.disk(window.anchor, r) if r > 0 else (None if r < 0 else "point")
    side = window.size - 2 * reach
    if side < 0:
        return None
    if side == 0:
        return "point"
    return Region.square(window.anchor + complex(reach, reach), side)


def _shape_size(shape: Region) -> float:
    return shape.size


def _coarse_rule(shape: Region, cell: float, order: int = 8):
    """Fixed composite rule for ``shape`` centred at 0: complex offsets and weights."""
    if shape.kind == "disk":
        tiles = _polar_tiles(0.0, shape.size, cell)
        r, t, w = fixed_rule(tiles, order)
        return r * np.exp(1j * t), w * r
    s = shape.size
    n = max(int(math.ceil(s / cell)), 1)
    tiles = initial_tiles(-s / 2, s / 2, -s / 2, s / 2, n, n)
    x, y, w = fixed_rule(tiles, order)
    return x + 1j * y, w


@dataclass(frozen=True)
class TranslateResult:
    value: float
    argmax: complex
    estimate: EnergyEstimate
    grid_step: float
    candidates: int


def sup_translate_energy(
    curve: CurveMap,
    shape: Region,
    window: Region,
    opts: QuadratureOptions = DEFAULT_QUAD,
    top: int = 3,
) -> TranslateResult:
    """Largest energy of ``shape`` moved to a centre ``a`` with ``a + shape`` inside ``window``.

    Grid of centres at step ``size/4``, screened with a fixed composite rule,
    then coordinate-wise golden-section refinement of the best few and an
    adaptive evaluation at the winner.  Every reported value is an energy
    actually computed at a specific translate, so it is a lower bound for the
    windowed sup (up to quadrature error).
    """
    shape = template(shape.kind, shape.size) if shape.center != 0 else shape
    dom = _translate_domain(shape, window)
    if dom is None:
        raise WindowTooSmall(f"{shape.kind} of size {shape.size} does not fit in window {window.to_dict()}")
    step = shape.size / 4
    centers = np.array([window.center]) if dom == "point" else dom.grid(step)
    offsets, weights = _coarse_rule(shape, opts.initial_cell)
    dens = energy_density(curve)

    def coarse(a_list):
        a_list = np.atleast_1d(np.asarray(a_list, dtype=complex))
        chunk = max(opts.batch_points // max(offsets.size, 1), 1)
        pieces = [a_list[i : i + chunk] for i in range(0, a_list.size, chunk)]

        def run(piece):
            vals = dens((piece[:, None] + offsets[None, :]).ravel()).reshape(piece.size, -1)
            return vals @ weights

        return np.concatenate(pmap(run, pieces, opts.threads))

    vals = coarse(centers)
    order = np.argsort(-vals, kind="stable")[:top]
    best_a, best_v = centers[order[0]], vals[order[0]]
    if dom != "point":
        for idx in order:
            a, v = _golden_refine(coarse, dom, centers[idx], vals[idx], step)
            if v > best_v:
                best_a, best_v = a, v
    est = energy(curve, shape.translate(best_a), opts)
    return TranslateResult(est.value, complex(best_a), est, step, int(centers.size))


_GOLD = (math.sqrt(5) - 1) / 2


def _golden_refine(fn, dom: Region, a0: complex, v0: float, step: float, sweeps: int = 2, tol_frac: float = 1 / 64):
    a, v = complex(a0), float(v0)
    for _ in range(sweeps):
        for axis in (1.0, 1j):
            lo, hi = -step, step
            x1 = hi - _GOLD * (hi - lo)
            x2 = lo + _GOLD * (hi - lo)

            def at(t):
                p = complex(dom.project(a + t * axis))
                return p, float(fn([p])[0])

            p1, f1 = at(x1)
            p2, f2 = at(x2)
            while hi - lo > step * tol_frac:
                if f1 >= f2:
                    hi, x2, p2, f2 = x2, x1, p1, f1
                    x1 = hi - _GOLD * (hi - lo)
                    p1, f1 = at(x1)
                else:
                    lo, x1, p1, f1 = x1, x2, p2, f2
                    x2 = lo + _GOLD * (hi - lo)
                    p2, f2 = at(x2)
            for p, f in ((p1, f1), (p2, f2)):
                if f > v:
                    a, v = p, f
    return a, v


# ---------------------------------------------------------------------------
# energy density


@dataclass(frozen=True)
class FolnerSequence:
    """Increasing disks (radii) or squares (sides)."""

    shape: str
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(float(s) for s in self.sizes)
        if self.shape not in ("disk", "square"):
            raise ValueError("shape must be 'disk' or 'square'")
        if any(b <= a for a, b in zip(sizes[:-1], sizes[1:])) or (sizes and sizes[0] <= 0):
            raise ValueError("sizes must be positive and strictly increasing")
        object.__setattr__(self, "sizes", sizes)

    def area(self, size: float) -> float:
        return math.pi * size**2 if self.shape == "disk" else size**2

    def boundary_ratio(self, r: float) -> list[float]:
        """``area(d_r Omega_n) / area(Omega_n)`` for each member."""
        out = []
        for s in self.sizes:
            if self.shape == "disk":
                inner = max(s - r, 0.0)
                a = math.pi * ((s + r) ** 2 - inner**2)
            else:
                outer = s * s + 4 * s * r + math.pi * r * r
                inner = max(s - 2 * r, 0.0) ** 2
                a = outer - inner
            out.append(a / self.area(s))
        return out


@dataclass(frozen=True)
class RhoPoint:
    size: float
    area: float
    rho: float
    argmax: complex
    error_estimate: float


@dataclass(frozen=True)
class RhoEstimate:
    shape: str
    points: list
    monotone_trend: str
    last_relative_change: float
    window: Region

    def values(self) -> list[float]:
        return [p.rho for p in self.points]

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "points": [
                {"size": p.size, "area": p.area, "rho": p.rho, "argmax": [p.argmax.real, p.argmax.imag], "error": p.error_estimate}
                for p in self.points
            ],
            "trend": self.monotone_trend,
            "last_relative_change": self.last_relative_change,
            "window": self.window.to_dict(),
        }


def rho_estimate(curve: CurveMap, folner: FolnerSequence, window: Region, opts: QuadratureOptions = DEFAULT_QUAD) -> RhoEstimate:
    """``sup_a energy(a + Omega_n) / area(Omega_n)`` along a Følner sequence, translates limited to ``window``."""
    points = []
    for s in folner.sizes:
        res = sup_translate_energy(curve, template(folner.shape, s), window, opts)
        area = folner.area(s)
        points.append(RhoPoint(s, area, res.value / area, res.argmax, res.estimate.error_estimate / area))
    vals = [p.rho for p in points]
    diffs = np.diff(vals)
    if len(vals) < 2 or np.all(diffs == 0):
        trend = "flat"
    elif np.all(diffs <= 0):
        trend = "non-increasing"
    elif np.all(diffs >= 0):
        trend = "non-decreasing"
    else:
        trend = "mixed"
    last = 0.0
    if len(vals) >= 2 and max(abs(vals[-1]), abs(vals[-2])) > 0:
        last = abs(vals[-1] - vals[-2]) / max(abs(vals[-1]), abs(vals[-2]))
    return RhoEstimate(folner.shape, points, trend, last, window)


def period_lattice(curve: CurveMap) -> elliptic.Lattice | None:
    """Period lattice of a Weierstrass curve, possibly pre/post-composed."""
    if isinstance(curve, Weierstrass):
        return curve.lattice
    if isinstance(curve, Postcomposed):
        return period_lattice(curve.base)
    if isinstance(curve, Precomposed):
        base = period_lattice(curve.base)
        if base is None:
            return None
        return elliptic.Lattice(base.omega1 / curve.c, base.omega2 / curve.c)
    if isinstance(curve, Glued):
        return None
    return None


def check_periodic(curve: CurveMap, lattice: elliptic.Lattice, tol: float = 1e-8, samples: int = 32, seed: int = 0):
    rng = np.random.default_rng(seed)
    p1, p2 = lattice.reduced_basis
    u = rng.uniform(0, 1, samples) + 0j
    v = rng.uniform(0, 1, samples)
    z = u * p1 + v * p2 + 0.123 * p1
    dens = energy_density(curve)
    base = dens(z)
    for shift in (p1, p2):
        other = dens(z + shift)
        if np.max(np.abs(other - base)) > tol * max(1.0, float(np.max(np.abs(base)))):
            raise NotPeriodic("energy density is not invariant under the given lattice")


def rho_elliptic(curve: CurveMap, lattice: elliptic.Lattice | None = None, opts: QuadratureOptions = DEFAULT_QUAD) -> dict:
    """Torus average ``(1/area) int_{C/Lambda} |df|^2``."""
    if lattice is None:
        lattice = period_lattice(curve)
        if lattice is None:
            raise NotPeriodic("no period lattice known for this curve")
    check_periodic(curve, lattice)
    p1, p2 = lattice.reduced_basis
    res = parallelogram_energy(curve, 0.0, p1, p2, opts)
    area = abs((p1.conjugate() * p2).imag)
    return {"value": res.value / area, "error_estimate": res.error / area, "cell_energy": res.value, "area": area}


# ---------------------------------------------------------------------------
# Nevanlinna-Shimizu-Ahlfors characteristic


def nsa_profile(curve: CurveMap, radii, opts: QuadratureOptions = DEFAULT_QUAD) -> list[dict]:
    """``T(r, f) = int_1^r A(t) dt / t`` at several radii, ``A(t)`` the energy of ``D_t(0)``.

    Exchanging the order of integration gives
    ``T(r) = ln(r) A(r) - int_{1<|z|<r} |df|^2 ln|z|``, so one sweep over
    the annuli between consecutive radii (energy and ``ln|z|``-moment per
    annulus) yields every ``T(r_k)``.
    """
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] < 1:
        raise ValueError("T(r, f) needs r >= 1")
    inner = annulus_energy(curve, 0j, 0.0, 1.0, None, opts)
    energies, moments = [inner.value], []
    e_err, m_err = [inner.error], []
    out = []
    prev = 1.0
    for r in radii:
        if r > prev:
            e = annulus_energy(curve, 0j, prev, r, None, opts)
            m = annulus_energy(curve, 0j, prev, r, np.log, opts)
            energies.append(e.value)
            moments.append(m.value)
            e_err.append(e.error)
            m_err.append(m.error)
            prev = r
        lr = math.log(r)
        A = math.fsum(energies)
        value = lr * A - math.fsum(moments)
        err = lr * math.fsum(e_err) + math.fsum(m_err)
        out.append({"r": r, "value": value, "error_estimate": err, "disk_energy": A, "brody_bound": math.pi * r * r / 2})
    return out


def nsa_characteristic(curve: CurveMap, r: float, opts: QuadratureOptions = DEFAULT_QUAD) -> dict:
    """``T(r, f)``; see :func:`nsa_profile`."""
    return nsa_profile(curve, [r], opts)[0]


def rho_nsa_estimate(curve: CurveMap, r_max: float, samples: int = 9, opts: QuadratureOptions = DEFAULT_QUAD) -> dict:
    """Max of ``2 T(r)/(pi r^2)`` over ``r = r_max 2^(-j/(samples-1))``, i.e. the last octave ``[r_max/2, r_max]``."""
    if r_max < 2:
        raise ValueError("r_max must be at least 2")
    radii = sorted(r_max * 2.0 ** (-j / (samples - 1)) for j in range(samples))
    prof = nsa_profile(curve, radii, opts)
    vals = [2 * p["value"] / (math.pi * p["r"] ** 2) for p in prof]
    i = int(np.argmax(vals))
    return {"value": vals[i], "argmax_r": radii[i], "tail": [radii[0], radii[-1]], "radii": radii, "values": vals}


def folner_agreement(curve: CurveMap, window: Region, radii, opts: QuadratureOptions = DEFAULT_QUAD) -> dict:
    """Disk and square Følner estimates at matched areas (square side ``sqrt(pi) R``)."""
    radii = tuple(radii)
    disks = rho_estimate(curve, FolnerSequence("disk", radii), window, opts)
    squares = rho_estimate(curve, FolnerSequence("square", tuple(math.sqrt(math.pi) * r for r in radii)), window, opts)
    rows = []
    for d, s in zip(disks.points, squares.points):
        scale = max(abs(d.rho), abs(s.rho))
        rel = abs(d.rho - s.rho) / scale if scale > 0 else 0.0
        rows.append({"area": d.area, "disk": d.rho, "square": s.rho, "relative_disagreement": rel, "absolute": abs(d.rho - s.rho)})
    return {"rows": rows, "disk": disks, "square": squares}
