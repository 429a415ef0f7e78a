"""Gluing cubic-pole rational bumps into a curve near places where it is
almost constant, and the tile-by-tile iteration that makes a Brody curve
non-degenerate on a finite window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import (
    SQRT_PI,
    Bump,
    CurveMap,
    Glued,
    Rational,
    fs_distance,
    householder_to_e0,
    spherical_derivative,
    sup_spherical_derivative,
)
from .energy import energy
from .errors import BoundViolated, Infeasible, PreconditionViolated
from .quadrature import QuadratureOptions
from .regions import Region

BUMP_PEAK = 1.0 / 12.0
MAX_R0_EXPONENT = 20


# ---------------------------------------------------------------------------
# constants


def bump_amplitude(N: int) -> float:
    """Amplitude ``a`` for which ``sup |d[1 : a/z^3 : ... : a/z^3]| = 1/12``.

    The peak sits at ``r^6 = N a^2 / 2`` with value
    ``2^(2/3) / (sqrt(pi) N^(1/6) a^(1/3))``; setting it to 1/12 gives
    ``a = 12^3 * 4 / (pi^(3/2) sqrt(N))``.
    """
    return 12.0**3 * 4.0 / (math.pi**1.5 * math.sqrt(N))


def bump_profile(r, a: float, N: int):
    """Closed-form ``|dq|`` at distance ``r`` from the pole of the bump."""
    r = np.asarray(r, dtype=float)
    return 3 * a * math.sqrt(N) * r**2 / (SQRT_PI * (r**6 + N * a * a))


def bump_peak_radius(a: float, N: int) -> float:
    return (N * a * a / 2) ** (1.0 / 6.0)


def _K_terms(a: float, N: int) -> tuple[float, float, float]:
    s = math.sqrt(N + 1)
    Ka = 4 * a * s * (SQRT_PI + 3 * a) + 3 * a
    Kpa = 4 * a * s * (SQRT_PI + 3 * a * math.sqrt(2) + 2 * a * SQRT_PI) + 3 * a * math.sqrt(2) + 2 * a * SQRT_PI
    K = max(a * math.sqrt(2 * N / math.pi), math.sqrt(N * Ka**2 + N * (N - 1) / 2 * Kpa**2) / SQRT_PI)
    return K, Ka, Kpa


def _max_eps(a: float, R0: float, N: int) -> float:
    eps = min(a / R0**3, 3 * a / (2 * R0**4), a / (2 * R0**3), a / R0**4)
    if N >= 2:
        # 2 R0^4 e^2 + (6a + 2a R0) e - a/sqrt(N(N-1)/2) <= 0
        A = 2 * R0**4
        B = 6 * a + 2 * a * R0
        C = -a / math.sqrt(N * (N - 1) / 2)
        root = (-B + math.sqrt(B * B - 4 * A * C)) / (2 * A)
        eps = min(eps, root)
    return eps


@dataclass(frozen=True)
class GluingConstants:
    N: int
    a: float
    delta0: float
    R0: float
    K: float
    eps_glue: float
    mode: str = "analytic"

    def checks(self) -> list[dict]:
        """Every inequality of the constants system evaluated directly."""
        N, a, d0, R0, K, e = self.N, self.a, self.delta0, self.R0, self.K, self.eps_glue
        peak = float(bump_profile(bump_peak_radius(a, N), a, N))
        K_formula, _, _ = _K_terms(a, N)
        rows = [
            ("bump peak = 1/12", abs(peak - BUMP_PEAK), 1e-12),
            ("delta0 <= 1/96", d0, 1 / 96),
            ("delta0 <= 1/6", d0, 1 / 6),
            ("eps <= a/R0^3", e, a / R0**3),
            ("eps <= 3a/(2 R0^4)", e, 3 * a / (2 * R0**4)),
            ("eps R0^3 <= a/2", e * R0**3, a / 2),
            ("R0^4 eps <= a", R0**4 * e, a),
            ("N a / R0^3 <= 2", N * a / R0**3, 2.0),
            ("N a^2 / R0^6 <= 1/2", N * a * a / R0**6, 0.5),
            ("K / R0^3 <= 1/2", K / R0**3, 0.5),
            ("K >= formula", K_formula, K),
        ]
        if N >= 2:
            rows.append(
                ("pair bound", 2 * e * e * R0**4 + 6 * a * e + 2 * a * e * R0, a / math.sqrt(N * (N - 1) / 2))
            )
        tol = 1e-12
        return [{"name": n, "lhs": l, "rhs": r, "ok": bool(l <= r * (1 + tol))} for n, l, r in rows]

    def satisfied(self) -> bool:
        return all(c["ok"] for c in self.checks())

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "a": self.a,
            "delta0": self.delta0,
            "R0": self.R0,
            "K": self.K,
            "eps_glue": self.eps_glue,
            "mode": self.mode,
        }


def solve_constants(N: int, mode: str = "analytic", R0: float | None = None, K: float | None = None) -> GluingConstants:
    """Constants for the single-bump gluing.

    ``analytic``: ``a`` from the 1/12 normalisation, ``K`` from its formula,
    the smallest dyadic ``R0 = 2^k`` (``k <= 20``) satisfying every
    inequality, ``delta0 = 1/96`` and the largest admissible ``eps_glue``.

    ``empirical``: same ``a`` and ``delta0``; ``R0`` (default 5) and ``K``
    (default ``a sqrt(2N/pi)``, the far-field bound on the FS displacement)
    are taken as given and are only validated after gluing.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    a = bump_amplitude(N)
    delta0 = 1.0 / 96.0
    if mode == "analytic":
        K_val, _, _ = _K_terms(a, N)
        for k in range(MAX_R0_EXPONENT + 1):
            r0 = 2.0**k
            c = GluingConstants(N, a, delta0, r0, K_val, _max_eps(a, r0, N), "analytic")
            if c.satisfied():
                return c
        raise Infeasible(f"no R0 <= 2^{MAX_R0_EXPONENT} satisfies the constants system for N={N}")
    if mode == "empirical":
        r0 = 5.0 if R0 is None else float(R0)
        K_val = a * math.sqrt(2 * N / math.pi) if K is None else float(K)
        return GluingConstants(N, a, delta0, r0, K_val, _max_eps(a, r0, N), "empirical")
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# single bump


def bump_curve(a: float, N: int) -> Rational:
    """``[z^3 : a : ... : a]``, i.e. ``[1 : a/z^3 : ... : a/z^3]``."""
    comps = [[0, 0, 0, 1]] + [[a] for _ in range(N)]
    return Rational(comps)


def glue_once(
    f: CurveMap,
    p: complex,
    R: float,
    consts: GluingConstants,
    resolution: float | None = None,
    check: bool = True,
) -> Glued:
    """Add ``a/(z-p)^3`` to every affine coordinate in the chart centred at ``f(p)``.

    The chart is fixed by the Householder unitary sending ``f(p)`` to
    ``[1:0:...:0]``; it is stored with the bump so the result is exactly
    evaluable.  Bumps already present on a :class:`Glued` input are kept and
    the new one is appended.
    """
    p = complex(p)
    if check:
        if R < consts.R0 + 1:
            raise PreconditionViolated(f"R = {R} is below R0 + 1 = {consts.R0 + 1}")
        res = R / 32 if resolution is None else resolution
        s, where = sup_spherical_derivative(f, Region.disk(p, R), res)
        if s >= consts.delta0:
            raise PreconditionViolated(f"sup |df| on D_R(p) is {s:.6g} >= delta0 = {consts.delta0:.6g} (at {where})")
    F, _ = f.lift_arrays(p)
    U = householder_to_e0(F)
    bump = Bump(p, consts.a, U)
    if isinstance(f, Glued):
        return Glued(f.base, f.bumps + (bump,))
    return Glued(f, (bump,))


@dataclass(frozen=True)
class ConditionResult:
    name: str
    measured: float
    bound: float
    passed: bool
    slope: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"name": self.name, "measured": self.measured, "bound": self.bound, "passed": self.passed}
        if self.slope is not None:
            d["slope"] = self.slope
        d.update(self.detail)
        return d


@dataclass(frozen=True)
class GluingReport:
    p: complex
    R: float
    K: float
    annulus: tuple
    conditions: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "p": [self.p.real, self.p.imag],
            "R": self.R,
            "K": self.K,
            "annulus": list(self.annulus),
            "passed": self.passed,
            "conditions": [c.to_dict() for c in self.conditions],
        }


def _loglog_slope(r: np.ndarray, y: np.ndarray) -> float:
    ok = y > 0
    if np.count_nonzero(ok) < 2:
        return -math.inf
    return float(np.polyfit(np.log(r[ok]), np.log(y[ok]), 1)[0])


def verify_glue(
    f: CurveMap,
    g: CurveMap,
    p: complex,
    R: float,
    K: float,
    annulus: tuple | None = None,
    delta0: float = 1.0 / 96.0,
    n_radii: int = 48,
    n_angles: int = 256,
    resolution: float | None = None,
    slope_target: float = -3.0,
    slope_tol: float = 0.1,
) -> GluingReport:
    """Measure the three single-bump conditions for ``g`` glued to ``f`` at ``p``.

    (i) ``delta0 <= sup_{D_R(p)} |dg| <= 2/3``.

    (ii) ``||dg| - |df|| * |z-p|^3`` over the annulus: the sup must be at
    most ``K`` and the circle-wise sups must decay at least cubically
    (fitted log-log slope ``<= slope_target + slope_tol``).

    (iii) ``d(f, g) * |z-p|^3``: sup at most ``K`` and fitted slope within
    ``slope_tol`` of ``slope_target``.

    Radii are log-spaced over the annulus; slopes are fitted on the outer
    half (in log scale), where the bump is in its far-field regime.
    """
    p = complex(p)
    r_in, r_out = (R, 32 * R) if annulus is None else annulus
    if r_out <= r_in:
        raise ValueError("annulus must have R_out > R")
    res = R / 64 if resolution is None else resolution
    s_in, where = sup_spherical_derivative(g, Region.disk(p, R), res)
    cond_i = ConditionResult(
        "i", s_in, 2.0 / 3.0, bool(delta0 <= s_in <= 2.0 / 3.0), detail={"lower": delta0, "argmax": [where.real, where.imag]}
    )

    radii = np.geomspace(r_in, r_out, n_radii)
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    Z = p + radii[:, None] * np.exp(1j * theta)[None, :]
    z = Z.ravel()
    dev_ii = np.abs(spherical_derivative(g, z) - spherical_derivative(f, z)).reshape(Z.shape)
    Ff, _ = f.lift_arrays(z)
    Fg, _ = g.lift_arrays(z)
    dev_iii = fs_distance(Ff, Fg).reshape(Z.shape)
    circ_ii = dev_ii.max(axis=1)
    circ_iii = dev_iii.max(axis=1)
    pref_ii = float(np.max(circ_ii * radii**3))
    pref_iii = float(np.max(circ_iii * radii**3))
    outer = radii >= math.sqrt(r_in * r_out)
    slope_ii = _loglog_slope(radii[outer], circ_ii[outer])
    slope_iii = _loglog_slope(radii[outer], circ_iii[outer])
    cond_ii = ConditionResult(
        "ii", pref_ii, K, bool(pref_ii <= K and slope_ii <= slope_target + slope_tol), slope_ii
    )
    cond_iii = ConditionResult(
        "iii", pref_iii, K, bool(pref_iii <= K and abs(slope_iii - slope_target) <= slope_tol), slope_iii
    )
    return GluingReport(p, R, K, (r_in, r_out), (cond_i, cond_ii, cond_iii))


# ---------------------------------------------------------------------------
# tiling iteration


@dataclass(frozen=True)
class TilingPlan:
    """Square tiles of half-side ``R`` centred at ``2R(alpha + i beta)``."""

    R: float
    indices: tuple

    def __post_init__(self):
        idx = tuple((int(a), int(b)) for a, b in self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate tile index")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def square(cls, R: float, half_count: int, order: str = "spiral") -> TilingPlan:
        """``(2 half_count + 1)^2`` tiles around the origin."""
        idx = [(a, b) for a in range(-half_count, half_count + 1) for b in range(-half_count, half_count + 1)]
        if order == "spiral":
            idx.sort(key=lambda t: (max(abs(t[0]), abs(t[1])), math.atan2(t[1], t[0]) % (2 * math.pi)))
        elif order == "rows":
            idx.sort(key=lambda t: (t[1], t[0]))
        elif order == "reverse-spiral":
            idx.sort(key=lambda t: (-max(abs(t[0]), abs(t[1])), -(math.atan2(t[1], t[0]) % (2 * math.pi))))
        else:
            raise ValueError(f"unknown order {order!r}")
        return cls(R, tuple(idx))

    def center(self, idx) -> complex:
        a, b = idx
        return 2 * self.R * complex(a, b)

    def tile(self, idx) -> Region:
        return Region.centered_square(self.center(idx), 2 * self.R)

    def interior(self) -> list:
        s = set(self.indices)
        return [
            t for t in self.indices if all((t[0] + da, t[1] + db) in s for da in (-1, 0, 1) for db in (-1, 0, 1))
        ]

    def bounding_square(self) -> Region:
        a = [t[0] for t in self.indices]
        b = [t[1] for t in self.indices]
        lo = complex(2 * self.R * min(a) - self.R, 2 * self.R * min(b) - self.R)
        side = 2 * self.R * (max(max(a) - min(a), max(b) - min(b)) + 1)
        return Region.square(lo, side)

    def to_dict(self) -> dict:
        return {"R": self.R, "indices": [list(t) for t in self.indices]}


def lattice_tail_bound(K: float, R: float, ring: int, terms: int = 100_000) -> float:
    """``sum_{max(|m|,|n|) >= ring} K / (2R max(|m|,|n|) - R)^3``.

    Bounds the influence at a point of a tile from bumps at tiles ``ring``
    or more rings away (there are ``8k`` tiles in ring ``k``).  The sum is
    taken exactly to ``terms`` rings and the remainder bounded by its
    integral.
    """
    k = np.arange(max(ring, 1), max(ring, 1) + terms, dtype=float)
    body = math.fsum(8 * k / (R * (2 * k - 1)) ** 3)
    kk = k[-1] + 1
    # int_{kk-1}^inf 8x/(R(2x-1))^3 dx, closed form
    x = kk - 1
    tail = 8 / R**3 * ((4 * x - 1) / (8 * (2 * x - 1) ** 2))
    return K * (body + tail)


@dataclass(frozen=True)
class TileRecord:
    tile: tuple
    case: int
    center: complex
    sup_f: float
    sup_before: float
    sup_after: float
    energy_before: float
    energy_after: float
    interior: bool

    def to_dict(self) -> dict:
        return {
            "tile": list(self.tile),
            "case": self.case,
            "center": [self.center.real, self.center.imag],
            "sup_f": self.sup_f,
            "sup_before": self.sup_before,
            "sup_after": self.sup_after,
            "energy_before": self.energy_before,
            "energy_after": self.energy_after,
            "interior": self.interior,
        }


@dataclass(frozen=True)
class TilingResult:
    curve: CurveMap
    records: tuple
    delta: float
    checks: tuple
    tail_bound: float

    @property
    def glued_tiles(self) -> list:
        return [r.tile for r in self.records if r.case == 3]

    def log_lines(self) -> list[dict]:
        return [r.to_dict() for r in self.records]


def _tile_sup(curve: CurveMap, tile: Region, resolution: float) -> float:
    return sup_spherical_derivative(curve, tile, resolution)[0]


def make_nondegenerate(
    f: CurveMap,
    eps: float,
    tau: float,
    plan: TilingPlan,
    consts: GluingConstants,
    resolution: float | None = None,
    sup_tolerance: float = 1e-6,
    quad: QuadratureOptions | None = None,
    check_energy: bool = True,
    raise_on_violation: bool = True,
) -> TilingResult:
    """Tile-by-tile gluing with the three-case rule.

    For each tile in plan order: keep the curve if the original ``f`` has
    sup at least ``delta = min(delta0, sqrt(eps))`` there (case 1), or if
    the current curve already reaches ``delta0`` (case 2); otherwise glue a
    bump at the tile centre (case 3).

    Afterwards, on tiles whose eight neighbours are in the plan: the sup of
    |dg| is at most ``max(1 - tau/2, 3/4)``, at least ``delta/2``, and the
    mean of ``|dg|^2`` is at least that of ``|df|^2`` minus ``eps``.  A failed
    check raises :class:`BoundViolated` (or is only logged when
    ``raise_on_violation`` is false).
    """
    if not (0 < tau <= 1):
        raise ValueError("tau must lie in (0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    R = plan.R
    if R < consts.R0 + 1:
        raise PreconditionViolated(f"tile half-side {R} is below R0 + 1 = {consts.R0 + 1}")
    res = R / 32 if resolution is None else resolution
    quad = quad or QuadratureOptions(rtol=1e-9, initial_cell=max(R / 8, 1.0))
    window = plan.bounding_square()
    sup_window = sup_spherical_derivative(f, window, res)[0]
    if sup_window > 1 - tau + sup_tolerance:
        raise PreconditionViolated(f"sup |df| on the window is {sup_window:.6g} > 1 - tau = {1 - tau:.6g}")
    delta = min(consts.delta0, math.sqrt(eps))

    current = f
    raw = []
    for idx in plan.indices:
        tile = plan.tile(idx)
        sup_f = _tile_sup(f, tile, res)
        if sup_f >= delta:
            case, before = 1, (sup_f if current is f else _tile_sup(current, tile, res))
        else:
            before = sup_f if current is f else _tile_sup(current, tile, res)
            if before >= consts.delta0:
                case = 2
            else:
                case = 3
                current = glue_once(current, plan.center(idx), R, consts, resolution=res, check=False)
        raw.append((idx, case, sup_f, before))

    g = current
    interior = set(plan.interior())
    records = []
    for idx, case, sup_f, before in raw:
        tile = plan.tile(idx)
        after = _tile_sup(g, tile, res)
        e_before = e_after = float("nan")
        if check_energy and idx in interior:
            e_before = energy(f, tile, quad).value
            e_after = e_before if g is f else energy(g, tile, quad).value
        records.append(TileRecord(idx, case, plan.center(idx), sup_f, before, after, e_before, e_after, idx in interior))

    ceiling = max(1 - tau / 2, 0.75)
    area = (2 * R) ** 2
    checks = []
    for r in records:
        if not r.interior:
            continue
        checks.append({"tile": r.tile, "check": "sup <= max(1-tau/2, 3/4)", "value": r.sup_after, "bound": ceiling,
                       "ok": r.sup_after <= ceiling + sup_tolerance})
        checks.append({"tile": r.tile, "check": "sup >= delta/2", "value": r.sup_after, "bound": delta / 2,
                       "ok": r.sup_after >= delta / 2})
        if check_energy:
            lhs = r.energy_after / area
            rhs = r.energy_before / area - eps
            checks.append({"tile": r.tile, "check": "tile energy", "value": lhs, "bound": rhs,
                           "ok": lhs >= rhs - 1e-9})
    ring = 2  # interior tiles are at least two rings from anything outside the plan
    tail = lattice_tail_bound(consts.K, R, ring)
    result = TilingResult(g, tuple(records), delta, tuple(checks), tail)
    bad = [c for c in checks if not c["ok"]]
    if bad and raise_on_violation:
        raise BoundViolated(f"{len(bad)} postcondition(s) failed, first: {bad[0]}")
    return result
