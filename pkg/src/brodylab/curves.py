"""Holomorphic curves C -> CP^N, projective points, spherical derivative.

Every curve evaluates to a local holomorphic lift ``F`` together with its
derivative ``dF``; all geometric quantities are computed from the lift with
formulas that are invariant under ``F -> lambda F``, so charts and poles never
need special handling.  Evaluation is vectorised: ``z`` may be any complex
array and lifts have shape ``(N+1,) + z.shape``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import elliptic
from .errors import LiftUndefined
from .regions import Region

SQRT_PI = math.sqrt(math.pi)
FS_DIAMETER = SQRT_PI / 2


# ---------------------------------------------------------------------------
# projective points


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of CP^N stored as a unit-norm homogeneous vector."""

    coords: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.coords, dtype=complex).ravel().copy()
        n = np.linalg.norm(v)
        if not n > 0 or not np.isfinite(n):
            raise ValueError("projective point needs a nonzero finite coordinate vector")
        v /= n
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @property
    def N(self) -> int:
        return self.coords.size - 1


def _fs_angle(F, G):
    """Fubini-Study angle between the lines spanned by ``F`` and ``G`` (axis 0).

    Uses ``atan2(|G_perp|, |<F,G>|)`` on normalised vectors, which stays
    accurate for nearly equal points where ``arccos`` would lose half the digits.
    """
    F = np.asarray(F, dtype=complex)
    G = np.asarray(G, dtype=complex)
    u = F / np.linalg.norm(F, axis=0)
    v = G / np.linalg.norm(G, axis=0)
    ip = np.sum(np.conj(u) * v, axis=0)
    perp = v - ip * u
    angle = np.arctan2(np.linalg.norm(perp, axis=0), np.abs(ip))
    return np.where(np.all(u == v, axis=0), 0.0, angle)


def fs_distance(p, q):
    """Fubini-Study distance, ``arccos|<u,v>| / sqrt(pi)``; diameter ``sqrt(pi)/2``.

    Accepts ``ProjectivePoint`` instances or raw homogeneous arrays whose
    first axis indexes coordinates.
    """
    a = p.coords if isinstance(p, ProjectivePoint) else p
    b = q.coords if isinstance(q, ProjectivePoint) else q
    d = _fs_angle(a, b) / SQRT_PI
    return float(d) if np.ndim(d) == 0 else d


# ---------------------------------------------------------------------------
# lifts


@dataclass(frozen=True, eq=False)
class Lift:
    F: np.ndarray
    dF: np.ndarray
    scale_exponent: np.ndarray


def _rescale_pow2(F, dF):
    mag = np.max(np.abs(F), axis=0)
    if np.any(~(mag > 0)):
        raise LiftUndefined("all homogeneous components vanish")
    _, e = np.frexp(mag)
    scale = np.ldexp(1.0, -e)
    return F * scale, dF * scale, e


class CurveMap:
    """Base class.  Subclasses implement ``_raw_lift(z) -> (F, dF)``."""

    N: int

    def _raw_lift(self, z: np.ndarray):
        raise NotImplementedError

    def lift_arrays(self, z):
        z = np.asarray(z, dtype=complex)
        F, dF = self._raw_lift(z)
        F, dF, _ = _rescale_pow2(F, dF)
        return F, dF

    def describe(self) -> dict:
        from .io import curve_to_dict

        return curve_to_dict(self)


def lift(curve: CurveMap, z) -> Lift:
    """Rescaled local holomorphic lift of ``curve`` at ``z`` and its derivative."""
    z = np.asarray(z, dtype=complex)
    F, dF = curve._raw_lift(z)
    F, dF, e = _rescale_pow2(F, dF)
    return Lift(F, dF, e)


def spherical_derivative_from_lift(F, dF):
    """``sqrt(sum_{i<j} |F_i F_j' - F_j F_i'|^2) / (sqrt(pi) |F|^2)``."""
    n = F.shape[0]
    wr2 = np.zeros(F.shape[1:])
    for i in range(n):
        for j in range(i + 1, n):
            w = F[i] * dF[j] - F[j] * dF[i]
            wr2 = wr2 + (w.real**2 + w.imag**2)
    norm2 = np.sum(F.real**2 + F.imag**2, axis=0)
    return np.sqrt(wr2) / (SQRT_PI * norm2)


def spherical_derivative(curve: CurveMap, z):
    F, dF = curve.lift_arrays(z)
    out = spherical_derivative_from_lift(F, dF)
    return float(out) if np.ndim(out) == 0 else out


def evaluate_point(curve: CurveMap, z) -> ProjectivePoint:
    F, _ = curve.lift_arrays(complex(z))
    return ProjectivePoint(F)


# ---------------------------------------------------------------------------
# variants


def _trim(c):
    c = np.asarray(c, dtype=complex)
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)


def _remove_common_roots(comps, tol=1e-9):
    comps = [_trim(c) for c in comps]
    if all(np.all(c == 0) for c in comps):
        raise LiftUndefined("all components are identically zero")
    for _ in range(64):
        live = [c for c in comps if np.any(c != 0)]
        degs = [len(c) - 1 for c in live]
        if min(degs) == 0:
            break
        pivot = live[int(np.argmin(degs))]
        found = None
        for r in np.roots(pivot[::-1]):
            if all(
                abs(np.polyval(c[::-1], r)) <= tol * max(1.0, np.sum(np.abs(c)) * max(1.0, abs(r)) ** (len(c) - 1))
                for c in live
            ):
                found = r
                break
        if found is None:
            break
        new = []
        for c in comps:
            if np.all(c == 0):
                new.append(c)
                continue
            q, _ = np.polydiv(c[::-1], np.array([1.0, -found]))
            new.append(_trim(np.asarray(q)[::-1]))
        comps = new
    return comps


@dataclass(frozen=True, eq=False)
class Rational(CurveMap):
    """Polynomial homogeneous components, coefficients in ascending degree.

    Common roots are divided out at construction so the lift never vanishes.
    """

    coefficients: tuple

    def __post_init__(self):
        comps = _remove_common_roots(self.coefficients)
        object.__setattr__(self, "coefficients", tuple(tuple(complex(x) for x in c) for c in comps))

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    @property
    def degree(self) -> int:
        return max(len(_trim(c)) - 1 for c in self.coefficients)

    @cached_property
    def _polys(self):
        out = []
        for c in self.coefficients:
            c = np.asarray(c, dtype=complex)
            dc = c[1:] * np.arange(1, len(c)) if len(c) > 1 else np.zeros(1, dtype=complex)
            out.append((c[::-1], dc[::-1]))
        return out

    def _raw_lift(self, z):
        F = np.stack([np.polyval(p, z) for p, _ in self._polys])
        dF = np.stack([np.polyval(dp, z) * np.ones_like(z) for _, dp in self._polys])
        return F, dF

    def inverted(self) -> Rational:
        """The curve ``w -> f(1/w)`` with polynomial lift ``w^d F(1/w)``."""
        d = self.degree
        comps = []
        for c in self.coefficients:
            c = list(c) + [0j] * (d + 1 - len(c))
            comps.append(tuple(c[::-1]))
        return Rational(tuple(comps))


def constant_curve(coords) -> Rational:
    return Rational(tuple((complex(c),) for c in coords))


def identity_curve() -> Rational:
    """``f(z) = z`` as ``[1 : z]``."""
    return Rational(((1,), (0, 1)))


@dataclass(frozen=True, eq=False)
class ExpSum(CurveMap):
    """Affine chart ``[1 : f_1 : ... : f_N]`` with ``f_i = sum c z^k e^{lam z}``.

    ``components`` is a tuple (one per ``f_i``) of tuples of ``(c, k, lam)``.
    The lift is multiplied by ``exp(-S(z))`` with ``S`` the largest real
    exponent so that ``|Re z| > 700`` does not overflow.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(tuple((complex(c), int(k), complex(lam)) for c, k, lam in comp) for comp in self.components)
        if not comps:
            raise ValueError("need at least one affine component")
        object.__setattr__(self, "components", comps)

    @property
    def N(self) -> int:
        return len(self.components)

    def _raw_lift(self, z):
        shift = np.zeros(z.shape)
        for comp in self.components:
            for _, _, lam in comp:
                shift = np.maximum(shift, (lam * z).real)
        F = [np.exp(-shift).astype(complex)]
        dF = [np.zeros(z.shape, dtype=complex)]
        for comp in self.components:
            val = np.zeros(z.shape, dtype=complex)
            der = np.zeros(z.shape, dtype=complex)
            for c, k, lam in comp:
                e = np.exp(lam * z - shift)
                zk = z**k if k else np.ones_like(z)
                val = val + c * zk * e
                dzk = k * z ** (k - 1) if k else np.zeros_like(z)
                der = der + c * (dzk + lam * zk) * e
            F.append(val)
            dF.append(der)
        return np.stack(F), np.stack(dF)


def exp_curve(lam: complex = 1.0, c: complex = 1.0) -> ExpSum:
    """``[1 : c e^{lam z}]``."""
    return ExpSum((((c, 0, lam),),))


@dataclass(frozen=True, eq=False)
class Weierstrass(CurveMap):
    """``[h_0 : ... : h_N]`` with each ``h_j`` one of ``"1"``, ``"wp"``, ``"wpp"``.

    Within ``LAURENT_FRACTION`` of the shortest period from a lattice point the
    lift is multiplied by ``w^m`` (``w = z - lattice point``, ``m`` the
    highest pole order) and evaluated from the Laurent series, so poles are
    ordinary points of the lift.
    """

    lattice: elliptic.Lattice
    components: tuple = ("1", "wp")

    LAURENT_FRACTION = 0.2
    LAURENT_TERMS = 40

    def __post_init__(self):
        comps = tuple(self.components)
        if any(c not in ("1", "wp", "wpp") for c in comps) or len(comps) < 2:
            raise ValueError("weierstrass components must be drawn from '1', 'wp', 'wpp'")
        object.__setattr__(self, "components", comps)

    @property
    def N(self) -> int:
        return len(self.components) - 1

    @cached_property
    def _pole_order(self) -> int:
        return 3 if "wpp" in self.components else (2 if "wp" in self.components else 0)

    @cached_property
    def _laurent(self):
        return self.lattice.laurent_coefficients(self.LAURENT_TERMS)

    def _raw_lift(self, z):
        shape = z.shape
        z = z.reshape(-1)
        lat = self.lattice
        p1, _ = lat.reduced_basis
        omega = lat.nearest_lattice_point(z)
        w = z - omega
        near = np.abs(w) < self.LAURENT_FRACTION * abs(p1)
        F = np.empty((self.N + 1,) + z.shape, dtype=complex)
        dF = np.empty_like(F)
        far = ~near
        if np.any(far):
            zf = z[far]
            P, dP = elliptic.wp_and_prime(zf, lat, check_poles=False)
            g2 = lat.g2
            for j, name in enumerate(self.components):
                if name == "1":
                    F[j][far], dF[j][far] = 1.0, 0.0
                elif name == "wp":
                    F[j][far], dF[j][far] = P, dP
                else:
                    F[j][far], dF[j][far] = dP, 6 * P**2 - g2 / 2
        if np.any(near):
            wn = w[near]
            m = self._pole_order
            c = self._laurent
            k2 = 2 * np.arange(2, 2 + c.size)
            powers = wn[..., None] ** k2  # w^(2k)
            S = np.sum(c * powers, axis=-1)  # wp = w^-2 (1 + S)
            A = np.sum(c * k2 * powers, axis=-1)  # w S'
            B = np.sum(c * k2 * (k2 - 1) * powers, axis=-1)  # w^2 S''
            safe_w = np.where(wn == 0, 1, wn)
            for j, name in enumerate(self.components):
                # h_j = w^e P(w); wdP is w P'(w)
                if name == "1":
                    e, P, wdP = m, np.ones_like(wn), np.zeros_like(wn)
                elif name == "wp":
                    e, P, wdP = m - 2, 1 + S, A
                else:
                    e, P, wdP = m - 3, -2 - 2 * S + A, B - A
                F[j][near] = wn**e * P
                if e == 0:
                    # w P' = O(w^4)
                    dF[j][near] = np.where(wn == 0, 0, wdP / safe_w)
                else:
                    dF[j][near] = wn ** (e - 1) * (e * P + wdP)
        return F.reshape((self.N + 1,) + shape), dF.reshape((self.N + 1,) + shape)


@dataclass(frozen=True, eq=False)
class Precomposed(CurveMap):
    """``z -> base(c z + b)``."""

    base: CurveMap
    c: complex = 1.0
    b: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "b", complex(self.b))
        if self.c == 0:
            raise ValueError("precomposition factor must be nonzero")

    @property
    def N(self) -> int:
        return self.base.N

    def _raw_lift(self, z):
        F, dF = self.base._raw_lift(self.c * z + self.b)
        return F, self.c * dF


def _as_unitary(U) -> np.ndarray:
    U = np.array(U, dtype=complex)
    U.setflags(write=False)
    return U


@dataclass(frozen=True, eq=False)
class Postcomposed(CurveMap):
    """``z -> U . base(z)`` for a unitary ``U``."""

    base: CurveMap
    U: np.ndarray

    def __post_init__(self):
        U = _as_unitary(self.U)
        n = self.base.N + 1
        if U.shape != (n, n):
            raise ValueError("unitary has wrong shape")
        if np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-10:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "U", U)

    @property
    def N(self) -> int:
        return self.base.N

    def _raw_lift(self, z):
        F, dF = self.base._raw_lift(z)
        return np.tensordot(self.U, F, axes=1), np.tensordot(self.U, dF, axes=1)


@dataclass(frozen=True, eq=False)
class Bump:
    """One glued rational bump: ``+ a/(z-p)^3`` on every affine component in the
    chart normalised by ``U`` (``U f(p) = [1:0:...:0]``)."""

    p: complex
    a: float
    U: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "U", _as_unitary(self.U))


@dataclass(frozen=True, eq=False)
class Glued(CurveMap):
    """Base curve with a finite sequence of bumps applied in order."""

    base: CurveMap
    bumps: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(self.bumps))

    @property
    def N(self) -> int:
        return self.base.N

    def _raw_lift(self, z):
        F, dF = self.base._raw_lift(z)
        for bump in self.bumps:
            F, dF, _ = _rescale_pow2(F, dF)
            U = bump.U
            H = np.tensordot(U, F, axes=1)
            dH = np.tensordot(U, dF, axes=1)
            w = z - bump.p
            w2 = w * w
            w3 = w2 * w
            G = np.empty_like(H)
            dG = np.empty_like(H)
            G[0] = H[0] * w3
            dG[0] = dH[0] * w3 + 3 * H[0] * w2
            G[1:] = H[1:] * w3 + bump.a * H[0]
            dG[1:] = dH[1:] * w3 + 3 * H[1:] * w2 + bump.a * dH[0]
            Uh = U.conj().T
            F = np.tensordot(Uh, G, axes=1)
            dF = np.tensordot(Uh, dG, axes=1)
        return F, dF


# ---------------------------------------------------------------------------
# unitary normalisation and sup search


def householder_to_e0(x) -> np.ndarray:
    """Unitary ``U`` with ``U x = |x| e_0`` (image real-positive).

    Identity-up-to-phase when ``x`` is already a multiple of ``e_0``.
    """
    x = np.asarray(x, dtype=complex).ravel()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise LiftUndefined("zero vector has no normalisation")
    x = x / nrm
    n = x.size
    if np.all(x[1:] == 0):
        U = np.eye(n, dtype=complex)
        U[0, 0] = np.conj(x[0]) / abs(x[0])
        return U
    phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
    v = x.copy()
    v[0] += phase
    H = np.eye(n, dtype=complex) - 2 * np.outer(v, v.conj()) / np.vdot(v, v).real
    return -np.conj(phase) * H


def unitary_to_origin(curve: CurveMap, p: complex):
    """Return ``(g, U)`` with ``g(z) = U f(z + p)`` and ``g(0) = [1:0:...:0]``."""
    F, _ = curve.lift_arrays(complex(p))
    U = householder_to_e0(F)
    return Postcomposed(Precomposed(curve, 1.0, p), U), U


def _refine_max(fn, region: Region, starts, step, min_step):
    """Compass search for local maxima of ``fn`` from several starts, kept inside ``region``."""
    pts = np.asarray(starts, dtype=complex)
    vals = fn(pts)
    h = np.full(pts.shape, step / 2)
    dirs = np.exp(2j * np.pi * np.arange(8) / 8)
    for _ in range(200):
        active = h >= min_step
        if not np.any(active):
            break
        cand = region.project(pts[active, None] + h[active, None] * dirs[None, :])
        cv = fn(cand.ravel()).reshape(cand.shape)
        best = np.argmax(cv, axis=1)
        bv = cv[np.arange(cand.shape[0]), best]
        improve = bv > vals[active]
        idx = np.nonzero(active)[0]
        pts[idx[improve]] = cand[np.arange(cand.shape[0]), best][improve]
        vals[idx[improve]] = bv[improve]
        h[idx[~improve]] /= 2
    return pts, vals


def sup_of_field(fn, region: Region, resolution: float, top: int = 8):
    """Grid maximum of a scalar field followed by local refinement.

    Returns ``(value, argmax)``; the value is a lower bound of the true sup.
    """
    pts = region.grid(resolution)
    vals = fn(pts)
    order = np.argsort(-vals, kind="stable")[:top]
    rp, rv = _refine_max(fn, region, pts[order], resolution, resolution * 1e-6)
    i = int(np.argmax(rv))
    if rv[i] >= vals[order[0]]:
        return float(rv[i]), complex(rp[i])
    return float(vals[order[0]]), complex(pts[order[0]])


def sup_spherical_derivative(curve: CurveMap, region: Region, resolution: float):
    """Lower bound for ``sup |df|`` over ``region`` and the point attaining it."""
    return sup_of_field(lambda z: spherical_derivative_from_lift(*curve.lift_arrays(z)), region, resolution)
