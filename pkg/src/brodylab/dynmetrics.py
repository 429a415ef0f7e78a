"""The compact-open metric ``sum_n 10^-n sup_{|z|<=n} d(g(z), h(z))`` on
curves and its sup over translates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import FS_DIAMETER, CurveMap, _refine_max, fs_distance, spherical_derivative
from .parallel import pmap
from .regions import Region


@dataclass(frozen=True)
class DistanceOptions:
    """``n_max`` truncates the series; ``resolution`` is the sampling step.

    ``omega_step`` is the spacing of translates when a sup over a region of
    translates is taken.
    """

    n_max: int = 12
    resolution: float = 0.05
    omega_step: float = 0.25
    refine: bool = True
    threads: int | None = None

    def __post_init__(self):
        if self.n_max < 1 or self.resolution <= 0 or self.omega_step <= 0:
            raise ValueError("n_max >= 1 and positive steps required")

    @property
    def truncation_error(self) -> float:
        return FS_DIAMETER * 10.0 ** (-self.n_max) / 9.0


@dataclass(frozen=True)
class DistanceResult:
    value: float
    error_bound: float
    disk_sups: tuple
    translate: complex
    sampled_sup: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "disk_sups": list(self.disk_sups),
            "translate": [self.translate.real, self.translate.imag],
            "sampled_sup": self.sampled_sup,
        }


def pointwise_distance(g: CurveMap, h: CurveMap, z):
    Fg, _ = g.lift_arrays(z)
    Fh, _ = h.lift_arrays(z)
    return fs_distance(Fg, Fh)


def _weights(n_max: int) -> np.ndarray:
    return 10.0 ** (-np.arange(n_max + 1, dtype=float))


def _series(sups: np.ndarray, n_max: int) -> float:
    return math.fsum(_weights(n_max) * sups)


class _Sampler:
    """d(g, h) and |dg| + |dh| on a pixel grid of step ``h`` covering the
    translates plus the largest disk."""

    def __init__(self, g, h, translates: np.ndarray, opts: DistanceOptions):
        self.g, self.h, self.opts = g, h, opts
        step = opts.resolution
        n = opts.n_max
        pad = int(math.ceil(n / step)) + 1
        self.step = step
        self.origin = complex(translates[0])
        rel = (translates - self.origin) / step
        self.ti = np.rint(rel.real).astype(int)
        self.tj = np.rint(rel.imag).astype(int)
        self.i0 = int(self.ti.min()) - pad
        self.j0 = int(self.tj.min()) - pad
        i1 = int(self.ti.max()) + pad
        j1 = int(self.tj.max()) + pad
        xs = self.origin.real + step * np.arange(self.i0, i1 + 1)
        ys = self.origin.imag + step * np.arange(self.j0, j1 + 1)

        def row(y):
            z = xs + 1j * y
            return pointwise_distance(g, h, z), spherical_derivative(g, z) + spherical_derivative(h, z)

        rows = pmap(row, ys, opts.threads)
        self.d = np.array([r[0] for r in rows])
        self.lip = float(np.max([r[1].max() for r in rows]))

        # pixel offsets inside the largest disk, grouped by the smallest n whose disk holds them
        r = int(math.ceil(n / step))
        oi, oj = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="xy")
        dist = np.hypot(oi, oj) * step
        keep = dist <= n + 1e-12
        ring = np.ceil(dist[keep] - 1e-12).astype(int)
        order = np.argsort(ring, kind="stable")
        self.oi = oi[keep][order]
        self.oj = oj[keep][order]
        ring = ring[order]
        self.starts = np.searchsorted(ring, np.arange(n + 1))

    def disk_sups(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Sampled ``sup_{|z - a_k| <= n}`` for n = 0..n_max and the pixel attaining each."""
        rows = self.tj[k] - self.j0 + self.oj
        cols = self.ti[k] - self.i0 + self.oi
        vals = self.d[rows, cols]
        ring_max = np.maximum.reduceat(vals, self.starts)
        local = np.array(
            [s + int(np.argmax(vals[s:e])) for s, e in zip(self.starts, list(self.starts[1:]) + [vals.size])]
        )
        sups = np.maximum.accumulate(ring_max)
        where = np.empty_like(local)
        top = 0
        for n in range(local.size):
            if ring_max[n] > ring_max[top]:
                top = n
            where[n] = local[top]
        pts = self.origin + self.step * ((self.ti[k] + self.oi[where]) + 1j * (self.tj[k] + self.oj[where]))
        return sups, pts


def _translate_grid(omega, opts: DistanceOptions) -> np.ndarray:
    """Translates on the sampling lattice; the first one anchors the lattice."""
    if omega is None:
        return np.array([0j])
    if isinstance(omega, Region):
        c = omega.center
        k = max(int(round(opts.omega_step / opts.resolution)), 1) * opts.resolution
        xmin, xmax, ymin, ymax = omega.bbox
        ii = np.arange(math.floor((xmin - c.real) / k), math.ceil((xmax - c.real) / k) + 1)
        jj = np.arange(math.floor((ymin - c.imag) / k), math.ceil((ymax - c.imag) / k) + 1)
        I, J = np.meshgrid(ii, jj, indexing="xy")
        pts = (c + k * (I + 1j * J)).ravel()
        pts = pts[omega.contains(pts, slack=1e-9 * k)]
        return np.concatenate([[c], pts[pts != c]])
    return np.atleast_1d(np.asarray(omega, dtype=complex))


def dist_omega(g: CurveMap, h: CurveMap, omega=None, opts: DistanceOptions = DistanceOptions()) -> DistanceResult:
    """``sup_{a in omega} dist(g(. + a), h(. + a))`` over a translate grid.

    ``omega`` may be a :class:`Region`, an array of translates, or ``None``
    (the single translate 0).  Values are lower bounds at the sampled
    resolution; ``error_bound`` adds the series truncation to a Lipschitz
    estimate of the sampling slack (``(|dg| + |dh|) * step / sqrt(2)`` per
    disk, weighted by the series).

    Translate grids for nested regions with the same centre are nested, so
    with ``refine=False`` the value is monotone in ``omega``.  Refinement
    runs only at the winning translate and keeps that monotonicity up to
    ``error_bound``.
    """
    translates = _translate_grid(omega, opts)
    s = _Sampler(g, h, translates, opts)
    best_k, best_v, best_sups, best_pts = 0, -1.0, None, None
    for k in range(translates.size):
        sups, pts = s.disk_sups(k)
        v = _series(sups, opts.n_max)
        if v > best_v:
            best_k, best_v, best_sups, best_pts = k, v, sups, pts
    a = complex(s.origin + s.step * (s.ti[best_k] + 1j * s.tj[best_k]))
    sups = best_sups.copy()
    if opts.refine:
        fn = lambda z: pointwise_distance(g, h, z)
        for n in range(1, opts.n_max + 1):
            disk = Region.disk(a, n)
            rp, rv = _refine_max(fn, disk, [best_pts[n]], opts.resolution, opts.resolution * 1e-4)
            sups[n] = max(sups[n], float(rv[0]), sups[n - 1])
    value = _series(sups, opts.n_max)
    slack = s.lip * opts.resolution / math.sqrt(2) * math.fsum(_weights(opts.n_max)[1:])
    return DistanceResult(value, opts.truncation_error + slack, tuple(float(x) for x in sups), a, float(sups[-1]))


def curve_distance(g: CurveMap, h: CurveMap, opts: DistanceOptions = DistanceOptions()) -> DistanceResult:
    """Truncated compact-open distance between two curves."""
    return dist_omega(g, h, None, opts)


@dataclass(frozen=True)
class InequalityReport:
    dist: float
    sup_omega: float
    sup_all: float
    lhs: float
    rhs: float
    margin: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    def to_dict(self) -> dict:
        return {
            "dist": self.dist,
            "sup_omega": self.sup_omega,
            "sup_all": self.sup_all,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "slack": self.slack,
            "holds": self.holds,
        }


def dist_inequality_check(g: CurveMap, h: CurveMap, omega=None, opts: DistanceOptions = DistanceOptions()) -> InequalityReport:
    """Compare ``|dist_omega - sup_{omega} d|`` with ``(1/9) sup d``.

    ``sup d`` over the plane is replaced by the largest value seen on the
    sampled disks around the winning translate and on ``omega``.
    """
    res = dist_omega(g, h, omega, opts)
    translates = _translate_grid(omega, opts)
    on_omega = pointwise_distance(g, h, translates)
    sup_omega = float(np.max(on_omega))
    if isinstance(omega, Region) and opts.refine:
        _, rv = _refine_max(lambda z: pointwise_distance(g, h, z), omega, [translates[int(np.argmax(on_omega))]],
                            opts.omega_step, opts.omega_step * 1e-4)
        sup_omega = max(sup_omega, float(rv[0]))
    sup_all = max(res.sampled_sup, sup_omega)
    lhs = abs(res.value - sup_omega)
    rhs = sup_all / 9.0
    return InequalityReport(res.value, sup_omega, sup_all, lhs, rhs, rhs - lhs, res.error_bound)
