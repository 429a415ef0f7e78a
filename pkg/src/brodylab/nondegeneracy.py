"""Windowed non-degeneracy profiles: how small can the sup of |df| over a disk of
radius R get as the disk's centre ranges over a window?
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d

from .curves import CurveMap, spherical_derivative
from .parallel import pmap
from .regions import Region

VERDICTS = ("nondegenerate-at-scale", "degenerate-trend", "inconclusive")


@dataclass(frozen=True)
class NondegeneracyCertificate:
    """Result of :func:`nondegeneracy_profile`.

    ``trend`` holds ``(window, delta_hat, argmin_center)`` for each window;
    ``delta_hat`` is the value for the largest window.
    """

    R: float
    window: Region
    center_step: float
    resolution: float
    delta_hat: float
    trend: tuple

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "window": self.window.to_dict(),
            "center_step": self.center_step,
            "resolution": self.resolution,
            "delta_hat": self.delta_hat,
            "trend": [
                {"window": w.to_dict(), "delta_hat": d, "argmin_center": [c.real, c.imag]} for w, d, c in self.trend
            ],
        }


def _disk_max_at(field: np.ndarray, rows: np.ndarray, cols: np.ndarray, radius_px: int) -> np.ndarray:
    """Max of ``field`` over the pixel disk of the given radius around each ``(row, col)``.

    The disk is a union of horizontal runs; one 1-D running max per run
    width replaces a 2-D footprint.
    """
    out = np.full(rows.shape, -np.inf)
    cache: dict[int, np.ndarray] = {}
    for dy in range(-radius_px, radius_px + 1):
        half = int(math.isqrt(radius_px * radius_px - dy * dy))
        if half not in cache:
            cache[half] = maximum_filter1d(field, size=2 * half + 1, axis=1, mode="nearest")
        out = np.maximum(out, cache[half][rows + dy, cols])
    return out


def nondegeneracy_profile(
    curve: CurveMap,
    R: float,
    windows,
    center_step: float | None = None,
    resolution: float | None = None,
    threads: int | None = None,
) -> NondegeneracyCertificate:
    """Min over centres ``a`` in each window of ``sup_{D_R(a)} |df|``.

    |df| is sampled once on a square pixel grid of step ``resolution``
    (default ``R/64``) covering the largest window plus a margin ``R``.
    Centres sit on one global lattice of step ``center_step`` (default
    ``R/8``, rounded to whole pixels) anchored at the centre of the first
    window, so nested windows share centres and the reported minima are
    non-increasing by construction.
    """
    windows = list(windows)
    if R <= 0 or not windows:
        raise ValueError("need R > 0 and at least one window")
    resolution = R / 64 if resolution is None else float(resolution)
    radius_px = max(int(round(R / resolution)), 1)
    h = R / radius_px
    stride = max(int(round((R / 8 if center_step is None else center_step) / h)), 1)

    origin = windows[0].center
    outer = windows[-1]
    xmin, xmax, ymin, ymax = outer.bbox
    i0 = int(math.floor((xmin - origin.real) / h)) - radius_px - 1
    i1 = int(math.ceil((xmax - origin.real) / h)) + radius_px + 1
    j0 = int(math.floor((ymin - origin.imag) / h)) - radius_px - 1
    j1 = int(math.ceil((ymax - origin.imag) / h)) + radius_px + 1
    xs = origin.real + h * np.arange(i0, i1 + 1)
    ys = origin.imag + h * np.arange(j0, j1 + 1)

    def row(y):
        return spherical_derivative(curve, xs + 1j * y)

    field = np.array(pmap(row, ys, threads))  # field[j, i] at (xs[i], ys[j])

    ci = np.arange(math.ceil(i0 / stride) * stride, i1 + 1, stride)
    cj = np.arange(math.ceil(j0 / stride) * stride, j1 + 1, stride)
    CI, CJ = np.meshgrid(ci, cj, indexing="xy")
    centers = (origin.real + h * CI) + 1j * (origin.imag + h * CJ)

    trend = []
    for w in windows:
        inside = w.contains(centers, slack=1e-9 * max(1.0, R))
        if not np.any(inside):
            raise ValueError(f"window {w.to_dict()} contains no centre at step {stride * h}")
        rows = CJ[inside] - j0
        cols = CI[inside] - i0
        sups = _disk_max_at(field, rows, cols, radius_px)
        k = int(np.argmin(sups))
        trend.append((w, float(sups[k]), complex(centers[inside][k])))
    return NondegeneracyCertificate(R, windows[-1], stride * h, h, trend[-1][1], tuple(trend))


def classify(cert: NondegeneracyCertificate, threshold: float) -> str:
    """Scale-qualified verdict from a profile.

    ``nondegenerate-at-scale`` when the final value clears ``threshold`` and
    the last two windows differ by under 5%; ``degenerate-trend`` when the
    value vanishes or falls by more than a factor 2 from first to last
    window; ``inconclusive`` otherwise.
    """
    vals = [d for _, d, _ in cert.trend]
    last = vals[-1]
    if last <= 0.0:
        return "degenerate-trend"
    if len(vals) >= 2 and vals[0] > 2 * last:
        return "degenerate-trend"
    if last >= threshold:
        if len(vals) < 2:
            return "nondegenerate-at-scale"
        prev = vals[-2]
        if abs(prev - last) / max(prev, last) < 0.05:
            return "nondegenerate-at-scale"
    return "inconclusive"


def decay_factors(cert: NondegeneracyCertificate) -> list[float]:
    """Ratios ``delta_hat[k] / delta_hat[k+1]`` between consecutive windows."""
    vals = [d for _, d, _ in cert.trend]
    return [a / b if b > 0 else math.inf for a, b in zip(vals[:-1], vals[1:])]
