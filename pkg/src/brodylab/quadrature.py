"""Adaptive tensor Gauss-Legendre quadrature over dyadic rectangle tiles.

A tile is accepted once splitting it into four children changes its integral
by no more than ``max(rtol*|I|, atol*area_fraction)``; the children's sum is
kept and the change is recorded as the tile's error.  Tiles are processed
level by level and their values reduced with ``math.fsum``, so the result does
not depend on batching or on the number of worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureNonConvergent
from .parallel import exact_sum, pmap


@dataclass(frozen=True)
class QuadratureOptions:
    order: int = 16
    rtol: float = 1e-10
    atol: float = 1e-13
    max_depth: int = 22
    initial_cell: float = 2.0
    fail_tol: float = 1e-6
    batch_points: int = 400_000
    threads: int | None = None


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    depth: int
    tiles: int


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _tile_rule(tiles: np.ndarray, order: int):
    """Nodes (u, v) and weights for a batch of tiles ``(u0, u1, v0, v1)``."""
    x, w = gauss_legendre(order)
    u0, u1, v0, v1 = tiles.T
    hu = (u1 - u0) / 2
    hv = (v1 - v0) / 2
    U = (u0 + u1)[:, None] / 2 + hu[:, None] * x[None, :]
    V = (v0 + v1)[:, None] / 2 + hv[:, None] * x[None, :]
    UU = np.repeat(U[:, :, None], order, axis=2)
    VV = np.repeat(V[:, None, :], order, axis=1)
    W = (hu * hv)[:, None, None] * (w[:, None] * w[None, :])[None, :, :]
    return UU, VV, W


def _evaluate(fn, tiles: np.ndarray, opts: QuadratureOptions) -> np.ndarray:
    per_tile = opts.order**2
    chunk = max(opts.batch_points // per_tile, 1)
    pieces = [tiles[i : i + chunk] for i in range(0, len(tiles), chunk)]

    def run(piece):
        U, V, W = _tile_rule(piece, opts.order)
        vals = fn(U.ravel(), V.ravel()).reshape(U.shape)
        return np.sum(vals * W, axis=(1, 2))

    if not pieces:
        return np.zeros(0)
    return np.concatenate(pmap(run, pieces, opts.threads))


def _children(tiles: np.ndarray) -> np.ndarray:
    u0, u1, v0, v1 = tiles.T
    um = (u0 + u1) / 2
    vm = (v0 + v1) / 2
    kids = np.stack(
        [
            np.stack([u0, um, v0, vm], axis=1),
            np.stack([um, u1, v0, vm], axis=1),
            np.stack([u0, um, vm, v1], axis=1),
            np.stack([um, u1, vm, v1], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 4)


def initial_tiles(u0, u1, v0, v1, nu: int, nv: int) -> np.ndarray:
    us = np.linspace(u0, u1, nu + 1)
    vs = np.linspace(v0, v1, nv + 1)
    return np.array([[us[i], us[i + 1], vs[j], vs[j + 1]] for i in range(nu) for j in range(nv)], dtype=float)


def integrate_tiles(fn, tiles: np.ndarray, opts: QuadratureOptions = QuadratureOptions()) -> QuadResult:
    """Adaptive integral of ``fn(u, v)`` over the union of ``tiles``.

    ``fn`` takes two flat float arrays and returns a flat array of values.
    """
    tiles = np.asarray(tiles, dtype=float).reshape(-1, 4)
    total_area = float(np.sum((tiles[:, 1] - tiles[:, 0]) * (tiles[:, 3] - tiles[:, 2])))
    parent = _evaluate(fn, tiles, opts)
    accepted: list[float] = []
    errors: list[float] = []
    depth = 0
    ntiles = 0
    active = tiles
    while len(active):
        kids = _children(active)
        kid_vals = _evaluate(fn, kids, opts).reshape(-1, 4)
        refined = np.array([exact_sum(row) for row in kid_vals])
        diff = np.abs(refined - parent)
        area = (active[:, 1] - active[:, 0]) * (active[:, 3] - active[:, 2])
        tol = np.maximum(opts.rtol * np.abs(refined), opts.atol * area / total_area)
        ok = diff <= tol
        if depth >= opts.max_depth:
            ok[:] = True
        accepted.extend(refined[ok].tolist())
        errors.extend(diff[ok].tolist())
        ntiles += int(np.sum(ok))
        active = kids.reshape(-1, 4, 4)[~ok].reshape(-1, 4)
        parent = kid_vals[~ok].ravel()
        depth += 1
    value = exact_sum(accepted)
    error = exact_sum(errors)
    if not math.isfinite(value) or error > opts.fail_tol * max(1.0, abs(value)):
        raise QuadratureNonConvergent(f"quadrature error {error:.3g} exceeds tolerance at depth {depth}")
    return QuadResult(value, error, depth, ntiles)


def fixed_rule(tiles: np.ndarray, order: int):
    """Flattened composite Gauss-Legendre nodes and weights (no adaptivity)."""
    U, V, W = _tile_rule(np.asarray(tiles, dtype=float).reshape(-1, 4), order)
    return U.ravel(), V.ravel(), W.ravel()
