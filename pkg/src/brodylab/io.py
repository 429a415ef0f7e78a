"""Curve documents (JSON) and output records.

A curve document is a JSON object with a ``type`` key::

    {"type": "rational", "components": [[[1, 0]], [[0, 0], [1, 0]]]}
    {"type": "expsum", "components": [[{"c": [1, 0], "k": 0, "lambda": [1, 0]}]]}
    {"type": "weierstrass", "lattice": {"hexagonal": 1.0}, "components": ["1", "wp"]}
    {"type": "weierstrass", "lattice": {"omega1": [1, 0], "omega2": [0.2, 1.1]}}
    {"type": "precomposed", "base": {...}, "c": [0.5, 0], "b": [0, 0]}
    {"type": "postcomposed", "base": {...}, "U": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
    {"type": "glued", "base": {...}, "bumps": [{"p": [0, 0], "a": 1241.3, "U": [...]}]}

Complex numbers are ``[re, im]`` pairs; rational coefficients are listed in
ascending degree.  A document may carry an ``id`` key, which is ignored on
load.  ``curve_from_dict(curve_to_dict(c))`` reproduces ``c`` exactly
(floats are written with full precision).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import elliptic
from .curves import Bump, CurveMap, ExpSum, Glued, Postcomposed, Precomposed, Rational, Weierstrass
from .errors import ParseError

SCHEMA_VERSION = 1


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _z(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ParseError(f"expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _matrix_to(U) -> list:
    return [[_c(x) for x in row] for row in np.asarray(U)]


def _matrix_from(rows) -> np.ndarray:
    return np.array([[_z(x) for x in row] for row in rows], dtype=complex)


def lattice_to_dict(lat: elliptic.Lattice) -> dict:
    if lat.label and lat.label.startswith("hexagonal:"):
        return {"hexagonal": float(lat.label.split(":", 1)[1])}
    return {"omega1": _c(lat.omega1), "omega2": _c(lat.omega2)}


def lattice_from_dict(d: dict) -> elliptic.Lattice:
    if "hexagonal" in d:
        return elliptic.hexagonal_lattice(float(d["hexagonal"]))
    try:
        return elliptic.Lattice(_z(d["omega1"]), _z(d["omega2"]))
    except KeyError as exc:
        raise ParseError(f"lattice needs omega1 and omega2 or hexagonal: {d!r}") from exc


def curve_to_dict(curve: CurveMap) -> dict:
    if isinstance(curve, Rational):
        return {"type": "rational", "components": [[_c(x) for x in comp] for comp in curve.coefficients]}
    if isinstance(curve, ExpSum):
        return {
            "type": "expsum",
            "components": [[{"c": _c(c), "k": k, "lambda": _c(lam)} for c, k, lam in comp] for comp in curve.components],
        }
    if isinstance(curve, Weierstrass):
        return {"type": "weierstrass", "lattice": lattice_to_dict(curve.lattice), "components": list(curve.components)}
    if isinstance(curve, Precomposed):
        return {"type": "precomposed", "base": curve_to_dict(curve.base), "c": _c(curve.c), "b": _c(curve.b)}
    if isinstance(curve, Postcomposed):
        return {"type": "postcomposed", "base": curve_to_dict(curve.base), "U": _matrix_to(curve.U)}
    if isinstance(curve, Glued):
        return {
            "type": "glued",
            "base": curve_to_dict(curve.base),
            "bumps": [{"p": _c(b.p), "a": b.a, "U": _matrix_to(b.U)} for b in curve.bumps],
        }
    raise ParseError(f"cannot serialise {type(curve).__name__}")


def curve_from_dict(d: dict) -> CurveMap:
    if not isinstance(d, dict) or "type" not in d:
        raise ParseError("curve document must be an object with a 'type' key")
    kind = d["type"]
    try:
        if kind == "rational":
            return Rational(tuple(tuple(_z(x) for x in comp) for comp in d["components"]))
        if kind == "expsum":
            return ExpSum(
                tuple(tuple((_z(t["c"]), int(t.get("k", 0)), _z(t["lambda"])) for t in comp) for comp in d["components"])
            )
        if kind == "weierstrass":
            return Weierstrass(lattice_from_dict(d["lattice"]), tuple(d.get("components", ("1", "wp"))))
        if kind == "precomposed":
            return Precomposed(curve_from_dict(d["base"]), _z(d.get("c", [1, 0])), _z(d.get("b", [0, 0])))
        if kind == "postcomposed":
            return Postcomposed(curve_from_dict(d["base"]), _matrix_from(d["U"]))
        if kind == "glued":
            bumps = tuple(Bump(_z(b["p"]), float(b["a"]), _matrix_from(b["U"])) for b in d.get("bumps", []))
            return Glued(curve_from_dict(d["base"]), bumps)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad {kind} document: {exc}") from exc
    raise ParseError(f"unknown curve type {kind!r}")


def load_curve(path) -> CurveMap:
    try:
        with open(path) as fh:
            return curve_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def dump_curve(curve: CurveMap, path, curve_id: str | None = None) -> None:
    d = curve_to_dict(curve)
    if curve_id is not None:
        d = {"id": curve_id, **d}
    Path(path).write_text(json.dumps(d, indent=1) + "\n")


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def record_line(op: str, curve_id: str | None, value, params: dict, **extra) -> str:
    """One JSON-lines record; keys are sorted so output is byte-stable."""
    rec = {"schema": SCHEMA_VERSION, "op": op, "curve_id": curve_id, "value": value, "params": params}
    rec.update(extra)
    return json.dumps(_jsonable(rec), sort_keys=True)


def write_field_csv(path, curve: CurveMap, region, step: float) -> int:
    """Dump ``x, y, |df|`` on a grid of ``region``; returns the number of rows."""
    from .curves import spherical_derivative

    xmin, xmax, ymin, ymax = region.bbox
    xs = np.arange(xmin, xmax + step / 2, step)
    ys = np.arange(ymin, ymax + step / 2, step)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    Z = (X + 1j * Y).ravel()
    keep = region.contains(Z)
    Z = Z[keep]
    vals = spherical_derivative(curve, Z)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for z, v in zip(Z, vals):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v))])
    return int(Z.size)
