"""Numerical laboratory for Brody curves from the complex plane to projective space."""

from __future__ import annotations

from .curves import (
    CurveMap,
    ExpSum,
    Glued,
    Postcomposed,
    Precomposed,
    ProjectivePoint,
    Rational,
    Weierstrass,
    constant_curve,
    exp_curve,
    fs_distance,
    identity_curve,
    spherical_derivative,
)
from .elliptic import Lattice, hexagonal_lattice
from .errors import BrodyLabError
from .regions import Region

__version__ = "0.1.0"

__all__ = [
    "BrodyLabError",
    "CurveMap",
    "ExpSum",
    "Glued",
    "Lattice",
    "Postcomposed",
    "Precomposed",
    "ProjectivePoint",
    "Rational",
    "Region",
    "Weierstrass",
    "constant_curve",
    "exp_curve",
    "fs_distance",
    "hexagonal_lattice",
    "identity_curve",
    "spherical_derivative",
]
