"""The torus-average constant ``2 pi / sqrt(3) * I^-2`` with
``I = int_1^inf dx / sqrt(x^3 - 1)``.

Both pieces of ``I`` become integrals of smooth bounded functions:

* on ``[1, 2]``, ``x = 1 + t^2`` removes the endpoint singularity and leaves
  ``2 / sqrt(x^2 + x + 1)`` for ``t`` in ``[0, 1]``;
* on ``[2, inf)``, ``x = s^-2`` leaves ``2 / sqrt(1 - s^6)`` for ``s`` in
  ``(0, 1/sqrt(2)]``.

Composite Gauss-Legendre panels are doubled until two successive values
agree; the last difference is the reported error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureNonConvergent
from .quadrature import gauss_legendre


def _composite(fn, a: float, b: float, panels: int, order: int = 20) -> float:
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return math.fsum(weights * fn(nodes))


def _near(t):
    x = 1 + t * t
    return 2 / np.sqrt(x * x + x + 1)


def _far(s):
    return 2 / np.sqrt(1 - s**6)


@dataclass(frozen=True)
class ConstantReport:
    value: float
    error_estimate: float
    integral: float
    integral_error: float
    panels: int
    doubling_change: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "integral": self.integral,
            "integral_error": self.integral_error,
            "panels": self.panels,
            "doubling_change": self.doubling_change,
        }


def elliptic_integral(tol: float = 1e-14, max_panels: int = 1 << 12) -> tuple[float, float, int]:
    """``I`` with an error estimate and the panel count used."""
    panels = 1
    prev = None
    while panels <= max_panels:
        val = _composite(_near, 0.0, 1.0, panels) + _composite(_far, 0.0, 1 / math.sqrt(2), panels)
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val, max(abs(val - prev), 4 * np.finfo(float).eps * abs(val)), panels
        prev = val
        panels *= 2
    raise QuadratureNonConvergent("integral did not settle under panel doubling")


def torus_constant(tol: float = 1e-14) -> ConstantReport:
    integral, err, panels = elliptic_integral(tol)
    value = 2 * math.pi / math.sqrt(3) / integral**2
    # one more doubling as the convergence control
    finer = _composite(_near, 0.0, 1.0, 2 * panels) + _composite(_far, 0.0, 1 / math.sqrt(2), 2 * panels)
    change = abs(2 * math.pi / math.sqrt(3) / finer**2 - value)
    value_err = 2 * value * err / integral
    return ConstantReport(value, value_err, integral, err, panels, change)
