"""Integration and search domains: closed disks and axis-aligned squares."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Region:
    """A disk ``|z - center| <= radius`` or a square ``[x0, x0+side] x [y0, y0+side]``.

    For squares ``anchor`` is the lower-left corner; for disks it is the
    center.  ``size`` is the radius or the side length.
    """

    kind: str
    anchor: complex
    size: float

    def __post_init__(self):
        if self.kind not in ("disk", "square"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if not self.size > 0:
            raise ValueError("region size must be positive")
        object.__setattr__(self, "anchor", complex(self.anchor))
        object.__setattr__(self, "size", float(self.size))

    @classmethod
    def disk(cls, center: complex, radius: float) -> Region:
        return cls("disk", center, radius)

    @classmethod
    def square(cls, corner: complex, side: float) -> Region:
        return cls("square", corner, side)

    @classmethod
    def centered_square(cls, center: complex, side: float) -> Region:
        return cls("square", complex(center) - complex(side, side) / 2, side)

    @property
    def center(self) -> complex:
        if self.kind == "disk":
            return self.anchor
        return self.anchor + complex(self.size, self.size) / 2

    @property
    def area(self) -> float:
        if self.kind == "disk":
            return math.pi * self.size**2
        return self.size**2

    @property
    def perimeter(self) -> float:
        if self.kind == "disk":
            return 2 * math.pi * self.size
        return 4 * self.size

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        """``(xmin, xmax, ymin, ymax)``."""
        if self.kind == "disk":
            c, r = self.anchor, self.size
            return c.real - r, c.real + r, c.imag - r, c.imag + r
        a, s = self.anchor, self.size
        return a.real, a.real + s, a.imag, a.imag + s

    def translate(self, a: complex) -> Region:
        return Region(self.kind, self.anchor + complex(a), self.size)

    def contains(self, z, slack: float = 0.0):
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            return np.abs(z - self.anchor) <= self.size + slack
        xmin, xmax, ymin, ymax = self.bbox
        return (
            (z.real >= xmin - slack)
            & (z.real <= xmax + slack)
            & (z.imag >= ymin - slack)
            & (z.imag <= ymax + slack)
        )

    def project(self, z):
        """Nearest point of the region (identity inside)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            d = z - self.anchor
            r = np.abs(d)
            scale = np.where(r > self.size, self.size / np.where(r == 0, 1, r), 1.0)
            return self.anchor + d * scale
        xmin, xmax, ymin, ymax = self.bbox
        return np.clip(z.real, xmin, xmax) + 1j * np.clip(z.imag, ymin, ymax)

    def grid(self, step: float) -> np.ndarray:
        """Grid points of spacing ``step`` lying in the region, boundary included.

        The lattice is anchored so that the bounding box edges are sampled.
        """
        xmin, xmax, ymin, ymax = self.bbox
        nx = max(int(math.ceil((xmax - xmin) / step)), 1)
        ny = max(int(math.ceil((ymax - ymin) / step)), 1)
        xs = np.linspace(xmin, xmax, nx + 1)
        ys = np.linspace(ymin, ymax, ny + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        pts = (X + 1j * Y).ravel()
        if self.kind == "disk":
            pts = pts[self.contains(pts)]
            if pts.size == 0:
                pts = np.array([self.anchor])
            if not np.any(pts == self.anchor):
                pts = np.concatenate([[self.anchor], pts])
            # sample the boundary circle as well
            m = max(int(math.ceil(2 * math.pi * self.size / step)), 8)
            ring = self.anchor + self.size * np.exp(2j * math.pi * np.arange(m) / m)
            pts = np.concatenate([pts, ring])
        return pts

    def to_dict(self) -> dict:
        key = "center" if self.kind == "disk" else "corner"
        size_key = "radius" if self.kind == "disk" else "side"
        return {"kind": self.kind, key: [self.anchor.real, self.anchor.imag], size_key: self.size}

    @classmethod
    def from_dict(cls, d: dict) -> Region:
        if d["kind"] == "disk":
            c = d["center"]
            return cls.disk(complex(c[0], c[1]), d["radius"])
        c = d["corner"]
        return cls.square(complex(c[0], c[1]), d["side"])
