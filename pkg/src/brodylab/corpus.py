"""The curve corpus shared by the tests, the acceptance run and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .curves import CurveMap, Rational, constant_curve, exp_curve, identity_curve, Weierstrass
from .elliptic import brody_rescale, hexagonal_lattice
from .regions import Region

HEX_SCALES = {"1": 1.0, "sqrt2": math.sqrt(2.0), "2": 2.0}
GLUE_CENTER = -40.0
GLUE_RADIUS = 6.0


@dataclass(frozen=True)
class CorpusEntry:
    """A named curve with the facts the checks need.

    ``brody`` marks curves whose sup of |df| is known to be at most 1;
    ``sup`` is that sup when it is known in closed form or by construction;
    ``window`` is a default search window for translate sups.
    """

    id: str
    curve: CurveMap
    brody: bool
    window: Region
    degree: int | None = None
    periodic: bool = False
    sup: float | None = None


def _rational3() -> Rational:
    # [1 + z^3 : 2z + z^2] precomposed with z -> z/2
    return Rational(((1, 0, 0, 1 / 8), (0, 1, 1 / 4)))


def _hex(scale_key: str) -> CurveMap:
    curve, _ = brody_rescale(Weierstrass(hexagonal_lattice(HEX_SCALES[scale_key])))
    return curve


def _exp_brody() -> CurveMap:
    # sup |d e^{cz}| = c / (2 sqrt(pi)); rescaled to 1/2 so the tiling run has tau = 1/2
    curve, _ = brody_rescale(exp_curve(1.0), window=Region.centered_square(0, 4), target=0.5)
    return curve


def _glued() -> CurveMap:
    from .gluing import glue_once, solve_constants

    consts = solve_constants(1, "empirical")
    return glue_once(exp_curve(0.25), GLUE_CENTER, GLUE_RADIUS, consts)


@lru_cache(maxsize=None)
def corpus() -> tuple[CorpusEntry, ...]:
    sq = Region.centered_square
    entries = [
        CorpusEntry("constant", constant_curve([1, 0]), True, sq(0, 16), degree=0, sup=0.0),
        CorpusEntry("identity", identity_curve(), True, sq(0, 16), degree=1, sup=1 / math.sqrt(math.pi)),
        CorpusEntry("rational3", _rational3(), True, sq(0, 16), degree=3),
        CorpusEntry("exp", exp_curve(1.0), True, sq(0, 16), sup=1 / (2 * math.sqrt(math.pi))),
        CorpusEntry("exp_quarter", exp_curve(0.25), True, sq(0, 16), sup=1 / (8 * math.sqrt(math.pi))),
        CorpusEntry("exp_brody", _exp_brody(), True, sq(0, 16), sup=0.5),
    ]
    for key in HEX_SCALES:
        entries.append(CorpusEntry(f"wp_hex_{key}", _hex(key), True, sq(0, 16), periodic=True, sup=1.0))
    entries.append(CorpusEntry("glued", _glued(), True, sq(GLUE_CENTER, 32)))
    return tuple(entries)


def get(curve_id: str) -> CorpusEntry:
    for e in corpus():
        if e.id == curve_id:
            return e
    raise KeyError(f"unknown corpus curve {curve_id!r}; known: {', '.join(e.id for e in corpus())}")


def ids() -> list[str]:
    return [e.id for e in corpus()]
