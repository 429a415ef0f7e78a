"""Energy density of Brody-normalised hexagonal Weierstrass curves.

For each lattice scale: the torus average, a disk Følner estimate at a
chosen number of period cells and the NSA tail proxy, written as JSON lines.

    python3 scripts/hex_density_scan.py --scales 1 1.4142135623730951 2 --cells 36
"""

from __future__ import annotations

import argparse
import json
import math

from brodylab.constants import torus_constant
from brodylab.curves import Weierstrass
from brodylab.elliptic import brody_rescale, hexagonal_lattice
from brodylab.energy import FolnerSequence, period_lattice, rho_elliptic, rho_estimate, rho_nsa_estimate
from brodylab.regions import Region


def scan_one(scale: float, cells: float, nsa_periods: float) -> dict:
    curve, c = brody_rescale(Weierstrass(hexagonal_lattice(scale)))
    lat = period_lattice(curve)
    period = abs(lat.reduced_basis[0])
    torus = rho_elliptic(curve)
    R = math.sqrt(cells * lat.area / math.pi)
    window = Region.centered_square(0, 2 * R + 2 * period)
    disk = rho_estimate(curve, FolnerSequence("disk", (R,)), window).values()[0]
    nsa = rho_nsa_estimate(curve, nsa_periods * period)["value"]
    return {
        "scale": scale,
        "rescale_factor": c,
        "period": period,
        "torus_average": torus["value"],
        "disk_radius": R,
        "disk_estimate": disk,
        "nsa_proxy": nsa,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", type=float, nargs="+", default=[1.0, math.sqrt(2), 2.0])
    ap.add_argument("--cells", type=float, default=36.0, help="disk area in period cells")
    ap.add_argument("--nsa-periods", type=float, default=8.0)
    args = ap.parse_args(argv)
    ref = torus_constant().value
    for s in args.scales:
        row = scan_one(s, args.cells, args.nsa_periods)
        row["fraction_of_constant"] = row["torus_average"] / ref
        print(json.dumps(row, sort_keys=True), flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
