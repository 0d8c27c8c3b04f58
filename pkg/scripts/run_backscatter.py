#!/usr/bin/env python3
"""Backscatter RCS of a single rectangular cavity, TM polarization.

Geometry: width w = lambda, depth h = lambda/4 at kappa0 = 32 pi (so
lambda = 1/16), N = 150 modes, 181 monostatic angles.  Two variants: the
empty cavity, and the cavity filled with a lossy medium of permittivity
epsilon = 4 + i (mu = 1).

Usage: python scripts/run_backscatter.py [outdir]
"""

import sys
from math import pi
from pathlib import Path

import cavityscat as cs
from cavityscat.cli import main as cli_main
from cavityscat.model import kappa_from_material

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results/backscatter")

K0 = 32 * pi
LAM = 2 * pi / K0


def spec(filling: complex):
    return cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(kappa0=K0, theta=pi / 3), polarization="TM",
        cavities=(cs.Cavity(a=-LAM / 2, b=LAM / 2,
                            layers=(cs.Layer(0.0, -LAM / 4, filling),)),),
        N=150, quad=cs.QuadratureConfig(panels=96, points_per_panel=10)))


def main():
    cases = {
        "empty": complex(K0),
        "lossy": kappa_from_material(K0, 4 + 1j, 1.0),
    }
    for name, kappa in cases.items():
        out = OUT / name
        out.mkdir(parents=True, exist_ok=True)
        path = out / "spec.json"
        cs.save_spec(spec(kappa), path)
        print(f"== {name} cavity ==")
        code = cli_main(["rcs", "--spec", str(path), "--out", str(out),
                         "--angles", "181"])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
