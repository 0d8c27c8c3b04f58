#!/usr/bin/env python3
"""Self-convergence study: single empty cavity [-0.5, 0.5], depth 1.5,
kappa0 = 1.5, theta = pi/9, N = 30, composite 4-point Gauss.

Panels double per level; errors are aperture-coefficient L2 norms against the
finest level.  Expect fitted orders around 8 for both polarizations.

Usage: python scripts/run_convergence.py [outdir]
"""

import sys
from math import pi
from pathlib import Path

import cavityscat as cs
from cavityscat.cli import main as cli_main

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results/convergence")


def spec(polarization):
    return cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(kappa0=1.5, theta=pi / 9), polarization=polarization,
        cavities=(cs.Cavity(a=-0.5, b=0.5, layers=(cs.Layer(0.0, -1.5, 1.5 + 0j),)),),
        N=30, quad=cs.QuadratureConfig(panels=8, points_per_panel=4)))


def main():
    for pol in ("TM", "TE"):
        out = OUT / pol.lower()
        out.mkdir(parents=True, exist_ok=True)
        path = out / "spec.json"
        cs.save_spec(spec(pol), path)
        print(f"== {pol} ==")
        code = cli_main(["convergence", "--spec", str(path), "--out", str(out),
                         "--levels", "5"])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
