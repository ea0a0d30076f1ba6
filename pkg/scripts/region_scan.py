#!/usr/bin/env python3
"""Scan the CPTP membership region of the injection or swap-invariant
relational channel families over a coefficient grid and write CSV.

Usage:
    python3 scripts/region_scan.py --kind injection --grid 20 --out region.csv
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from symmetria.bipartite import (injection_channel, injection_coords,
                                 swap_invariant_relational)
from symmetria.cli import fmt
from symmetria.linalg_core import check_cptp


@dataclass(frozen=True)
class ScanConfig:
    kind: str = "injection"
    grid: int = 20
    lo: float = -1.0
    hi: float = 1.0
    out: str = "-"


def scan(cfg: ScanConfig):
    axis = np.linspace(cfg.lo, cfg.hi, cfg.grid)
    rows = ["x,y,z,X,Y,Z,min_eig,inside" if cfg.kind == "injection"
            else "x,y,z,min_eig,inside"]
    for x in axis:
        for y in axis:
            for z in axis:
                if cfg.kind == "injection":
                    S = injection_channel(x, y, z)
                    rep = check_cptp(S, psd_tol=1e-8)
                    X, Y, Z = injection_coords(x, y, z)
                    rows.append(
                        ",".join(fmt(v) for v in (x, y, z, X, Y, Z))
                        + f",{fmt(rep.min_choi_eigenvalue)},"
                        + ("1" if rep.is_cptp else "0"))
                else:
                    S = swap_invariant_relational(x, y, z)
                    rep = check_cptp(S, psd_tol=1e-8)
                    rows.append(
                        ",".join(fmt(v) for v in (x, y, z))
                        + f",{fmt(rep.min_choi_eigenvalue)},"
                        + ("1" if rep.is_cptp else "0"))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=("injection", "relational"),
                    default="injection")
    ap.add_argument("--grid", type=int, default=20)
    ap.add_argument("--lo", type=float, default=-1.0)
    ap.add_argument("--hi", type=float, default=1.0)
    ap.add_argument("--out", default="-", help="output file, '-' for stdout")
    args = ap.parse_args(argv)
    cfg = ScanConfig(args.kind, args.grid, args.lo, args.hi, args.out)
    rows = scan(cfg)
    text = "\n".join(rows) + "\n"
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w") as f:
            f.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
