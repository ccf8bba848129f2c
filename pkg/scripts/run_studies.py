#!/usr/bin/env python3
"""Regenerate the headline study CSVs (and the plot fixtures) via the CLI.

The quick profile matches the checked-in plot fixtures; --full runs the
acceptance-scale budgets (several minutes on two cores).
"""

import argparse
import pathlib
import sys

from wigner_lab.cli import main as wigner_lab

QUICK = [
    ("wegner", ["wegner", "--spec", "gaussian:0.5", "--N", "50", "--E", "0",
                "--eps", "0.05,0.1,0.2,0.4", "--trials", "3000", "--seed", "11"]),
    ("dos", ["dos", "--spec", "gaussian:0.5", "--N", "200",
             "--E=-1.8,-1.5,-1.2,-0.9,-0.6,-0.3,0,0.3,0.6,0.9,1.2,1.5,1.8",
             "--scale", "macro", "--eta", "0.2", "--trials", "60", "--seed", "12"]),
    ("gaps", ["gaps", "--spec", "gaussian:0.5", "--N", "150", "--E", "0",
              "--K-grid", "0.5,1,2,4,8", "--trials", "2500", "--seed", "13"]),
    ("corr", ["corr", "--spec", "gaussian:0.5", "--N", "300", "--E", "0", "--W", "8",
              "--s-grid", "0.5,0.75,1.0,1.25,1.5,1.75,2.0,2.5,3.0,4.0",
              "--trials", "120", "--seed", "14"]),
    ("deloc_N100", ["deloc", "--spec", "gaussian:0.5", "--N", "100", "--E", "0",
                    "--K", "5", "--p", "4", "--trials", "60", "--seed", "15"]),
    ("deloc_N200", ["deloc", "--spec", "gaussian:0.5", "--N", "200", "--E", "0",
                    "--K", "5", "--p", "4", "--trials", "60", "--seed", "15"]),
    ("invmom", ["invmom", "--law", "gaussian:0.5", "--m", "3", "--r", "1",
                "--N", "10,30,100,300", "--samples", "200000", "--seed", "16"]),
    ("schur_check", ["schur-check", "--spec", "gaussian:0.5", "--N", "20", "--trials", "5", "--seed", "17"]),
    ("gue_oracle", ["gue-oracle", "--samples", "100000", "--bins", "30", "--seed", "18"]),
]

FULL = [
    ("wegner", ["wegner", "--spec", "gaussian:0.5", "--N", "100", "--E", "0",
                "--eps", "0.05,0.1,0.2,0.4", "--trials", "20000", "--seed", "303"]),
    ("dos_micro", ["dos", "--spec", "gaussian:0.5", "--N", "1000", "--E", "0",
                   "--scale", "micro", "--K", "5,20,50", "--trials", "100", "--seed", "505"]),
    ("gaps", ["gaps", "--spec", "gaussian:0.5", "--N", "500", "--E", "0",
              "--K-grid", "1,2,4,8,16", "--trials", "5000", "--seed", "707"]),
    ("corr", ["corr", "--spec", "gaussian:0.5", "--N", "1000", "--E", "0", "--W", "10",
              "--s-grid", "0.5,1.0,1.5,2.0", "--trials", "300", "--seed", "909"]),
    ("deloc_N500", ["deloc", "--spec", "gaussian:0.5", "--N", "500", "--E", "0",
                    "--K", "5", "--p", "4", "--trials", "100", "--seed", "808"]),
    ("invmom", ["invmom", "--law", "gaussian:0.5", "--m", "3", "--r", "2",
                "--N", "10,100,1000", "--samples", "1000000", "--seed", "206"]),
    ("gue_oracle", ["gue-oracle", "--samples", "1000000", "--bins", "50", "--seed", "1010"]),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--jobs", default="2")
    ap.add_argument("--full", action="store_true", help="acceptance-scale budgets")
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in (FULL if args.full else QUICK):
        argv = argv + [
            "--jobs", args.jobs,
            "--out-csv", str(out / f"{name}.csv"),
            "--out-json", str(out / f"{name}.json"),
            "--out-manifest", str(out / f"{name}.manifest.json"),
        ]
        print(f"== {name}: wigner-lab {' '.join(argv)}")
        rc = wigner_lab(argv)
        if rc != 0:
            print(f"{name} failed with exit code {rc}", file=sys.stderr)
            return rc
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
