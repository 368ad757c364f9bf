#!/usr/bin/env python3
"""Run the verification catalogue over a deformation sweep and save JSON.

Thin driver around the CLI verify command; exits nonzero if any identity
fails at the requested tolerance.
"""

import argparse
import sys

from qsu2.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="verify_sweep.json")
    ap.add_argument("--lmax", type=int, default=6)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--q", type=float, action="append", default=None)
    ns = ap.parse_args()
    qs = ns.q or [0.5, 0.9, 1.0, 1.5]

    argv = ["verify", "--lmax", str(ns.lmax), "--tol", str(ns.tol), "--out", ns.out]
    for q in qs:
        argv += ["--q", str(q)]
    code = cli_main(argv)
    print(f"wrote {ns.out} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
