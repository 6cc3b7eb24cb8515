"""Boundary estimates of a rule kernel along a family of rays, written as CSV.

Example: ``python3 scripts/boundary_scan.py z2 --rays "(k,0)" "(k,k)" "(0,-k)"``
"""
import argparse
import csv
import sys

from tropmartin.boundary import column_limit, get_rule
from tropmartin.cli import target_expr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("rule")
    ap.add_argument("--rays", nargs="+", default=["k"])
    ap.add_argument("--window", type=int, default=3)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    rule = get_rule(args.rule)
    ests = {r: column_limit(rule, target_expr(r), args.window) for r in args.rays}
    window = next(iter(ests.values())).window
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["node"] + args.rays)
    for x in window:
        w.writerow([rule.encode(x)] + [ests[r].values[x] for r in args.rays])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
