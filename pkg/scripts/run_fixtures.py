"""Run the closed-form boundary fixtures and print a per-assertion table."""
import argparse
import sys

from tropmartin.boundary.fixtures import FIXTURES, fixture_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help=f"fixtures to run (default: all of {', '.join(FIXTURES)})")
    args = ap.parse_args()
    unknown = set(args.names) - set(FIXTURES)
    if unknown:
        ap.error(f"unknown fixtures: {sorted(unknown)}")
    rep = fixture_suite(args.names or None)
    width = max(len(a.name) for a in rep.assertions)
    for a in rep.assertions:
        print(f"{a.name:<{width}}  {'ok' if a.passed else 'FAIL'}  {a.witness}")
    print()
    for name, sec in rep.timing.items():
        print(f"{name:<10} {sec:7.3f}s")
    print(f"{len(rep.assertions) - len(rep.failures())}/{len(rep.assertions)} passed")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
