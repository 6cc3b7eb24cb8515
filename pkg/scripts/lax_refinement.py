"""Grid-refinement study of the 1-D Lax-Oleinik eigen-check for L = |v|^p / p.

For each (p, lambda, s) the residual of u(x) = theta x is printed for a
sequence of halved grid spacings next to the a-priori grid bound.
"""
import argparse

from tropmartin.lax import LagrangianSpec, eigen_check, lax_star_asymptotics_check, theta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h0", type=float, default=0.26)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--window", type=float, default=2.0)
    args = ap.parse_args()
    for p, lam, s in ((2, 0.5, 1.0), (3, 1.0, 0.5), (1.5, 2.0, 1.0)):
        th = theta(lam, p)
        L = LagrangianSpec.pnorm(p)
        print(f"p={p} lambda={lam} s={s} theta={th:.4f}")
        prev = None
        h = args.h0
        for _ in range(args.levels):
            r = eigen_check(lambda x: th * x[..., 0], L, lam, s, h, args.window)
            ratio = f"{r.residual / prev:.3f}" if prev else "-"
            print(f"  h={h:<8.4g} residual={r.residual:<11.4g} bound={r.bound:<9.4g} ratio={ratio}")
            prev, h = r.residual or None, h / 2
        for row in lax_star_asymptotics_check(p, s, lam, [1, 10, 100, 1000]):
            print(f"  D={row.displacement:<6g} (A_s)+={row.value:<12.6g} -theta D={row.predicted:<12.6g} deviation={row.deviation:.3g}")


if __name__ == "__main__":
    main()
