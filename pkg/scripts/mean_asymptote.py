"""Exact mean of the Erlang-jump inverse clock against its large-time line.

Prints E Y^(n)(t), the line bt/(n lam) + (n+1)/(2 n lam) and their relative gap.
"""
import argparse

from pgtime import inverse as inv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--n-max", type=int, default=4)
    ap.add_argument("--t-max", type=float, default=100.0)
    args = ap.parse_args()

    ts = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, args.t_max]
    print(f"{'n':>2} {'t':>7} {'exact':>12} {'line':>12} {'rel gap':>10}")
    for n in range(1, args.n_max + 1):
        p = inv.InvParams(args.lam, args.beta, n)
        for t in sorted(set(ts)):
            exact = inv.yn_moments(p, 1, t)
            line = inv.yn_mean_asymptote(p, t)
            print(f"{n:2d} {t:7.1f} {exact:12.6f} {line:12.6f} {abs(exact - line) / exact:10.2e}")
    p2 = inv.InvParams(1.0, 1.0, 2)
    print(f"\nlam = beta = 1, n = 2, t = 100: exact {inv.yn_moments(p2, 1, 100.0):.6f}, "
          f"line {inv.yn_mean_asymptote(p2, 100.0):.6f}")


if __name__ == "__main__":
    main()
