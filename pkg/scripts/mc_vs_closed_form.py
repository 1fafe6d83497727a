"""Empirical frequencies of a simulated model next to its closed-form pmf.

    python scripts/mc_vs_closed_form.py --model nyn --n 2 --lambda1 1 --t 1
"""
import argparse

import numpy as np

from pgtime import models, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="ny", choices=[t for t in models.TAGS if t != "tilde-compose"])
    for name, default in [("lambda", 1.0), ("alpha", None), ("beta", 1.0), ("n", None),
                          ("lambda1", 1.0), ("lambda2", None)]:
        ap.add_argument(f"--{name}", type=float, default=default)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--rows", type=int, default=12)
    args = ap.parse_args()

    params = {k: v for k, v in vars(args).items()
              if k in ("lambda", "alpha", "beta", "n", "lambda1", "lambda2") and v is not None}
    m = models.build(args.model, params)
    if m.kind != "pmf":
        ap.error(f"{args.model} has a continuous part; pick an integer-valued model")
    batch = m.sample(args.t, args.samples, args.seed)
    x = np.asarray(batch.values, dtype=np.int64)
    lo = int(x.min())
    print(f"{'k':>5} {'empirical':>12} {'exact':>12} {'z':>7}")
    for k in range(lo, lo + args.rows):
        p = m.pmf(k, args.t)
        f = np.mean(x == k)
        se = np.sqrt(max(p * (1 - p), 1e-300) / args.samples)
        print(f"{k:5d} {f:12.6f} {p:12.6f} {(f - p) / se:7.2f}")
    r = verify.gof_chisq(batch, m.law(args.t))
    print(f"chi-square {r.statistic:.2f} on {r.dof} dof, p = {r.p_value:.4f} ({r.decision})")


if __name__ == "__main__":
    main()
