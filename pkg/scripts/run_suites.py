"""Run every verification suite and print one line per suite.

    python scripts/run_suites.py --seed 42 --n-samples 1000000 --json reports.json
"""
import argparse
import json
import time

from pgtime import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--suite", action="append", choices=verify.SUITES,
                    help="repeatable; default runs all suites")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--n-samples", type=int, default=10 ** 6)
    ap.add_argument("--n-joint", type=int, default=10 ** 5)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--json", default=None, help="write all reports to this file")
    args = ap.parse_args()

    cfg = verify.SuiteConfig(seed=args.seed, n_samples=args.n_samples,
                             n_joint=args.n_joint, workers=args.workers)
    out, ok = [], True
    for name in args.suite or verify.SUITES:
        t0 = time.perf_counter()
        rep = verify.suite_run(name, cfg)
        ok &= rep.passed
        bad = [c["name"] for c in rep.cases if not c["passed"]]
        print(f"{name:18s} {'PASS' if rep.passed else 'FAIL'} "
              f"{len(rep.cases) - len(bad):4d}/{len(rep.cases):<4d} {time.perf_counter() - t0:7.1f} s")
        for b in bad:
            print(f"    failed: {b}")
        out.append(rep.to_dict())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=1)
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
