"""Command-line front end.

    pgtime pmf       --model ny --lambda 1 --beta 1 --lambda1 1 --t 1 --kmax 20
    pgtime density   --model y --lambda 1 --beta 1 --t 1 --s-grid 0:5:11
    pgtime transform --model y --lambda 1 --beta 1 --t 1 --theta-grid 0.5,1,2
    pgtime moments   --model y --lambda 1 --beta 1 --t 1 [--s 2] --format json
    pgtime sample    --model ny --lambda 1 --beta 1 --lambda1 1 --t 1 --n-samples 100000 --seed 7 -o s.csv
    pgtime verify    --suite normalization --seed 42
    pgtime verify    --batch s.csv

Exit status: 0 success, 1 verification failure, 2 usage, domain or numerical error.
Randomized commands write ``seed=<seed> streams=<streams>`` to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__, models, verify
from .errors import ConvergenceFailure, PgtimeError, QuadratureFailure
from .mc import SampleBatch, n_streams

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "pgtime output",
    "type": "object",
    "required": ["kind", "command", "version", "seed"],
    "properties": {
        "kind": {"enum": ["table", "sample", "report"]},
        "command": {"type": "array", "items": {"type": "string"}},
        "version": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "streams": {"type": ["integer", "null"]},
        "model": {"type": "string"},
        "params": {"type": "object"},
        "t": {"type": ["number", "null"]},
        "s": {"type": ["number", "null"]},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "extra": {"type": "object"},
        "n_samples": {"type": "integer", "minimum": 0},
        "values": {"type": "array"},
        "suite": {"type": "string"},
        "passed": {"type": "boolean"},
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "details"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "details": {"type": "object"},
                },
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "table"}}},
         "then": {"required": ["model", "params", "columns", "rows"]}},
        {"if": {"properties": {"kind": {"const": "sample"}}},
         "then": {"required": ["model", "params", "t", "n_samples", "streams", "values"]}},
        {"if": {"properties": {"kind": {"const": "report"}}},
         "then": {"required": ["suite", "passed", "cases"]}},
    ],
}

SAMPLE_MAGIC = "# pgtime-sample "
PARAM_FLAGS = ("lambda", "alpha", "beta", "n", "lambda1", "lambda2")


class UsageError(PgtimeError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def parse_grid(text: str) -> list:
    """``a,b,c`` or ``start:stop:num`` (inclusive linspace); must be nonempty and sorted."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid {text!r}: expected start:stop:num")
        grid = list(np.linspace(float(parts[0]), float(parts[1]), int(parts[2])))
    else:
        grid = [float(x) for x in text.split(",") if x.strip()]
    if not grid:
        raise UsageError("grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise UsageError(f"grid {text!r} is not sorted")
    return [float(g) for g in grid]


def _params(ns) -> dict:
    p = {k: getattr(ns, k) for k in PARAM_FLAGS if getattr(ns, k, None) is not None}
    if getattr(ns, "a", None) is not None:
        p["a"] = parse_grid(ns.a) if "," in ns.a else [float(ns.a)]
    return p


def _model(ns) -> models.Model:
    return models.build(ns.model, _params(ns))


def _base(kind, argv, seed=None, streams=None, **extra) -> dict:
    return dict(kind=kind, command=list(argv), version=__version__, seed=seed, streams=streams, **extra)


def _table_out(ns, argv, m, columns, rows, extra=None):
    if ns.format == "json":
        return json.dumps(_base("table", argv, model=m.tag, params=m.params, t=ns.t,
                                columns=columns, rows=rows, extra=extra or {}), indent=1) + "\n"
    lines = [",".join(columns)] + [",".join(fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_pmf(ns, argv, err):
    m = _model(ns)
    if ns.kmin is None and ns.kmax is None:
        law = m.law(ns.t)
        rows = [[int(k), float(p)] for k, p in zip(law.ks, law.probs)]
        extra = {"tail_bound": law.tail_bound}
    else:
        law = m.law(ns.t) if (ns.kmin is None or ns.kmax is None) else None
        lo = ns.kmin if ns.kmin is not None else law.k_min
        hi = ns.kmax if ns.kmax is not None else law.k_max
        if hi < lo:
            raise UsageError(f"empty k-range [{lo}, {hi}]")
        rows = [[k, m.pmf(k, ns.t)] for k in range(lo, hi + 1)]
        extra = {}
    return _table_out(ns, argv, m, ["k", "prob"], rows, extra)


def cmd_density(ns, argv, err):
    m = _model(ns)
    if m.kind == "pmf":
        raise UsageError(f"model {m.tag} is integer valued; use the pmf command")
    law = m.law(ns.t)
    if ns.s_grid is None:
        grid = list(np.linspace(0.0, law.support_hint, 21))
    else:
        grid = parse_grid(ns.s_grid)
    rows = [[s, float(law.density(s))] for s in grid]
    if law.atom0 > 0:
        err.write(f"atom at 0: {fmt(law.atom0)} (density column is the continuous part)\n")
    return _table_out(ns, argv, m, ["s", "density"], rows, {"atom0": law.atom0})


def cmd_transform(ns, argv, err):
    m = _model(ns)
    grid = parse_grid(ns.theta_grid)
    rows = [[th, m.transform(th, ns.t)] for th in grid]
    kind = "laplace E exp(-theta X)" if m.transform_sign < 0 else "mgf E exp(theta X)"
    return _table_out(ns, argv, m, ["theta", "value"], rows, {"transform": kind})


def cmd_moments(ns, argv, err):
    m = _model(ns)
    ts = parse_grid(ns.t_grid) if ns.t_grid else [ns.t]
    cols = ["t", "mean", "var"] + (["cov"] if ns.s is not None else [])
    rows = []
    for t in ts:
        mean, var = m.moments(t)
        row = [t, mean, var]
        if ns.s is not None:
            c = m.cov(t, ns.s)
            if c is None:
                raise UsageError(f"covariance is not available for model {m.tag}")
            row.append(c)
        rows.append(row)
    return _table_out(ns, argv, m, cols, rows, {"s": ns.s} if ns.s is not None else None)


def write_batch(batch: SampleBatch, fmt_: str, argv) -> str:
    vals = batch.values
    if fmt_ == "json":
        return json.dumps(_base("sample", argv, batch.seed, batch.streams, model=batch.model,
                                params=batch.params, t=batch.t, s=batch.s,
                                n_samples=batch.n_samples, values=vals.tolist())) + "\n"
    meta = dict(model=batch.model, params=batch.params, t=batch.t, s=batch.s,
                n_samples=batch.n_samples, seed=batch.seed, streams=batch.streams,
                dtype=str(vals.dtype), version=__version__)
    out = [SAMPLE_MAGIC + json.dumps(meta, sort_keys=True)]
    out.append("value" if vals.ndim == 1 else "value_t,value_s")
    if vals.ndim == 1:
        out.extend(fmt(v) for v in vals)
    else:
        out.extend(f"{fmt(a)},{fmt(b)}" for a, b in vals)
    return "\n".join(out) + "\n"


def read_batch(path: str) -> SampleBatch:
    """Load a batch written by the ``sample`` command (CSV or JSON)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        d = json.loads(text)
        vals = np.asarray(d["values"])
        return SampleBatch(vals, d["model"], d["t"], d["n_samples"], d["seed"], d["streams"],
                           d["params"], d.get("s"))
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SAMPLE_MAGIC):
        raise UsageError(f"{path}: not a pgtime sample file")
    meta = json.loads(lines[0][len(SAMPLE_MAGIC):])
    body = lines[2:]
    dtype = np.dtype(meta["dtype"])
    if meta.get("s") is None:
        vals = np.array([dtype.type(float(x)) if dtype.kind == "f" else int(x) for x in body], dtype=dtype)
    else:
        vals = np.array([[float(y) for y in x.split(",")] for x in body], dtype=dtype)
    return SampleBatch(vals, meta["model"], meta["t"], meta["n_samples"], meta["seed"],
                       meta["streams"], meta["params"], meta.get("s"))


def cmd_sample(ns, argv, err):
    m = _model(ns)
    n = ns.n_samples
    err.write(f"seed={ns.seed} streams={n_streams(n)}\n")
    if ns.s is None:
        batch = m.sample(ns.t, n, ns.seed, ns.workers)
    else:
        batch = m.sample_pairs(ns.t, ns.s, n, ns.seed, ns.workers)
    return write_batch(batch, ns.format, argv)


def cmd_verify(ns, argv, err):
    if (ns.suite is None) == (ns.batch is None):
        raise UsageError("verify needs exactly one of --suite or --batch")
    if ns.batch is not None:
        batch = read_batch(ns.batch)
        err.write(f"seed={batch.seed} streams={batch.streams}\n")
        rep = verify.batch_report(batch, ns.level, ns.z_max)
        streams = batch.streams
    else:
        err.write(f"seed={ns.seed} streams=per-case\n")
        cfg = verify.SuiteConfig(seed=ns.seed, n_samples=ns.n_samples, n_joint=ns.n_joint,
                                 level=ns.level, z_max=ns.z_max, workers=ns.workers)
        rep = verify.suite_run(ns.suite, cfg)
        streams = None
    body = rep.to_dict()
    del body["seed"]
    doc = _base("report", argv, rep.seed, streams, **body)
    if ns.format == "csv":
        lines = ["case,passed"] + [f"{json.dumps(c['name'])},{int(c['passed'])}" for c in rep.cases]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(doc, indent=1) + "\n"
    return text, (0 if rep.passed else 1)


COMMANDS = {
    "pmf": cmd_pmf,
    "density": cmd_density,
    "transform": cmd_transform,
    "moments": cmd_moments,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgtime", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"pgtime {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def model_args(p, need_t=True):
        p.add_argument("--model", required=True, choices=models.TAGS)
        for name in PARAM_FLAGS:
            p.add_argument(f"--{name}", type=float, default=None)
        p.add_argument("--a", default=None, help="composition parameters, comma separated")
        if need_t:
            p.add_argument("--t", type=_nonneg, default=1.0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", default="-")

    p = sub.add_parser("pmf", help="probability mass table")
    model_args(p)
    p.add_argument("--kmin", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("density", help="density table")
    model_args(p)
    p.add_argument("--s-grid", default=None)

    p = sub.add_parser("transform", help="Laplace transform or MGF table")
    model_args(p)
    p.add_argument("--theta-grid", required=True)

    p = sub.add_parser("moments", help="mean, variance and covariance")
    model_args(p)
    p.add_argument("--t-grid", default=None)
    p.add_argument("--s", type=_nonneg, default=None, help="second time for Cov(X(t), X(s))")

    p = sub.add_parser("sample", help="reproducible Monte Carlo sample")
    model_args(p)
    p.add_argument("--s", type=_nonneg, default=None, help="also draw X(s) on the same path")
    p.add_argument("--n-samples", type=_positive_int, default=10 ** 6)
    p.add_argument("--seed", type=_positive_int, default=42)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("verify", help="run a verification suite or check a stored sample")
    p.add_argument("--suite", choices=verify.SUITES, default=None)
    p.add_argument("--batch", default=None, help="sample file written by the sample command")
    p.add_argument("--seed", type=_positive_int, default=42)
    p.add_argument("--n-samples", type=_positive_int, default=10 ** 6)
    p.add_argument("--n-joint", type=_positive_int, default=10 ** 5)
    p.add_argument("--level", type=float, default=verify.DEFAULT_LEVEL)
    p.add_argument("--z-max", type=float, default=verify.DEFAULT_ZMAX)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("-o", "--output", default="-")
    return ap


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors itself
        return int(e.code or 0)
    try:
        res = COMMANDS[ns.command](ns, argv, err)
        text, code = res if isinstance(res, tuple) else (res, 0)
    except (ConvergenceFailure, QuadratureFailure) as e:
        err.write(f"pgtime {ns.command}: numerical failure for model "
                  f"{getattr(ns, 'model', None)} params {_params(ns)}: {e}\n")
        return 2
    except (PgtimeError, ValueError, KeyError, OSError) as e:
        err.write(f"pgtime {ns.command}: {e}\n")
        return 2
    if ns.output == "-":
        out.write(text)
    else:
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


def main() -> None:
    sys.exit(run())
