"""Command line: ``pmdkit {bound,verify,design-check,search,gap}``.

Exit codes: 0 ok, 1 a proved identity or bound failed numerically, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

import numpy as np

from pmdkit import __version__
from pmdkit.codespace import CodeSpaceError, load_codespace, random_codespace, save_codespace
from pmdkit.finite_field import FieldError, make_field, prime_power
from pmdkit.pauli import SizeLimitError
from pmdkit.pmd_metrics import (
    DesignCheckReport,
    average_overlap,
    bergamaschi_gap,
    corollary1_bound,
    design_average_check,
    pmd_report,
    theorem1_bound,
)
from pmdkit.search import SearchConfig, TheoremViolation, optimize_epsilon

IDENTITY_TOL = 1e-9
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_field_order(q: str | None, p: int | None, m: int | None) -> tuple[int, int]:
    """(p, m) from ``-q 9``, ``-q 3^2`` or ``-p 3 -m 2``."""
    if q is not None:
        if p is not None:
            raise UsageError("give either -q or -p/-m, not both")
        match = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*", q)
        if not match:
            raise UsageError(f"cannot parse field order {q!r}")
        base, exp = int(match.group(1)), int(match.group(2) or 1)
        bp, bm = prime_power(base)
        return bp, bm * exp
    if p is None:
        raise UsageError("field order required: -q or -p [-m]")
    make_field(p, m or 1)  # validates
    return p, m or 1


def _manifest(command: str, params: dict, seed=None, outputs=()) -> dict:
    # wall time and worker count stay out of files so reruns are byte-identical
    return {
        "command": command,
        "parameters": params,
        "seed": seed,
        "tool_version": __version__,
        "outputs": [str(o) for o in outputs if o],
    }


def _write_json(path, manifest: dict, body: dict) -> None:
    if path:
        Path(path).write_text(json.dumps({"manifest": manifest, **body}, indent=2) + "\n")


def _show(pairs: dict) -> None:
    width = max(len(k) for k in pairs)
    for key, value in pairs.items():
        print(f"{key:<{width}}  {value}")


# ---------------------------------------------------------------------------


def cmd_bound(args) -> int:
    p, m = parse_field_order(args.q, args.p, args.m)
    q = p**m
    out = {"q": q}
    if args.n is not None or args.lam is not None:
        if args.n is None or args.lam is None:
            raise UsageError("theorem bound needs both -n and -l")
        out.update(n=args.n, **{"lambda": args.lam})
        out["theorem1_bound"] = theorem1_bound(args.n, args.lam, q)
    if args.epsilon is not None:
        out["epsilon"] = args.epsilon
        out["corollary1_lambda_min"] = corollary1_bound(args.epsilon, q)
    if len(out) == 1:
        raise UsageError("nothing to compute: give -n/-l and/or --epsilon")
    _show(out)
    params = {"n": args.n, "lambda": args.lam, "p": p, "m": m, "epsilon": args.epsilon}
    _write_json(args.json, _manifest("bound", params, outputs=[args.json]), {"bound": out})
    return EXIT_OK


def cmd_verify(args) -> int:
    cs = load_codespace(args.codefile)
    start = time.perf_counter()
    report = pmd_report(cs, workers=args.workers)
    elapsed = time.perf_counter() - start
    _show({**report.to_dict(), "wall_time_s": f"{elapsed:.3f}"})
    manifest = _manifest("verify", {"codefile": str(args.codefile)}, outputs=[args.json, args.csv])
    _write_json(args.json, manifest, {"report": report.to_dict()})
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    if report.violates_theorem1:
        print("error: epsilon below the Theorem 1 bound (implementation bug)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_design_check(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    ctx = make_field(args.p, args.m)
    dim = ctx.q**args.n
    rng = np.random.default_rng(args.seed)
    moment = 0.0
    for _ in range(args.trials):
        op = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        moment = max(moment, design_average_check(ctx, args.n, op))
    overlap_dev, worst_value_err = 0.0, 0.0
    per_lambda = []
    for k in range(args.n + 1):
        lam = args.n - k
        values = []
        for t in range(args.trials):
            cs = random_codespace(ctx, args.n, k, (args.seed, k, t))
            value, dev = average_overlap(cs)
            values.append(value)
            overlap_dev = max(overlap_dev, dev)
            worst_value_err = max(worst_value_err, abs(value - float(ctx.q) ** -lam))
        if values:
            per_lambda.append({"lambda": lam, "expected": float(ctx.q) ** -lam,
                               "max_value": max(values), "min_value": min(values)})
    overlap_value = per_lambda[0]["max_value"] if per_lambda else 0.0
    report = DesignCheckReport(moment, overlap_dev, overlap_value)
    _show({**report.to_dict(), "overlap_value_error": worst_value_err})
    for row in per_lambda:
        print(f"  lambda={row['lambda']}: value in [{row['min_value']!r}, {row['max_value']!r}]"
              f", expected {row['expected']!r}")
    params = {"p": args.p, "m": args.m, "n": args.n, "trials": args.trials}
    _write_json(args.json, _manifest("design-check", params, args.seed, [args.json]),
                {"report": report.to_dict(), "per_lambda": per_lambda})
    if max(moment, overlap_dev, worst_value_err) > IDENTITY_TOL:
        print("error: design identity deviates beyond tolerance", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_search(args) -> int:
    p, m = parse_field_order(args.q, args.p, args.m)
    cfg = SearchConfig(n=args.n, k=args.k, p=p, m=m, seed=args.seed, restarts=args.restarts,
                       local_steps=args.steps, initial_step=args.initial_step,
                       step_decay=args.step_decay, target=args.target)
    start = time.perf_counter()
    try:
        result = optimize_epsilon(cfg, workers=args.workers)
    except TheoremViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    elapsed = time.perf_counter() - start
    _show({**result.report.to_dict(), "improvements": len(result.trajectory),
           "wall_time_s": f"{elapsed:.3f}"})
    params = {k: v for k, v in vars(cfg).items() if k != "seed"}
    manifest = _manifest("search", params, args.seed, [args.json, args.csv, args.save_code])
    _write_json(args.json, manifest, result.to_dict())
    if args.csv:
        Path(args.csv).write_text(result.trajectory_csv())
    if args.save_code:
        save_codespace(result.best, args.save_code)
    return EXIT_OK


def cmd_gap(args) -> int:
    p, m = parse_field_order(args.q, args.p, args.m)
    rec = bergamaschi_gap(args.n, args.ell, p**m)
    _show(rec.to_dict())
    if rec.out_of_regime:
        print("note: epsilon_upper >= 1, ell too small for the construction's regime")
    params = {"n": args.n, "ell": args.ell, "p": p, "m": m}
    _write_json(args.json, _manifest("gap", params, outputs=[args.json]), {"gap": rec.to_dict()})
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_field_flags(sp) -> None:
    sp.add_argument("-q", help="field order, e.g. 4 or 2^2")
    sp.add_argument("-p", type=int, help="field characteristic")
    sp.add_argument("-m", type=int, help="extension degree (with -p)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmdkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bound", help="Theorem 1 / Corollary 1 bounds")
    sp.add_argument("-n", type=int)
    sp.add_argument("-l", "--lambda", dest="lam", type=int)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--json")
    _add_field_flags(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("verify", help="evaluate epsilon of a code-space file")
    sp.add_argument("codefile")
    sp.add_argument("--json")
    sp.add_argument("--csv")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("design-check", help="check the 1-design and average-overlap identities")
    sp.add_argument("p", type=int)
    sp.add_argument("m", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_design_check)

    sp = sub.add_parser("search", help="search for codes with small epsilon")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    _add_field_flags(sp)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--steps", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--initial-step", type=float, default=0.3)
    sp.add_argument("--step-decay", type=float, default=0.7)
    sp.add_argument("--target", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--csv")
    sp.add_argument("--json")
    sp.add_argument("--save-code")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("gap", help="construction redundancy versus the lower bound")
    sp.add_argument("n", type=int)
    sp.add_argument("ell", type=int)
    _add_field_flags(sp)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_gap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, FieldError, CodeSpaceError, SizeLimitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
