"""Command-line entry point: ``mvframe run|counterexamples|properties|sweep``.

Exit codes: 0 when every verdict passes, 2 for a bad config or usage,
3 for a numerical or property failure (the report is still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import lab
from .errors import ConfigError, MvFrameError


def _summary(rep: lab.RunReport, written) -> None:
    failed = [k for k, v in rep.verdicts.items() if not v]
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status}: {len(rep.verdicts) - len(failed)}/{len(rep.verdicts)} verdicts")
    for k in failed:
        print(f"  failed: {k}")
    for err in rep.errors:
        print(f"  error: {err['type']}: {err['message']}")
    for path in written:
        print(f"  wrote {path}")


def _finish(rep: lab.RunReport, prefix) -> int:
    written = rep.write(prefix) if prefix else []
    _summary(rep, written)
    return lab.EXIT_OK if rep.passed else lab.EXIT_NUMERIC


def _group(text: str) -> tuple:
    try:
        orders = tuple(int(t) for t in text.replace("x", ",").split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"group must look like 4 or 2,4 (got {text!r})")
    if not orders or min(orders) < 1:
        raise argparse.ArgumentTypeError("group orders must be positive")
    return orders


def cmd_run(args) -> int:
    cfg = lab.load_config(args.config)
    if args.out:
        cfg.output = args.out
    prefix = cfg.output or str(Path(args.config).with_suffix(""))
    rep = lab.run_experiment(cfg, write=False)
    return _finish(rep, prefix)


def cmd_counterexamples(args) -> int:
    return _finish(lab.suite_counterexamples(args.group), args.out)


def cmd_properties(args) -> int:
    rep = lab.suite_random_properties(args.seed, args.trials, args.max_dim, args.inject)
    for k, v in rep.metrics.items():
        print(f"  {k:32s} {v:.3e}")
    return _finish(rep, args.out)


def cmd_sweep(args) -> int:
    rep = lab.sweep_sqrt_chain(args.group, args.s, args.r, args.n_max, args.seed,
                               args.norm, args.min_eig)
    for row in rep.table or []:
        print("  n={:d}  lower={:.12f}  upper={:.12f}".format(*row))
    return _finish(rep, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvframe", description="Matrix-valued Riesz basis laboratory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config (JSON)")
    p.add_argument("config")
    p.add_argument("--out", help="output prefix (overrides config.output)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("counterexamples", help="reproduce the three 2x2 counterexamples")
    p.add_argument("--group", type=_group, default=(4,), help="cyclic orders, e.g. 4 or 2,4")
    p.add_argument("--out", default="counterexamples")
    p.set_defaults(func=cmd_counterexamples)

    p = sub.add_parser("properties", help="seeded property battery over random module maps")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-dim", type=int, default=256)
    p.add_argument("--inject", choices=["entry_swap", "transpose"],
                   help="replace the Holub map by a known bad operator")
    p.add_argument("--out", default="properties")
    p.set_defaults(func=cmd_properties)

    p = sub.add_parser("sweep", help="parameter sweeps")
    sw = p.add_subparsers(dest="sweep", required=True)
    q = sw.add_parser("sqrt-chain", help="frame bounds of T^(1/2^n) for n = 1..n_max")
    q.add_argument("--n-max", type=int, default=8)
    q.add_argument("--group", type=_group, default=(4,))
    q.add_argument("-s", type=int, default=2)
    q.add_argument("-r", type=int, default=2)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--norm", type=float, default=4.0)
    q.add_argument("--min-eig", type=float, default=1.0)
    q.add_argument("--out", default="sqrt_chain")
    q.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print("mvframe: config error", file=sys.stderr)
        for path, msg in exc.errors:
            print(f"  {path}: {msg}", file=sys.stderr)
        return lab.EXIT_CONFIG
    except MvFrameError as exc:
        print(f"mvframe: numerical failure: {exc}", file=sys.stderr)
        return lab.EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
