"""Command-line entry point: solve, oracle, validate, gen, bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .bench import load_suite, run_suite
from .errors import HamseqError
from .generators import FAMILIES, generate
from .oracle import DEFAULT_CAP, Mode, adjacency_walk, exact_solve, validate
from .policy import PolicyConfig
from .solver import run, solve_split

EXIT_FOUND = 0
EXIT_USAGE = 1
EXIT_ABORTED = 2
EXIT_MAPPING_FAILED = 3
EXIT_INVALID = 4

STATUS_EXIT = {"found": EXIT_FOUND, "aborted": EXIT_ABORTED, "mapping_failed": EXIT_MAPPING_FAILED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would collide with "aborted"
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _config(args) -> PolicyConfig:
    if not getattr(args, "config", None):
        return PolicyConfig()
    try:
        return PolicyConfig.load(args.config)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad policy config {args.config}: {exc}") from None


def cmd_solve(args) -> int:
    g = io.read_edge_list(args.input)
    mode = Mode(args.mode)
    config = _config(args)
    kw = dict(root=args.root, max_restarts=args.max_restarts, config=config,
              eta=args.eta, m=args.m, timing=args.timing)
    detail = None
    if args.split_blocks and mode is Mode.PATH:
        report = solve_split(g, seed=args.seed, **kw)
    else:
        detail = run(g, mode, args.seed, trace=bool(args.trace), **kw)
        report = detail.report
    doc = _dump(report.to_dict())
    if args.json:
        _write(args.json, doc)
    else:
        sys.stdout.write(doc)
    if args.dot:
        le = detail.outcome.le if detail is not None and detail.outcome is not None else []
        _write(args.dot, io.to_dot(g, le, report.sequence))
    if args.trace:
        lines = []
        if detail is not None and detail.mapping is not None:
            for v, u, label in detail.mapping.trace:
                lines.append({"phase": "mapping", "from": v, "to": u, "label": str(getattr(label, "value", label))})
        if detail is not None and detail.outcome is not None:
            lines.extend({"phase": "reconstruction", **ev} for ev in detail.outcome.trace)
        _write(args.trace, "".join(json.dumps(x, sort_keys=True) + "\n" for x in lines))
    return STATUS_EXIT[report.status]


def cmd_oracle(args) -> int:
    g = io.read_edge_list(args.input)
    witness = exact_solve(g, Mode(args.mode), cap=args.cap)
    if witness is None:
        print("none")
    else:
        print("found " + ",".join(map(str, witness)))
    return 0


def _parse_path(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"--path must be comma-separated integers, got {text!r}") from None


def cmd_validate(args) -> int:
    g = io.read_edge_list(args.input)
    seq = _parse_path(args.path)
    mode = Mode(args.mode)
    ok = validate(g, seq, mode)
    # the two checks are independent; a disagreement is a bug worth shouting about
    if ok != adjacency_walk(g, seq, mode):
        raise RuntimeError("validator and adjacency walk disagree")
    print("true" if ok else "false")
    return 0 if ok else EXIT_INVALID


def cmd_gen(args) -> int:
    params: dict = {"n": args.n, "p": args.p}
    if args.family == "grid":
        rows = args.rows if args.rows is not None else args.n
        cols = args.cols if args.cols is not None else rows
        if rows is None:
            raise UsageError("grid needs --rows/--cols or --n")
        params = {"rows": rows, "cols": cols}
    elif args.family == "named":
        if not args.name:
            raise UsageError("named needs --name")
        params = {"name": args.name}
    elif args.n is None:
        raise UsageError(f"{args.family} needs --n")
    g = generate(args.family, params, args.seed)
    text = io.format_edge_list(g, f"{args.family} {json.dumps(params, sort_keys=True)} seed={args.seed}")
    _write(args.out, text)
    return 0


def cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    doc = run_suite(suite, _config(args), workers=args.workers, split_blocks=args.split_blocks)
    _write(args.out, _dump(doc))
    print(f"{doc['found']}/{doc['instances']} found, mean mu_x {doc['mean_mu_x']:.4f}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hamseq", description="Hamiltonian path/circuit heuristic solver with an exact oracle.")
    p.add_argument("--dump-config", action="store_true", help="print the default policy config as JSON and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", help="run the two-phase heuristic")
    s.add_argument("--input", required=True)
    s.add_argument("--mode", choices=["path", "circuit"], default="circuit")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--root", type=int)
    s.add_argument("--max-restarts", type=int, help="mapping roots to try (default: n)")
    s.add_argument("--config", help="policy config JSON")
    s.add_argument("--json", help="write the report here instead of stdout")
    s.add_argument("--dot", help="write the final overlay as DOT")
    s.add_argument("--trace", help="write a JSONL trace of both phases")
    s.add_argument("--split-blocks", action="store_true",
                   help="path mode: solve each biconnected block separately and stitch")
    s.add_argument("--eta", type=int, help="non-canonical: override the local step budget (default n)")
    s.add_argument("--m", type=int, help="non-canonical: override the global step budget (default (n^2-n)/2)")
    s.add_argument("--timing", action="store_true", help="add elapsed_ms to the report (breaks byte-identity)")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact existence check with a witness")
    o.add_argument("--input", required=True)
    o.add_argument("--mode", choices=["path", "circuit"], default="circuit")
    o.add_argument("--cap", type=int, default=DEFAULT_CAP, help="refuse graphs larger than this")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("validate", help="check a vertex sequence")
    v.add_argument("--input", required=True)
    v.add_argument("--mode", choices=["path", "circuit"], default="path")
    v.add_argument("--path", required=True, help='comma-separated vertices, e.g. "0,1,2,3"')
    v.set_defaults(func=cmd_validate)

    gn = sub.add_parser("gen", help="write a generated instance as an edge list")
    gn.add_argument("--family", choices=FAMILIES, required=True)
    gn.add_argument("--n", type=int)
    gn.add_argument("--p", type=float, default=0.15)
    gn.add_argument("--rows", type=int)
    gn.add_argument("--cols", type=int)
    gn.add_argument("--name")
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--out", default="-")
    gn.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a suite manifest and aggregate")
    b.add_argument("--suite", help="manifest JSON (default: built-in smoke suite)")
    b.add_argument("--out", default="-")
    b.add_argument("--config", help="policy config JSON")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--split-blocks", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.dump_config:
            sys.stdout.write(_dump(PolicyConfig().to_dict()))
            return 0
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"hamseq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HamseqError, OSError) as exc:
        print(f"hamseq: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
