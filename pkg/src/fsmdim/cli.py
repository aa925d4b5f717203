"""Command-line front end: ``fsmdim <subcommand> ...``.

Inputs are file paths, ``-`` for stdin, or inline generator specs of the form
``gen:KIND;key=value;...`` (for example ``gen:champernowne;k=2;n=1024``).
Reports are JSON by default and carry a ``schema_version`` field; grid data
can also be written as CSV.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .alphabet import (
    ProbMeasure, SymbolString, format_symbols, gen_champernowne, gen_iid, gen_periodic,
    pair, parse_symbols,
)
from .blockstats import (
    block_freq_table, joint_block_freq_table, marginals, mutual_information, shannon_entropy,
)
from .dimension import (
    DEFAULT_COVERAGE, DEFAULT_ELL_MAX, DEFAULT_TAIL_FRACTION, estimate_dim, estimate_mdim,
)
from .errors import (
    ERROR_CLASSES, EXIT_CHECK_FAILED, EXIT_IO, EXIT_USAGE, FsmdimError, InvalidArgument,
    MachineFormatError,
)
from .fsc import (
    DEFAULT_IL_BUDGET, DEFAULT_KRAFT_BUDGET, Fsc, check_il, epsilon_fsc, identity_fsc,
    kraft_audit, output_length,
)
from .huffman import build_for_string
from .ratios import catalog_rho, catalog_rho_joint, mutual_ratio, rho_beta, rho_c
from .verify import compare_golden, report_json, run_suite

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# input handling


def _parse_gen_spec(spec: str) -> SymbolString:
    kind, _, rest = spec.partition(";")
    opts = dict(item.split("=", 1) for item in rest.split(";") if item)
    return _generate(kind, opts)


def _generate(kind: str, opts: dict) -> SymbolString:
    try:
        n = int(opts["n"])
        if kind == "champernowne":
            return gen_champernowne(int(opts.get("k", 2)), n)
        if kind == "iid":
            return gen_iid(ProbMeasure.parse(opts["measure"]), n, int(opts.get("seed", 0)))
        if kind == "periodic":
            k = int(opts["k"]) if opts.get("k") else None
            return gen_periodic([int(c) for c in opts["pattern"]], n, k)
    except KeyError as exc:
        raise InvalidArgument(f"generator {kind!r} needs option {exc.args[0]!r}") from None
    raise InvalidArgument(f"unknown generator kind {kind!r}")


def load_sequence(source: str, k: int, mode: str) -> SymbolString:
    if source.startswith("gen:"):
        return _parse_gen_spec(source[4:])
    raw = sys.stdin.buffer.read() if source == "-" else Path(source).read_bytes()
    return parse_symbols(raw, k, mode)


def _load_pair(args) -> tuple[SymbolString, SymbolString]:
    u = load_sequence(args.inputs[0], args.k, args.mode)
    w = load_sequence(args.inputs[1], args.k, args.mode)
    pair(u, w, args.policy)  # validates lengths and alphabets
    n = min(len(u), len(w))
    return u[:n], w[:n]


def load_machine(spec: str) -> Fsc:
    """A machine file, or ``identity:M`` / ``epsilon:M`` for the built-in machines."""
    head, _, arg = spec.partition(":")
    if head in ("identity", "epsilon") and arg.isdigit():
        m = int(arg)
        return identity_fsc(m) if head == "identity" else epsilon_fsc(m)
    return Fsc.from_json(Path(spec).read_text())


def _parse_grid(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidArgument(f"bad n grid {text!r}") from None


def _parse_budgets(text: str | None) -> list[tuple[int, int]] | None:
    if not text:
        return None
    out = []
    for item in text.split(","):
        r, _, t = item.partition("x")
        try:
            out.append((int(r), int(t or r)))
        except ValueError:
            raise InvalidArgument(f"bad budget {item!r}; expected RxT") from None
    return out


# ---------------------------------------------------------------------------
# output


def _envelope(command: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **body}


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, default=str), out)


def _describe_input(source: str, u: SymbolString) -> dict:
    return {"source": source, "n": len(u), "k": u.k}


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    opts = {"n": args.n, "k": args.k, "seed": args.seed}
    if args.measure:
        opts["measure"] = args.measure
    if args.pattern:
        opts["pattern"] = args.pattern
    if args.kind == "periodic" and args.k_given is None:
        opts.pop("k")
    u = _generate(args.kind, {key: str(v) for key, v in opts.items() if v is not None})
    data = format_symbols(u, args.mode)
    header = f"# fsmdim gen kind={args.kind} n={len(u)} k={u.k}"
    if args.kind == "iid":
        header += f" measure={args.measure} seed={args.seed} prng=PCG64"
    if args.kind == "periodic":
        header += f" pattern={args.pattern}"
    print(header, file=sys.stderr)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data + (b"\n" if args.mode == "digits" else b""))
        sys.stdout.flush()
    return 0


def _grid_kwargs(args) -> dict:
    return {"ell_max": args.ell_max, "n_grid": _parse_grid(args.n_grid),
            "tail_fraction": args.tail_fraction, "coverage": args.coverage}


def cmd_dim(args) -> int:
    u = load_sequence(args.input, args.k, args.mode)
    est = estimate_dim(u, **_grid_kwargs(args))
    if args.format == "csv":
        _emit(est.grid.to_csv(), args.out)
    else:
        _emit_json(_envelope("dim", {"input": _describe_input(args.input, u), **est.to_dict()}), args.out)
    return 0


def cmd_mdim(args) -> int:
    u, w = _load_pair(args)
    est = estimate_mdim(u, w, **_grid_kwargs(args), budgets=_parse_budgets(args.budgets),
                        cross_check=not args.no_cross_check)
    if args.format == "csv":
        _emit(est.grid.to_csv(), args.out)
    else:
        body = {"inputs": [_describe_input(s, x) for s, x in zip(args.inputs, (u, w))],
                "policy": args.policy, **est.to_dict()}
        _emit_json(_envelope("mdim", body), args.out)
    return 0


def _ratio_table(report) -> str:
    rows = [("member", "states", "output_bits", "ratio")]
    for m in report.members:
        rows.append((m["member"], str(m["states"]), str(m["bits"]), f"{m['ratio']:.6f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows]
    lines.append(f"best={report.best}  upper={report.upper:.6f}  lower={report.lower:.6f}")
    return "\n".join(lines)


def cmd_entropy(args) -> int:
    u = load_sequence(args.input, args.k, args.mode)
    n = (len(u) // args.ell) * args.ell
    table = block_freq_table(u[:n], args.ell)
    h = shannon_entropy(table)
    report = catalog_rho(u, args.r) if args.r else None
    if args.format == "csv":
        _emit(table.to_csv(), args.out)
    elif args.format == "table":
        text = f"ell={args.ell} n={n} H={h:.6f} rate={h / (args.ell * math.log2(u.k)):.6f}"
        if report is not None:
            text += "\n" + _ratio_table(report)
        _emit(text, args.out)
    else:
        body = {"input": _describe_input(args.input, u), "ell": args.ell, "n_used": n,
                "entropy_bits": h, "rate": h / (args.ell * math.log2(u.k)),
                "table": table.to_dict()}
        if report is not None:
            body["catalog"] = report.to_dict()
        _emit_json(_envelope("entropy", body), args.out)
    return 0


def cmd_mutual(args) -> int:
    u, w = _load_pair(args)
    n = (len(u) // args.ell) * args.ell
    j = joint_block_freq_table(u[:n], w[:n], args.ell)
    first, second = marginals(j)
    mi = mutual_information(j)
    scale = args.ell * math.log2(u.k)
    if args.format == "csv":
        _emit(j.to_csv(), args.out)
        return 0
    body = {"inputs": [_describe_input(s, x) for s, x in zip(args.inputs, (u, w))],
            "ell": args.ell, "n_used": n,
            "H_u": shannon_entropy(first), "H_w": shannon_entropy(second),
            "H_joint": shannon_entropy(j), "mutual_information_bits": mi, "rate": mi / scale}
    if args.r and args.t:
        body["mutual_ratio"] = mutual_ratio(u, w, args.r, args.t).to_dict()
    if args.r and args.format == "table":
        text = f"ell={args.ell} n={n} I={mi:.6f} rate={mi / scale:.6f}\n"
        text += _ratio_table(catalog_rho_joint(u, w, args.r))
        _emit(text, args.out)
        return 0
    _emit_json(_envelope("mutual", body), args.out)
    return 0


def cmd_machine_compress(args) -> int:
    C = load_machine(args.machine)
    u = load_sequence(args.input, args.k, args.mode)
    body = {"machine": C.provenance or args.machine, "input": _describe_input(args.input, u),
            "output_bits": output_length(C, u), "rho": rho_c(C, u)}
    if args.beta:
        body["rho_beta"] = rho_beta(C, u, ProbMeasure.parse(args.beta))
    _emit_json(_envelope("machine compress", body), args.out)
    return 0


def cmd_machine_check_il(args) -> int:
    C = load_machine(args.machine)
    v = check_il(C, budget=args.budget, use_certificate=not args.no_certificate)
    _emit_json(_envelope("machine check-il", {"machine": C.provenance or args.machine, **v.to_dict()}),
               args.out)
    return 0


def cmd_machine_kraft(args) -> int:
    C = load_machine(args.machine)
    rep = kraft_audit(C, args.r, budget=args.budget, method=args.method)
    _emit_json(_envelope("machine kraft", {"machine": C.provenance or args.machine, **rep.to_dict()}),
               args.out)
    return 0


def cmd_machine_huffman(args) -> int:
    u = load_sequence(args.input, args.k, args.mode)
    C = build_for_string(u, args.ell)
    _emit(C.to_json(), args.out)
    return 0


def cmd_verify(args) -> int:
    selection = [s for item in args.suite for s in item.split(",") if s]
    report = run_suite(selection, trials=args.trials, seed=args.seed)
    text = report_json(report)
    _emit(text, args.out)
    if args.golden:
        golden = json.loads(Path(args.golden).read_text())
        diffs = compare_golden(report, golden)
        for d in diffs:
            print(f"golden mismatch: {d}", file=sys.stderr)
        if diffs:
            return EXIT_CHECK_FAILED
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status} {c['check']} ({c['label']}): {c['failures']} failures in "
              f"{c['assertions']} assertions", file=sys.stderr)
    return 0 if report["passed"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser


def _add_input_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=2, help="alphabet size (default 2)")
    p.add_argument("--mode", choices=["digits", "raw-bytes", "bit-packed"], default="digits",
                   help="file encoding (default digits)")


def _add_grid_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ell-max", type=int, default=DEFAULT_ELL_MAX)
    p.add_argument("--n-grid", help="comma-separated prefix lengths (default powers of two)")
    p.add_argument("--tail-fraction", type=float, default=DEFAULT_TAIL_FRACTION)
    p.add_argument("--coverage", type=int, default=DEFAULT_COVERAGE,
                   help="expected occurrences per joint block required for l* (default 25)")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    errors = "\n".join(f"  {cls.exit_code:>3}  {cls.__name__}" for cls in ERROR_CLASSES)
    epilog = (f"exit codes:\n    0  success\n  {EXIT_USAGE:>3}  usage error\n  {EXIT_IO:>3}  I/O error\n"
              f"  {EXIT_CHECK_FAILED:>3}  verification failure\n{errors}")
    parser = argparse.ArgumentParser(prog="fsmdim", epilog=epilog,
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     description="Finite-state dimension and mutual dimension toolkit.")
    parser.add_argument("--version", action="version", version=f"fsmdim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a sequence file")
    p.add_argument("--kind", choices=["champernowne", "iid", "periodic"], required=True)
    p.add_argument("--k", type=int, dest="k_given", default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--measure", help="i.i.d. weights, e.g. 0.75,0.25 or 3/4,1/4")
    p.add_argument("--pattern", help="periodic pattern as digits, e.g. 01")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["digits", "raw-bytes", "bit-packed"], default="digits")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dim", help="estimate finite-state dimension")
    p.add_argument("input")
    _add_input_opts(p)
    _add_grid_opts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("mdim", help="estimate finite-state mutual dimension")
    p.add_argument("inputs", nargs=2)
    _add_input_opts(p)
    _add_grid_opts(p)
    p.add_argument("--policy", choices=["strict", "truncate"], default="strict")
    p.add_argument("--budgets", help="cross-check budgets as RxT pairs, e.g. 4x4,16x16")
    p.add_argument("--no-cross-check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mdim)

    p = sub.add_parser("entropy", help="block frequency table and entropy of one input")
    p.add_argument("input")
    _add_input_opts(p)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--r", type=int, help="also report the catalog compression ratio at this budget")
    p.add_argument("--format", choices=["json", "csv", "table"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("mutual", help="joint block table and mutual information of two inputs")
    p.add_argument("inputs", nargs=2)
    _add_input_opts(p)
    p.add_argument("--policy", choices=["strict", "truncate"], default="strict")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--r", type=int, help="joint state budget")
    p.add_argument("--t", type=int, help="single state budget")
    p.add_argument("--format", choices=["json", "csv", "table"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mutual)

    p = sub.add_parser("machine", help="finite-state compressor tools")
    msub = p.add_subparsers(dest="action", required=True)
    mhelp = "machine JSON file, or identity:M / epsilon:M"
    q = msub.add_parser("compress", help="run a machine on an input")
    q.add_argument("machine", help=mhelp)
    q.add_argument("input")
    _add_input_opts(q)
    q.add_argument("--beta", help="measure for the beta-compression ratio")
    q.add_argument("--out")
    q.set_defaults(func=cmd_machine_compress)
    q = msub.add_parser("check-il", help="decide information losslessness")
    q.add_argument("machine", help=mhelp)
    q.add_argument("--budget", type=int, default=DEFAULT_IL_BUDGET)
    q.add_argument("--no-certificate", action="store_true", help="ignore construction certificates")
    q.add_argument("--out")
    q.set_defaults(func=cmd_machine_check_il)
    q = msub.add_parser("kraft", help="audit the generalized Kraft inequality")
    q.add_argument("machine", help=mhelp)
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--budget", type=int, default=DEFAULT_KRAFT_BUDGET)
    q.add_argument("--method", choices=["auto", "enumerate", "dp"], default="auto")
    q.add_argument("--out")
    q.set_defaults(func=cmd_machine_kraft)
    q = msub.add_parser("huffman", help="write the block-Huffman machine trained on an input")
    q.add_argument("input")
    _add_input_opts(q)
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_machine_huffman)

    p = sub.add_parser("verify", help="run the inequality verification suite")
    p.add_argument("--suite", action="append", default=None,
                   help="check name, group or 'all' (repeatable, comma-separated)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--golden", help="compare against a stored report")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        args.k = args.k_given if args.k_given is not None else 2
    if args.command == "verify" and not args.suite:
        args.suite = ["all"]
    try:
        return args.func(args)
    except FsmdimError as exc:
        print(f"fsmdim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        if isinstance(exc, json.JSONDecodeError):
            print(f"fsmdim: MachineFormatError: {exc}", file=sys.stderr)
            return MachineFormatError.exit_code
        print(f"fsmdim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
