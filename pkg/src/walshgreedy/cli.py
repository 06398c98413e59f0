"""Command-line front end.

Usage:
    walshgreedy lebesgue --max-k 10              # block maximizers of ||D_m||_1
    walshgreedy kernel --m 11 --level 4          # cell values of D_11
    walshgreedy build --blocks 3 --format tsv    # the construction as an expansion file
    walshgreedy verify --blocks 4                # divergence certificate (exit 0 iff passed)
    walshgreedy greedy-run --input f.tsv --m 5   # G_5 of an expansion file

Exit codes: 0 success, 1 usage/input/resource error, 2 a certified bound failed.
Exact rationals are written as ``p/q``; a ``*_float`` field sits next to each.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .counterexample import ConstructionConfig, assemble_expansion, choose_sequences, verify_theorem
from .dirichlet import block_max_search, check_log_bound, dirichlet_step
from .dyadic import level_cap, to_float_samples
from .errors import CertificationError, ConstructionError, ResourceError, StageError
from .greedy import Expansion, Explicit, Symbolic, Term, greedy_approximant, greedy_order, prefix_norms

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED_BOUND = 2


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _unlimited_int_digits() -> Iterator[None]:
    # huge dyadic denominators exceed the default int->str digit limit
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    saved = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(saved)


def fraction_str(q: Fraction | int) -> str:
    q = Fraction(q)
    with _unlimited_int_digits():
        return f"{q.numerator}/{q.denominator}"


def coeff_str(c) -> str:
    if isinstance(c, Symbolic):
        return f"sym:{c.nu},{c.n}"
    return fraction_str(c.value)


def parse_coeff(text: str):
    text = text.strip()
    if text.startswith("sym:"):
        nu, n = (int(part) for part in text[4:].split(","))
        return Symbolic(nu, n)
    return Explicit(Fraction(text))


def parse_expansion(text: str) -> Expansion:
    """Read ``index<TAB>coeff`` lines; ``coeff`` is ``p/q`` or ``sym:nu,n``."""
    pairs: dict[int, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 'index<TAB>coeff', got {raw!r}")
        try:
            index = int(fields[0])
            coeff = parse_coeff(fields[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if index < 0:
            raise ValueError(f"line {lineno}: negative Walsh index {index}")
        if index in pairs:
            raise ValueError(f"line {lineno}: duplicate Walsh index {index}")
        pairs[index] = coeff
    if not pairs:
        raise ValueError("expansion file has no terms")
    return Expansion(tuple(Term(i, pairs[i]) for i in sorted(pairs)))


def format_expansion(e: Expansion) -> str:
    lines = ["# index\tcoeff"]
    lines += [f"{t.index}\t{coeff_str(t.coeff)}" for t in e]
    return "\n".join(lines) + "\n"


def _coeff_float(c) -> float:
    # below 2**-1100 the tail cannot move the nearest float of 1/nu**2
    if isinstance(c, Symbolic) and c.n > 1100:
        return float(c.base)
    return float(c.exact())


def _exact(q: Fraction | None) -> str | None:
    return None if q is None else fraction_str(q)


def _float(q: Fraction | None) -> float | None:
    return None if q is None else float(q)


def _render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _render_csv(rows: Sequence[dict[str, Any]]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = os.path.abspath(output)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".walshgreedy-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


# -- commands ---------------------------------------------------------------

def cmd_lebesgue(args) -> tuple[str, int]:
    if args.max_k < 1:
        raise UsageError("--max-k must be >= 1")
    rows = []
    for k in range(1, args.max_k + 1):
        rec = block_max_search(k)
        holds, route = check_log_bound(rec.m, rec.lebesgue)
        rows.append({
            "k": k,
            "m": rec.m,
            "lebesgue": fraction_str(rec.lebesgue),
            "lebesgue_float": float(rec.lebesgue),
            "log_bound_holds": holds,
            "route": route,
        })
    text = _render_json(rows) if args.format == "json" else _render_csv(rows)
    return text, EXIT_OK


def cmd_kernel(args) -> tuple[str, int]:
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    if args.level is None:
        args.level = max(0, (args.m - 1).bit_length())
    D = dirichlet_step(args.m, args.level)
    floats = to_float_samples(D)
    rows = [
        {"cell": t, "x_left": fraction_str(Fraction(t, 1 << D.level)),
         "value": fraction_str(v), "value_float": x}
        for t, (v, x) in enumerate(zip(D.values, floats))
    ]
    if args.format == "json":
        return _render_json({"m": args.m, "level": D.level, "cells": rows}), EXIT_OK
    return _render_csv(rows), EXIT_OK


def _config(args) -> ConstructionConfig:
    cap = args.level_cap if args.level_cap is not None else level_cap()
    return ConstructionConfig(blocks=args.blocks, level_cap=cap,
                              grid_level_max=getattr(args, "grid_level_max", 12))


def cmd_build(args) -> tuple[str, int]:
    if args.blocks < 1:
        raise UsageError("need V >= 1")
    specs = choose_sequences(_config(args))
    e = assemble_expansion(specs)
    if args.format == "tsv":
        return format_expansion(e), EXIT_OK
    rows = [
        {"index": t.index, "nu": t.coeff.nu, "coeff": coeff_str(t.coeff), "coeff_float": _coeff_float(t.coeff)}
        for t in e
    ]
    if args.format == "json":
        blocks = [{"nu": s.nu, "k_nu": s.k_nu, "window": list(s.window)} for s in specs]
        return _render_json({"blocks": blocks, "terms": rows}), EXIT_OK
    return _render_csv(rows), EXIT_OK


def _record_dict(r) -> dict[str, Any]:
    out: dict[str, Any] = {"nu": r.nu, "k_nu": r.k_nu, "m_nu": r.m_nu}
    for name in ("lebesgue", "j2_bound", "gap_lower"):
        out[name] = _exact(getattr(r, name))
        out[f"{name}_float"] = _float(getattr(r, name))
    out["passed"] = r.passed
    out["c1"] = _exact(r.c1)
    out["c1_float"] = _float(r.c1)
    out["log_bound_holds"] = r.log_bound_holds
    out["certificate_only"] = r.certificate_only
    out["j1_grid_norm"] = _exact(r.j1_grid_norm)
    out["greedy_start"] = r.greedy_start
    out["greedy_m"] = r.greedy_m
    for name in ("greedy_lebesgue", "greedy_j2_bound", "greedy_gap_lower", "greedy_gap_grid",
                 "greedy_gap_remainder"):
        out[name] = _exact(getattr(r, name))
        out[f"{name}_float"] = _float(getattr(r, name))
    out["witness_passed"] = r.witness_passed
    out["grid_consistent"] = r.grid_consistent
    return out


def cmd_verify(args) -> tuple[str, int]:
    if args.blocks < 2:
        raise UsageError("need V ≥ 2 (the divergence chain starts at nu = 2)")
    report = verify_theorem(_config(args))
    code = EXIT_OK if report.all_passed else EXIT_FAILED_BOUND
    records = [_record_dict(r) for r in report.records]
    if args.format == "csv":
        return _render_csv(records), code
    payload = {
        "blocks": report.blocks,
        "k_sequence": list(report.k_sequence),
        "records": records,
        "l1_norm_G": _exact(report.l1_norm_G),
        "l1_norm_G_float": _float(report.l1_norm_G),
        "l1_upper_bound_G": _exact(report.l1_upper_bound_G),
        "l1_upper_bound_G_float": _float(report.l1_upper_bound_G),
        "l1_upper_bound_H": _exact(report.l1_upper_bound_H),
        "l1_upper_bound_H_float": _float(report.l1_upper_bound_H),
        "h_tail_mass_float": _float(report.h_tail_mass),
        "l1_bounds_hold": report.l1_bounds_hold,
        "C1": _exact(report.C1),
        "C1_float": _float(report.C1),
        "min_gap_lower": _exact(report.min_gap_lower),
        "min_gap_lower_float": _float(report.min_gap_lower),
        "all_passed": report.all_passed,
    }
    return _render_json(payload), code


def cmd_greedy_run(args) -> tuple[str, int]:
    try:
        with open(args.input, encoding="utf-8") as fh:
            e = parse_expansion(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    if not 0 <= args.m <= len(e):
        raise UsageError(f"--m must lie in [0, {len(e)}]")
    level = e.min_level if args.level is None else args.level
    if level < e.min_level:
        raise UsageError(f"--level {level} is too coarse; the expansion needs {e.min_level}")
    order = greedy_order(e, exact=True)
    G, remainder = greedy_approximant(e, args.m, level, args.precision_bits, order)
    floats = to_float_samples(G)
    if args.format == "csv":
        rows = [{"cell": t, "x_left": fraction_str(Fraction(t, 1 << level)),
                 "value": fraction_str(v), "value_float": x}
                for t, (v, x) in enumerate(zip(G.values, floats))]
        return _render_csv(rows), EXIT_OK
    norms = prefix_norms(e, level, args.precision_bits, order)
    payload = {
        "m": args.m,
        "level": level,
        "selected_indices": [e.terms[p].index for p in order[: args.m]],
        "l1_norm": fraction_str(norms[args.m]),
        "l1_norm_float": float(norms[args.m]),
        "f_l1_norm": fraction_str(norms[-1]),
        "f_l1_norm_float": float(norms[-1]),
        "remainder": fraction_str(remainder),
        "remainder_float": float(remainder),
        "samples": floats,
    }
    return _render_json(payload), EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="walshgreedy", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    p = sub.add_parser("lebesgue", help="block maximizers of the Walsh Lebesgue constants")
    p.add_argument("--max-k", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_lebesgue)

    p = sub.add_parser("kernel", help="cell values of a Dirichlet kernel")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--level", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("build", help="emit the truncated construction")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--level-cap", type=int, default=None)
    common(p, ("json", "csv", "tsv"))
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="certify the divergence bound")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--level-cap", type=int, default=None)
    p.add_argument("--grid-level-max", type=int, default=12,
                   help="largest grid level used for cross-checks")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("greedy-run", help="greedy approximant of an expansion file")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--precision-bits", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_greedy_run)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"walshgreedy: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text, code = args.func(args)
        _emit(text, args.output)
    except UsageError as exc:
        print(f"walshgreedy: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ResourceError, ConstructionError, CertificationError, StageError, OSError) as exc:
        print(f"walshgreedy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return code


def main() -> None:
    sys.exit(run())
