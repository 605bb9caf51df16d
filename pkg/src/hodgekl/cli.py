"""Command-line interface.

Subcommands:

  block build     construct a built-in block and write it to a file
  block validate  check a block file against every structural invariant
  block info      print parameter counts and the length statistics table
  compute         emit a multiplicity table (lvm, mixed, hodge, signature)
  verify          run the full verification battery on a block file

Exit codes: 0 success; 1 file or schema error; 2 validation failure;
3 internal invariant failure during compute; 4 verification failure;
64 command-line usage error.  All output is deterministic byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import block as blockmod
from .block import (
    Block,
    BlockError,
    SchemaError,
    ValidationFailure,
    build_complex_group,
    load_block,
    save_block,
    validate,
)
from .duality import compute_duality
from .emit import (
    hecke_to_json,
    matrix_to_csv,
    matrix_to_json,
    matrix_to_latex,
    render_json,
    rmatrix_to_csv,
    rmatrix_to_json,
    rmatrix_to_latex,
)
from .hecke import HeckeContext
from .hodgepoly import hodge_from_mixed, mixed_from_lvm, signature_from_hodge
from .kl import compute_lvm
from .verify import run_verification

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_VALIDATION = 2
EXIT_COMPUTE = 3
EXIT_VERIFY = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_lambda(values: List[str]) -> List[Fraction]:
    out = []
    for chunk in values:
        for piece in chunk.replace(",", " ").split():
            out.append(Fraction(piece))
    return out


def _build(group: str, lam: List[Fraction]) -> Block:
    if group.startswith("complex:"):
        rd_name = group.split(":", 1)[1]
        return build_complex_group(rd_name, lam)
    builder = blockmod.BUILDERS.get(group)
    if builder is None:
        known = sorted(blockmod.BUILDERS) + ["complex:<rd>"]
        raise BlockError(f"unknown group {group!r}; choose one of {known}")
    return builder(lam)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_block(args) -> int:
    if args.block_cmd == "build":
        try:
            lam = _parse_lambda(args.lam)
            blk = _build(args.group, lam)
        except (BlockError, ValidationFailure, ValueError, ZeroDivisionError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_VALIDATION
        save_block(blk, args.out)
        print(f"wrote {args.out}: {len(blk.parameters)} parameters, "
              f"{len(blk.twists)} twists, {len(blk.orbits)} orbits")
        return EXIT_OK
    if args.block_cmd == "validate":
        try:
            blk = load_block(args.file)
        except (OSError, SchemaError) as e:
            print(f"schema error: {e}", file=sys.stderr)
            return EXIT_SCHEMA
        violations = validate(blk, raise_on_failure=False)
        if violations:
            for v in violations:
                print(f"violation: {v}")
            return EXIT_VALIDATION
        print("block is valid")
        return EXIT_OK
    if args.block_cmd == "info":
        try:
            blk = load_block(args.file)
        except (OSError, SchemaError) as e:
            print(f"schema error: {e}", file=sys.stderr)
            return EXIT_SCHEMA
        print(f"group: {blk.group}")
        print(f"rank: {blk.rd.rank}  dimH: {blk.dimH}")
        print(f"base lambda: {blk.base_lambda}")
        print(f"twists: {len(blk.twists)}")
        print(f"orbits: {len(blk.orbits)}")
        print(f"parameters: {len(blk.parameters)}")
        print("id | twist | ell | ell_I | ell_o | ell_H")
        for p in blk.sorted_params():
            print(f"{p.id} | {p.twist} | {p.ell} | {p.ell_I} | {p.ell_o} | {p.ell_H}")
        return EXIT_OK
    raise AssertionError("unreachable")


def cmd_compute(args) -> int:
    try:
        blk = load_block(args.file)
    except (OSError, SchemaError) as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    violations = validate(blk, raise_on_failure=False)
    if violations:
        print(f"validation failure: {violations[0]}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        ctx = HeckeContext(blk)
        rmat = compute_duality(blk, ctx)
        lvm = compute_lvm(blk, rmat)
        table = lvm
        if args.table in ("mixed", "hodge", "signature"):
            table = mixed_from_lvm(blk, lvm)
        if args.table in ("hodge", "signature"):
            table = hodge_from_mixed(blk, table)
        if args.table == "signature":
            table = signature_from_hodge(blk, table)
        if args.format == "json":
            text = render_json(matrix_to_json(blk, table))
        elif args.format == "csv":
            text = matrix_to_csv(blk, table)
        else:
            text = matrix_to_latex(blk, table)
        extras = []
        if args.dump_hecke:
            extras.append((args.dump_hecke, render_json(hecke_to_json(blk, ctx))))
        if args.dump_r:
            if args.format == "csv":
                rtext = rmatrix_to_csv(blk, rmat)
            elif args.format == "latex":
                rtext = rmatrix_to_latex(blk, rmat)
            else:
                rtext = render_json(rmatrix_to_json(blk, rmat))
            extras.append((args.dump_r, rtext))
        if args.dump_lvm:
            extras.append((args.dump_lvm, render_json(matrix_to_json(blk, lvm))))
    except Exception as e:  # noqa: BLE001 - any internal failure is exit 3
        print(f"compute error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    _write(text, args.out)
    for path, content in extras:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        blk = load_block(args.file)
    except (OSError, SchemaError) as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    results = run_verification(blk, with_oracle=args.oracle)
    for r in results:
        print(f"{r.status.upper():4s} {r.name}" + (f"  ({r.witness})" if r.witness else ""))
    if args.report:
        payload = {
            "group": blk.group,
            "checks": [r.to_json() for r in results],
            "ok": all(r.ok for r in results),
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(render_json(payload))
    if not all(r.ok for r in results):
        first = next(r for r in results if not r.ok)
        print(f"verification failed: {first.name}: {first.witness}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hodgekl", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_block = sub.add_parser("block", help="build, validate or inspect block files")
    bsub = p_block.add_subparsers(dest="block_cmd", required=True)
    p_build = bsub.add_parser("build", help="construct a built-in block")
    p_build.add_argument("--group", required=True,
                         help="sl2r | pgl2r | sl2c | su21 | sl2rxsl2r | complex:<rd>")
    p_build.add_argument("--lambda", dest="lam", nargs="+", required=True,
                         help="rational coordinates of the base twist")
    p_build.add_argument("--out", required=True)
    p_val = bsub.add_parser("validate", help="validate a block file")
    p_val.add_argument("file")
    p_info = bsub.add_parser("info", help="print block statistics")
    p_info.add_argument("file")

    p_compute = sub.add_parser("compute", help="emit a multiplicity table")
    p_compute.add_argument("table", choices=["lvm", "mixed", "hodge", "signature"])
    p_compute.add_argument("file")
    p_compute.add_argument("--format", choices=["json", "csv", "latex"], default="json")
    p_compute.add_argument("--out")
    p_compute.add_argument("--dump-hecke", dest="dump_hecke")
    p_compute.add_argument("--dump-R", dest="dump_r")
    p_compute.add_argument("--dump-lvm", dest="dump_lvm")

    p_verify = sub.add_parser("verify", help="run the verification battery")
    p_verify.add_argument("file")
    p_verify.add_argument("--oracle", action="store_true",
                          help="also solve the duality constraints independently")
    p_verify.add_argument("--report", help="write a machine-readable report")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.cmd == "block":
        return cmd_block(args)
    if args.cmd == "compute":
        return cmd_compute(args)
    if args.cmd == "verify":
        return cmd_verify(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
