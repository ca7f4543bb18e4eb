"""Command line front end.

Subcommands:
  homology        Betti table of H^{E_n}_*(L^n(A))
  verify-acyclic  check that representables are acyclic up to a tree degree
  d2-check        check d^2 = 0 (and anticommutation) over Z
  trees           list n-level trees up to a degree
  ss-page         first page of the E_2 spectral sequence next to its prediction

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from .encomplex import build_multicomplex, totalize
from .epicat import enumerate_trees, serialize_tree, standard_labeling
from .functors import (
    AlgebraError,
    AlgebraModule,
    CommutativeAlgebraPresentation,
    load_algebra,
    poly,
    representable,
    representable_X,
    square_zero,
    trunc_poly,
)
from .linhom import ZZ, ComplexError, Ring, homology, parse_ring
from .spectral import e2_spectral_E1

SCHEMA = 1


class InputError(ValueError):
    """Bad command line input; maps to exit code 2."""


def parse_algebra(text: str, max_weight: int | None) -> CommutativeAlgebraPresentation:
    """Builtins ``trunc-poly:m``, ``square-zero:d``, ``poly:v`` or a JSON file path."""
    head, _, tail = text.partition(":")
    if head in ("trunc-poly", "square-zero", "poly") and tail.isdigit():
        k = int(tail)
        if head == "trunc-poly":
            return trunc_poly(k)
        if head == "square-zero":
            return square_zero(k)
        if max_weight is None:
            raise InputError("poly:v is infinite dimensional; pass --max-weight")
        return poly(k, max_weight)
    path = Path(text)
    if not path.exists():
        raise InputError(f"unknown algebra {text!r}")
    try:
        return load_algebra(path)
    except (AlgebraError, json.JSONDecodeError) as exc:
        raise InputError(f"invalid algebra file {text}: {exc}") from exc


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# homology


def compute_homology_table(algebra: CommutativeAlgebraPresentation, n: int, ring: Ring,
                           max_degree: int | None, max_weight: int | None) -> dict:
    """Betti (and torsion) tables for the CLI; see ``cmd_homology``."""
    warnings: list[str] = []
    by_weight: dict[int, dict[int, int]] = {}
    torsion: dict[int, dict[int, list[int]]] = {}
    certified: int | None
    if max_weight is not None:
        if not algebra.graded:
            raise InputError("--max-weight needs a weight-graded algebra")
        bound = None if max_degree is None else max_degree + n + 1
        certified = max_degree
        for w in range(1, max_weight + 1):
            mc = build_multicomplex(AlgebraModule(algebra, n, w), bound)
            h = homology(totalize(mc, ring), ring)
            by_weight[w] = {p: b for p, b in h.betti.items() if max_degree is None or p <= max_degree}
            if h.torsion:
                torsion[w] = {p: t for p, t in h.torsion.items() if max_degree is None or p <= max_degree}
        betti: dict[int, int] = {}
        for row in by_weight.values():
            for p, b in row.items():
                betti[p] = betti.get(p, 0) + b
        warnings.append(f"weights above {max_weight} are not included")
    else:
        if max_degree is None:
            raise InputError("pass --max-degree or --max-weight")
        mc = build_multicomplex(AlgebraModule(algebra, n), max_degree + n + 1)
        h = homology(totalize(mc, ring), ring)
        certified = max_degree
        betti = {p: b for p, b in h.betti.items() if p <= max_degree}
        if h.torsion:
            torsion[0] = {p: t for p, t in h.torsion.items() if p <= max_degree}
    top = max(betti, default=-1) if max_degree is None else max_degree
    return {
        "betti": {str(p): betti.get(p, 0) for p in range(top + 1)},
        "by_weight": {str(w): {str(p): b for p, b in sorted(row.items()) if b}
                      for w, row in sorted(by_weight.items())},
        "torsion": {str(w): {str(p): t for p, t in sorted(rows.items()) if t}
                    for w, rows in sorted(torsion.items())} if ring.kind == "z" else {},
        "certified_max": certified,
        "warnings": warnings,
    }


def cmd_homology(args: argparse.Namespace) -> int:
    ring = _ring(args.ring)
    algebra = parse_algebra(args.algebra, args.max_weight)
    _positive(args.n, "--n")
    table = compute_homology_table(algebra, args.n, ring, args.max_degree, args.max_weight)
    report = {"schema": SCHEMA, "command": "homology", "n": args.n, "algebra": args.algebra,
              "ring": str(ring), **table}
    if args.format == "csv":
        _emit(_homology_csv(table), args.output)
    else:
        _emit(_dump(report), args.output)
    return 0


def _homology_csv(table: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    weights = list(table["by_weight"])
    writer.writerow(["degree", "betti"] + [f"w{w}" for w in weights])
    for p, b in table["betti"].items():
        writer.writerow([p, b] + [table["by_weight"][w].get(p, 0) for w in weights])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verification commands


def cmd_verify_acyclic(args: argparse.Namespace) -> int:
    ring = _ring(args.ring)
    _positive(args.n, "--n")
    if args.max_degree < args.n:
        raise InputError("--max-degree must be at least --n")
    failures = []
    trees = enumerate_trees(args.n, args.max_degree)
    for t in trees:
        h = homology(totalize(build_multicomplex(representable(t)), ring), ring)
        got = {p: b for p, b in h.betti.items() if b}
        expected = {0: 1} if t.is_trivial else {}
        if got != expected or any(h.torsion.values()):
            failures.append({"tree": serialize_tree(t), "betti": {str(p): b for p, b in got.items()}})
    report = {"schema": SCHEMA, "command": "verify-acyclic", "n": args.n,
              "max_degree": args.max_degree, "ring": str(ring), "trees": len(trees),
              "failures": failures, "status": "PASS" if not failures else "FAIL"}
    _emit(_dump(report), args.output)
    return 0 if not failures else 1


def cmd_d2_check(args: argparse.Namespace) -> int:
    _positive(args.n, "--n")
    rng = random.Random(args.seed)
    checked = 0
    failures: list[str] = []

    def run(module, label: str) -> None:
        nonlocal checked
        mc = build_multicomplex(module, None if module.finitely_supported else args.max_degree)
        bad = mc.check_relations()
        try:
            totalize(mc, ZZ, check=True)
        except ComplexError as exc:
            failures.append(f"{label}: {exc}")
        if bad:
            failures.append(f"{label}: relation fails at {bad[:3]}")
        checked += 1

    if args.algebra:
        algebra = parse_algebra(args.algebra, args.max_weight)
        if args.max_weight is not None:
            for w in range(1, args.max_weight + 1):
                run(AlgebraModule(algebra, args.n, w), f"{args.algebra} weight {w}")
        else:
            if args.max_degree is None:
                raise InputError("pass --max-degree or --max-weight")
            run(AlgebraModule(algebra, args.n), args.algebra)
    else:
        if args.max_degree is None:
            raise InputError("pass --max-degree for representables")
        for t in enumerate_trees(args.n, args.max_degree):
            run(representable(t), serialize_tree(t))
            if args.labeled:
                degs = tuple(rng.randint(0, 2) for _ in range(t.leaves))
                run(representable_X(standard_labeling(t, degs)), f"{serialize_tree(t)} X={list(degs)}")
    report = {"schema": SCHEMA, "command": "d2-check", "n": args.n, "checked": checked,
              "failures": failures, "status": "PASS" if not failures else "FAIL"}
    _emit(_dump(report), args.output)
    return 0 if not failures else 1


def cmd_trees(args: argparse.Namespace) -> int:
    _positive(args.n, "--n")
    if args.max_degree < args.n:
        raise InputError("--max-degree must be at least --n")
    trees = enumerate_trees(args.n, args.max_degree)
    if args.format == "json":
        _emit(_dump({"schema": SCHEMA, "command": "trees", "n": args.n, "max_degree": args.max_degree,
                     "count": len(trees), "trees": [serialize_tree(t) for t in trees]}), args.output)
    else:
        _emit("".join(serialize_tree(t) + "\n" for t in trees), args.output)
    return 0


def cmd_ss_page(args: argparse.Namespace) -> int:
    ring = _ring(args.ring)
    if not ring.is_field:
        raise InputError("the spectral sequence page needs a field")
    algebra = parse_algebra(args.algebra, args.max_weight)
    max_weight = args.max_weight
    if max_weight is None:
        if algebra.exact_below is not None or not algebra.graded:
            raise InputError("pass --max-weight")
        # E^1_{p,q} with p <= max_total involves at most max_total + 1 tensor factors
        max_weight = (args.max_total + 1) * max(algebra.weights, default=1)
    table = e2_spectral_E1(algebra, args.max_total, max_weight, ring)
    computed = table.totals(table.computed)
    predicted = table.totals(table.predicted)
    cells = sorted(set(computed) | set(predicted))
    rows = [{"p": p, "q": q, "computed": computed.get((p, q), 0), "predicted": predicted.get((p, q), 0)}
            for p, q in cells]
    status = "PASS" if table.agrees else "FAIL"
    if args.format == "json":
        _emit(_dump({"schema": SCHEMA, "command": "ss-page", "algebra": args.algebra, "ring": str(ring),
                     "max_total": args.max_total, "max_weight": max_weight,
                     "E1": rows, "status": status}), args.output)
    else:
        lines = ["   p   q  computed  predicted"]
        lines += [f"{r['p']:4d}{r['q']:4d}{r['computed']:10d}{r['predicted']:11d}" for r in rows]
        lines.append(status)
        _emit("\n".join(lines) + "\n", args.output)
    return 0 if table.agrees else 1


# ---------------------------------------------------------------------------


def _ring(text: str) -> Ring:
    try:
        return parse_ring(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _positive(value: int, flag: str) -> None:
    if value < 1:
        raise InputError(f"{flag} must be positive")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="enhom", description="Exact E_n-homology on planar level trees")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", type=Path, default=None, help="write here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    p = sub.add_parser("homology", help="Betti table of H^{E_n}_*(L^n(A))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algebra", required=True, help="trunc-poly:m, square-zero:d, poly:v or a JSON file")
    p.add_argument("--ring", default="q", help="q, z, fp:p or f:p")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("verify-acyclic", help="check acyclicity of representables")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True, help="bound on the tree degree")
    p.add_argument("--ring", default="q")
    common(p)
    p.set_defaults(func=cmd_verify_acyclic)

    p = sub.add_parser("d2-check", help="check that the differentials square to zero over Z")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algebra", default=None, help="omit to check representables")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--labeled", action="store_true", help="also check random graded labellings")
    common(p)
    p.set_defaults(func=cmd_d2_check)

    p = sub.add_parser("trees", help="list n-level trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    common(p)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("ss-page", help="E^1 of the E_2 spectral sequence with its prediction")
    p.add_argument("--algebra", required=True)
    p.add_argument("--ring", default="q")
    p.add_argument("--max-total", type=int, default=5, help="bound on p + q")
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    common(p)
    p.set_defaults(func=cmd_ss_page)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (InputError, AlgebraError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
