"""Deterministic command-line reports over the library layer.

Every subcommand emits a ReportEnvelope: the command, its input parameters,
the toolkit version, a list of item records and free-form notes.  JSON
output is byte-stable (sorted keys, exact integers, rationals as "num/den",
cyclotomic integers as coefficient lists tagged with their order).  CSV is
offered only for ``scan``, whose items are flat rows.  Exit codes: 0 on
success, 2 on domain errors (regular prime, trivial class group, closure
overflow), 1 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, arith, dickson, dims, inertia, quadforms, witness
from .cyclotomic import CycloValue


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit code 1
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def serialize(obj):
    """Recursively convert report objects into JSON-ready structures."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, CycloValue):
        return {"order": obj.m, "coeffs": list(obj.canonical())}
    if dataclasses.is_dataclass(obj):
        return {f.name: serialize(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): serialize(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return sorted(serialize(v) for v in obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [serialize(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclasses.dataclass
class ReportEnvelope:
    command: str
    parameters: dict
    version: str
    items: list
    notes: list


# ---------------------------------------------------------------------------
# Subcommand handlers, each returning a ReportEnvelope
# ---------------------------------------------------------------------------


def _cmd_irregular(args) -> ReportEnvelope:
    if args.max < 5:
        raise ValueError(f"--max must be >= 5, got {args.max}")
    items = []
    for p in arith.primes_in_range(5, args.max):
        idx = arith.irregular_indices(p)
        if idx:
            items.append({"p": p, "indices": sorted(idx)})
    return ReportEnvelope(
        "irregular",
        {"max": args.max},
        __version__,
        items,
        [f"{len(items)} irregular primes <= {args.max}"],
    )


def _cmd_classgroup(args) -> ReportEnvelope:
    grp = quadforms.class_group(-args.p)
    item = {
        "discriminant": -args.p,
        "class_number": grp.order,
        "structure": list(grp.structure),
        "generators": list(grp.generators),
        "reduced_forms": list(quadforms.reduced_forms(-args.p)),
    }
    return ReportEnvelope(
        "classgroup",
        {"p": args.p},
        __version__,
        [item],
        [f"invariant factors {list(grp.structure)}"],
    )


def _cmd_theta(args) -> ReportEnvelope:
    chars = quadforms.characters(-args.p)
    if not 0 <= args.char < len(chars):
        raise ValueError(f"--char must be in [0, {len(chars) - 1}], got {args.char}")
    char = chars[args.char]
    theta = quadforms.theta_coefficients(-args.p, char, args.coeffs)
    items = [{"n": n, "a": theta.coefficients[n]} for n in range(1, args.coeffs + 1)]
    return ReportEnvelope(
        "theta",
        {"p": args.p, "coeffs": args.coeffs, "char": args.char},
        __version__,
        items,
        [
            f"character exponents {list(char.exponents)} of order {char.order}",
            f"values live in the cyclotomic ring of order {theta.char_order}",
        ],
    )


def _parse_field(spec: str) -> dickson.GFq:
    parts = spec.split(",")
    if len(parts) not in (1, 2):
        raise ValueError(f"--field expects p or p,r; got {spec!r}")
    try:
        p = int(parts[0])
        r = int(parts[1]) if len(parts) == 2 else 1
    except ValueError:
        raise ValueError(f"--field expects integers, got {spec!r}") from None
    return dickson.GFq(p, r)


def _parse_gen(field: dickson.GFq, spec: str) -> dickson.Mat2:
    try:
        entries = [int(x) for x in spec.split(",")]
    except ValueError:
        raise ValueError(f"--gen expects four integers, got {spec!r}") from None
    if len(entries) != 4:
        raise ValueError(f"--gen expects four entries, got {len(entries)}")
    return dickson.Mat2(field, *(e % field.q if field.r == 1 else e for e in entries))


def _cmd_dickson(args) -> ReportEnvelope:
    field = _parse_field(args.field)
    gens = [_parse_gen(field, g) for g in args.gen]
    if args.budget is not None:
        budget = args.budget
    else:
        budget = int(os.environ.get("GIL_MAX_CLOSURE", dickson.DEFAULT_CLOSURE_BUDGET))
    report = dickson.classify(gens, budget=budget)
    return ReportEnvelope(
        "dickson classify",
        {"field": args.field, "gen": list(args.gen), "budget": budget},
        __version__,
        [report],
        [f"projective closure has {report.group_order} elements"],
    )


def _cmd_inertia_local(args) -> ReportEnvelope:
    verdict = inertia.classify_weight2_local(args.p, args.j, args.vcase)
    return ReportEnvelope(
        "inertia local",
        {"p": args.p, "j": args.j, "vcase": args.vcase},
        __version__,
        [verdict],
        [],
    )


def _cmd_inertia_eta(args) -> ReportEnvelope:
    if args.max < 7:
        raise ValueError(f"--max must be >= 7, got {args.max}")
    rep = witness.scan("eta", 7, args.max, jobs=args.jobs)
    return ReportEnvelope(
        "inertia eta",
        {"max": args.max},
        __version__,
        list(rep.items),
        [
            f"{rep.aggregates['counterexamples']} counterexamples "
            f"among {rep.aggregates['scanned']} primes scanned"
        ],
    )


def _cmd_bounds(args) -> ReportEnvelope:
    b = inertia.semistable_index_bound(args.d)
    prime_bound = inertia.exceptional_prime_bound(args.d)
    item = {
        "d": args.d,
        "semistable_coarse": b.coarse,
        "semistable_refined": b.refined,
        "exceptional_prime_bound": prime_bound,
        "ratio": prime_bound // b.coarse,
    }
    return ReportEnvelope(
        "bounds exceptional", {"d": args.d}, __version__, [item], []
    )


def _cmd_dims(args) -> ReportEnvelope:
    if args.x0 is not None:
        item, params = dims.genus_X0(args.x0), {"x0": args.x0}
    elif args.x1 is not None:
        item = {"level": args.x1, "genus": dims.genus_X1(args.x1)}
        params = {"x1": args.x1}
    elif args.new is not None:
        item = {"level": args.new, "dim_new": dims.dim_S2_new_Gamma0(args.new)}
        params = {"new": args.new}
    else:
        item = {"p": args.j1, "dim": dims.dim_J1_prime(args.j1)}
        params = {"j1": args.j1}
    return ReportEnvelope("dims", params, __version__, [item], [])


def _cmd_witness(args) -> ReportEnvelope:
    builders = {
        "borel": witness.borel_witness,
        "lr": witness.dihedral_lr_witness,
        "hida": witness.dihedral_hida_witness,
    }
    item = builders[args.witness_kind](args.p)
    return ReportEnvelope(
        f"witness {args.witness_kind}",
        {"p": args.p},
        __version__,
        [item],
        [],
    )


def _cmd_scan(args) -> ReportEnvelope:
    rep = witness.scan(args.kind, args.lo, args.hi, jobs=args.jobs)
    notes = [f"skipped {reason}: {count}" for reason, count in sorted(rep.skipped.items())]
    notes += [
        f"aggregate {key}: {json.dumps(serialize(value), sort_keys=True)}"
        for key, value in sorted(rep.aggregates.items())
    ]
    return ReportEnvelope(
        f"scan {args.kind}",
        {"kind": args.kind, "from": args.lo, "to": args.hi},
        __version__,
        list(rep.items),
        notes,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_CSV_DROP = {"theta_head"}  # exact cyclotomic lists do not flatten to a cell


def _flatten(record: dict) -> dict:
    out = {}
    for key, value in record.items():
        if key in _CSV_DROP:
            continue
        if isinstance(value, list):
            out[key] = ";".join(str(v) for v in value)
        else:
            out[key] = value
    return out


def _render(env: ReportEnvelope, fmt: str) -> str:
    payload = serialize(env)
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if not env.command.startswith(("scan", "inertia eta")):
            raise ValueError("csv format is only available for scan outputs")
        rows = [_flatten(item) for item in payload["items"]]
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        return buf.getvalue()
    lines = [f"# galim {env.command} v{env.version}"]
    lines.append(f"# parameters: {json.dumps(payload['parameters'], sort_keys=True)}")
    for item in payload["items"]:
        lines.append(json.dumps(item, sort_keys=True))
    for note in env.notes:
        lines.append(f"# {note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parser assembly and entry point
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", metavar="FILE", default=None)

    top = _Parser(prog="galim", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("irregular", parents=[common])
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(handler=_cmd_irregular)

    p = sub.add_parser("classgroup", parents=[common])
    p.add_argument("-p", type=int, required=True, dest="p")
    p.set_defaults(handler=_cmd_classgroup)

    p = sub.add_parser("theta", parents=[common])
    p.add_argument("-p", type=int, required=True, dest="p")
    p.add_argument("--coeffs", type=int, default=100)
    p.add_argument("--char", type=int, default=1)
    p.set_defaults(handler=_cmd_theta)

    p = sub.add_parser("dickson", parents=[common])
    dick_sub = p.add_subparsers(dest="dickson_cmd", required=True, parser_class=_Parser)
    pc = dick_sub.add_parser("classify", parents=[common])
    pc.add_argument("--field", required=True, help="p or p,r")
    pc.add_argument("--gen", action="append", required=True, help='"a,b,c,d", repeatable')
    pc.add_argument("--budget", type=int, default=None)
    pc.set_defaults(handler=_cmd_dickson)

    p = sub.add_parser("inertia", parents=[common])
    in_sub = p.add_subparsers(dest="inertia_cmd", required=True, parser_class=_Parser)
    pl = in_sub.add_parser("local", parents=[common])
    pl.add_argument("-p", type=int, required=True, dest="p")
    pl.add_argument("-j", type=int, required=True, dest="j")
    pl.add_argument("--vcase", choices=("ord", "st", "ss"), required=True)
    pl.set_defaults(handler=_cmd_inertia_local)
    pe = in_sub.add_parser("eta", parents=[common])
    pe.add_argument("--max", type=int, required=True)
    pe.add_argument("--jobs", type=int, default=1)
    pe.set_defaults(handler=_cmd_inertia_eta)

    p = sub.add_parser("bounds", parents=[common])
    b_sub = p.add_subparsers(dest="bounds_cmd", required=True, parser_class=_Parser)
    pb = b_sub.add_parser("exceptional", parents=[common])
    pb.add_argument("-d", type=int, required=True, dest="d")
    pb.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("dims", parents=[common])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x0", type=int)
    group.add_argument("--x1", type=int)
    group.add_argument("--new", type=int)
    group.add_argument("--j1", type=int)
    p.set_defaults(handler=_cmd_dims)

    p = sub.add_parser("witness", parents=[common])
    w_sub = p.add_subparsers(dest="witness_kind", required=True, parser_class=_Parser)
    for kind in ("borel", "lr", "hida"):
        pw = w_sub.add_parser(kind, parents=[common])
        pw.add_argument("-p", type=int, required=True, dest="p")
        pw.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("scan", parents=[common])
    p.add_argument("kind", choices=witness.SCAN_KINDS)
    p.add_argument("--from", type=int, required=True, dest="lo")
    p.add_argument("--to", type=int, required=True, dest="hi")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=_cmd_scan)

    return top


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        envelope = args.handler(args)
        rendered = _render(envelope, args.format)
    except (
        witness.RegularPrimeError,
        witness.TrivialClassGroupError,
        dickson.ClosureOverflowError,
    ) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except (_UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0


if __name__ == "__main__":
    sys.exit(main())
