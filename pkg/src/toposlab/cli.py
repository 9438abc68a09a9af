"""Command-line entry points with stable JSON reporting.

Exit codes: 0 = property holds / classification computed; 1 = property
fails, with a witness in the report; 2 = inconclusive (a bound-relative
check exhausted its bound); 3 = input error (parse/resolution/validation
of the input itself).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Dict, Optional

from . import __version__, dsl
from .cat import validate
from .classify import classify_topos, counterexample_point, sweep_theorems
from .geom import BCSquare, GeomMorphism, Verdict, bc_holds, is_cc_inverse_image, is_locally_connected, validate_square
from .space import NotT0, is_jacobson, is_weakly_jacobson_space, is_t0, validate_space

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _report(args, command: str, payload, status: int, digest: str) -> int:
    body = {
        "version": __version__,
        "command": command,
        "input_sha256": digest,
        "status": status,
        "result": payload,
    }
    if args.json:
        print(_canonical_json(body))
    else:
        _print_human(command, payload, status)
    return status


def _print_human(command: str, payload, status: int) -> None:
    print(f"{command}: {'ok' if status == 0 else 'status ' + str(status)}")
    if isinstance(payload, dict):
        for k, v in payload.items():
            print(f"  {k}: {v}")
    else:
        print(f"  {payload}")


def _load(path: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    doc = dsl.parse(raw.decode("utf-8"))
    return doc, digest


def _pick(table: Dict, name: Optional[str], kind: str):
    if name is not None:
        if name not in table:
            raise dsl.ResolutionError(f"unknown {kind}", 0, 0, name)
        return table[name]
    if len(table) == 1:
        return next(iter(table.values()))
    raise dsl.ResolutionError(
        f"--name required: document has {len(table)} {kind}s", 0, 0, kind
    )


def _cmd_check_category(args) -> int:
    doc, digest = _load(args.file)
    cat = _pick(doc.categories, args.name, "category")
    problems = validate(cat)
    payload = {
        "objects": len(cat.objects),
        "arrows": len(cat.arrows),
        "problems": problems,
    }
    status = EXIT_HOLDS if not problems else EXIT_FAILS
    return _report(args, "check-category", payload, status, digest)


def _cmd_check_space(args) -> int:
    doc, digest = _load(args.file)
    space = _pick(doc.spaces, args.name, "space")
    problems = validate_space(space)
    payload: Dict = {"points": len(space.points), "problems": problems}
    status = EXIT_HOLDS if not problems else EXIT_FAILS
    if not problems:
        if not is_t0(space) and args.no_t0_quotient:
            raise NotT0("space is not T0 and --no-t0-quotient was given")
        jac, _ = is_jacobson(space)
        wjac, _ = is_weakly_jacobson_space(space)
        payload["t0"] = is_t0(space)
        payload["jacobson"] = jac
        payload["weakly_jacobson"] = wjac
    return _report(args, "check-space", payload, status, digest)


def _cmd_check_morphism(args) -> int:
    doc, digest = _load(args.file)
    fn = _pick(doc.functors, args.name, "functor")
    f = GeomMorphism(fn)
    cc, wcc = is_cc_inverse_image(f)
    lc, wlc = is_locally_connected(f)
    payload: Dict = {"cc_inverse_image": cc, "locally_connected": lc}
    w = wlc or wcc
    if w is not None:
        payload["witness"] = w.to_json_dict()
    status = EXIT_HOLDS if lc else EXIT_FAILS
    return _report(args, "check-morphism", payload, status, digest)


def _cmd_classify(args) -> int:
    doc, digest = _load(args.file)
    named = {}
    named.update(doc.categories)
    named.update(doc.spaces)
    origin = _pick(named, args.name, "category or space")
    report = classify_topos(origin)
    return _report(args, "classify", report.to_json_dict(), EXIT_HOLDS, digest)


def _cmd_witness(args) -> int:
    doc, digest = _load(args.file)
    cat = _pick(doc.categories, args.name, "category")
    found = counterexample_point(cat)
    if found is None:
        payload = {"counterexample": None}
        status = EXIT_HOLDS
    else:
        morphism, w = found
        payload = {
            "counterexample": {
                "point_at": next(iter(morphism.functor.obj_map.values())),
                "witness": w.to_json_dict(),
            }
        }
        status = EXIT_FAILS
    return _report(args, "witness", payload, status, digest)


def _cmd_sweep(args) -> int:
    result = sweep_theorems(
        (args.max_objects, args.max_arrows), args.budget, seed=args.seed
    )
    payload = result.to_json_dict()
    status = EXIT_HOLDS if not result.counterexamples else EXIT_FAILS
    digest = hashlib.sha256(
        f"{args.max_objects},{args.max_arrows},{args.budget},{args.seed}".encode()
    ).hexdigest()
    return _report(args, "sweep", payload, status, digest)


def _cmd_bc_square(args) -> int:
    doc, digest = _load(args.file)
    legs = {}
    for leg in ("top", "left", "right", "bottom"):
        name = getattr(args, leg)
        if name not in doc.functors:
            raise dsl.ResolutionError("unknown functor", 0, 0, name)
        legs[leg] = doc.functors[name]
    sq = BCSquare(**legs)
    problems = validate_square(sq)
    if problems:
        raise dsl.ResolutionError("; ".join(problems), 0, 0, "square")
    ts = bc_holds(sq, args.bound)
    payload = ts.to_json_dict()
    if ts.verdict == Verdict.FAILS:
        status = EXIT_FAILS
    elif ts.verdict == Verdict.HOLDS:
        status = EXIT_HOLDS
    else:
        status = EXIT_INCONCLUSIVE
    return _report(args, "bc-square", payload, status, digest)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toposlab",
        description="Finite-model checks for geometric morphisms between presheaf toposes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_file=True):
        if with_file:
            p.add_argument("file", help="presentation file")
            p.add_argument("--name", help="declaration to use (default: the only one)")
        p.add_argument("--json", action="store_true", help="canonical JSON report")

    p = sub.add_parser("check-category", help="validate a category table")
    common(p)
    p.set_defaults(fn=_cmd_check_category)

    p = sub.add_parser("check-space", help="validate and analyze a finite space")
    common(p)
    p.add_argument("--no-t0-quotient", action="store_true")
    p.set_defaults(fn=_cmd_check_space)

    p = sub.add_parser(
        "check-morphism",
        help="cartesian-closed inverse image and local connectedness",
    )
    common(p)
    p.set_defaults(fn=_cmd_check_morphism)

    p = sub.add_parser("classify", help="full topos report for a site or space")
    common(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("witness", help="counterexample point for a non-groupoid site")
    common(p)
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("sweep", help="theorem-consistency sweep over enumerated sites")
    common(p, with_file=False)
    p.add_argument("--max-objects", type=int, default=2)
    p.add_argument("--max-arrows", type=int, default=4)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("bc-square", help="Beck-Chevalley check on a functor square")
    common(p)
    p.add_argument("--top", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--bottom", required=True)
    p.add_argument("--bound", type=int, default=2)
    p.set_defaults(fn=_cmd_bc_square)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (dsl.DslError, NotT0, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
