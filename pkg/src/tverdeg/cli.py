"""Command-line interface.

Exit codes: 0 success, 1 unreadable or invalid input (including usage
errors), 2 geometric failure (not in general position, non-generic ray,
degenerate facet, residue alarm).  The default worker count for degree and
census comes from ``TVERDEG_THREADS``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import documents as docs
from .degree import DegenerateFacet, NonGenericRay, compute_degree
from .experiments import (
    NotFound,
    ResidueMismatch,
    WrongShape,
    motion_scan,
    search_degree_zero,
    sign_case_study,
    solve_colored_tverberg,
    special_collection,
    tverberg_census,
)
from .genpos import check_almost, check_sufficient, distance, perturb
from .model import ExhaustedRetries, validate_collection

OK, INPUT_ERROR, GEOMETRY_ERROR = 0, 1, 2


class InputError(Exception):
    pass


class GeometryError(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return docs.parse_rational(text)
    except docs.DocumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ray(text: str):
    if text == "default":
        return "default"
    if text.startswith("seed="):
        try:
            return int(text[5:])
        except ValueError:
            pass
    raise argparse.ArgumentTypeError("expected 'default' or 'seed=K'")


def _load(path: str, allow_coincident: bool = False):
    """Read and validate a collection; ``allow_coincident`` tolerates
    repeated points (input to perturb)."""
    try:
        c = docs.read_collection(path, validate=False)
    except docs.DocumentError as exc:
        raise InputError(str(exc)) from None
    problems = validate_collection(c)
    if allow_coincident:
        problems = [v for v in problems if not v.startswith("distinctness")]
    if problems:
        raise InputError("invalid collection:\n  " + "\n  ".join(problems))
    return c


def _emit(args, payload: dict, human: list[str]) -> None:
    if args.json:
        sys.stdout.write(docs.dumps(payload))
    else:
        sys.stdout.write("\n".join(human) + "\n")


def _require_general(c) -> None:
    rep = check_sufficient(c)
    if not rep.sufficiently_general:
        raise GeometryError(
            f"collection is not in sufficiently general position ({len(rep.violations)} violations)",
            {"status": "not-general", "genpos": docs.genpos_report_json(rep)},
        )


# -- commands ---------------------------------------------------------------------

def cmd_degree(args) -> None:
    c = _load(args.file)
    _require_general(c)
    try:
        rep = compute_degree(c, ray=args.ray, threads=args.threads)
    except (NonGenericRay, DegenerateFacet) as exc:
        boards = None if exc.placement is None else [list(b) for b in exc.placement.boards]
        status = "non-generic-ray" if isinstance(exc, NonGenericRay) else "degenerate-facet"
        raise GeometryError(str(exc), {"status": status, "detail": str(exc), "boards": boards}) from None
    except ExhaustedRetries as exc:
        raise GeometryError(str(exc), {"status": "non-generic-ray", "detail": str(exc)}) from None
    payload = docs.degree_report_json(rep)
    human = [
        f"degree\t{rep.degree}",
        f"residue\t{rep.residue}\t(mod {payload['modulus']})",
        f"hits\t{len(rep.hits)}",
        f"ray\t{rep.ray_source}",
        "boards\tcsgn\tgsgn\tsgn",
    ]
    human += [f"{list(p.boards)}\t{s.csgn}\t{s.gsgn}\t{s.sgn}" for p, s, _ in rep.hits]
    _emit(args, payload, human)


def cmd_check(args) -> None:
    c = _load(args.file)
    rep = check_sufficient(c, method=args.method)
    if rep.sufficiently_general and args.almost:
        rep.almost_general = check_almost(c).almost_general
    payload = docs.genpos_report_json(rep)
    human = [
        f"sufficiently_general\t{rep.sufficiently_general}",
        f"almost_general\t{rep.almost_general}",
        f"violations\t{len(rep.violations)}",
    ]
    human += [v.describe() for v in rep.violations[: args.show]]
    _emit(args, payload, human)
    if not rep.sufficiently_general:
        raise SystemExit(GEOMETRY_ERROR)


def _write_or_print(args, c, provenance: dict, human: list[str]) -> None:
    doc = docs.collection_to_doc(c, provenance)
    if args.output:
        Path(args.output).write_text(docs.dumps(doc), encoding="utf-8")
        _emit(args, {"output": args.output, **provenance}, human + [f"written\t{args.output}"])
    else:
        sys.stdout.write(docs.dumps(doc))


def cmd_perturb(args) -> None:
    c = _load(args.file, allow_coincident=True)
    try:
        out = perturb(c, args.eps, random.Random(args.seed))
    except ExhaustedRetries as exc:
        raise GeometryError(str(exc), {"status": "exhausted", "detail": str(exc)}) from None
    dist = distance(c, out)
    prov = {"command": "perturb", "source": str(args.file), "eps": docs.fmt(args.eps), "seed": args.seed}
    _write_or_print(args, out, prov, [f"max_coordinate_shift\t{docs.fmt(dist)}"])


def cmd_special(args) -> None:
    try:
        c = special_collection(args.d, args.r, args.radius, args.seed)
    except ExhaustedRetries as exc:
        raise GeometryError(str(exc), {"status": "exhausted", "detail": str(exc)}) from None
    prov = {"command": "special", "radius": docs.fmt(args.radius), "seed": args.seed}
    _write_or_print(args, c, prov, [f"points\t{len(c.points)}"])


def cmd_search(args) -> None:
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    def persist(find):
        if out_dir is None:
            return
        stem = out_dir / f"find_{find.trial:06d}"
        prov = {"command": "search", "seed": args.seed, "trial": find.trial}
        docs.write_collection(stem.with_suffix(".json"), find.collection, prov)
        report = {"degree": docs.degree_report_json(find.report), "census": docs.census_json(find.census)}
        Path(f"{stem}_report.json").write_text(docs.dumps(report), encoding="utf-8")

    log = search_degree_zero(
        args.d, args.r, args.budget, args.seed, args.stop_after, workers=args.threads or 1, on_find=persist
    )
    payload = {
        "d": args.d,
        "r": args.r,
        "seed": args.seed,
        "trials": log.trials,
        "degree_histogram": {str(k): v for k, v in sorted(log.degrees.items())},
        "finds": [
            {"trial": f.trial, "census_count": len(f.census.tverberg), "class_count": f.census.class_count}
            for f in log.found
        ],
        "alarms": log.alarms,
    }
    human = [f"trials\t{log.trials}", f"finds\t{len(log.found)}", f"alarms\t{len(log.alarms)}"]
    human += [f"degree {k}\t{v}" for k, v in sorted(log.degrees.items())]
    human += [f"find trial {f.trial}\tcensus {len(f.census.tverberg)}" for f in log.found]
    _emit(args, payload, human)


def cmd_census(args) -> None:
    c = _load(args.file)
    census = tverberg_census(c, threads=args.threads)
    payload = docs.census_json(census)
    human = [
        f"tverberg_placements\t{payload['count']}",
        f"classes_touched\t{census.class_count}",
        f"full_classes\t{census.full_class_count}",
        "boards\twitness",
    ]
    human += [f"{list(p.boards)}\t({', '.join(docs.fmt_vec(x))})" for p, x in census.tverberg]
    _emit(args, payload, human)


def cmd_motion(args) -> None:
    c0, c1 = _load(args.file0), _load(args.file1)
    if (c0.d, c0.r) != (c1.d, c1.r):
        raise InputError("collections must share d and r")
    try:
        trace = motion_scan(c0, c1, args.steps)
    except ResidueMismatch as exc:
        payload = {"status": "residue-mismatch", "detail": str(exc)}
        if exc.trace is not None:
            payload["trace"] = docs.motion_json(exc.trace)
        raise GeometryError(str(exc), payload) from None
    payload = docs.motion_json(trace)
    human = ["t\tgeneral\tdegree\tresidue"]
    for s in payload["samples"]:
        deg = "-" if s["degree"] is None else s["degree"]
        res = "-" if s["residue"] is None else s["residue"]
        human.append(f"{s['t']}\t{s['sufficiently_general']}\t{deg}\t{res}")
    _emit(args, payload, human)


def cmd_solve(args) -> None:
    try:
        doc = json.loads(Path(args.file).read_text(encoding="utf-8"))
        classes, z = docs.doc_to_colored_classes(doc)
    except (OSError, json.JSONDecodeError, docs.DocumentError) as exc:
        raise InputError(str(exc)) from None
    try:
        res = solve_colored_tverberg(classes, z)
    except NotFound as exc:
        raise GeometryError(str(exc), {"status": "not-found", "detail": str(exc)}) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = docs.colored_json(res)
    human = [f"point\t({', '.join(payload['point'])})"]
    for i, part in enumerate(res.parts):
        human.append(f"part {i}\t" + " ".join(f"c{k}.{j}" for k, j in part))
    _emit(args, payload, human)


def cmd_sign_case(args) -> None:
    c = _load(args.file)
    try:
        report = sign_case_study(c, args.case)
    except WrongShape as exc:
        raise InputError(str(exc)) from None
    _emit(args, report, [f"{k}\t{v}" for k, v in report.items()])


def cmd_serve(args) -> None:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = Parser(prog="tverdeg", description="Exact degrees of BMZ-collections and Tverberg partitions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add(
        "degree",
        cmd_degree,
        "Degree of a collection. Human output: tab-separated degree, residue, hit count, "
        "ray, then one line per hit facet with its signs.",
    )
    p.add_argument("file")
    p.add_argument("--ray", type=_ray, default="default", help="'default' or 'seed=K'")
    p.add_argument("--threads", type=int, default=None)

    p = add("check", cmd_check, "General-position checks (exit 2 if not sufficiently general).")
    p.add_argument("file")
    p.add_argument("--method", choices=["direct", "transform"], default="direct")
    p.add_argument("--almost", action="store_true", help="also run the almost-general ridge check")
    p.add_argument("--show", type=int, default=10, help="violations listed in human output")

    p = add("perturb", cmd_perturb, "Move every point by at most eps into sufficiently general position.")
    p.add_argument("file")
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = add("special", cmd_special, "The cluster collection around a standard simplex.")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--radius", type=_rational, default=Fraction(1, 100))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = add("search", cmd_search, "Random search for degree-zero collections.")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stop-after", type=int, default=None)
    p.add_argument("--out-dir")
    p.add_argument("--threads", type=int, default=None)

    p = add("census", cmd_census, "All Tverberg placements with witness points.")
    p.add_argument("file")
    p.add_argument("--threads", type=int, default=None)

    p = add("motion", cmd_motion, "Degrees along the straight-line motion between two collections.")
    p.add_argument("file0")
    p.add_argument("file1")
    p.add_argument("--steps", type=int, default=50)

    p = add("solve", cmd_solve, "Colored Tverberg partition of d+1 color classes.")
    p.add_argument("file")

    p = add("sign-case", cmd_sign_case, "Planar sign case study (d=2, r=3).")
    p.add_argument("file")
    p.add_argument("--case", type=int, choices=[1, 2, 3], required=True)

    p = sub.add_parser("serve", help="Run the HTTP service.")
    p.set_defaults(func=cmd_serve, json=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except GeometryError as exc:
        if args.json:
            sys.stdout.write(docs.dumps(exc.payload))
        print(f"error: {exc}", file=sys.stderr)
        return GEOMETRY_ERROR
    except SystemExit as exc:
        return int(exc.code or 0)
    return OK


if __name__ == "__main__":
    sys.exit(main())
