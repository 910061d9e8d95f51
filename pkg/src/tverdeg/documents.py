"""JSON documents: collections, colored point sets and report payloads.

Rationals are always written as ``"num/den"`` strings.  Every payload
built here is plain ``dict``/``list``/``str``/``int``/``bool``/``None`` with
a fixed key order, so ``json.dumps`` of the same input is byte-identical.
"""
from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Any

from .degree import DegreeReport
from .exact import QVector, q
from .genpos import GenPosReport
from .model import BmzCollection, RookPlacement, classes_of, validate_collection

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed JSON or a value that is not an exact rational."""


class InvalidCollection(ValueError):
    """Well-formed document describing an invalid collection."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def fmt_vec(v: QVector) -> list[str]:
    return [fmt(x) for x in v]


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, float):
        raise DocumentError(f"floating point value {value!r}; write rationals as \"num/den\" strings")
    try:
        return q(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {value!r}: {exc}") from None


def parse_point(value: Any) -> QVector:
    if not isinstance(value, list):
        raise DocumentError(f"a point must be a list of coordinates, got {value!r}")
    return tuple(parse_rational(x) for x in value)


def _int_field(doc: dict, key: str) -> int:
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"field {key!r} must be an integer")
    return value


# -- collections --------------------------------------------------------------

def collection_to_doc(c: BmzCollection, provenance: dict | None = None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "d": c.d,
        "r": c.r,
        "points": [fmt_vec(p) for p in c.points],
        "label": c.label,
        "provenance": provenance or {},
    }


def doc_to_collection(doc: Any, validate: bool = True) -> BmzCollection:
    """Parse a collection document; with ``validate`` raise
    :class:`InvalidCollection` listing every violated invariant."""
    if not isinstance(doc, dict):
        raise DocumentError("collection document must be a JSON object")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r}")
    d = _int_field(doc, "d")
    r = _int_field(doc, "r")
    pts = doc.get("points")
    if not isinstance(pts, list):
        raise DocumentError("field 'points' must be a list")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise DocumentError("field 'label' must be a string")
    c = BmzCollection(d, r, tuple(parse_point(p) for p in pts), label)
    if validate:
        problems = validate_collection(c)
        if problems:
            raise InvalidCollection(problems)
    return c


def loads_collection(text: str, validate: bool = True) -> BmzCollection:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    return doc_to_collection(doc, validate)


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def read_collection(path: str | Path, validate: bool = True) -> BmzCollection:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(str(exc)) from None
    return loads_collection(text, validate)


def write_collection(path: str | Path, c: BmzCollection, provenance: dict | None = None) -> None:
    Path(path).write_text(dumps(collection_to_doc(c, provenance)), encoding="utf-8")


def doc_to_colored_classes(doc: Any) -> tuple[list[list[QVector]], QVector | None]:
    """``{"classes": [[point, ...], ...], "z": point | null}``."""
    if not isinstance(doc, dict) or not isinstance(doc.get("classes"), list):
        raise DocumentError("colored document needs a 'classes' list")
    classes = []
    for cl in doc["classes"]:
        if not isinstance(cl, list):
            raise DocumentError("each color class must be a list of points")
        classes.append([parse_point(p) for p in cl])
    z = doc.get("z")
    return classes, None if z is None else parse_point(z)


# -- reports --------------------------------------------------------------------

def placement_json(p: RookPlacement) -> dict:
    n = (p.d + 1) * (p.r - 1)
    return {
        "boards": [list(b) for b in p.boards],
        "classes": [sorted(cl) for cl in classes_of(p, None)] if n else [],
    }


def degree_report_json(rep: DegreeReport) -> dict:
    hits = []
    for p, s, hit in rep.hits:
        entry = placement_json(p)
        entry.update(
            {
                "csgn": s.csgn,
                "gsgn": s.gsgn,
                "sgn": s.sgn,
                "t": fmt(hit.t),
                "barycentric": fmt_vec(hit.barycentric),
            }
        )
        hits.append(entry)
    return {
        "d": rep.d,
        "r": rep.r,
        "degree": rep.degree,
        "residue": rep.residue,
        "modulus": factorial(rep.r),
        "ray": {"source": rep.ray_source, "direction": fmt_vec(rep.ray_direction)},
        "hit_count": len(rep.hits),
        "hits": hits,
    }


def genpos_report_json(rep: GenPosReport) -> dict:
    return {
        "sufficiently_general": rep.sufficiently_general,
        "almost_general": rep.almost_general,
        "violation_count": len(rep.violations),
        "violations": [
            {
                "condition": v.condition,
                "boards": [list(b) for b in v.placement.boards],
                "dropped_point": v.point,
            }
            for v in rep.violations
        ],
    }


def census_json(census) -> dict:
    placements = []
    for p, x in census.tverberg:
        entry = placement_json(p)
        entry["witness"] = fmt_vec(x)
        placements.append(entry)
    return {
        "d": census.d,
        "r": census.r,
        "count": len(census.tverberg),
        "class_count": census.class_count,
        "full_class_count": census.full_class_count,
        "placements": placements,
    }


def motion_json(trace) -> dict:
    m = factorial(trace.r)
    return {
        "r": trace.r,
        "modulus": m,
        "residues": sorted(trace.residues),
        "samples": [
            {
                "t": fmt(s.t),
                "sufficiently_general": s.sufficiently_general,
                "degree": s.degree,
                "residue": None if s.degree is None else s.degree % m,
                "note": s.note,
            }
            for s in trace.samples
        ],
    }


def colored_json(res) -> dict:
    return {
        "parts": [[{"color": k, "index": j} for k, j in part] for part in res.parts],
        "point": fmt_vec(res.point),
        "placement": placement_json(res.placement),
    }
