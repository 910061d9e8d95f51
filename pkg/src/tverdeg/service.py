"""Stateless HTTP facade.

Request bodies are parsed by hand so that malformed JSON or rationals map
to 400 and invalid collections to 422 with the violation list.  Geometric
outcomes (not in general position, non-generic ray) are 200 responses with
a ``status`` field.
"""
from __future__ import annotations

import json
import random
from math import factorial
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import Response

from . import documents as docs
from .degree import DegenerateFacet, NonGenericRay, compute_degree
from .experiments import WrongShape, sign_case_study, special_collection, tverberg_census
from .genpos import check_sufficient, distance, perturb
from .model import ExhaustedRetries

# interactive envelope: d = 2, r <= 5
CENSUS_LIMIT = factorial(5) ** 3
DEGREE_LIMIT = factorial(5) ** 3
REQUEST_THREADS = 1

app = FastAPI(title="tverdeg", version=str(docs.FORMAT_VERSION))


class HTTPFailure(Exception):
    def __init__(self, status: int, payload: dict):
        self.status = status
        self.payload = payload


def _json(payload: Any, status: int = 200) -> Response:
    body = json.dumps(payload, separators=(",", ":")).encode()
    return Response(body, status_code=status, media_type="application/json")


@app.exception_handler(HTTPFailure)
async def _failure(_: Request, exc: HTTPFailure) -> Response:
    return _json(exc.payload, exc.status)


async def _body(request: Request) -> dict:
    raw = await request.body()
    try:
        body = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise HTTPFailure(400, {"error": "malformed", "detail": f"invalid JSON: {exc}"}) from None
    if not isinstance(body, dict):
        raise HTTPFailure(400, {"error": "malformed", "detail": "body must be a JSON object"})
    return body


def _collection(doc: Any):
    try:
        return docs.doc_to_collection(doc)
    except docs.InvalidCollection as exc:
        raise HTTPFailure(422, {"error": "invalid-collection", "violations": exc.violations}) from None
    except docs.DocumentError as exc:
        raise HTTPFailure(400, {"error": "malformed", "detail": str(exc)}) from None


def _bool(options: dict, key: str, default: bool) -> bool:
    value = options.get(key, default)
    if not isinstance(value, bool):
        raise HTTPFailure(400, {"error": "malformed", "detail": f"option {key!r} must be a boolean"})
    return value


def _ray_option(options: dict):
    value = options.get("ray", "default")
    if value == "default" or (isinstance(value, int) and not isinstance(value, bool)):
        return value
    if isinstance(value, str) and value.startswith("seed="):
        try:
            return int(value[5:])
        except ValueError:
            pass
    raise HTTPFailure(400, {"error": "malformed", "detail": "option 'ray' must be 'default', 'seed=K' or an integer"})


def _size_guard(d: int, r: int, limit: int, what: str) -> None:
    size = factorial(r) ** (d + 1)
    if size > limit:
        raise HTTPFailure(
            413,
            {"error": "too-large", "detail": f"{what} over {size} placements exceeds {limit}; use the command line"},
        )


def evaluate(body: dict) -> dict:
    """The ``/evaluate`` payload for a parsed body (a collection document
    with an optional ``options`` object)."""
    c = _collection(body)
    options = body.get("options", {})
    if not isinstance(options, dict):
        raise HTTPFailure(400, {"error": "malformed", "detail": "'options' must be an object"})
    ray = _ray_option(options)
    want_genpos = _bool(options, "genpos", True)
    want_census = _bool(options, "census", False)
    _size_guard(c.d, c.r, DEGREE_LIMIT, "degree")
    if want_census:
        _size_guard(c.d, c.r, CENSUS_LIMIT, "census")
    out: dict[str, Any] = {"format_version": docs.FORMAT_VERSION, "status": "ok", "detail": None}
    out["genpos"] = None
    out["degree"] = None
    out["census"] = None
    if want_genpos:
        rep = check_sufficient(c, exhaustive=False)
        out["genpos"] = docs.genpos_report_json(rep)
        if not rep.sufficiently_general:
            out["status"] = "not-general"
            out["detail"] = rep.violations[0].describe()
    if out["status"] == "ok":
        try:
            out["degree"] = docs.degree_report_json(compute_degree(c, ray=ray, threads=REQUEST_THREADS))
        except NonGenericRay as exc:
            out["status"], out["detail"] = "non-generic-ray", str(exc)
        except ExhaustedRetries as exc:
            out["status"], out["detail"] = "non-generic-ray", str(exc)
        except DegenerateFacet as exc:
            out["status"], out["detail"] = "degenerate-facet", str(exc)
    if want_census:
        out["census"] = docs.census_json(tverberg_census(c, threads=REQUEST_THREADS))
    return out


@app.post("/evaluate")
async def post_evaluate(request: Request) -> Response:
    return _json(evaluate(await _body(request)))


@app.get("/special")
async def get_special(request: Request) -> Response:
    params = request.query_params
    try:
        d = int(params["d"])
        r = int(params["r"])
        seed = int(params.get("seed", "0"))
        radius = docs.parse_rational(params.get("radius", "1/100"))
    except (KeyError, ValueError, docs.DocumentError) as exc:
        raise HTTPFailure(400, {"error": "malformed", "detail": f"bad query: {exc}"}) from None
    if d < 1 or r < 2 or radius <= 0:
        raise HTTPFailure(422, {"error": "invalid-parameters", "violations": ["need d >= 1, r >= 2, radius > 0"]})
    _size_guard(d, r, DEGREE_LIMIT, "construction")
    try:
        c = special_collection(d, r, radius, seed)
    except ExhaustedRetries as exc:
        return _json({"status": "exhausted", "detail": str(exc)})
    return _json(docs.collection_to_doc(c, {"command": "special", "radius": docs.fmt(radius), "seed": seed}))


@app.post("/perturb")
async def post_perturb(request: Request) -> Response:
    body = await _body(request)
    c = _collection(body.get("collection"))
    try:
        eps = docs.parse_rational(body.get("eps", "1/1000"))
    except docs.DocumentError as exc:
        raise HTTPFailure(400, {"error": "malformed", "detail": str(exc)}) from None
    seed = body.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise HTTPFailure(400, {"error": "malformed", "detail": "'seed' must be an integer"})
    if eps <= 0:
        raise HTTPFailure(422, {"error": "invalid-parameters", "violations": ["eps must be positive"]})
    _size_guard(c.d, c.r, DEGREE_LIMIT, "perturbation check")
    try:
        out = perturb(c, eps, random.Random(seed))
    except ExhaustedRetries as exc:
        return _json({"status": "exhausted", "detail": str(exc), "collection": None})
    prov = {"command": "perturb", "eps": docs.fmt(eps), "seed": seed}
    return _json(
        {
            "status": "ok",
            "detail": None,
            "collection": docs.collection_to_doc(out, prov),
            "max_coordinate_shift": docs.fmt(distance(c, out)),
        }
    )


@app.post("/sign-case")
async def post_sign_case(request: Request) -> Response:
    body = await _body(request)
    c = _collection(body.get("collection"))
    case = body.get("case")
    if case not in (1, 2, 3) or isinstance(case, bool):
        raise HTTPFailure(400, {"error": "malformed", "detail": "'case' must be 1, 2 or 3"})
    try:
        report = sign_case_study(c, case)
    except WrongShape as exc:
        raise HTTPFailure(422, {"error": "wrong-shape", "violations": [str(exc)]}) from None
    return _json({"status": "ok", "report": report})
