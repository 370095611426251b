"""Scenario documents: JSON (de)serialisation and dispatch to the checks.

A scenario is a plain JSON object whose ``inequality`` key selects the check.
Matrices use ``{"rows", "cols", "entries": [[re, im], ...]}`` (row-major),
complex scalars are ``[re, im]`` pairs, and exponents may be ``"inf"``.
``run_check`` is a pure function of the document, so replaying persisted
scenarios reproduces margins exactly.
"""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .. import cstar_module as cm
from .. import gruss_core as gc
from .. import ncps
from ..errors import SchemaError, UnknownKind
from ..matcore import ToleranceConfig
from ..posmaps import BuiltinMap, ChoiMap, KrausMap, LinearMap
from ..report import InequalityReport

MAP_IDS = gc.INEQUALITY_IDS
TRACE_IDS = ("trace.v1", "trace.v2", "trace.v3", "trace.pq", "trace.accretive")
MODULE_IDS = cm.MODULE_IDS
ALL_IDS = MAP_IDS + TRACE_IDS + MODULE_IDS


# --- primitive values ------------------------------------------------------------

def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def _number(x, field: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"expected a number, got {type(x).__name__}", field)
    if not math.isfinite(x):
        raise SchemaError("non-finite number", field)
    return float(x)


def matrix_from_json(doc, field: str = "matrix") -> np.ndarray:
    if not isinstance(doc, dict):
        raise SchemaError("matrix must be an object with rows, cols, entries", field)
    for key in ("rows", "cols", "entries"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}", field)
    rows, cols, entries = doc["rows"], doc["cols"], doc["entries"]
    if not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in (rows, cols)):
        raise SchemaError("rows and cols must be positive integers", field)
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise SchemaError(f"entries must hold rows*cols = {rows * cols} pairs", field)
    out = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(entries):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"entry {i} must be a [re, im] pair", field)
        out[i] = complex(_number(pair[0], field), _number(pair[1], field))
    return out.reshape(rows, cols)


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(doc, field: str) -> complex:
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return complex(_number(doc, field))
    if not isinstance(doc, list) or len(doc) != 2:
        raise SchemaError("complex scalar must be [re, im]", field)
    return complex(_number(doc[0], field), _number(doc[1], field))


def exponent_from_json(doc, field: str) -> float:
    if doc in ("inf", "Infinity", "∞"):
        return math.inf
    return _number(doc, field)


def exponent_to_json(p: float):
    return "inf" if math.isinf(p) else float(p)


def value_to_json(v: Any):
    """Best-effort conversion of report values into JSON-ready objects."""
    if isinstance(v, np.ndarray):
        return matrix_to_json(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "inf" if math.isinf(v) else v
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_json(v)
    if isinstance(v, dict):
        return {str(k): value_to_json(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [value_to_json(x) for x in v]
    return v


def canonical(doc: dict) -> str:
    """Canonical serialisation: sorted keys, no whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def parse(text: str | bytes) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("scenario must be a JSON object")
    return doc


# --- maps --------------------------------------------------------------------------

def map_to_json(phi: LinearMap) -> dict:
    return phi.to_json()


def map_from_json(doc, field: str = "map") -> LinearMap:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError("map must be an object with a 'kind'", field)
    kind = doc["kind"]
    if kind == "kraus":
        ops = doc.get("ops")
        if not isinstance(ops, list) or not ops:
            raise SchemaError("'ops' must be a nonempty list of matrices", f"{field}.ops")
        return KrausMap(tuple(matrix_from_json(K, f"{field}.ops[{i}]") for i, K in enumerate(ops)))
    if kind == "choi":
        for key in ("in", "out", "matrix"):
            if key not in doc:
                raise SchemaError(f"missing key {key!r}", field)
        return ChoiMap(matrix_from_json(doc["matrix"], f"{field}.matrix"), int(doc["in"]), int(doc["out"]))
    if kind == "builtin":
        params = dict(doc.get("params", {}))
        if "T" in params:
            params["T"] = matrix_from_json(params["T"], f"{field}.params.T")
        if "index" in params:
            params["index"] = tuple(params["index"])
        return BuiltinMap(str(doc.get("name")), params)
    raise UnknownKind(f"unknown map kind {kind!r}")


# --- dispatch ----------------------------------------------------------------------

def _get(doc: dict, key: str, convert, default=None, required: bool = False):
    if key not in doc or doc[key] is None:
        if required:
            raise SchemaError("missing required field", key)
        return default
    return convert(doc[key], key)


def _mat(doc, key, required=True):
    return _get(doc, key, matrix_from_json, required=required)


def _cplx(doc, key, required=False):
    return _get(doc, key, complex_from_json, required=required)


def _tolerance(doc: dict) -> ToleranceConfig:
    tol = doc.get("tol")
    if tol is None:
        return ToleranceConfig()
    if not isinstance(tol, dict):
        raise SchemaError("tolerance must be an object {rel, abs}", "tol")
    return ToleranceConfig(
        rel=_number(tol.get("rel", 1e-9), "tol.rel"),
        abs=_number(tol.get("abs", 1e-12), "tol.abs"),
    )


def _centers(doc: dict) -> dict:
    raw = doc.get("centers") or {}
    if not isinstance(raw, dict):
        raise SchemaError("centers must be an object", "centers")
    return {k: complex_from_json(v, f"centers.{k}") for k, v in raw.items()}


def _assume_positive(doc: dict):
    v = doc.get("assume_positive")
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError("must be an integer", "assume_positive")
    return v


def _run_map(iid: str, doc: dict, cfg: ToleranceConfig) -> InequalityReport:
    phi = map_from_json(doc.get("map"), "map") if "map" in doc else None
    if phi is None:
        raise SchemaError("missing required field", "map")
    A = _mat(doc, "A")
    centers = _centers(doc)
    ap = _assume_positive(doc)
    if iid in ("variance", "variance.chain"):
        return gc.check_variance_bound(
            phi, A, _cplx(doc, "alpha"), cfg, center=centers.get("A"), chain=iid == "variance.chain"
        )
    if iid == "variance.nonunital":
        alpha = _cplx(doc, "alpha")
        if alpha is None:
            alpha = centers.get("A")
        return gc.check_nonunital_variance(phi, A, alpha, cfg)
    if iid == "variance.accretive":
        return gc.check_accretive_variance(phi, A, _cplx(doc, "alpha", True), _cplx(doc, "beta", True), cfg)
    B = _mat(doc, "B")
    if iid == "covariance.block":
        return gc.covariance_block_check(phi, A, B, cfg, assume_positive=ap)
    if iid == "covariance":
        return gc.check_covariance_bound(
            phi, A, B, _cplx(doc, "alpha"), _cplx(doc, "beta"), cfg,
            assume_positive=ap, assume_unital=bool(doc.get("assume_unital", False)), centers=centers,
        )
    if iid == "covariance.norm":
        return gc.check_refined_norm_bound(phi, A, B, cfg, assume_positive=ap, centers=centers)
    if iid == "covariance.accretive":
        return gc.check_accretive_covariance(
            phi, A, B,
            _cplx(doc, "alpha", True), _cplx(doc, "beta", True), _cplx(doc, "gamma", True), _cplx(doc, "Gamma", True),
            cfg, assume_positive=ap,
        )
    if iid == "covariance.nonunital":
        return gc.check_nonunital_covariance(
            phi, A, B, _cplx(doc, "alpha"), _cplx(doc, "beta"), cfg, assume_positive=ap, centers=centers
        )
    raise UnknownKind(iid)  # pragma: no cover


def _run_trace(iid: str, doc: dict, cfg: ToleranceConfig) -> InequalityReport:
    T, A, B = _mat(doc, "T"), _mat(doc, "A"), _mat(doc, "B")
    space = ncps.NCProbSpace(A.shape[0])
    density = ncps.DensityOperator.from_matrix(T, cfg, renormalize=bool(doc.get("renormalize", False)))
    if iid == "trace.accretive":
        return ncps.check_trace_accretive_gruss(
            space, density, A, B,
            _cplx(doc, "alpha", True), _cplx(doc, "beta", True), _cplx(doc, "zeta", True), _cplx(doc, "xi", True), cfg,
        )
    alpha, beta = _cplx(doc, "alpha"), _cplx(doc, "beta")
    if iid == "trace.pq":
        ps, qs, rs = (doc.get(k, d) for k, d in (("p", 4), ("q", 4), ("r", 2)))
        if any(isinstance(v, list) for v in (ps, qs, rs)):
            grid = [
                [exponent_from_json(x, key) for x in (v if isinstance(v, list) else [v])]
                for key, v in (("p", ps), ("q", qs), ("r", rs))
            ]
            return ncps.check_trace_gruss_grid(space, density, A, B, alpha, beta, *grid, cfg=cfg)
        return ncps.check_trace_gruss_pq(
            space, density, A, B, alpha, beta,
            exponent_from_json(ps, "p"), exponent_from_json(qs, "q"), exponent_from_json(rs, "r"), cfg,
        )
    return ncps.check_trace_gruss(space, density, A, B, alpha, beta, iid.split(".")[1], cfg)


def _module_K(doc: dict) -> np.ndarray:
    K = doc.get("K")
    if isinstance(K, dict) and "rank_one_of" in K:
        h = matrix_from_json(K["rank_one_of"], "K.rank_one_of")
        return cm.rank_one(h, h)
    return matrix_from_json(K, "K") if K is not None else _mat(doc, "K")


def _coef(doc, key):
    v = doc.get(key)
    if isinstance(v, dict):
        return matrix_from_json(v, key)
    return complex_from_json(v, key) if v is not None else _mat(doc, key)


def _run_module(iid: str, doc: dict, cfg: ToleranceConfig) -> InequalityReport:
    if iid == "module.variance":
        return cm.check_module_variance(_module_K(doc), _mat(doc, "x"), _mat(doc, "u"), _mat(doc, "v"), cfg)
    if iid == "module.gruss":
        return cm.check_module_gruss(
            _module_K(doc), _mat(doc, "x"), _mat(doc, "y"),
            _mat(doc, "u"), _mat(doc, "v"), _mat(doc, "uP"), _mat(doc, "vP"), cfg,
        )
    if iid == "module.lifted":
        return cm.check_lifted_gruss(
            _mat(doc, "h"), _mat(doc, "x"), _mat(doc, "y"),
            _coef(doc, "a"), _coef(doc, "A"), _coef(doc, "b"), _coef(doc, "B"), cfg,
        )
    if iid == "hilbert.gruss":
        return cm.check_hilbert_gruss(
            _mat(doc, "e"), _mat(doc, "x"), _mat(doc, "y"),
            _cplx(doc, "alpha", True), _cplx(doc, "beta", True), _cplx(doc, "gamma", True), _cplx(doc, "Gamma", True), cfg,
        )
    if iid == "module.accretive":
        return cm.check_module_accretive(_mat(doc, "T"), _cplx(doc, "a", True), _cplx(doc, "b", True), _mat(doc, "h"), cfg)
    raise UnknownKind(iid)  # pragma: no cover


def run_check(scenario: dict | str | bytes) -> InequalityReport:
    """Validate a scenario and evaluate its inequality."""
    doc = parse(scenario) if isinstance(scenario, (str, bytes)) else scenario
    if not isinstance(doc, dict):
        raise SchemaError("scenario must be a JSON object")
    iid = doc.get("inequality")
    if not isinstance(iid, str):
        raise SchemaError("missing inequality id", "inequality")
    if iid not in ALL_IDS:
        raise UnknownKind(f"unknown inequality id {iid!r}")
    cfg = _tolerance(doc)
    if iid in MAP_IDS:
        return _run_map(iid, doc, cfg)
    if iid in TRACE_IDS:
        return _run_trace(iid, doc, cfg)
    return _run_module(iid, doc, cfg)
