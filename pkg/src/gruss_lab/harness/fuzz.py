"""Seed-indexed fuzzing of every inequality id.

Trial ``t`` draws all of its randomness from ``trial_rng(master_seed, t)``, so
the result of a trial never depends on which worker ran it or in what order.
Trials are processed in fixed chunks; within a chunk the Gamma centres of all
inputs are found by one batched search and written into the scenario, which
makes every persisted scenario replay to the identical margin.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..errors import GrussLabError, UnknownKind
from ..matcore import ToleranceConfig, adjoint, operator_norm
from ..scalar_center import distance_to_scalars_many, selfadjoint_center
from .generators import generate
from .scenario import ALL_IDS, MAP_IDS, MODULE_IDS, TRACE_IDS, canonical, complex_to_json, matrix_from_json, run_check

FUZZ_TOL = ToleranceConfig(rel=1e-8, abs=1e-12)
CHUNK = 250
BINS = 20

_NEEDS_CENTERS = {
    "variance",
    "variance.chain",
    "variance.nonunital",
    "covariance",
    "covariance.norm",
    "covariance.nonunital",
    "trace.v1",
    "trace.v2",
    "trace.v3",
    "trace.pq",
}


@dataclass(frozen=True)
class FuzzConfig:
    inequality_id: str
    dims: tuple[int, ...] = (2, 3, 4, 5)
    trials: int = 1000
    master_seed: int = 0
    tol: ToleranceConfig = FUZZ_TOL
    map_family: str = "cp_kraus"
    output: str | None = None
    ks: tuple[int, ...] = (1, 2, 3)

    def __post_init__(self):
        if self.inequality_id not in ALL_IDS:
            raise UnknownKind(f"unknown inequality id {self.inequality_id!r}")
        if self.trials < 1:
            raise GrussLabError("trials must be >= 1")
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise GrussLabError("dims must be nonempty and positive")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))


@dataclass
class FuzzSummary:
    inequality_id: str
    trials_run: int
    violations: int
    errors: int
    min_margin: float
    tightness_histogram: list[int]
    worst_trial: int | None
    worst_scenario: dict | None
    violating_trials: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["min_margin"] = None if math.isinf(self.min_margin) else self.min_margin
        return doc


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    dim: int
    margin: float
    satisfied: bool
    tightness: float
    error: str = ""


# --- Gamma centres -------------------------------------------------------------------------

_GAMMA_MEMO: dict[tuple, complex] = {}
_MEMO_LIMIT = 200_000


def gamma_centers(mats: list[np.ndarray], cfg: ToleranceConfig) -> list[complex]:
    """Gamma representatives for many matrices, memoised by matrix bytes."""
    keys = [(M.shape, M.tobytes(), cfg.rel, cfg.abs) for M in mats]
    todo: dict[tuple, np.ndarray] = {}
    for key, M in zip(keys, mats):
        if key in _GAMMA_MEMO or key in todo:
            continue
        if operator_norm(M - adjoint(M)) <= cfg.scale(operator_norm(M)):
            _GAMMA_MEMO[key] = selfadjoint_center(M, cfg).gamma
        else:
            todo[key] = M
    if todo:
        results = distance_to_scalars_many(list(todo.values()), cfg)
        for key, res in zip(todo, results):
            _GAMMA_MEMO[key] = res.gamma
    out = [_GAMMA_MEMO[k] for k in keys]
    if len(_GAMMA_MEMO) > _MEMO_LIMIT:
        _GAMMA_MEMO.clear()
    return out


# --- trials ----------------------------------------------------------------------------------

def trial_dims(config: FuzzConfig, trial: int) -> tuple[int, int]:
    n = config.dims[trial % len(config.dims)]
    if config.inequality_id == "hilbert.gruss":
        return n, 1
    return n, config.ks[(trial // len(config.dims)) % len(config.ks)]


def build_scenario(config: FuzzConfig, trial: int) -> dict:
    """Scenario for one trial before Gamma centres are filled in."""
    n, k = trial_dims(config, trial)
    iid = config.inequality_id
    if iid in MODULE_IDS:
        doc = generate(config.master_seed, "module_instance", (n, k), trial=trial, inequality=iid)
    else:
        doc = generate(config.master_seed, "gruss_instance", n, trial=trial, inequality=iid, family=config.map_family)
    doc["tol"] = config.tol.to_json()
    doc["seed"] = config.master_seed
    doc["trial"] = trial
    return doc


def _fill_centers(docs: list[dict], cfg: ToleranceConfig) -> None:
    docs = [d for d in docs if d["inequality"] in _NEEDS_CENTERS]
    if not docs:
        return
    mats = []
    for d in docs:
        mats.append(matrix_from_json(d["A"], "A"))
        mats.append(matrix_from_json(d["B"], "B"))
    gammas = gamma_centers(mats, cfg)
    for i, d in enumerate(docs):
        gA, gB = gammas[2 * i], gammas[2 * i + 1]
        if d["inequality"] in TRACE_IDS:
            d["alpha"], d["beta"] = complex_to_json(gA), complex_to_json(gB)
        else:
            d["centers"] = {"A": complex_to_json(gA), "B": complex_to_json(gB)}


def scenarios_for(config: FuzzConfig, start: int, stop: int) -> list[dict]:
    docs = [build_scenario(config, t) for t in range(start, stop)]
    _fill_centers(docs, config.tol)
    return docs


def replay_scenario(config: FuzzConfig, trial: int) -> dict:
    """The exact scenario trial ``trial`` evaluated."""
    return scenarios_for(config, trial, trial + 1)[0]


def _evaluate(doc: dict, dim: int) -> TrialRecord:
    try:
        rep = run_check(doc)
    except GrussLabError as exc:
        return TrialRecord(doc["trial"], dim, math.nan, False, math.nan, f"{type(exc).__name__}: {exc}")
    return TrialRecord(doc["trial"], dim, float(rep.margin), bool(rep.satisfied), float(rep.tightness))


def _run_chunk(args) -> tuple[list[TrialRecord], dict[int, dict]]:
    config, start, stop = args
    docs = scenarios_for(config, start, stop)
    records = [_evaluate(d, trial_dims(config, d["trial"])[0]) for d in docs]
    keep: dict[int, dict] = {}
    ok = [r for r in records if not r.error]
    if ok:
        worst = min(ok, key=lambda r: (r.margin, r.trial))
        keep[worst.trial] = docs[worst.trial - start]
    for r in records:
        if not r.error and not r.satisfied:
            keep[r.trial] = docs[r.trial - start]
    return records, keep


def _histogram(values: list[float]) -> list[int]:
    hist = [0] * BINS
    for v in values:
        if math.isnan(v):
            continue
        idx = min(int(min(max(v, 0.0), 1.0) * BINS), BINS - 1)
        hist[idx] += 1
    return hist


def fuzz(config: FuzzConfig, workers: int = 1) -> FuzzSummary:
    """Run ``config.trials`` seed-indexed trials, optionally across processes."""
    chunks = [(config, s, min(s + CHUNK, config.trials)) for s in range(0, config.trials, CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, chunks))
    else:
        results = [_run_chunk(c) for c in chunks]

    records: list[TrialRecord] = []
    kept: dict[int, dict] = {}
    for recs, keep in results:
        records.extend(recs)
        kept.update(keep)

    ok = [r for r in records if not r.error]
    worst = min(ok, key=lambda r: (r.margin, r.trial)) if ok else None
    violating = [r.trial for r in ok if not r.satisfied]
    summary = FuzzSummary(
        inequality_id=config.inequality_id,
        trials_run=len(records),
        violations=len(violating),
        errors=len(records) - len(ok),
        min_margin=worst.margin if worst else math.inf,
        tightness_histogram=_histogram([r.tightness for r in ok]),
        worst_trial=worst.trial if worst else None,
        worst_scenario=kept.get(worst.trial) if worst else None,
        violating_trials=violating,
    )
    if config.output:
        persist(config, summary, records, kept)
    return summary


def persist(config: FuzzConfig, summary: FuzzSummary, records: list[TrialRecord], kept: dict[int, dict]) -> Path:
    out = Path(config.output)
    (out / "violations").mkdir(parents=True, exist_ok=True)
    cfg_doc = {
        "inequality_id": config.inequality_id,
        "dims": list(config.dims),
        "trials": config.trials,
        "master_seed": config.master_seed,
        "tol": config.tol.to_json(),
        "map_family": config.map_family,
        "ks": list(config.ks),
    }
    (out / "summary.json").write_text(json.dumps({"config": cfg_doc, "summary": summary.to_json()}, indent=2, sort_keys=True))
    if summary.worst_scenario is not None:
        (out / "worst.json").write_text(canonical(summary.worst_scenario))
    for t in summary.violating_trials:
        (out / "violations" / f"trial_{t:06d}.json").write_text(canonical(kept[t]))
    with open(out / "trials.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["inequality_id", "dim", "margin", "satisfied", "tightness"])
        for r in records:
            writer.writerow([config.inequality_id, r.dim, repr(r.margin), r.satisfied, repr(r.tightness)])
    errors = [r for r in records if r.error]
    if errors:
        with open(out / "errors.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "dim", "error"])
            for r in errors:
                writer.writerow([r.trial, r.dim, r.error])
    return out


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
