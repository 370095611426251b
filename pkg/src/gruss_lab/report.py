"""Inequality reports shared by the map, trace and module checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .matcore import DEFAULT_TOL, ToleranceConfig, hermitian_part, min_eig, operator_norm


@dataclass(frozen=True)
class Tier:
    """One link ``lhs <= rhs`` of an inequality chain."""

    name: str
    lhs: np.ndarray | float
    rhs: np.ndarray | float
    margin: float
    satisfied: bool

    @property
    def tightness(self) -> float:
        num, den = _size(self.lhs), _size(self.rhs)
        if den == 0.0:
            return 0.0 if num == 0.0 else float("inf")
        return num / den


def _size(x) -> float:
    if isinstance(x, np.ndarray):
        return operator_norm(x)
    return abs(float(x))


def compare(name: str, lhs, rhs, cfg: ToleranceConfig = DEFAULT_TOL) -> Tier:
    """Loewner comparison for matrices, plain comparison for real scalars."""
    if isinstance(lhs, np.ndarray) or isinstance(rhs, np.ndarray):
        lhs_m = np.atleast_2d(np.asarray(lhs, dtype=complex))
        rhs_m = np.atleast_2d(np.asarray(rhs, dtype=complex))
        if lhs_m.shape == (1, 1) and rhs_m.shape != (1, 1):
            lhs_m = lhs_m[0, 0] * np.eye(rhs_m.shape[0])
        if rhs_m.shape == (1, 1) and lhs_m.shape != (1, 1):
            rhs_m = rhs_m[0, 0] * np.eye(lhs_m.shape[0])
        margin = min_eig(hermitian_part(rhs_m - lhs_m))
        scale = cfg.scale(max(operator_norm(lhs_m), operator_norm(rhs_m)))
        return Tier(name, hermitian_part(lhs_m), hermitian_part(rhs_m), margin, margin >= -scale)
    lhs_f, rhs_f = float(np.real(lhs)), float(np.real(rhs))
    margin = rhs_f - lhs_f
    scale = cfg.scale(max(abs(lhs_f), abs(rhs_f)))
    return Tier(name, lhs_f, rhs_f, margin, margin >= -scale)


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check.

    ``lhs``/``rhs``/``margin`` describe the headline tier (the first one);
    ``satisfied`` requires every tier to hold. ``values`` keeps named
    intermediate quantities for reproduction tables.
    """

    inequality_id: str
    tiers: tuple[Tier, ...]
    params: dict[str, Any] = field(default_factory=dict)
    tolerance: ToleranceConfig = DEFAULT_TOL
    values: dict[str, Any] = field(default_factory=dict)

    @property
    def lhs(self):
        return self.tiers[0].lhs

    @property
    def rhs(self):
        return self.tiers[0].rhs

    @property
    def margin(self) -> float:
        return min(t.margin for t in self.tiers)

    @property
    def satisfied(self) -> bool:
        return all(t.satisfied for t in self.tiers)

    @property
    def tightness(self) -> float:
        return self.tiers[0].tightness

    def tier(self, name: str) -> Tier:
        for t in self.tiers:
            if t.name == name:
                return t
        raise KeyError(name)

    def to_json(self) -> dict:
        from .harness.scenario import value_to_json

        return {
            "inequality_id": self.inequality_id,
            "lhs": value_to_json(self.lhs),
            "rhs": value_to_json(self.rhs),
            "margin": self.margin,
            "satisfied": self.satisfied,
            "tightness": self.tightness,
            "tiers": [
                {
                    "name": t.name,
                    "lhs": value_to_json(t.lhs),
                    "rhs": value_to_json(t.rhs),
                    "margin": t.margin,
                    "satisfied": t.satisfied,
                }
                for t in self.tiers
            ],
            "params": {k: value_to_json(v) for k, v in self.params.items()},
            "values": {k: value_to_json(v) for k, v in self.values.items()},
            "tolerance": self.tolerance.to_json(),
        }
