"""Recompute the published worked examples and compare with the printed values.

Every expected value carries the number of decimals it was printed with
(``None`` marks exact values). A row passes when the computed value is within
half a unit in the last printed place (plus 1e-9). Because the printed trace
tables turn out to be truncated rather than rounded, each row also reports
``truncation_pass``: whether truncating the computed value to the printed
precision gives the printed value. Products are compared both as exact
products and as products of the printed factors.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..gruss_core import check_covariance_bound, check_variance_bound
from ..matcore import operator_norm
from ..ncps import NCProbSpace, schatten_p_norm
from ..posmaps import corner, transpose
from ..scalar_center import center_of


@dataclass(frozen=True)
class ReproRow:
    case_id: str
    quantity: str
    expected: float
    computed: float
    decimals: int | None
    abs_error: float
    passed: bool
    truncation_pass: bool

    def to_json(self) -> dict:
        return asdict(self)


def _truncate(x: float, decimals: int) -> float:
    f = 10.0**decimals
    return math.floor(x * f + 1e-9) / f


def _row(case_id: str, quantity: str, expected: float, computed: float, decimals: int | None) -> ReproRow:
    err = abs(computed - expected)
    if decimals is None:
        passed = err <= 1e-9
        trunc = passed
    else:
        passed = err <= 0.5 * 10.0**-decimals + 1e-9
        trunc = abs(_truncate(computed, decimals) - expected) <= 1e-9
    return ReproRow(case_id, quantity, expected, float(computed), decimals, err, passed, trunc)


def _variance_case() -> list[ReproRow]:
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    rep = check_variance_bound(corner(2), A, 0.0)
    gap = float(np.real(rep.values["gap"][0, 0]))
    middle = float(np.real(rep.values["middle"][0, 0]))
    return [
        _row("variance-example", "gap", 4.0, gap, None),
        _row("variance-example", "middle", 5.0, middle, None),
        _row("variance-example", "norm_bound", 6.25, rep.values["norm_bound"], None),
    ]


def _transpose_case() -> list[ReproRow]:
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    B = np.diag([1.0, 4.0])
    rep = check_covariance_bound(transpose(2), A, B, 2.5, 2.5, assume_positive=3)
    lhs = np.linalg.eigvalsh(rep.lhs)
    rhs = np.linalg.eigvalsh(rep.rhs)
    gA, gB = center_of(A), center_of(B)
    return [
        _row("transpose-counterexample", "lhs_eigenvalue_min", 6.0, lhs[0], None),
        _row("transpose-counterexample", "lhs_eigenvalue_max", 6.0, lhs[-1], None),
        _row("transpose-counterexample", "rhs_eigenvalue_min", 3.75, rhs[0], None),
        _row("transpose-counterexample", "rhs_eigenvalue_max", 3.75, rhs[-1], None),
        _row("transpose-counterexample", "margin", -2.25, rep.margin, None),
        _row("transpose-counterexample", "radius_A", 2.5, gA.radius, None),
        _row("transpose-counterexample", "radius_B", 1.5, gB.radius, None),
    ]


TRACE_TABLES = {
    "trace-example-1": (
        np.array([[3.0, 0.5], [0.5, 2.0]]),
        np.array([[1.0, 2.0], [2.0, 4.0]]),
        np.array([[1.0, -0.1], [-0.1, 1.0]]),
        {"A_4": (2.76, 2), "B_4": (4.20, 2), "T_2": (1.004, 3), "A_2": (2.59, 2), "B_2": (3.53, 2), "T_inf": (1.10, 2)},
        {"product_4": (11.63, 2), "product_2": (10.05, 2)},
        ">",
    ),
    "trace-example-2": (
        np.array([[1.5, 2.0], [2.0, 5.0]]),
        np.array([[3.0, 2.0], [2.0, 4.0]]),
        np.array([[1.0, -1.0], [-1.0, 2.0]]),
        {"A_4": (4.96, 2), "B_4": (4.68, 2), "T_2": (1.87, 2), "A_2": (4.19, 2), "B_2": (4.06, 2), "T_inf": (2.61, 2)},
        {"product_4": (43.40, 2), "product_2": (44.39, 2)},
        "<",
    ),
}


def trace_norms(A, B, T) -> dict[str, float]:
    space = NCProbSpace(2)
    return {
        "A_4": schatten_p_norm(space, A, 4),
        "B_4": schatten_p_norm(space, B, 4),
        "T_2": schatten_p_norm(space, T, 2),
        "A_2": schatten_p_norm(space, A, 2),
        "B_2": schatten_p_norm(space, B, 2),
        "T_inf": operator_norm(T),
    }


def _trace_case(case_id: str) -> list[ReproRow]:
    A, B, T, norms, products, relation = TRACE_TABLES[case_id]
    got = trace_norms(A, B, T)
    rows = [_row(case_id, name, exp, got[name], dec) for name, (exp, dec) in norms.items()]
    exact = {
        "product_4": got["A_4"] * got["B_4"] * got["T_2"],
        "product_2": got["A_2"] * got["B_2"] * got["T_inf"],
    }
    printed = {
        "product_4": norms["A_4"][0] * norms["B_4"][0] * norms["T_2"][0],
        "product_2": norms["A_2"][0] * norms["B_2"][0] * norms["T_inf"][0],
    }
    for name, (exp, dec) in products.items():
        rows.append(_row(case_id, name, exp, exact[name], dec))
        rows.append(_row(case_id, f"{name}_of_printed_factors", exp, printed[name], dec))
    holds = exact["product_4"] > exact["product_2"] if relation == ">" else exact["product_4"] < exact["product_2"]
    rows.append(_row(case_id, f"order product_4 {relation} product_2", 1.0, float(holds), None))
    return rows


def reproduce_examples() -> list[ReproRow]:
    """All reproduction rows, in a fixed order."""
    rows = _variance_case() + _transpose_case()
    for case_id in TRACE_TABLES:
        rows += _trace_case(case_id)
    return rows


def rows_to_csv(rows: list[ReproRow]) -> str:
    buf = io.StringIO()
    fields = list(ReproRow.__dataclass_fields__)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in asdict(r).items()})
    return buf.getvalue()
