"""Trace inequalities on M_n equipped with the normalised trace tau(A) = tr(A)/n.

Schatten norms here are normalised as well: ``||A||_p = tau(|A|^p)^(1/p)``, so
``||I||_p = 1`` for every p and ``p = inf`` is the operator norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AccretivityFailed, BadExponent, DimensionMismatch, ExponentOutOfRange, InvalidDensity
from .matcore import DEFAULT_TOL, ToleranceConfig, _square, adjoint, hermitian_part, min_eig, operator_norm
from .report import InequalityReport, compare
from .scalar_center import center_of

VARIANTS = ("v1", "v2", "v3")
INF = math.inf


@dataclass(frozen=True)
class NCProbSpace:
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionMismatch("dimension must be positive")

    def tau(self, A) -> complex:
        A = self._check(A)
        return complex(np.trace(A)) / self.dim

    def _check(self, A, name: str = "A") -> np.ndarray:
        A = _square(A, name)
        if A.shape[0] != self.dim:
            raise DimensionMismatch(f"{name} is {A.shape[0]}x{A.shape[0]}, space has dimension {self.dim}")
        return A


@dataclass(frozen=True)
class DensityOperator:
    """PSD ``T`` with ``tau(T) = 1``; validated on construction."""

    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "T", _square(self.T, "T"))

    @classmethod
    def from_matrix(cls, T, cfg: ToleranceConfig = DEFAULT_TOL, *, renormalize: bool = False) -> "DensityOperator":
        T = _square(T, "T")
        if operator_norm(T - adjoint(T)) > cfg.scale(operator_norm(T)):
            raise InvalidDensity("T is not self-adjoint")
        T = hermitian_part(T)
        if min_eig(T) < -cfg.scale(operator_norm(T)):
            raise InvalidDensity(f"T is not positive (min eigenvalue {min_eig(T):.3e})")
        t = float(np.real(np.trace(T))) / T.shape[0]
        if renormalize:
            if t <= 0:
                raise InvalidDensity("T has zero trace and cannot be renormalised")
            T = T / t
        elif abs(t - 1.0) > 1e-10:
            raise InvalidDensity(f"tau(T) = {t!r}, expected 1")
        return cls(T)

    @property
    def dim(self) -> int:
        return self.T.shape[0]


def _density(space: NCProbSpace, T, cfg: ToleranceConfig) -> np.ndarray:
    if not isinstance(T, DensityOperator):
        T = DensityOperator.from_matrix(T, cfg)
    return space._check(T.T, "T")


def _singular_values(A: np.ndarray) -> np.ndarray:
    return np.linalg.svd(A, compute_uv=False)


def schatten_p_norm(space: NCProbSpace, A, p: float) -> float:
    """tau(|A|^p)^(1/p); ``p = inf`` gives the operator norm."""
    A = space._check(A)
    p = float(p)
    if not p >= 1.0:
        raise BadExponent(f"p must be >= 1, got {p}")
    if math.isinf(p):
        return operator_norm(A)
    s = _singular_values(A)
    top = s[0] if s.size else 0.0
    if top == 0.0:
        return 0.0
    # Factor out the largest singular value so large p cannot overflow.
    return float(top * np.mean((s / top) ** p) ** (1.0 / p))


def trace_semi_inner(space: NCProbSpace, T, A, B, cfg: ToleranceConfig = DEFAULT_TOL) -> complex:
    """(A, B)_tau = tau(T A* B) - tau(T A*) tau(T B)."""
    T = _density(space, T, cfg)
    A, B = space._check(A, "A"), space._check(B, "B")
    As = adjoint(A)
    return space.tau(T @ As @ B) - space.tau(T @ As) * space.tau(T @ B)


def trace_defect(space: NCProbSpace, T: np.ndarray, A: np.ndarray, B: np.ndarray) -> float:
    """|tau(TAB) - tau(TA) tau(TB)|."""
    return abs(space.tau(T @ A @ B) - space.tau(T @ A) * space.tau(T @ B))


def _defaults(A, B, alpha, beta, cfg):
    if alpha is None:
        alpha = center_of(A, cfg).gamma
    if beta is None:
        beta = center_of(B, cfg).gamma
    return complex(alpha), complex(beta)


_EXPONENTS = {"v1": (4.0, 4.0, 2.0), "v2": (2.0, 2.0, INF), "v3": (INF, INF, None)}


def _norm_product(space, A, B, T, alpha, beta, p, q, r) -> tuple[float, dict]:
    I = np.eye(space.dim)
    na = schatten_p_norm(space, A - alpha * I, p)
    nb = schatten_p_norm(space, B - beta * I, q)
    nt = 1.0 if r is None else schatten_p_norm(space, T, r)
    return na * nb * nt, {"norm_A": na, "norm_B": nb, "norm_T": nt}


def check_trace_gruss(
    space: NCProbSpace,
    T,
    A,
    B,
    alpha: complex | None = None,
    beta: complex | None = None,
    variant: str = "v1",
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> InequalityReport:
    """|tau(TAB) - tau(TA)tau(TB)| against one of three norm products.

    v1: ||A-a||_4 ||B-b||_4 ||T||_2;  v2: ||A-a||_2 ||B-b||_2 ||T||;
    v3: ||A-a|| ||B-b||.
    """
    if variant not in _EXPONENTS:
        raise ExponentOutOfRange(f"unknown variant {variant!r}")
    Tm = _density(space, T, cfg)
    A, B = space._check(A, "A"), space._check(B, "B")
    alpha, beta = _defaults(A, B, alpha, beta, cfg)
    lhs = trace_defect(space, Tm, A, B)
    rhs, parts = _norm_product(space, A, B, Tm, alpha, beta, *_EXPONENTS[variant])
    return InequalityReport(
        f"trace.{variant}",
        (compare(variant, lhs, rhs, cfg),),
        params={"alpha": alpha, "beta": beta},
        tolerance=cfg,
        values=parts,
    )


def check_trace_gruss_pq(
    space: NCProbSpace,
    T,
    A,
    B,
    alpha: complex | None = None,
    beta: complex | None = None,
    p: float = 4.0,
    q: float = 4.0,
    r: float = 2.0,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> InequalityReport:
    """General exponents: (p, q >= 4 and r >= 2) or (p, q >= 2 and r = inf)."""
    p, q, r = float(p), float(q), float(r)
    if not ((p >= 4 and q >= 4 and r >= 2) or (p >= 2 and q >= 2 and math.isinf(r))):
        raise ExponentOutOfRange(f"(p, q, r) = ({p}, {q}, {r}) is outside the admissible range")
    Tm = _density(space, T, cfg)
    A, B = space._check(A, "A"), space._check(B, "B")
    alpha, beta = _defaults(A, B, alpha, beta, cfg)
    lhs = trace_defect(space, Tm, A, B)
    rhs, parts = _norm_product(space, A, B, Tm, alpha, beta, p, q, r)
    return InequalityReport(
        "trace.pq",
        (compare("pq", lhs, rhs, cfg),),
        params={"alpha": alpha, "beta": beta, "p": p, "q": q, "r": r},
        tolerance=cfg,
        values=parts,
    )


class TraceAccretivity(NamedTuple):
    re_tau: float
    accretive: bool
    norm1_slack: float
    norm2_slack: float
    norm4_slack: float


def trace_accretivity(space: NCProbSpace, A, alpha: complex, beta: complex, cfg: ToleranceConfig = DEFAULT_TOL) -> TraceAccretivity:
    """Re tau(C_{alpha,beta}(A)) and the 1-, 2- and 4-norm disk slacks.

    Only ``re_tau >= -tol`` decides ``accretive``; the slacks
    ``|beta-alpha|/2 - ||A - (alpha+beta)/2||_p`` are reported alongside.
    """
    A = space._check(A)
    alpha, beta = complex(alpha), complex(beta)
    I = np.eye(space.dim)
    C = adjoint(A - alpha * I) @ (beta * I - A)
    re_tau = float(np.real(space.tau(C)))
    half = 0.5 * abs(beta - alpha)
    D = A - 0.5 * (alpha + beta) * I
    scale = cfg.scale(max(operator_norm(A), abs(alpha), abs(beta)) ** 2)
    return TraceAccretivity(
        re_tau,
        re_tau >= -scale,
        half - schatten_p_norm(space, D, 1),
        half - schatten_p_norm(space, D, 2),
        half - schatten_p_norm(space, D, 4),
    )


def check_trace_accretive_gruss(
    space: NCProbSpace,
    T,
    A,
    B,
    alpha: complex,
    beta: complex,
    zeta: complex,
    xi: complex,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> InequalityReport:
    """|tau(TAB) - tau(TA)tau(TB)| <= |beta-alpha||xi-zeta| ||T||_2 / 4.

    Hypotheses are the trace-accretivity of C_{alpha,beta}(A) and
    C_{zeta,xi}(B), checked literally as Re tau(C) >= 0.
    """
    Tm = _density(space, T, cfg)
    A, B = space._check(A, "A"), space._check(B, "B")
    acc_a = trace_accretivity(space, A, alpha, beta, cfg)
    if not acc_a.accretive:
        raise AccretivityFailed(f"Re tau(C_(alpha,beta)(A)) = {acc_a.re_tau:.3e} < 0", hypothesis="tau(C_{alpha,beta}(A))")
    acc_b = trace_accretivity(space, B, zeta, xi, cfg)
    if not acc_b.accretive:
        raise AccretivityFailed(f"Re tau(C_(zeta,xi)(B)) = {acc_b.re_tau:.3e} < 0", hypothesis="tau(C_{zeta,xi}(B))")
    lhs = trace_defect(space, Tm, A, B)
    rhs = 0.25 * abs(complex(beta) - complex(alpha)) * abs(complex(xi) - complex(zeta)) * schatten_p_norm(space, Tm, 2)
    return InequalityReport(
        "trace.accretive",
        (compare("corollary", lhs, rhs, cfg),),
        params={"alpha": complex(alpha), "beta": complex(beta), "zeta": complex(zeta), "xi": complex(xi)},
        tolerance=cfg,
        values={"accretivity_A": acc_a._asdict(), "accretivity_B": acc_b._asdict()},
    )


def check_trace_gruss_grid(
    space: NCProbSpace,
    T,
    A,
    B,
    alpha: complex | None = None,
    beta: complex | None = None,
    ps=(4.0, 6.0, INF),
    qs=(4.0, 6.0, INF),
    rs=(2.0, 4.0, INF),
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> InequalityReport:
    """Every (p, q, r) in a grid as one report with a tier per triple."""
    Tm = _density(space, T, cfg)
    A, B = space._check(A, "A"), space._check(B, "B")
    alpha, beta = _defaults(A, B, alpha, beta, cfg)
    tiers = []
    for p in ps:
        for q in qs:
            for r in rs:
                rep = check_trace_gruss_pq(space, DensityOperator(Tm), A, B, alpha, beta, p, q, r, cfg)
                tiers.append(compare(f"p={p:g},q={q:g},r={r:g}", rep.lhs, rep.rhs, cfg))
    return InequalityReport(
        "trace.pq",
        tuple(tiers),
        params={"alpha": alpha, "beta": beta},
        tolerance=cfg,
    )
