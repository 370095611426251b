"""The Hilbert C*-module X = M_{m x k} over A = M_k with <x, y> = x* y.

Adjointable operators act by left multiplication, so L(X) = M_m. The centre
of M_k is C I_k, which is why right multiplications R_A only appear with
scalar A here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AccretivityFailed,
    AmbientMismatch,
    NotLiftedProjection,
    NotProjection,
    NotSelfAdjoint,
    NotUnitVector,
    RangeMembershipFailed,
)
from .matcore import (
    DEFAULT_TOL,
    ToleranceConfig,
    adjoint,
    as_matrix,
    hermitian_part,
    hermitian_residual,
    is_projection,
    matrix_abs,
    min_eig,
    operator_norm,
    psd_sqrt,
)
from .report import InequalityReport, compare

MODULE_IDS = ("module.variance", "module.gruss", "module.lifted", "hilbert.gruss", "module.accretive")


@dataclass(frozen=True)
class ModuleVector:
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", as_matrix(self.x, "module vector"))

    @property
    def ambient(self) -> tuple[int, int]:
        return self.x.shape


def _vec(x, name: str = "x") -> np.ndarray:
    if isinstance(x, ModuleVector):
        return x.x
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    return as_matrix(arr, name)


def _same_ambient(**vectors) -> list[np.ndarray]:
    arrs = [_vec(v, k) for k, v in vectors.items()]
    shape = arrs[0].shape
    for (name, _), a in zip(vectors.items(), arrs):
        if a.shape != shape:
            raise AmbientMismatch(f"{name} has shape {a.shape}, expected {shape}")
    return arrs


def inner(x, y) -> np.ndarray:
    """<x, y> = x* y in M_k."""
    x, y = _same_ambient(x=x, y=y)
    return adjoint(x) @ y


def rank_one(x, y) -> np.ndarray:
    """Matrix of x (x) y : z -> x <y, z>, i.e. x y*."""
    x, y = _same_ambient(x=x, y=y)
    return x @ adjoint(y)


def is_lifted_projection(h, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """h != 0 and h|h| = h."""
    h = _vec(h, "h")
    nh = operator_norm(h)
    if nh <= cfg.abs:
        return False
    return operator_norm(h @ _abs_vec(h) - h) <= cfg.scale(nh)


def _abs_vec(x: np.ndarray) -> np.ndarray:
    """|x| = <x, x>^{1/2}."""
    return psd_sqrt(hermitian_part(adjoint(x) @ x))


def _re(M: np.ndarray) -> np.ndarray:
    return hermitian_part(M)


def _abs2(x: np.ndarray) -> np.ndarray:
    return hermitian_part(adjoint(x) @ x)


def _require_projection(K: np.ndarray, m: int, cfg: ToleranceConfig) -> np.ndarray:
    K = as_matrix(K, "K")
    if K.shape != (m, m):
        raise AmbientMismatch(f"K must be {m}x{m}, got {K.shape}")
    if not is_projection(K, cfg):
        raise NotProjection("K is not a self-adjoint idempotent")
    return K


def _require_range(K: np.ndarray, w: np.ndarray, name: str, cfg: ToleranceConfig) -> None:
    resid = operator_norm(K @ w - w)
    if resid > cfg.scale(operator_norm(w)):
        raise RangeMembershipFailed(f"{name} is not in ran(K) (||K w - w|| = {resid:.3e})")


def _require_accretive(M: np.ndarray, name: str, cfg: ToleranceConfig) -> float:
    margin = min_eig(_re(M))
    if margin < -cfg.scale(operator_norm(M)):
        raise AccretivityFailed(f"Re {name} has eigenvalue {margin:.3e} < 0", hypothesis=name)
    return margin


def _lemma_sides(K, x, u, v):
    """(|x|^2 - <Kx, x>, 1/4|v-u|^2, Re<x-u, v-x>)."""
    lhs = _re(adjoint(x) @ x - adjoint(K @ x) @ x)
    quarter = 0.25 * _abs2(v - u)
    re = _re(adjoint(x - u) @ (v - x))
    return lhs, quarter, re


def check_module_variance(K, x, u, v, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """|x|^2 - <Kx, x> <= 1/4|v-u|^2 - Re<x-u, v-x> for a projection K with u+v in ran(K).

    When Re<x-u, v-x> >= 0 a second tier checks the bound 1/4|v-u|^2.
    """
    x, u, v = _same_ambient(x=x, u=u, v=v)
    K = _require_projection(K, x.shape[0], cfg)
    _require_range(K, u + v, "u + v", cfg)
    lhs, quarter, re = _lemma_sides(K, x, u, v)
    tiers = [compare("lemma", lhs, quarter - re, cfg)]
    accretive = min_eig(re) >= -cfg.scale(operator_norm(re))
    if accretive:
        tiers.append(compare("bound", lhs, quarter, cfg))
    return InequalityReport(
        "module.variance",
        tuple(tiers),
        params={"m": x.shape[0], "k": x.shape[1]},
        tolerance=cfg,
        values={"re_inner": re, "accretive": accretive},
    )


def _gruss_tiers(lhs, first, quarter, re, q1_norm_root, q2_abs, cfg):
    # second factor is quarter - re; its rounding floor follows the operands.
    second = quarter - re
    middle = np.sqrt(operator_norm(first)) * psd_sqrt(second, cfg, scale=operator_norm(quarter) + operator_norm(re))
    bound = q1_norm_root * q2_abs
    return (compare("theorem", lhs, middle, cfg), compare("bound", middle, bound, cfg))


def check_module_gruss(K, x, y, u, v, uP, vP, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """|<x,y> - <Kx,y>| <= ||1/4|v-u|^2 - Re<x-u,v-x>||^{1/2} (1/4|v'-u'|^2 - Re<y-u',v'-y>)^{1/2}
    <= 1/4 ||v-u|| |v'-u'|."""
    x, y, u, v, uP, vP = _same_ambient(x=x, y=y, u=u, v=v, uP=uP, vP=vP)
    K = _require_projection(K, x.shape[0], cfg)
    _require_range(K, u + v, "u + v", cfg)
    _require_range(K, uP + vP, "u' + v'", cfg)
    re_x = _require_accretive(adjoint(x - u) @ (v - x), "<x-u, v-x>", cfg)
    re_y = _require_accretive(adjoint(y - uP) @ (vP - y), "<y-u', v'-y>", cfg)
    lhs = matrix_abs(adjoint(x) @ y - adjoint(K @ x) @ y)
    first = 0.25 * _abs2(v - u) - _re(adjoint(x - u) @ (v - x))
    quarter, re = 0.25 * _abs2(vP - uP), _re(adjoint(y - uP) @ (vP - y))
    tiers = _gruss_tiers(lhs, first, quarter, re, 0.25 * operator_norm(v - u), _abs_vec(vP - uP), cfg)
    return InequalityReport(
        "module.gruss",
        tiers,
        params={"m": x.shape[0], "k": x.shape[1]},
        tolerance=cfg,
        values={"accretivity_x": re_x, "accretivity_y": re_y},
    )


def check_lifted_gruss(h, x, y, a, A, b, B, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """|<x,y> - <x,h><h,y>| against the lifted-projection bound ending in 1/4||A-a|| |B-b|.

    ``a, A, b, B`` are k x k matrices (scalars are promoted to multiples of I_k).
    """
    h, x, y = _same_ambient(h=h, x=x, y=y)
    if not is_lifted_projection(h, cfg):
        raise NotLiftedProjection("h is zero or h|h| != h")
    k = h.shape[1]

    def coef(c, name):
        c = np.asarray(c, dtype=complex)
        if c.ndim == 0:
            return complex(c) * np.eye(k)
        c = as_matrix(c, name)
        if c.shape != (k, k):
            raise AmbientMismatch(f"{name} must be {k}x{k}, got {c.shape}")
        return c

    a, A, b, B = coef(a, "a"), coef(A, "A"), coef(b, "b"), coef(B, "B")
    re_x = _require_accretive(adjoint(x - h @ a) @ (h @ A - x), "<x-ha, hA-x>", cfg)
    re_y = _require_accretive(adjoint(y - h @ b) @ (h @ B - y), "<y-hb, hB-y>", cfg)
    lhs = matrix_abs(adjoint(x) @ y - (adjoint(x) @ h) @ (adjoint(h) @ y))
    first = 0.25 * _abs2(A - a) - _re(adjoint(x - h @ a) @ (h @ A - x))
    quarter, re = 0.25 * _abs2(B - b), _re(adjoint(y - h @ b) @ (h @ B - y))
    tiers = _gruss_tiers(lhs, first, quarter, re, 0.25 * operator_norm(A - a), _abs_vec(B - b), cfg)
    return InequalityReport(
        "module.lifted",
        tiers,
        params={"m": h.shape[0], "k": k},
        tolerance=cfg,
        values={"accretivity_x": re_x, "accretivity_y": re_y},
    )


def elementary_gap(m: float, n: float, p: float, q: float) -> float:
    """(mp - nq)^2 - (m^2 - n^2)(p^2 - q^2), which equals (mq - np)^2 >= 0."""
    return (m * p - n * q) ** 2 - (m * m - n * n) * (p * p - q * q)


def check_hilbert_gruss(e, x, y, alpha, beta, gamma, Gamma, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """Dragomir's bound in C^m: |<x,y> - <x,e><e,y>| <= 1/4|beta-alpha||Gamma-gamma| - sqrt(R_x R_y).

    R_x = Re<beta e - x, x - alpha e> and R_y likewise must be >= 0.
    ``values["rhs_module"]`` records the general module bound on the same data.
    """
    e, x, y = _same_ambient(e=e, x=x, y=y)
    if e.shape[1] != 1:
        raise AmbientMismatch("Hilbert-space vectors must be single columns")
    if abs(np.linalg.norm(e) - 1.0) > cfg.scale(1.0):
        raise NotUnitVector(f"||e|| = {np.linalg.norm(e)!r}")
    alpha, beta, gamma, Gamma = (complex(s) for s in (alpha, beta, gamma, Gamma))
    rx = float(np.real(np.vdot(beta * e - x, x - alpha * e)))
    ry = float(np.real(np.vdot(Gamma * e - y, y - gamma * e)))
    scale = cfg.scale(max(np.linalg.norm(x), np.linalg.norm(y), 1.0) ** 2)
    if rx < -scale:
        raise AccretivityFailed(f"Re<beta e - x, x - alpha e> = {rx:.3e} < 0", hypothesis="x")
    if ry < -scale:
        raise AccretivityFailed(f"Re<Gamma e - y, y - gamma e> = {ry:.3e} < 0", hypothesis="y")
    rx, ry = max(rx, 0.0), max(ry, 0.0)
    xy = complex(np.vdot(x, y))
    lhs = abs(xy - complex(np.vdot(x, e)) * complex(np.vdot(e, y)))
    ha, hg = 0.5 * abs(beta - alpha), 0.5 * abs(Gamma - gamma)
    rhs = ha * hg - np.sqrt(rx) * np.sqrt(ry)
    rhs_module = np.sqrt(max(ha * ha - rx, 0.0)) * np.sqrt(max(hg * hg - ry, 0.0))
    return InequalityReport(
        "hilbert.gruss",
        (compare("corollary", lhs, rhs, cfg),),
        params={"alpha": alpha, "beta": beta, "gamma": gamma, "Gamma": Gamma, "m": e.shape[0]},
        tolerance=cfg,
        values={"re_x": rx, "re_y": ry, "rhs_module": float(rhs_module)},
    )


def check_module_accretive(T, a, b, h, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """<T^2 h, h> - <Th, h>^2 <= 1/4|b-a|^2 - <Re C_{a,b}(T) h, h> <= 1/4|b-a|^2.

    T is self-adjoint on C^m, a and b are scalars and h is a lifted projection.
    """
    T = as_matrix(T, "T")
    h = _vec(h, "h")
    if T.shape != (h.shape[0], h.shape[0]):
        raise AmbientMismatch(f"T must be {h.shape[0]}x{h.shape[0]}, got {T.shape}")
    if hermitian_residual(T) > cfg.scale(operator_norm(T)):
        raise NotSelfAdjoint("T is not self-adjoint")
    if not is_lifted_projection(h, cfg):
        raise NotLiftedProjection("h is zero or h|h| != h")
    a, b = complex(a), complex(b)
    m, k = h.shape
    I = np.eye(m)
    C = adjoint(T - a * I) @ (b * I - T)
    acc = _require_accretive(C, "C_{a,b}(T)", cfg)
    Th = T @ h
    pairing = adjoint(h) @ Th  # <Th, h> = h* T h (T self-adjoint)
    lhs = _re(adjoint(Th) @ Th - pairing @ pairing)
    quarter = 0.25 * abs(b - a) ** 2 * np.eye(k)
    middle = quarter - _re(adjoint(h) @ _re(C) @ h)
    return InequalityReport(
        "module.accretive",
        (compare("proposition", lhs, middle, cfg), compare("bound", middle, quarter, cfg)),
        params={"a": a, "b": b, "m": m, "k": k},
        tolerance=cfg,
        values={"accretivity_margin": acc},
    )
