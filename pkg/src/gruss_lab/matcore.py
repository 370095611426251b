"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every comparison
against zero goes through :class:`ToleranceConfig`, whose scale grows with the
operator norm of the input so that tiny and large matrices are treated alike.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BNotInvertible,
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    NotPSD,
    NotSquare,
    PreconditionError,
)


@dataclass(frozen=True)
class ToleranceConfig:
    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        for name in ("rel", "abs"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise PreconditionError(f"tolerance {name} must be finite and >= 0, got {value}")

    def scale(self, norm: float = 1.0) -> float:
        """``abs + rel * max(1, norm)``."""
        return self.abs + self.rel * max(1.0, float(norm))

    def to_json(self) -> dict:
        return {"rel": self.rel, "abs": self.abs}

    @classmethod
    def from_json(cls, doc: dict | None) -> "ToleranceConfig":
        if not doc:
            return cls()
        return cls(rel=float(doc.get("rel", 1e-9)), abs=float(doc.get("abs", 1e-12)))


DEFAULT_TOL = ToleranceConfig()


class HermEigen(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns


class LoewnerResult(NamedTuple):
    holds: bool
    margin: float


class AccretiveResult(NamedTuple):
    re: np.ndarray
    accretive: bool
    margin: float


class SchurResult(NamedTuple):
    direct: bool
    schur: bool
    direct_margin: float
    schur_margin: float


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} has non-finite entries")
    return arr


def _square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise NotSquare(f"{name} must be square, got shape {arr.shape}")
    return arr


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def hermitian_part(M: np.ndarray) -> np.ndarray:
    """Re(M) = (M + M*)/2."""
    return 0.5 * (M + adjoint(M))


def operator_norm(M) -> float:
    """Largest singular value, computed as sqrt of the top eigenvalue of M*M."""
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    gram = adjoint(M) @ M
    top = np.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(top, 0.0)))


def hermitian_residual(M: np.ndarray) -> float:
    return operator_norm(M - adjoint(M))


def _check_hermitian(M: np.ndarray, cfg: ToleranceConfig, name: str = "matrix") -> None:
    resid = hermitian_residual(M)
    if resid > cfg.scale(operator_norm(M)):
        raise NotHermitian(f"{name} is not self-adjoint (||M - M*|| = {resid:.3e})")


def hermitian_eigen(M, cfg: ToleranceConfig = DEFAULT_TOL) -> HermEigen:
    """Eigendecomposition of a self-adjoint matrix, eigenvalues ascending.

    The input is symmetrised before factorisation; the symmetry residual must
    lie within the tolerance scale.
    """
    M = _square(M)
    _check_hermitian(M, cfg)
    try:
        w, V = np.linalg.eigh(hermitian_part(M))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return HermEigen(w, V)


def _eigvalsh(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(hermitian_part(M))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc


def min_eig(M: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``M``."""
    if M.size == 0:
        return 0.0
    return float(_eigvalsh(M)[0])


def matrix_abs(M) -> np.ndarray:
    """|M| = (M*M)^{1/2}, built from the SVD so small singular values stay accurate."""
    M = _square(M)
    _, s, Vh = np.linalg.svd(M)
    V = adjoint(Vh)
    return hermitian_part((V * s) @ Vh)


def psd_sqrt(M, cfg: ToleranceConfig = DEFAULT_TOL, *, scale: float = 0.0) -> np.ndarray:
    """Positive square root; eigenvalues in [-tolscale, 0) are clamped to zero.

    Eigenvalues below the rounding floor n * eps * max(lambda_max, scale) are
    also zeroed: they are noise, and the square root would inflate noise of
    size 1e-15 to about 3e-8. Pass ``scale`` when M is a difference of larger
    terms, since cancellation leaves noise proportional to their size.
    """
    M = _square(M)
    w, V = hermitian_eigen(M, cfg)
    top = max(abs(w[0]), abs(w[-1])) if w.size else 0.0
    floor = -cfg.scale(top)
    if w.size and w[0] < floor:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3e} below -{-floor:.1e}")
    w = np.where(w <= w.size * np.finfo(float).eps * max(top, scale), 0.0, w)
    root = np.sqrt(w)
    return hermitian_part((V * root) @ adjoint(V))


def psd_inverse_sqrt(M, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    w, V = hermitian_eigen(M, cfg)
    if w[0] <= cfg.scale(w[-1]):
        raise BNotInvertible(f"matrix is not strictly positive (min eigenvalue {w[0]:.3e})")
    return hermitian_part((V / np.sqrt(w)) @ adjoint(V))


def loewner_leq(A, B, cfg: ToleranceConfig = DEFAULT_TOL) -> LoewnerResult:
    """Test A <= B: margin is the least eigenvalue of B - A."""
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A is {A.shape}, B is {B.shape}")
    _check_hermitian(A, cfg, "A")
    _check_hermitian(B, cfg, "B")
    margin = min_eig(B - A)
    scale = cfg.scale(max(operator_norm(A), operator_norm(B)))
    return LoewnerResult(margin >= -scale, margin)


def real_part_accretive(M, cfg: ToleranceConfig = DEFAULT_TOL) -> AccretiveResult:
    M = _square(M)
    re = hermitian_part(M)
    margin = min_eig(re)
    return AccretiveResult(re, margin >= -cfg.scale(operator_norm(M)), margin)


def schur_block_psd(A, X, B, cfg: ToleranceConfig = DEFAULT_TOL) -> SchurResult:
    """Positivity of [[A, X], [X*, B]] two ways: directly, and via A >= X B^{-1} X*."""
    A = _square(A, "A")
    B = _square(B, "B")
    X = as_matrix(X, "X")
    if X.shape != (A.shape[0], B.shape[0]):
        raise DimensionMismatch(f"X must be {A.shape[0]}x{B.shape[0]}, got {X.shape}")
    _check_hermitian(A, cfg, "A")
    _check_hermitian(B, cfg, "B")

    block = np.block([[A, X], [adjoint(X), B]])
    direct_margin = min_eig(block)
    direct = direct_margin >= -cfg.scale(operator_norm(block))

    wB = _eigvalsh(B)
    if wB[0] <= cfg.scale(wB[-1]):
        raise BNotInvertible(f"B is not strictly positive (min eigenvalue {wB[0]:.3e})")
    compl = X @ np.linalg.solve(B, adjoint(X))
    verdict = loewner_leq(hermitian_part(compl), A, cfg)
    return SchurResult(direct, verdict.holds, direct_margin, verdict.margin)


def is_projection(K: np.ndarray, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    K = _square(K)
    scale = cfg.scale(operator_norm(K))
    return operator_norm(K @ K - K) <= scale and hermitian_residual(K) <= scale


def scalar_matrix(value: complex, n: int) -> np.ndarray:
    return complex(value) * np.eye(n, dtype=complex)
