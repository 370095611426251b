"""Distance from an operator to the scalars, d(A) = inf_a ||A - a I||.

``f(a) = ||A - a I||`` is convex and 1-Lipschitz on the complex plane. Since
``f(a) >= |tr(A)/n - a|`` and ``f(tr(A)/n) =: R0``, every minimiser lies in the
disk of radius ``R0`` about the normalised trace, which itself sits inside the
disk ``|a| <= 3||A||``. The minimiser is found by nested golden-section search
(outer over Re a, inner over Im a) on the square circumscribing that disk.

The search is vectorised over a stack of equally sized matrices. Each matrix
gets its own iteration budget derived from its own box, so a matrix's result
does not depend on what else shares the stack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, NoConvergence, NotSquare
from .matcore import (
    DEFAULT_TOL,
    ToleranceConfig,
    _check_hermitian,
    _square,
    adjoint,
    hermitian_eigen,
    hermitian_part,
    operator_norm,
)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_ITER = 200


@dataclass(frozen=True)
class GammaResult:
    gamma: complex
    radius: float
    evaluations: int
    certified_gap: float

    def to_json(self) -> dict:
        return {
            "gamma": [self.gamma.real, self.gamma.imag],
            "radius": self.radius,
            "evaluations": self.evaluations,
            "certified_gap": self.certified_gap,
        }


def _gram_top(stack: np.ndarray) -> np.ndarray:
    """Largest singular value for each matrix in a (N, n, n) stack."""
    conj = np.conj(stack)
    # (M* M)_{ij} = sum_k conj(M_ki) M_kj, via broadcasting so every entry is
    # reduced in the same order whatever the stack length.
    gram = (conj[:, :, :, None] * stack[:, :, None, :]).sum(axis=1)
    top = np.linalg.eigvalsh(gram)[:, -1]
    return np.sqrt(np.clip(top, 0.0, None))


def _f_many(stack: np.ndarray, eye: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    return _gram_top(stack - alpha[:, None, None] * eye)


def _iterations(width: np.ndarray, tol: np.ndarray) -> np.ndarray:
    safe_tol = np.where(tol > 0, tol, 1.0)
    ratio = np.maximum(width / safe_tol, 1.0)
    its = np.ceil(np.log(ratio) / -math.log(_INV_PHI)).astype(int)
    its = np.where((tol <= 0) & (width > 0), _MAX_ITER, its)
    return np.minimum(its, _MAX_ITER)


def _golden(fun, lo: np.ndarray, hi: np.ndarray, n_iter: np.ndarray):
    """Vectorised golden-section minimisation of convex 1-D slices.

    ``fun(points) -> values`` evaluates every slice at once. Returns the best
    evaluated abscissa, its value and the final bracket width per slice.
    """
    a, b = lo.copy(), hi.copy()
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    best_x = np.where(fc <= fd, c, d)
    best_f = np.minimum(fc, fd)
    for it in range(int(n_iter.max(initial=0))):
        active = it < n_iter
        left = fc <= fd  # minimiser in [a, d]
        new_b = np.where(left, d, b)
        new_a = np.where(left, a, c)
        new_x = np.where(left, new_b - _INV_PHI * (new_b - new_a), new_a + _INV_PHI * (new_b - new_a))
        fx = fun(new_x)
        nc = np.where(left, new_x, d)
        nd = np.where(left, c, new_x)
        nfc = np.where(left, fx, fd)
        nfd = np.where(left, fc, fx)
        a = np.where(active, new_a, a)
        b = np.where(active, new_b, b)
        c = np.where(active, nc, c)
        d = np.where(active, nd, d)
        fc = np.where(active, nfc, fc)
        fd = np.where(active, nfd, fd)
        improve = active & (fx < best_f)
        best_x = np.where(improve, new_x, best_x)
        best_f = np.where(improve, fx, best_f)
    return best_x, best_f, b - a


def _search_stack(stack: np.ndarray, cfg: ToleranceConfig):
    """Nested golden-section search on a (N, n, n) stack."""
    N, n, _ = stack.shape
    eye = np.eye(n, dtype=complex)
    centre = np.trace(stack, axis1=1, axis2=2) / n
    half = _f_many(stack, eye, centre)
    norms = _gram_top(stack)
    tol = np.array([cfg.rel * max(1.0, float(v)) for v in norms])
    n_iter = _iterations(2.0 * half, tol)
    evals = (n_iter + 3) * (n_iter + 2) + 1

    lo_y = centre.imag - half
    hi_y = centre.imag + half

    def inner(xs: np.ndarray):
        # For each outer abscissa xs[j] minimise over Im a on matrix j's box.
        return _golden(lambda ys: _f_many(stack, eye, xs + 1j * ys), lo_y, hi_y, n_iter)

    def outer_fun(xs: np.ndarray) -> np.ndarray:
        return inner(xs)[1]

    x_best, _, width = _golden(outer_fun, centre.real - half, centre.real + half, n_iter)
    y_best, f_best, _ = inner(x_best)
    return x_best + 1j * y_best, f_best, evals, np.maximum(width, 0.0), half


def _is_normal(A: np.ndarray, cfg: ToleranceConfig) -> bool:
    comm = A @ adjoint(A) - adjoint(A) @ A
    return operator_norm(comm) <= cfg.scale(operator_norm(A) ** 2)


def _oracle_radius(A: np.ndarray, cfg: ToleranceConfig) -> float | None:
    if _is_normal(A, cfg):
        if operator_norm(A - adjoint(A)) <= cfg.scale(operator_norm(A)):
            w = np.linalg.eigvalsh(hermitian_part(A))
            return float((w[-1] - w[0]) / 2.0)
        return enclosing_disk_oracle(np.linalg.eigvals(A))[1]
    return None


def _finish(A: np.ndarray, gamma: complex, evals: int, width: float, cfg: ToleranceConfig) -> GammaResult:
    n = A.shape[0]
    radius = operator_norm(A - gamma * np.eye(n))
    oracle = _oracle_radius(A, cfg)
    gap = abs(radius - oracle) if oracle is not None else float(width)
    return GammaResult(complex(gamma), radius, int(evals), float(gap))


def distance_to_scalars_many(mats: Sequence[np.ndarray], cfg: ToleranceConfig = DEFAULT_TOL) -> list[GammaResult]:
    """Batched :func:`distance_to_scalars`; results match single calls exactly."""
    mats = [_square(M) for M in mats]
    out: list[GammaResult | None] = [None] * len(mats)
    by_dim: dict[int, list[int]] = {}
    for i, M in enumerate(mats):
        if M.shape[0] == 0:
            raise NotSquare("empty matrix")
        if M.shape[0] == 1:
            out[i] = GammaResult(complex(M[0, 0]), 0.0, 0, 0.0)
        else:
            by_dim.setdefault(M.shape[0], []).append(i)
    for idx in by_dim.values():
        stack = np.stack([mats[i] for i in idx])
        gammas, values, evals, widths, half = _search_stack(stack, cfg)
        if not np.all(np.isfinite(values)):
            raise NoConvergence("non-finite objective during golden-section search")
        for j, i in enumerate(idx):
            out[i] = _finish(mats[i], gammas[j], int(evals[j]), float(widths[j]), cfg)
    return out  # type: ignore[return-value]


def distance_to_scalars(A, cfg: ToleranceConfig = DEFAULT_TOL) -> GammaResult:
    """Minimiser gamma of ||A - a I|| over complex a, with the attained radius."""
    return distance_to_scalars_many([A], cfg)[0]


def selfadjoint_center(A, cfg: ToleranceConfig = DEFAULT_TOL) -> GammaResult:
    """Closed form for self-adjoint A: midpoint and half-width of the spectrum."""
    A = _square(A)
    _check_hermitian(A, cfg)
    w = hermitian_eigen(A, cfg).eigenvalues
    return GammaResult(complex((w[0] + w[-1]) / 2.0), float((w[-1] - w[0]) / 2.0), 0, 0.0)


def center_of(A, cfg: ToleranceConfig = DEFAULT_TOL) -> GammaResult:
    """Exact centre for self-adjoint input, golden-section search otherwise."""
    A = _square(A)
    if operator_norm(A - adjoint(A)) <= cfg.scale(operator_norm(A)):
        return selfadjoint_center(A, cfg)
    return distance_to_scalars(A, cfg)


# --- minimum enclosing disk ---------------------------------------------------

def _disk_two(p: complex, q: complex) -> tuple[complex, float]:
    c = (p + q) / 2.0
    return c, max(abs(p - c), abs(q - c))


def _disk_three(p: complex, q: complex, r: complex) -> tuple[complex, float] | None:
    # Circumcircle; None for (nearly) collinear triples.
    b, c = q - p, r - p
    d = 2.0 * (b.real * c.imag - b.imag * c.real)
    if d == 0.0:
        return None
    bb, cc = abs(b) ** 2, abs(c) ** 2
    ux = (c.imag * bb - b.imag * cc) / d
    uy = (b.real * cc - c.real * bb) / d
    centre = p + complex(ux, uy)
    return centre, max(abs(p - centre), abs(q - centre), abs(r - centre))


def _covers(disk, z: complex) -> bool:
    c, r = disk
    return abs(z - c) <= r * (1.0 + 1e-12) + 1e-14


def enclosing_disk_oracle(points) -> tuple[complex, float]:
    """Smallest disk containing the points (incremental Welzl construction).

    Returns ``(center, radius)``. The disk is determined by at most three
    support points; the loop structure is the classic move-through-prefix
    variant of Welzl's algorithm, deterministic and O(n^3) worst case.
    """
    pts = [complex(z) for z in np.ravel(np.asarray(points, dtype=complex))]
    if not pts:
        raise EmptyInput("no points given")
    disk = (pts[0], 0.0)
    for i, p in enumerate(pts):
        if _covers(disk, p):
            continue
        disk = (p, 0.0)
        for j in range(i):
            q = pts[j]
            if _covers(disk, q):
                continue
            disk = _disk_two(p, q)
            for k in range(j):
                r = pts[k]
                if _covers(disk, r):
                    continue
                tri = _disk_three(p, q, r)
                disk = tri if tri is not None else max(
                    (_disk_two(p, q), _disk_two(p, r), _disk_two(q, r)), key=lambda cr: cr[1]
                )
    return complex(disk[0]), float(disk[1])
