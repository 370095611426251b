"""Independent reference computations used by the tests.

These deliberately avoid the package's own algorithms: brute-force grids,
exhaustive enumeration and closed forms.
"""
from __future__ import annotations

import itertools

import numpy as np

# Values printed with the worked examples (trace tables are truncated to the
# shown decimals, the rest are exact).
PRINTED_VARIANCE = {"gap": 4.0, "middle": 5.0, "norm_bound": 6.25}
PRINTED_TRANSPOSE = {"lhs": 6.0, "rhs": 3.75, "margin": -2.25, "radius_A": 2.5, "radius_B": 1.5}
PRINTED_TRACE_1 = {"A_4": 2.76, "B_4": 4.20, "T_2": 1.004, "A_2": 2.59, "B_2": 3.53, "T_inf": 1.10}
PRINTED_TRACE_2 = {"A_4": 4.96, "B_4": 4.68, "T_2": 1.87, "A_2": 4.19, "B_2": 4.06, "T_inf": 2.61}
PRINTED_PRODUCTS = {"example_1": (11.63, 10.05), "example_2": (43.40, 44.39)}

# Closed forms, frozen here once and for all.
EIG_3_HALF = ((5 - np.sqrt(2)) / 2, (5 + np.sqrt(2)) / 2)  # [[3, .5], [.5, 2]]
GOLDEN_NORM = (3 + np.sqrt(5)) / 2  # ||[[1, -1], [-1, 2]]||
TOMIYAMA_UNITAL_FORM_MARGIN = np.sqrt(2) - 2  # A = E31, B = E12, alpha = beta = 0


def _tomiyama_nonunital_margin() -> float:
    # Psi(A) = 2 Tr(A) I - A on M_3, Psi(I) = 5 I.  For A = E31, B = E12:
    # Psi(AB) = Psi(E32) = -E32, Psi(A) = -E31, Psi(B) = -E12, so
    # Psi(AB) - Psi(A) Psi(I)^{-1} Psi(B) = -E32 - E31 E12 / 5 = -E32 - E32 / 5 = -1.2 E32
    # and its modulus is 1.2 E22.
    # RHS: |A* - 0|^2 = E31 E13 = E33 -> Psi(E33) = 2I - E33 = diag(2, 2, 1), norm 2.
    #      |B|^2 = E21 E12 = E22 -> Psi(E22) = diag(2, 1, 2), root diag(sqrt2, 1, sqrt2).
    # RHS = sqrt(2) diag(sqrt2, 1, sqrt2) = diag(2, sqrt2, 2); margin = min(2, sqrt2 - 1.2, 2).
    return float(np.sqrt(2) - 1.2)


TOMIYAMA_NONUNITAL_MARGIN = _tomiyama_nonunital_margin()


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij (1-based)."""
    E = np.zeros((n, n), dtype=complex)
    E[i - 1, j - 1] = 1.0
    return E


def opnorm(M) -> float:
    return float(np.linalg.norm(np.asarray(M), 2))


def grid_distance_to_scalars(A: np.ndarray, levels: int = 6, points: int = 41) -> tuple[complex, float]:
    """Two-dimensional grid refinement of f(a) = ||A - a I|| over |a| <= 3||A||."""
    n = A.shape[0]
    I = np.eye(n)
    centre, half = 0.0 + 0.0j, 3.0 * max(opnorm(A), 1e-300)
    best = (centre, opnorm(A))
    for _ in range(levels):
        xs = np.linspace(centre.real - half, centre.real + half, points)
        ys = np.linspace(centre.imag - half, centre.imag + half, points)
        for x in xs:
            for y in ys:
                a = complex(x, y)
                v = opnorm(A - a * I)
                if v < best[1]:
                    best = (a, v)
        centre = best[0]
        half *= 4.0 / (points - 1)
    return best


def brute_enclosing_disk(points) -> tuple[complex, float]:
    """Smallest disk through every pair and triple, kept if it covers all points."""
    pts = [complex(z) for z in points]
    if len(pts) == 1:
        return pts[0], 0.0
    best = None
    candidates = []
    for p, q in itertools.combinations(pts, 2):
        candidates.append(((p + q) / 2, abs(p - q) / 2))
    for p, q, r in itertools.combinations(pts, 3):
        ax, ay, bx, by, cx, cy = p.real, p.imag, q.real, q.imag, r.real, r.imag
        d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if abs(d) < 1e-14:
            continue
        ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
        uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
        c = complex(ux, uy)
        candidates.append((c, abs(p - c)))
    for c, r in candidates:
        if all(abs(z - c) <= r * (1 + 1e-10) + 1e-12 for z in pts):
            if best is None or r < best[1]:
                best = (c, r)
    return best


def half_spread(A: np.ndarray) -> float:
    w = np.linalg.eigvalsh(A)
    return float((w[-1] - w[0]) / 2)


def normalized_schatten(A: np.ndarray, p: float) -> float:
    """Directly from the definition tau(|A|^p)^(1/p) with |A| from eigh of A*A."""
    n = A.shape[0]
    w, V = np.linalg.eigh(A.conj().T @ A)
    absA = (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T
    wa = np.linalg.eigvalsh(absA)
    return float((np.sum(np.clip(wa, 0, None) ** p) / n) ** (1 / p))


def scalar_gruss_rhs(a, b, g, G, rx, ry) -> float:
    """Dragomir's right-hand side computed in plain scalar arithmetic."""
    return 0.25 * abs(b - a) * abs(G - g) - np.sqrt(rx) * np.sqrt(ry)


def tomiyama_choi_min() -> float:
    # Choi of 2 Tr(.) I - id on M_3 is 2 I_9 - 3 P with P the maximally entangled projector.
    return -1.0
