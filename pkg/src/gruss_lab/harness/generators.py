"""Seeded random instances: matrices, maps and constructed admissible scenarios.

Everything is deterministic in ``(seed, trial, kind, dims)``. Scenario
builders return JSON documents ready for :func:`~.scenario.run_check`; the
ones for module inequalities satisfy their hypotheses by construction.
"""
from __future__ import annotations

import numpy as np

from ..errors import UnknownKind
from ..matcore import adjoint, hermitian_part, operator_norm
from ..posmaps import BuiltinMap, KrausMap
from .rng import complex_gaussian, gaussian, trial_rng
from .scenario import complex_to_json, map_to_json, matrix_to_json

KINDS = (
    "hermitian",
    "psd",
    "density",
    "unitary",
    "partial_isometry",
    "general",
    "cp_map",
    "module_instance",
    "gruss_instance",
)


# --- matrices ----------------------------------------------------------------------

def hermitian(rng, n: int) -> np.ndarray:
    G = complex_gaussian(rng, (n, n))
    return (G + adjoint(G)) / 2.0


def psd(rng, n: int, rank: int | None = None) -> np.ndarray:
    G = complex_gaussian(rng, (n, rank or n))
    return hermitian_part(G @ adjoint(G))


def density(rng, n: int) -> np.ndarray:
    rank = 1 + int(rng.integers(n))
    P = psd(rng, n, rank)
    return hermitian_part(P / (np.real(np.trace(P)) / n))


def unitary(rng, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def partial_isometry(rng, m: int, k: int, rank: int | None = None) -> np.ndarray:
    """m x k matrix with singular values in {0, 1}; rank defaults to a random 1..min(m, k)."""
    r = rank if rank is not None else 1 + int(rng.integers(min(m, k)))
    U, _, Vh = np.linalg.svd(complex_gaussian(rng, (m, k)))
    return U[:, :r] @ Vh[:r, :]


def general(rng, n: int, cols: int | None = None) -> np.ndarray:
    return complex_gaussian(rng, (n, cols or n))


def contraction(rng, n: int, bound: float = 1.0) -> np.ndarray:
    W = complex_gaussian(rng, (n, n))
    return bound * rng.random() * W / operator_norm(W)


def operator_input(rng, n: int) -> np.ndarray:
    """A test operator: general, self-adjoint or normal, with random scale and shift."""
    u = rng.random()
    if u < 0.6:
        A = general(rng, n)
    elif u < 0.8:
        A = hermitian(rng, n)
    else:
        U = unitary(rng, n)
        A = (U * complex_gaussian(rng, n)) @ adjoint(U)
    scale = np.exp(gaussian(rng, ()).item())
    shift = complex(*gaussian(rng, (2,)))
    return scale * A + shift * np.eye(n)


# --- maps ----------------------------------------------------------------------------

def cp_map(rng, n: int, m: int | None = None, n_kraus: int | None = None, unital: bool = True) -> KrausMap:
    """Random Kraus map M_n -> M_m; ``unital`` rescales so that sum K K* = I."""
    m = m or n
    r = n_kraus or 1 + int(rng.integers(4))
    ops = [complex_gaussian(rng, (m, n)) for _ in range(r)]
    if unital:
        S = sum(K @ adjoint(K) for K in ops)
        w, V = np.linalg.eigh(hermitian_part(S))
        S_inv_half = (V / np.sqrt(w)) @ adjoint(V)
        ops = [S_inv_half @ K for K in ops]
    return KrausMap(tuple(ops))


def scaled_cp_map(rng, n: int) -> KrausMap:
    """Random (non-unital) Kraus map scaled by a log-uniform c in [0.1, 10]."""
    phi = cp_map(rng, n, unital=False)
    c = 10.0 ** (2.0 * rng.random() - 1.0)
    return KrausMap(tuple(np.sqrt(c) * K for K in phi.ops))


def builtin_map(rng, name: str, n: int) -> BuiltinMap:
    params: dict = {"n": n}
    if name == "corner":
        i = 1 + int(rng.integers(n))
        params["index"] = (i, i)
    elif name == "tomiyama":
        params["mu"] = 2.0
    elif name == "trace_density":
        params = {"T": density(rng, n)}
    return BuiltinMap(name, params)


def map_for_family(rng, family: str, n: int):
    if family == "cp_kraus":
        return cp_map(rng, n)
    if family == "scaled_cp":
        return scaled_cp_map(rng, n)
    if family.startswith("builtin:"):
        return builtin_map(rng, family.split(":", 1)[1], n)
    raise UnknownKind(f"unknown map family {family!r}")


# --- scenario builders -----------------------------------------------------------------

def _c(z) -> list[float]:
    return complex_to_json(z)


def _covering_diameter(rng, X: np.ndarray):
    """Endpoints of a random diameter of a disk about tau(X) with radius >= ||X - tau(X)||."""
    n = X.shape[0]
    c = np.trace(X) / n
    r = operator_norm(X - c * np.eye(n)) * (1.0 + rng.random())
    turn = np.exp(2j * np.pi * rng.random())
    return c - r * turn, c + r * turn


def map_scenario(rng, inequality: str, n: int, family: str) -> dict:
    """Map-inequality scenario without Gamma centres (the fuzz engine adds them)."""
    A, B = operator_input(rng, n), operator_input(rng, n)
    phi = map_for_family(rng, family, n)
    doc = {"inequality": inequality, "map": map_to_json(phi), "A": matrix_to_json(A), "B": matrix_to_json(B)}
    if family.startswith("builtin:"):
        doc["assume_positive"] = max(n, 3)
    if inequality in ("variance", "variance.chain", "variance.nonunital") and rng.random() < 0.5:
        doc["alpha"] = _c(3.0 * operator_norm(A) * complex(*gaussian(rng, (2,))) / 2.0)
    if inequality in ("variance.accretive", "covariance.accretive"):
        # Disks containing the numerical range make C_{S,T}(X) itself accretive.
        pairs = [("alpha", "beta", A)]
        if inequality == "covariance.accretive":
            pairs = [("alpha", "beta", adjoint(A)), ("gamma", "Gamma", B)]
        for lo, hi, X in pairs:
            lo_z, hi_z = _covering_diameter(rng, X)
            doc[lo], doc[hi] = _c(lo_z), _c(hi_z)
    return doc


def trace_scenario(rng, inequality: str, n: int) -> dict:
    A, B = operator_input(rng, n), operator_input(rng, n)
    T = density(rng, n)
    doc = {"inequality": inequality, "T": matrix_to_json(T), "A": matrix_to_json(A), "B": matrix_to_json(B)}
    if inequality == "trace.pq":
        doc.update(p=[4, 6, "inf"], q=[4, 6, "inf"], r=[2, 4, "inf"])
    if inequality == "trace.accretive":
        # Literal hypothesis Re tau(C) >= 0: disk about tau(X) with radius >= ||X - tau(X)||_2.
        for key_a, key_b, X in (("alpha", "beta", A), ("zeta", "xi", B)):
            c = np.trace(X) / n
            r = np.sqrt(np.real(np.trace(adjoint(X - c * np.eye(n)) @ (X - c * np.eye(n)))) / n)
            r *= 1.0 + 0.1 * rng.random()
            theta = 2 * np.pi * rng.random()
            doc[key_a] = _c(c - r * np.exp(1j * theta))
            doc[key_b] = _c(c + r * np.exp(1j * theta))
    return doc


def _module_pair(rng, K: np.ndarray, m: int, k: int):
    """(x, u, v) with u + v in ran(K) and Re<x-u, v-x> >= 0."""
    w = K @ general(rng, m, k)
    d = general(rng, m, k)
    W = contraction(rng, m)
    return w + W @ d, w - d, w + d


def module_scenario(rng, inequality: str, m: int, k: int) -> dict:
    if inequality in ("module.variance", "module.gruss"):
        K = partial_isometry(rng, m, m)
        K = hermitian_part(K @ adjoint(K))
        x, u, v = _module_pair(rng, K, m, k)
        doc = {"inequality": inequality, "K": matrix_to_json(K), "x": matrix_to_json(x), "u": matrix_to_json(u), "v": matrix_to_json(v)}
        if inequality == "module.gruss":
            y, uP, vP = _module_pair(rng, K, m, k)
            doc.update(y=matrix_to_json(y), uP=matrix_to_json(uP), vP=matrix_to_json(vP))
        return doc
    if inequality == "module.lifted":
        h = partial_isometry(rng, m, k)
        doc = {"inequality": inequality, "h": matrix_to_json(h)}
        for xname, lo, hi in (("x", "a", "A"), ("y", "b", "B")):
            a, A = general(rng, k), general(rng, k)
            W = contraction(rng, m)
            x = h @ (a + A) / 2.0 + W @ h @ (A - a) / 2.0
            doc.update({xname: matrix_to_json(x), lo: matrix_to_json(a), hi: matrix_to_json(A)})
        return doc
    if inequality == "hilbert.gruss":
        e = complex_gaussian(rng, (m, 1))
        e /= np.linalg.norm(e)
        doc = {"inequality": inequality, "e": matrix_to_json(e)}
        for xname, lo, hi in (("x", "alpha", "beta"), ("y", "gamma", "Gamma")):
            a, b = complex_gaussian(rng, 2)
            W = contraction(rng, m)
            x = (a + b) / 2.0 * e + W @ e * (b - a) / 2.0
            doc.update({xname: matrix_to_json(x), lo: _c(a), hi: _c(b)})
        return doc
    if inequality == "module.accretive":
        T = hermitian(rng, m)
        w = np.linalg.eigvalsh(T)
        if rng.random() < 0.5:
            a, b = complex(w[0]), complex(w[-1])
        else:
            # Any disk with diameter [a, b] covering the spectrum keeps C_{a,b}(T) accretive.
            c = (w[0] + w[-1]) / 2.0
            r = (w[-1] - w[0]) / 2.0 * (1.0 + rng.random())
            theta = 2 * np.pi * rng.random()
            a, b = c - r * np.exp(1j * theta), c + r * np.exp(1j * theta)
        h = partial_isometry(rng, m, k)
        return {"inequality": inequality, "T": matrix_to_json(T), "a": _c(a), "b": _c(b), "h": matrix_to_json(h)}
    raise UnknownKind(f"no module builder for {inequality!r}")


# --- unified entry point ----------------------------------------------------------------

def generate(seed: int, kind: str, dims, *, trial: int = 0, **options):
    """Deterministic instance of ``kind`` for ``(seed, trial, dims)``.

    ``dims`` is ``n`` or ``(n,)`` for square kinds and ``(m, k)`` for
    partial isometries and module instances. ``gruss_instance`` and
    ``module_instance`` need ``inequality=...`` (and ``family=...`` for map
    inequalities).
    """
    if kind not in KINDS:
        raise UnknownKind(f"unknown generator kind {kind!r}")
    dims = (dims,) if np.isscalar(dims) else tuple(int(d) for d in dims)
    rng = trial_rng(seed, trial, KINDS.index(kind))
    n = dims[0]
    if kind == "hermitian":
        return hermitian(rng, n)
    if kind == "psd":
        return psd(rng, n)
    if kind == "density":
        return density(rng, n)
    if kind == "unitary":
        return unitary(rng, n)
    if kind == "partial_isometry":
        return partial_isometry(rng, n, dims[1] if len(dims) > 1 else n)
    if kind == "general":
        return general(rng, n)
    if kind == "cp_map":
        return cp_map(rng, n, dims[1] if len(dims) > 1 else n, unital=options.get("unital", True))
    inequality = options["inequality"]
    if kind == "module_instance":
        return module_scenario(rng, inequality, n, dims[1] if len(dims) > 1 else 1)
    if inequality.startswith("trace."):
        return trace_scenario(rng, inequality, n)
    return map_scenario(rng, inequality, n, options.get("family", "cp_kraus"))
