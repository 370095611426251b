"""Linear maps M_n -> M_m: application, amplification, Choi matrices, positivity.

Three representations are supported: a Kraus family ``A -> sum_j K_j A K_j*``,
an explicit Choi matrix, and a handful of named builtins. Functionals are maps
into 1x1 matrices.

Choi convention: ``C = sum_ij E_ij (x) Phi(E_ij)``, so ``C[(i,a),(j,b)] =
Phi(E_ij)[a,b]`` and ``Phi(A) = sum_ij A_ij Phi(E_ij)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidDensity,
    PreconditionError,
    RaggedBlocks,
    UnknownKind,
)
from .matcore import (
    DEFAULT_TOL,
    ToleranceConfig,
    _square,
    adjoint,
    as_matrix,
    hermitian_part,
    min_eig,
    operator_norm,
)

BUILTINS = ("identity", "corner", "transpose", "tomiyama", "trace_density", "diag_expectation")


class LinearMap:
    """Base class; subclasses implement :meth:`_apply` and :meth:`to_json`."""

    kind: str = ""
    in_dim: int
    out_dim: int

    def __call__(self, A) -> np.ndarray:
        return apply_map(self, A)

    def _apply(self, A: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True, eq=False)
class KrausMap(LinearMap):
    ops: tuple[np.ndarray, ...]
    kind: str = field(default="kraus", init=False)

    def __post_init__(self):
        ops = tuple(as_matrix(K, "Kraus operator") for K in self.ops)
        if not ops:
            raise PreconditionError("Kraus family must be nonempty")
        shape = ops[0].shape
        if any(K.shape != shape for K in ops):
            raise DimensionMismatch("Kraus operators must share one shape")
        object.__setattr__(self, "ops", ops)

    @property
    def in_dim(self) -> int:
        return self.ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.ops[0].shape[0]

    def _apply(self, A):
        return sum(K @ A @ adjoint(K) for K in self.ops)

    def to_json(self) -> dict:
        from .harness.scenario import matrix_to_json

        return {"kind": "kraus", "ops": [matrix_to_json(K) for K in self.ops]}


@dataclass(frozen=True, eq=False)
class ChoiMap(LinearMap):
    choi: np.ndarray
    in_dim: int
    out_dim: int
    kind: str = field(default="choi", init=False)

    def __post_init__(self):
        C = as_matrix(self.choi, "Choi matrix")
        n, m = int(self.in_dim), int(self.out_dim)
        if C.shape != (n * m, n * m):
            raise DimensionMismatch(f"Choi matrix must be {n * m}x{n * m}, got {C.shape}")
        object.__setattr__(self, "choi", C)

    def _apply(self, A):
        n, m = self.in_dim, self.out_dim
        blocks = self.choi.reshape(n, m, n, m)
        return np.einsum("ij,iajb->ab", A, blocks)

    def to_json(self) -> dict:
        from .harness.scenario import matrix_to_json

        return {"kind": "choi", "in": self.in_dim, "out": self.out_dim, "matrix": matrix_to_json(self.choi)}


@dataclass(frozen=True, eq=False)
class BuiltinMap(LinearMap):
    """Named maps.

    ``identity(n)``, ``corner(n, index=(i, j))`` (1-based, A -> a_ij),
    ``transpose(n)``, ``tomiyama(n, mu)`` (A -> mu Tr(A) I - A with the
    unnormalised trace), ``trace_density(T)`` (A -> tr(TA)/n) and
    ``diag_expectation(n)``.
    """

    name: str
    params: dict
    kind: str = field(default="builtin", init=False)

    def __post_init__(self):
        if self.name not in BUILTINS:
            raise UnknownKind(f"unknown builtin map {self.name!r}")
        params = dict(self.params)
        if self.name == "trace_density":
            T = _square(params["T"], "T")
            params["T"] = T
            params["n"] = T.shape[0]
        else:
            params["n"] = int(params.get("n", 2))
        if self.name == "corner":
            i, j = params.get("index", (1, 1))
            params["index"] = (int(i), int(j))
            if not (1 <= i <= params["n"] and 1 <= j <= params["n"]):
                raise PreconditionError(f"corner index {params['index']} outside 1..{params['n']}")
        if self.name == "tomiyama":
            params["mu"] = float(params.get("mu", 2.0))
        object.__setattr__(self, "params", params)

    @property
    def in_dim(self) -> int:
        return self.params["n"]

    @property
    def out_dim(self) -> int:
        return 1 if self.name in ("corner", "trace_density") else self.params["n"]

    @property
    def label(self) -> str:
        return f"builtin:{self.name}"

    def _apply(self, A):
        n = self.in_dim
        if self.name == "identity":
            return A.copy()
        if self.name == "corner":
            i, j = self.params["index"]
            return A[i - 1 : i, j - 1 : j].copy()
        if self.name == "transpose":
            return A.T.copy()
        if self.name == "tomiyama":
            return self.params["mu"] * np.trace(A) * np.eye(n, dtype=complex) - A
        if self.name == "trace_density":
            return np.array([[np.trace(self.params["T"] @ A) / n]])
        if self.name == "diag_expectation":
            return np.diag(np.diag(A))
        raise UnknownKind(self.name)  # pragma: no cover

    def to_json(self) -> dict:
        from .harness.scenario import matrix_to_json

        params = {"n": self.params["n"]}
        if self.name == "corner":
            params["index"] = list(self.params["index"])
        elif self.name == "tomiyama":
            params["mu"] = self.params["mu"]
        elif self.name == "trace_density":
            params = {"T": matrix_to_json(self.params["T"])}
        return {"kind": "builtin", "name": self.name, "params": params}


# --- constructors ---------------------------------------------------------------

def identity_map(n: int) -> BuiltinMap:
    return BuiltinMap("identity", {"n": n})


def corner(n: int = 2, index: tuple[int, int] = (1, 1)) -> BuiltinMap:
    return BuiltinMap("corner", {"n": n, "index": index})


def transpose(n: int = 2) -> BuiltinMap:
    return BuiltinMap("transpose", {"n": n})


def tomiyama(mu: float = 2.0, n: int = 3) -> BuiltinMap:
    return BuiltinMap("tomiyama", {"n": n, "mu": mu})


def trace_density(T, cfg: ToleranceConfig = DEFAULT_TOL) -> BuiltinMap:
    T = _square(T, "T")
    n = T.shape[0]
    if min_eig(T) < -cfg.scale(operator_norm(T)) or abs(np.trace(T) / n - 1.0) > 1e-10:
        raise InvalidDensity("T must be PSD with normalised trace 1")
    return BuiltinMap("trace_density", {"T": T})


def diag_expectation(n: int) -> BuiltinMap:
    return BuiltinMap("diag_expectation", {"n": n})


def scaled(phi: KrausMap, c: float) -> KrausMap:
    if c <= 0:
        raise PreconditionError("scale must be positive")
    return KrausMap(tuple(np.sqrt(c) * K for K in phi.ops))


# --- operations -------------------------------------------------------------------

def apply_map(phi: LinearMap, A) -> np.ndarray:
    A = _square(A, "A")
    if A.shape[0] != phi.in_dim:
        raise DimensionMismatch(f"map expects {phi.in_dim}x{phi.in_dim} input, got {A.shape}")
    return np.asarray(phi._apply(A), dtype=complex)


def amplified_apply(phi: LinearMap, blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Phi_k([a_ij]) = [Phi(a_ij)], assembled into one (k m) x (k m) matrix."""
    k = len(blocks)
    if k == 0 or any(len(row) != k for row in blocks):
        raise RaggedBlocks("block array must be k x k")
    out = [[apply_map(phi, blocks[i][j]) for j in range(k)] for i in range(k)]
    return np.block(out)


def split_blocks(M: np.ndarray, k: int) -> list[list[np.ndarray]]:
    """Inverse of ``np.block`` for a k x k grid of equal square blocks."""
    M = _square(M)
    if M.shape[0] % k:
        raise RaggedBlocks(f"{M.shape[0]} is not divisible by {k}")
    s = M.shape[0] // k
    return [[M[i * s : (i + 1) * s, j * s : (j + 1) * s] for j in range(k)] for i in range(k)]


class ChoiMatrix(NamedTuple):
    matrix: np.ndarray
    input_dim: int
    output_dim: int


def choi_matrix(phi: LinearMap) -> ChoiMatrix:
    if isinstance(phi, ChoiMap):
        return ChoiMatrix(phi.choi, phi.in_dim, phi.out_dim)
    n, m = phi.in_dim, phi.out_dim
    C = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1.0
            C[i * m : (i + 1) * m, j * m : (j + 1) * m] = apply_map(phi, E)
    return ChoiMatrix(C, n, m)


def from_choi(C: ChoiMatrix) -> ChoiMap:
    return ChoiMap(C.matrix, C.input_dim, C.output_dim)


class CPResult(NamedTuple):
    cp: bool
    min_eig: float


def is_completely_positive(phi: LinearMap, cfg: ToleranceConfig = DEFAULT_TOL) -> CPResult:
    C = choi_matrix(phi).matrix
    lam = min_eig(hermitian_part(C))
    return CPResult(lam >= -cfg.scale(operator_norm(C)), lam)


def is_star_linear(phi: LinearMap, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    C = choi_matrix(phi).matrix
    return operator_norm(C - adjoint(C)) <= cfg.scale(operator_norm(C))


def is_unital(phi: LinearMap, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    img = apply_map(phi, np.eye(phi.in_dim))
    return operator_norm(img - np.eye(phi.out_dim)) <= cfg.scale(1.0)


# --- k-positivity falsifier --------------------------------------------------------

class Witness(NamedTuple):
    vector: np.ndarray
    value: float
    schmidt_rank: int


def _choi_form(C: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(np.vdot(v, C @ v)))


def _als_refine(C: np.ndarray, n: int, m: int, a: np.ndarray, b: np.ndarray, max_iter: int = 200):
    """Alternating minimisation of <v, C v> over v = sum_i a_i (x) b_i, ||v|| = 1.

    With one factor fixed and orthonormalised, the other is the bottom
    eigenvector of a compressed Hermitian matrix.
    """
    k = a.shape[1]
    value = np.inf
    v = None
    for _ in range(max_iter):
        qa, _ = np.linalg.qr(a)
        # v = sum_i qa_i (x) b_i  ->  v = Ma @ vec(b) with Ma = [qa_i (x) I_m]
        Ma = np.concatenate([np.kron(qa[:, [i]], np.eye(m)) for i in range(qa.shape[1])], axis=1)
        w, V = scipy.linalg.eigh(hermitian_part(adjoint(Ma) @ C @ Ma))
        bvec = V[:, 0]
        b = bvec.reshape(qa.shape[1], m).T
        a = qa
        qb, _ = np.linalg.qr(b)
        Mb = np.concatenate([np.kron(np.eye(n), qb[:, [i]]) for i in range(qb.shape[1])], axis=1)
        w, V = scipy.linalg.eigh(hermitian_part(adjoint(Mb) @ C @ Mb))
        avec = V[:, 0]
        a = avec.reshape(qb.shape[1], n).T
        b = qb
        new_v = sum(np.kron(a[:, i], b[:, i]) for i in range(a.shape[1]))
        new_v = new_v / np.linalg.norm(new_v)
        new_value = _choi_form(C, new_v)
        converged = value - new_value < 1e-14
        v, value = new_v, min(value, new_value)
        if converged:
            break
    return v, value


def k_positivity_falsifier(
    phi: LinearMap,
    k: int,
    trials: int = 1000,
    seed: int = 0,
    cfg: ToleranceConfig = DEFAULT_TOL,
    refine: int = 4,
) -> Witness | None:
    """Search for a Schmidt-rank <= k vector on which the Choi form is negative.

    Each trial draws Gaussian factors from a generator keyed by ``(seed, trial)``;
    the ``refine`` best samples are then polished by alternating minimisation.
    A returned witness certifies that ``phi`` is not k-positive. ``None`` means
    nothing was found, which is evidence, not proof, of k-positivity.
    """
    from .harness.rng import gaussian, trial_rng

    if k < 1:
        raise PreconditionError("k must be >= 1")
    C = hermitian_part(choi_matrix(phi).matrix)
    n, m = phi.in_dim, phi.out_dim
    r = min(k, n, m)
    thresh = -cfg.scale(operator_norm(C))

    samples = []
    for t in range(max(int(trials), 1)):
        rng = trial_rng(seed, t)
        a = gaussian(rng, (n, r)) + 1j * gaussian(rng, (n, r))
        b = gaussian(rng, (m, r)) + 1j * gaussian(rng, (m, r))
        samples.append((a, b))
    V = np.stack([(a @ b.T).reshape(-1) for a, b in samples])
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    values = np.real(np.einsum("ti,ij,tj->t", V.conj(), C, V))
    order = np.argsort(values, kind="stable")[: max(refine, 1)]

    best_v, best_val = V[order[0]], float(values[order[0]])
    for t in order:
        a, b = samples[t]
        v, val = _als_refine(C, n, m, a, b)
        if val < best_val:
            best_v, best_val = v, val
    if best_val < thresh:
        return Witness(best_v, best_val, r)
    return None
