"""Variance and covariance (Gruss-type) bounds for positive linear maps.

Every ``check_*`` function evaluates both sides of one inequality on concrete
matrices and returns an :class:`~gruss_lab.report.InequalityReport`. Where an
inequality is a chain, each link is a separate tier so its tightness can be
read off. Scalars ``alpha``/``beta`` may be arbitrary; when omitted they
default to members of the relevant Gamma sets (see :func:`default_scalars`).
"""
from __future__ import annotations

import numpy as np

from .errors import AccretivityFailed, MapIdentityNotInvertible, NotStarLinear, NotUnital, PositivityUncertified
from .matcore import (
    DEFAULT_TOL,
    ToleranceConfig,
    _square,
    adjoint,
    hermitian_part,
    matrix_abs,
    min_eig,
    operator_norm,
    psd_sqrt,
    real_part_accretive,
)
from .posmaps import LinearMap, apply_map, is_completely_positive, is_star_linear, is_unital
from .report import InequalityReport, compare
from .scalar_center import center_of

INEQUALITY_IDS = (
    "variance",
    "variance.chain",
    "covariance.block",
    "covariance",
    "covariance.norm",
    "variance.accretive",
    "covariance.accretive",
    "variance.nonunital",
    "covariance.nonunital",
)


# --- helpers --------------------------------------------------------------------

def _abs2(X: np.ndarray) -> np.ndarray:
    """|X|^2 = X* X."""
    return adjoint(X) @ X


def _shifted(A: np.ndarray, a: complex) -> np.ndarray:
    return A - complex(a) * np.eye(A.shape[0])


def c_operator(A: np.ndarray, S, T) -> np.ndarray:
    """C_{S,T}(A) = (A - S)*(T - A); scalars S, T stand for multiples of I."""
    n = A.shape[0]
    S = complex(S) * np.eye(n) if np.isscalar(S) else np.asarray(S)
    T = complex(T) * np.eye(n) if np.isscalar(T) else np.asarray(T)
    return adjoint(A - S) @ (T - A)


def _require_unital(phi: LinearMap, cfg: ToleranceConfig) -> None:
    if phi.in_dim < 1 or not is_unital(phi, cfg):
        raise NotUnital(f"{phi.label} does not map I to I")


def _require_positivity(phi: LinearMap, cfg: ToleranceConfig, assume_positive: int | None, needed: int = 3) -> None:
    if assume_positive is not None and assume_positive >= needed:
        return
    cp = is_completely_positive(phi, cfg)
    if not cp.cp:
        raise PositivityUncertified(
            f"{phi.label}: Choi matrix has eigenvalue {cp.min_eig:.3e}; "
            f"pass assume_positive>={needed} to evaluate anyway"
        )


def _phi_identity(phi: LinearMap) -> np.ndarray:
    return apply_map(phi, np.eye(phi.in_dim))


def _identity_inverse(phi: LinearMap, cfg: ToleranceConfig) -> np.ndarray:
    P = hermitian_part(_phi_identity(phi))
    lam = min_eig(P)
    if lam <= cfg.scale(operator_norm(P)):
        raise MapIdentityNotInvertible(f"Phi(I) has least eigenvalue {lam:.3e}")
    return np.linalg.inv(P)


def default_scalars(A, B=None, cfg: ToleranceConfig = DEFAULT_TOL, centers: dict | None = None):
    """Representatives of Gamma_A and Gamma_B.

    ``centers`` may supply them (``{"A": gamma_A, "B": gamma_B}``) to skip the
    search. Returns ``(gamma_A, gamma_B)``; ``gamma_B`` is None without ``B``.
    """
    centers = centers or {}
    gA = centers.get("A")
    if gA is None:
        gA = center_of(A, cfg).gamma
    gB = None
    if B is not None:
        gB = centers.get("B")
        if gB is None:
            gB = center_of(B, cfg).gamma
    return complex(gA), (None if gB is None else complex(gB))


def _covariance_defect(phi: LinearMap, A: np.ndarray, B: np.ndarray, middle: np.ndarray | None = None) -> np.ndarray:
    PA, PB = apply_map(phi, A), apply_map(phi, B)
    if middle is None:
        return apply_map(phi, A @ B) - PA @ PB
    return apply_map(phi, A @ B) - PA @ middle @ PB


def _covariance_rhs(phi: LinearMap, A: np.ndarray, B: np.ndarray, alpha: complex, beta: complex, cfg) -> tuple:
    # ||Phi(|A* - alpha I|^2)||^{1/2} first, then the matrix square root factor.
    left = apply_map(phi, _abs2(_shifted(adjoint(A), alpha)))
    s = operator_norm(left)
    right = psd_sqrt(hermitian_part(apply_map(phi, _abs2(_shifted(B, beta)))), cfg)
    return np.sqrt(s) * right, s


# --- variance bounds ---------------------------------------------------------------

def variance_gap(phi: LinearMap, A) -> np.ndarray:
    """Phi(A*A) - Phi(A)*Phi(A)."""
    A = _square(A, "A")
    PA = apply_map(phi, A)
    return hermitian_part(apply_map(phi, _abs2(A)) - adjoint(PA) @ PA)


def check_variance_bound(
    phi: LinearMap,
    A,
    alpha: complex | None = None,
    cfg: ToleranceConfig = DEFAULT_TOL,
    *,
    center: complex | None = None,
    chain: bool = True,
) -> InequalityReport:
    """gap <= Phi(|A - alpha I|^2) <= ||A - alpha I||^2 I, plus gap <= d(A)^2 I.

    Tiers: ``lemma`` (first link), and with ``chain`` also ``chain`` (second
    link) and ``norm_bound`` (gap against the squared distance to the scalars,
    evaluated at ``center``, a member of Gamma_A found by search if omitted).
    """
    A = _square(A, "A")
    _require_unital(phi, cfg)
    if not is_star_linear(phi, cfg):
        raise NotStarLinear(f"{phi.label} is not *-preserving")
    if center is None:
        center = center_of(A, cfg).gamma
    if alpha is None:
        alpha = center
    gap = variance_gap(phi, A)
    middle = hermitian_part(apply_map(phi, _abs2(_shifted(A, alpha))))
    alpha_bound = operator_norm(_shifted(A, alpha)) ** 2
    norm_bound = operator_norm(_shifted(A, center)) ** 2
    m = gap.shape[0]
    tiers = [compare("lemma", gap, middle, cfg)]
    if chain:
        tiers.append(compare("chain", middle, alpha_bound * np.eye(m), cfg))
        tiers.append(compare("norm_bound", gap, norm_bound * np.eye(m), cfg))
    return InequalityReport(
        "variance.chain" if chain else "variance",
        tuple(tiers),
        params={"alpha": complex(alpha), "center": complex(center), "map": phi.label},
        tolerance=cfg,
        values={"gap": gap, "middle": middle, "alpha_bound": alpha_bound, "norm_bound": norm_bound},
    )


def check_nonunital_variance(phi: LinearMap, A, alpha: complex | None = None, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """Phi(A*A) - Phi(A)* Phi(I)^{-1} Phi(A) <= Phi(|A - alpha I|^2) for Phi(I) invertible."""
    A = _square(A, "A")
    inv = _identity_inverse(phi, cfg)
    if alpha is None:
        alpha = center_of(A, cfg).gamma
    PA = apply_map(phi, A)
    lhs = hermitian_part(apply_map(phi, _abs2(A)) - adjoint(PA) @ inv @ PA)
    rhs = hermitian_part(apply_map(phi, _abs2(_shifted(A, alpha))))
    return InequalityReport(
        "variance.nonunital",
        (compare("lemma", lhs, rhs, cfg),),
        params={"alpha": complex(alpha), "map": phi.label},
        tolerance=cfg,
    )


def check_accretive_variance(phi: LinearMap, A, alpha: complex, beta: complex, cfg: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """gap <= |beta-alpha|^2/4 I - Phi(Re C_{alpha,beta}(A)) <= |beta-alpha|^2/4 I."""
    A = _square(A, "A")
    _require_unital(phi, cfg)
    C = c_operator(A, alpha, beta)
    acc = real_part_accretive(apply_map(phi, C), cfg)
    if not acc.accretive:
        raise AccretivityFailed(
            f"Phi(C_(alpha,beta)(A)) is not accretive (min eig of real part {acc.margin:.3e})",
            hypothesis="Phi(C_{alpha,beta}(A))",
        )
    m = phi.out_dim
    quarter = 0.25 * abs(complex(beta) - complex(alpha)) ** 2
    middle = quarter * np.eye(m) - hermitian_part(apply_map(phi, hermitian_part(C)))
    gap = variance_gap(phi, A)
    return InequalityReport(
        "variance.accretive",
        (compare("lemma", gap, middle, cfg), compare("bound", middle, quarter * np.eye(m), cfg)),
        params={"alpha": complex(alpha), "beta": complex(beta), "map": phi.label},
        tolerance=cfg,
        values={"accretivity_margin": acc.margin},
    )


# --- covariance bounds ----------------------------------------------------------------

def covariance_block_check(
    phi: LinearMap, A, B, cfg: ToleranceConfig = DEFAULT_TOL, *, assume_positive: int | None = None
) -> InequalityReport:
    """Positivity of the 2x2 block matrix of covariances [[V(A,A), V(A,B)], [V(B,A), V(B,B)]]."""
    A, B = _square(A, "A"), _square(B, "B")
    _require_unital(phi, cfg)
    _require_positivity(phi, cfg, assume_positive)
    PA, PB = apply_map(phi, A), apply_map(phi, B)

    def cov(X, PX, Y, PY):
        return apply_map(phi, adjoint(X) @ Y) - adjoint(PX) @ PY

    block = np.block([[cov(A, PA, A, PA), cov(A, PA, B, PB)], [cov(B, PB, A, PA), cov(B, PB, B, PB)]])
    return InequalityReport(
        "covariance.block",
        (compare("block", np.zeros_like(block), hermitian_part(block), cfg),),
        params={"map": phi.label},
        tolerance=cfg,
        values={"block": block},
    )


def check_covariance_bound(
    phi: LinearMap,
    A,
    B,
    alpha: complex | None = None,
    beta: complex | None = None,
    cfg: ToleranceConfig = DEFAULT_TOL,
    *,
    assume_positive: int | None = None,
    assume_unital: bool = False,
    centers: dict | None = None,
) -> InequalityReport:
    """|Phi(AB) - Phi(A)Phi(B)| <= ||Phi(|A* - alpha I|^2)||^{1/2} Phi(|B - beta I|^2)^{1/2}.

    Defaults: ``alpha`` in Gamma_{A*} (the conjugate of Gamma_A's
    representative) and ``beta`` in Gamma_B. ``assume_unital`` evaluates the
    unital-form bound for maps that are not unital.
    """
    A, B = _square(A, "A"), _square(B, "B")
    if not assume_unital:
        _require_unital(phi, cfg)
    _require_positivity(phi, cfg, assume_positive)
    if alpha is None or beta is None:
        gA, gB = default_scalars(A, B, cfg, centers)
        alpha = np.conj(gA) if alpha is None else alpha
        beta = gB if beta is None else beta
    lhs = matrix_abs(_covariance_defect(phi, A, B))
    rhs, s = _covariance_rhs(phi, A, B, alpha, beta, cfg)
    return InequalityReport(
        "covariance",
        (compare("theorem", lhs, rhs, cfg),),
        params={"alpha": complex(alpha), "beta": complex(beta), "map": phi.label},
        tolerance=cfg,
        values={"norm_factor": s},
    )


def check_refined_norm_bound(
    phi: LinearMap,
    A,
    B,
    cfg: ToleranceConfig = DEFAULT_TOL,
    *,
    assume_positive: int | None = None,
    centers: dict | None = None,
) -> InequalityReport:
    """||Phi(AB) - Phi(A)Phi(B)|| <= d(A) d(B) with d the distance to the scalars."""
    A, B = _square(A, "A"), _square(B, "B")
    _require_unital(phi, cfg)
    _require_positivity(phi, cfg, assume_positive)
    gA, gB = default_scalars(A, B, cfg, centers)
    rA = operator_norm(_shifted(A, gA))
    rB = operator_norm(_shifted(B, gB))
    lhs = operator_norm(_covariance_defect(phi, A, B))
    return InequalityReport(
        "covariance.norm",
        (compare("norm", lhs, rA * rB, cfg),),
        params={"gamma_A": gA, "gamma_B": gB, "map": phi.label},
        tolerance=cfg,
        values={"radius_A": rA, "radius_B": rB},
    )


def check_accretive_covariance(
    phi: LinearMap,
    A,
    B,
    alpha: complex,
    beta: complex,
    gamma: complex,
    Gamma: complex,
    cfg: ToleranceConfig = DEFAULT_TOL,
    *,
    assume_positive: int | None = None,
) -> InequalityReport:
    """Accretive refinement of the covariance bound, ending in |beta-alpha||Gamma-gamma|/4."""
    A, B = _square(A, "A"), _square(B, "B")
    _require_unital(phi, cfg)
    _require_positivity(phi, cfg, assume_positive)
    CA = c_operator(adjoint(A), alpha, beta)
    CB = c_operator(B, gamma, Gamma)
    for label, C in (("Phi(C_{alpha,beta}(A*))", CA), ("Phi(C_{gamma,Gamma}(B))", CB)):
        acc = real_part_accretive(apply_map(phi, C), cfg)
        if not acc.accretive:
            raise AccretivityFailed(f"{label} is not accretive (min eig {acc.margin:.3e})", hypothesis=label)
    m = phi.out_dim
    qa = 0.25 * abs(complex(beta) - complex(alpha)) ** 2
    qb = 0.25 * abs(complex(Gamma) - complex(gamma)) ** 2
    left = qa * np.eye(m) - hermitian_part(apply_map(phi, hermitian_part(CA)))
    re_b = hermitian_part(apply_map(phi, hermitian_part(CB)))
    right = qb * np.eye(m) - re_b
    middle = np.sqrt(operator_norm(left)) * psd_sqrt(right, cfg, scale=qb + operator_norm(re_b))
    lhs = matrix_abs(_covariance_defect(phi, A, B))
    bound = 0.25 * abs(complex(beta) - complex(alpha)) * abs(complex(Gamma) - complex(gamma))
    return InequalityReport(
        "covariance.accretive",
        (compare("corollary", lhs, middle, cfg), compare("bound", middle, bound * np.eye(m), cfg)),
        params={
            "alpha": complex(alpha),
            "beta": complex(beta),
            "gamma": complex(gamma),
            "Gamma": complex(Gamma),
            "map": phi.label,
        },
        tolerance=cfg,
    )


def check_nonunital_covariance(
    phi: LinearMap,
    A,
    B,
    alpha: complex | None = None,
    beta: complex | None = None,
    cfg: ToleranceConfig = DEFAULT_TOL,
    *,
    assume_positive: int | None = None,
    centers: dict | None = None,
) -> InequalityReport:
    """|Phi(AB) - Phi(A) Phi(I)^{-1} Phi(B)| <= ||Phi(|A* - alpha I|^2)||^{1/2} Phi(|B - beta I|^2)^{1/2}."""
    A, B = _square(A, "A"), _square(B, "B")
    _require_positivity(phi, cfg, assume_positive)
    inv = _identity_inverse(phi, cfg)
    if alpha is None or beta is None:
        gA, gB = default_scalars(A, B, cfg, centers)
        alpha = np.conj(gA) if alpha is None else alpha
        beta = gB if beta is None else beta
    lhs = matrix_abs(_covariance_defect(phi, A, B, inv))
    rhs, s = _covariance_rhs(phi, A, B, alpha, beta, cfg)
    return InequalityReport(
        "covariance.nonunital",
        (compare("proposition", lhs, rhs, cfg),),
        params={"alpha": complex(alpha), "beta": complex(beta), "map": phi.label},
        tolerance=cfg,
        values={"norm_factor": s},
    )
