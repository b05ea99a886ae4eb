import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .bases import LinearizationKind, Pencil
from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import (
    BoundNotApplicableException,
    DegenerateNormsException,
    ExcludedEigenvalueException,
    IndexRangeException,
    InvalidArgumentException,
    InvalidGradeException,
    NonSimpleEigenvalueException,
    ZeroPolynomialException,
)
from .matpoly import MatrixPolynomial
from .recover import EigenTriple, recover

logger = logging.getLogger(__name__)


def _weighted_modulus_sum(delta: complex, weights: Sequence[float]) -> float:
    a = abs(delta)
    return float(sum(w * a**i for i, w in enumerate(weights)))


def _condition(
    delta: complex,
    x: np.ndarray,
    y: np.ndarray,
    derivative: np.ndarray,
    weights: Sequence[float],
    tolerances: Tolerances,
) -> float:
    if delta == 0 or not np.isfinite(delta):
        raise ExcludedEigenvalueException(f"Condition number undefined at delta={delta}")
    nx, ny = linalg.norm(x), linalg.norm(y)
    a = abs(delta)
    denom = abs(np.vdot(y, derivative @ x))
    tol_simple = tolerances.simple_eigenvalue * nx * ny * sum(
        i * w * a ** (i - 1) for i, w in enumerate(weights) if i > 0
    )
    if not denom > tol_simple:
        raise NonSimpleEigenvalueException(
            f"|y^H P'(delta) x| = {denom:.3e} is below {tol_simple:.3e} at delta={delta}"
        )
    return _weighted_modulus_sum(delta, weights) * nx * ny / (a * denom)


def cond_number(
    P: MatrixPolynomial,
    triple: EigenTriple,
    weights: Optional[Sequence[float]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    The normwise relative condition number of a simple, finite, nonzero eigenvalue.

    kappa = (sum_i |delta|^i w_i) ||x|| ||y|| / (|delta| |y^H P'(delta) x|).

    Args:
        P (MatrixPolynomial): The polynomial.
        triple (EigenTriple): The eigenvalue with its right and left eigenvectors.
        weights (Optional[Sequence[float]]): Perturbation weights; defaults to ||A_i||_2.
        tolerances (Tolerances): Supplies the simplicity threshold.

    Returns:
        float: kappa_P(delta).

    Raises:
        ExcludedEigenvalueException: If delta is zero or infinite.
        NonSimpleEigenvalueException: If |y^H P'(delta) x| is numerically zero.
    """
    weights = P.coeff_norms if weights is None else weights
    if len(weights) != P.k + 1:
        raise InvalidArgumentException(f"Expected {P.k + 1} weights, got {len(weights)}")
    delta = complex(triple.delta)
    return _condition(delta, triple.x, triple.y, P.eval_derivative(delta), weights, tolerances)


def cond_number_pencil(
    L: Pencil,
    delta: complex,
    z_right: np.ndarray,
    z_left: np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """kappa_L(delta) = (|delta| ||L1|| + ||L0||) ||z|| ||w|| / (|delta| |w^H L1 z|)."""
    norm_L1, norm_L0 = L.norms
    return _condition(complex(delta), z_right, z_left, L.L1, (norm_L0, norm_L1), tolerances)


def _require_finite(delta: complex) -> complex:
    delta = complex(delta)
    if not np.isfinite(delta):
        raise ExcludedEigenvalueException("Backward error needs a finite eigenvalue")
    return delta


def _backward_error(residual: float, delta: complex, vector_norm: float, weights: Sequence[float]) -> float:
    if vector_norm == 0:
        raise InvalidArgumentException("Backward error of the zero vector")
    if not any(weights):
        raise ZeroPolynomialException("Backward error with all coefficient norms zero")
    scale = _weighted_modulus_sum(delta, weights)
    if scale == 0:
        # delta = 0 with A_0 = 0: no perturbation is allowed, and P(0) x = 0 exactly
        return 0.0 if residual == 0 else math.inf
    return residual / (scale * vector_norm)


def backward_error_right(P: MatrixPolynomial, x: np.ndarray, delta: complex) -> float:
    """
    eta_P(x, delta) = ||P(delta) x|| / ((sum_i |delta|^i ||A_i||) ||x||).

    Zero at delta = 0 when A_0 = 0.

    Raises:
        ExcludedEigenvalueException: If delta is infinite.
        InvalidArgumentException: If x is zero.
        ZeroPolynomialException: If every coefficient is zero.
    """
    delta = _require_finite(delta)
    x = np.asarray(x, dtype=complex)
    residual = linalg.norm(P.eval(delta) @ x)
    return _backward_error(residual, delta, linalg.norm(x), P.coeff_norms)


def backward_error_left(P: MatrixPolynomial, y: np.ndarray, delta: complex) -> float:
    """eta_P(y^H, delta) = ||y^H P(delta)|| / ((sum_i |delta|^i ||A_i||) ||y||)."""
    delta = _require_finite(delta)
    y = np.asarray(y, dtype=complex)
    residual = linalg.norm(P.eval(delta).conj().T @ y)
    return _backward_error(residual, delta, linalg.norm(y), P.coeff_norms)


def backward_error_pencil(L: Pencil, z: np.ndarray, delta: complex, side: str = "right") -> float:
    """The backward error of an approximate right (or left) eigenpair of the pencil z L1 - L0."""
    delta = _require_finite(delta)
    z = np.asarray(z, dtype=complex)
    M = L.eval(delta)
    residual = linalg.norm(M @ z if side == "right" else M.conj().T @ z)
    norm_L1, norm_L0 = L.norms
    return _backward_error(residual, delta, linalg.norm(z), (norm_L0, norm_L1))


@dataclass(frozen=True)
class GrowthFactors:
    """Coefficient-norm ratios controlling how conditioning and backward error transfer to a linearization."""

    rho: float
    rho1: float
    rho2: float
    rho_prime: float
    nu: float
    tau: float


def growth_factors_from_norms(norms: Sequence[float]) -> GrowthFactors:
    """
    Growth factors from the coefficient norms ||A_0||, ..., ||A_k||.

    Args:
        norms (Sequence[float]): Norms in ascending coefficient order.

    Returns:
        GrowthFactors: The factors.

    Raises:
        DegenerateNormsException: If ||A_0|| or ||A_k|| is zero.
    """
    w = np.asarray(norms, dtype=float)
    if len(w) < 2:
        raise InvalidArgumentException("Growth factors need grade k >= 1")
    w0, wk = float(w[0]), float(w[-1])
    if w0 == 0 or wk == 0:
        raise DegenerateNormsException(f"Growth factors need nonzero end coefficients, got |A_0|={w0}, |A_k|={wk}")
    top = float(np.max(w))
    low = min(w0, wk)
    top1 = max(1.0, top)
    return GrowthFactors(
        rho=top / low,
        rho1=top1**3 / low,
        rho2=min(max(1.0, wk), max(1.0, w0)) / top,
        rho_prime=top1**2 / low,
        nu=min(max(1.0, wk), max(1.0, float(np.max(w[:-1])))) / top,
        tau=top1 / low,
    )


def growth_factors(P: MatrixPolynomial) -> GrowthFactors:
    return growth_factors_from_norms(P.coeff_norms)


def d1(delta: complex, k: int) -> float:
    """
    The power sum bounding ||Delta(delta)||_2^2 / max_i {1, ||A_i||_2}^2.

    d_1 = sum_(r=0)^((k-1)/2) a^(2r) + sum_(r=1)^((k-1)/2) (k-2r+1) sum_(s=r)^(k-r) a^(2s), a = |delta|.

    Raises:
        InvalidGradeException: If k is even or below 3.
    """
    if k < 3 or k % 2 == 0:
        raise InvalidGradeException(f"d1 needs odd k >= 3, got k={k}")
    a2 = abs(delta) ** 2
    half = (k - 1) // 2
    total = sum(a2**r for r in range(half + 1))
    for r in range(1, half + 1):
        total += (k - 2 * r + 1) * sum(a2**s for s in range(r, k - r + 1))
    return float(total)


def _check_delta(delta: complex) -> float:
    a = abs(delta)
    if a == 0 or not np.isfinite(a):
        raise ExcludedEigenvalueException(f"Bounds need a finite nonzero eigenvalue, got {delta}")
    return a


def _tropical_tail(a: float, k: int, tolerances: Tolerances) -> bool:
    return abs(a - 1.0) > tolerances.unit_circle and min(a, 1.0 / a) <= 1.0 / (k - 1)


def bound_T_cond(
    P: MatrixPolynomial, delta: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[float, float]:
    """
    Bounds on kappa_T(delta) / kappa_P(delta) for T_P and R_P.

    Lower rho2; upper 2 k^3 rho1, or 4 (k+1) rho1 when |delta| is away from 1 and
    min(|delta|, 1/|delta|) <= 1/(k-1).

    Raises:
        ExcludedEigenvalueException: If delta is zero or infinite.
        DegenerateNormsException: If ||A_0|| or ||A_k|| is zero.
    """
    a = _check_delta(delta)
    k = P.k
    g = growth_factors(P)
    upper = 4 * (k + 1) * g.rho1 if _tropical_tail(a, k, tolerances) else 2 * k**3 * g.rho1
    return g.rho2, upper * tolerances.bound_scale


def bound_T_back(
    P: MatrixPolynomial, delta: complex, norm_ratio: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Upper bound 4 k^(3/2) (||z||/||x||) rho' on eta_P / eta_T, tightened to 4 sqrt(k+1) (||z||/||x||) rho'."""
    a = _check_delta(delta)
    k = P.k
    g = growth_factors(P)
    factor = 4 * math.sqrt(k + 1) if _tropical_tail(a, k, tolerances) else 4 * k**1.5
    return factor * norm_ratio * g.rho_prime * tolerances.bound_scale


def _coefficient_is_singular(A: np.ndarray, tolerances: Tolerances) -> bool:
    s = linalg.svdvals(A)
    return s[-1] == 0 or s[0] / s[-1] > tolerances.singular_coefficient_cond


def _check_t(P: MatrixPolynomial, t: int) -> None:
    if t not in (1, P.k):
        raise IndexRangeException(f"t must be 1 or k={P.k}, got {t}")


def bound_Dt_cond(
    P: MatrixPolynomial, delta: complex, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[float, float]:
    """
    Bounds (1/rho, k^2 rho) on kappa_Dt(delta) / kappa_P(delta).

    They apply to D_1 when |delta| >= 1 and A_0 is nonsingular, and to D_k when
    |delta| <= 1 and A_k is nonsingular.

    Raises:
        IndexRangeException: If t is neither 1 nor k.
        BoundNotApplicableException: Outside the range of validity.
    """
    _check_t(P, t)
    a = _check_delta(delta)
    if t == 1:
        if a < 1.0 - tolerances.unit_circle:
            raise BoundNotApplicableException(f"D_1 conditioning bound needs |delta| >= 1, got {a}")
        if _coefficient_is_singular(P.coeffs[0], tolerances):
            raise BoundNotApplicableException("D_1 conditioning bound needs A_0 nonsingular")
    else:
        if a > 1.0 + tolerances.unit_circle:
            raise BoundNotApplicableException(f"D_k conditioning bound needs |delta| <= 1, got {a}")
        if _coefficient_is_singular(P.coeffs[-1], tolerances):
            raise BoundNotApplicableException("D_k conditioning bound needs A_k nonsingular")
    g = growth_factors(P)
    return 1.0 / g.rho, P.k**2 * g.rho * tolerances.bound_scale


def bound_Dt_back(
    P: MatrixPolynomial, norm_ratio: float, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Upper bound k^(3/2) (||z||/||z_t||) rho on eta_P / eta_Dt."""
    _check_t(P, t)
    g = growth_factors(P)
    return P.k**1.5 * norm_ratio * g.rho * tolerances.bound_scale


def bound_C1_cond(
    P: MatrixPolynomial, delta: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[float, float]:
    """
    Bounds on kappa_C1(delta) / kappa_P(delta).

    Lower nu/(k+1); upper 2 sqrt(2) k^3 rho', or (4/3) k (k+1) rho' when
    |delta| >= sqrt((k-1)^3) or |delta| <= 1/2.
    """
    a = _check_delta(delta)
    k = P.k
    g = growth_factors(P)
    if a >= math.sqrt((k - 1) ** 3) or a <= 0.5:
        upper = 4.0 / 3.0 * k * (k + 1) * g.rho_prime
    else:
        upper = 2 * math.sqrt(2) * k**3 * g.rho_prime
    return g.nu / (k + 1), upper * tolerances.bound_scale


def bound_C1_back(
    P: MatrixPolynomial, norm_ratio: float, side: str = "right", tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Upper bound on eta_P / eta_C1: k^(5/2) (||z||/||z_t||) rho' on the right, k^(3/2) (||w||/||w_1||) tau on the left."""
    g = growth_factors(P)
    if side == "right":
        value = P.k**2.5 * norm_ratio * g.rho_prime
    elif side == "left":
        value = P.k**1.5 * norm_ratio * g.tau
    else:
        raise InvalidArgumentException(f"side must be 'right' or 'left', got {side!r}")
    return value * tolerances.bound_scale


def within_bounds(
    ratio: float,
    lower: Optional[float],
    upper: Optional[float],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> bool:
    """True if lower (1 - rel) <= ratio <= upper (1 + rel); a missing bound is not checked."""
    rel = tolerances.bound_rel
    if lower is not None and ratio < lower * (1 - rel):
        return False
    if upper is not None and not ratio <= upper * (1 + rel):
        return False
    return True


def backward_ratio(eta_P: float, eta_L: float) -> float:
    """eta_P / eta_L, with 0/0 read as 0 and positive/0 as infinity."""
    if eta_L == 0:
        return 0.0 if eta_P == 0 else math.inf
    return eta_P / eta_L


@dataclass(frozen=True)
class Diagnostics:
    """Conditioning and backward-error comparison between P and one linearization at one eigenvalue.

    Bound fields are None where the bound does not apply; the matching flag is then None too.
    """

    delta: complex
    lin: str
    kappa_P: float
    kappa_L: float
    eta_P: float
    eta_L: float
    cond_ratio: float
    back_ratio: float
    norm_ratio: float
    cond_lower: Optional[float]
    cond_upper: Optional[float]
    back_upper: Optional[float]
    cond_pass: Optional[bool]
    back_pass: Optional[bool]
    back_ratio_left: Optional[float] = None
    back_upper_left: Optional[float] = None
    back_pass_left: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return all(flag is not False for flag in (self.cond_pass, self.back_pass, self.back_pass_left))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["delta"] = [self.delta.real, self.delta.imag]
        data["passed"] = self.passed
        return data


def _bounds_for(
    P: MatrixPolynomial,
    kind: LinearizationKind,
    delta: complex,
    norm_ratio: float,
    tolerances: Tolerances,
) -> tuple[Optional[float], Optional[float], float]:
    if kind in (LinearizationKind.T, LinearizationKind.R):
        lower, upper = bound_T_cond(P, delta, tolerances)
        return lower, upper, bound_T_back(P, delta, norm_ratio, tolerances)
    if kind in (LinearizationKind.D1, LinearizationKind.Dk):
        t = 1 if kind is LinearizationKind.D1 else P.k
        try:
            lower, upper = bound_Dt_cond(P, delta, t, tolerances)
        except BoundNotApplicableException as e:
            logger.debug(f"{kind} conditioning bound skipped at delta={delta}: {e.message}")
            lower = upper = None
        return lower, upper, bound_Dt_back(P, norm_ratio, t, tolerances)
    if kind is LinearizationKind.C1:
        lower, upper = bound_C1_cond(P, delta, tolerances)
        return lower, upper, bound_C1_back(P, norm_ratio, "right", tolerances)
    raise InvalidArgumentException(f"No bounds are known for linearization {kind}")


def diagnose(
    P: MatrixPolynomial,
    L: Pencil,
    delta: complex,
    z_right: np.ndarray,
    z_left: np.ndarray,
    x: Optional[np.ndarray] = None,
    y: Optional[np.ndarray] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Diagnostics:
    """
    Compare conditioning and backward error of P and of its linearization L at one eigenvalue.

    kappa_P uses (x, y) when given, otherwise the vectors recovered from (z_right, z_left);
    kappa_L uses the pencil vectors. eta_P is always taken at the vector recovered from
    z_right, so the backward-error ratio measures the recovery the bounds describe.

    Args:
        P (MatrixPolynomial): The polynomial.
        L (Pencil): Its linearization of kind T, R, D1, Dk or C1.
        delta (complex): A simple finite nonzero eigenvalue.
        z_right (np.ndarray): Right eigenvector of L.
        z_left (np.ndarray): Left eigenvector of L.
        x (Optional[np.ndarray]): Reference right eigenvector of P for kappa_P.
        y (Optional[np.ndarray]): Reference left eigenvector of P for kappa_P.
        tolerances (Tolerances): Tolerance knobs.

    Returns:
        Diagnostics: The ratios, bounds and pass flags.
    """
    kind = L.kind
    delta = complex(delta)
    x_rec = recover(P, kind, z_right, delta, "right")
    y_rec = recover(P, kind, z_left, delta, "left")
    x_ref = x_rec if x is None else x
    y_ref = y_rec if y is None else y

    kappa_P = cond_number(P, EigenTriple(delta, x_ref, y_ref), tolerances=tolerances)
    kappa_L = cond_number_pencil(L, delta, z_right, z_left, tolerances)
    eta_P = backward_error_right(P, x_rec, delta)
    eta_L = backward_error_pencil(L, z_right, delta)
    norm_ratio = float(linalg.norm(z_right) / linalg.norm(x_rec))
    cond_ratio = kappa_L / kappa_P
    back_ratio = backward_ratio(eta_P, eta_L)

    cond_lower, cond_upper, back_upper = _bounds_for(P, kind, delta, norm_ratio, tolerances)
    cond_pass = None if cond_upper is None else within_bounds(cond_ratio, cond_lower, cond_upper, tolerances)
    back_pass = within_bounds(back_ratio, None, back_upper, tolerances)

    left = {}
    if kind is LinearizationKind.C1:
        eta_P_left = backward_error_left(P, y_rec, delta)
        eta_L_left = backward_error_pencil(L, z_left, delta, side="left")
        ratio_left = backward_ratio(eta_P_left, eta_L_left)
        upper_left = bound_C1_back(P, float(linalg.norm(z_left) / linalg.norm(y_rec)), "left", tolerances)
        left = {
            "back_ratio_left": ratio_left,
            "back_upper_left": upper_left,
            "back_pass_left": within_bounds(ratio_left, None, upper_left, tolerances),
        }

    result = Diagnostics(
        delta=delta,
        lin=kind.value,
        kappa_P=kappa_P,
        kappa_L=kappa_L,
        eta_P=eta_P,
        eta_L=eta_L,
        cond_ratio=cond_ratio,
        back_ratio=back_ratio,
        norm_ratio=norm_ratio,
        cond_lower=cond_lower,
        cond_upper=cond_upper,
        back_upper=back_upper,
        cond_pass=cond_pass,
        back_pass=back_pass,
        **left,
    )
    if not result.passed:
        logger.warning(
            f"Bound violated for {kind} at delta={delta}: cond {cond_ratio:.4g} in "
            f"[{cond_lower}, {cond_upper}], back {back_ratio:.4g} <= {back_upper}"
        )
    return result
