import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .bases import LinearizationKind, Pencil, linearization_directory
from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import InvalidArgumentException, InvalidGradeException, SamplingException
from .matpoly import MatrixPolynomial

logger = logging.getLogger(__name__)


def _require_odd_grade(k: int, what: str) -> None:
    if k < 3 or k % 2 == 0:
        raise InvalidGradeException(f"{what} needs an odd grade k >= 3, got k={k}")


def _require_grade_two(k: int, what: str) -> None:
    if k < 2:
        raise InvalidGradeException(f"{what} needs grade k >= 2, got k={k}")


def _blocks(k: int, n: int) -> np.ndarray:
    return np.zeros((k * n, k * n), dtype=complex)


def _put(M: np.ndarray, i: int, j: int, n: int, block: np.ndarray) -> None:
    M[i * n:(i + 1) * n, j * n:(j + 1) * n] = block


@linearization_directory.register(LinearizationKind.T, "build")
def build_T(P: MatrixPolynomial) -> Pencil:
    """
    Build the block-symmetric block-tridiagonal pencil T_P(z) = z T1 - T0 of an odd-grade polynomial.

    The diagonal blocks at even positions 2j are z A_(k-2j) + A_(k-2j-1) and the
    off-diagonal pattern alternates -I and z I.

    Args:
        P (MatrixPolynomial): A polynomial of odd grade k >= 3.

    Returns:
        Pencil: The pencil of kind T.

    Raises:
        InvalidGradeException: If k is even or below 3.
    """
    n, k = P.n, P.k
    _require_odd_grade(k, "T_P")
    A = P.coeffs
    eye = np.eye(n)
    L1, L0 = _blocks(k, n), _blocks(k, n)
    for j in range((k - 1) // 2 + 1):
        b = 2 * j
        _put(L1, b, b, n, A[k - 2 * j])
        _put(L0, b, b, n, -A[k - 2 * j - 1])
        if b + 1 < k:
            _put(L0, b, b + 1, n, eye)
            _put(L0, b + 1, b, n, eye)
            _put(L1, b + 1, b + 2, n, eye)
            _put(L1, b + 2, b + 1, n, eye)
    logger.debug(f"Built T_P for {P}")
    return Pencil(L1, L0, kind=LinearizationKind.T, n=n, k=k)


def structural_matrices(k: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    The block flip R, the sign matrix S and the alternating signature D, all kn x kn.

    S has -I in block i (1-based) when i = 0 or 1 mod 4 and +I otherwise;
    D = diag(I, -I, I, ..., I).

    Raises:
        InvalidGradeException: If k is even.
    """
    if k < 1 or k % 2 == 0:
        raise InvalidGradeException(f"Structural matrices need odd k, got k={k}")
    eye = np.eye(n)
    R = np.kron(np.fliplr(np.eye(k)), eye)
    s = np.array([-1.0 if i % 4 in (0, 1) else 1.0 for i in range(1, k + 1)])
    d = np.array([(-1.0) ** i for i in range(k)])
    S = np.kron(np.diag(s), eye)
    D = np.kron(np.diag(d), eye)
    return R, S, D


@linearization_directory.register(LinearizationKind.R, "build")
def build_R(P: MatrixPolynomial) -> Pencil:
    """
    Build R_P = S R T_P R S, strictly equivalent to T_P.

    Raises:
        InvalidGradeException: If k is even or below 3.
    """
    T = build_T(P)
    R, S, _ = structural_matrices(P.k, P.n)
    SR, RS = S @ R, R @ S
    logger.debug(f"Built R_P for {P}")
    return Pencil(SR @ T.L1 @ RS, SR @ T.L0 @ RS, kind=LinearizationKind.R, n=P.n, k=P.k)


def _coeff_or_zero(P: MatrixPolynomial, i: int) -> np.ndarray:
    if 0 <= i <= P.k:
        return P.coeffs[i]
    return np.zeros((P.n, P.n), dtype=complex)


@linearization_directory.register(LinearizationKind.D1, "build")
def build_D1(P: MatrixPolynomial) -> Pencil:
    """
    Build the first standard-basis pencil D_1 of the DL(P) space (ansatz vector e_1).

    L1 = diag(A_k, H) with H the Hankel block of -A_(k-2), ..., -A_0 above the anti-diagonal,
    and L0 the Hankel block of -A_(k-1), ..., -A_0. It linearizes P only if A_0 is nonsingular.

    Raises:
        InvalidGradeException: If k < 2.
    """
    n, k = P.n, P.k
    _require_grade_two(k, "D_1")
    L1, L0 = _blocks(k, n), _blocks(k, n)
    _put(L1, 0, 0, n, P.coeffs[k])
    for i in range(k - 1):
        for j in range(k - 1):
            _put(L1, i + 1, j + 1, n, -_coeff_or_zero(P, k - 2 - i - j))
    for i in range(k):
        for j in range(k):
            _put(L0, i, j, n, -_coeff_or_zero(P, k - 1 - i - j))
    logger.debug(f"Built D_1 for {P}")
    return Pencil(L1, L0, kind=LinearizationKind.D1, n=n, k=k)


@linearization_directory.register(LinearizationKind.Dk, "build")
def build_Dk(P: MatrixPolynomial) -> Pencil:
    """
    Build the last standard-basis pencil D_k of the DL(P) space (ansatz vector e_k).

    It linearizes P only if A_k is nonsingular.

    Raises:
        InvalidGradeException: If k < 2.
    """
    n, k = P.n, P.k
    _require_grade_two(k, "D_k")
    L1, L0 = _blocks(k, n), _blocks(k, n)
    for i in range(k):
        for j in range(k):
            if i + j >= k - 1:
                _put(L1, i, j, n, P.coeffs[2 * k - 1 - i - j])
    for i in range(k - 1):
        for j in range(k - 1):
            if i + j >= k - 2:
                _put(L0, i, j, n, P.coeffs[2 * k - 2 - i - j])
    _put(L0, k - 1, k - 1, n, -P.coeffs[0])
    logger.debug(f"Built D_k for {P}")
    return Pencil(L1, L0, kind=LinearizationKind.Dk, n=n, k=k)


@linearization_directory.register(LinearizationKind.C1, "build")
def build_C1(P: MatrixPolynomial) -> Pencil:
    """
    Build the first Frobenius companion form z diag(A_k, I, ..., I) - L0.

    L0 has first block row -A_(k-1), ..., -A_0 and identities on the block subdiagonal.

    Raises:
        InvalidGradeException: If k < 2.
    """
    n, k = P.n, P.k
    _require_grade_two(k, "C_1")
    eye = np.eye(n)
    L1, L0 = _blocks(k, n), _blocks(k, n)
    _put(L1, 0, 0, n, P.coeffs[k])
    for i in range(1, k):
        _put(L1, i, i, n, eye)
        _put(L0, i, i - 1, n, eye)
    for j in range(k):
        _put(L0, 0, j, n, -P.coeffs[k - 1 - j])
    logger.debug(f"Built C_1 for {P}")
    return Pencil(L1, L0, kind=LinearizationKind.C1, n=n, k=k)


def build(P: MatrixPolynomial, kind: "LinearizationKind | str") -> Pencil:
    """Build the pencil of the given kind through the linearization directory."""
    return linearization_directory[kind, "build"](P)


def pencil_eval(L: Pencil, z: complex) -> np.ndarray:
    """Return z L1 - L0."""
    return L.eval(z)


def tridiagonal_norm_bound(P: MatrixPolynomial) -> float:
    """The upper bound 2 max_i {1, ||A_i||_2} on ||T1||_2 and ||T0||_2."""
    return 2.0 * max(1.0, P.max_norm)


def block_norm_bounds(B: np.ndarray, n: int) -> tuple[float, float]:
    """
    Bounds on ||B||_2 from its n x n blocks: max block norm <= ||B||_2 <= sqrt(l m) max block norm.

    Args:
        B (np.ndarray): A (l n) x (m n) matrix.
        n (int): The block size.

    Returns:
        tuple[float, float]: The lower and upper bound.
    """
    rows, cols = B.shape[0] // n, B.shape[1] // n
    top = max(
        linalg.svdvals(B[i * n:(i + 1) * n, j * n:(j + 1) * n])[0]
        for i in range(rows)
        for j in range(cols)
    )
    return float(top), float(math.sqrt(rows * cols) * top)


@dataclass(frozen=True)
class StrongLinearizationReport:
    """Outcome of the randomized determinant check of a (possibly strong) linearization."""

    forward: bool
    reversal: bool
    c: complex
    c_reversal: complex
    spread: float
    spread_reversal: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.forward and self.reversal


SAMPLE_ROUNDS = 3
SAMPLE_RADII = (0.5, 2.0)


def _sample_points(rng: np.random.Generator, count: int) -> np.ndarray:
    r = rng.uniform(*SAMPLE_RADII, size=count)
    theta = rng.uniform(0.0, 2 * np.pi, size=count)
    return r * np.exp(1j * theta)


def _determinant_ratios(
    L1: np.ndarray,
    L0: np.ndarray,
    P: MatrixPolynomial,
    needed: int,
    rng: np.random.Generator,
    tolerances: Tolerances,
) -> np.ndarray:
    floor = math.log(tolerances.determinant_floor)
    ratios: list[complex] = []
    for round_ in range(SAMPLE_ROUNDS):
        for z in _sample_points(rng, needed - len(ratios)):
            sign_p, log_p = np.linalg.slogdet(P.eval(z))
            if sign_p == 0 or not log_p > floor:
                continue
            sign_l, log_l = np.linalg.slogdet(z * L1 - L0)
            if sign_l == 0:
                ratios.append(0j)
                continue
            ratios.append(complex(np.exp(log_l - log_p) * sign_l / sign_p))
        if len(ratios) >= needed:
            return np.array(ratios)
        logger.debug(f"Sampling round {round_}: {len(ratios)} of {needed} usable points")
    raise SamplingException(
        f"Only {len(ratios)} of {needed} sample points had |det P(z)| above {tolerances.determinant_floor}"
    )


def _ratio_constant(ratios: np.ndarray, tolerances: Tolerances) -> tuple[bool, complex, float]:
    c = complex(np.mean(ratios))
    if not np.all(np.isfinite(ratios)) or c == 0 or np.any(ratios == 0):
        return False, c, math.inf
    spread = float(np.max(np.abs(ratios - c)) / abs(c))
    return spread <= tolerances.determinant_spread, c, spread


def verify_strong_linearization(
    L: Pencil,
    P: MatrixPolynomial,
    trials: Optional[int] = None,
    seed: int = 0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> StrongLinearizationReport:
    """
    Check det L(z) = c det P(z) and det revL(z) = c' det revP(z) for nonzero constants c, c'.

    Sample points are drawn from the annulus 1/2 <= |z| <= 2 with a seeded Philox
    generator; points where |det P(z)| falls below the determinant floor are discarded
    and replaced. Determinants are compared through their log-magnitudes.

    Args:
        L (Pencil): The candidate linearization.
        P (MatrixPolynomial): The polynomial.
        trials (Optional[int]): Number of sample points; at least n k + 1 are always used.
        seed (int): Seed of the sampling generator.
        tolerances (Tolerances): Supplies the determinant floor and spread.

    Returns:
        StrongLinearizationReport: Per-check flags and the estimated constants.

    Raises:
        InvalidArgumentException: If the pencil size is not n k.
        SamplingException: If too few sample points are usable after resampling.
    """
    if L.m != P.n * P.k:
        raise InvalidArgumentException(f"Pencil size {L.m} does not match n*k = {P.n * P.k}")
    needed = max(trials or 0, P.n * P.k + 1)
    rng = np.random.Generator(np.random.Philox(seed))

    ratios = _determinant_ratios(L.L1, L.L0, P, needed, rng, tolerances)
    forward, c, spread = _ratio_constant(ratios, tolerances)

    rev = L.reversal()
    rev_ratios = _determinant_ratios(rev.L1, rev.L0, P.reversal(), needed, rng, tolerances)
    reversal, c_rev, spread_rev = _ratio_constant(rev_ratios, tolerances)

    logger.debug(
        f"Strong linearization check of {L}: forward={forward} (c={c}, spread={spread}), "
        f"reversal={reversal} (c={c_rev}, spread={spread_rev}), samples={needed}"
    )
    return StrongLinearizationReport(forward, reversal, c, c_rev, spread, spread_rev, needed)
