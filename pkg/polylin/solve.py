import logging
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy
from scipy import linalg
from scipy.stats import unitary_group

from .bases import LinearizationKind, Pencil
from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import (
    InvalidArgumentException,
    RepeatedRootsException,
    SingularPencilException,
    SolverBackendException,
)
from .linearize import build
from .matpoly import MatrixPolynomial
from .metrics import backward_error_left, backward_error_right
from .recover import EigenTriple, recover

logger = logging.getLogger(__name__)

# LAPACK ggev through scipy is not documented as reentrant.
_BACKEND_LOCK = threading.Lock()

REGULARITY_SEED = 0
REGULARITY_POINTS = 3


def _eigen_order(delta: complex) -> tuple[float, float]:
    return abs(delta), float(np.angle(delta))


@dataclass(frozen=True, eq=False)
class PencilEigenResult:
    """Finite eigentriples of a pencil (delta, z_right, z_left) plus the number of infinite eigenvalues."""

    finite: tuple[tuple[complex, np.ndarray, np.ndarray], ...]
    infinite_count: int
    backend_info: str

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([delta for delta, _, _ in self.finite], dtype=complex)


def _check_regular(L: Pencil) -> None:
    rng = np.random.Generator(np.random.Philox(REGULARITY_SEED))
    points = rng.uniform(0.5, 2.0, REGULARITY_POINTS) * np.exp(1j * rng.uniform(0, 2 * np.pi, REGULARITY_POINTS))
    norm_L1, norm_L0 = L.norms
    eps = np.finfo(float).eps
    for z in points:
        smallest = linalg.svdvals(L.eval(z))[-1]
        if smallest > L.m * eps * (abs(z) * norm_L1 + norm_L0):
            return
    logger.error(f"{L} is rank deficient at every sample point")
    raise SingularPencilException(f"{L} is singular: rank deficient at {REGULARITY_POINTS} sample points")


def solve_pencil(L: Pencil, require_regular: bool = True) -> PencilEigenResult:
    """
    Solve the generalized eigenproblem L0 v = delta L1 v by the QZ algorithm.

    Eigenvalues come back in homogeneous form alpha/beta; |beta| <= m eps ||L1||_2 counts
    as infinite. Finite eigentriples are ordered by modulus and then phase, with unit-norm
    right eigenvectors z and left eigenvectors w satisfying w^H (delta L1 - L0) = 0.

    Args:
        L (Pencil): The pencil.
        require_regular (bool): Reject pencils that are rank deficient at every sample point.

    Returns:
        PencilEigenResult: The finite eigentriples and the infinite count.

    Raises:
        SingularPencilException: If the pencil is singular and require_regular is set.
        SolverBackendException: If LAPACK fails.
    """
    if require_regular:
        _check_regular(L)
    logger.debug(f"Solving {L} by QZ")
    try:
        with _BACKEND_LOCK:
            w, vl, vr = linalg.eig(L.L0, L.L1, left=True, right=True, homogeneous_eigvals=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise SolverBackendException(f"QZ failed for {L}: {str(e)}") from e

    alpha, beta = w[0], w[1]
    norm_L1, _ = L.norms
    threshold = L.m * np.finfo(float).eps * norm_L1
    finite = []
    infinite = 0
    for i in range(L.m):
        if abs(beta[i]) <= threshold:
            infinite += 1
            continue
        z = vr[:, i] / linalg.norm(vr[:, i])
        v = vl[:, i] / linalg.norm(vl[:, i])
        finite.append((complex(alpha[i] / beta[i]), z, v))
    finite.sort(key=lambda item: _eigen_order(item[0]))
    logger.debug(f"{L}: {len(finite)} finite and {infinite} infinite eigenvalues")
    return PencilEigenResult(tuple(finite), infinite, f"scipy.linalg.eig (LAPACK ggev), scipy {scipy.__version__}")


def check_residual_contract(
    L: Pencil, result: PencilEigenResult, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> list[int]:
    """
    Indices of finite eigentriples whose residual exceeds c m eps (|delta| ||L1|| + ||L0||) ||z||.

    c is ``tolerances.residual_factor``; both the right and the left residual are checked.
    """
    norm_L1, norm_L0 = L.norms
    eps = np.finfo(float).eps
    violations = []
    for i, (delta, z, w) in enumerate(result.finite):
        M = L.eval(delta)
        limit = tolerances.residual_factor * L.m * eps * (abs(delta) * norm_L1 + norm_L0)
        right = linalg.norm(M @ z) / linalg.norm(z)
        left = linalg.norm(M.conj().T @ w) / linalg.norm(w)
        if right > limit or left > limit:
            logger.warning(f"Residual contract exceeded at delta={delta}: right {right:.3e}, left {left:.3e}, limit {limit:.3e}")
            violations.append(i)
    return violations


def refine_eigenvectors(P: MatrixPolynomial, delta: complex) -> tuple[np.ndarray, np.ndarray]:
    """
    The right and left singular vectors of P(delta) for its smallest singular value.

    Returns:
        tuple[np.ndarray, np.ndarray]: Unit vectors (x, y) minimizing ||P(delta) x|| and ||y^H P(delta)||.
    """
    U, _, Vh = linalg.svd(P.eval(delta))
    return Vh[-1].conj(), U[:, -1]


@dataclass(frozen=True, eq=False)
class LinearizedSolution:
    """A polynomial eigenproblem solved through one linearization."""

    pencil: Pencil
    result: PencilEigenResult
    triples: tuple[EigenTriple, ...]


def polyeig_detailed(
    P: MatrixPolynomial,
    kind: "LinearizationKind | str" = LinearizationKind.C1,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> LinearizedSolution:
    """
    Solve P(delta) x = 0 through the linearization of the given kind, keeping the pencil data.

    Each pencil eigenvector is mapped back to P with the recovery rule of its kind and
    normalized. Eigenvalues with |delta| < zero_eigenvalue max|delta| are kept but flagged.

    Raises:
        InvalidGradeException: If the kind does not support the grade of P.
        SingularPencilException: If the pencil is singular.
        ExtractionFailedException: If a recovered block is numerically zero.
    """
    L = build(P, kind)
    result = solve_pencil(L)
    violations = check_residual_contract(L, result, tolerances)
    if violations:
        logger.warning(f"{len(violations)} eigentriples of {L} exceed the residual contract")
    moduli = [abs(delta) for delta, _, _ in result.finite]
    top = max(moduli, default=0.0)
    triples = []
    for delta, z, w in result.finite:
        x = recover(P, L.kind, z, delta, "right")
        y = recover(P, L.kind, w, delta, "left")
        x = x / linalg.norm(x)
        y = y / linalg.norm(y)
        triples.append(
            EigenTriple(
                delta,
                x,
                y,
                residual_right=backward_error_right(P, x, delta),
                residual_left=backward_error_left(P, y, delta),
                flagged_zero=abs(delta) < tolerances.zero_eigenvalue * top,
            )
        )
    logger.info(f"Solved {P} through {L.kind}: {len(triples)} finite eigenvalues")
    return LinearizedSolution(L, result, tuple(triples))


def polyeig(
    P: MatrixPolynomial,
    kind: "LinearizationKind | str" = LinearizationKind.C1,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> list[EigenTriple]:
    """
    Solve the polynomial eigenvalue problem through a linearization.

    Args:
        P (MatrixPolynomial): A regular polynomial.
        kind (LinearizationKind | str): T, R, D1, Dk or C1.
        tolerances (Tolerances): Tolerance knobs.

    Returns:
        list[EigenTriple]: Finite eigentriples ordered by modulus then phase, residual fields
        holding the right and left backward errors.
    """
    return list(polyeig_detailed(P, kind, tolerances).triples)


def _haar_unitary(n: int, seed: int) -> np.ndarray:
    if n == 1:
        return np.eye(1, dtype=complex)
    return unitary_group.rvs(n, random_state=np.random.Generator(np.random.Philox(seed)))


def oracle_problem(
    n: int, k: int, roots: Sequence[complex], seed: int, hermitian: bool = False
) -> tuple[MatrixPolynomial, list[EigenTriple]]:
    """
    A polynomial with prescribed spectrum and exact eigenvectors.

    P(z) = Q^H diag(p_1(z), ..., p_n(z)) Q, where Q is a seeded Haar unitary and p_j is the
    monic polynomial whose roots are roots[j], roots[j + n], roots[j + 2n], ...

    Args:
        n (int): Matrix dimension.
        k (int): Grade.
        roots (Sequence[complex]): k n distinct nonzero roots.
        seed (int): Seed of the unitary.
        hermitian (bool): Build Hermitian coefficients; each p_j must then have real coefficients.

    Returns:
        tuple[MatrixPolynomial, list[EigenTriple]]: P and its eigentriples (root, Q^H e_j, Q^H e_j),
        ordered by modulus then phase.

    Raises:
        InvalidArgumentException: If the number of roots is not k n.
        RepeatedRootsException: If roots repeat, vanish, or a block is not closed under conjugation.
    """
    roots = np.asarray(roots, dtype=complex)
    if n < 1 or k < 1 or roots.shape != (n * k,):
        raise InvalidArgumentException(f"Need exactly k*n = {k * n} roots, got {roots.shape}")
    scale = float(np.max(np.abs(roots)))
    if np.any(roots == 0):
        raise RepeatedRootsException("Oracle roots must be nonzero")
    gaps = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) <= 1e-12 * scale:
        raise RepeatedRootsException("Oracle roots must be distinct")

    blocks = [roots[j::n] for j in range(n)]
    coeffs = np.array([np.poly(b)[::-1] for b in blocks])
    if hermitian:
        bad = np.abs(coeffs.imag) > 1e-12 * np.maximum(1.0, np.abs(coeffs.real))
        if np.any(bad):
            raise RepeatedRootsException("Hermitian oracle needs every root block closed under conjugation")
        coeffs = coeffs.real.astype(complex)

    Q = _haar_unitary(n, seed)
    A = []
    for i in range(k + 1):
        Ai = Q.conj().T @ np.diag(coeffs[:, i]) @ Q
        if hermitian:
            Ai = (Ai + Ai.conj().T) / 2
        A.append(Ai)
    P = MatrixPolynomial(A)

    triples = []
    for j, block in enumerate(blocks):
        v = Q.conj().T[:, j]
        for delta in block:
            triples.append(EigenTriple(complex(delta), v.copy(), v.copy()))
    triples.sort(key=lambda t: _eigen_order(t.delta))
    logger.debug(f"Built oracle problem n={n}, k={k}, seed={seed}, hermitian={hermitian}")
    return P, triples
