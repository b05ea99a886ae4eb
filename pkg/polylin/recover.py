import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .bases import LinearizationKind, linearization_directory
from .exceptions import ExtractionFailedException, IndexRangeException, InvalidGradeException
from .linearize import structural_matrices
from .matpoly import MatrixPolynomial

logger = logging.getLogger(__name__)

EXTRACTION_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class EigenTriple:
    """A finite eigenvalue with unit-norm right and left eigenvectors of a matrix polynomial."""

    delta: complex
    x: np.ndarray
    y: np.ndarray
    residual_right: float = 0.0
    residual_left: float = 0.0
    flagged_zero: bool = False

    @classmethod
    def normalized(cls, delta: complex, x, y, **kwargs) -> "EigenTriple":
        """Build a triple with x and y scaled to unit 2-norm."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return cls(complex(delta), x / linalg.norm(x), y / linalg.norm(y), **kwargs)


def delta_vector(P: MatrixPolynomial, z: complex) -> np.ndarray:
    """
    The kn x n block column Delta(z) with T_P(z) Delta(z) = e_k (x) P(z).

    Blocks from the top: z^r I, z^r P_(k-2r)(z) for r = (k-1)/2 down to 1, then I.

    Args:
        P (MatrixPolynomial): A polynomial of odd grade.
        z (complex): The evaluation point.

    Returns:
        np.ndarray: The kn x n matrix Delta(z).

    Raises:
        InvalidGradeException: If k is even.
    """
    n, k = P.n, P.k
    if k % 2 == 0:
        raise InvalidGradeException(f"Delta(z) needs odd k, got k={k}")
    eye = np.eye(n, dtype=complex)
    blocks = []
    for r in range((k - 1) // 2, 0, -1):
        zr = z**r
        blocks.append(zr * eye)
        blocks.append(zr * P.horner_shift(k - 2 * r, z))
    blocks.append(eye)
    return np.vstack(blocks)


def lambda_vector(z: complex, k: int) -> np.ndarray:
    """Return (z^(k-1), ..., z, 1)."""
    return np.array([z**p for p in range(k - 1, -1, -1)], dtype=complex)


def lift_to_T(P: MatrixPolynomial, triple: EigenTriple) -> tuple[np.ndarray, np.ndarray]:
    """
    Lift an eigentriple of P to right and left eigenvectors of T_P.

    The left vector w satisfies w^H = y^H Delta^B(delta), the block row of Delta; each
    block is conjugate-transposed, which is conj(Delta(delta)) y when the blocks are symmetric.

    Returns:
        tuple[np.ndarray, np.ndarray]: (Delta(delta) x, w).
    """
    n = P.n
    Delta = delta_vector(P, triple.delta)
    blocks = Delta.reshape(P.k, n, n)
    w = np.concatenate([b.conj().T @ triple.y for b in blocks])
    return Delta @ triple.x, w


def lift_to_R(P: MatrixPolynomial, triple: EigenTriple) -> tuple[np.ndarray, np.ndarray]:
    """Lift an eigentriple of P to R_P by applying S R to both vectors of the T_P lift."""
    R, S, _ = structural_matrices(P.k, P.n)
    z_right, z_left = lift_to_T(P, triple)
    SR = S @ R
    return SR @ z_right, SR @ z_left


def lift_to_DL(P: MatrixPolynomial, triple: EigenTriple) -> tuple[np.ndarray, np.ndarray]:
    """Lift an eigentriple of P to D_1 or D_k: (Lambda(delta) (x) x, conj(Lambda(delta)) (x) y)."""
    lam = lambda_vector(triple.delta, P.k)
    return np.kron(lam, triple.x), np.kron(lam.conj(), triple.y)


def lift_to_C1(P: MatrixPolynomial, triple: EigenTriple) -> tuple[np.ndarray, np.ndarray]:
    """
    Lift an eigentriple of P to the companion form C_1.

    The left vector is w = [I, P_1(delta), ..., P_(k-1)(delta)]^H y.

    Returns:
        tuple[np.ndarray, np.ndarray]: (Lambda(delta) (x) x, w).
    """
    lam = lambda_vector(triple.delta, P.k)
    w = np.concatenate(
        [triple.y] + [P.horner_shift(i, triple.delta).conj().T @ triple.y for i in range(1, P.k)]
    )
    return np.kron(lam, triple.x), w


def _block(z: np.ndarray, t: int, n: int) -> np.ndarray:
    """Return block t (1-based) of z, rejecting numerically zero blocks."""
    z = np.asarray(z)
    block = z[(t - 1) * n:t * n]
    if linalg.norm(block) <= EXTRACTION_FLOOR:
        logger.error(f"Extraction of block {t} failed: block is numerically zero")
        raise ExtractionFailedException(f"Block {t} of the eigenvector is numerically zero")
    logger.debug(f"Extracted block {t} of {len(z) // n}")
    return block


def extract_from_T(z: np.ndarray, delta: complex, n: int) -> np.ndarray:
    """
    Recover an eigenvector of P from one of T_P.

    Block 1 is used when |delta| > 1 and block k otherwise.

    Args:
        z (np.ndarray): The kn-vector.
        delta (complex): The eigenvalue.
        n (int): The block size.

    Returns:
        np.ndarray: The unnormalized n-vector.

    Raises:
        InvalidGradeException: If the number of blocks is even.
        ExtractionFailedException: If the chosen block is numerically zero.
    """
    k = len(z) // n
    if k % 2 == 0:
        raise InvalidGradeException(f"T_P eigenvectors have an odd number of blocks, got {k}")
    return _block(z, 1 if abs(delta) > 1 else k, n)


def extract_from_R(z: np.ndarray, delta: complex, n: int) -> np.ndarray:
    """Recover an eigenvector of P from one of R_P by undoing S R, up to sign."""
    k = len(z) // n
    R, S, _ = structural_matrices(k, n)
    return extract_from_T(R @ S @ np.asarray(z), delta, n)


def extract_from_Dt(z: np.ndarray, t: int, n: int) -> np.ndarray:
    """
    Return block t of an eigenvector of D_t, t in {1, k}.

    Raises:
        IndexRangeException: If t is neither 1 nor k.
        ExtractionFailedException: If the block is numerically zero.
    """
    k = len(z) // n
    if t not in (1, k):
        raise IndexRangeException(f"t must be 1 or k={k}, got {t}")
    return _block(z, t, n)


def extract_from_C1_right(z: np.ndarray, delta: complex, n: int) -> np.ndarray:
    """Block 1 of a right eigenvector of C_1 if |delta| > 1, block k otherwise."""
    k = len(z) // n
    return _block(z, 1 if abs(delta) > 1 else k, n)


def extract_from_C1_left(w: np.ndarray, n: int) -> np.ndarray:
    """Block 1 of a left eigenvector of C_1."""
    return _block(w, 1, n)


@linearization_directory.register(LinearizationKind.T, "right")
@linearization_directory.register(LinearizationKind.T, "left")
def _recover_T(P: MatrixPolynomial, z: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_T(z, delta, P.n)


@linearization_directory.register(LinearizationKind.R, "right")
@linearization_directory.register(LinearizationKind.R, "left")
def _recover_R(P: MatrixPolynomial, z: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_R(z, delta, P.n)


@linearization_directory.register(LinearizationKind.D1, "right")
@linearization_directory.register(LinearizationKind.D1, "left")
def _recover_D1(P: MatrixPolynomial, z: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_Dt(z, 1, P.n)


@linearization_directory.register(LinearizationKind.Dk, "right")
@linearization_directory.register(LinearizationKind.Dk, "left")
def _recover_Dk(P: MatrixPolynomial, z: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_Dt(z, P.k, P.n)


@linearization_directory.register(LinearizationKind.C1, "right")
def _recover_C1_right(P: MatrixPolynomial, z: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_C1_right(z, delta, P.n)


@linearization_directory.register(LinearizationKind.C1, "left")
def _recover_C1_left(P: MatrixPolynomial, w: np.ndarray, delta: complex) -> np.ndarray:
    return extract_from_C1_left(w, P.n)


LIFTS = {
    LinearizationKind.T: lift_to_T,
    LinearizationKind.R: lift_to_R,
    LinearizationKind.D1: lift_to_DL,
    LinearizationKind.Dk: lift_to_DL,
    LinearizationKind.C1: lift_to_C1,
}


def lift(P: MatrixPolynomial, triple: EigenTriple, kind: "LinearizationKind | str") -> tuple[np.ndarray, np.ndarray]:
    """Lift an eigentriple of P to the right and left eigenvectors of the pencil of the given kind."""
    return LIFTS[LinearizationKind.parse(kind)](P, triple)


def recover(
    P: MatrixPolynomial, kind: "LinearizationKind | str", z: np.ndarray, delta: complex, side: str = "right"
) -> np.ndarray:
    """Recover an unnormalized eigenvector of P from a pencil eigenvector through the linearization directory."""
    return linearization_directory[kind, side](P, z, delta)
