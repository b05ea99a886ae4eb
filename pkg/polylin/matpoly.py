import logging
from functools import cached_property
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from .exceptions import (
    IndexRangeException,
    InvalidArgumentException,
    ZeroPolynomialException,
)

logger = logging.getLogger(__name__)


class MatrixPolynomial:
    """An n x n complex matrix polynomial P(z) = A_0 + z A_1 + ... + z^k A_k of grade k.

    Coefficients are stored in ascending powers and are read-only; every
    operation returns new arrays or a new polynomial.
    """

    def __init__(self, coeffs: Sequence[ArrayLike]):
        """
        Initialize a MatrixPolynomial.

        Args:
            coeffs (Sequence[ArrayLike]): The k+1 coefficients A_0, ..., A_k, each n x n.
                Scalars are accepted as 1 x 1 coefficients.

        Raises:
            InvalidArgumentException: If no coefficient is given or shapes disagree.
        """
        if len(coeffs) == 0:
            raise InvalidArgumentException("A matrix polynomial needs at least one coefficient")
        arrays = []
        for i, c in enumerate(coeffs):
            a = np.array(np.atleast_2d(c), dtype=complex)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise InvalidArgumentException(f"Coefficient A_{i} is not square: shape {a.shape}")
            a.setflags(write=False)
            arrays.append(a)
        n = arrays[0].shape[0]
        for i, a in enumerate(arrays):
            if a.shape != (n, n):
                raise InvalidArgumentException(
                    f"Coefficient A_{i} has shape {a.shape}, expected {(n, n)}"
                )
        self._coeffs = tuple(arrays)

    def __str__(self) -> str:
        """Return a string representation of the MatrixPolynomial."""
        return f"<MatrixPolynomial(n={self.n}, k={self.k})>"

    def __repr__(self) -> str:
        return str(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return self.k == other.k and self.n == other.n and all(
            np.array_equal(a, b) for a, b in zip(self._coeffs, other._coeffs)
        )

    __hash__ = None

    @property
    def coeffs(self) -> tuple[np.ndarray, ...]:
        """The coefficients A_0, ..., A_k."""
        return self._coeffs

    @property
    def n(self) -> int:
        """The matrix dimension."""
        return self._coeffs[0].shape[0]

    @property
    def k(self) -> int:
        """The grade."""
        return len(self._coeffs) - 1

    @property
    def degree(self) -> int:
        """The largest i with A_i != 0, or -1 for the zero polynomial."""
        for i in range(self.k, -1, -1):
            if np.any(self._coeffs[i]):
                return i
        return -1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    @property
    def is_hermitian(self) -> bool:
        """True if every coefficient equals its conjugate transpose exactly."""
        return all(np.array_equal(a, a.conj().T) for a in self._coeffs)

    @cached_property
    def coeff_norms(self) -> np.ndarray:
        """
        The natural weights ||A_i||_2, i = 0..k.

        Each spectral norm is the largest singular value from a full SVD.

        Returns:
            np.ndarray: A read-only array of k+1 nonnegative reals.
        """
        norms = np.array([linalg.svdvals(a)[0] for a in self._coeffs])
        norms.setflags(write=False)
        logger.debug(f"Coefficient norms of {self}: {norms}")
        return norms

    @property
    def max_norm(self) -> float:
        """max_i ||A_i||_2."""
        return float(np.max(self.coeff_norms))

    def eval(self, z: complex) -> np.ndarray:
        """
        Evaluate P(z) by the Horner recurrence.

        Args:
            z (complex): The evaluation point.

        Returns:
            np.ndarray: The n x n matrix P(z).
        """
        acc = np.array(self._coeffs[-1])
        for a in reversed(self._coeffs[:-1]):
            acc = acc * z + a
        return acc

    def eval_derivative(self, z: complex) -> np.ndarray:
        """
        Evaluate P'(z) = sum_i i A_i z^(i-1) by the Horner recurrence.

        Args:
            z (complex): The evaluation point.

        Returns:
            np.ndarray: The n x n matrix P'(z); zero for k = 0.
        """
        if self.k == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        acc = self.k * np.array(self._coeffs[-1])
        for i in range(self.k - 1, 0, -1):
            acc = acc * z + i * self._coeffs[i]
        return acc

    def _check_index(self, i: int) -> None:
        if not 0 <= i <= self.k:
            raise IndexRangeException(f"Index {i} outside 0..{self.k}")

    def horner_shift(self, i: int, z: complex) -> np.ndarray:
        """
        Evaluate the i-th Horner shift P_i(z) = z^i A_k + ... + z A_(k-i+1) + A_(k-i).

        Args:
            i (int): The shift index, 0 <= i <= k.
            z (complex): The evaluation point.

        Returns:
            np.ndarray: The n x n matrix P_i(z).

        Raises:
            IndexRangeException: If i is out of range.
        """
        self._check_index(i)
        acc = np.array(self._coeffs[self.k])
        for j in range(1, i + 1):
            acc = acc * z + self._coeffs[self.k - j]
        return acc

    def lower_truncation(self, i: int, z: complex) -> np.ndarray:
        """
        Evaluate the degree-i truncation P^i(z) = z^i A_i + ... + z A_1 + A_0.

        Args:
            i (int): The truncation index, 0 <= i <= k.
            z (complex): The evaluation point.

        Returns:
            np.ndarray: The n x n matrix P^i(z).

        Raises:
            IndexRangeException: If i is out of range.
        """
        self._check_index(i)
        acc = np.array(self._coeffs[i])
        for a in reversed(self._coeffs[:i]):
            acc = acc * z + a
        return acc

    def reversal(self) -> "MatrixPolynomial":
        """Return rev P(z) = z^k P(1/z), i.e. the coefficients in reverse order at grade k."""
        return MatrixPolynomial(self._coeffs[::-1])

    def conjugate_transpose(self) -> "MatrixPolynomial":
        """Return P*(z) = sum_i A_i^H z^i."""
        return MatrixPolynomial([a.conj().T for a in self._coeffs])

    def scale(self, spec) -> "MatrixPolynomial":
        """
        Apply the eigenvalue-parameter scaling beta * P(gamma * mu).

        An eigenvalue delta of P becomes delta / gamma with unchanged eigenvectors.

        Args:
            spec (ScalingSpec): The scaling parameters.

        Returns:
            MatrixPolynomial: The scaled polynomial with coefficients beta gamma^i A_i.
        """
        beta, gamma = complex(spec.beta), complex(spec.gamma)
        logger.debug(f"Scaling {self} with beta={beta}, gamma={gamma} ({spec.provenance})")
        return MatrixPolynomial([beta * gamma**i * a for i, a in enumerate(self._coeffs)])

    def deflate_zero_root(self) -> tuple[int, "MatrixPolynomial"]:
        """
        Factor P(z) = z^s P_1(z) with P_1 having a nonzero constant term.

        Returns:
            tuple[int, MatrixPolynomial]: s and P_1 (grade k - s).

        Raises:
            ZeroPolynomialException: If P is the zero polynomial.
        """
        for s, a in enumerate(self._coeffs):
            if np.any(a):
                return s, MatrixPolynomial(self._coeffs[s:])
        raise ZeroPolynomialException("Cannot deflate the zero polynomial")


RANDOM_ENTRY_RANGE = (-50.0, 50.0)


def random_polynomial(n: int, k: int, seed: int, hermitian: bool = False) -> MatrixPolynomial:
    """
    Draw a real random matrix polynomial with i.i.d. entries uniform on [-50, 50).

    The generator is numpy's Philox (a counter-based 64-bit generator), so the same
    (n, k, seed) gives bit-identical coefficients on every platform.

    Args:
        n (int): Matrix dimension, at least 1.
        k (int): Grade, at least 1.
        seed (int): Nonnegative seed.
        hermitian (bool): If True, symmetrize each coefficient as (A + A^T) / 2.

    Returns:
        MatrixPolynomial: The random polynomial.

    Raises:
        InvalidArgumentException: If n < 1, k < 1 or seed < 0.
    """
    if n < 1 or k < 1:
        raise InvalidArgumentException(f"Need n >= 1 and k >= 1, got n={n}, k={k}")
    if seed < 0:
        raise InvalidArgumentException(f"Seed must be nonnegative, got {seed}")
    rng = np.random.Generator(np.random.Philox(seed))
    low, high = RANDOM_ENTRY_RANGE
    coeffs = rng.uniform(low, high, size=(k + 1, n, n))
    if hermitian:
        coeffs = (coeffs + coeffs.transpose(0, 2, 1)) / 2
    logger.debug(f"Generated random polynomial n={n}, k={k}, seed={seed}, hermitian={hermitian}")
    return MatrixPolynomial(list(coeffs))
