import logging
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Optional

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import InvalidArgumentException
from .matpoly import MatrixPolynomial

logger = logging.getLogger(__name__)


class LinearizationKind(str, Enum):
    """The pencil families this package builds."""

    T = "T"
    R = "R"
    D1 = "D1"
    Dk = "Dk"
    C1 = "C1"
    CUSTOM = "custom"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, value: "str | LinearizationKind") -> "LinearizationKind":
        """
        Resolve a kind from its name, case-insensitively ("dk" and "DK" both give Dk).

        Raises:
            InvalidArgumentException: If the name is unknown.
        """
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).strip().lower():
                return kind
        raise InvalidArgumentException(
            f"Unknown linearization {value!r}; expected one of {[k.value for k in cls]}"
        )


class LinearizationDirectory:
    """A registry of the builder and the eigenvector recovery rules of each linearization kind.

    Keys are ``(kind, role)`` pairs with role one of ``"build"``, ``"right"`` or ``"left"``.
    """

    ROLES = ("build", "right", "left")

    def __init__(self):
        """Initialize the LinearizationDirectory."""
        self._items: dict[tuple[LinearizationKind, str], Callable] = {}

    def register(self, kind: LinearizationKind, role: str) -> Callable[[Callable], Callable]:
        """
        Register a function under ``(kind, role)``; usable as a decorator.

        Args:
            kind (LinearizationKind): The linearization kind.
            role (str): One of ROLES.

        Returns:
            Callable: A decorator returning the function unchanged.
        """
        if role not in self.ROLES:
            raise ValueError(f"Role must be one of {self.ROLES}, got {role!r}")

        def decorator(func: Callable) -> Callable:
            logger.debug(f"Registering {func.__name__} for {kind}, {role}")
            self._items[LinearizationKind(kind), role] = func
            return func

        return decorator

    def kinds(self, role: str = "build") -> list[LinearizationKind]:
        """The kinds that have a function registered for ``role``."""
        return [kind for kind in LinearizationKind if (kind, role) in self._items]

    def __contains__(self, key) -> bool:
        kind, role = key
        return (LinearizationKind.parse(kind), role) in self._items

    def __getitem__(self, key) -> Callable:
        kind, role = key
        logger.debug(f"Looking up linearization function for: {kind}, {role}")
        try:
            kind = LinearizationKind.parse(kind)
        except InvalidArgumentException as e:
            logger.error(f"No linearization function found for {kind}, {role}")
            raise KeyError(f"No linearization function found for {kind}, {role}") from e
        func = self._items.get((kind, role))
        if func is not None:
            logger.debug(f"Found linearization function: {func.__name__}")
            return func
        logger.error(f"No linearization function found for {kind}, {role}")
        raise KeyError(f"No linearization function found for {kind}, {role}")


linearization_directory = LinearizationDirectory()


class Pencil:
    """A matrix pencil L(z) = z L1 - L0 of size m = n k linearizing an n x n polynomial of grade k."""

    def __init__(
        self,
        L1: ArrayLike,
        L0: ArrayLike,
        kind: "LinearizationKind | str" = LinearizationKind.CUSTOM,
        n: Optional[int] = None,
        k: Optional[int] = None,
    ):
        """
        Initialize a Pencil.

        Args:
            L1 (ArrayLike): The leading m x m matrix.
            L0 (ArrayLike): The trailing m x m matrix.
            kind (LinearizationKind | str): The construction the pencil came from.
            n (Optional[int]): Dimension of the source polynomial; defaults to m.
            k (Optional[int]): Grade of the source polynomial; defaults to 1.

        Raises:
            InvalidArgumentException: If the matrices are not square of equal size or m != n k.
        """
        L1 = np.array(L1, dtype=complex)
        L0 = np.array(L0, dtype=complex)
        if L1.ndim != 2 or L1.shape[0] != L1.shape[1] or L1.shape != L0.shape:
            raise InvalidArgumentException(
                f"Pencil matrices must be square of equal size, got {L1.shape} and {L0.shape}"
            )
        m = L1.shape[0]
        n = m if n is None else n
        k = 1 if k is None else k
        if n * k != m:
            raise InvalidArgumentException(f"Pencil size {m} does not equal n*k = {n}*{k}")
        L1.setflags(write=False)
        L0.setflags(write=False)
        self._L1 = L1
        self._L0 = L0
        self._kind = LinearizationKind.parse(kind)
        self._n = n
        self._k = k

    def __str__(self) -> str:
        """Return a string representation of the Pencil."""
        return f"<Pencil(kind={self.kind}, n={self.n}, k={self.k})>"

    def __repr__(self) -> str:
        return str(self)

    @property
    def L1(self) -> np.ndarray:
        return self._L1

    @property
    def L0(self) -> np.ndarray:
        return self._L0

    @property
    def kind(self) -> LinearizationKind:
        return self._kind

    @property
    def n(self) -> int:
        return self._n

    @property
    def k(self) -> int:
        return self._k

    @property
    def m(self) -> int:
        """The pencil size n k."""
        return self._L1.shape[0]

    @property
    def is_hermitian(self) -> bool:
        """True if L1 and L0 are both exactly Hermitian."""
        return np.array_equal(self._L1, self._L1.conj().T) and np.array_equal(
            self._L0, self._L0.conj().T
        )

    def eval(self, z: complex) -> np.ndarray:
        """Return the m x m matrix z L1 - L0."""
        return z * self._L1 - self._L0

    def reversal(self) -> "Pencil":
        """Return rev L(z) = z L(1/z) = L1 - z L0, i.e. the pencil (-L0, -L1)."""
        return Pencil(-self._L0, -self._L1, kind=LinearizationKind.CUSTOM, n=self._n, k=self._k)

    @cached_property
    def as_polynomial(self) -> MatrixPolynomial:
        """The pencil viewed as the grade-1 matrix polynomial -L0 + z L1."""
        return MatrixPolynomial([-self._L0, self._L1])

    @cached_property
    def norms(self) -> tuple[float, float]:
        """(||L1||_2, ||L0||_2)."""
        w0, w1 = self.as_polynomial.coeff_norms
        return float(w1), float(w0)

    def to_dict(self) -> dict[str, Any]:
        """Return the pencil fields as plain Python values (matrices stay numpy arrays)."""
        return {
            "m": self.m,
            "kind": self.kind.value,
            "n": self.n,
            "k": self.k,
            "L1": self._L1,
            "L0": self._L0,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Pencil":
        """
        Create a Pencil from a dictionary as produced by ``to_dict``.

        Raises:
            InvalidArgumentException: If the declared size disagrees with the matrices.
        """
        pencil = cls(data["L1"], data["L0"], kind=data.get("kind", "custom"), n=data.get("n"), k=data.get("k"))
        if "m" in data and int(data["m"]) != pencil.m:
            raise InvalidArgumentException(f"Declared m={data['m']} but matrices have size {pencil.m}")
        return pencil
