import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import InvalidArgumentException, ZeroPolynomialException
from .matpoly import MatrixPolynomial

logger = logging.getLogger(__name__)


class ScalingProvenance(str, Enum):
    MAX_NORM = "max_norm"
    TROPICAL = "tropical"
    USER = "user"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ScalingSpec:
    """Eigenvalue-parameter scaling P~(mu) = beta P(gamma mu), i.e. A~_i = beta gamma^i A_i."""

    beta: complex
    gamma: complex
    provenance: ScalingProvenance = ScalingProvenance.USER

    def __post_init__(self):
        for name in ("beta", "gamma"):
            value = complex(getattr(self, name))
            if value == 0 or not np.isfinite(value):
                raise InvalidArgumentException(f"Scaling parameter {name} must be finite and nonzero, got {value}")
        object.__setattr__(self, "provenance", ScalingProvenance(self.provenance))

    @classmethod
    def identity(cls) -> "ScalingSpec":
        return cls(1.0, 1.0, ScalingProvenance.USER)

    @property
    def is_identity(self) -> bool:
        return complex(self.beta) == 1 and complex(self.gamma) == 1

    def unscale_eigenvalue(self, mu: complex) -> complex:
        """Map an eigenvalue mu of the scaled polynomial back to delta = gamma mu."""
        return complex(self.gamma) * mu

    def to_dict(self) -> dict:
        beta, gamma = complex(self.beta), complex(self.gamma)
        return {
            "beta": [beta.real, beta.imag],
            "gamma": [gamma.real, gamma.imag],
            "provenance": self.provenance.value,
        }


def max_norm_scaling(P: MatrixPolynomial) -> ScalingSpec:
    """
    Scale every coefficient by 1 / max_i ||A_i||_2, leaving the eigenvalues unchanged.

    Args:
        P (MatrixPolynomial): The polynomial to scale.

    Returns:
        ScalingSpec: (1 / max_i ||A_i||_2, 1, max_norm).

    Raises:
        ZeroPolynomialException: If every coefficient is zero.
    """
    top = P.max_norm
    if top == 0:
        raise ZeroPolynomialException("Max-norm scaling of the zero polynomial")
    logger.debug(f"Max-norm scaling of {P}: max norm {top}")
    return ScalingSpec(1.0 / top, 1.0, ScalingProvenance.MAX_NORM)


def _cross(o: tuple[int, float], a: tuple[int, float], b: tuple[int, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(norms) -> list[tuple[int, float]]:
    """
    Upper convex hull of the points (i, log w_i) over the nonzero weights.

    Collinear interior points are dropped, so consecutive vertices have strictly
    decreasing slopes.

    Args:
        norms: The weights w_0, ..., w_k.

    Returns:
        list[tuple[int, float]]: The hull vertices ordered by increasing i.
    """
    points = [(i, math.log(w)) for i, w in enumerate(norms) if w > 0]
    hull: list[tuple[int, float]] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return hull


def tropical_scalings(P: MatrixPolynomial) -> list[ScalingSpec]:
    """
    Scalings built from the tropical roots of t(x) = max_i ||A_i||_2 x^i.

    Each edge of the Newton polygon between vertices (i1, l1) and (i2, l2) gives a
    tropical root gamma = exp((l1 - l2) / (i2 - i1)) and beta = 1 / t(gamma).

    Args:
        P (MatrixPolynomial): The polynomial.

    Returns:
        list[ScalingSpec]: One spec per tropical root, sorted by gamma ascending.

    Raises:
        ZeroPolynomialException: If every coefficient norm is zero.
    """
    norms = np.asarray(P.coeff_norms, dtype=float)
    if not np.any(norms > 0):
        raise ZeroPolynomialException("Tropical scaling of the zero polynomial")
    if norms[0] == 0 or norms[-1] == 0:
        logger.warning(f"Tropical scaling of {P} with a zero end coefficient; the hull omits it")
    hull = newton_polygon(norms)
    if len(hull) == 1:
        (i, ell), = hull
        logger.warning(f"Degenerate tropical hull for {P}: only A_{i} is nonzero, using gamma = 1")
        return [ScalingSpec(1.0 / math.exp(ell), 1.0, ScalingProvenance.TROPICAL)]

    specs = []
    powers = np.arange(len(norms))
    for (i1, l1), (i2, l2) in zip(hull, hull[1:]):
        gamma = math.exp((l1 - l2) / (i2 - i1))
        t = float(np.max(norms * gamma**powers))
        specs.append(ScalingSpec(1.0 / t, gamma, ScalingProvenance.TROPICAL))
    specs.sort(key=lambda s: complex(s.gamma).real)
    logger.debug(f"Tropical scalings of {P}: {[(s.beta, s.gamma) for s in specs]}")
    return specs
