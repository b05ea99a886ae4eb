import dataclasses
import logging
import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .exceptions import InvalidArgumentException

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerance knobs shared by the metrics, solver and experiment driver.

    Every field can be overridden from the environment with ``POLYLIN_<FIELD>``
    (upper case), e.g. ``POLYLIN_BOUND_REL=1e-8``.
    """

    ENV_PREFIX = "POLYLIN_"

    bound_rel: float = 1e-10
    zero_eigenvalue: float = 1e-12
    simple_eigenvalue: float = 1e-12
    singular_coefficient_cond: float = 1e12
    residual_factor: float = 100.0
    unit_circle: float = 1e-12
    determinant_floor: float = 1e-250
    determinant_spread: float = 1e-8
    bound_scale: float = 1.0

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Tolerances":
        """
        Build tolerances from defaults overridden by ``POLYLIN_*`` environment variables.

        Args:
            environ (Optional[Mapping[str, str]]): The environment to read; defaults to os.environ.

        Returns:
            Tolerances: The resulting tolerances.

        Raises:
            InvalidArgumentException: If a variable does not parse as a positive float.
        """
        environ = os.environ if environ is None else environ
        values = {}
        for field in dataclasses.fields(cls):
            key = f"{cls.ENV_PREFIX}{field.name.upper()}"
            if key not in environ:
                continue
            raw = environ[key]
            try:
                value = float(raw)
            except ValueError as e:
                raise InvalidArgumentException(f"{key}={raw!r} is not a number") from e
            if not value > 0:
                raise InvalidArgumentException(f"{key} must be positive, got {value}")
            logger.debug(f"Tolerance override from environment: {field.name}={value}")
            values[field.name] = value
        return cls(**values)

    def override(self, **kwargs: float) -> "Tolerances":
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **kwargs)


DEFAULT_TOLERANCES = Tolerances()
