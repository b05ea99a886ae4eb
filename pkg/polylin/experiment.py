import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from scipy import linalg

from .bases import LinearizationKind
from .config import Tolerances
from .exceptions import (
    ExcludedEigenvalueException,
    ExtractionFailedException,
    InvalidArgumentException,
    InvalidGradeException,
    NonSimpleEigenvalueException,
    PolylinException,
)
from .matpoly import MatrixPolynomial, random_polynomial
from .metrics import diagnose
from .mpjson import load_polynomial
from .report import DiagnosticsRow, DiagnosticsTable
from .scaling import ScalingSpec, max_norm_scaling, tropical_scalings
from .solve import LinearizedSolution, polyeig_detailed, refine_eigenvectors

logger = logging.getLogger(__name__)

ALL_LINEARIZATIONS = (
    LinearizationKind.T,
    LinearizationKind.R,
    LinearizationKind.D1,
    LinearizationKind.Dk,
    LinearizationKind.C1,
)


def parse_linearizations(text: str) -> tuple[LinearizationKind, ...]:
    """Parse a comma-separated list such as ``"T,R,C1"``, keeping order and dropping repeats."""
    kinds: list[LinearizationKind] = []
    for item in text.split(","):
        if not item.strip():
            continue
        kind = LinearizationKind.parse(item)
        if kind is LinearizationKind.CUSTOM:
            raise InvalidArgumentException("The custom kind cannot be requested as a linearization")
        if kind not in kinds:
            kinds.append(kind)
    if not kinds:
        raise InvalidArgumentException("At least one linearization is required")
    return tuple(kinds)


def parse_scaling(text: str) -> tuple[str, Optional[int], Optional[ScalingSpec]]:
    """
    Parse a scaling option.

    Accepted forms are ``none``, ``maxnorm``, ``tropical:<j>`` (0-based, ascending gamma)
    and ``user:<beta>,<gamma>`` where beta and gamma are Python complex literals.

    Returns:
        tuple[str, Optional[int], Optional[ScalingSpec]]: The mode, the tropical index and the
        user spec.

    Raises:
        InvalidArgumentException: If the text is malformed.
    """
    text = (text or "none").strip()
    mode, _, arg = text.partition(":")
    mode = mode.lower()
    if mode in ("none", "maxnorm") and not arg:
        return mode, None, None
    if mode == "tropical":
        try:
            index = int(arg) if arg else 0
        except ValueError as e:
            raise InvalidArgumentException(f"Invalid tropical index in {text!r}") from e
        if index < 0:
            raise InvalidArgumentException(f"Tropical index must be nonnegative, got {index}")
        return mode, index, None
    if mode == "user":
        try:
            beta, gamma = (complex(part.strip()) for part in arg.split(","))
        except ValueError as e:
            raise InvalidArgumentException(f"Expected user:<beta>,<gamma>, got {text!r}") from e
        return mode, None, ScalingSpec(beta, gamma)
    raise InvalidArgumentException(f"Unknown scaling {text!r}; expected none, maxnorm, tropical:<j> or user:<beta>,<gamma>")


def resolve_scaling(text: str, P: MatrixPolynomial) -> Optional[ScalingSpec]:
    """The ScalingSpec a scaling option selects for P, or None for ``none``."""
    mode, index, spec = parse_scaling(text)
    if mode == "none":
        return None
    if mode == "maxnorm":
        return max_norm_scaling(P)
    if mode == "tropical":
        specs = tropical_scalings(P)
        if index >= len(specs):
            raise InvalidArgumentException(f"Tropical index {index} out of range: {len(specs)} tropical roots")
        return specs[index]
    return spec


@dataclass(frozen=True)
class ExperimentConfig:
    """Where the problem comes from, how it is scaled and which linearizations are compared."""

    n: Optional[int] = None
    k: Optional[int] = None
    seed: int = 0
    path: Optional[str] = None
    hermitian: bool = False
    scaling: str = "none"
    linearizations: tuple[LinearizationKind, ...] = ALL_LINEARIZATIONS
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.path is None and (self.n is None or self.k is None):
            raise InvalidArgumentException("A random problem needs n and k, otherwise give an input file")
        if not self.linearizations:
            raise InvalidArgumentException("At least one linearization is required")
        parse_scaling(self.scaling)
        if self.k is not None:
            self.check_grade(self.k)

    def check_grade(self, k: int) -> None:
        """Reject an even grade when T or R is selected."""
        needs_odd = {LinearizationKind.T, LinearizationKind.R} & set(self.linearizations)
        if needs_odd and (k % 2 == 0 or k < 3):
            raise InvalidGradeException(f"{', '.join(sorted(str(kind) for kind in needs_odd))} need odd k >= 3, got k={k}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "path": self.path,
            "hermitian": self.hermitian,
            "scaling": self.scaling,
            "linearizations": [kind.value for kind in self.linearizations],
        }


class Experiment:
    """Runs the linearization comparison pipeline for one problem."""

    def __init__(self, config: ExperimentConfig):
        """
        Initialize an Experiment.

        Args:
            config (ExperimentConfig): What to run.
        """
        self.config = config
        self._solutions: dict[LinearizationKind, LinearizedSolution] = {}

    def __str__(self) -> str:
        """Return a string representation of the Experiment."""
        source = self.config.path or f"random(n={self.config.n}, k={self.config.k}, seed={self.config.seed})"
        return f"<Experiment({source})>"

    @cached_property
    def problem(self) -> MatrixPolynomial:
        """The unscaled polynomial, generated or read from disk."""
        if self.config.path is not None:
            P, _ = load_polynomial(self.config.path)
            self.config.check_grade(P.k)
        else:
            P = random_polynomial(self.config.n, self.config.k, self.config.seed, hermitian=self.config.hermitian)
        logger.info(f"Problem loaded: {P}")
        return P

    @cached_property
    def scaling(self) -> Optional[ScalingSpec]:
        spec = resolve_scaling(self.config.scaling, self.problem)
        if spec is not None:
            logger.info(f"Scaling applied: beta={spec.beta}, gamma={spec.gamma} ({spec.provenance})")
        return spec

    @cached_property
    def scaled(self) -> MatrixPolynomial:
        """The polynomial whose linearizations are solved."""
        return self.problem if self.scaling is None else self.problem.scale(self.scaling)

    def solve(self, kind: LinearizationKind) -> LinearizedSolution:
        if kind not in self._solutions:
            self._solutions[kind] = polyeig_detailed(self.scaled, kind, self.config.tolerances)
        return self._solutions[kind]

    def _skip_reason(self, kind: LinearizationKind) -> Optional[str]:
        P = self.scaled
        index = {LinearizationKind.D1: 0, LinearizationKind.Dk: P.k}.get(kind)
        if index is None:
            return None
        s = linalg.svdvals(P.coeffs[index])
        if s[-1] == 0 or s[0] / s[-1] > self.config.tolerances.singular_coefficient_cond:
            return f"A_{index} is numerically singular, so {kind} is not a linearization"
        return None

    def _unscale(self, mu: complex) -> complex:
        return mu if self.scaling is None else self.scaling.unscale_eigenvalue(mu)

    def _rows_for(self, kind: LinearizationKind) -> list[DiagnosticsRow]:
        reason = self._skip_reason(kind)
        if reason is not None:
            logger.warning(f"Linearization {kind} skipped as N/A: {reason}")
            return [DiagnosticsRow.not_applicable(kind.value, reason)]

        solution = self.solve(kind)
        P, tol = self.scaled, self.config.tolerances
        rows = []
        for index, (triple, (mu, z, w)) in enumerate(zip(solution.triples, solution.result.finite), start=1):
            delta = self._unscale(mu)
            if triple.flagged_zero:
                logger.warning(f"{kind}: eigenvalue {delta} excluded as zero")
                rows.append(DiagnosticsRow.excluded_row(index, kind.value, delta, "zero eigenvalue"))
                continue
            x, y = refine_eigenvectors(P, mu)
            try:
                diagnostics = diagnose(P, solution.pencil, mu, z, w, x, y, tol)
            except (NonSimpleEigenvalueException, ExcludedEigenvalueException, ExtractionFailedException) as e:
                logger.warning(f"{kind}: eigenvalue {delta} excluded: {e.message}")
                rows.append(DiagnosticsRow.excluded_row(index, kind.value, delta, e.error_code))
                continue
            rows.append(DiagnosticsRow(index=index, lin=kind.value, delta=delta, diagnostics=diagnostics))
        return rows

    def ratios(self) -> DiagnosticsTable:
        """
        Diagnostics for every finite eigenvalue of every selected linearization.

        Eigenvalues are reported in the unscaled variable delta = gamma mu.

        Returns:
            DiagnosticsTable: The rows, with zero and non-simple eigenvalues marked excluded.

        Raises:
            ExcludedEigenvalueException: If no linearization produced a usable eigenvalue.
        """
        rows: list[DiagnosticsRow] = []
        for kind in self.config.linearizations:
            try:
                rows.extend(self._rows_for(kind))
            except PolylinException as e:
                logger.error(f"Linearization {kind} failed: {e}")
                raise
        if not any(row.diagnostics is not None for row in rows):
            raise ExcludedEigenvalueException("No finite nonzero simple eigenvalues to report")
        table = DiagnosticsTable(
            rows,
            config=self.config.to_dict(),
            scaling=None if self.scaling is None else self.scaling.to_dict(),
            coeff_norms=self.scaled.coeff_norms,
        )
        logger.info(f"{self}: {len(rows)} diagnostics rows, {table.violation_count} bound violations")
        return table

    def bounds(self) -> tuple[DiagnosticsTable, list[DiagnosticsRow]]:
        """
        Evaluate every applicable bound at every eigenvalue.

        Returns:
            tuple[DiagnosticsTable, list[DiagnosticsRow]]: The full table and the rows that violate a bound.
        """
        table = self.ratios()
        violations = table.violations()
        for row in violations:
            logger.warning(f"Bound violation: {row.lin} at delta={row.delta}")
        return table, violations
