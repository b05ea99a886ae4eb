import csv
import io
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import matplotlib
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .exceptions import DegenerateNormsException, InvalidArgumentException
from .metrics import Diagnostics, growth_factors_from_norms

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]
NOT_APPLICABLE = "N/A"


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return NOT_APPLICABLE
    return f"{value:.17g}"


def _json_number(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, complex):
        return [_json_number(value.real), _json_number(value.imag)]
    return value


@dataclass(frozen=True)
class DiagnosticsRow:
    """One eigenvalue of one linearization; ``diagnostics`` is None for excluded and N/A rows."""

    index: Optional[int]
    lin: str
    delta: Optional[complex]
    diagnostics: Optional[Diagnostics] = None
    excluded: bool = False
    note: str = ""

    @classmethod
    def excluded_row(cls, index: int, lin: str, delta: complex, note: str) -> "DiagnosticsRow":
        return cls(index=index, lin=lin, delta=delta, excluded=True, note=note)

    @classmethod
    def not_applicable(cls, lin: str, note: str) -> "DiagnosticsRow":
        return cls(index=None, lin=lin, delta=None, note=note)

    @property
    def status(self) -> str:
        if self.excluded:
            return "excluded"
        if self.diagnostics is None:
            return NOT_APPLICABLE
        return "true" if self.diagnostics.passed else "false"

    def csv_cells(self) -> list[str]:
        d = self.diagnostics
        delta = self.delta
        cells = [
            NOT_APPLICABLE if self.index is None else str(self.index),
            _fmt(None if delta is None else delta.real),
            _fmt(None if delta is None else delta.imag),
            _fmt(None if delta is None else abs(delta)),
            self.lin,
        ]
        if d is None:
            cells += [NOT_APPLICABLE] * 10
        else:
            cells += [
                _fmt(d.kappa_P),
                _fmt(d.kappa_L),
                _fmt(d.cond_ratio),
                _fmt(d.cond_lower),
                _fmt(d.cond_upper),
                _fmt(d.eta_P),
                _fmt(d.eta_L),
                _fmt(d.back_ratio),
                _fmt(d.back_upper),
                _fmt(d.norm_ratio),
            ]
        cells.append(self.status)
        return cells

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "index": self.index,
            "lin": self.lin,
            "delta": None if self.delta is None else _json_number(complex(self.delta)),
            "status": self.status,
        }
        if self.note:
            data["note"] = self.note
        if self.diagnostics is not None:
            diag = self.diagnostics.to_dict()
            diag["mu"] = diag.pop("delta")
            data["diagnostics"] = {key: _json_number(value) for key, value in diag.items()}
        return data


@dataclass(frozen=True)
class PlotPoint:
    index: int
    lin: str
    cond_ratio: float
    back_ratio: float


class DiagnosticsTable:
    """Diagnostics rows for all linearizations of one experiment, with CSV, JSON and SVG output."""

    CSV_HEADER = (
        "index",
        "delta_re",
        "delta_im",
        "abs_delta",
        "lin",
        "kappa_P",
        "kappa_L",
        "cond_ratio",
        "cond_lower",
        "cond_upper",
        "eta_P",
        "eta_L",
        "back_ratio",
        "back_upper",
        "norm_ratio",
        "pass",
    )

    def __init__(
        self,
        rows: Sequence[DiagnosticsRow],
        config: Optional[dict] = None,
        scaling: Optional[dict] = None,
        coeff_norms: Optional[Sequence[float]] = None,
    ):
        """
        Initialize a DiagnosticsTable.

        Args:
            rows (Sequence[DiagnosticsRow]): The rows in output order.
            config (Optional[dict]): The experiment configuration, echoed in JSON output.
            scaling (Optional[dict]): The applied scaling, echoed in JSON output.
            coeff_norms (Optional[Sequence[float]]): ||A_0||, ..., ||A_k|| of the solved polynomial.
        """
        self.rows = list(rows)
        self.config = config or {}
        self.scaling = scaling
        self.coeff_norms = None if coeff_norms is None else [float(v) for v in coeff_norms]

    def __str__(self) -> str:
        return f"<DiagnosticsTable(rows={len(self.rows)})>"

    def __len__(self) -> int:
        return len(self.rows)

    def evaluated(self, lin: Optional[str] = None) -> list[DiagnosticsRow]:
        """Rows with diagnostics, optionally restricted to one linearization."""
        return [r for r in self.rows if r.diagnostics is not None and (lin is None or r.lin == lin)]

    def violations(self) -> list[DiagnosticsRow]:
        return [r for r in self.evaluated() if not r.diagnostics.passed]

    @property
    def violation_count(self) -> int:
        return len(self.violations())

    def linearizations(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.lin not in seen:
                seen.append(row.lin)
        return seen

    def summary(self) -> dict[str, Any]:
        """
        Min/max of each ratio per linearization, over the non-excluded eigenvalues.

        Returns:
            dict[str, Any]: Per linearization either "N/A" or a dictionary of statistics.
        """
        result: dict[str, Any] = {}
        for lin in self.linearizations():
            rows = self.evaluated(lin)
            if not rows:
                result[lin] = NOT_APPLICABLE
                continue
            cond = [r.diagnostics.cond_ratio for r in rows]
            back = [r.diagnostics.back_ratio for r in rows]
            uppers = [r.diagnostics.cond_upper for r in rows if r.diagnostics.cond_upper is not None]
            result[lin] = {
                "count": len(rows),
                "excluded": sum(1 for r in self.rows if r.lin == lin and r.excluded),
                "min_cond_ratio": min(cond),
                "max_cond_ratio": max(cond),
                "min_back_ratio": min(back),
                "max_back_ratio": max(back),
                "max_cond_upper": max(uppers) if uppers else None,
                "max_back_upper": max(r.diagnostics.back_upper for r in rows),
                "violations": sum(1 for r in rows if not r.diagnostics.passed),
            }
        return result

    def problem_summary(self) -> dict[str, Any]:
        """
        The eigenvalue range, the coefficient norms and the growth factors of the solved polynomial.

        Eigenvalue moduli are taken over every row with a finite eigenvalue, excluded rows included.
        Growth factors are None when an end coefficient vanishes.
        """
        moduli = [abs(r.delta) for r in self.rows if r.delta is not None]
        result: dict[str, Any] = {
            "abs_delta_min": min(moduli) if moduli else None,
            "abs_delta_max": max(moduli) if moduli else None,
            "coeff_norms": self.coeff_norms,
        }
        factors = None
        if self.coeff_norms is not None:
            try:
                factors = growth_factors_from_norms(self.coeff_norms)
            except DegenerateNormsException as e:
                logger.debug(f"No growth factors for this table: {e.message}")
        for name in ("rho", "rho1", "rho2", "rho_prime"):
            result[name] = None if factors is None else getattr(factors, name)
        return result

    def summary_text(self) -> str:
        """A fixed-width rendering of ``summary`` and ``problem_summary`` for terminals."""
        lines = [f"{'lin':<4} {'n':>4} {'min cond':>12} {'max cond':>12} {'min back':>12} {'max back':>12} {'viol':>5}"]
        for lin, stats in self.summary().items():
            if stats == NOT_APPLICABLE:
                lines.append(f"{lin:<4} {NOT_APPLICABLE:>4}")
                continue
            lines.append(
                f"{lin:<4} {stats['count']:>4} {stats['min_cond_ratio']:>12.4g} {stats['max_cond_ratio']:>12.4g} "
                f"{stats['min_back_ratio']:>12.4g} {stats['max_back_ratio']:>12.4g} {stats['violations']:>5}"
            )
        problem = self.problem_summary()
        if problem["abs_delta_min"] is not None:
            lines.append(f"|delta| in [{problem['abs_delta_min']:.4g}, {problem['abs_delta_max']:.4g}]")
        if self.coeff_norms is not None:
            norms = " ".join(f"{v:.4g}" for v in self.coeff_norms)
            lines.append(f"||A_i||, i = 0..{len(self.coeff_norms) - 1}: {norms}")
        if problem["rho"] is not None:
            lines.append(
                f"rho {problem['rho']:.4g}  rho1 {problem['rho1']:.4g}  "
                f"rho2 {problem['rho2']:.4g}  rho' {problem['rho_prime']:.4g}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_cells())
        return buffer.getvalue()

    def to_json(self) -> str:
        summary = {
            lin: stats if stats == NOT_APPLICABLE else {key: _json_number(v) for key, v in stats.items()}
            for lin, stats in self.summary().items()
        }
        problem = self.problem_summary()
        if problem["coeff_norms"] is not None:
            problem["coeff_norms"] = [_json_number(v) for v in problem["coeff_norms"]]
        doc = {
            "config": self.config,
            "scaling": self.scaling,
            "problem": {key: _json_number(v) for key, v in problem.items()},
            "rows": [row.to_dict() for row in self.rows],
            "summary": summary,
            "violations": self.violation_count,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def write(self, path: PathLike, fmt: str = "csv") -> None:
        """Write the table as CSV or JSON."""
        if fmt not in ("csv", "json"):
            raise InvalidArgumentException(f"Unknown format {fmt!r}; expected csv or json")
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        logger.info(f"Wrote {len(self.rows)} diagnostics rows to {path}")

    def plot_points(self) -> list[PlotPoint]:
        return [
            PlotPoint(r.index, r.lin, r.diagnostics.cond_ratio, r.diagnostics.back_ratio)
            for r in self.evaluated()
        ]


def _float_or_none(text: str) -> Optional[float]:
    try:
        return float(text)
    except (TypeError, ValueError):
        return None


def read_plot_points(path: PathLike) -> list[PlotPoint]:
    """
    Read the evaluated rows of a diagnostics file written by ``DiagnosticsTable.write``.

    Both the CSV and the JSON layout are accepted.

    Raises:
        InvalidArgumentException: If the file is neither.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    points = []
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            for row in doc["rows"]:
                diag = row.get("diagnostics")
                if diag is None:
                    continue
                points.append(PlotPoint(int(row["index"]), row["lin"], float(diag["cond_ratio"]), float(diag["back_ratio"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise InvalidArgumentException(f"{path}: not a diagnostics JSON file: {e}") from e
        return points
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != DiagnosticsTable.CSV_HEADER:
        raise InvalidArgumentException(f"{path}: unexpected CSV header {reader.fieldnames}")
    for row in reader:
        cond, back = _float_or_none(row["cond_ratio"]), _float_or_none(row["back_ratio"])
        if cond is None or back is None or row["index"] == NOT_APPLICABLE:
            continue
        points.append(PlotPoint(int(row["index"]), row["lin"], cond, back))
    return points


SVG_RC = {"svg.hashsalt": "polylin", "svg.fonttype": "none"}


def _positive(value: float) -> float:
    return value if 0 < value < math.inf else math.nan


LIN_STYLES = {
    "T": ("tab:blue", "o"),
    "R": ("tab:cyan", "x"),
    "D1": ("tab:green", "s"),
    "Dk": ("tab:olive", "D"),
    "C1": ("tab:red", "^"),
}


def plot_ratios(points: Sequence[PlotPoint], path: Optional[PathLike] = None, width: float = 10.0) -> Figure:
    """
    Plot kappa_L/kappa_P and eta_P/eta_L against the eigenvalue index on log scales.

    The SVG output carries a fixed hash salt and no date, so equal input gives equal bytes.

    Args:
        points (Sequence[PlotPoint]): The evaluated rows.
        path (Optional[PathLike]): Where to write the SVG; nothing is written if None.
        width (float): Figure width in inches; the height follows the golden ratio.

    Returns:
        Figure: The figure.

    Raises:
        InvalidArgumentException: If there is nothing to plot.
    """
    if not points:
        raise InvalidArgumentException("No diagnostics to plot")
    golden_ratio = (math.sqrt(5) - 1.0) / 2.0
    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(width, width * golden_ratio))
        ax_cond, ax_back = fig.subplots(2, 1, sharex=True)
        lins = []
        for p in points:
            if p.lin not in lins:
                lins.append(p.lin)
        top = max(p.index for p in points)
        for lin in lins:
            color, marker = LIN_STYLES.get(lin, ("black", "."))
            mine = [p for p in points if p.lin == lin]
            xs = [p.index for p in mine]
            ax_cond.plot(xs, [_positive(p.cond_ratio) for p in mine], marker=marker, color=color, linestyle="none", label=lin)
            ax_back.plot(xs, [_positive(p.back_ratio) for p in mine],
                         marker=marker, color=color, linestyle="none", label=lin)
        for ax, label in ((ax_cond, r"$\kappa_L/\kappa_P$"), (ax_back, r"$\eta_P/\eta_L$")):
            ax.set_yscale("log")
            ax.set_ylabel(label)
            ax.grid(True, which="major", alpha=0.3)
        ax_back.set_xlim(0.5, top + 0.5)
        ax_back.xaxis.set_major_locator(MaxNLocator(integer=True))
        ax_back.set_xlabel("eigenvalue index (ascending modulus)")
        ax_cond.legend(loc="best")
        if path is not None:
            fig.savefig(path, format="svg", metadata={"Date": None})
            logger.info(f"Wrote ratio plot of {len(points)} points to {path}")
    return fig
