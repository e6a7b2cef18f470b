"""
Data Processing Utilities

CSV emission and text reports for command results.
"""

import logging
from decimal import Decimal
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 17
NA_REP = "nan"


def format_float(value: float) -> str:
    """
    Write a float with 17 significant digits.

    A value whose exact binary expansion ends within 17 digits is written
    exactly (``0.5``, ``1``, ``-2``). Any other value is rounded to 17 digits
    with trailing zeros kept (``0.13533528323661270``).
    """
    value = float(value)
    if np.isnan(value):
        return NA_REP
    if not np.isfinite(value):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    digits = "".join(map(str, Decimal(value).as_tuple().digits)).rstrip("0")
    if len(digits) <= SIGNIFICANT_DIGITS:
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return f"{value:#.{SIGNIFICANT_DIGITS}g}"


class DataProcessor:
    """Serialization of result tables."""

    @staticmethod
    def to_csv_text(frame: pd.DataFrame) -> str:
        """
        Render a result table as CSV.

        Floats go through ``format_float``, missing values are written as
        ``nan`` and lines end with LF, so identical tables give identical bytes.
        """
        formatted = frame.copy()
        for column in formatted.columns:
            if pd.api.types.is_float_dtype(formatted[column]):
                formatted[column] = [format_float(v) for v in formatted[column]]
        return formatted.to_csv(index=False, na_rep=NA_REP, lineterminator="\n")

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: Optional[str]) -> str:
        """
        Write a table to ``path`` (or return the text only when path is None).

        Returns:
            The CSV text
        """
        text = DataProcessor.to_csv_text(frame)
        if path is not None:
            with open(Path(path), "w", newline="") as f:
                f.write(text)
            logger.info("wrote %d rows to %s", len(frame), path)
        return text

    @staticmethod
    def count_failed_rows(frame: pd.DataFrame) -> int:
        """Rows with any NaN value (row-level failures)."""
        numeric = frame.select_dtypes(include=[np.number])
        return int(numeric.isna().any(axis=1).sum())


class ReportGenerator:
    """Generate reports from experiment results."""

    @staticmethod
    def format_scientific(value: float) -> str:
        return f"{value:.3e}"

    @staticmethod
    def experiment_summary(report: pd.DataFrame, regime: str, replicates: int) -> str:
        """
        Generate text summary of a convergence experiment.
        """
        lines = [
            "=" * 60,
            "SCALING LIMIT CONVERGENCE SUMMARY",
            "=" * 60,
            "",
            f"Regime: {regime}",
            f"Replicates: {replicates:,}",
            "",
            "-" * 60,
            f"{'eps':>10} {'max |dev|':>12} {'max z':>8} {'msd':>12} {'ok':>4}",
            "-" * 60,
        ]
        for row in report.itertuples(index=False):
            lines.append(
                f"{row.eps:>10.3g} {ReportGenerator.format_scientific(row.max_abs_deviation):>12} "
                f"{row.max_z_score:>8.2f} {ReportGenerator.format_scientific(row.msd):>12} "
                f"{'yes' if row.within_tolerance else 'no':>4}"
            )
        lines.extend(["", "=" * 60])
        return "\n".join(lines)

    @staticmethod
    def certificate_summary(sweep: pd.DataFrame) -> Dict:
        """Monotonicity and final/initial ratio of a certificate sweep, per time."""
        summary = {}
        for t, group in sweep.groupby("t"):
            msd = group.sort_values("eps", ascending=False)["msd"].to_numpy()
            summary[float(t)] = {
                "decreasing": bool(np.all(np.diff(msd) < 0)),
                "ratio": float(msd[-1] / msd[0]) if msd[0] > 0 else float("nan"),
            }
        return summary
