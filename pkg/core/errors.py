"""
Error Types

Exception hierarchy shared by the numerical core and the command line.

Every error carries a short machine-readable ``code`` so the CLI can report
failures on a single parseable line.
"""

from dataclasses import dataclass
from typing import List, Optional


class FrbeError(Exception):
    """Base class for all laboratory errors."""
    code = "frbe"


class DomainError(FrbeError, ValueError):
    """Argument outside the mathematical domain of an operation."""
    code = "domain"


class SingularityError(DomainError):
    """Evaluation exactly at an integrable spectral singularity."""
    code = "singular"


class AccuracyError(FrbeError, ArithmeticError):
    """A series or quadrature did not reach the requested accuracy."""
    code = "accuracy"

    def __init__(self, message: str, achieved: Optional[float] = None,
                 requested: Optional[float] = None):
        if achieved is not None:
            message = f"{message} (achieved error {achieved:.3g}"
            if requested is not None:
                message += f", requested {requested:.3g}"
            message += ")"
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class RegimeError(FrbeError, ValueError):
    """A scaling-limit hypothesis is violated by the model or parameters."""
    code = "regime"


@dataclass
class Diagnostic:
    """One line-numbered configuration problem."""
    line: int
    key: str
    message: str
    expected: str = ""

    def __str__(self) -> str:
        text = f"line {self.line}: {self.key}: {self.message}"
        if self.expected:
            text += f" (expected {self.expected})"
        return text


class ConfigError(FrbeError, ValueError):
    """Configuration or model file rejected; see ``diagnostics``."""
    code = "config"

    def __init__(self, diagnostics: List[Diagnostic], source: str = "config"):
        self.diagnostics = list(diagnostics)
        self.source = source
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"{source}: {lines}")
