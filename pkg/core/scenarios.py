"""
Preset Catalog Module

Named initial-condition models and equation parameter sets.

Supports:
- Test models for the long-memory, cyclic and mixed regimes
- Figure models with a single zero-frequency component
- Lookup by name from configs (``model = preset:<name>``, ``params = preset:<name>``)
"""

from dataclasses import dataclass
from typing import List, Tuple

from .errors import DomainError
from .frbe import FrbeParams
from .spectral_model import LongMemoryModel, SlowlyVaryingSpec


@dataclass
class PresetDefinition:
    """Named model preset."""
    name: str
    regime: str  # cyclic, long_memory, long_memory_rv
    triples: List[Tuple[float, float, float]]
    description: str
    slowly_varying: List[str] = None


class PresetCatalog:
    """
    Preset provider for models and parameters.

    Triples are (A, w, kappa); the w = 0 component is listed explicitly,
    with A = 0 for purely cyclic models.
    """

    MODELS = {
        "lrd_k05": {
            "regime": "long_memory",
            "triples": [(1.0, 0.0, 0.5)],
            "description": "Pure long memory, kappa0 = 0.5",
        },
        "lrd_k02": {
            "regime": "long_memory",
            "triples": [(1.0, 0.0, 0.2)],
            "description": "Pure long memory, kappa0 = 0.2",
        },
        "lrd_k07": {
            "regime": "long_memory",
            "triples": [(1.0, 0.0, 0.7)],
            "description": "Pure long memory, kappa0 = 0.7",
        },
        "cyclic_w1": {
            "regime": "cyclic",
            "triples": [(0.0, 0.0, 0.5), (1.0, 1.0, 0.5)],
            "description": "One cyclic pair at w = 1, kappa = 0.5",
        },
        "cyclic_two": {
            "regime": "cyclic",
            "triples": [(0.0, 0.0, 0.5), (0.5, 1.0, 0.3), (0.5, 2.0, 0.7)],
            "description": "Two cyclic pairs at w = 1 and w = 2",
        },
        "cyclic_far": {
            "regime": "cyclic",
            "triples": [(0.0, 0.0, 0.5), (1.0, 8.0, 0.5)],
            "description": "One cyclic pair far from the origin, w = 8",
        },
        "mixed": {
            "regime": "long_memory",
            "triples": [(0.5, 0.0, 0.5), (0.3, 1.0, 0.4), (0.2, 2.5, 0.6)],
            "description": "Long memory at the origin plus two cyclic pairs",
        },
        "lrd_log": {
            "regime": "long_memory_rv",
            "triples": [(1.0, 0.0, 0.5)],
            "description": "Pure long memory with L0 = 1 + log(1 + x)",
            "slowly_varying": ["log_power:1"],
        },
    }

    PARAMS = {
        "example": {"alpha": 1.0, "beta": 0.5, "gamma": 1.0, "mu": 1.0},
        "exponential": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "mu": 1.0},
        "steep": {"alpha": 2.0, "beta": 1.0, "gamma": 1.0, "mu": 1.0},
    }

    def get_preset(self, name: str) -> PresetDefinition:
        """
        Get preset definition by name.

        Raises:
            DomainError: unknown preset
        """
        if name not in self.MODELS:
            known = ", ".join(sorted(self.MODELS))
            raise DomainError(f"Unknown model preset: {name} (one of {known})")
        data = self.MODELS[name]
        return PresetDefinition(
            name=name,
            regime=data["regime"],
            triples=list(data["triples"]),
            description=data["description"],
            slowly_varying=data.get("slowly_varying"),
        )

    def get_model(self, name: str) -> LongMemoryModel:
        """Build the LongMemoryModel of a preset."""
        preset = self.get_preset(name)
        specs = None
        if preset.slowly_varying:
            specs = [SlowlyVaryingSpec.parse(text) for text in preset.slowly_varying]
        return LongMemoryModel.from_triples(preset.triples, specs)

    def get_params(self, name: str) -> FrbeParams:
        if name not in self.PARAMS:
            known = ", ".join(sorted(self.PARAMS))
            raise DomainError(f"Unknown parameter preset: {name} (one of {known})")
        return FrbeParams(**self.PARAMS[name])


def figure_model(kappa0: float) -> LongMemoryModel:
    """Single zero-frequency component with memory exponent kappa0."""
    return LongMemoryModel.from_triples([(1.0, 0.0, kappa0)])


# Convenience functions
def get_catalog() -> PresetCatalog:
    """Get preset catalog instance."""
    return PresetCatalog()


def get_model(name: str) -> LongMemoryModel:
    return PresetCatalog().get_model(name)
