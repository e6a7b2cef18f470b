"""
Configuration Input

Parsers for model files and run configs, plus the JSON run defaults.

Model file grammar (one component per line, ``#`` comments):

    A=0.5 w=0   kappa=0.5
    A=0.5 w=1.5 kappa=0.3 L=log_power:1

Run config grammar (``#`` comments, ``[command]`` sections override the
top-level keys for that command only):

    model = cyclic_w1.model        # or preset:<name>
    alpha = 1
    eps_grid = 0.1, 0.01
    [experiment]
    points = 1:0; 1:1
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from core.errors import ConfigError, Diagnostic, DomainError, RegimeError
from core.frbe import FrbeParams
from core.quadrature import QuadratureConfig
from core.scaling_limits import ScalingRegime, check_regime
from core.scenarios import get_catalog
from core.simulation import McConfig
from core.specfun import SpecialFunctionConfig
from core.spectral_model import LongMemoryComponent, LongMemoryModel, SlowlyVaryingSpec

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent.parent / "data"
DEFAULTS_FILE = DATA_DIR / "run_defaults.json"

COMMANDS = ("eval", "spectral", "cov", "limit", "msd", "simulate", "experiment", "figures")
MODEL_COMMANDS = ("spectral", "cov", "limit", "msd", "simulate", "experiment")
REGIME_COMMANDS = ("limit", "msd", "experiment")
EVAL_FUNCTIONS = ("mittag_leffler", "gamma", "erfc", "bessel_k", "theta")
PRESET_PREFIX = "preset:"
EQUATION_KEYS = ("alpha", "beta", "gamma", "mu")


def load_run_defaults() -> Dict:
    """Load documented run defaults, flattened to config keys."""
    with open(DEFAULTS_FILE, "r") as f:
        data = json.load(f)
    flat = {}
    for section, values in data.items():
        if isinstance(values, dict):
            flat.update(values)
    return flat


# =============================================================================
# MODEL FILES
# =============================================================================

MODEL_KEYS = ("A", "w", "kappa", "L")


def parse_model(text: str, source: str = "model") -> LongMemoryModel:
    """
    Parse a model file into a LongMemoryModel.

    Raises:
        ConfigError: with one diagnostic per problem found
    """
    diagnostics: List[Diagnostic] = []
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entries = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep:
                diagnostics.append(Diagnostic(number, token, "malformed entry", "key=value"))
            elif key not in MODEL_KEYS:
                diagnostics.append(Diagnostic(number, key, "unknown key", "one of A, w, kappa, L"))
            else:
                entries[key] = value
        missing = [k for k in ("A", "w", "kappa") if k not in entries]
        for key in missing:
            diagnostics.append(Diagnostic(number, key, "missing key", f"{key}=<number>"))
        if missing:
            continue
        numbers = {}
        for key in ("A", "w", "kappa"):
            try:
                numbers[key] = float(entries[key])
            except ValueError:
                diagnostics.append(Diagnostic(number, key, f"not a number: '{entries[key]}'", "a real number"))
        if len(numbers) < 3:
            continue
        if not 0.0 < numbers["kappa"] < 1.0:
            diagnostics.append(Diagnostic(number, "kappa", "kappa must lie in the open interval (0, 1)",
                                          "0 < kappa < 1"))
            continue
        if numbers["A"] < 0 or numbers["w"] < 0:
            key = "A" if numbers["A"] < 0 else "w"
            diagnostics.append(Diagnostic(number, key, f"{key} must be non-negative", f"{key} >= 0"))
            continue
        spec = None
        if "L" in entries:
            try:
                spec = SlowlyVaryingSpec.parse(entries["L"])
            except DomainError as err:
                diagnostics.append(Diagnostic(number, "L", str(err), "kind[:p[:scale]]"))
                continue
        rows.append((number, numbers, spec))

    seen: Dict[float, int] = {}
    for number, numbers, _ in rows:
        w = numbers["w"]
        if w in seen:
            diagnostics.append(Diagnostic(number, "w", f"duplicate frequency w={w:g} (first on line {seen[w]})",
                                          "distinct w values"))
        else:
            seen[w] = number
    if rows and 0.0 not in seen and not diagnostics:
        diagnostics.append(Diagnostic(0, "w", "no component with w=0", "one line with w=0 (A may be 0)"))
    if not rows and not diagnostics:
        diagnostics.append(Diagnostic(0, "A", "model has no components", "at least one line"))
    if rows and not diagnostics:
        total = sum(n["A"] for _, n, _ in rows)
        if abs(total - 1.0) > 1e-12:
            diagnostics.append(Diagnostic(rows[-1][0], "A", f"amplitudes sum to {total!r}", "sum of A equal to 1"))
    if diagnostics:
        raise ConfigError(diagnostics, source)

    rows.sort(key=lambda row: row[1]["w"])
    components = [LongMemoryComponent(n["A"], n["w"], n["kappa"]) for _, n, _ in rows]
    specs = None
    if any(spec is not None for _, _, spec in rows):
        specs = [spec or SlowlyVaryingSpec.constant() for _, _, spec in rows]
    return LongMemoryModel(tuple(components), specs)


def load_model(path) -> LongMemoryModel:
    path = Path(path)
    with open(path, "r") as f:
        return parse_model(f.read(), str(path))


# =============================================================================
# RUN CONFIG
# =============================================================================

def _float_list(text: str) -> List[float]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(item) for item in items]


def _points(text: str) -> List[Tuple[float, float]]:
    points = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        t, sep, x = item.partition(":")
        if not sep:
            raise ValueError(item)
        points.append((float(t), float(x)))
    if not points:
        raise ValueError("no points")
    return points


def _optional_str(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


# key -> (converter, expected form)
KEY_TABLE: Dict[str, Tuple[Callable, str]] = {
    "model": (_optional_str, "a model file path or preset:<name>"),
    "params": (_optional_str, "preset:<name>"),
    "alpha": (float, "a real number"),
    "beta": (float, "a real number"),
    "gamma": (float, "a real number"),
    "mu": (float, "a real number"),
    "regime": (_optional_str, "one of cyclic, long_memory, long_memory_rv"),
    "eps_grid": (_float_list, "comma-separated reals in (0, 1]"),
    "output": (_optional_str, "a file path"),
    "seed": (int, "a non-negative integer"),
    "replicates": (int, "an integer >= 2"),
    "workers": (int, "a positive integer"),
    "grid_cells": (int, "an integer >= 16"),
    "tail_mass": (float, "a real in (0, 1e-3]"),
    "rel_tol": (float, "a real in (0, 1e-3)"),
    "points": (_points, "t:x pairs separated by ';'"),
    "times": (_float_list, "comma-separated positive reals"),
    "lambdas": (_float_list, "comma-separated reals"),
    "values": (_float_list, "comma-separated reals"),
    "order": (float, "a real number"),
    "function": (_optional_str, "one of " + ", ".join(EVAL_FUNCTIONS)),
    "constant": (float, "a positive real"),
    "kappas": (_float_list, "comma-separated reals in (0, 1)"),
    "h_min": (float, "a real number"),
    "h_max": (float, "a real number"),
    "h_step": (float, "a positive real"),
    "tprime_min": (float, "a positive real"),
    "tprime_max": (float, "a positive real"),
    "tprime_step": (float, "a positive real"),
}

# key -> (predicate, message, expected form)
INVARIANTS = {
    "eps_grid": (lambda v: all(0.0 < e <= 1.0 for e in v), "eps values must lie in (0, 1]", "0 < eps <= 1"),
    "seed": (lambda v: v >= 0, "seed must be non-negative", "seed >= 0"),
    "replicates": (lambda v: v >= 2, "replicates must be at least 2", "replicates >= 2"),
    "workers": (lambda v: v >= 1, "workers must be positive", "workers >= 1"),
    "grid_cells": (lambda v: v >= 16, "grid_cells must be at least 16", "grid_cells >= 16"),
    "tail_mass": (lambda v: 0.0 < v <= 1e-3, "tail_mass out of range", "0 < tail_mass <= 1e-3"),
    "rel_tol": (lambda v: 0.0 < v < 1e-3, "rel_tol out of range", "0 < rel_tol < 1e-3"),
    "times": (lambda v: all(t > 0 for t in v), "times must be positive", "t > 0"),
    "function": (lambda v: v in EVAL_FUNCTIONS, "unknown function", "one of " + ", ".join(EVAL_FUNCTIONS)),
    "constant": (lambda v: v > 0, "constant must be positive", "constant > 0"),
    "kappas": (lambda v: all(0.0 < k < 1.0 for k in v), "kappa must lie in the open interval (0, 1)",
               "0 < kappa < 1"),
    "h_step": (lambda v: v > 0, "h_step must be positive", "h_step > 0"),
    "tprime_min": (lambda v: v > 0, "tprime_min must be positive", "tprime_min > 0"),
    "tprime_step": (lambda v: v > 0, "tprime_step must be positive", "tprime_step > 0"),
}


@dataclass
class RunConfig:
    """Validated run configuration for one command."""
    command: Optional[str] = None
    model: Optional[LongMemoryModel] = None
    model_source: str = ""
    params: FrbeParams = field(default_factory=FrbeParams)
    regime: Optional[ScalingRegime] = None
    eps_grid: List[float] = field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    output: Optional[str] = None
    seed: int = 12345
    replicates: int = 10000
    workers: int = 1
    grid_cells: int = 512
    tail_mass: float = 1e-8
    rel_tol: float = 1e-10
    points: List[Tuple[float, float]] = field(default_factory=list)
    times: List[float] = field(default_factory=lambda: [1.0])
    lambdas: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    order: float = 0.5
    function: str = "mittag_leffler"
    constant: Optional[float] = None
    kappas: List[float] = field(default_factory=lambda: [0.2, 0.5, 0.7])
    h_min: float = -15.0
    h_max: float = 15.0
    h_step: float = 0.1
    tprime_min: float = 1.0
    tprime_max: float = 20.0
    tprime_step: float = 1.0

    def mc_config(self) -> McConfig:
        return McConfig(seed=self.seed, replicates=self.replicates, workers=self.workers,
                        grid_cells=self.grid_cells, tail_mass=self.tail_mass)

    def quad_config(self) -> QuadratureConfig:
        return QuadratureConfig(epsrel=self.rel_tol)

    def sf_config(self) -> SpecialFunctionConfig:
        return SpecialFunctionConfig(rel_tol=self.rel_tol)


_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")


def _read_assignments(text: str, command: Optional[str], diagnostics: List[Diagnostic]):
    """(line, key, raw) assignments in effect for ``command``: top level first, then its section."""
    top, section_entries = [], []
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SECTION.match(line)
        if match:
            section = match.group(1)
            if section not in COMMANDS:
                diagnostics.append(Diagnostic(number, section, "unknown section", "one of " + ", ".join(COMMANDS)))
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            diagnostics.append(Diagnostic(number, key or line, "malformed line", "key = value"))
            continue
        if key not in KEY_TABLE:
            diagnostics.append(Diagnostic(number, key, "unknown key", "one of " + ", ".join(sorted(KEY_TABLE))))
            continue
        if section is None:
            top.append((number, key, value))
        elif section == command:
            section_entries.append((number, key, value))
    return top + section_entries


def _resolve_model(value: str, number: int, base_dir: Optional[Path], diagnostics: List[Diagnostic]):
    if value.startswith(PRESET_PREFIX):
        try:
            return get_catalog().get_model(value[len(PRESET_PREFIX):])
        except DomainError as err:
            diagnostics.append(Diagnostic(number, "model", str(err), "preset:<name>"))
            return None
    path = Path(value)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    try:
        return load_model(path)
    except OSError as err:
        diagnostics.append(Diagnostic(number, "model", f"cannot read model file: {err.strerror}",
                                      "a readable model file"))
    except ConfigError as err:
        for d in err.diagnostics:
            diagnostics.append(Diagnostic(number, "model", f"{path.name} {d}", d.expected))
    return None


def _resolve_params(value: str, number: int, diagnostics: List[Diagnostic]) -> Optional[FrbeParams]:
    if not value.startswith(PRESET_PREFIX):
        diagnostics.append(Diagnostic(number, "params", f"cannot parse '{value}'", "preset:<name>"))
        return None
    try:
        return get_catalog().get_params(value[len(PRESET_PREFIX):])
    except DomainError as err:
        diagnostics.append(Diagnostic(number, "params", str(err), "preset:<name>"))
        return None


def parse_config(
    text: str,
    command: Optional[str] = None,
    base_dir=None,
) -> RunConfig:
    """
    Parse a run config.

    Args:
        text: Config text
        command: Command whose section applies (None for top level only)
        base_dir: Directory that relative model paths are resolved against

    Returns:
        RunConfig with documented defaults filled in

    Raises:
        ConfigError: with line-numbered diagnostics
    """
    if command is not None and command not in COMMANDS:
        raise ConfigError([Diagnostic(0, "command", f"unknown command '{command}'",
                                      "one of " + ", ".join(COMMANDS))])
    diagnostics: List[Diagnostic] = []
    values = load_run_defaults()
    lines: Dict[str, int] = {}

    for number, key, raw in _read_assignments(text, command, diagnostics):
        converter, expected = KEY_TABLE[key]
        try:
            value = converter(raw)
        except ValueError:
            diagnostics.append(Diagnostic(number, key, f"cannot parse '{raw}'", expected))
            continue
        if key in INVARIANTS:
            predicate, message, form = INVARIANTS[key]
            if not predicate(value):
                diagnostics.append(Diagnostic(number, key, message, form))
                continue
        values[key] = value
        lines[key] = number

    if values.get("params"):
        preset = _resolve_params(values["params"], lines.get("params", 0), diagnostics)
        if preset is not None:
            # Explicit equation keys override the preset.
            for key in EQUATION_KEYS:
                if key not in lines:
                    values[key] = getattr(preset, key)

    try:
        params = FrbeParams(
alpha=values["alpha"], gamma=values["gamma"],
                            beta=values["beta"], mu=values["mu"])
    except DomainError as err:
        key = str(err).split()[0]
        diagnostics.append(Diagnostic(lines.get(key, 0), key, str(err), "a value in the stated range"))
        params = None

    model = None
    model_source = values.get("model") or ""
    if model_source:
        model = _resolve_model(model_source, lines.get("model", 0), base_dir, diagnostics)
    elif command in MODEL_COMMANDS:
        diagnostics.append(Diagnostic(0, "model", f"command '{command}' needs a model",
                                      "model = <path> or preset:<name>"))

    regime = None
    if values.get("regime"):
        try:
            regime = ScalingRegime(values["regime"])
        except ValueError:
            diagnostics.append(Diagnostic(lines.get("regime", 0), "regime", f"unknown regime '{values['regime']}'",
                                          KEY_TABLE["regime"][1]))
    if model is not None and params is not None:
        explicit = regime is not None
        if regime is None:
            regime = ScalingRegime.infer(model)
        if explicit or command in REGIME_COMMANDS:
            try:
                check_regime(regime, params, model)
            except RegimeError as err:
                key = "alpha" if str(err).startswith("alpha") else "regime"
                line = lines.get(key, lines.get("regime", 0))
                diagnostics.append(Diagnostic(line, key, str(err), "parameters satisfying the regime"))

    output = values.get("output")
    if output:
        parent = Path(output).parent
        if str(parent) not in ("", ".") and not parent.is_dir():
            diagnostics.append(Diagnostic(lines.get("output", 0), "output", f"directory {parent} does not exist",
                                          "a path in an existing directory"))

    if diagnostics:
        raise ConfigError(diagnostics)

    config = RunConfig(
        command=command,
        model=model,
        model_source=model_source,
        params=params,
        regime=regime,
        eps_grid=list(values["eps_grid"]),
        output=output,
        seed=int(values["seed"]),
        replicates=int(values["replicates"]),
        workers=int(values["workers"]),
        grid_cells=int(values["grid_cells"]),
        tail_mass=float(values["tail_mass"]),
        rel_tol=float(values["rel_tol"]),
        points=[tuple(p) for p in values["points"]],
        times=list(values["times"]),
        lambdas=list(values["lambdas"]),
        values=list(values["values"]),
        order=float(values["order"]),
        function=values["function"],
        constant=values.get("constant"),
        kappas=list(values["kappas"]),
        h_min=float(values["h_min"]),
        h_max=float(values["h_max"]),
        h_step=float(values["h_step"]),
        tprime_min=float(values["tprime_min"]),
        tprime_max=float(values["tprime_max"]),
        tprime_step=float(values["tprime_step"]),
    )
    logger.debug("parsed config for %s: model=%s regime=%s", command, model_source,
                 regime.value if regime else None)
    return config


def load_config(path, command: Optional[str] = None) -> RunConfig:
    """Read and parse a config file; relative model paths resolve against its directory."""
    path = Path(path)
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as err:
        raise ConfigError([Diagnostic(0, "config", f"cannot read {path}: {err.strerror}", "a readable file")],
                          str(path))
    try:
        return parse_config(text, command, path.parent)
    except ConfigError as err:
        raise ConfigError(err.diagnostics, str(path))


def frange(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic grid, rounded to the step's decimals."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    decimals = max(0, -int(math.floor(math.log10(step))) + 1)
    return [round(start + k * step, decimals) for k in range(count)]
