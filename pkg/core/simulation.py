"""
Monte Carlo Simulation Module

Spectral Monte Carlo sampler for the initial condition, the solution field
and the rescaled fields.

Features:
- Spectral grids with exact cell masses and singular frequencies on cell edges
- Counter-based random streams keyed by (seed, replicate, cell)
- Replicate blocks spread over a thread pool with worker-independent output
- Empirical covariances with standard errors and a Gaussianity moment check
- Convergence experiment against the limit covariances
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from .errors import AccuracyError, DomainError
from .frbe import FrbeParams, SpaceTimePoint, solution_kernel
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .scaling_limits import (
    RescalingMap,
    ScalingRegime,
    check_regime,
    coupled_msd,
    coupling_bound,
    limit_covariance,
    make_rescaling,
)
from .spectral_model import (
    LongMemoryModel,
    SlowlyVaryingSpec,
    spectral_cutoff,
    spectral_first_moment,
    spectral_mass,
)

logger = logging.getLogger(__name__)

PointLike = Union[SpaceTimePoint, Tuple[float, float]]

IMAGINARY_RESIDUE_LIMIT = 1e-12
GEOMETRIC_FLOOR = 1e-7


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo configuration."""
    seed: int = 12345
    replicates: int = 10000
    workers: int = 1
    grid_cells: int = 512
    tail_mass: float = 1e-8
    block_size: int = 1024

    def __post_init__(self):
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if self.replicates < 2:
            raise DomainError("replicates must be at least 2 for variance estimation")
        if self.workers < 1:
            raise DomainError("workers must be positive")
        if self.grid_cells < 16:
            raise DomainError(f"grid_cells must be at least 16, got {self.grid_cells}")
        if not 0.0 < self.tail_mass <= 1e-3:
            raise DomainError(f"tail_mass must lie in (0, 1e-3], got {self.tail_mass}")
        if self.block_size < 1:
            raise DomainError("block_size must be positive")


# =============================================================================
# SPECTRAL GRID
# =============================================================================

@dataclass(eq=False)
class SpectralGrid:
    """
    Positive half of a mirror-symmetric spectral partition.

    Cell c covers [lower[c], upper[c]] and its mirror [-upper[c], -lower[c]],
    each carrying ``mass[c]``. Edges and centroids are stored in the sampling
    frequency, i.e. the model frequency divided by ``scale``.
    """
    cutoff: float
    lower: np.ndarray
    upper: np.ndarray
    mass: np.ndarray
    centroid: np.ndarray
    tail_bound: float
    scale: float = 1.0

    @property
    def n_cells(self) -> int:
        """Cells on the positive half; the full grid has twice as many."""
        return int(self.mass.size)

    @property
    def total_mass(self) -> float:
        return 2.0 * float(self.mass.sum())

    def cells(self) -> List[Tuple[float, float, float]]:
        """Full symmetric cell list (lo, hi, mass), ordered by frequency."""
        negative = [(-hi, -lo, m) for lo, hi, m in zip(self.lower, self.upper, self.mass)]
        positive = list(zip(self.lower, self.upper, self.mass))
        return [(float(lo), float(hi), float(m)) for lo, hi, m in negative[::-1] + positive]


def _grid_nodes(
    model: LongMemoryModel,
    cutoff: float,
    n_cells: int,
    edges: Optional[Sequence[float]],
    focus_limit: Optional[float],
) -> np.ndarray:
    mandatory = {0.0, cutoff}
    mandatory.update(s.point for s in model.singular_points() if s.point <= cutoff)
    if edges is not None:
        folded = {abs(float(e)) for e in edges}
        nodes = {e for e in folded if e < cutoff} | mandatory
    else:
        n_geom = n_cells // 2
        geometric = np.geomspace(cutoff * GEOMETRIC_FLOOR, cutoff, n_geom)
        upper = cutoff if focus_limit is None else min(cutoff, focus_limit)
        uniform = np.linspace(0.0, upper, n_cells - n_geom + 1)
        nodes = set(geometric) | set(uniform) | mandatory
    ordered = np.array(sorted(nodes))
    # Nodes closer than rounding would give empty cells.
    keep = np.concatenate([[True], np.diff(ordered) > 1e-14 * max(cutoff, 1.0)])
    ordered = ordered[keep]
    ordered[-1] = cutoff
    return ordered


def build_spectral_grid(
    model: LongMemoryModel,
    rv_L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    n_cells: int = 256,
    tail_mass: float = 1e-8,
    edges: Optional[Sequence[float]] = None,
    freq_scale: float = 1.0,
    focus: Optional[float] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> SpectralGrid:
    """
    Partition [0, Lambda] into cells with exact spectral masses.

    Args:
        model: Initial-condition model
        rv_L: Slowly varying specs per component (modulated density)
        n_cells: Requested cells on the positive half (at least 16)
        tail_mass: Two-sided mass allowed beyond the cutoff Lambda
        edges: Explicit cell edges; negative values are folded onto the
            positive half so the layout is always mirror-symmetric
        freq_scale: Stored frequencies are model frequencies / freq_scale
        focus: Half the nodes are spread uniformly on [0, focus] in the
            stored frequency (the rest are geometric up to Lambda)
        config: Quadrature tolerances for the cell masses

    Returns:
        SpectralGrid
    """
    if n_cells < 16:
        raise DomainError(f"n_cells must be at least 16, got {n_cells}")
    if not 0.0 < tail_mass <= 1e-3:
        raise DomainError(f"tail_mass must lie in (0, 1e-3], got {tail_mass}")
    if not freq_scale > 0:
        raise DomainError(f"freq_scale must be positive, got {freq_scale}")

    cutoff = spectral_cutoff(model, tail_mass, rv_L)
    focus_limit = None if focus is None else focus * freq_scale
    nodes = _grid_nodes(model, cutoff, n_cells, edges, focus_limit)
    lower, upper = nodes[:-1], nodes[1:]

    mass = np.empty(lower.size)
    centroid = np.empty(lower.size)
    for c, (lo, hi) in enumerate(zip(lower, upper)):
        mass[c] = spectral_mass(model, lo, hi, rv_L, config)
        if mass[c] > 0:
            centroid[c] = spectral_first_moment(model, lo, hi, rv_L, config) / mass[c]
        else:
            centroid[c] = 0.5 * (lo + hi)
    centroid = np.clip(centroid, lower, upper)

    grid = SpectralGrid(
        cutoff=cutoff / freq_scale,
        lower=lower / freq_scale,
        upper=upper / freq_scale,
        mass=mass,
        centroid=centroid / freq_scale,
        tail_bound=tail_mass,
        scale=freq_scale,
    )
    logger.info("spectral grid: cutoff=%.6g, %d cells per side, total mass %.12f",
                cutoff, grid.n_cells, grid.total_mass)
    return grid


# =============================================================================
# SAMPLES AND SAMPLER
# =============================================================================

@dataclass
class RandomFieldSample:
    """
    Sampled field values, one row per replicate and one column per point.

    Points are (t, x) pairs; t = 0.0 marks the initial condition.
    """
    points: List[Tuple[float, float]]
    values: np.ndarray
    seed: int
    replicate_count: int

    @property
    def n_points(self) -> int:
        return len(self.points)


@dataclass
class CovarianceEstimate:
    """Cross-moment estimate with its standard error."""
    estimate: float
    standard_error: float
    degenerate: bool = False


def _as_pair(point: PointLike) -> Tuple[float, float]:
    if isinstance(point, SpaceTimePoint):
        return (point.t, point.x)
    t, x = point
    return (float(t), float(x))


def replicate_normals(seed: int, replicate: int, n_cells: int) -> np.ndarray:
    """Standard normals of one replicate; cell i uses entries 2i and 2i + 1."""
    stream = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(replicate,))))
    return stream.standard_normal(2 * n_cells)


class SpectralSimulator:
    """
    Monte Carlo engine for spectral-representation fields.

    A field value is sum over mirrored cells of zeta_c K(t, lam_c) e^{i lam_c x},
    with zeta_{-c} = conj(zeta_c) and E|zeta_c|^2 = mass_c.
    """

    def __init__(
        self,
        grid: SpectralGrid,
        params: Optional[FrbeParams] = None,
        config: McConfig = None,
    ):
        """
        Initialize the simulator.

        Args:
            grid: Spectral grid of the initial condition
            params: Equation parameters (None samples the initial condition only)
            config: Monte Carlo configuration
        """
        self.grid = grid
        self.params = params
        self.config = config or McConfig()

    def _coefficients(
        self,
        points: List[Tuple[float, float]],
        amplitude: float,
        time_scale: float,
    ) -> np.ndarray:
        """B[c, p] = amplitude sqrt(mass_c) K(t_p, lam_c) e^{i lam~_c x_p}."""
        grid = self.grid
        freqs = grid.centroid * grid.scale
        roots = amplitude * np.sqrt(grid.mass)
        columns = []
        kernels: Dict[float, np.ndarray] = {}
        for t, x in points:
            if t == 0.0:
                kernel = np.ones_like(freqs)
            elif self.params is None:
                raise DomainError("equation parameters are needed to sample t > 0")
            else:
                if t not in kernels:
                    kernels[t] = np.asarray(solution_kernel(self.params, t * time_scale, freqs))
                kernel = kernels[t]
            columns.append(roots * kernel * np.exp(1j * grid.centroid * x))
        return np.column_stack(columns)

    def _run_block(self, start: int, stop: int, coefficients: np.ndarray) -> np.ndarray:
        n_cells = self.grid.n_cells
        zeta = np.empty((stop - start, n_cells), dtype=complex)
        for row, r in enumerate(range(start, stop)):
            draws = replicate_normals(self.config.seed, r, n_cells)
            zeta[row] = np.sqrt(0.5) * (draws[0::2] - 1j * draws[1::2])
        full = zeta @ coefficients + np.conj(zeta) @ np.conj(coefficients)
        residue = float(np.abs(full.imag).max()) if full.size else 0.0
        if residue >= IMAGINARY_RESIDUE_LIMIT:
            raise AccuracyError("symmetric spectral sum is not real",
                                achieved=residue, requested=IMAGINARY_RESIDUE_LIMIT)
        return full.real

    def sample(
        self,
        points: Sequence[PointLike],
        amplitude: float = 1.0,
        time_scale: float = 1.0,
    ) -> RandomFieldSample:
        """
        Sample the field at ``points``.

        Args:
            points: (t, x) pairs; t = 0 gives the initial condition
            amplitude: Multiplier of every value
            time_scale: Kernel times are t * time_scale

        Returns:
            RandomFieldSample with ``config.replicates`` rows
        """
        pairs = [_as_pair(p) for p in points]
        if not pairs:
            raise DomainError("at least one sampling point is required")
        for t, _ in pairs:
            if t < 0:
                raise DomainError(f"time must be non-negative, got {t}")
        coefficients = self._coefficients(pairs, amplitude, time_scale)

        n = self.config.replicates
        size = self.config.block_size
        blocks = [(start, min(start + size, n)) for start in range(0, n, size)]
        if self.config.workers > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                parts = list(pool.map(lambda b: self._run_block(b[0], b[1], coefficients), blocks))
        else:
            parts = [self._run_block(lo, hi, coefficients) for lo, hi in blocks]
        values = np.vstack(parts)
        logger.info("sampled %d replicates at %d points (seed %d)", n, len(pairs), self.config.seed)
        return RandomFieldSample(pairs, values, self.config.seed, n)


def _require_unscaled(grid: SpectralGrid) -> None:
    if grid.scale != 1.0:
        raise DomainError(f"grid is built in a rescaled frequency (scale {grid.scale:g}); "
                          "use sample_rescaled")


def sample_initial(
    model: LongMemoryModel,
    grid: SpectralGrid,
    x_points: Sequence[float],
    config: McConfig = None,
) -> RandomFieldSample:
    """Samples of the initial condition xi(x) at ``x_points``."""
    _require_unscaled(grid)
    simulator = SpectralSimulator(grid, None, config)
    return simulator.sample([(0.0, float(x)) for x in x_points])


def sample_solution(
    params: FrbeParams,
    model: LongMemoryModel,
    grid: SpectralGrid,
    points: Sequence[PointLike],
    config: McConfig = None,
) -> RandomFieldSample:
    """
    Samples of the solution u(t, x).

    The same seed drives the same cell coefficients as sample_initial, so the
    two samples are coupled realization by realization.
    """
    _require_unscaled(grid)
    for p in points:
        if not _as_pair(p)[0] > 0:
            raise DomainError("solution samples need t > 0")
    return SpectralSimulator(grid, params, config).sample(points)


def sample_rescaled(
    rescaling: RescalingMap,
    params: FrbeParams,
    model: LongMemoryModel,
    points: Sequence[PointLike],
    config: McConfig = None,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    focus: float = 64.0,
    grid: Optional[SpectralGrid] = None,
) -> RandomFieldSample:
    """
    Samples of U_eps(t, x) = field_scale * u(t time_scale, x space_scale).

    The grid is built in the rescaled frequency lam / eps^(beta/alpha), which
    keeps the shifted singular points on cell edges.

    Args:
        rescaling: Map from make_rescaling
        params: Equation parameters
        model: Initial-condition model
        points: Points in the rescaled coordinates
        config: Monte Carlo configuration
        L: Slowly varying specs (slowly varying regime)
        focus: Uniform-node range in the rescaled frequency
        grid: Prebuilt grid with scale equal to rescaling.freq_scale

    Returns:
        RandomFieldSample
    """
    config = config or McConfig()
    regime = check_regime(rescaling.regime, params, model)
    if regime is ScalingRegime.LONG_MEMORY_RV and L is None:
        L = model.slowly_varying
    for p in points:
        if not _as_pair(p)[0] > 0:
            raise DomainError("rescaled samples need t > 0")
    if grid is None:
        grid = build_spectral_grid(model, L, config.grid_cells, config.tail_mass,
                                   freq_scale=rescaling.freq_scale, focus=focus)
    elif not math.isclose(grid.scale, rescaling.freq_scale, rel_tol=1e-12):
        raise DomainError(f"grid scale {grid.scale:g} does not match freq_scale "
                          f"{rescaling.freq_scale:g}")
    simulator = SpectralSimulator(grid, params, config)
    return simulator.sample(points, rescaling.field_scale, rescaling.time_scale)


# =============================================================================
# ESTIMATION
# =============================================================================

def empirical_covariance(
    sample: RandomFieldSample,
    pairs: Sequence[Tuple[int, int]],
) -> List[CovarianceEstimate]:
    """
    Zero-mean cross moments mean(v_i v_j) with standard errors.

    A pair whose products have zero spread is flagged as degenerate (with a
    warning) instead of raising.
    """
    n = sample.values.shape[0]
    if n < 2:
        raise DomainError("at least two replicates are needed")
    results = []
    for i, j in pairs:
        products = sample.values[:, i] * sample.values[:, j]
        spread = float(np.std(products, ddof=1))
        degenerate = not spread > 0
        if degenerate:
            warnings.warn(f"degenerate sample for pair ({i}, {j}): zero variance")
        results.append(CovarianceEstimate(float(products.mean()), spread / math.sqrt(n), degenerate))
    return results


def gaussianity_moments(sample: RandomFieldSample, index: int = 0) -> Dict:
    """Skewness and excess kurtosis of the values at one point."""
    values = sample.values[:, index]
    return {
        "skewness": float(stats.skew(values)),
        "excess_kurtosis": float(stats.kurtosis(values, fisher=True)),
        "n": int(values.size),
    }


def discrete_solution_covariance(
    params: Optional[FrbeParams],
    grid: SpectralGrid,
    p: PointLike,
    q: PointLike,
    amplitude: float = 1.0,
    time_scale: float = 1.0,
) -> float:
    """Exact covariance of the discretized field that the sampler draws from."""
    (tp, xp), (tq, xq) = _as_pair(p), _as_pair(q)
    simulator = SpectralSimulator(grid, params)
    coefficients = simulator._coefficients([(tp, xp), (tq, xq)], amplitude, time_scale)
    return float(2.0 * np.real(np.sum(coefficients[:, 0] * np.conj(coefficients[:, 1]))))


def _all_pairs(n_points: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n_points) for j in range(i, n_points)]


def compare_with_limit(
    sample: RandomFieldSample,
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    pairs: Optional[Sequence[Tuple[int, int]]] = None,
) -> pd.DataFrame:
    """
    Empirical against limit covariances for each point pair.

    Returns:
        DataFrame with columns i, j, empirical, standard_error, limit,
        deviation and z_score
    """
    pairs = list(pairs) if pairs is not None else _all_pairs(sample.n_points)
    estimates = empirical_covariance(sample, pairs)
    rows = []
    for (i, j), est in zip(pairs, estimates):
        p = SpaceTimePoint(*sample.points[i])
        q = SpaceTimePoint(*sample.points[j])
        limit = limit_covariance(regime, params, model, p, q)
        deviation = est.estimate - limit
        z_score = abs(deviation) / est.standard_error if est.standard_error > 0 else math.inf
        rows.append({
            "i": i, "j": j,
            "empirical": est.estimate,
            "standard_error": est.standard_error,
            "limit": limit,
            "deviation": deviation,
            "z_score": z_score,
        })
    return pd.DataFrame(rows)


def mc_convergence_experiment(
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    eps_grid: Sequence[float],
    points: Sequence[PointLike],
    config: McConfig = None,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    focus: float = 64.0,
    discretization: float = 0.05,
) -> pd.DataFrame:
    """
    Monte Carlo convergence report over an eps grid.

    A row is within tolerance when every pair satisfies
    |empirical - limit| <= 3 SE + discretization |limit| + coupling bound.

    Returns:
        DataFrame with columns eps, max_abs_deviation, max_z_score, msd,
        coupling_bound and within_tolerance, eps descending
    """
    config = config or McConfig()
    regime = check_regime(regime, params, model)
    pairs_xy = [_as_pair(p) for p in points]
    pairs = _all_pairs(len(pairs_xy))
    limit_var = {
        k: limit_covariance(regime, params, model, SpaceTimePoint(*pt), SpaceTimePoint(*pt))
        for k, pt in enumerate(pairs_xy)
    }

    rows = []
    for eps in sorted(eps_grid, reverse=True):
        rescaling = make_rescaling(regime, params, model, eps, L)
        sample = sample_rescaled(rescaling, params, model, pairs_xy, config, L, focus)
        table = compare_with_limit(sample, regime, params, model, pairs)
        msd = {t: coupled_msd(regime, params, model, eps, t, L) for t in sorted({t for t, _ in pairs_xy})}
        bounds = np.array([
            coupling_bound(msd[pairs_xy[i][0]], msd[pairs_xy[j][0]], limit_var[i], limit_var[j])
            for i, j in pairs
        ])
        allowed = 3.0 * table["standard_error"] + discretization * table["limit"].abs() + bounds
        rows.append({
            "eps": eps,
            "max_abs_deviation": float(table["deviation"].abs().max()),
            "max_z_score": float(table["z_score"].max()),
            "msd": max(msd.values()),
            "coupling_bound": float(bounds.max()),
            "within_tolerance": bool((table["deviation"].abs() <= allowed).all()),
        })
        logger.info("experiment %s eps=%g: max deviation %.4g, msd %.4g",
                    regime.value, eps, rows[-1]["max_abs_deviation"], rows[-1]["msd"])
    return pd.DataFrame(rows)
