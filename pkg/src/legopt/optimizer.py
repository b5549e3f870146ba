"""Real-coded genetic algorithm over the nine leg dimensions.

The fitness is a weighted sum of peak-torque and energy ratios against a
frozen baseline, plus a large penalty for reach, stiffness and "no worse
than baseline" violations. Lower is better.

Reproducibility: every random draw happens on the calling thread in a fixed
order. Only fitness evaluations are farmed out to worker threads, and
results are consumed in submission order. Populations are ranked by
``(eval, genome)`` lexicographically, so ties never depend on timing.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InvalidDimsError
from .geometry import GENOME_FIELDS, LegGeometry, MaterialParams
from .metrics import ENERGY_MODES, Baseline, MetricValues, evaluate

logger = logging.getLogger(__name__)

AGGREGATIONS = ("mean", "hip")


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 100
    seed: int = 42
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.05
    tournament_size: int = 3
    elitism_count: int = 2
    blend_alpha: float = 0.5
    bound_fraction: float = 0.35
    bounds: tuple[tuple[float, float], ...] | None = None
    reach_slack: float = 0.05
    stiffness_slack: float = 0.15
    penalty: float = 1e4
    weights: tuple[float, float] = (0.5, 0.5)
    aggregation: str = "mean"
    energy_mode: str = "absolute"

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be at least 2")
        if self.generations < 0:
            raise ConfigError("generations must be non-negative")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.mutation_sigma < 0 or self.blend_alpha < 0:
            raise ConfigError("mutation_sigma and blend_alpha must be non-negative")
        if not 1 <= self.tournament_size:
            raise ConfigError("tournament_size must be at least 1")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ConfigError("elitism_count must lie in [0, population_size]")
        if not 0 < self.bound_fraction < 1:
            raise ConfigError("bound_fraction must lie in (0, 1)")
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float)
            if b.shape != (9, 2) or not np.all(b[:, 0] < b[:, 1]):
                raise ConfigError("bounds must be 9 (lower, upper) pairs with lower < upper")
        if self.aggregation not in AGGREGATIONS:
            raise ConfigError(f"aggregation must be one of {AGGREGATIONS}")
        if self.energy_mode not in ENERGY_MODES:
            raise ConfigError(f"energy_mode must be one of {ENERGY_MODES}")
        if not (0 <= self.reach_slack < 1 and 0 <= self.stiffness_slack < 1 and self.penalty >= 0):
            raise ConfigError("slack coefficients must lie in [0, 1) and penalty must be >= 0")
        if len(self.weights) != 2:
            raise ConfigError("weights must have two entries")

    def resolve_bounds(self, initial_genome) -> np.ndarray:
        """``(9, 2)`` array of gene bounds; defaults to +-bound_fraction around the start."""
        if self.bounds is not None:
            return np.asarray(self.bounds, dtype=float)
        g = np.asarray(initial_genome, dtype=float)
        return np.column_stack([g * (1 - self.bound_fraction), g * (1 + self.bound_fraction)])


@dataclass(frozen=True)
class FitnessReport:
    eval: float
    objective: float
    penalty_torque: float
    penalty_energy: float
    penalty_reach: float
    penalty_stiffness: float
    torque_ratio: np.ndarray
    energy_ratio: np.ndarray

    @property
    def penalty_total(self) -> float:
        return self.penalty_torque + self.penalty_energy + self.penalty_reach + self.penalty_stiffness

    @property
    def feasible(self) -> bool:
        return self.penalty_total == 0.0

    def to_dict(self) -> dict:
        return {
            "eval": self.eval,
            "F": self.objective,
            "F_T": self.penalty_torque,
            "F_Q": self.penalty_energy,
            "F_D": self.penalty_reach,
            "F_EI": self.penalty_stiffness,
            "torque_ratio": [float(v) for v in self.torque_ratio],
            "energy_ratio": [float(v) for v in self.energy_ratio],
            "feasible": self.feasible,
        }


def _aggregate(ratios: np.ndarray, how: str) -> float:
    return float(ratios[1]) if how == "hip" else float(np.mean(ratios))


def fitness(metrics: MetricValues, base: Baseline, cfg: GAConfig) -> FitnessReport:
    """Penalized fitness of one design's metrics against the baseline."""
    if np.any(np.abs(base.energy) < 1e-12) or np.any(base.peak_torque <= 0):
        raise ValueError(
            "baseline torque/energy must be non-zero to form ratios "
            "(signed energy over a closed swing is ~0; use absolute mode)"
        )
    t_ratio = metrics.peak_torque / base.peak_torque
    q_ratio = metrics.energy / base.energy
    t_agg = _aggregate(t_ratio, cfg.aggregation)
    q_agg = _aggregate(q_ratio, cfg.aggregation)
    objective = cfg.weights[0] * t_agg + cfg.weights[1] * q_agg
    f_t = max(0.0, t_agg - 1.0)
    f_q = max(0.0, q_agg - 1.0)
    f_d = max(0.0, (1.0 - cfg.reach_slack) * base.reach - metrics.reach)
    f_ei = float(np.sum(np.maximum(0.0, (1.0 - cfg.stiffness_slack) * base.stiffness - metrics.stiffness)))
    total = objective + cfg.penalty * (f_t + f_q + f_d + f_ei)
    return FitnessReport(
        eval=float(total),
        objective=float(objective),
        penalty_torque=f_t,
        penalty_energy=f_q,
        penalty_reach=f_d,
        penalty_stiffness=f_ei,
        torque_ratio=t_ratio,
        energy_ratio=q_ratio,
    )


@dataclass
class LegProblem:
    """Everything held fixed while the nine dimensions vary."""

    initial: LegGeometry
    traj: object
    material: MaterialParams = field(default_factory=MaterialParams)
    energy_mode: str = "absolute"
    inertia: str = "com"
    baseline: Baseline | None = None

    def __post_init__(self):
        if self.baseline is None:
            self.baseline = self.metrics(self.initial)

    @property
    def thicknesses(self) -> np.ndarray:
        return self.initial.thicknesses

    def geometry(self, genome) -> LegGeometry:
        return LegGeometry.from_genome(genome, self.thicknesses)

    def metrics(self, geom: LegGeometry) -> MetricValues:
        return evaluate(geom, self.traj, self.material, self.energy_mode, self.inertia)

    def fitness(self, genome, cfg: GAConfig) -> FitnessReport:
        return fitness(self.metrics(self.geometry(genome)), self.baseline, cfg)


@dataclass(frozen=True)
class Candidate:
    genome: np.ndarray
    fitness: FitnessReport

    def as_dict(self) -> dict:
        return dict(zip(GENOME_FIELDS, (float(v) for v in self.genome)))


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best: FitnessReport


@dataclass
class GAResult:
    best: Candidate
    history: list[GenerationRecord]
    population: np.ndarray
    evals: np.ndarray
    bounds: np.ndarray
    config: GAConfig

    @property
    def best_evals(self) -> np.ndarray:
        return np.array([r.best.eval for r in self.history])

    @property
    def feasible(self) -> bool:
        return self.best.fitness.feasible

    def converged(self, window: int = 10, tol: float = 1e-6) -> bool:
        h = self.best_evals
        if len(h) <= window:
            return False
        return bool(np.max(np.abs(np.diff(h[-window - 1:]))) < tol)

    def stabilized_at(self, tol: float = 1e-6) -> int:
        """First generation from which the best eval stays within ``tol`` of the final value."""
        h = self.best_evals
        off = np.nonzero(np.abs(h - h[-1]) >= tol)[0]
        return int(off[-1] + 1) if len(off) else 0


# --------------------------------------------------------------------------
# genetic operators
# --------------------------------------------------------------------------


def rank_order(population: np.ndarray, evals: np.ndarray) -> np.ndarray:
    """Indices sorting by eval, ties broken by genome lexicographic order."""
    keys = tuple(population[:, ::-1].T) + (evals,)
    return np.lexsort(keys)


def tournament_select(n_ranked: int, k: int, rng: np.random.Generator) -> int:
    """Winner of a size-``k`` tournament over a population sorted best-first."""
    return int(np.min(rng.integers(0, n_ranked, size=k)))


def blend_crossover(p1, p2, alpha: float, rng: np.random.Generator):
    """Per-gene BLX-alpha; identical parents give identical children."""
    u = rng.uniform(-alpha, 1.0 + alpha, size=(2, len(p1)))
    d = p2 - p1
    return p1 + u[0] * d, p1 + u[1] * d


def gaussian_mutation(genome, rate: float, sigma: np.ndarray, rng: np.random.Generator):
    mask = rng.random(len(genome)) < rate
    noise = rng.normal(0.0, 1.0, len(genome)) * sigma
    return np.where(mask, genome + noise, genome)


def clamp(genome, bounds: np.ndarray):
    return np.minimum(np.maximum(genome, bounds[:, 0]), bounds[:, 1])


def next_generation(ranked: np.ndarray, cfg: GAConfig, bounds: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Offspring of a best-first population; the first ``elitism_count`` rows are the elites."""
    n = len(ranked)
    sigma = cfg.mutation_sigma * (bounds[:, 1] - bounds[:, 0])
    out = [row.copy() for row in ranked[: cfg.elitism_count]]
    while len(out) < n:
        p1 = ranked[tournament_select(n, cfg.tournament_size, rng)]
        p2 = ranked[tournament_select(n, cfg.tournament_size, rng)]
        if rng.random() < cfg.crossover_rate:
            c1, c2 = blend_crossover(p1, p2, cfg.blend_alpha, rng)
        else:
            c1, c2 = p1.copy(), p2.copy()
        for child in (c1, c2):
            if len(out) < n:
                out.append(clamp(gaussian_mutation(clamp(child, bounds), cfg.mutation_rate, sigma, rng), bounds))
    return np.array(out)


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def _check_bounds(problem: LegProblem, bounds: np.ndarray) -> None:
    # Wall thickness is fixed, so the lower corner is the tightest geometry.
    try:
        problem.geometry(bounds[:, 0]).validate()
    except InvalidDimsError as exc:
        raise ConfigError(f"gene bounds admit invalid geometry: {exc}") from None


def run_ga(
    cfg: GAConfig,
    problem: LegProblem,
    initial_population=None,
    threads: int = 1,
) -> GAResult:
    """Evolve ``cfg.generations`` generations and return the best candidate.

    The initial population holds the starting design plus uniform samples
    inside the bounds, unless ``initial_population`` is given. History has
    one record per evaluated population (``generations + 1`` entries).
    """
    rng = np.random.default_rng(cfg.seed)
    start = problem.initial.genome()
    bounds = cfg.resolve_bounds(start)
    _check_bounds(problem, bounds)

    if initial_population is None:
        pop = rng.uniform(bounds[:, 0], bounds[:, 1], size=(cfg.population_size, 9))
        pop[0] = clamp(start, bounds)
    else:
        pop = np.array(initial_population, dtype=float)
        if pop.shape != (cfg.population_size, 9):
            raise ConfigError(f"initial population must have shape ({cfg.population_size}, 9)")
        pop = np.array([clamp(g, bounds) for g in pop])

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def evaluate_all(genomes):
        if pool is None:
            return [problem.fitness(g, cfg) for g in genomes]
        return list(pool.map(lambda g: problem.fitness(g, cfg), genomes))

    try:
        reports = evaluate_all(pop)
        history: list[GenerationRecord] = []
        for gen in range(cfg.generations + 1):
            evals = np.array([r.eval if np.isfinite(r.eval) else np.inf for r in reports])
            order = rank_order(pop, evals)
            pop = pop[order]
            reports = [reports[i] for i in order]
            history.append(GenerationRecord(gen, reports[0]))
            logger.debug("generation %d best eval %.9g", gen, reports[0].eval)
            if gen == cfg.generations:
                break
            children = next_generation(pop, cfg, bounds, rng)
            e = cfg.elitism_count
            reports = reports[:e] + evaluate_all(children[e:])
            pop = children
    finally:
        if pool is not None:
            pool.shutdown()

    best = Candidate(genome=pop[0].copy(), fitness=reports[0])
    if not best.fitness.feasible:
        logger.warning("no feasible candidate found; returning best by eval")
    return GAResult(
        best=best,
        history=history,
        population=pop,
        evals=np.array([r.eval for r in reports]),
        bounds=bounds,
        config=cfg,
    )


def with_seed(cfg: GAConfig, seed: int) -> GAConfig:
    return replace(cfg, seed=seed)
