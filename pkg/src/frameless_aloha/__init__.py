"""Frameless ALOHA: contention simulation, SIC peeling, and asymptotic analysis.

The package splits the protocol the same way the analysis does: `access`
defines who transmits when, `graph` peels the resulting bipartite graph,
`evolution` predicts the asymptotic fixed point, `optimize` searches for the
best expected slot degree, and `simulate` measures everything at finite N.
"""

from .access import (
    IRREGULAR_BASELINE,
    AccessSchedule,
    IrregularDistribution,
    generate_round,
    generate_round_irregular,
    slot_access_probability,
    slot_degree_pmf,
    user_transmits,
)
from .evolution import (
    EvolutionResult,
    classical_sa_throughput,
    evolve,
    min_degree_for_target,
    resolution_upper_bound,
    throughput,
)
from .graph import (
    ContentionGraph,
    IncrementalPeeler,
    PeelResult,
    build_graph,
    degree_histograms,
    peel,
    peel_oracle,
)
from .optimize import (
    DEFAULT_BETA_GRID,
    DEFAULT_EMPIRICAL_GRID,
    GridSpec,
    OptimizationResult,
    optimize_beta_asymptotic,
    optimize_beta_empirical,
    optimize_operating_point,
)
from .prng import derive_seed
from .simulate import (
    AggregateStats,
    ConstantBeta,
    FixedM,
    Frameless,
    Irregular,
    PerSlot,
    RoundConfig,
    RoundOutcome,
    aggregate_outcomes,
    monte_carlo,
    run_multi_round,
    run_round_fixed,
    run_round_frameless,
)

__all__ = [
    "AccessSchedule",
    "AggregateStats",
    "ConstantBeta",
    "ContentionGraph",
    "DEFAULT_BETA_GRID",
    "DEFAULT_EMPIRICAL_GRID",
    "EvolutionResult",
    "FixedM",
    "Frameless",
    "GridSpec",
    "IRREGULAR_BASELINE",
    "IncrementalPeeler",
    "Irregular",
    "IrregularDistribution",
    "OptimizationResult",
    "PeelResult",
    "PerSlot",
    "RoundConfig",
    "RoundOutcome",
    "aggregate_outcomes",
    "build_graph",
    "classical_sa_throughput",
    "degree_histograms",
    "derive_seed",
    "evolve",
    "generate_round",
    "generate_round_irregular",
    "min_degree_for_target",
    "monte_carlo",
    "optimize_beta_asymptotic",
    "optimize_beta_empirical",
    "optimize_operating_point",
    "peel",
    "peel_oracle",
    "resolution_upper_bound",
    "run_multi_round",
    "run_round_fixed",
    "run_round_frameless",
    "slot_access_probability",
    "slot_degree_pmf",
    "throughput",
    "user_transmits",
]

__version__ = "0.1.0"
