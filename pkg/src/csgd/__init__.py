"""Complex stochastic gradient descent with reproducing-kernel recovery experiments."""

from .bias import BiasExperiment, BiasProfile, kaczmarz_decay, run_bias, smallest_direction_dominance
from .estimators import ComplexSGDRegressor, KernelSGDRegressor
from .exceptions import (
    CSGDError,
    ConfigError,
    ContractViolation,
    DegenerateRowError,
    DimensionError,
    DivergenceError,
    DomainError,
    IllPosedError,
    NumericalError,
    OracleError,
    SamplingError,
    SolverError,
)
from .experiments import RecoveryResult, recover
from .kernels import GramSystem, KernelSpec, expansion_eval, gram, kernel_eval, kernel_matrix, representer_solve
from .linalg import SVDResult, hermitian_eig, inner, inner_real, solve_hpd, svd
from .objectives import (
    AssumptionReport,
    LeastSquaresObjective,
    RegularizedLSObjective,
    SampledObjective,
    assumption_audit,
    fd_wirtinger_gradient,
)
from .rng import SplitMix64, derive_seed
from .scenarios import (
    ScenarioDataset,
    SuperoscParams,
    blaschke_derivative_at_root,
    blaschke_eval,
    build_blaschke,
    build_rbf_supershift,
    build_superosc,
    eval_limit,
    eval_superosc_closed_form,
    sample_disk_roots,
    superosc_coefficients,
)
from .sgd import (
    MonteCarloResult,
    ProblemConstants,
    RunConfig,
    StepSchedule,
    Trace,
    monte_carlo,
    run,
    theorem_bound,
    weighted_average,
)

__version__ = "0.1.0"
