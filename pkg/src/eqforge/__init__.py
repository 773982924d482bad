"""eqforge: equilibrium engine for data-contribution games.

Honest and malicious contributors pick sample counts, a payoff oracle
maps the profile to model accuracy, and the engine derives, certifies
and stress-tests Nash equilibrium strategies on integer count grids.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .advisor import (
    ExplorationStep,
    ExplorationTrace,
    ExternalAdvisor,
    Proposal,
    explore,
    external_propose,
    heuristic_propose,
)
from .errors import (
    AdvisorError,
    BudgetExceededError,
    ConfigError,
    EqforgeError,
    OracleError,
    OracleProtocolError,
    OracleRangeError,
    OracleRemoteError,
    OracleSpawnError,
    OracleTimeoutError,
    ProfileError,
)
from .game import (
    BuiltinAccuracyParams,
    GameConfig,
    OracleBinding,
    Outcome,
    PlayerSpec,
    check_profile,
    default_config,
    load_config,
    utilities,
    validate_config,
)
from .oracle import (
    BuiltinOracle,
    CachingOracle,
    ExternalOracle,
    MonotonicityReport,
    builtin_accuracy,
    evaluate,
    monotonicity_report,
    open_oracle,
    query_accuracy,
)
from .scenario import (
    PerturbationSpec,
    RobustnessReport,
    RobustnessRow,
    evaluate_profiles,
    generate_scenarios,
    write_report_csv,
    write_summary_json,
)
from .solver import (
    DynamicsStep,
    Grid,
    NashCertificate,
    Trace,
    best_response,
    enumerate_equilibria,
    nash_certificate,
    run_dynamics,
)

__version__ = "0.1.0"

__all__ = [
    "AdvisorError",
    "BudgetExceededError",
    "BuiltinAccuracyParams",
    "BuiltinOracle",
    "CachingOracle",
    "ConfigError",
    "DynamicsStep",
    "EqforgeError",
    "ExplorationStep",
    "ExplorationTrace",
    "ExternalAdvisor",
    "ExternalOracle",
    "GameConfig",
    "Grid",
    "KERNEL_BACKEND",
    "MonotonicityReport",
    "NashCertificate",
    "OracleBinding",
    "OracleError",
    "OracleProtocolError",
    "OracleRangeError",
    "OracleRemoteError",
    "OracleSpawnError",
    "OracleTimeoutError",
    "Outcome",
    "PerturbationSpec",
    "PlayerSpec",
    "ProfileError",
    "Proposal",
    "RobustnessReport",
    "RobustnessRow",
    "Trace",
    "best_response",
    "builtin_accuracy",
    "check_profile",
    "default_config",
    "enumerate_equilibria",
    "evaluate",
    "evaluate_profiles",
    "explore",
    "external_propose",
    "generate_scenarios",
    "heuristic_propose",
    "load_config",
    "monotonicity_report",
    "nash_certificate",
    "open_oracle",
    "query_accuracy",
    "run_dynamics",
    "utilities",
    "validate_config",
    "write_report_csv",
    "write_summary_json",
]
