"""
Modules package for majority-lab
Query oracle, block algorithms, closed-form bounds, exhaustive search,
quantum gadget simulation and the Monte Carlo harness for MAJORITY
"""

from .logger import (
    log_error,
    log_debug,
    get_base_dir,
    set_log_dir,
    set_debug_logging_enabled,
    is_debug_logging_enabled
)
from .config import LabConfig, ConfigError, parse_seed, SEED_ENV_VAR
from .oracle import (
    BitString,
    MajorityLabel,
    Verdict,
    QueryLedger,
    CountingOracle,
    QueryError,
    BudgetExhausted,
    TraceEntry,
    replay_trace,
    make_stream,
    random_permutation,
    permute_input,
    random_input,
    majority_label
)
from .blocks import Block, BlockList, BlockInvariantError
from .algorithms import (
    RunResult,
    ALGORITHMS,
    trivial_majority,
    oblivious_pairing,
    greedy_pairing,
    run_on,
    randomized,
    truncated_zero_error,
    fallback_exact,
    default_budget,
    majority_prefix_length
)
from .analysis import (
    hamming_weight,
    exact_cost,
    floor_sum_identity,
    factorial_two_adic_valuation,
    strict_majority_count,
    parity_tree_divisibility_certificate,
    parity_depth_lower_bound,
    ars_average,
    zero_sided_lower_bound,
    classical_error_lower_bound,
    AdversarialMixture,
    near_tight_classical_strategy,
    near_tight_error,
    BoundsTable,
    bounds_rows
)
from .bruteforce import (
    GuardError,
    QueryFamily,
    KnowledgeState,
    optimal_depth,
    optimal_certificate,
    exact_first_phase_cancellations,
    exact_M_distribution,
    exact_prefix_moments,
    exhaustive_cost_census
)
from .quantum import (
    QuantumState,
    OracleUnitary,
    LayoutMismatch,
    MalformedTraceError,
    apply_oracle,
    xor_gadget,
    compile_run
)
from .experiments import (
    ExperimentConfig,
    CostStats,
    TailReport,
    ZeroSidedContractBreach,
    run_experiment,
    unknown_rate_experiment,
    emit_results,
    load_results,
    calibrate
)
from .verifiers import SuiteReport, SUITES, run_suites

__all__ = [
    'log_error',
    'log_debug',
    'get_base_dir',
    'set_log_dir',
    'set_debug_logging_enabled',
    'is_debug_logging_enabled',
    'LabConfig',
    'ConfigError',
    'parse_seed',
    'SEED_ENV_VAR',
    'BitString',
    'MajorityLabel',
    'Verdict',
    'QueryLedger',
    'CountingOracle',
    'QueryError',
    'BudgetExhausted',
    'TraceEntry',
    'replay_trace',
    'make_stream',
    'random_permutation',
    'permute_input',
    'random_input',
    'majority_label',
    'Block',
    'BlockList',
    'BlockInvariantError',
    'RunResult',
    'ALGORITHMS',
    'trivial_majority',
    'oblivious_pairing',
    'greedy_pairing',
    'run_on',
    'randomized',
    'truncated_zero_error',
    'fallback_exact',
    'default_budget',
    'majority_prefix_length',
    'hamming_weight',
    'exact_cost',
    'floor_sum_identity',
    'factorial_two_adic_valuation',
    'strict_majority_count',
    'parity_tree_divisibility_certificate',
    'parity_depth_lower_bound',
    'ars_average',
    'zero_sided_lower_bound',
    'classical_error_lower_bound',
    'AdversarialMixture',
    'near_tight_classical_strategy',
    'near_tight_error',
    'BoundsTable',
    'bounds_rows',
    'GuardError',
    'QueryFamily',
    'KnowledgeState',
    'optimal_depth',
    'optimal_certificate',
    'exact_first_phase_cancellations',
    'exact_M_distribution',
    'exact_prefix_moments',
    'exhaustive_cost_census',
    'QuantumState',
    'OracleUnitary',
    'LayoutMismatch',
    'MalformedTraceError',
    'apply_oracle',
    'xor_gadget',
    'compile_run',
    'ExperimentConfig',
    'CostStats',
    'TailReport',
    'ZeroSidedContractBreach',
    'run_experiment',
    'unknown_rate_experiment',
    'emit_results',
    'load_results',
    'calibrate',
    'SuiteReport',
    'SUITES',
    'run_suites',
]
