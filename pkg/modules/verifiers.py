"""
Verification suites behind `majority_lab.py verify`
Each suite returns a SuiteReport; hard checks decide the exit code, findings are reported only
"""
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from .logger import log_debug, log_error
from .oracle import BitString, QueryLedger, Verdict, make_stream
from .algorithms import (default_budget, floor_log2, log2_guarded, majority_prefix_length,
                         max_queried_index, run_on, truncated_zero_error)
from .analysis import (ars_average, classical_error_lower_bound, exact_cost,
                       factorial_valuation_table, floor_sum_table, hamming_weight_table,
                       near_tight_mixture_error, near_tight_worst_case_error,
                       parity_depth_lower_bound, strict_majority_count, AdversarialMixture)
from .bruteforce import (QueryFamily, census_max_total_cost, exact_M_distribution,
                         exact_first_phase_cancellations, exact_prefix_moments,
                         exhaustive_cost_census, first_phase_cancellation_formula, optimal_depth)
from .quantum import OracleUnitary, QuantumState, apply_oracle, compile_run, xor_gadget_distribution
from .experiments import ExperimentConfig, run_experiment, sweep_classes, unknown_rate_experiment

Check = namedtuple('Check', ['name', 'passed', 'detail', 'hard'])

SUITES = ('exact', 'sandwich', 'appendix', 'lowerbounds', 'quantum', 'montecarlo')
SANDWICH_D = 3


class SuiteReport:
    def __init__(self, name):
        self.name = name
        self.checks = []

    def check(self, name, passed, detail='', hard=True):
        self.checks.append(Check(name, bool(passed), detail, hard))
        if hard and not passed:
            log_error(f"[{self.name}] FAILED {name}: {detail}")
        return passed

    def finding(self, name, passed, detail=''):
        return self.check(name, passed, detail, hard=False)

    @property
    def failures(self):
        return [c for c in self.checks if c.hard and not c.passed]

    @property
    def findings(self):
        return [c for c in self.checks if not c.hard]

    @property
    def ok(self):
        return not self.failures

    def lines(self):
        for c in self.checks:
            status = 'PASS' if c.passed else ('FAIL' if c.hard else 'NOTE')
            yield f"[{self.name}] {status} {c.name}" + (f" - {c.detail}" if c.detail else '')


def verify_exact(n_max=14, truncation_n_max=12):
    report = SuiteReport('exact')
    for n in range(0, n_max + 1):
        for algorithm in ('trivial', 'oblivious', 'greedy'):
            census = exhaustive_cost_census(n, algorithm)
            wrong = sum(entry.wrong for entry in census.values())
            report.check(f"{algorithm} correct N={n}", wrong == 0, f"{wrong} wrong verdicts")
            if algorithm == 'oblivious':
                worst = census_max_total_cost(census)
                report.check(f"oblivious max cost N={n}", worst == exact_cost(n),
                             f"max {worst}, N+1-w(N) = {exact_cost(n)}")
                homogeneous = run_on('oblivious', BitString.from_counts(n, 0)).total_cost
                report.check(f"oblivious homogeneous attains N={n}", homogeneous == exact_cost(n),
                             f"1^N costs {homogeneous}")
    for n in range(1, truncation_n_max + 1):
        wrong = 0
        for algorithm in ('oblivious', 'greedy'):
            for v in range(1 << n):
                x = BitString.from_int(v, n)
                truth = x.label()
                for budget in range(0, n + 2):
                    result = truncated_zero_error(algorithm, x, (v, budget), budget)
                    if result.verdict is not Verdict.UNKNOWN and not result.verdict.agrees_with(truth):
                        wrong += 1
                    if result.verdict is Verdict.UNKNOWN and result.total_cost != budget:
                        wrong += 1
        report.check(f"zero-sided truncation N={n}", wrong == 0, f"{wrong} violations")
    return report


def verify_sandwich(n_max=14):
    report = SuiteReport('sandwich')
    for n in range(1, n_max + 1):
        refined = max(2 * floor_log2(n) - 3, 0)
        weak_slack = SANDWICH_D * log2_guarded(n) ** 2
        over_weak = over_refined = under = prefix_breaks = 0
        worst_gap = None
        for v in range(1 << n):
            x = BitString.from_int(v, n)
            greedy = run_on('greedy', x, tracing=True)
            m = majority_prefix_length(x)
            c_op = run_on('oblivious', x.prefix(m)).comparisons
            gap = greedy.comparisons - c_op
            worst_gap = gap if worst_gap is None else max(worst_gap, gap)
            over_weak += gap > weak_slack
            over_refined += gap > refined
            under += gap < 0
            top = max_queried_index(greedy.ledger)
            prefix_breaks += top is not None and top >= m
        report.check(f"greedy <= C_OP(Y) + d log^2 N, N={n}", over_weak == 0, f"{over_weak} inputs over")
        report.check(f"greedy stays inside prefix Y, N={n}", prefix_breaks == 0, f"{prefix_breaks} inputs")
        report.finding(f"refined gap max(2 floor(log N) - 3, 0) = {refined}, N={n}", over_refined == 0,
                       f"largest gap {worst_gap}, {over_refined} inputs over")
        report.finding(f"C_OP(Y) <= C_GP(X), N={n}", under == 0, f"{under} inputs under")
    return report


def verify_appendix(n_max=14):
    report = SuiteReport('appendix')
    odd_mismatch = []
    for n in range(2, n_max + 1):
        for ones in range(0, n + 1):
            zeros = n - ones
            exact = exact_first_phase_cancellations(ones, zeros)
            closed = Fraction((n // 2) * 2 * ones * zeros, n * (n - 1))
            report.check(f"E[c] closed form A={ones} B={zeros}", exact == closed, f"{exact} vs {closed}")
            if exact != first_phase_cancellation_formula(ones, zeros):
                odd_mismatch.append((ones, zeros))
    report.finding("E[c] = AB/(N-1)", not odd_mismatch,
                   f"{len(odd_mismatch)} classes differ (all odd N; the exact value is AB/N there)"
                   if odd_mismatch else "all classes")
    for n in range(1, n_max + 1):
        for ones in range(0, n + 1):
            moments = exact_prefix_moments(ones, n - ones)
            expected = [Fraction(k * ones, n) for k in range(n + 1)]
            report.check(f"E[C_k] = kA/N, A={ones} N={n}", moments == expected)
            pmf = exact_M_distribution(ones, n - ones)
            report.check(f"M pmf sums to 1, A={ones} N={n}", sum(pmf.values()) == 1)
    return report


def verify_lowerbounds(n_max=60, hamming_n_max=10 ** 6, brute_even_max=20, optimal_n_max=None):
    report = SuiteReport('lowerbounds')
    weights = hamming_weight_table(hamming_n_max)
    ns = np.arange(hamming_n_max + 1, dtype=np.int64)
    floor_sums = floor_sum_table(hamming_n_max)
    report.check(f"floor-sum identity N <= {hamming_n_max}",
                 bool(np.array_equal(floor_sums[1:], (ns - weights)[1:])))
    valuations = factorial_valuation_table(hamming_n_max)
    report.check(f"2-adic valuation of N! = N - w(N), N <= {hamming_n_max}",
                 bool(np.array_equal(valuations[1:], (ns - weights)[1:])))
    # 4 t (N - t + 1) > N (N + 1) is the integer form of the bound exceeding 1/4
    t = (ns[1:] + 1) // 2
    m = ns[1:]
    exceeds = 4 * t * (m - t + 1) > m * (m + 1)
    report.check(f"classical error bound > 1/4, N <= {hamming_n_max}", bool(exceeds.all()))
    for n in range(2, n_max + 1, 2):
        count, valuation = strict_majority_count(n)
        w = int(weights[n]) if n <= hamming_n_max else bin(n).count('1')
        report.check(f"strict majority count valuation N={n}", valuation == w - 1,
                     f"count {count}, valuation {valuation}, w(N)-1 = {w - 1}")
    for n in range(2, brute_even_max + 1, 2):
        popcounts = hamming_weight_table((1 << n) - 1)
        brute = int(np.count_nonzero(popcounts > n // 2))
        report.check(f"strict majority count by enumeration N={n}", brute == strict_majority_count(n)[0])
    for n in range(1, n_max + 1):
        bound = parity_depth_lower_bound(n)
        report.check(f"parity certificate lower bound N={n}", bound == exact_cost(n), f"{bound}")
    for family in QueryFamily:
        top = family.max_n if optimal_n_max is None else min(optimal_n_max, family.max_n)
        for n in range(1, top + 1):
            depth = optimal_depth(n, family)
            report.check(f"optimal {family.value} depth N={n}", depth == exact_cost(n),
                         f"depth {depth}, N+1-w(N) = {exact_cost(n)}")
    for n in (2, 3, 4):
        bound = classical_error_lower_bound(n)
        beta = AdversarialMixture(n).beta
        mixture = near_tight_mixture_error(n, beta)
        worst = near_tight_worst_case_error(n, beta)
        report.finding(f"near-tight strategy N={n}", mixture == bound and worst == bound,
                       f"mixture error {mixture}, worst case {worst}, bound {bound}")
    return report


def verify_quantum(n_max=14, seed=7):
    report = SuiteReport('quantum')
    for x0 in (0, 1):
        for x1 in (0, 1):
            ledger = QueryLedger()
            probs = xor_gadget_distribution(x0, x1, ledger)
            wrong = float(probs[1 - (x0 ^ x1)])
            report.check(f"XOR gadget ({x0},{x1})", wrong <= 1e-18 and ledger.quantum_queries == 1,
                         f"wrong-outcome probability {wrong:.3e}, {ledger.quantum_queries} oracle calls")
    rng = make_stream(seed, 0)
    for n in (1, 2, 3, 5, 8):
        x = BitString(rng.integers(0, 2, size=n).tolist())
        oracle = OracleUnitary(x, workspace_qubits=1)
        raw = rng.normal(size=1 << oracle.num_qubits) + 1j * rng.normal(size=1 << oracle.num_qubits)
        state = QuantumState(oracle.num_qubits, raw / np.linalg.norm(raw))
        original = state.amplitudes.copy()
        apply_oracle(apply_oracle(state, oracle), oracle)
        deviation = float(np.max(np.abs(state.amplitudes - original)))
        report.check(f"oracle self-inverse N={n}", deviation <= 1e-12, f"max deviation {deviation:.3e}")
    for n in range(1, n_max + 1):
        mismatches = 0
        for v in range(1 << n):
            x = BitString.from_int(v, n)
            for algorithm in ('trivial', 'oblivious', 'greedy'):
                result = run_on(algorithm, x, tracing=True)
                if compile_run(result.ledger, n, bits=x) != result.total_cost:
                    mismatches += 1
        report.check(f"quantum cost = classical cost N={n}", mismatches == 0, f"{mismatches} runs differ")
    return report


def verify_montecarlo(d, n=4096, trials=10_000, seed=42, epsilon=0.05, workers=1,
                      uniform_trials=100_000, sweep_trials=200):
    """Acceptance-size Monte Carlo checks; `d` is the calibrated budget constant.

    The defaults run balanced and budgeted classes with 10^4 trials at N = 4096
    and the uniform class with 10^5 trials.
    """
    report = SuiteReport('montecarlo')
    root = math.sqrt(n)
    log_n = log2_guarded(n)
    balanced = run_experiment(ExperimentConfig(n, input_class='balanced', algorithm='greedy', trials=trials,
                                               master_seed=seed, epsilon=epsilon, d=d, workers=workers))
    mean, std = balanced.stats.mean, balanced.stats.std
    low, high = 2 * n / 3 - 3 * root, 2 * n / 3 + 2 * log_n + 3 * root
    report.check(f"balanced greedy mean in [{low:.1f}, {high:.1f}]", low <= mean <= high, f"mean {mean:.2f}")
    report.check("balanced greedy std <= 4 sqrt(N)", std <= 4 * root, f"std {std:.2f}")
    for tail in balanced.tail_reports:
        if tail.asserted:
            report.check(f"greedy tail r={tail.r:g}", tail.passed, repr(tail))
        else:
            report.finding(f"greedy tail r={tail.r:g} (cap > 1/2)", tail.passed, repr(tail))
    report.finding("M concentrates near N^2/(2A)", True,
                   f"mean M {balanced.prefix_mean:.2f}, center {balanced.prefix_center:.2f}")
    oblivious = run_experiment(ExperimentConfig(n, input_class='balanced', algorithm='oblivious',
                                                trials=trials, master_seed=seed, d=d, workers=workers))
    for tail in oblivious.tail_reports:
        if tail.asserted:
            report.check(f"oblivious tail r={tail.r:g}", tail.passed, repr(tail))
    uniform = run_experiment(ExperimentConfig(n, input_class='uniform', algorithm='greedy',
                                              trials=uniform_trials, master_seed=seed,
                                              workers=workers), track_prefix=False)
    target = ars_average(n)
    report.check("uniform greedy mean within 5 log2 N of 2N/3 - sqrt(8N/9pi)",
                 abs(uniform.stats.mean - target) <= 5 * log_n,
                 f"mean {uniform.stats.mean:.2f}, formula {target:.2f}")
    budget = default_budget(n, epsilon, d)
    rate = unknown_rate_experiment(ExperimentConfig(n, input_class='balanced', algorithm='greedy',
                                                    trials=trials, master_seed=seed, epsilon=epsilon,
                                                    d=d, budget=budget, workers=workers))
    report.check(f"Unknown rate <= {epsilon} at budget {budget}", rate <= epsilon, f"rate {rate:.4f}")
    sweep = sweep_classes(n, [n // 2, n // 2 + n // 8, n // 2 + n // 4, n], trials=sweep_trials,
                          master_seed=seed, workers=workers)
    worst = max(sweep, key=sweep.get)
    slack = 3 * root / math.sqrt(sweep_trials)
    report.check("balanced class is the worst case",
                 sweep[n // 2] + slack >= sweep[worst], f"means {sweep}")
    return report


SUITE_RUNNERS = {
    'exact': verify_exact,
    'sandwich': verify_sandwich,
    'appendix': verify_appendix,
    'lowerbounds': verify_lowerbounds,
    'quantum': verify_quantum,
    'montecarlo': verify_montecarlo,
}


def run_suites(names, **options):
    """Run the named suites; `options` maps suite name -> keyword arguments."""
    if 'all' in names:
        names = list(SUITES)
    reports = []
    for name in names:
        if name not in SUITE_RUNNERS:
            raise ValueError(f"unknown suite {name!r}; expected one of {SUITES} or 'all'")
        log_debug(f"verify: running suite {name}")
        reports.append(SUITE_RUNNERS[name](**options.get(name, {})))
    return reports
