"""
Monte Carlo harness for the randomized pairing algorithms
Seeded per-trial streams, ordered reduction, CostStats / TailReport, CSV and JSON output
"""
import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from .logger import log_debug, log_error
from .config import ConfigError
from .oracle import (BitString, BudgetExhausted, CountingOracle, Verdict, make_stream,
                     permute_input, random_input)
from .algorithms import ALGORITHMS, RunResult, default_budget, get_algorithm, majority_prefix_length
from .analysis import greedy_tail_threshold, oblivious_tail_threshold, prefix_center, tail_cap

INPUT_CLASSES = ('fixed', 'balanced', 'uniform')
OUTPUT_FORMATS = ('csv', 'json')
EXECUTORS = ('auto', 'thread', 'process')
COMPACT_ABOVE_N = 1024
PROCESS_POOL_MIN_N = 1024
MAX_CHUNKS_PER_WORKER = 8

STATS_COLUMNS = ['N', 'A', 'B', 'algorithm', 'trials', 'seed',
                 'mean', 'var', 'min', 'p50', 'p90', 'p99', 'max']
TAIL_COLUMNS = ['threshold', 'empirical', 'cap', 'pass']
CALIBRATION_COLUMNS = ['phase', 'N', 'd', 'budget', 'trials', 'unknown_rate', 'pass']


class ZeroSidedContractBreach(AssertionError):
    """A run answered something other than Unknown and got it wrong."""


class ExperimentConfig:
    """One Monte Carlo experiment: input class, algorithm, trial count, seeds and bound parameters.

    `d` has no library default: the CLI takes it from LabConfig.budget_d or
    --d. Without it no tail reports are produced and no default budget exists.
    """

    def __init__(self, n, ones=None, input_class='fixed', algorithm='greedy', trials=1000,
                 master_seed=42, epsilon=0.05, tail_r=(1.0, 2.0, 4.0), d=None, budget=None,
                 workers=1, executor='auto', compact=None, max_n=1 << 20,
                 output_path=None, output_format='csv'):
        self.n = n
        self.input_class = input_class
        self.ones = ones
        self.algorithm = algorithm
        self.trials = trials
        self.master_seed = master_seed
        self.epsilon = epsilon
        self.tail_r = list(tail_r)
        self.d = d
        self.budget = budget
        self.workers = workers
        self.executor = executor
        self.compact = compact
        self.max_n = max_n
        self.output_path = output_path
        self.output_format = output_format
        self.validate()

    @classmethod
    def from_lab_config(cls, lab_config, **overrides):
        """Seed the experiment from LabConfig defaults; keyword overrides win."""
        values = {
            'trials': lab_config.trials,
            'master_seed': lab_config.default_seed,
            'epsilon': lab_config.epsilon,
            'tail_r': lab_config.tail_r,
            'd': lab_config.budget_d,
            'workers': lab_config.workers,
            'executor': lab_config.executor,
            'max_n': lab_config.max_n,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ConfigError(f"N must be a non-negative integer, got {self.n!r}")
        if self.n > self.max_n:
            raise ConfigError(f"N={self.n} exceeds max_n={self.max_n}")
        if self.input_class not in INPUT_CLASSES:
            raise ConfigError(f"input class must be one of {INPUT_CLASSES}, got {self.input_class!r}")
        if self.input_class == 'fixed':
            if self.ones is None or not 0 <= self.ones <= self.n:
                raise ConfigError(f"fixed class needs 0 <= A <= N, got A={self.ones!r}, N={self.n}")
        elif self.input_class == 'balanced':
            self.ones = self.n - self.n // 2
        else:
            self.ones = None
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {sorted(ALGORITHMS)}, got {self.algorithm!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials!r}")
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if any(r < 1 for r in self.tail_r):
            raise ConfigError(f"tail parameters r must be >= 1, got {self.tail_r}")
        if self.d is not None and self.d <= 0:
            raise ConfigError(f"d must be positive, got {self.d!r}")
        if self.budget is not None and self.budget < 0:
            raise ConfigError(f"budget must be non-negative, got {self.budget!r}")
        if self.executor not in EXECUTORS:
            raise ConfigError(f"executor must be one of {EXECUTORS}, got {self.executor!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        self.workers = max(1, int(self.workers))
        self.master_seed = int(self.master_seed) & ((1 << 64) - 1)
        return self

    @property
    def zeros(self):
        return None if self.ones is None else self.n - self.ones

    @property
    def pool_kind(self):
        """'thread' or 'process'; 'auto' picks processes for CPU-bound runs at large N."""
        if self.executor != 'auto':
            return self.executor
        return 'process' if self.workers > 1 and self.n >= PROCESS_POOL_MIN_N else 'thread'

    @property
    def use_compact(self):
        return self.n > COMPACT_ABOVE_N if self.compact is None else bool(self.compact)

    def replace(self, **changes):
        values = dict(self.__dict__)
        if 'input_class' in changes or 'n' in changes:
            values['ones'] = None if changes.get('input_class', self.input_class) != 'fixed' else values['ones']
        values.update(changes)
        return ExperimentConfig(**values)


class CostStats:
    """Summary of a sample of per-trial costs."""

    def __init__(self, samples):
        values = np.asarray(samples, dtype=np.float64)
        if values.size == 0:
            raise ValueError("CostStats needs at least one sample")
        self.count = int(values.size)
        self.mean = float(values.mean())
        self.variance = float(values.var())
        self.min = float(values.min())
        self.max = float(values.max())
        self.p50, self.p90, self.p99 = (float(q) for q in np.quantile(values, [0.5, 0.9, 0.99]))
        low, high = int(math.floor(self.min)), int(math.floor(self.max))
        counts, edges = np.histogram(values, bins=np.arange(low, high + 2))
        self.histogram = (counts.tolist(), edges.tolist())

    @property
    def std(self):
        return math.sqrt(self.variance)

    def __repr__(self):
        return (f"CostStats(count={self.count}, mean={self.mean:.4f}, var={self.variance:.4f}, "
                f"min={self.min:g}, p50={self.p50:g}, max={self.max:g})")


class TailReport:
    """Empirical Pr[cost >= threshold] against a theoretical cap with binomial slack."""

    def __init__(self, threshold, empirical, cap, trials, r=None, source=''):
        self.threshold = float(threshold)
        self.empirical = float(empirical)
        self.cap = float(cap)
        self.trials = trials
        self.r = r
        self.source = source
        self.slack = 3 * math.sqrt(self.cap / trials + 1 / trials)
        self.passed = self.empirical <= self.cap + self.slack

    @property
    def asserted(self):
        """Caps above 1/2 say nothing useful and are reported only."""
        return self.cap <= 0.5

    @property
    def failed(self):
        return self.asserted and not self.passed

    @classmethod
    def from_samples(cls, samples, threshold, cap, r=None, source=''):
        values = np.asarray(samples)
        empirical = float(np.count_nonzero(values >= threshold)) / values.size
        return cls(threshold, empirical, cap, values.size, r=r, source=source)

    def to_record(self):
        return {'threshold': _round9(self.threshold), 'empirical': _round9(self.empirical),
                'cap': _round9(self.cap), 'pass': self.passed}

    def __repr__(self):
        return (f"TailReport({self.source} r={self.r}: Pr[>= {self.threshold:.1f}] = "
                f"{self.empirical:.4g} vs cap {self.cap:.4g}, pass={self.passed})")


class ExperimentResult:
    """Everything one run_experiment call produced."""

    def __init__(self, config: ExperimentConfig, comparisons, total_costs, unknown_count,
                 prefix_lengths, tail_reports):
        self.config = config
        self.comparisons = comparisons
        self.total_costs = total_costs
        self.unknown_count = unknown_count
        self.prefix_lengths = prefix_lengths
        self.tail_reports = tail_reports
        self.stats = CostStats(comparisons)

    @property
    def unknown_rate(self):
        return self.unknown_count / self.config.trials

    @property
    def prefix_mean(self) -> Optional[float]:
        if self.prefix_lengths is None:
            return None
        return float(np.mean(self.prefix_lengths))

    @property
    def prefix_center(self) -> Optional[float]:
        if self.config.ones is None:
            return None
        return prefix_center(self.config.ones, self.config.zeros)

    def stats_record(self):
        cfg, s = self.config, self.stats
        return {
            'N': cfg.n, 'A': cfg.ones, 'B': cfg.zeros, 'algorithm': cfg.algorithm,
            'trials': cfg.trials, 'seed': cfg.master_seed,
            'mean': _round9(s.mean), 'var': _round9(s.variance), 'min': _round9(s.min),
            'p50': _round9(s.p50), 'p90': _round9(s.p90), 'p99': _round9(s.p99), 'max': _round9(s.max),
        }


# ---------------------------------------------------------------------------
# Trials
# ---------------------------------------------------------------------------

def trial_input(config: ExperimentConfig, rng) -> BitString:
    if config.input_class == 'uniform':
        return random_input(config.n, rng)
    return BitString.from_counts(config.ones, config.zeros)


def run_trial(config: ExperimentConfig, trial: int, track_prefix=False):
    """(comparisons, total_cost, unknown, M or None) for one trial on stream (seed, trial)."""
    rng = make_stream(config.master_seed, trial)
    x = trial_input(config, rng)
    permuted, _ = permute_input(x, rng)
    oracle = CountingOracle(permuted, budget=config.budget)
    func = get_algorithm(config.algorithm)
    try:
        result: RunResult = func(oracle, compact=config.use_compact)
        verdict = result.verdict
    except BudgetExhausted:
        verdict = Verdict.UNKNOWN
    if verdict is not Verdict.UNKNOWN and not verdict.agrees_with(x.label()):
        raise ZeroSidedContractBreach(
            f"trial {trial}: answered {verdict.name} on an input labelled {x.label().name} "
            f"(N={config.n}, A={x.ones}, seed={config.master_seed})")
    prefix = majority_prefix_length(permuted) if track_prefix else None
    ledger = oracle.ledger
    return ledger.xor_queries, ledger.total(), verdict is Verdict.UNKNOWN, prefix


def _run_chunk(config: ExperimentConfig, start: int, stop: int, track_prefix: bool):
    return [run_trial(config, t, track_prefix) for t in range(start, stop)]


def _chunks(trials: int, workers: int):
    count = max(1, min(trials, workers * MAX_CHUNKS_PER_WORKER))
    bounds = np.linspace(0, trials, count + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_trials(config: ExperimentConfig, track_prefix=False):
    """All trials, reduced in trial order whatever the worker count."""
    chunks = _chunks(config.trials, config.workers)
    if config.workers == 1 or len(chunks) == 1:
        parts = [_run_chunk(config, a, b, track_prefix) for a, b in chunks]
    else:
        if config.pool_kind == 'process':
            pool = ProcessPoolExecutor(max_workers=config.workers)
        else:
            pool = ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="Trials")
        with pool:
            parts = list(pool.map(_run_chunk, [config] * len(chunks), [a for a, _ in chunks],
                                  [b for _, b in chunks], [track_prefix] * len(chunks)))
    return [row for part in parts for row in part]


def tail_reports_for(config: ExperimentConfig, comparisons) -> List[TailReport]:
    """Tail checks for the pairing algorithms on a fixed (A, B) class."""
    if config.ones is None or config.algorithm == 'trivial' or config.n < 2:
        return []
    if config.d is None:
        log_debug(f"tail reports skipped: no d configured (N={config.n}, A={config.ones})")
        return []
    threshold_of = greedy_tail_threshold if config.algorithm == 'greedy' else oblivious_tail_threshold
    reports = []
    for r in config.tail_r:
        threshold = threshold_of(config.ones, config.zeros, config.d, r)
        reports.append(TailReport.from_samples(
            comparisons, threshold, tail_cap(config.n, r), r=r, source=config.algorithm))
    return reports


def run_experiment(config: ExperimentConfig, track_prefix=True) -> ExperimentResult:
    log_debug(f"run_experiment: N={config.n} class={config.input_class} A={config.ones} "
              f"algorithm={config.algorithm} trials={config.trials} seed={config.master_seed} "
              f"workers={config.workers}")
    rows = run_trials(config, track_prefix=track_prefix)
    comparisons = np.array([row[0] for row in rows], dtype=np.int64)
    totals = np.array([row[1] for row in rows], dtype=np.int64)
    unknown = sum(1 for row in rows if row[2])
    prefixes = np.array([row[3] for row in rows], dtype=np.int64) if track_prefix else None
    result = ExperimentResult(config, comparisons, totals, unknown, prefixes,
                              tail_reports_for(config, comparisons))
    log_debug(f"run_experiment done: {result.stats!r}, unknown={unknown}")
    return result


def unknown_rate_experiment(config: ExperimentConfig) -> float:
    """Fraction of Unknown answers under the budget (default_budget when unset).

    Every other answer is checked against the true label; one wrong answer
    raises ZeroSidedContractBreach.
    """
    if config.budget is None:
        if config.d is None:
            raise ConfigError("unknown_rate_experiment needs a budget or d for the default budget")
        config = config.replace(budget=default_budget(max(config.n, 1), config.epsilon, config.d))
    rows = run_trials(config)
    rate = sum(1 for row in rows if row[2]) / config.trials
    log_debug(f"unknown_rate_experiment: N={config.n} budget={config.budget} rate={rate:.6f}")
    return rate


def sweep_classes(n: int, ones_values: Sequence[int], algorithm='greedy', trials=200,
                  master_seed=42, workers=1) -> Dict[int, float]:
    """Mean comparisons per fixed class A (worst case expected at the balanced class)."""
    means = {}
    for ones in ones_values:
        config = ExperimentConfig(n, ones=ones, input_class='fixed', algorithm=algorithm,
                                  trials=trials, master_seed=master_seed, workers=workers)
        comparisons = [row[0] for row in run_trials(config)]
        means[ones] = float(np.mean(comparisons))
    return means


# ---------------------------------------------------------------------------
# Calibration of d
# ---------------------------------------------------------------------------

DEFAULT_D_GRID = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0)


class CalibrationReport:
    def __init__(self, epsilon, trials):
        self.epsilon = epsilon
        self.trials = trials
        self.d = None
        self.rows = []

    def add(self, phase, n, d, budget, rate):
        self.rows.append({'phase': phase, 'N': n, 'd': _round9(d), 'budget': budget,
                          'trials': self.trials, 'unknown_rate': _round9(rate),
                          'pass': rate <= self.epsilon})

    @property
    def validated(self):
        holdout = [row for row in self.rows if row['phase'] == 'holdout']
        return self.d is not None and all(row['pass'] for row in holdout)


def calibrate(base: ExperimentConfig, train_sizes=(1 << 10, 1 << 12), holdout_sizes=(1 << 11, 1 << 13),
              d_grid=DEFAULT_D_GRID) -> CalibrationReport:
    """Smallest grid d whose budget keeps the Unknown rate <= eps on every training size,
    then the same d checked on held-out sizes."""
    report = CalibrationReport(base.epsilon, base.trials)
    for d in sorted(d_grid):
        rates = []
        for n in train_sizes:
            budget = default_budget(n, base.epsilon, d)
            rate = unknown_rate_experiment(base.replace(n=n, input_class='balanced', budget=budget, d=d))
            report.add('train', n, d, budget, rate)
            rates.append(rate)
        if all(rate <= base.epsilon for rate in rates):
            report.d = d
            break
    if report.d is None:
        log_error(f"calibrate: no d in {list(d_grid)} reaches eps={base.epsilon}")
        return report
    for n in holdout_sizes:
        budget = default_budget(n, base.epsilon, report.d)
        rate = unknown_rate_experiment(
            base.replace(n=n, input_class='balanced', budget=budget, d=report.d))
        report.add('holdout', n, report.d, budget, rate)
    log_debug(f"calibrate: d={report.d} validated={report.validated}")
    return report


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _round9(value):
    if value is None or isinstance(value, (bool, int, np.integer)):
        return value if not isinstance(value, np.integer) else int(value)
    return float(f"{float(value):.9g}")


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def results_document(records, reports) -> dict:
    """Normalized schema shared by the CSV and JSON writers."""
    return {
        'stats': [{column: _round9(record[column]) if column not in ('algorithm',) else record[column]
                   for column in STATS_COLUMNS} for record in records],
        'tail_reports': [r.to_record() if isinstance(r, TailReport) else dict(r) for r in reports],
    }


def render_csv(document) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(STATS_COLUMNS)
    for record in document['stats']:
        writer.writerow([_cell(record[c]) for c in STATS_COLUMNS])
    if document['tail_reports']:
        writer.writerow(TAIL_COLUMNS)
        for report in document['tail_reports']:
            writer.writerow([_cell(report[c]) for c in TAIL_COLUMNS])
    return buffer.getvalue()


def render_json(document) -> str:
    return json.dumps(document, indent=2, sort_keys=False) + "\n"


def _write_text(path, text):
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
            f.flush()
    except (IOError, PermissionError, OSError) as e:
        log_error(f"Lỗi ghi file kết quả: {path}", e)
        raise OSError(f"cannot write results to {path}: {e}") from e


def emit_results(records, reports, path, fmt='csv'):
    """Write stats records (dicts with STATS_COLUMNS) and tail reports to `path`."""
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"format must be one of {OUTPUT_FORMATS}, got {fmt!r}")
    document = results_document(records, reports)
    text = render_csv(document) if fmt == 'csv' else render_json(document)
    _write_text(path, text)
    log_debug(f"emit_results: {len(records)} stats rows, {len(reports)} tail rows -> {path}")
    return path


def _parse_cell(column, raw):
    if raw == '':
        return None
    if column == 'algorithm':
        return raw
    if column == 'pass':
        return raw == 'true'
    if column in ('N', 'A', 'B', 'trials', 'seed'):
        return int(raw)
    return float(raw)


def load_results(path, fmt='csv') -> dict:
    """Inverse of emit_results."""
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    if fmt == 'json':
        return json.loads(text)
    document = {'stats': [], 'tail_reports': []}
    rows = list(csv.reader(io.StringIO(text)))
    section, columns = None, None
    for row in rows:
        if row == STATS_COLUMNS:
            section, columns = 'stats', STATS_COLUMNS
        elif row == TAIL_COLUMNS:
            section, columns = 'tail_reports', TAIL_COLUMNS
        elif section is not None:
            document[section].append({c: _parse_cell(c, v) for c, v in zip(columns, row)})
    return document


def emit_calibration(report: CalibrationReport, path):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CALIBRATION_COLUMNS)
    for row in report.rows:
        writer.writerow([_cell(row[c]) for c in CALIBRATION_COLUMNS])
    writer.writerow(['chosen', '', _cell(report.d), '', report.trials, '', _cell(report.validated)])
    _write_text(path, buffer.getvalue())
    return path
