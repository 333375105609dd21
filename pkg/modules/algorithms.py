"""
MAJORITY algorithms over the XOR query model
Trivial scan, oblivious pairing, greedy pairing, randomized and zero-error wrappers
"""
import math
from fractions import Fraction
from typing import Callable, Dict, Optional

import numpy as np

from .oracle import (BitString, BudgetExhausted, CountingOracle, QueryLedger, Verdict,
                     permute_input)
from .blocks import BlockList


class RunResult:
    """Verdict of one run plus its query ledger.

    `comparisons` counts XOR queries only; `total_cost` adds the final bit
    query (and any bit queries of the trivial scan).
    """

    __slots__ = ('verdict', 'ledger', 'permutation', 'blocks')

    def __init__(self, verdict: Verdict, ledger: QueryLedger, permutation=None, blocks=None):
        self.verdict = verdict
        self.ledger = ledger
        self.permutation = permutation
        self.blocks = blocks

    @property
    def comparisons(self) -> int:
        return self.ledger.xor_queries

    @property
    def total_cost(self) -> int:
        return self.ledger.total()

    @property
    def trace(self):
        return self.ledger.trace

    def __repr__(self):
        return (f"RunResult({self.verdict.name}, comparisons={self.comparisons}, "
                f"total_cost={self.total_cost})")


def floor_log2(n: int) -> int:
    return n.bit_length() - 1 if n > 0 else 0


def log2_guarded(n) -> float:
    """log2 with the max(., 1) guard used by every bound at tiny N."""
    return max(math.log2(n), 1.0) if n > 0 else 1.0


def _final_verdict(blocks: BlockList, oracle: CountingOracle) -> Verdict:
    # Empty list: everything cancelled pairwise
    if not len(blocks):
        return Verdict.TIE
    return Verdict.from_bit(oracle.query_bit(blocks.block(1).rep))


def trivial_majority(oracle: CountingOracle, **_ignored) -> RunResult:
    """Read bits left to right until the discrepancy outruns what is left."""
    n = oracle.n
    ones = zeros = 0
    for i in range(n):
        if oracle.query_bit(i):
            ones += 1
        else:
            zeros += 1
        if abs(ones - zeros) > n - i - 1:
            break
    if ones > zeros:
        verdict = Verdict.ONE
    elif zeros > ones:
        verdict = Verdict.ZERO
    else:
        verdict = Verdict.TIE
    return RunResult(verdict, oracle.ledger)


def run_oblivious_phases(blocks: BlockList, oracle: CountingOracle, last_phase: int):
    """Phases 1..last_phase: phase k combines equal blocks of size 2^(k-1), leftmost pair first."""
    for k in range(1, last_phase + 1):
        blocks.phase = k
        if blocks.debug_checks:
            blocks.validate()
        size = 1 << (k - 1)
        start = 1
        while True:
            i = blocks.find_equal_pair(size, start)
            if i is None:
                break
            blocks.combine_equal(i, oracle)
            start = i
    # after the last phase every size below 2^last_phase is unique
    blocks.phase = last_phase + 1
    if blocks.debug_checks:
        blocks.validate()
    blocks.phase = None
    return blocks


def oblivious_pairing(oracle: CountingOracle, compact=False, debug_checks=False) -> RunResult:
    n = oracle.n
    blocks = BlockList.singletons(n, compact=compact, mode='oblivious', debug_checks=debug_checks)
    run_oblivious_phases(blocks, oracle, floor_log2(n))
    verdict = _final_verdict(blocks, oracle)
    return RunResult(verdict, oracle.ledger, blocks=blocks)


def greedy_pairing(oracle: CountingOracle, compact=False, debug_checks=False) -> RunResult:
    """Combine the first equal-exponent pair, or S_1 with S_2 once the prefix could decide."""
    n = oracle.n
    blocks = BlockList.singletons(n, compact=compact, mode='greedy', debug_checks=debug_checks)
    blocks.greedy_reduce(oracle)
    verdict = _final_verdict(blocks, oracle)
    return RunResult(verdict, oracle.ledger, blocks=blocks)


ALGORITHMS: Dict[str, Callable[..., RunResult]] = {
    'trivial': trivial_majority,
    'oblivious': oblivious_pairing,
    'greedy': greedy_pairing,
}


def get_algorithm(name_or_func):
    if callable(name_or_func):
        return name_or_func
    try:
        return ALGORITHMS[name_or_func]
    except KeyError:
        raise ValueError(f"unknown algorithm {name_or_func!r}; expected one of {sorted(ALGORITHMS)}")


def run_on(algorithm, x: BitString, tracing=False, budget=None, compact=False, debug_checks=False):
    """Deterministic run of `algorithm` on `x` with a fresh oracle."""
    func = get_algorithm(algorithm)
    oracle = CountingOracle(x, budget=budget, tracing=tracing)
    return func(oracle, compact=compact, debug_checks=debug_checks)


def randomized(algorithm, x: BitString, seed, tracing=False, compact=False) -> RunResult:
    """Permute the input with the seeded stream, then run the algorithm on X'."""
    permuted, perm = permute_input(x, seed)
    result = run_on(algorithm, permuted, tracing=tracing, compact=compact)
    result.permutation = perm
    return result


def truncated_zero_error(algorithm, x: BitString, seed, budget: int,
                         tracing=False, compact=False) -> RunResult:
    """Randomized run cut off at `budget` total queries.

    The query that would exceed the budget is never issued, so an Unknown
    run costs exactly `budget`.
    """
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    func = get_algorithm(algorithm)
    permuted, perm = permute_input(x, seed)
    oracle = CountingOracle(permuted, budget=budget, tracing=tracing)
    try:
        result = func(oracle, compact=compact)
    except BudgetExhausted:
        result = RunResult(Verdict.UNKNOWN, oracle.ledger)
    result.permutation = perm
    return result


def fallback_exact(algorithm, x: BitString, seed, budget: int, tracing=False) -> RunResult:
    """Zero-error run that falls back to a plain bit scan after an Unknown.

    Never answers Unknown; cost is at most budget + N.
    """
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    func = get_algorithm(algorithm)
    permuted, perm = permute_input(x, seed)
    oracle = CountingOracle(permuted, budget=budget, tracing=tracing)
    try:
        result = func(oracle)
    except BudgetExhausted:
        oracle.budget = None
        result = trivial_majority(oracle)
    result.permutation = perm
    return result


def default_budget(n: int, epsilon: float, d: float) -> int:
    """ceil(2N/3 + d*sqrt(N*ln(log2(max(N,2))/eps))), log term clamped at 0.

    At eps = 1 the algorithm may always answer Unknown, so the log term is
    dropped.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1 (N=0 is a Tie without queries), got {n}")
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    if epsilon == 1:
        log_term = 0.0
    else:
        log_term = max(math.log(math.log2(max(n, 2)) / epsilon), 0.0)
    spread = Fraction(d) * Fraction(math.sqrt(n * log_term))
    return math.ceil(Fraction(2 * n, 3) + spread)


def majority_prefix_length(x: BitString) -> int:
    """M: 1-based position of the (floor(N/2)+1)st bit agreeing with the majority.

    Balanced inputs (and N = 0) give M = N.
    """
    n = x.n
    if x.ones == x.zeros:
        return n
    majority_bit = 1 if x.ones > x.zeros else 0
    positions = np.flatnonzero(x.to_array() == majority_bit)
    return int(positions[n // 2]) + 1


def max_queried_index(ledger: QueryLedger) -> Optional[int]:
    if ledger.trace is None:
        raise ValueError("ledger was not traced")
    indices = [i for entry in ledger.trace for i in entry.indices]
    return max(indices) if indices else None
