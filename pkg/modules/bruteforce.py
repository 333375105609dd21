"""
Exhaustive oracles for small N
Optimal parity/XOR decision tree depth by memoized minimax, exact expectations by enumeration
"""
import itertools
from collections import namedtuple
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence

from .logger import log_debug
from .oracle import BitString, CountingOracle, MajorityLabel
from .blocks import BlockList
from .algorithms import get_algorithm, majority_prefix_length, run_oblivious_phases, run_on
from .analysis import exact_cost

ENUMERATION_MAX_N = 14
PREFIX_DISTRIBUTION_MAX_N = 16


class GuardError(ValueError):
    """Exhaustive search requested above its size guard."""


class QueryFamily(Enum):
    XOR_AND_BITS = 'xor'
    ALL_PARITIES = 'parity'

    @property
    def max_n(self):
        return 5 if self is QueryFamily.XOR_AND_BITS else 4

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if value in (member.value, member.name):
                return member
        raise ValueError(f"unknown query family {value!r}; expected 'xor' or 'parity'")


def _parity(value: int) -> int:
    return bin(value).count('1') & 1


def _label_of(value: int, n: int, weak: bool) -> MajorityLabel:
    ones = bin(value).count('1')
    return MajorityLabel.from_counts(ones, n - ones, weak=weak)


class KnowledgeState:
    """Inputs still consistent with the answers so far, as a bitset over 2^N inputs.

    Bit v of `consistent` is set iff input v (X_i = bit i of v) is consistent.
    """

    __slots__ = ('n', 'consistent')

    def __init__(self, n: int, consistent: Optional[int] = None):
        self.n = n
        self.consistent = (1 << (1 << n)) - 1 if consistent is None else consistent

    def members(self) -> List[int]:
        return [v for v in range(1 << self.n) if self.consistent >> v & 1]

    def split(self, answer_mask: int):
        """(answer 0, answer 1) children for a query whose 1-answers are `answer_mask`."""
        ones = self.consistent & answer_mask
        return KnowledgeState(self.n, self.consistent ^ ones), KnowledgeState(self.n, ones)

    def is_empty(self):
        return self.consistent == 0

    @staticmethod
    def terminal(consistent: int, label_masks) -> bool:
        """All members of the bitset share one label."""
        return any(consistent & mask == consistent for mask in label_masks)

    def is_terminal(self, label_masks) -> bool:
        return KnowledgeState.terminal(self.consistent, label_masks)

    def __eq__(self, other):
        return isinstance(other, KnowledgeState) and (self.n, self.consistent) == (other.n, other.consistent)

    def __hash__(self):
        return hash((self.n, self.consistent))

    def __len__(self):
        return bin(self.consistent).count('1')


class ParityTreeSearch:
    """Exact minimax depth of the best decision tree over one query family.

    Transposition table is keyed by the raw consistency bitset.
    """

    def __init__(self, n: int, family=QueryFamily.XOR_AND_BITS, weak=True,
                 query_order: Optional[Sequence[int]] = None):
        family = QueryFamily.parse(family)
        if not 1 <= n <= family.max_n:
            raise GuardError(f"optimal_depth for {family.value} queries supports 1 <= N <= {family.max_n}, got {n}")
        self.n = n
        self.family = family
        self.weak = weak
        self.query_sets = self._query_sets()
        masks = self._answer_masks(self.query_sets)
        if query_order is not None:
            if sorted(query_order) != list(range(len(masks))):
                raise ValueError("query_order must be a permutation of the query list")
            masks = [masks[i] for i in query_order]
        self.answer_masks = masks
        labels: Dict[MajorityLabel, int] = {}
        for v in range(1 << n):
            label = _label_of(v, n, weak)
            labels[label] = labels.get(label, 0) | (1 << v)
        self.label_masks = list(labels.values())
        self.transposition_table: Dict[int, int] = {}

    def _query_sets(self):
        n = self.n
        if self.family is QueryFamily.ALL_PARITIES:
            return [s for size in range(1, n + 1) for s in itertools.combinations(range(n), size)]
        return [(i,) for i in range(n)] + list(itertools.combinations(range(n), 2))

    def _answer_masks(self, query_sets):
        masks = []
        for indices in query_sets:
            q = sum(1 << i for i in indices)
            masks.append(sum(1 << v for v in range(1 << self.n) if _parity(v & q)))
        return masks

    def depth_of(self, state: int) -> int:
        cached = self.transposition_table.get(state)
        if cached is not None:
            return cached
        if KnowledgeState.terminal(state, self.label_masks):
            self.transposition_table[state] = 0
            return 0
        best = None
        for mask in self.answer_masks:
            ones = state & mask
            # Empty side: the query is constant on this state
            if ones == 0 or ones == state:
                continue
            worst = 1 + max(self.depth_of(state ^ ones), self.depth_of(ones))
            if best is None or worst < best:
                best = worst
                if best == 1:
                    break
        if best is None:
            raise AssertionError(f"no informative query on non-terminal state {state:#x}")
        self.transposition_table[state] = best
        return best

    def depth(self) -> int:
        result = self.depth_of(KnowledgeState(self.n).consistent)
        log_debug(f"optimal_depth N={self.n} family={self.family.value} weak={self.weak}: "
                  f"depth={result}, memo={len(self.transposition_table)}")
        return result


def optimal_depth(n: int, family=QueryFamily.XOR_AND_BITS, weak=True, query_order=None) -> int:
    """Minimum worst-case number of queries for (weak, by default) MAJORITY on N bits."""
    return ParityTreeSearch(n, family, weak=weak, query_order=query_order).depth()


def optimal_certificate(n: int, family=QueryFamily.XOR_AND_BITS) -> dict:
    family = QueryFamily.parse(family)
    depth = optimal_depth(n, family)
    formula = exact_cost(n)
    return {'N': n, 'family': family.value, 'depth': depth, 'formula': formula,
            'matched_formula': depth == formula}


# ---------------------------------------------------------------------------
# Enumeration over (A, B)-strings
# ---------------------------------------------------------------------------

def class_strings(ones: int, zeros: int) -> Iterator[BitString]:
    """Every string with `ones` ones and `zeros` zeros, in lexicographic order of one-positions."""
    if ones < 0 or zeros < 0:
        raise ValueError("counts must be non-negative")
    n = ones + zeros
    for positions in itertools.combinations(range(n), ones):
        bits = bytearray(n)
        for i in positions:
            bits[i] = 1
        yield BitString(bytes(bits))


def _check_enumeration(n, limit=ENUMERATION_MAX_N):
    if n > limit:
        raise GuardError(f"exhaustive enumeration supports N <= {limit}, got {n}")


def first_phase_cancellations(x: BitString) -> int:
    """Cancellations made by the first oblivious phase on `x`."""
    blocks = BlockList.singletons(x.n, mode='oblivious')
    run_oblivious_phases(blocks, CountingOracle(x), 1 if x.n >= 2 else 0)
    return blocks.cancellations


def exact_first_phase_cancellations(ones: int, zeros: int) -> Fraction:
    """E[c] over a uniform (A, B)-string, c = first-phase cancellations.

    Equals floor(N/2) * 2AB / (N(N-1)), which is AB/(N-1) for even N.
    """
    n = ones + zeros
    if ones < 0 or zeros < 0 or n < 2:
        raise ValueError(f"need A, B >= 0 and A + B >= 2, got A={ones}, B={zeros}")
    _check_enumeration(n)
    total = 0
    count = 0
    for x in class_strings(ones, zeros):
        total += first_phase_cancellations(x)
        count += 1
    return Fraction(total, count)


def first_phase_cancellation_formula(ones: int, zeros: int) -> Fraction:
    return Fraction(ones * zeros, ones + zeros - 1)


def exact_M_distribution(ones: int, zeros: int) -> Dict[int, Fraction]:
    """pmf of M (1-based prefix length) under a uniform (A, B)-string."""
    n = ones + zeros
    if ones < 0 or zeros < 0:
        raise ValueError("counts must be non-negative")
    _check_enumeration(n, PREFIX_DISTRIBUTION_MAX_N)
    counts: Dict[int, int] = {}
    total = 0
    for x in class_strings(ones, zeros):
        m = majority_prefix_length(x)
        counts[m] = counts.get(m, 0) + 1
        total += 1
    return {m: Fraction(c, total) for m, c in sorted(counts.items())}


def expected_value(pmf: Dict[int, Fraction]) -> Fraction:
    return sum((Fraction(k) * p for k, p in pmf.items()), Fraction(0))


def exact_prefix_moments(ones: int, zeros: int) -> List[Fraction]:
    """[E[C_0], ..., E[C_N]] where C_k counts ones among the first k positions."""
    n = ones + zeros
    _check_enumeration(n)
    sums = [0] * (n + 1)
    count = 0
    for x in class_strings(ones, zeros):
        running = 0
        for k, bit in enumerate(x.bits, start=1):
            running += bit
            sums[k] += running
        count += 1
    return [Fraction(s, count) for s in sums]


CensusEntry = namedtuple('CensusEntry', ['count', 'min', 'max', 'mean', 'max_total_cost', 'wrong'])


def exhaustive_cost_census(n: int, algorithm) -> Dict[tuple, CensusEntry]:
    """Comparison statistics per (A, B) class over all 2^N inputs.

    A class mean is also the exact expected cost of the randomized algorithm on
    that class, since a uniform permutation of a fixed (A, B)-string is a
    uniform (A, B)-string.
    """
    _check_enumeration(n)
    func = get_algorithm(algorithm)
    buckets: Dict[tuple, list] = {}
    for v in range(1 << n):
        x = BitString.from_int(v, n)
        result = run_on(func, x)
        key = (x.ones, x.zeros)
        bucket = buckets.setdefault(key, [0, None, None, 0, 0, 0])
        comparisons = result.comparisons
        bucket[0] += 1
        bucket[1] = comparisons if bucket[1] is None else min(bucket[1], comparisons)
        bucket[2] = comparisons if bucket[2] is None else max(bucket[2], comparisons)
        bucket[3] += comparisons
        bucket[4] = max(bucket[4], result.total_cost)
        if not result.verdict.agrees_with(x.label()):
            bucket[5] += 1
    census = {}
    for key in sorted(buckets):
        count, low, high, total, max_total, wrong = buckets[key]
        census[key] = CensusEntry(count, low, high, Fraction(total, count), max_total, wrong)
    return census


def census_max_total_cost(census: Dict[tuple, CensusEntry]) -> int:
    return max(entry.max_total_cost for entry in census.values())


def census_mean(census: Dict[tuple, CensusEntry]) -> Fraction:
    """Mean comparisons over all inputs."""
    total = sum(entry.mean * entry.count for entry in census.values())
    return total / sum(entry.count for entry in census.values())
