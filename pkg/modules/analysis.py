"""
Closed-form quantities for MAJORITY query complexity
Hamming-weight identities, divisibility certificates, cost bounds, classical error bound
"""
import math
import itertools
from collections import namedtuple
from fractions import Fraction
from typing import Callable, Iterator, Tuple

import numpy as np

from .oracle import BitString, CountingOracle, MajorityLabel, Verdict, _as_generator, random_permutation
from .algorithms import default_budget, log2_guarded
from .blocks import two_adic_valuation


# ---------------------------------------------------------------------------
# Hamming weight identities
# ---------------------------------------------------------------------------

def hamming_weight(n: int) -> int:
    if n < 0:
        raise ValueError(f"hamming weight needs n >= 0, got {n}")
    return bin(n).count('1')


def exact_cost(n: int) -> int:
    """N + 1 - w(N): worst-case XOR decision tree cost (0 for N = 0)."""
    if n == 0:
        return 0
    return n + 1 - hamming_weight(n)


def floor_sum_identity(n: int) -> Tuple[int, int]:
    """(sum_k floor(N/2^k), N - w(N)), each side computed on its own."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    lhs = 0
    k = 1
    while (n >> k) > 0:
        lhs += n >> k
        k += 1
    return lhs, n - hamming_weight(n)


def factorial_two_adic_valuation(n: int) -> int:
    """Exponent of 2 in N!, summed factor by factor (N! itself is never built)."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    total = 0
    for k in range(2, n + 1):
        total += two_adic_valuation(k)
    return total


def hamming_weight_table(n_max: int) -> np.ndarray:
    """w(N) for N = 0..n_max."""
    values = np.arange(n_max + 1, dtype=np.int64)
    weights = np.zeros_like(values)
    for bit in range(max(n_max, 1).bit_length()):
        weights += (values >> bit) & 1
    return weights


def floor_sum_table(n_max: int) -> np.ndarray:
    """sum_k floor(N/2^k) for N = 0..n_max."""
    values = np.arange(n_max + 1, dtype=np.int64)
    sums = np.zeros_like(values)
    for k in range(1, max(n_max, 1).bit_length() + 1):
        sums += values >> k
    return sums


def factorial_valuation_table(n_max: int) -> np.ndarray:
    """Exponent of 2 in N! for N = 0..n_max, by cumulative valuations of 1..N."""
    values = np.arange(n_max + 1, dtype=np.int64)
    valuations = np.zeros_like(values)
    if n_max >= 1:
        lowest = values[1:] & -values[1:]
        valuations[1:] = np.log2(lowest).round().astype(np.int64)
    return np.cumsum(valuations)


# ---------------------------------------------------------------------------
# Counting / divisibility lower bound
# ---------------------------------------------------------------------------

def strict_majority_count(n: int) -> Tuple[int, int]:
    """Number of N-bit strings with strictly more ones, and its 2-adic valuation."""
    if n < 2 or n % 2:
        raise ValueError(f"strict_majority_count needs even N >= 2, got {n} (pad odd N first)")
    count = (1 << (n - 1)) - math.comb(n, n // 2) // 2
    return count, two_adic_valuation(count)


DivisibilityCertificate = namedtuple(
    'DivisibilityCertificate',
    ['n', 'depth', 'impossible', 'reduced_n', 'count', 'modulus_exponent'])


def parity_tree_divisibility_certificate(n: int, depth: int) -> DivisibilityCertificate:
    """Decide whether the counting argument rules out a parity tree of `depth`.

    A depth-d parity tree for f forces 2^(N-d) | |f^-1(1)|. Odd N pads an
    (N-1)-bit input with one 0, which turns weak MAJORITY on N bits into strict
    MAJORITY on N-1 bits.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    if n == 1:
        # f = X_0, one accepting input
        reduced, count = 1, 1
    elif n % 2 == 0:
        reduced = n
        count, _ = strict_majority_count(n)
    else:
        reduced = n - 1
        count, _ = strict_majority_count(n - 1)
    exponent = reduced - depth
    impossible = exponent > 0 and count % (1 << exponent) != 0
    return DivisibilityCertificate(n, depth, impossible, reduced, count, exponent)


def parity_depth_lower_bound(n: int) -> int:
    """Smallest depth the divisibility certificate does not exclude."""
    depth = 0
    while parity_tree_divisibility_certificate(n, depth).impossible:
        depth += 1
    return depth


# ---------------------------------------------------------------------------
# Cost bounds
# ---------------------------------------------------------------------------

def ars_average(n: int) -> float:
    """2N/3 - sqrt(8N/(9 pi)), the average greedy comparison count without the O(log N) term."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return 2 * n / 3 - math.sqrt(8 * n / (9 * math.pi))


def zero_sided_lower_bound(n: int, epsilon: float) -> float:
    """2N/3 - eps*N - sqrt(8N/(9 pi)); the additive constant is unknown and left out."""
    return ars_average(n) - epsilon * n


def oblivious_expectation_bound(ones: int, zeros: int) -> float:
    return ones + zeros - 2 * min(ones, zeros) / 3


def greedy_expectation_bound(ones: int, zeros: int) -> float:
    n = ones + zeros
    return n / 2 + min(ones, zeros) / 3 + 2 * log2_guarded(n)


def oblivious_tail_threshold(ones: int, zeros: int, d: float, r: float) -> float:
    n = ones + zeros
    return n - 2 * min(ones, zeros) / 3 + d * math.sqrt(r * n)


def greedy_tail_threshold(ones: int, zeros: int, d: float, r: float) -> float:
    n = ones + zeros
    return n / 2 + min(ones, zeros) / 3 + d * math.sqrt(r * n)


def tail_cap(n: int, r: float) -> float:
    """2^-r * log2 N; exceeds 1 (vacuous) for small r."""
    return 2.0 ** (-r) * log2_guarded(n)


def prefix_center(ones: int, zeros: int) -> float:
    """N^2 / (2 max(A, B)): where M concentrates."""
    n = ones + zeros
    majority = max(ones, zeros)
    if majority == 0:
        return 0.0
    if ones == zeros:
        return float(n)
    return n * n / (2 * majority)


# ---------------------------------------------------------------------------
# Classical bounded-error lower bound
# ---------------------------------------------------------------------------

def classical_error_lower_bound(n: int) -> Fraction:
    """t(N-t+1) / (N(N+1)) with t = ceil(N/2); always > 1/4."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    t = (n + 1) // 2
    return Fraction(t * (n - t + 1), n * (n + 1))


class AdversarialMixture:
    """beta * uniform(t-1 ones) + (1 - beta) * uniform(t ones), beta = t/(N+1).

    Labels follow the weak definition: t ones is a One even when it is a tie.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        self.n = n
        self.t = (n + 1) // 2
        self.beta = Fraction(self.t, n + 1)

    def components(self):
        """[(weight, ones)] for the two uniform components."""
        return [(self.beta, self.t - 1), (1 - self.beta, self.t)]

    def weight(self, x: BitString) -> Fraction:
        if x.n != self.n:
            raise ValueError(f"input length {x.n} != mixture length {self.n}")
        for weight, ones in self.components():
            if x.ones == ones:
                return weight / math.comb(self.n, ones)
        return Fraction(0)

    def support(self) -> Iterator[Tuple[BitString, Fraction]]:
        for weight, ones in self.components():
            share = weight / math.comb(self.n, ones)
            for positions in itertools.combinations(range(self.n), ones):
                bits = bytearray(self.n)
                for i in positions:
                    bits[i] = 1
                yield BitString(bytes(bits)), share

    def error_of(self, error_on: Callable[[BitString], Fraction]) -> Fraction:
        """Mixture-weighted error of a strategy given its exact per-input error."""
        return sum((w * error_on(x) for x, w in self.support()), Fraction(0))


def near_tight_classical_strategy(x: BitString, seed, bias=None) -> Verdict:
    """Query N-1 bits in random order; below t-1 ones say Zero, above say One.

    Exactly t-1 ones: a coin that says One with probability `bias`
    (defaults to beta = t/(N+1)).
    """
    n = x.n
    if n < 2:
        raise ValueError(f"strategy needs N >= 2, got {n}")
    t = (n + 1) // 2
    bias = Fraction(t, n + 1) if bias is None else bias
    rng = _as_generator(seed)
    order = random_permutation(n, rng)
    oracle = CountingOracle(x)
    seen = sum(oracle.query_bit(int(i)) for i in order[:n - 1])
    if seen < t - 1:
        return Verdict.ZERO
    if seen > t - 1:
        return Verdict.ONE
    return Verdict.ONE if rng.random() < float(bias) else Verdict.ZERO


def near_tight_error(x: BitString, bias) -> Fraction:
    """Exact error of the strategy on `x`, enumerating every query order."""
    n = x.n
    if n < 2:
        raise ValueError(f"strategy needs N >= 2, got {n}")
    t = (n + 1) // 2
    bias = Fraction(bias)
    truth = x.label(weak=True)
    wrong = Fraction(0)
    orders = 0
    for order in itertools.permutations(range(n)):
        orders += 1
        seen = sum(x[i] for i in order[:n - 1])
        if seen < t - 1:
            wrong += truth is not MajorityLabel.ZERO
        elif seen > t - 1:
            wrong += truth is not MajorityLabel.ONE
        else:
            wrong += bias if truth is MajorityLabel.ZERO else 1 - bias
    return wrong / orders


def near_tight_worst_case_error(n: int, bias) -> Fraction:
    """max over all N-bit inputs of near_tight_error."""
    return max(near_tight_error(BitString.from_int(v, n), bias) for v in range(1 << n))


def near_tight_mixture_error(n: int, bias) -> Fraction:
    mixture = AdversarialMixture(n)
    return mixture.error_of(lambda x: near_tight_error(x, bias))


# ---------------------------------------------------------------------------
# Bounds table
# ---------------------------------------------------------------------------

BOUNDS_COLUMNS = ['N', 'w', 'exact_cost', 'parity_lower_bound', 'ars_average',
                  'zero_sided_lb', 'classical_error_lb', 'budget']


class BoundsTable:
    """Every closed-form figure for one N."""

    def __init__(self, n: int, epsilon: float, d: float):
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        self.n = n
        self.w = hamming_weight(n)
        self.exact_cost = exact_cost(n)
        self.parity_lower_bound = parity_depth_lower_bound(n)
        self.ars_average = ars_average(n)
        self.zero_sided_lb = zero_sided_lower_bound(n, epsilon)
        self.classical_error_lb = classical_error_lower_bound(n)
        self.epsilon = epsilon
        self.d = d
        self.budget = default_budget(n, epsilon, d)

    def as_row(self):
        return [self.n, self.w, self.exact_cost, self.parity_lower_bound,
                f"{self.ars_average:.9g}", f"{self.zero_sided_lb:.9g}",
                str(self.classical_error_lb), self.budget]


def bounds_rows(n_max: int, epsilon: float, d: float):
    return [BoundsTable(n, epsilon, d) for n in range(1, n_max + 1)]
