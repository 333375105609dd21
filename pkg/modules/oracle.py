"""
Input strings and the counting query oracle
Every algorithm reads its input only through CountingOracle
"""
from collections import namedtuple
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np


class QueryError(ValueError):
    """A query that can never be answered (bad index, empty set, self-XOR)."""


class BudgetExhausted(Exception):
    """Raised instead of answering once the query budget is spent.

    Deliberately not a ValueError: the zero-error wrapper catches exactly this
    signal and turns it into an Unknown verdict.
    """

    def __init__(self, budget, attempted_kind):
        super().__init__(f"query budget {budget} exhausted (attempted {attempted_kind} query)")
        self.budget = budget
        self.attempted_kind = attempted_kind


class MajorityLabel(Enum):
    ZERO = 'zero'
    ONE = 'one'
    TIE = 'tie'

    def weak(self):
        """Weak definition: ties count as One."""
        return MajorityLabel.ONE if self is MajorityLabel.TIE else self

    @classmethod
    def from_counts(cls, ones, zeros, weak=False):
        if ones > zeros:
            return cls.ONE
        if zeros > ones:
            return cls.ZERO
        return cls.ONE if weak else cls.TIE


class Verdict(Enum):
    ZERO = 'zero'
    ONE = 'one'
    TIE = 'tie'
    UNKNOWN = 'unknown'

    @classmethod
    def from_label(cls, label):
        return cls(label.value)

    @classmethod
    def from_bit(cls, bit):
        return cls.ONE if bit else cls.ZERO

    def agrees_with(self, label):
        """True iff this verdict is a (non-Unknown) answer equal to `label`."""
        return self is not Verdict.UNKNOWN and self.value == label.value


class BitString:
    """Immutable 0/1 string with cached counts."""

    __slots__ = ('_bits', '_ones')

    def __init__(self, bits: Union[bytes, Iterable[int]] = b''):
        if isinstance(bits, (bytes, bytearray)):
            raw = bytes(bits)
        else:
            raw = bytes(int(b) for b in bits)
        if raw.translate(None, b'\x00\x01'):
            raise ValueError("BitString accepts only 0/1 values")
        self._bits = raw
        self._ones = raw.count(1)

    @classmethod
    def from_string(cls, text: str):
        text = text.strip()
        if set(text) - {'0', '1'}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(text.encode('ascii').translate(bytes.maketrans(b'01', b'\x00\x01')))

    @classmethod
    def from_counts(cls, ones: int, zeros: int):
        """1^A 0^B - the canonical representative of an (A, B) class."""
        if ones < 0 or zeros < 0:
            raise ValueError("counts must be non-negative")
        return cls(b'\x01' * ones + b'\x00' * zeros)

    @classmethod
    def from_int(cls, value: int, n: int):
        """Bit i of the string is bit i of `value` (LSB first)."""
        return cls(bytes((value >> i) & 1 for i in range(n)))

    @classmethod
    def from_array(cls, array):
        arr = np.asarray(array, dtype=np.uint8)
        return cls(arr.tobytes())

    @property
    def bits(self) -> bytes:
        return self._bits

    @property
    def n(self) -> int:
        return len(self._bits)

    @property
    def ones(self) -> int:
        return self._ones

    @property
    def zeros(self) -> int:
        return len(self._bits) - self._ones

    @property
    def discrepancy(self) -> int:
        return abs(2 * self._ones - len(self._bits))

    def label(self, weak=False) -> MajorityLabel:
        return MajorityLabel.from_counts(self.ones, self.zeros, weak=weak)

    def prefix(self, m: int):
        return BitString(self._bits[:m])

    def to_array(self):
        return np.frombuffer(self._bits, dtype=np.uint8)

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self._bits))

    def __len__(self):
        return len(self._bits)

    def __getitem__(self, i):
        return self._bits[i]

    def __iter__(self):
        return iter(self._bits)

    def __eq__(self, other):
        return isinstance(other, BitString) and other._bits == self._bits

    def __hash__(self):
        return hash(self._bits)

    def __str__(self):
        return self._bits.translate(bytes.maketrans(b'\x00\x01', b'01')).decode('ascii')

    def __repr__(self):
        return f"BitString('{self}')"


TraceEntry = namedtuple('TraceEntry', ['kind', 'indices', 'answer'])

QUERY_KINDS = ('bit', 'xor', 'parity')


class QueryLedger:
    """Per-run query counters and optional trace.

    `quantum_queries` counts applications of the quantum oracle unitary; it is
    bookkeeping for the quantum simulator and not part of the classical total.
    """

    __slots__ = ('bit_queries', 'xor_queries', 'parity_queries', 'quantum_queries', 'trace')

    def __init__(self, tracing=False):
        self.bit_queries = 0
        self.xor_queries = 0
        self.parity_queries = 0
        self.quantum_queries = 0
        self.trace = [] if tracing else None

    @property
    def tracing(self):
        return self.trace is not None

    def total(self) -> int:
        return self.bit_queries + self.xor_queries + self.parity_queries

    def record(self, kind, indices, answer):
        if kind == 'bit':
            self.bit_queries += 1
        elif kind == 'xor':
            self.xor_queries += 1
        elif kind == 'parity':
            self.parity_queries += 1
        else:
            raise ValueError(f"unknown query kind {kind!r}")
        if self.trace is not None:
            self.trace.append(TraceEntry(kind, tuple(indices), answer))

    def snapshot(self):
        return {
            'bit_queries': self.bit_queries,
            'xor_queries': self.xor_queries,
            'parity_queries': self.parity_queries,
            'quantum_queries': self.quantum_queries,
            'total': self.total(),
        }

    def __repr__(self):
        return (f"QueryLedger(bit={self.bit_queries}, xor={self.xor_queries}, "
                f"parity={self.parity_queries}, quantum={self.quantum_queries})")


class CountingOracle:
    """Sole access path to an input; counts every query.

    A single oracle belongs to one run - experiments create one per trial.
    """

    def __init__(self, input_bits: BitString, budget: Optional[int] = None, tracing=False):
        if budget is not None and budget < 0:
            raise ValueError("budget must be non-negative")
        self.input = input_bits
        self.ledger = QueryLedger(tracing=tracing)
        self.budget = budget
        self._bits = input_bits.bits
        self._n = len(self._bits)

    @property
    def n(self):
        return self._n

    def _check_index(self, i):
        if not 0 <= i < self._n:
            raise QueryError(f"index {i} out of range for N={self._n}")

    def _charge(self, kind):
        if self.budget is not None and self.ledger.total() >= self.budget:
            raise BudgetExhausted(self.budget, kind)

    def query_bit(self, i: int) -> int:
        self._check_index(i)
        self._charge('bit')
        answer = self._bits[i]
        self.ledger.record('bit', (i,), answer)
        return answer

    def query_xor(self, i: int, j: int) -> int:
        # hot path of every pairing run: same checks as query_bit, inlined
        n = self._n
        if not 0 <= i < n:
            self._check_index(i)
        if not 0 <= j < n:
            self._check_index(j)
        if i == j:
            raise QueryError(f"self-XOR on index {i} is constant 0")
        ledger = self.ledger
        budget = self.budget
        if budget is not None and ledger.bit_queries + ledger.xor_queries + ledger.parity_queries >= budget:
            raise BudgetExhausted(budget, 'xor')
        bits = self._bits
        answer = bits[i] ^ bits[j]
        ledger.xor_queries += 1
        if ledger.trace is not None:
            ledger.trace.append(TraceEntry('xor', (i, j), answer))
        return answer

    def query_parity(self, indices: Sequence[int]) -> int:
        indices = tuple(indices)
        if not indices:
            raise QueryError("parity query over the empty set")
        if len(set(indices)) != len(indices):
            raise QueryError(f"parity query indices must be distinct: {indices}")
        for i in indices:
            self._check_index(i)
        self._charge('parity')
        answer = 0
        for i in indices:
            answer ^= self._bits[i]
        self.ledger.record('parity', indices, answer)
        return answer


def replay_trace(input_bits: BitString, trace) -> bool:
    """True iff every recorded answer matches `input_bits`."""
    bits = input_bits.bits
    for entry in trace:
        expected = 0
        for i in entry.indices:
            expected ^= bits[i]
        if expected != entry.answer:
            return False
    return True


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

def make_stream(master_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based stream for (master_seed, trial).

    Philox keyed through SeedSequence with spawn_key=(trial,): trial t gets the
    same stream no matter which worker runs it or in which order.
    """
    seq = np.random.SeedSequence(int(master_seed) & ((1 << 64) - 1), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(seq))


def _as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        return make_stream(*seed)
    return make_stream(seed, 0)


def random_permutation(n: int, seed) -> np.ndarray:
    """Unbiased swap shuffle of range(n).

    Draw order: a single vectorized draw of j_i ~ U{0..i} for i = n-1 down to 1
    (in that order), then swaps perm[i] <-> perm[j_i] in the same order.
    """
    rng = _as_generator(seed)
    perm = list(range(n))
    if n < 2:
        return np.array(perm, dtype=np.int64)
    highs = np.arange(n, 1, -1, dtype=np.int64)
    draws = rng.integers(0, highs).tolist()
    for i, j in zip(range(n - 1, 0, -1), draws):
        perm[i], perm[j] = perm[j], perm[i]
    return np.array(perm, dtype=np.int64)


def permute_input(x: BitString, seed) -> Tuple[BitString, np.ndarray]:
    """X'_i = X_{pi(i)} for a uniformly random pi drawn from the seeded stream."""
    perm = random_permutation(x.n, seed)
    if x.n == 0:
        return x, perm
    permuted = BitString(x.to_array()[perm].tobytes())
    return permuted, perm


def random_input(n: int, seed) -> BitString:
    """Uniform over all 2^n strings: n fair coin flips."""
    rng = _as_generator(seed)
    flips = rng.integers(0, 2, size=n, dtype=np.uint8)
    return BitString(flips.tobytes())


def majority_label(x: BitString, weak=False) -> MajorityLabel:
    return x.label(weak=weak)
