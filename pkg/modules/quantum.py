"""
Dense state-vector simulator for quantum black-box queries
Oracle unitary |i,b,z> -> |i, b xor X_i, z>, the one-query XOR gadget, trace compilation
"""
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .oracle import BitString, QueryLedger

NORM_TOLERANCE = 1e-9

_SQRT2_INV = 1 / math.sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


class LayoutMismatch(ValueError):
    """State register layout does not match the oracle."""


class MalformedTraceError(ValueError):
    """Trace entry that cannot be compiled to oracle calls."""


def _apply_single_qubit(amplitudes: np.ndarray, matrix: np.ndarray, qubit: int, n: int) -> np.ndarray:
    state = amplitudes.reshape([2] * n)
    axes = list(range(n))
    axes[qubit], axes[-1] = axes[-1], axes[qubit]
    state = np.transpose(state, axes)
    state = np.tensordot(state, matrix, axes=([-1], [1]))
    return np.transpose(state, axes).reshape(-1)


class QuantumState:
    """State of `num_qubits` qubits; qubit 0 is the most significant bit of the basis index."""

    def __init__(self, num_qubits: int, amplitudes: Optional[np.ndarray] = None):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        self.num_qubits = num_qubits
        dim = 1 << num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=complex)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (dim,):
            raise LayoutMismatch(f"expected {dim} amplitudes for {num_qubits} qubits, got {amplitudes.shape}")
        self.amplitudes = amplitudes
        self._check_norm()

    @classmethod
    def basis(cls, num_qubits: int, index: int):
        amplitudes = np.zeros(1 << num_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(num_qubits, amplitudes)

    def copy(self):
        return QuantumState(self.num_qubits, self.amplitudes.copy())

    def norm_deviation(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)

    def _check_norm(self):
        deviation = self.norm_deviation()
        if deviation > NORM_TOLERANCE:
            raise AssertionError(f"state norm drifted by {deviation:.3e}")

    def apply(self, matrix: np.ndarray, qubit: int):
        if not 0 <= qubit < self.num_qubits:
            raise LayoutMismatch(f"qubit {qubit} outside a {self.num_qubits}-qubit register")
        self.amplitudes = _apply_single_qubit(self.amplitudes, matrix, qubit, self.num_qubits)
        self._check_norm()
        return self

    def hadamard(self, qubit: int):
        return self.apply(HADAMARD, qubit)

    def x(self, qubit: int):
        return self.apply(PAULI_X, qubit)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def marginal(self, qubits: Sequence[int]) -> np.ndarray:
        """Outcome distribution of measuring `qubits` (big-endian in the given order)."""
        probs = self.probabilities().reshape([2] * self.num_qubits)
        others = tuple(q for q in range(self.num_qubits) if q not in qubits)
        reduced = probs.sum(axis=others) if others else probs
        # sum() keeps the remaining axes in ascending qubit order
        order = sorted(qubits)
        reduced = np.transpose(reduced, [order.index(q) for q in qubits])
        return reduced.reshape(-1)


class OracleUnitary:
    """Query transformation for a fixed input; index positions >= N read as 0."""

    def __init__(self, input_bits: BitString, workspace_qubits: int = 0):
        n = input_bits.n
        if n < 1:
            raise ValueError("oracle needs a nonempty input")
        self.input = input_bits
        self.index_width = max(1, math.ceil(math.log2(n)))
        self.target_qubit = self.index_width
        self.workspace_qubits = workspace_qubits
        self.num_qubits = self.index_width + 1 + workspace_qubits
        flips = np.zeros(1 << self.index_width, dtype=bool)
        flips[:n] = input_bits.to_array().astype(bool)
        self._flips = flips

    def layout(self) -> Tuple[int, int, int]:
        return self.index_width, 1, self.workspace_qubits

    def apply_to(self, amplitudes: np.ndarray) -> np.ndarray:
        state = amplitudes.reshape(1 << self.index_width, 2, 1 << self.workspace_qubits)
        permuted = state.copy()
        permuted[self._flips, 0, :] = state[self._flips, 1, :]
        permuted[self._flips, 1, :] = state[self._flips, 0, :]
        return permuted.reshape(-1)

    def matrix(self) -> np.ndarray:
        """Dense 2^q x 2^q matrix (small registers only)."""
        dim = 1 << self.num_qubits
        return np.stack([self.apply_to(column) for column in np.eye(dim, dtype=complex)], axis=1)


def apply_oracle(state: QuantumState, oracle: OracleUnitary, ledger: Optional[QueryLedger] = None):
    """One application of the query unitary; counted on `ledger`."""
    if state.num_qubits != oracle.num_qubits:
        raise LayoutMismatch(
            f"state has {state.num_qubits} qubits, oracle layout {oracle.layout()} needs {oracle.num_qubits}")
    state.amplitudes = oracle.apply_to(state.amplitudes)
    state._check_norm()
    if ledger is not None:
        ledger.quantum_queries += 1
    return state


def xor_gadget_distribution(x0: int, x1: int, ledger: Optional[QueryLedger] = None) -> np.ndarray:
    """[P(read 0), P(read 1)] on the index qubit after the phase-kickback circuit."""
    oracle = OracleUnitary(BitString([x0, x1]))
    state = QuantumState(oracle.num_qubits)
    state.x(oracle.target_qubit)
    state.hadamard(0)
    state.hadamard(oracle.target_qubit)
    apply_oracle(state, oracle, ledger)
    state.hadamard(0)
    return state.marginal([0])


def xor_gadget(x0: int, x1: int, ledger: Optional[QueryLedger] = None) -> Tuple[int, int]:
    """(x0 xor x1, oracle calls) from a single query; readout is deterministic."""
    local = QueryLedger()
    probs = xor_gadget_distribution(x0, x1, local)
    answer = int(probs[1] > probs[0])
    if probs[1 - answer] > NORM_TOLERANCE ** 2:
        raise AssertionError(f"XOR gadget is not exact: distribution {probs}")
    if ledger is not None:
        ledger.quantum_queries += local.quantum_queries
    return answer, local.quantum_queries


def quantum_bit_query(oracle: OracleUnitary, i: int, ledger: Optional[QueryLedger] = None) -> int:
    """Read X_i with one oracle call on |i>|0>|0>."""
    index = i << (1 + oracle.workspace_qubits)
    state = QuantumState.basis(oracle.num_qubits, index)
    apply_oracle(state, oracle, ledger)
    return int(state.marginal([oracle.target_qubit])[1] > 0.5)


def compile_run(trace, n: int, bits: Optional[BitString] = None) -> int:
    """Replay a classical trace as quantum queries and return the oracle call count.

    Bit queries become one oracle call, XOR queries one gadget on the
    two-bit sub-oracle. Without `bits` only the cost is booked.
    """
    entries = trace.trace if isinstance(trace, QueryLedger) else trace
    if entries is None:
        raise MalformedTraceError("ledger was recorded without tracing")
    if bits is not None and bits.n != n:
        raise MalformedTraceError(f"input length {bits.n} != N={n}")
    ledger = QueryLedger()
    oracle = OracleUnitary(bits) if bits is not None and n >= 1 else None
    for position, entry in enumerate(entries):
        kind, indices = entry.kind, tuple(entry.indices)
        if any(not 0 <= i < n for i in indices):
            raise MalformedTraceError(f"entry {position}: index out of range in {indices}")
        if kind == 'bit' and len(indices) == 1:
            if oracle is None:
                ledger.quantum_queries += 1
                continue
            answer = quantum_bit_query(oracle, indices[0], ledger)
        elif kind == 'xor' and len(indices) == 2 and indices[0] != indices[1]:
            if bits is None:
                ledger.quantum_queries += 1
                continue
            answer, _ = xor_gadget(bits[indices[0]], bits[indices[1]], ledger)
        else:
            raise MalformedTraceError(f"entry {position}: cannot compile {kind} query on {indices}")
        if answer != entry.answer:
            raise MalformedTraceError(
                f"entry {position}: recorded answer {entry.answer}, quantum answer {answer}")
    return ledger.quantum_queries
