import numpy as np
import pytest

from modules.algorithms import run_on
from modules.oracle import BitString, QueryLedger, TraceEntry
from modules.quantum import (LayoutMismatch, MalformedTraceError, OracleUnitary, QuantumState,
                             apply_oracle, compile_run, quantum_bit_query, xor_gadget,
                             xor_gadget_distribution)


def test_oracle_flips_the_target_where_the_bit_is_set():
    oracle = OracleUnitary(BitString.from_string("10"))
    assert oracle.layout() == (1, 1, 0)
    # basis index = 2 * i + b
    state = QuantumState.basis(2, 0)
    apply_oracle(state, oracle)
    assert state.amplitudes[1] == pytest.approx(1)
    untouched = QuantumState.basis(2, 2)
    apply_oracle(untouched, oracle)
    assert untouched.amplitudes[2] == pytest.approx(1)


def test_index_positions_past_n_read_zero():
    oracle = OracleUnitary(BitString.from_string("111"))
    assert oracle.index_width == 2 and oracle.num_qubits == 3
    state = QuantumState.basis(3, 3 * 2)
    apply_oracle(state, oracle)
    assert state.amplitudes[6] == pytest.approx(1)


def test_oracle_matrix_is_a_self_inverse_permutation():
    oracle = OracleUnitary(BitString.from_string("1011"), workspace_qubits=1)
    matrix = oracle.matrix()
    dim = 1 << oracle.num_qubits
    assert np.allclose(matrix @ matrix, np.eye(dim))
    assert np.allclose(np.abs(matrix).sum(axis=0), 1)


def test_oracle_twice_restores_a_random_state():
    rng = np.random.default_rng(11)
    oracle = OracleUnitary(BitString.from_string("10110"), workspace_qubits=1)
    raw = rng.normal(size=1 << oracle.num_qubits) + 1j * rng.normal(size=1 << oracle.num_qubits)
    state = QuantumState(oracle.num_qubits, raw / np.linalg.norm(raw))
    original = state.amplitudes.copy()
    ledger = QueryLedger()
    apply_oracle(apply_oracle(state, oracle, ledger), oracle, ledger)
    assert np.allclose(state.amplitudes, original, atol=1e-12)
    assert ledger.quantum_queries == 2 and ledger.total() == 0


def test_layout_mismatch():
    oracle = OracleUnitary(BitString.from_string("10"))
    with pytest.raises(LayoutMismatch):
        apply_oracle(QuantumState(3), oracle)
    with pytest.raises(LayoutMismatch):
        QuantumState(2, np.ones(3) / np.sqrt(3))


def test_unnormalised_state_is_rejected():
    with pytest.raises(AssertionError):
        QuantumState(1, np.array([1.0, 1.0]))


def test_hadamard_and_marginals():
    state = QuantumState(2).hadamard(0)
    assert np.allclose(state.marginal([0]), [0.5, 0.5])
    assert np.allclose(state.marginal([1]), [1.0, 0.0])
    state.x(1)
    assert np.allclose(state.marginal([1, 0]), [0.0, 0.0, 0.5, 0.5])


@pytest.mark.parametrize("x0, x1", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_xor_gadget_is_exact_with_one_call(x0, x1):
    ledger = QueryLedger()
    answer, calls = xor_gadget(x0, x1, ledger)
    assert answer == x0 ^ x1
    assert calls == 1 and ledger.quantum_queries == 1
    probs = xor_gadget_distribution(x0, x1)
    assert probs[1 - answer] <= 1e-18


def test_quantum_bit_query_reads_each_bit():
    x = BitString.from_string("01101")
    oracle = OracleUnitary(x)
    ledger = QueryLedger()
    assert [quantum_bit_query(oracle, i, ledger) for i in range(x.n)] == list(x.bits)
    assert ledger.quantum_queries == x.n


@pytest.mark.parametrize("algorithm, text, cost", [
    ("oblivious", "111", 2),
    ("trivial", "0101", 4),
    ("greedy", "1111111", 4),
    ("greedy", "010110", None),
])
def test_compiled_runs_cost_the_same(algorithm, text, cost):
    x = BitString.from_string(text)
    result = run_on(algorithm, x, tracing=True)
    if cost is not None:
        assert result.total_cost == cost
    assert compile_run(result.ledger, x.n, bits=x) == result.total_cost
    assert compile_run(result.trace, x.n) == result.total_cost


def test_compile_run_rejects_bad_traces():
    x = BitString.from_string("101")
    with pytest.raises(MalformedTraceError):
        compile_run(run_on("greedy", x).ledger, 3)
    with pytest.raises(MalformedTraceError):
        compile_run([TraceEntry("parity", (0, 1, 2), 0)], 3, bits=x)
    with pytest.raises(MalformedTraceError):
        compile_run([TraceEntry("xor", (0, 0), 0)], 3)
    with pytest.raises(MalformedTraceError):
        compile_run([TraceEntry("bit", (5,), 1)], 3)
    with pytest.raises(MalformedTraceError):
        compile_run([TraceEntry("xor", (0, 1), 0)], 3, bits=x)
