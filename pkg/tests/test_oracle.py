from collections import Counter

import numpy as np
import pytest
from hypothesis import HealthCheck, example, given, settings, strategies as st

from modules.oracle import (BitString, BudgetExhausted, CountingOracle, MajorityLabel, QueryError,
                            QueryLedger, Verdict, make_stream, majority_label, permute_input,
                            random_input, random_permutation, replay_trace)

bit_lists = st.lists(st.integers(0, 1), max_size=32)


def test_bitstring_parsing_and_counts():
    x = BitString.from_string("10110")
    assert str(x) == "10110"
    assert (x.n, x.ones, x.zeros, x.discrepancy) == (5, 3, 2, 1)
    assert BitString.from_int(0b101, 3) == BitString.from_string("101")
    assert BitString.from_int(0b011, 3) == BitString.from_string("110")
    assert BitString.from_counts(2, 3) == BitString.from_string("11000")
    assert x.prefix(2) == BitString.from_string("10")
    assert BitString.from_array(np.array([0, 1, 1])) == BitString.from_string("011")


@pytest.mark.parametrize("text", ["10a", "2", "1 0"])
def test_bitstring_rejects_non_bits(text):
    with pytest.raises(ValueError):
        BitString.from_string(text)


@pytest.mark.parametrize("text, strict, weak", [
    ("", MajorityLabel.TIE, MajorityLabel.ONE),
    ("1", MajorityLabel.ONE, MajorityLabel.ONE),
    ("0", MajorityLabel.ZERO, MajorityLabel.ZERO),
    ("0110", MajorityLabel.TIE, MajorityLabel.ONE),
    ("00101", MajorityLabel.ZERO, MajorityLabel.ZERO),
])
def test_labels(text, strict, weak):
    x = BitString.from_string(text)
    assert majority_label(x) is strict
    assert majority_label(x, weak=True) is weak


def test_verdict_agreement():
    assert Verdict.ONE.agrees_with(MajorityLabel.ONE)
    assert not Verdict.TIE.agrees_with(MajorityLabel.ONE)
    assert not Verdict.UNKNOWN.agrees_with(MajorityLabel.TIE)
    assert Verdict.from_bit(0) is Verdict.ZERO
    assert Verdict.from_label(MajorityLabel.TIE) is Verdict.TIE


def test_bit_and_xor_queries_are_counted():
    oracle = CountingOracle(BitString.from_string("101"))
    assert [oracle.query_bit(i) for i in range(3)] == [1, 0, 1]
    assert oracle.query_xor(0, 1) == 1
    assert oracle.query_xor(0, 2) == 0
    ledger = oracle.ledger
    assert (ledger.bit_queries, ledger.xor_queries, ledger.total()) == (3, 2, 5)


def test_parity_query():
    oracle = CountingOracle(BitString.from_string("1110"))
    assert oracle.query_parity([0, 1, 2]) == 1
    assert oracle.query_parity([0, 1, 2, 3]) == 1
    assert oracle.query_parity([1, 3]) == 1
    assert oracle.ledger.parity_queries == 3


@pytest.mark.parametrize("call", [
    lambda o: o.query_bit(3),
    lambda o: o.query_bit(-1),
    lambda o: o.query_xor(1, 1),
    lambda o: o.query_xor(0, 5),
    lambda o: o.query_parity([]),
    lambda o: o.query_parity([0, 0]),
])
def test_invalid_queries_raise_and_are_not_counted(call):
    oracle = CountingOracle(BitString.from_string("101"))
    with pytest.raises(QueryError):
        call(oracle)
    assert oracle.ledger.total() == 0


def test_budget_stops_before_answering():
    oracle = CountingOracle(BitString.from_string("1111"), budget=2)
    oracle.query_bit(0)
    oracle.query_xor(0, 1)
    with pytest.raises(BudgetExhausted) as info:
        oracle.query_bit(2)
    assert info.value.budget == 2
    assert info.value.attempted_kind == "bit"
    assert oracle.ledger.total() == 2
    # budget exhaustion is not a malformed query
    assert not isinstance(info.value, ValueError)


def test_zero_budget_allows_nothing():
    oracle = CountingOracle(BitString.from_string("1"), budget=0)
    with pytest.raises(BudgetExhausted):
        oracle.query_bit(0)


def test_quantum_counter_stays_out_of_total():
    ledger = QueryLedger()
    ledger.quantum_queries += 3
    ledger.record("bit", (0,), 1)
    assert ledger.total() == 1
    assert ledger.snapshot()["quantum_queries"] == 3


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(bit_lists.filter(lambda b: len(b) >= 2), st.data())
def test_trace_replays_on_the_input(raw, data):
    x = BitString(raw)
    oracle = CountingOracle(x, tracing=True)
    for _ in range(data.draw(st.integers(1, 10))):
        i = data.draw(st.integers(0, x.n - 1))
        j = data.draw(st.integers(0, x.n - 1).filter(lambda v: v != i))
        oracle.query_xor(i, j)
        oracle.query_bit(i)
    assert len(oracle.ledger.trace) == oracle.ledger.total()
    assert replay_trace(x, oracle.ledger.trace)


def test_replay_detects_a_different_input():
    oracle = CountingOracle(BitString.from_string("10"), tracing=True)
    oracle.query_xor(0, 1)
    assert not replay_trace(BitString.from_string("11"), oracle.ledger.trace)


@given(bit_lists, st.integers(0, 2 ** 64 - 1))
@example([1, 1, 1, 1], 0)
def test_permutation_preserves_counts(raw, seed):
    x = BitString(raw)
    permuted, perm = permute_input(x, seed)
    assert (permuted.ones, permuted.zeros) == (x.ones, x.zeros)
    assert sorted(perm.tolist()) == list(range(x.n))
    assert [x[int(p)] for p in perm] == list(permuted.bits)


def test_streams_are_reproducible_per_trial():
    a = make_stream(42, 7).integers(0, 1 << 30, size=5)
    b = make_stream(42, 7).integers(0, 1 << 30, size=5)
    c = make_stream(42, 8).integers(0, 1 << 30, size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(random_permutation(20, (3, 1)), random_permutation(20, (3, 1)))


def test_random_input_length():
    assert random_input(17, 5).n == 17
    assert random_input(17, 5) == random_input(17, 5)


def _permutation_counts(n, trials):
    return Counter(tuple(random_permutation(n, (2024, t)).tolist()) for t in range(trials))


def test_small_permutations_are_roughly_uniform():
    counts = _permutation_counts(3, 6000)
    assert len(counts) == 6
    assert all(850 <= c <= 1150 for c in counts.values())


@pytest.mark.slow
def test_permutations_of_four_pass_chi_square():
    stats = pytest.importorskip("scipy.stats")
    trials = 100_000
    counts = _permutation_counts(4, trials)
    assert len(counts) == 24
    observed = np.array(sorted(counts.values()), dtype=float)
    result = stats.chisquare(observed)
    # reject only beyond the 5 sigma normal tail
    assert result.pvalue > stats.norm.sf(5)
    assert result.statistic < stats.chi2.isf(stats.norm.sf(5), df=23)
