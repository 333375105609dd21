from fractions import Fraction

import pytest

from modules.analysis import exact_cost
from modules.bruteforce import (GuardError, KnowledgeState, ParityTreeSearch, QueryFamily, census_max_total_cost,
                                census_mean, class_strings, exact_first_phase_cancellations,
                                exact_M_distribution, exact_prefix_moments, exhaustive_cost_census,
                                expected_value, first_phase_cancellation_formula,
                                first_phase_cancellations, optimal_certificate, optimal_depth)
from modules.oracle import BitString


def test_knowledge_state_split():
    state = KnowledgeState(2)
    assert state.members() == [0, 1, 2, 3] and len(state) == 4
    # inputs whose bit 0 is set answer 1
    zero_side, one_side = state.split(0b1010)
    assert zero_side.members() == [0, 2]
    assert one_side.members() == [1, 3]
    assert zero_side != one_side and KnowledgeState(2, 0).is_empty()


def test_terminal_states_share_one_weak_label():
    search = ParityTreeSearch(2, "xor")
    # v = 1, 2, 3 are ties or all ones: weak label One
    assert KnowledgeState(2, 0b1110).is_terminal(search.label_masks)
    assert KnowledgeState(2, 0b0001).is_terminal(search.label_masks)
    assert not KnowledgeState(2, 0b1001).is_terminal(search.label_masks)
    assert not KnowledgeState(2).is_terminal(search.label_masks)
    assert search.depth_of(0b1110) == 0
    assert search.depth_of(0b1001) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_optimal_xor_depth_matches_formula(n):
    assert optimal_depth(n, "xor") == exact_cost(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_optimal_parity_depth_matches_formula(n):
    assert optimal_depth(n, QueryFamily.ALL_PARITIES) == exact_cost(n)


@pytest.mark.slow
def test_optimal_xor_depth_at_five():
    assert optimal_depth(5, "xor") == exact_cost(5) == 4


def test_query_order_does_not_change_the_depth():
    search = ParityTreeSearch(4, "xor")
    order = list(range(len(search.answer_masks)))[::-1]
    assert optimal_depth(4, "xor", query_order=order) == optimal_depth(4, "xor")
    with pytest.raises(ValueError):
        optimal_depth(3, "xor", query_order=[0, 0, 1])


def test_strict_target_on_two_bits():
    assert optimal_depth(2, "xor", weak=False) == 2


@pytest.mark.parametrize("n, family", [(6, "xor"), (5, "parity"), (0, "xor")])
def test_optimal_depth_guard(n, family):
    with pytest.raises(GuardError):
        optimal_depth(n, family)


def test_unknown_family():
    with pytest.raises(ValueError):
        QueryFamily.parse("and")


def test_optimal_certificate():
    assert optimal_certificate(3) == {
        'N': 3, 'family': 'xor', 'depth': 2, 'formula': 2, 'matched_formula': True}


def test_class_strings_enumerates_the_class():
    strings = [str(x) for x in class_strings(2, 1)]
    assert strings == ["110", "101", "011"]
    assert len(list(class_strings(3, 3))) == 20


def test_first_phase_cancellations_on_one_string():
    assert first_phase_cancellations(BitString.from_string("100111")) == 2
    assert first_phase_cancellations(BitString.from_string("1")) == 0


@pytest.mark.parametrize("ones, zeros, expected", [
    (1, 1, Fraction(1)),
    (2, 0, Fraction(0)),
    (2, 2, Fraction(4, 3)),
    (2, 1, Fraction(2, 3)),
    (3, 3, Fraction(9, 5)),
])
def test_exact_first_phase_cancellations(ones, zeros, expected):
    assert exact_first_phase_cancellations(ones, zeros) == expected


def test_odd_n_differs_from_the_even_formula():
    assert first_phase_cancellation_formula(2, 2) == exact_first_phase_cancellations(2, 2)
    assert first_phase_cancellation_formula(2, 1) == Fraction(1)
    assert exact_first_phase_cancellations(2, 1) == Fraction(2, 3)


def test_prefix_length_distribution():
    assert exact_M_distribution(3, 1) == {3: Fraction(1, 4), 4: Fraction(3, 4)}
    assert exact_M_distribution(2, 2) == {4: Fraction(1)}
    assert exact_M_distribution(4, 0) == {3: Fraction(1)}
    assert expected_value(exact_M_distribution(3, 1)) == Fraction(15, 4)


def test_prefix_moments_are_linear():
    assert exact_prefix_moments(3, 2) == [Fraction(3 * k, 5) for k in range(6)]


def test_enumeration_guards():
    with pytest.raises(GuardError):
        exact_first_phase_cancellations(8, 7)
    with pytest.raises(GuardError):
        exact_M_distribution(9, 8)
    with pytest.raises(ValueError):
        exact_first_phase_cancellations(1, 0)


def test_cost_census():
    census = exhaustive_cost_census(4, "oblivious")
    assert sum(entry.count for entry in census.values()) == 16
    assert all(entry.wrong == 0 for entry in census.values())
    assert census_max_total_cost(census) == exact_cost(4)
    assert census[(4, 0)].max == 3
    assert census_mean(exhaustive_cost_census(2, "greedy")) == 1
