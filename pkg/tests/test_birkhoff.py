from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from randassign.birkhoff import (
    birkhoff_decompose,
    find_consistent_matching,
    has_perfect_matching,
    maximum_matching,
    peel,
)
from randassign.core import DeterministicAssignment, SupportMask, support, uniform_matrix
from randassign.generate import random_bistochastic
from strategies import mixtures


def test_example_three_decomposes_in_three_terms(ex3_p):
    dec = birkhoff_decompose(ex3_p)
    assert dec.is_valid_for(ex3_p)
    assert len(dec) == 3
    assert all(c == Fraction(1, 3) for c, _ in dec)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: mixtures(n, max_terms=6)))
def test_decomposition_reconstructs(p):
    dec = birkhoff_decompose(p)
    assert dec.is_valid_for(p)
    assert len(dec) <= p.n * p.n - p.n + 1
    assert all(d.is_consistent_with(p) for _, d in dec)


def test_random_corpus():
    rng = random.Random(3)
    for _ in range(50):
        p = random_bistochastic(rng.randint(1, 7), rng)
        assert birkhoff_decompose(p).is_valid_for(p)


def test_matching_respects_restrictions():
    allowed = ((True, True, False), (True, False, False), (False, True, True))
    m = maximum_matching(allowed)
    assert m == {0: 1, 1: 0, 2: 2}
    assert has_perfect_matching(allowed, [0, 1], [0, 1])
    assert not has_perfect_matching(allowed, [1, 2], [1, 2])
    assert not has_perfect_matching(allowed, [0], [0, 1])


def test_no_perfect_matching():
    mask = SupportMask(((True, False), (True, False)))
    assert find_consistent_matching(mask) is None


def test_peel_rejects_inconsistent(ex3_p):
    with pytest.raises(ValueError):
        peel(ex3_p, DeterministicAssignment((3, 2, 1, 0)))
    lam, rest = peel(uniform_matrix(2), DeterministicAssignment((0, 1)))
    assert lam == Fraction(1, 2)
    assert rest == [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]


def test_support_of_uniform_is_full():
    assert all(all(row) for row in support(uniform_matrix(3)).positive)
