from __future__ import annotations

import random
from itertools import permutations, product

import pytest
from hypothesis import given, settings

import oracles
from randassign.core import DeterministicAssignment, PreferenceProfile, uniform_matrix
from randassign.expost import is_ex_post_efficient
from randassign.generate import random_bistochastic, random_po_mixture, random_profile
from randassign.robust import (
    AgentTypePartition,
    compute_agent_types,
    is_robust_by_types,
    is_robust_ex_post_efficient,
    types_cost_estimate,
    uniform_is_robust,
    verify_non_robust_witness,
)
from strategies import instances


def test_rsd_example_is_not_robust(ex1_profile, ex1_p):
    ok, d = is_robust_ex_post_efficient(ex1_profile, ex1_p)
    assert not ok
    assert verify_non_robust_witness(ex1_profile, ex1_p, d)
    ok_t, cycle = is_robust_by_types(ex1_profile, ex1_p)
    assert not ok_t and cycle.is_valid_for(ex1_profile, ex1_p)


def test_witness_verification_rejects_bad_witnesses(ex1_profile, ex1_p, ex3_p):
    po = DeterministicAssignment((0, 2, 1, 3))
    assert not verify_non_robust_witness(ex1_profile, ex1_p, po)
    assert not verify_non_robust_witness(ex1_profile, ex3_p, DeterministicAssignment((3, 2, 1, 0)))


def test_agent_types():
    profile = PreferenceProfile.from_lists([[1, 0, 2], [0, 1, 2], [1, 0, 2]])
    part = compute_agent_types(profile)
    assert part == AgentTypePartition((0, 1, 0), ((1, 0, 2), (0, 1, 2)))
    assert part.k == 2 and part.members(0) == [0, 2]
    assert types_cost_estimate(profile) > 0


@settings(max_examples=60, deadline=None)
@given(instances(min_n=1, max_n=4))
def test_exhaustive_matches_oracle(inst):
    profile, p = inst
    ok, d = is_robust_ex_post_efficient(profile, p)
    assert ok == oracles.robust(profile.prefs, p.matrix)
    if not ok:
        assert verify_non_robust_witness(profile, p, d)


@pytest.mark.parametrize("seed", range(40))
def test_types_algorithm_matches_exhaustive(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    k = rng.randint(1, min(3, n))
    profile = random_profile(n, rng, types=k)
    p = random_bistochastic(n, rng) if seed % 2 else random_po_mixture(profile, rng)
    ok, _ = is_robust_ex_post_efficient(profile, p)
    ok_t, cycle = is_robust_by_types(profile, p)
    assert ok == ok_t
    if cycle is not None:
        types = compute_agent_types(profile).type_of
        assert len({types[a] for a in cycle.agents}) == len(cycle.agents)
        assert cycle.is_valid_for(profile, p)


def test_uniform_robust_iff_unanimous_n3():
    rows = list(permutations(range(3)))
    u = uniform_matrix(3)
    for prefs in product(rows, repeat=3):
        profile = PreferenceProfile.from_lists(prefs)
        assert uniform_is_robust(profile) == is_robust_ex_post_efficient(profile, u)[0]


def test_robust_implies_ex_post(ex1_profile):
    rng = random.Random(11)
    for _ in range(20):
        p = random_po_mixture(ex1_profile, rng)
        if is_robust_ex_post_efficient(ex1_profile, p)[0]:
            assert is_ex_post_efficient(ex1_profile, p).is_member
