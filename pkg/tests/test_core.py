from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from randassign.core import (
    DeterministicAssignment,
    InstanceError,
    PreferenceProfile,
    RandomAssignment,
    SDRelation,
    as_rational,
    format_rational,
    parse_instance,
    parse_rational,
    sd_prefers,
    serialize_instance,
    support,
    uniform_matrix,
)
from strategies import instances, profiles

HEADER = "agents: 2\nobjects: a b\nprefs:\n1: a b\n2: b a\n"


def test_parse_example_file(data_dir):
    profile, p = parse_instance((data_dir / "example1.txt").read_text())
    assert profile.n == 4
    assert profile.prefs[2] == (1, 0, 3, 2)
    assert p.matrix[0] == tuple(Fraction(x, 12) for x in (5, 1, 5, 1))


def test_parse_without_assignment():
    profile, p = parse_instance(HEADER)
    assert p is None
    assert profile.object_names == ("a", "b")


def test_comments_and_blank_lines_ignored():
    text = "# leading\n\nagents: 2  # two\nobjects: a b\nprefs:\n1: a b\n\n2: b a\nassignment:\n1 0\n0 1\n"
    _, p = parse_instance(text)
    assert p.is_deterministic()


@pytest.mark.parametrize("text, line, fragment", [
    ("agents: x\n", 1, "not an integer"),
    ("agents: 0\n", 1, "positive"),
    ("agents: 2\nobjects: a a\n", 2, "duplicate object"),
    ("agents: 2\nobjects: a b\nprefs:\n1: a c\n", 4, "unknown object"),
    ("agents: 2\nobjects: a b\nprefs:\n1: a a\n", 4, "duplicate object"),
    ("agents: 2\nobjects: a b\nprefs:\n1: a\n", 4, "ranks 1 of 2"),
    ("agents: 2\nobjects: a b\nprefs:\n3: a b\n", 4, "outside 1..2"),
    ("agents: 2\nobjects: a b\nprefs:\n1: a b\n1: b a\n", 5, "listed twice"),
    ("agents: 2\nobjects: a b\nprefs:\n1: a b\n", 4, "no preference list for agent 2"),
    (HEADER + "assignment:\n0.5 0.5\n0.5 0.5\n", 7, "decimal"),
    (HEADER + "assignment:\n1/2 1/2\n1/3 2/3\n", 8, "column 1"),
    (HEADER + "assignment:\n1/2 2/3\n1/2 1/3\n", 7, "row sums"),
    (HEADER + "assignment:\n2 -1\n-1 2\n", 7, "outside [0,1]"),
    (HEADER + "assignment:\n1 0\n", 7, "1 rows"),
    (HEADER + "assignment:\n1 0 0\n0 1\n", 7, "3 entries"),
    ("agents: 3\nobjects: a b\nprefs:\n1: a b\n", 4, "2 objects declared for 3 agents"),
    ("hello\n", 1, "unexpected line"),
])
def test_parse_errors_report_line(text, line, fragment):
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    assert info.value.line == line
    assert fragment in info.value.reason


def test_agent_guard():
    with pytest.raises(InstanceError, match="guard"):
        parse_instance("agents: 65\n")
    profile, _ = parse_instance("agents: 1\nobjects: a\nprefs:\n1: a\n", max_agents=1)
    assert profile.n == 1


def test_names_header_round_trip():
    text = "agents: 2\nobjects: a b\nnames: ann bob\nprefs:\n1: a b\n2: a b\n"
    profile, _ = parse_instance(text)
    assert profile.agent_label(1) == "bob"
    assert profile.agent_index("ann") == 0
    assert serialize_instance(profile) == text


@settings(max_examples=60, deadline=None)
@given(instances(max_n=5))
def test_serialize_round_trip(inst):
    profile, p = inst
    back_profile, back_p = parse_instance(serialize_instance(profile, p))
    assert back_profile == profile
    assert back_p == p


def test_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    for bad in ("0.5", "1e3", "x", "1/"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("2/4") == Fraction(1, 2)


def test_random_assignment_validation():
    with pytest.raises(ValueError):
        RandomAssignment(((Fraction(1), Fraction(0)), (Fraction(1), Fraction(0))))
    with pytest.raises(ValueError):
        uniform_matrix(0)
    u = uniform_matrix(3)
    assert not u.is_deterministic()
    assert support(u).count() == 9


def test_deterministic_assignment_basics():
    d = DeterministicAssignment((2, 0, 1))
    assert d.holder() == (1, 2, 0)
    m = d.to_matrix()
    assert m.is_deterministic() and m.to_deterministic() == d
    with pytest.raises(ValueError):
        DeterministicAssignment((0, 0, 1))


def test_profile_validation():
    with pytest.raises(InstanceError):
        PreferenceProfile.from_lists([[0, 1], [0, 0]])
    with pytest.raises(InstanceError):
        PreferenceProfile(("a", "b"), ((0, 1),))
    prof = PreferenceProfile.from_lists([[1, 0], [0, 1]])
    assert prof.top(0) == 1
    assert prof.prefers(0, 1, 0) and not prof.prefers(1, 1, 0)


def _sd_oracle(order, a, b):
    diffs = []
    for r in range(1, len(order) + 1):
        diffs.append(sum(a[o] for o in order[:r]) - sum(b[o] for o in order[:r]))
    if all(x >= 0 for x in diffs) and any(x > 0 for x in diffs):
        return SDRelation.STRICTLY_PREFERS
    if all(x <= 0 for x in diffs) and any(x < 0 for x in diffs):
        return SDRelation.DISPREFERS
    if all(x == 0 for x in diffs):
        return SDRelation.EQUAL
    return SDRelation.INCOMPARABLE


def _prob_rows(n):
    return st.lists(st.integers(0, 6), min_size=n, max_size=n).filter(sum).map(
        lambda ws: [Fraction(w, sum(ws)) for w in ws])


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_sd_prefers_matches_cumulative_oracle(data):
    profile = data.draw(profiles(min_n=2, max_n=5))
    a = data.draw(_prob_rows(profile.n))
    b = data.draw(_prob_rows(profile.n))
    assert sd_prefers(profile, 0, a, b) == _sd_oracle(profile.prefs[0], a, b)


def test_sd_prefers_simple_cases():
    prof = PreferenceProfile.from_lists([[0, 1, 2]] * 3)
    assert sd_prefers(prof, 0, [1, 0, 0], [0, 1, 0]) is SDRelation.STRICTLY_PREFERS
    assert sd_prefers(prof, 0, [0, 0, 1], [0, 1, 0]) is SDRelation.DISPREFERS
    assert sd_prefers(prof, 0, ["1/2", 0, "1/2"], [0, 1, 0]) is SDRelation.INCOMPARABLE
    assert sd_prefers(prof, 0, [0, 1, 0], [0, 1, 0]) is SDRelation.EQUAL
    with pytest.raises(ValueError):
        sd_prefers(prof, 0, [1, 1, 0], [0, 1, 0])
