"""Robust ex post efficiency.

A random assignment is robust ex post efficient exactly when no consistent
deterministic assignment admits a trading cycle. Two deciders are provided:
an exhaustive one over consistent assignments and one that enumerates short
cycles using at most one agent per preference type.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import comb, factorial

from .birkhoff import has_perfect_matching
from .core import (
    DeterministicAssignment,
    PreferenceProfile,
    RandomAssignment,
    support,
)
from .expost import DEFAULT_ENUMERATION_GUARD, enumerate_consistent_assignments
from .pareto import find_trading_cycle
from .sdeff import ConsistentTradingCycle

DEFAULT_TYPE_THRESHOLD = 4


@dataclass(frozen=True)
class AgentTypePartition:
    type_of: tuple[int, ...]
    types: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.types)

    def members(self, t: int) -> list[int]:
        return [i for i, ti in enumerate(self.type_of) if ti == t]


def compute_agent_types(profile: PreferenceProfile) -> AgentTypePartition:
    """Group agents with identical lists; ids follow first appearance."""
    ids: dict[tuple[int, ...], int] = {}
    type_of = []
    for row in profile.prefs:
        type_of.append(ids.setdefault(row, len(ids)))
    return AgentTypePartition(tuple(type_of), tuple(ids))


def is_robust_ex_post_efficient(profile: PreferenceProfile, p: RandomAssignment,
                                guard: int = DEFAULT_ENUMERATION_GUARD
                                ) -> tuple[bool, DeterministicAssignment | None]:
    """Exhaustive test; the witness is the first consistent non-PO assignment."""
    for d in enumerate_consistent_assignments(support(p), guard):
        if find_trading_cycle(profile, d) is not None:
            return False, d
    return True, None


def verify_non_robust_witness(profile: PreferenceProfile, p: RandomAssignment,
                              d: DeterministicAssignment) -> bool:
    if d.n != p.n or not d.is_consistent_with(p):
        return False
    return find_trading_cycle(profile, d) is not None


def uniform_is_robust(profile: PreferenceProfile) -> bool:
    return len(set(profile.prefs)) == 1


def types_cost_estimate(profile: PreferenceProfile) -> int:
    """Upper bound on candidate cycles examined by :func:`is_robust_by_types`."""
    k = compute_agent_types(profile).k
    n = profile.n
    return sum(comb(k, j) * factorial(j) * n ** (2 * j) for j in range(1, k + 1))


def is_robust_by_types(profile: PreferenceProfile, p: RandomAssignment
                       ) -> tuple[bool, ConsistentTradingCycle | None]:
    """Search trading cycles with at most one agent of each type.

    A candidate cycle must use held objects in the support, each agent must
    strictly prefer the next held object, and the agents outside the cycle
    must still be perfectly matchable to the remaining objects within the
    support. Type sequences are generated with the smallest type id first so
    rotations of one cycle are examined once.
    """
    n = profile.n
    part = compute_agent_types(profile)
    members = [part.members(t) for t in range(part.k)]
    allowed = support(p).positive
    held_options = [[o for o in range(n) if allowed[i][o]] for i in range(n)]

    for length in range(2, part.k + 1):
        for first in range(part.k):
            others = [t for t in range(first + 1, part.k)]
            for tail in permutations(others, length - 1):
                seq = (first,) + tail
                found = _cycle_for_types(profile, seq, members, held_options, allowed)
                if found is not None:
                    return False, found
    return True, None


def _cycle_for_types(profile, seq, members, held_options, allowed):
    n = profile.n
    L = len(seq)
    agents: list[int] = []
    held: list[int] = []

    def rec(s: int):
        for a in members[seq[s]]:
            if a in agents:
                continue
            for o in held_options[a]:
                if o in held:
                    continue
                # the previous agent must strictly prefer this held object
                if s > 0 and not profile.prefers(agents[-1], o, held[-1]):
                    continue
                if s == L - 1 and not profile.prefers(a, held[0], o):
                    continue
                agents.append(a)
                held.append(o)
                if s == L - 1:
                    rest_a = [i for i in range(n) if i not in agents]
                    rest_o = [q for q in range(n) if q not in held]
                    if has_perfect_matching(allowed, rest_a, rest_o):
                        return ConsistentTradingCycle(tuple(
                            (agents[t], held[t], held[(t + 1) % L]) for t in range(L)))
                else:
                    found = rec(s + 1)
                    if found is not None:
                        return found
                agents.pop()
                held.pop()
        return None

    return rec(0)
