"""Deterministic Pareto optimality, serial dictatorship and RSD."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .core import (
    DeterministicAssignment,
    GuardExceeded,
    PreferenceProfile,
    RandomAssignment,
    uniform_matrix,
)

DEFAULT_RSD_GUARD = 9


@dataclass(frozen=True)
class TradingCycle:
    """Cyclic list of ``(agent, held object)`` pairs.

    Each agent strictly prefers the object held by the next entry.
    """

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        agents = [a for a, _ in self.entries]
        objs = [o for _, o in self.entries]
        if len(self.entries) < 2 or len(set(agents)) != len(agents) or len(set(objs)) != len(objs):
            raise ValueError(f"malformed trading cycle {self.entries}")

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.entries)

    def is_valid_for(self, profile: PreferenceProfile, d: DeterministicAssignment) -> bool:
        k = len(self.entries)
        for s, (agent, held) in enumerate(self.entries):
            wanted = self.entries[(s + 1) % k][1]
            if d.objects[agent] != held or not profile.prefers(agent, wanted, held):
                return False
        return True

    def render(self, profile: PreferenceProfile) -> str:
        k = len(self.entries)
        parts = []
        for s, (agent, held) in enumerate(self.entries):
            wanted = self.entries[(s + 1) % k][1]
            parts.append(f"{profile.agent_label(agent)} —holds {profile.object_names[held]}, "
                         f"wants {profile.object_names[wanted]}→")
        return " ".join(parts) + f" {profile.agent_label(self.entries[0][0])}"


def serial_dictatorship(profile: PreferenceProfile, order: Sequence[int]) -> DeterministicAssignment:
    """Agents in ``order`` take their best remaining object in turn."""
    if sorted(order) != list(range(profile.n)):
        raise ValueError("order must be a permutation of the agents")
    taken = [False] * profile.n
    result = [0] * profile.n
    for agent in order:
        for o in profile.prefs[agent]:
            if not taken[o]:
                taken[o] = True
                result[agent] = o
                break
    return DeterministicAssignment(tuple(result))


def corresponding_graph(profile: PreferenceProfile, d: DeterministicAssignment) -> dict[tuple[str, int], list[tuple[str, int]]]:
    """Adjacency lists over nodes ``("agent", i)`` and ``("object", o)``.

    Objects point to their holder; agents point to every object they
    strictly prefer to their own, in preference order.
    """
    graph: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for i, held in enumerate(d.objects):
        graph[("object", held)] = [("agent", i)]
        better = profile.prefs[i][: profile.rank[i][held]]
        graph[("agent", i)] = [("object", o) for o in better]
    return graph


def find_trading_cycle(profile: PreferenceProfile, d: DeterministicAssignment) -> TradingCycle | None:
    """First trading cycle in the corresponding graph, or None if ``d`` is Pareto optimal.

    Start agents are tried in ascending order; each search only visits agents
    with larger index, so the returned cycle has the smallest possible
    minimum agent. Out-edges are explored in the agent's preference order.
    """
    if d.n != profile.n:
        raise ValueError("assignment and profile sizes differ")
    holder = d.holder()
    n = profile.n
    for start in range(n):
        parent: dict[int, int] = {}
        stack = [(start, iter(profile.prefs[start][: profile.rank[start][d.objects[start]]]))]
        visited = {start}
        while stack:
            agent, it = stack[-1]
            for o in it:
                nxt = holder[o]
                if nxt == start:
                    path = [agent]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return TradingCycle(tuple((a, d.objects[a]) for a in path))
                if nxt > start and nxt not in visited:
                    visited.add(nxt)
                    parent[nxt] = agent
                    held = d.objects[nxt]
                    stack.append((nxt, iter(profile.prefs[nxt][: profile.rank[nxt][held]])))
                    break
            else:
                stack.pop()
    return None


def is_pareto_optimal(profile: PreferenceProfile, d: DeterministicAssignment) -> bool:
    return find_trading_cycle(profile, d) is None


def rsd_assignment(profile: PreferenceProfile, guard: int = DEFAULT_RSD_GUARD) -> RandomAssignment:
    """Exact random serial dictatorship by averaging over all ``n!`` orders."""
    n = profile.n
    if n > guard:
        raise GuardExceeded(f"RSD enumerates {n}! orders; n={n} exceeds the guard of {guard}",
                            math.factorial(n))
    counts = [[0] * n for _ in range(n)]
    for order in permutations(range(n)):
        d = serial_dictatorship(profile, order)
        for i, o in enumerate(d.objects):
            counts[i][o] += 1
    total = math.factorial(n)
    return RandomAssignment(tuple(tuple(Fraction(c, total) for c in row) for row in counts))


def uniform_assignment(n: int) -> RandomAssignment:
    return uniform_matrix(n)
