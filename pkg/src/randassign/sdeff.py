"""SD-efficiency via trading cycles consistent with a random assignment."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import PreferenceProfile, RandomAssignment


@dataclass(frozen=True)
class ConsistentTradingCycle:
    """Cyclic list of ``(agent, held_object, desired_object)``.

    ``p[agent][held] > 0``, the agent strictly prefers ``desired`` to
    ``held``, and ``desired`` is the next entry's ``held``.
    """

    entries: tuple[tuple[int, int, int], ...]

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(e[0] for e in self.entries)

    def is_valid_for(self, profile: PreferenceProfile, p: RandomAssignment) -> bool:
        k = len(self.entries)
        if k < 2:
            return False
        agents = [e[0] for e in self.entries]
        held = [e[1] for e in self.entries]
        if len(set(agents)) != k or len(set(held)) != k:
            return False
        for s, (agent, h, want) in enumerate(self.entries):
            if p.matrix[agent][h] <= 0 or not profile.prefers(agent, want, h):
                return False
            if want != self.entries[(s + 1) % k][1]:
                return False
        return True

    def execute(self, p: RandomAssignment, eps: Fraction | None = None) -> RandomAssignment:
        """Shift ``eps`` (default: smallest held entry) along the cycle."""
        if eps is None:
            eps = min(p.matrix[a][h] for a, h, _ in self.entries)
        rows = [list(row) for row in p.matrix]
        for a, h, want in self.entries:
            rows[a][h] -= eps
            rows[a][want] += eps
        return RandomAssignment(tuple(tuple(r) for r in rows))

    def render(self, profile: PreferenceProfile) -> str:
        names = profile.object_names
        parts = [f"{profile.agent_label(a)} —holds {names[h]}, wants {names[w]}→"
                 for a, h, w in self.entries]
        return " ".join(parts) + f" {profile.agent_label(self.entries[0][0])}"


def _edge_labels(profile: PreferenceProfile, p: RandomAssignment) -> dict[tuple[int, int], int]:
    """``(held, wanted) -> agent``: smallest agent holding ``held`` with
    positive probability who strictly prefers ``wanted``."""
    labels: dict[tuple[int, int], int] = {}
    for agent in range(profile.n):
        for held in range(profile.n):
            if p.matrix[agent][held] <= 0:
                continue
            for wanted in profile.prefs[agent][: profile.rank[agent][held]]:
                labels.setdefault((held, wanted), agent)
    return labels


def find_consistent_cycle(profile: PreferenceProfile, p: RandomAssignment) -> ConsistentTradingCycle | None:
    """Shortest consistent trading cycle, or None when ``p`` is SD-efficient.

    Works on the object graph ``held -> wanted``. A shortest cycle there
    never reuses an agent: two edges owned by the same agent can always be
    short-circuited into a strictly shorter cycle. Ties go to the cycle
    found from the lowest start object; the result is rotated to begin at
    its smallest agent.
    """
    n = profile.n
    labels = _edge_labels(profile, p)
    succ: list[list[int]] = [[] for _ in range(n)]
    for (held, wanted) in sorted(labels):
        succ[held].append(wanted)

    best: list[int] | None = None
    for start in range(n):
        parent = {start: -1}
        queue = deque([start])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for v in succ[u]:
                if v == start:
                    found = u
                    break
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        if found is None:
            continue
        path = [found]
        while path[-1] != start:
            path.append(parent[path[-1]])
        path.reverse()
        if best is None or len(path) < len(best):
            best = path
            if len(best) == 2:
                break
    if best is None:
        return None

    k = len(best)
    entries = []
    for s in range(k):
        held, wanted = best[s], best[(s + 1) % k]
        entries.append((labels[(held, wanted)], held, wanted))
    first = min(range(k), key=lambda s: entries[s][0])
    entries = entries[first:] + entries[:first]
    cycle = ConsistentTradingCycle(tuple(entries))
    assert cycle.is_valid_for(profile, p)
    return cycle


def is_sd_efficient(profile: PreferenceProfile, p: RandomAssignment) -> bool:
    return find_consistent_cycle(profile, p) is None
