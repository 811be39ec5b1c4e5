"""Ex post efficiency as exact hull membership over Pareto optimal assignments.

Two routes are provided. :func:`is_ex_post_efficient` enumerates every
assignment consistent with the support, keeps the Pareto optimal ones and
solves one exact LP. :func:`pruned_ex_post_search` never enumerates; it
grows the generator set by column generation, pricing each LP certificate
with a branch-and-bound search over consistent assignments that discards any
partial assignment already containing a trading cycle.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .birkhoff import find_consistent_matching, has_perfect_matching
from .core import (
    ZERO,
    Decomposition,
    DeterministicAssignment,
    GuardExceeded,
    InstanceError,
    PreferenceProfile,
    RandomAssignment,
    SupportMask,
    support,
)
from .pareto import find_trading_cycle, is_pareto_optimal
from .simplex import phase_one

DEFAULT_ENUMERATION_GUARD = 2 ** 20

log = logging.getLogger(__name__)


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not_member"
    INCONCLUSIVE = "inconclusive"


class Diagnostic(enum.Enum):
    LP_INFEASIBLE = "lp_infeasible"
    NO_PO_GENERATORS = "no_po_generators"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class HullMembershipResult:
    verdict: Membership
    decomposition: Decomposition | None
    generators_enumerated: int
    po_generators: int
    diagnostic: Diagnostic | None = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Membership.MEMBER

    def describe(self) -> str:
        if self.verdict is Membership.MEMBER:
            return (f"member: {len(self.decomposition)} Pareto optimal terms "
                    f"({self.po_generators} PO generators of {self.generators_enumerated} consistent)")
        if self.diagnostic is Diagnostic.NO_PO_GENERATORS:
            return (f"not_member: no Pareto optimal assignment among "
                    f"{self.generators_enumerated} consistent assignments")
        if self.diagnostic is Diagnostic.TIMEOUT:
            return f"inconclusive: search budget exhausted after {self.po_generators} PO generators"
        return f"not_member: LP infeasible over {self.po_generators} PO generators"


# --- enumeration ------------------------------------------------------------


def _ceil_root(value: int, k: int) -> int:
    """Smallest integer x with x**k >= value."""
    lo, hi = 1, max(1, value)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k >= value:
            hi = mid
        else:
            lo = mid + 1
    return lo


def permanent_upper_bound(mask: SupportMask) -> int:
    """Integer upper bound on the number of perfect matchings (Bregman–Minc)."""
    from math import factorial

    bound = 1
    for row in mask.positive:
        r = sum(row)
        if r == 0:
            return 0
        bound *= _ceil_root(factorial(r), r)
    return bound


def enumerate_consistent_assignments(mask: SupportMask, guard: int = DEFAULT_ENUMERATION_GUARD
                                     ) -> Iterator[DeterministicAssignment]:
    """Yield every perfect matching inside ``mask`` in lexicographic order.

    Raises :class:`GuardExceeded` before yielding anything when the
    permanent bound exceeds ``guard``.
    """
    estimate = permanent_upper_bound(mask)
    if estimate > guard:
        raise GuardExceeded(f"up to {estimate} consistent assignments; guard is {guard}", estimate)
    return _enumerate(mask)


def _enumerate(mask: SupportMask) -> Iterator[DeterministicAssignment]:
    n = mask.n
    allowed = mask.positive
    choice = [0] * n
    used = [False] * n

    def rec(i: int):
        if i == n:
            yield DeterministicAssignment(tuple(choice))
            return
        rest_agents = range(i + 1, n)
        for o in range(n):
            if allowed[i][o] and not used[o]:
                used[o] = True
                free = [q for q in range(n) if not used[q]]
                if has_perfect_matching(allowed, rest_agents, free):
                    choice[i] = o
                    yield from rec(i + 1)
                used[o] = False

    return rec(0)


def has_consistent_pareto_optimal(profile: PreferenceProfile, p: RandomAssignment,
                                  guard: int = DEFAULT_ENUMERATION_GUARD) -> DeterministicAssignment | None:
    for d in enumerate_consistent_assignments(support(p), guard):
        if is_pareto_optimal(profile, d):
            return d
    return None


def no_top_object_certificate(profile: PreferenceProfile, p: RandomAssignment) -> DeterministicAssignment | None:
    """A consistent assignment giving no agent its top object, if any.

    This is a perfect matching problem on the support with every agent's top
    cell removed, so no enumeration is needed.
    """
    mask = support(p).without((i, profile.top(i)) for i in range(profile.n))
    return find_consistent_matching(mask)


# --- exact LP ------------------------------------------------------------------


def _kept_cells(n: int, cells: set[tuple[int, int]]) -> list[tuple[int, int]]:
    """Cells outside a spanning forest of the bipartite support graph.

    With the convexity row, the equalities on the remaining forest cells
    follow from row and column sums, so only these rows are needed.
    """
    parent = list(range(2 * n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    kept = []
    for cell in sorted(cells):
        a, b = find(cell[0]), find(n + cell[1])
        if a == b:
            kept.append(cell)
        else:
            parent[a] = b
    return kept


def _system(target: Sequence[Sequence[Fraction]], generators: Sequence[DeterministicAssignment],
            kept: Sequence[tuple[int, int]]):
    A = []
    b = []
    for (i, o) in kept:
        A.append([Fraction(1) if g.objects[i] == o else ZERO for g in generators])
        b.append(target[i][o])
    A.append([Fraction(1)] * len(generators))
    b.append(Fraction(1))
    return A, b


def lp_membership(target: Sequence[Fraction], generators: Sequence[DeterministicAssignment]
                  ) -> list[Fraction] | None:
    """Exact basic solution ``lam >= 0, sum(lam) = 1, sum(lam_k P_k) = target``.

    ``target`` is the row-major flattening of an ``n x n`` matrix. Returns
    one coefficient per generator, or None when infeasible.
    """
    if not generators:
        raise ValueError("at least one generator is required")
    n = generators[0].n
    values = [Fraction(v) for v in target]
    if len(values) != n * n:
        raise ValueError(f"target has {len(values)} entries, expected {n * n}")
    rows = [values[i * n:(i + 1) * n] for i in range(n)]
    try:
        RandomAssignment(tuple(tuple(r) for r in rows))
    except InstanceError:
        return None
    cells = {(i, o) for i in range(n) for o in range(n) if rows[i][o] != 0}
    for g in generators:
        cells.update(enumerate(g.objects))
    A, b = _system(rows, generators, _kept_cells(n, cells))
    res = phase_one(A, b)
    return res.x if res.feasible else None


def _result_from_solution(p: RandomAssignment, gens: Sequence[DeterministicAssignment],
                          lam: Sequence[Fraction], enumerated: int) -> HullMembershipResult:
    terms = tuple((c, g) for c, g in zip(lam, gens) if c > 0)
    dec = Decomposition(terms)
    n = p.n
    assert dec.is_valid_for(p), "LP solution failed exact reconstruction"
    assert len(dec) <= n * n - 2 * n + 2
    return HullMembershipResult(Membership.MEMBER, dec, enumerated, len(gens))


def is_ex_post_efficient(profile: PreferenceProfile, p: RandomAssignment,
                         guard: int = DEFAULT_ENUMERATION_GUARD) -> HullMembershipResult:
    """Decide ex post efficiency by enumeration plus one exact LP.

    Every term of any decomposition must be consistent with ``p``, so the
    consistent Pareto optimal assignments are the only candidate generators.
    """
    enumerated = 0
    gens = []
    for d in enumerate_consistent_assignments(support(p), guard):
        enumerated += 1
        if is_pareto_optimal(profile, d):
            gens.append(d)
    if not gens:
        return HullMembershipResult(Membership.NOT_MEMBER, None, enumerated, 0, Diagnostic.NO_PO_GENERATORS)
    lam = lp_membership(p.flat(), gens)
    if lam is None:
        return HullMembershipResult(Membership.NOT_MEMBER, None, enumerated, len(gens), Diagnostic.LP_INFEASIBLE)
    return _result_from_solution(p, gens, lam, enumerated)


# --- pruned search ----------------------------------------------------------


class SearchTimeout(Exception):
    pass


class _Found(Exception):
    pass


def _agent_order(profile: PreferenceProfile, mask: SupportMask) -> list[int]:
    """Static branching order that lets trading cycles close early.

    Agent ``a`` may point at agent ``b`` when ``a`` prefers some object in
    ``b``'s support row to some object in its own. Agents are taken greedily
    by the number of such links to agents already placed, and agents sharing
    a support object with the one just placed follow it immediately.
    """
    n = mask.n
    rows = [[o for o in range(n) if mask.positive[i][o]] for i in range(n)]
    worst = [max(profile.rank[i][o] for o in rows[i]) for i in range(n)]
    links = [set() for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and any(profile.rank[a][o] < worst[a] for o in rows[b]):
                links[a].add(b)
                links[b].add(a)
    share = [sorted({j for o in rows[i] for j in range(n) if j != i and mask.positive[j][o]})
             for i in range(n)]
    score = [0] * n
    placed = [False] * n
    order: list[int] = []

    def place(i: int):
        placed[i] = True
        order.append(i)
        for j in links[i]:
            score[j] += 1

    while len(order) < n:
        free = [i for i in range(n) if not placed[i]]
        pick = max(free, key=lambda i: (score[i], len(links[i]), -i))
        place(pick)
        for j in share[pick]:
            if not placed[j]:
                place(j)
    return order


class _PricingSearch:
    """Branch and bound for the heaviest Pareto optimal consistent assignment.

    Feasibility is tracked incrementally: every unassigned agent must keep a
    free support object and every free object must keep a candidate agent.
    Small instances additionally run a full matching check at each node.
    """

    FULL_CHECK_MAX_N = 16

    def __init__(self, profile: PreferenceProfile, mask: SupportMask, deadline: float | None):
        self.profile = profile
        self.mask = mask
        self.n = n = mask.n
        self.deadline = deadline
        self.order = _agent_order(profile, mask)
        self.options = [[o for o in range(n) if mask.positive[i][o]] for i in range(n)]
        self.takers = [[i for i in range(n) if mask.positive[i][o]] for o in range(n)]
        self.better = [[profile.prefs[i][: profile.rank[i][o]] for o in range(n)] for i in range(n)]
        self.nodes = 0

    def _creates_cycle(self, agent: int, assign: list[int], holder: list[int]) -> bool:
        stack = [agent]
        seen = {agent}
        better = self.better
        while stack:
            u = stack.pop()
            for o in better[u][assign[u]]:
                v = holder[o]
                if v < 0:
                    continue
                if v == agent:
                    return True
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False

    def best(self, weights: Sequence[Sequence[Fraction]], threshold: Fraction,
             first_only: bool = False) -> tuple[DeterministicAssignment | None, Fraction]:
        """Best assignment with total weight strictly above ``threshold``.

        With ``first_only`` the search stops at the first such assignment.
        """
        n = self.n
        assign = [-1] * n
        holder = [-1] * n
        free_opts = [len(self.options[i]) for i in range(n)]
        open_takers = [len(self.takers[o]) for o in range(n)]
        order = self.order
        options, takers = self.options, self.takers
        full_check = n <= self.FULL_CHECK_MAX_N
        self.best_value = threshold
        self.best_assign = None

        def upper(pos: int) -> Fraction:
            total = ZERO
            for i in order[pos:]:
                total += max(weights[i][o] for o in options[i] if holder[o] < 0)
            return total

        def take(agent: int, o: int) -> bool:
            ok = True
            assign[agent] = o
            holder[o] = agent
            for j in takers[o]:
                if assign[j] < 0:
                    free_opts[j] -= 1
                    if free_opts[j] == 0:
                        ok = False
            for q in options[agent]:
                if holder[q] < 0:
                    open_takers[q] -= 1
                    if open_takers[q] == 0:
                        ok = False
            return ok

        def release(agent: int, o: int) -> None:
            for q in options[agent]:
                if holder[q] < 0:
                    open_takers[q] += 1
            for j in takers[o]:
                if assign[j] < 0:
                    free_opts[j] += 1
            assign[agent] = -1
            holder[o] = -1

        def rec(pos: int, value: Fraction):
            self.nodes += 1
            if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
                raise SearchTimeout
            if pos == n:
                if value > self.best_value:
                    self.best_value = value
                    self.best_assign = DeterministicAssignment(tuple(assign))
                    if first_only:
                        raise _Found
                return
            if value + upper(pos) <= self.best_value:
                return
            agent = order[pos]
            cands = [o for o in options[agent] if holder[o] < 0]
            cands.sort(key=lambda o: (-weights[agent][o], o))
            for o in cands:
                ok = take(agent, o)
                if ok and full_check:
                    ok = has_perfect_matching(self.mask.positive, order[pos + 1:],
                                              [q for q in range(n) if holder[q] < 0])
                if ok and not self._creates_cycle(agent, assign, holder):
                    rec(pos + 1, value + weights[agent][o])
                release(agent, o)

        try:
            rec(0, ZERO)
        except _Found:
            pass
        return self.best_assign, self.best_value


def pruned_ex_post_search(profile: PreferenceProfile, p: RandomAssignment,
                          budget_s: float | None = 60.0) -> HullMembershipResult:
    """Column generation over Pareto optimal consistent assignments.

    Each round solves the restricted LP; on infeasibility its Farkas vector
    prices the remaining assignments and the heaviest Pareto optimal one is
    added. When no assignment prices positively the verdict is a certified
    ``not_member``. Running out of ``budget_s`` yields ``inconclusive``.
    """
    deadline = None if budget_s is None else time.monotonic() + budget_s
    n = p.n
    mask = support(p)
    kept = _kept_cells(n, {(i, o) for i in range(n) for o in range(n) if mask.positive[i][o]})
    search = _PricingSearch(profile, mask, deadline)
    gens: list[DeterministicAssignment] = []
    try:
        first, _ = search.best(p.matrix, threshold=Fraction(-1), first_only=True)
        if first is None:
            return HullMembershipResult(Membership.NOT_MEMBER, None, search.nodes, 0, Diagnostic.NO_PO_GENERATORS)
        gens.append(first)
        while True:
            A, b = _system(p.matrix, gens, kept)
            res = phase_one(A, b)
            if res.feasible:
                return _result_from_solution(p, gens, res.x, search.nodes)
            y = res.certificate
            weights = [[ZERO] * n for _ in range(n)]
            for r, (i, o) in enumerate(kept):
                weights[i][o] = y[r]
            # column value is y.A_g = sum of cell weights + convexity dual
            g, _ = search.best(weights, threshold=-y[-1])
            log.debug("round %d: %d generators, %d search nodes", len(gens), len(gens), search.nodes)
            if g is None:
                return HullMembershipResult(Membership.NOT_MEMBER, None, search.nodes, len(gens),
                                            Diagnostic.LP_INFEASIBLE)
            assert find_trading_cycle(profile, g) is None
            gens.append(g)
    except SearchTimeout:
        return HullMembershipResult(Membership.INCONCLUSIVE, None, search.nodes, len(gens), Diagnostic.TIMEOUT)
