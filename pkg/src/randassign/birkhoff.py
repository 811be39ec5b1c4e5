"""Birkhoff decomposition of bistochastic matrices into permutation matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import (
    ZERO,
    Decomposition,
    DeterministicAssignment,
    RandomAssignment,
    SupportMask,
    support,
)


def _augment(agent: int, allowed: Sequence[Sequence[bool]], match_obj: list[int], seen: list[bool]) -> bool:
    row = allowed[agent]
    for o in range(len(row)):
        if row[o] and not seen[o]:
            seen[o] = True
            if match_obj[o] < 0 or _augment(match_obj[o], allowed, match_obj, seen):
                match_obj[o] = agent
                return True
    return False


def maximum_matching(allowed: Sequence[Sequence[bool]], agents: Sequence[int] | None = None,
                     objects: Sequence[int] | None = None) -> dict[int, int]:
    """Augmenting-path matching restricted to the given agents and objects.

    Rows are seeded greedily in ascending order, then unmatched rows are
    augmented in ascending order. Returns ``{agent: object}``.
    """
    n = len(allowed)
    agents = range(n) if agents is None else sorted(agents)
    obj_ok = [True] * n if objects is None else [False] * n
    if objects is not None:
        for o in objects:
            obj_ok[o] = True
    grid = [[bool(allowed[i][o]) and obj_ok[o] for o in range(n)] for i in range(n)]

    match_obj = [-1] * n
    unmatched = []
    for i in agents:
        for o in range(n):
            if grid[i][o] and match_obj[o] < 0:
                match_obj[o] = i
                break
        else:
            unmatched.append(i)
    for i in unmatched:
        _augment(i, grid, match_obj, [False] * n)
    return {i: o for o, i in enumerate(match_obj) if i >= 0}


def has_perfect_matching(allowed: Sequence[Sequence[bool]], agents: Sequence[int],
                         objects: Sequence[int]) -> bool:
    if len(agents) != len(objects):
        return False
    return len(maximum_matching(allowed, agents, objects)) == len(agents)


def find_consistent_matching(mask: SupportMask) -> DeterministicAssignment | None:
    """A perfect matching inside ``mask``, or None when Hall's condition fails."""
    m = maximum_matching(mask.positive)
    if len(m) < mask.n:
        return None
    return DeterministicAssignment(tuple(m[i] for i in range(mask.n)))


def peel(p, d: DeterministicAssignment) -> tuple[Fraction, list[list[Fraction]]]:
    """Subtract the largest multiple of ``d`` that keeps ``p`` nonnegative.

    ``p`` may be a :class:`RandomAssignment` or a scaled remainder matrix
    (rows summing to a common positive value). Returns the coefficient and
    the new remainder.
    """
    matrix = p.matrix if isinstance(p, RandomAssignment) else p
    entries = [matrix[i][o] for i, o in enumerate(d.objects)]
    if any(v <= 0 for v in entries):
        raise ValueError("assignment is not consistent with the matrix")
    lam = min(entries)
    rest = [list(row) for row in matrix]
    for i, o in enumerate(d.objects):
        rest[i][o] -= lam
    return lam, rest


def birkhoff_decompose(p: RandomAssignment) -> Decomposition:
    """Repeatedly peel a support-consistent permutation until nothing is left.

    Each step zeroes at least one more entry, so at most ``n*n - n + 1``
    terms are produced.
    """
    remainder = [list(row) for row in p.matrix]
    left = Fraction(1)
    terms = []
    while left > 0:
        mask = SupportMask(tuple(tuple(v > 0 for v in row) for row in remainder))
        d = find_consistent_matching(mask)
        if d is None:  # pragma: no cover - impossible for a bistochastic input
            raise AssertionError("remainder lost its perfect matching")
        lam, remainder = peel(remainder, d)
        terms.append((lam, d))
        left -= lam
    assert all(v == ZERO for row in remainder for v in row)
    return Decomposition(tuple(terms))


__all__ = [
    "birkhoff_decompose",
    "find_consistent_matching",
    "has_perfect_matching",
    "maximum_matching",
    "peel",
    "support",
]
