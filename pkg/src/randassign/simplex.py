"""Exact rational phase-I simplex for ``A x = b, x >= 0`` feasibility.

Bland's rule is used for both entering and leaving variables, so the method
terminates without any tolerance settings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class PhaseOneResult:
    feasible: bool
    x: list[Fraction] | None
    # y with y.A_j <= 0 for every column and y.b > 0 when infeasible
    certificate: list[Fraction] | None
    pivots: int


def phase_one(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> PhaseOneResult:
    m = len(A)
    N = len(A[0]) if m else 0
    sign = [ONE if bi >= 0 else -ONE for bi in b]
    width = N + m
    # tableau rows: [coefficients..., rhs]
    T = []
    for r in range(m):
        row = [sign[r] * Fraction(v) for v in A[r]] + [ZERO] * m + [sign[r] * Fraction(b[r])]
        row[N + r] = ONE
        T.append(row)
    basis = [N + r for r in range(m)]
    # reduced costs of min sum(artificials); last entry holds -objective
    cost = [ZERO] * (width + 1)
    for j in range(N):
        cost[j] = -sum((T[r][j] for r in range(m)), ZERO)
    cost[width] = -sum((T[r][width] for r in range(m)), ZERO)

    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(m):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][width] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:  # pragma: no cover - phase I objective is bounded below
            raise AssertionError("unbounded phase-one problem")
        _pivot(T, cost, leave, enter)
        basis[leave] = enter
        pivots += 1

    objective = -cost[width]
    if objective > 0:
        # reduced cost of artificial r is 1 - y_r (in the sign-flipped rows)
        y = [sign[r] * (ONE - cost[N + r]) for r in range(m)]
        return PhaseOneResult(False, None, y, pivots)
    x = [ZERO] * N
    for r, j in enumerate(basis):
        if j < N:
            x[j] = T[r][width]
    return PhaseOneResult(True, x, None, pivots)


def _pivot(T: list[list[Fraction]], cost: list[Fraction], r: int, c: int) -> None:
    prow = T[r]
    piv = prow[c]
    if piv != 1:
        T[r] = prow = [v / piv for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    for k, row in enumerate(T):
        if k != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * prow[j]
