"""3-SAT to ex post efficiency: instance construction and the two-term certificate.

Naming: variable ``x_i`` is agent ``x{i}``, its copy for clause ``j`` is
``x{i}_{j}``, the clause agents are ``c`` and ``c_{j}``, and the dummy of
agent ``a`` is ``d_{a}``. Every base agent ``a`` owns the object pair
``+a`` / ``-a``, shared only with its dummy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .core import DeterministicAssignment, PreferenceProfile, RandomAssignment

SAT_GUARD = 24

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SatInstance:
    """3-CNF with DIMACS-style signed literals; each clause has strictly
    increasing variable indices."""

    var_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.var_count < 0:
            raise ValueError("variable count must be nonnegative")
        for j, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise ValueError(f"clause {j} has {len(clause)} literals, expected 3")
            vars_ = [abs(l) for l in clause]
            if any(l == 0 for l in clause):
                raise ValueError(f"clause {j} contains literal 0")
            if any(v > self.var_count for v in vars_):
                raise ValueError(f"clause {j} uses a variable above {self.var_count}")
            if not vars_[0] < vars_[1] < vars_[2]:
                raise ValueError(f"clause {j} variables {vars_} are not strictly increasing")

    def satisfied_by(self, values: Sequence[bool]) -> bool:
        if len(values) != self.var_count:
            raise ValueError("valuation length differs from variable count")
        return all(any(values[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses)


def parse_cnf(text: str) -> SatInstance:
    """Read DIMACS-like CNF: optional ``p cnf k t`` header, ``c`` comments,
    clauses terminated by ``0``."""
    declared = None
    literals: list[int] = []
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header {line!r}")
            declared = (int(parts[2]), int(parts[3]))
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ValueError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(literals))
                literals = []
            else:
                literals.append(lit)
    if literals:
        clauses.append(tuple(literals))
    k = declared[0] if declared else max((abs(l) for c in clauses for l in c), default=0)
    if declared and declared[1] != len(clauses):
        raise ValueError(f"header declares {declared[1]} clauses, found {len(clauses)}")
    return SatInstance(k, tuple(clauses))


def format_cnf(f: SatInstance) -> str:
    lines = [f"p cnf {f.var_count} {len(f.clauses)}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def brute_force_sat(f: SatInstance, guard: int = SAT_GUARD) -> tuple[bool, ...] | None:
    """Lexicographically smallest satisfying valuation (False < True, x1 first)."""
    if f.var_count > guard:
        raise ValueError(f"{f.var_count} variables exceeds the brute-force guard of {guard}")
    for values in product((False, True), repeat=f.var_count):
        if f.satisfied_by(values):
            return values
    return None


def _x(i: int) -> str:
    return f"x{i}"


def _xc(i: int, j: int) -> str:
    return f"x{i}_{j}"


def _c(j: int) -> str:
    return f"c_{j}"


def failing_object(lit: int, j: int) -> str:
    """Object for the value of the literal's variable that falsifies it."""
    i = abs(lit)
    return ("+" if lit < 0 else "-") + _xc(i, j)


@dataclass(frozen=True)
class ReducedInstance:
    formula: SatInstance
    profile: PreferenceProfile
    p: RandomAssignment
    base_agents: tuple[str, ...]
    s_sets: dict[tuple[int, int], tuple[str, ...]]
    s_top: tuple[str, ...]

    def agent(self, name: str) -> int:
        return self.profile.agent_index(name)

    def obj(self, name: str) -> int:
        return self.profile.object_index(name)

    def sign(self, d: DeterministicAssignment, agent_name: str) -> str:
        """``"+"`` or ``"-"`` according to which object of its pair the agent holds."""
        base = agent_name[2:] if agent_name.startswith("d_") else agent_name
        held = self.profile.object_names[d.objects[self.agent(agent_name)]]
        if held[1:] != base:
            raise ValueError(f"{agent_name} holds {held}, outside its pair")
        return held[0]

    def sign_structure_holds(self, d: DeterministicAssignment) -> bool:
        """Every base agent's sign differs from its dummy's."""
        return all(self.sign(d, a) != self.sign(d, "d_" + a) for a in self.base_agents)


def build_reduction(f: SatInstance) -> ReducedInstance:
    k, t = f.var_count, len(f.clauses)

    s_sets: dict[tuple[int, int], tuple[str, ...]] = {
        (i, j): () for i in range(1, k + 1) for j in range(1, t + 1)}
    s_top = []
    for j, (l1, l2, l3) in enumerate(f.clauses, start=1):
        s_sets[(abs(l1), j)] = (failing_object(l2, j),)
        s_sets[(abs(l2), j)] = (failing_object(l3, j),)
        s_sets[(abs(l3), j)] = ("+" + _c(j),)
        s_top.append(failing_object(l1, j))

    base = []
    for i in range(1, k + 1):
        base.append(_x(i))
        base += [_xc(i, j) for j in range(1, t + 1)]
    base.append("c")
    base += [_c(j) for j in range(1, t + 1)]

    objects = []
    for a in base:
        objects += ["+" + a, "-" + a]
    tail_order = sorted(objects, key=lambda o: (o[1:], o[0] != "+"))

    def complete(head: list[str]) -> list[str]:
        taken = set(head)
        return head + [o for o in tail_order if o not in taken]

    positive_in = {(l, j) for j, clause in enumerate(f.clauses, start=1) for l in clause if l > 0}

    agent_names = []
    prefs = []
    for i in range(1, k + 1):
        xi = _x(i)
        agent_names.append(xi)
        prefs.append(complete(["+" + xi] + ["+" + _xc(i, j) for j in range(1, t + 1)] + ["-" + xi]))
        agent_names.append("d_" + xi)
        prefs.append(complete(["+" + xi, "-" + xi]))
        for j in range(1, t + 1):
            xij = _xc(i, j)
            s = list(s_sets[(i, j)])
            agent_names.append(xij)
            if (i, j) in positive_in:
                prefs.append(complete(s + ["-" + xij, "-" + xi, "+" + xij]))
            else:
                prefs.append(complete(["-" + xij, "-" + xi] + s + ["+" + xij]))
            agent_names.append("d_" + xij)
            prefs.append(complete(["-" + xij, "+" + xij]))
    agent_names.append("c")
    prefs.append(complete(list(s_top) + ["+c"] + ["+" + _c(j) for j in range(1, t + 1)] + ["-c"]))
    agent_names.append("d_c")
    prefs.append(complete(["+c", "-c"]))
    for j in range(1, t + 1):
        cj = _c(j)
        agent_names.append(cj)
        prefs.append(complete(["-" + cj, "-c", "+" + cj]))
        agent_names.append("d_" + cj)
        prefs.append(complete(["-" + cj, "+" + cj]))

    profile = PreferenceProfile.from_names(objects, prefs, agent_names)
    n = profile.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for a in base:
        for who in (a, "d_" + a):
            ai = profile.agent_index(who)
            rows[ai][profile.object_index("+" + a)] = HALF
            rows[ai][profile.object_index("-" + a)] = HALF
    p = RandomAssignment(tuple(tuple(r) for r in rows))
    return ReducedInstance(f, profile, p, tuple(base), s_sets, tuple(s_top))


def signed_assignment(r: ReducedInstance, signs: dict[str, str]) -> DeterministicAssignment:
    """Assignment in which base agent ``a`` holds ``signs[a] + a`` and its
    dummy holds the other object of the pair."""
    objs = [0] * r.profile.n
    for a in r.base_agents:
        s = signs[a]
        other = "-" if s == "+" else "+"
        objs[r.agent(a)] = r.obj(s + a)
        objs[r.agent("d_" + a)] = r.obj(other + a)
    return DeterministicAssignment(tuple(objs))


def build_m1_m2(r: ReducedInstance, values: Sequence[bool]
                ) -> tuple[DeterministicAssignment, DeterministicAssignment]:
    """The two Pareto optimal assignments averaging to ``r.p`` for a satisfying valuation."""
    f = r.formula
    if not f.satisfied_by(values):
        raise ValueError("valuation does not satisfy the formula")
    k, t = f.var_count, len(f.clauses)
    signs = {"c": "+"}
    signs.update({_c(j): "+" for j in range(1, t + 1)})
    for i in range(1, k + 1):
        s = "+" if values[i - 1] else "-"
        signs[_x(i)] = s
        signs.update({_xc(i, j): s for j in range(1, t + 1)})
    flipped = {a: "-" if s == "+" else "+" for a, s in signs.items()}
    return signed_assignment(r, signs), signed_assignment(r, flipped)


def agent_count(var_count: int, clause_count: int) -> int:
    return 2 * (var_count * (clause_count + 1) + clause_count + 1)
