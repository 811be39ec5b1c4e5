"""Domain types, instance file I/O and the stochastic-dominance relation.

Every probability in the package is a :class:`fractions.Fraction`; floats are
never accepted. Agents and objects are dense 0-based indices internally and
are mapped to names only for I/O and witness rendering.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction

DEFAULT_MAX_AGENTS = 64

ZERO = Fraction(0)
ONE = Fraction(1)


class InstanceError(ValueError):
    """Malformed or invalid instance input."""

    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


class GuardExceeded(RuntimeError):
    """An enumeration would exceed its configured size guard."""

    def __init__(self, message: str, estimate: int | None = None):
        self.estimate = estimate
        super().__init__(message)


def as_rational(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use Fraction or str")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(token: str) -> Fraction:
    if "." in token or "e" in token.lower():
        raise ValueError(f"decimal literal {token!r} rejected; write an exact fraction")
    if not _RATIONAL_RE.match(token):
        raise ValueError(f"not a rational number: {token!r}")
    value = Fraction(token)
    if value.denominator == 0:  # pragma: no cover - Fraction raises first
        raise ValueError("zero denominator")
    return value


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class PreferenceProfile:
    """Strict preferences of ``n`` agents over ``n`` objects.

    ``prefs[i]`` lists object indices from most to least preferred.
    """

    object_names: tuple[str, ...]
    prefs: tuple[tuple[int, ...], ...]
    agent_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "object_names", tuple(self.object_names))
        object.__setattr__(self, "prefs", tuple(tuple(int(o) for o in row) for row in self.prefs))
        if self.agent_names is not None:
            object.__setattr__(self, "agent_names", tuple(self.agent_names))
        n = len(self.object_names)
        if n == 0:
            raise InstanceError("at least one agent is required")
        if len(set(self.object_names)) != n:
            raise InstanceError("object names must be distinct")
        if len(self.prefs) != n:
            raise InstanceError(f"{len(self.prefs)} agents but {n} objects; counts must match")
        full = set(range(n))
        for i, row in enumerate(self.prefs):
            if len(row) != n or set(row) != full:
                raise InstanceError(f"preference list of agent {i + 1} is not a permutation of the objects")
        if self.agent_names is not None:
            if len(self.agent_names) != n or len(set(self.agent_names)) != n:
                raise InstanceError("agent names must be n distinct identifiers")

    @property
    def n(self) -> int:
        return len(self.object_names)

    @cached_property
    def rank(self) -> tuple[tuple[int, ...], ...]:
        """``rank[i][o]`` is the position of object ``o`` in agent ``i``'s list (0 = best)."""
        table = []
        for row in self.prefs:
            r = [0] * self.n
            for pos, o in enumerate(row):
                r[o] = pos
            table.append(tuple(r))
        return tuple(table)

    def prefers(self, agent: int, a: int, b: int) -> bool:
        """True iff ``agent`` strictly prefers object ``a`` to object ``b``."""
        r = self.rank[agent]
        return r[a] < r[b]

    def top(self, agent: int) -> int:
        return self.prefs[agent][0]

    def agent_label(self, agent: int) -> str:
        if self.agent_names is not None:
            return self.agent_names[agent]
        return str(agent + 1)

    def object_index(self, name: str) -> int:
        return self._object_lookup[name]

    def agent_index(self, name: str) -> int:
        if self.agent_names is None:
            return int(name) - 1
        return self.agent_names.index(name)

    @cached_property
    def _object_lookup(self) -> dict[str, int]:
        return {name: k for k, name in enumerate(self.object_names)}

    @classmethod
    def from_names(cls, object_names: Sequence[str], prefs: Sequence[Sequence[str]],
                   agent_names: Sequence[str] | None = None) -> "PreferenceProfile":
        lookup = {name: k for k, name in enumerate(object_names)}
        return cls(tuple(object_names), tuple(tuple(lookup[o] for o in row) for row in prefs),
                   None if agent_names is None else tuple(agent_names))

    @classmethod
    def from_lists(cls, prefs: Sequence[Sequence[int]]) -> "PreferenceProfile":
        """Profile over objects named ``o1..on`` from 0-based index lists."""
        n = len(prefs)
        return cls(tuple(f"o{k + 1}" for k in range(n)), tuple(tuple(row) for row in prefs))


@dataclass(frozen=True)
class DeterministicAssignment:
    """A bijection agents -> objects; ``objects[i]`` is agent ``i``'s object."""

    objects: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(int(o) for o in self.objects))
        if sorted(self.objects) != list(range(len(self.objects))):
            raise ValueError(f"not a bijection: {self.objects}")

    @property
    def n(self) -> int:
        return len(self.objects)

    def holder(self) -> tuple[int, ...]:
        """Inverse map: ``holder()[o]`` is the agent holding object ``o``."""
        inv = [0] * self.n
        for i, o in enumerate(self.objects):
            inv[o] = i
        return tuple(inv)

    def to_matrix(self) -> "RandomAssignment":
        n = self.n
        rows = tuple(tuple(ONE if self.objects[i] == o else ZERO for o in range(n)) for i in range(n))
        return RandomAssignment(rows)

    def is_consistent_with(self, p: "RandomAssignment") -> bool:
        return all(p.matrix[i][o] > 0 for i, o in enumerate(self.objects))

    def render(self, profile: PreferenceProfile) -> str:
        return ", ".join(f"{profile.agent_label(i)}↦{profile.object_names[o]}"
                         for i, o in enumerate(self.objects))


def _check_bistochastic(matrix: Sequence[Sequence[Fraction]]) -> None:
    n = len(matrix)
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise InstanceError(f"row {i + 1} has {len(row)} entries, expected {n}")
        for o, v in enumerate(row):
            if v < 0 or v > 1:
                raise InstanceError(f"entry ({i + 1},{o + 1}) = {format_rational(v)} outside [0,1]")
        s = sum(row, ZERO)
        if s != 1:
            raise InstanceError(f"row {i + 1} sums to {format_rational(s)}, not 1")
    for o in range(n):
        s = sum((matrix[i][o] for i in range(n)), ZERO)
        if s != 1:
            raise InstanceError(f"column {o + 1} sums to {format_rational(s)}, not 1")


@dataclass(frozen=True)
class RandomAssignment:
    """Bistochastic matrix ``matrix[agent][object]`` of exact rationals."""

    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if not rows:
            raise InstanceError("empty matrix")
        _check_bistochastic(rows)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def __getitem__(self, agent: int) -> tuple[Fraction, ...]:
        return self.matrix[agent]

    def is_deterministic(self) -> bool:
        return all(v in (0, 1) for row in self.matrix for v in row)

    def to_deterministic(self) -> DeterministicAssignment:
        if not self.is_deterministic():
            raise ValueError("matrix is not a permutation matrix")
        return DeterministicAssignment(tuple(row.index(ONE) for row in self.matrix))

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(v for row in self.matrix for v in row)


@dataclass(frozen=True)
class SupportMask:
    """``positive[i][o]`` marks cells allowed for consistent assignments.

    Masks taken from a bistochastic matrix have a true entry in every row and
    column; hand-built masks are not required to.
    """

    positive: tuple[tuple[bool, ...], ...]

    @property
    def n(self) -> int:
        return len(self.positive)

    def count(self) -> int:
        return sum(sum(row) for row in self.positive)

    def without(self, cells: Iterable[tuple[int, int]]) -> "SupportMask":
        drop = set(cells)
        return SupportMask(tuple(tuple(v and (i, o) not in drop for o, v in enumerate(row))
                                 for i, row in enumerate(self.positive)))


@dataclass(frozen=True)
class Decomposition:
    """Convex combination ``sum(coef * P)`` of permutation matrices."""

    terms: tuple[tuple[Fraction, DeterministicAssignment], ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def reconstruct(self) -> list[list[Fraction]]:
        n = self.terms[0][1].n
        acc = [[ZERO] * n for _ in range(n)]
        for coef, d in self.terms:
            for i, o in enumerate(d.objects):
                acc[i][o] += coef
        return acc

    def is_valid_for(self, p: RandomAssignment) -> bool:
        """Positive coefficients summing to 1, consistent terms, exact reconstruction."""
        if not self.terms:
            return False
        if any(c <= 0 or c > 1 for c, _ in self.terms):
            return False
        if sum((c for c, _ in self.terms), ZERO) != 1:
            return False
        if any(not d.is_consistent_with(p) for _, d in self.terms):
            return False
        return self.reconstruct() == [list(row) for row in p.matrix]

    def render(self, profile: PreferenceProfile) -> list[str]:
        return [f"{format_rational(c)}: {d.render(profile)}" for c, d in self.terms]


def support(p: RandomAssignment) -> SupportMask:
    return SupportMask(tuple(tuple(v > 0 for v in row) for row in p.matrix))


def uniform_matrix(n: int) -> RandomAssignment:
    if n < 1:
        raise ValueError("n must be positive")
    v = Fraction(1, n)
    return RandomAssignment(tuple(tuple(v for _ in range(n)) for _ in range(n)))


class SDRelation(enum.Enum):
    """Outcome of comparing two allocation rows under stochastic dominance.

    ``WEAKLY_PREFERS`` names the non-strict relation for completeness; on
    probability rows equal upper-contour sums force equal rows, so
    :func:`sd_prefers` reports that case as ``EQUAL``.
    """

    STRICTLY_PREFERS = "strictly_prefers"
    WEAKLY_PREFERS = "weakly_prefers"
    EQUAL = "equal"
    DISPREFERS = "disprefers"
    INCOMPARABLE = "incomparable"


def _check_probability_row(row: Sequence[Fraction], n: int) -> None:
    if len(row) != n:
        raise ValueError(f"allocation row has {len(row)} entries, expected {n}")
    if any(v < 0 or v > 1 for v in row) or sum(row, ZERO) != 1:
        raise ValueError("allocation row is not a probability vector")


def sd_prefers(profile: PreferenceProfile, agent: int, a: Sequence, b: Sequence) -> SDRelation:
    """Compare rows ``a`` and ``b`` for ``agent`` by upper-contour cumulative sums."""
    a = [as_rational(v) for v in a]
    b = [as_rational(v) for v in b]
    _check_probability_row(a, profile.n)
    _check_probability_row(b, profile.n)
    cum_a = cum_b = ZERO
    better = worse = False
    for o in profile.prefs[agent]:
        cum_a += a[o]
        cum_b += b[o]
        if cum_a > cum_b:
            better = True
        elif cum_a < cum_b:
            worse = True
    if better and worse:
        return SDRelation.INCOMPARABLE
    if better:
        return SDRelation.STRICTLY_PREFERS
    if worse:
        return SDRelation.DISPREFERS
    return SDRelation.EQUAL


# --- instance file format -------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_instance(text: str, max_agents: int = DEFAULT_MAX_AGENTS
                   ) -> tuple[PreferenceProfile, RandomAssignment | None]:
    """Parse the plain-text instance format.

    Errors carry the offending line number in :attr:`InstanceError.line`.
    """
    lines = [(k + 1, _strip(raw)) for k, raw in enumerate(text.splitlines())]
    lines = [(k, s) for k, s in lines if s]

    n: int | None = None
    objects: list[str] | None = None
    names: list[str] | None = None
    prefs: dict[int, list[int]] = {}
    rows: list[tuple[int, list[Fraction]]] = []
    section = None
    last_line = lines[-1][0] if lines else 1

    for lineno, s in lines:
        key, sep, rest = s.partition(":")
        head = key.strip().lower()
        if sep and head in ("agents", "objects", "names", "prefs", "assignment"):
            rest = rest.strip()
            if head == "agents":
                try:
                    n = int(rest)
                except ValueError:
                    raise InstanceError(f"agent count {rest!r} is not an integer", lineno) from None
                if n < 1:
                    raise InstanceError("agent count must be positive", lineno)
                if n > max_agents:
                    raise InstanceError(f"{n} agents exceeds the guard of {max_agents}", lineno)
                section = None
            elif head == "objects":
                objects = rest.split()
                if len(set(objects)) != len(objects):
                    raise InstanceError("duplicate object name in declaration", lineno)
                section = None
            elif head == "names":
                names = rest.split()
                if len(set(names)) != len(names):
                    raise InstanceError("duplicate agent name", lineno)
                section = None
            elif head == "prefs":
                if rest:
                    raise InstanceError("unexpected text after 'prefs:'", lineno)
                section = "prefs"
            else:
                if rest:
                    raise InstanceError("unexpected text after 'assignment:'", lineno)
                section = "assignment"
            continue

        if section == "prefs":
            if not sep:
                raise InstanceError("expected '<agent>: <objects...>'", lineno)
            if n is None or objects is None:
                raise InstanceError("'agents:' and 'objects:' must precede preferences", lineno)
            try:
                agent = int(key.strip())
            except ValueError:
                raise InstanceError(f"agent index {key.strip()!r} is not an integer", lineno) from None
            if not 1 <= agent <= n:
                raise InstanceError(f"agent index {agent} outside 1..{n}", lineno)
            if agent in prefs:
                raise InstanceError(f"agent {agent} listed twice", lineno)
            lookup = {name: k for k, name in enumerate(objects)}
            order = []
            for tok in rest.split():
                if tok not in lookup:
                    raise InstanceError(f"unknown object {tok!r}", lineno)
                if lookup[tok] in order:
                    raise InstanceError(f"duplicate object {tok!r} in preference list", lineno)
                order.append(lookup[tok])
            if len(order) != len(objects):
                raise InstanceError(f"agent {agent} ranks {len(order)} of {len(objects)} objects", lineno)
            prefs[agent] = order
        elif section == "assignment":
            row = []
            for tok in s.split():
                try:
                    row.append(parse_rational(tok))
                except ValueError as exc:
                    raise InstanceError(str(exc), lineno) from None
            rows.append((lineno, row))
        else:
            raise InstanceError(f"unexpected line {s!r}", lineno)

    if n is None:
        raise InstanceError("missing 'agents:' line", last_line)
    if objects is None:
        raise InstanceError("missing 'objects:' line", last_line)
    if len(objects) != n:
        raise InstanceError(f"{len(objects)} objects declared for {n} agents", last_line)
    if names is not None and len(names) != n:
        raise InstanceError(f"{len(names)} agent names declared for {n} agents", last_line)
    missing = [a for a in range(1, n + 1) if a not in prefs]
    if missing:
        raise InstanceError(f"no preference list for agent {missing[0]}", last_line)
    profile = PreferenceProfile(tuple(objects), tuple(tuple(prefs[a]) for a in range(1, n + 1)),
                                None if names is None else tuple(names))

    if not rows:
        return profile, None
    if len(rows) != n:
        raise InstanceError(f"assignment has {len(rows)} rows, expected {n}", rows[-1][0])
    for i, (lineno, row) in enumerate(rows):
        if len(row) != n:
            raise InstanceError(f"assignment row has {len(row)} entries, expected {n}", lineno)
        for v in row:
            if v < 0 or v > 1:
                raise InstanceError(f"entry {format_rational(v)} outside [0,1]", lineno)
        if sum(row, ZERO) != 1:
            raise InstanceError(f"row sums to {format_rational(sum(row, ZERO))}, not 1", lineno)
    for o in range(n):
        s = sum((row[o] for _, row in rows), ZERO)
        if s != 1:
            raise InstanceError(f"column {o + 1} sums to {format_rational(s)}, not 1", rows[-1][0])
    return profile, RandomAssignment(tuple(tuple(row) for _, row in rows))


def serialize_instance(profile: PreferenceProfile, assignment: RandomAssignment | None = None) -> str:
    out = [f"agents: {profile.n}", "objects: " + " ".join(profile.object_names)]
    if profile.agent_names is not None:
        out.append("names: " + " ".join(profile.agent_names))
    out.append("prefs:")
    for i, row in enumerate(profile.prefs):
        out.append(f"{i + 1}: " + " ".join(profile.object_names[o] for o in row))
    if assignment is not None:
        if assignment.n != profile.n:
            raise ValueError("assignment size does not match the profile")
        out.append("assignment:")
        for row in assignment.matrix:
            out.append(" ".join(format_rational(v) for v in row))
    return "\n".join(out) + "\n"
