"""Seeded random instances for the CLI and the test corpora."""

from __future__ import annotations

import random
from math import factorial
from fractions import Fraction
from typing import Sequence

from .core import DeterministicAssignment, PreferenceProfile, RandomAssignment
from .pareto import serial_dictatorship


def random_profile(n: int, rng: random.Random, types: int | None = None) -> PreferenceProfile:
    """Uniform random strict preferences; with ``types`` the agents draw
    their list from that many distinct orders, each used at least once."""
    if types is None:
        rows = [rng.sample(range(n), n) for _ in range(n)]
    else:
        if not 1 <= types <= min(n, factorial(n)):
            raise ValueError(f"cannot build {types} distinct types over {n} agents")
        pool: list[tuple[int, ...]] = []
        while len(pool) < types:
            cand = tuple(rng.sample(range(n), n))
            if cand not in pool:
                pool.append(cand)
        labels = list(range(types)) + [rng.randrange(types) for _ in range(n - types)]
        rng.shuffle(labels)
        rows = [pool[t] for t in labels]
    return PreferenceProfile.from_lists(rows)


def random_permutation(n: int, rng: random.Random) -> DeterministicAssignment:
    return DeterministicAssignment(tuple(rng.sample(range(n), n)))


def convex_combination(perms: Sequence[DeterministicAssignment], weights: Sequence[int]) -> RandomAssignment:
    n = perms[0].n
    total = sum(weights)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for d, w in zip(perms, weights):
        for i, o in enumerate(d.objects):
            rows[i][o] += Fraction(w, total)
    return RandomAssignment(tuple(tuple(r) for r in rows))


def random_bistochastic(n: int, rng: random.Random, terms: tuple[int, int] = (2, 5),
                        max_weight: int = 9) -> RandomAssignment:
    count = rng.randint(*terms)
    perms = [random_permutation(n, rng) for _ in range(count)]
    return convex_combination(perms, [rng.randint(1, max_weight) for _ in perms])


def random_po_mixture(profile: PreferenceProfile, rng: random.Random, terms: tuple[int, int] = (1, 4),
                      max_weight: int = 9) -> RandomAssignment:
    """Random mixture of serial dictatorship outcomes (hence ex post efficient)."""
    n = profile.n
    count = rng.randint(*terms)
    perms = [serial_dictatorship(profile, rng.sample(range(n), n)) for _ in range(count)]
    return convex_combination(perms, [rng.randint(1, max_weight) for _ in perms])


def random_instance(n: int, seed: int) -> tuple[PreferenceProfile, RandomAssignment]:
    rng = random.Random(seed)
    profile = random_profile(n, rng)
    return profile, random_bistochastic(n, rng)
