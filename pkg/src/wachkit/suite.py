"""Seeded generation of module suites for tests and the roundtrip command."""

from __future__ import annotations

import random

from .flmod import FLModule, make_fl
from .padic import PMatrix


def random_unit_matrix(rng: random.Random, d: int, p: int, N: int) -> PMatrix:
    """Uniform entries, rejection-sampled until invertible mod p."""
    pn = p**N
    while True:
        M = PMatrix(d, d, tuple(rng.randrange(pn) for _ in range(d * d)), p, N)
        if M.is_unit_matrix():
            return M


def random_fl(rng: random.Random, p: int, N: int, max_rank: int = 3) -> FLModule:
    d = rng.randint(1, max_rank)
    weights = sorted(rng.randint(0, p - 2) for _ in range(d))
    return make_fl(p, N, weights, random_unit_matrix(rng, d, p, N))


def generate_suite(
    seed: int,
    primes: tuple[int, ...] = (3, 5, 7),
    count: int = 30,
    max_rank: int = 3,
    N: int = 16,
) -> list[FLModule]:
    """Deterministic list of random modules, cycling through the primes."""
    rng = random.Random(seed)
    return [random_fl(rng, primes[i % len(primes)], N, max_rank) for i in range(count)]
