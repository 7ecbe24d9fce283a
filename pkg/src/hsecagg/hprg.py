"""Seed-homomorphic PRG built from the key-homomorphic PRF F(s, j) = H(j)^s.

expand(s_a) * expand(s_b) == expand(s_a + s_b mod q), componentwise.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Optional

from .counters import OpCounter
from .modmath import GroupElement, GroupParams, group_exp, hash_to_group

HashFn = Callable[[int], GroupElement]


@lru_cache(maxsize=64)
def hash_points(params: GroupParams, m: int, tag: bytes = b"") -> tuple[GroupElement, ...]:
    """H(1), ..., H(m) under session ``tag``."""
    return tuple(hash_to_group(params, j, tag) for j in range(1, m + 1))


def generator_hash(params: GroupParams) -> HashFn:
    """Test-mode H(j) = g^j. Insecure (the discrete log of every point is known)."""
    return lambda j: pow(params.g, j, params.p)


def expand(
    params: GroupParams,
    seed: int,
    m: int,
    tag: bytes = b"",
    *,
    hash_fn: Optional[HashFn] = None,
    ops: Optional[OpCounter] = None,
) -> list[GroupElement]:
    """Mask vector [F(seed, 1), ..., F(seed, m)]."""
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 <= seed < params.q:
        raise ValueError("seed must lie in [0, q)")
    if hash_fn is None:
        points = hash_points(params, m, bytes(tag))
    else:
        points = tuple(hash_fn(j) for j in range(1, m + 1))
    return [group_exp(params, h, seed, ops) for h in points]
