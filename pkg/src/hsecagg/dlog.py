"""Bounded discrete logarithms in G: recover z in [0, B] from g^z.

Two solvers share one contract. ``dlog_bruteforce`` walks g^0, g^1, ... and is
the reference; ``dlog_pollard_lambda`` is the kangaroo method and needs about
sqrt(B) group operations. ``dlog_vector`` shares one tame precomputation across the
components of a vector since they all share g and B.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from random import Random
from typing import Optional, Sequence, Union

from .counters import OpCounter
from .modmath import GroupElement, GroupParams

Seed = Union[int, bytes, str]

MAX_RESTARTS = 8


class NotInRange(ValueError):
    """No exponent in [0, B] maps to the target."""

    def __init__(self, message: str, component: Optional[int] = None):
        super().__init__(message)
        self.component = component


def _check_bound(params: GroupParams, bound: int) -> None:
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if bound >= params.q:
        raise ValueError("bound must be below the group order for the log to be unique")


def dlog_bruteforce(
    params: GroupParams, target: GroupElement, bound: int, ops: Optional[OpCounter] = None
) -> int:
    p, g = params.p, params.g
    x = 1
    for z in range(bound + 1):
        if x == target:
            if ops is not None:
                ops.dlog_ops += z
            return z
        x = x * g % p
    if ops is not None:
        ops.dlog_ops += bound + 1
    raise NotInRange(f"target is not g^z for any z in [0, {bound}]")


@dataclass
class _TameTable:
    jumps: tuple[int, ...]
    jump_powers: tuple[int, ...]
    dp_bits: int
    salt: int
    reach: int  # distance the first tame travels beyond g^B
    store_all: bool = False  # record every tame point, not only distinguished ones
    points: dict[int, int] = field(default_factory=dict)  # element -> its exponent
    cost: int = 0

    def jump_index(self, x: int) -> int:
        return ((x >> self.dp_bits) ^ self.salt) % len(self.jumps)

    def distinguished(self, x: int) -> bool:
        return self.store_all or x & ((1 << self.dp_bits) - 1) == 0


def _seed_bytes(rng_seed: Seed) -> bytes:
    if isinstance(rng_seed, bytes):
        return rng_seed
    return str(rng_seed).encode()


def _jump_set(rng: Random, k: int, mean: int) -> tuple[int, ...]:
    """k distinct jumps in [1, 2*mean - 1] summing to exactly k*mean.

    Pinning the mean keeps the expected walk length the same for every seed;
    a free random draw lets one unlucky table double the cost of a whole
    vector. Jump 1 is always present so the jumps share no common factor.
    """
    hi = 2 * mean - 1
    if hi < k:
        return tuple(range(1, k + 1))
    while True:
        rest = rng.sample(range(2, hi + 1), k - 2)
        last = k * mean - 1 - sum(rest)
        if 2 <= last <= hi and last not in rest:
            return tuple(sorted([1, last, *rest]))


def _build_tame(
    params: GroupParams, bound: int, rng_seed: Seed, attempt: int, herd: int = 1, store_all: bool = False
) -> _TameTable:
    """Walk the tame kangaroos and record their distinguished points.

    The first tame starts at g^B. With ``herd`` > 1, further tames start at
    evenly spaced known exponents below B and stop once they run into a
    recorded point; walks from the interval coalesce, so a wild kangaroo
    then meets a tame trail soon after it starts instead of only past B.
    """
    p, g = params.p, params.g
    digest = hashlib.sha256(
        b"hsecagg/kangaroo|%d|%d|" % (bound, attempt) + _seed_bytes(rng_seed)
    ).digest()
    rng = Random(digest)
    k = math.ceil(math.log2(bound) / 2) + 2 if bound > 1 else 2
    mean = max(1, math.isqrt(bound) // 2)
    jumps = _jump_set(rng, k, mean)
    # Low ceil(log2 sqrt B) - 2 bits zero marks a distinguished point.
    dp_bits = max(0, math.ceil(math.log2(math.sqrt(bound))) - 2) if bound > 1 else 0
    avg = sum(jumps) / k
    reach = bound + int(6 * avg * avg + 4 * avg * (1 << dp_bits) + 16 * avg)
    table = _TameTable(
        jumps=jumps,
        jump_powers=tuple(pow(g, j, p) for j in jumps),
        dp_bits=dp_bits,
        salt=rng.getrandbits(32),
        reach=reach,
        store_all=store_all,
    )
    cost = k
    starts = sorted({bound * i // herd for i in range(1, herd + 1)}, reverse=True)
    for start in starts:
        x = pow(g, start, p)
        pos = start
        cost += 1
        while True:
            if table.distinguished(x):
                if x in table.points:
                    break
                table.points[x] = pos
            if pos > bound + reach:
                break
            i = table.jump_index(x)
            x = x * table.jump_powers[i] % p
            pos += jumps[i]
            cost += 1
    table.cost = cost
    return table


def _wild(params: GroupParams, table: _TameTable, target: int, bound: int) -> tuple[Optional[int], int]:
    """Run the wild kangaroo. Returns (z or None on a miss, jumps taken)."""
    p = params.p
    x = target
    d = 0
    steps = 0
    limit = bound + table.reach
    points, powers, jumps = table.points, table.jump_powers, table.jumps
    while d <= limit:
        if table.distinguished(x):
            hit = points.get(x)
            if hit is not None:
                return hit - d, steps
        i = table.jump_index(x)
        x = x * powers[i] % p
        d += jumps[i]
        steps += 1
    return None, steps


class _Solver:
    def __init__(
        self,
        params: GroupParams,
        bound: int,
        rng_seed: Seed,
        ops: Optional[OpCounter],
        herd: int = 1,
        store_all: bool = False,
    ):
        _check_bound(params, bound)
        self.herd = herd
        self.store_all = store_all
        self.params = params
        self.bound = bound
        self.rng_seed = rng_seed
        self.ops = ops
        self._tables: dict[int, _TameTable] = {}

    def _table(self, attempt: int) -> _TameTable:
        table = self._tables.get(attempt)
        if table is None:
            table = _build_tame(self.params, self.bound, self.rng_seed, attempt, self.herd, self.store_all)
            self._tables[attempt] = table
            if self.ops is not None:
                self.ops.dlog_ops += table.cost
        return table

    def solve(self, target: GroupElement, component: Optional[int] = None) -> int:
        if target == 1:
            return 0
        for attempt in range(MAX_RESTARTS + 1):
            table = self._table(attempt)
            z, steps = _wild(self.params, table, target, self.bound)
            if self.ops is not None:
                self.ops.dlog_ops += steps
            if z is None:
                continue
            # A collision pins the log mod q exactly, so a miss here is final.
            z %= self.params.q
            if z > self.bound:
                raise NotInRange(f"discrete log {z} lies outside [0, {self.bound}]", component)
            return z
        raise NotInRange(
            f"no collision after {MAX_RESTARTS} restarts; target likely outside [0, {self.bound}]",
            component,
        )


def dlog_pollard_lambda(
    params: GroupParams,
    target: GroupElement,
    bound: int,
    rng_seed: Seed = 0,
    ops: Optional[OpCounter] = None,
) -> int:
    """Kangaroo search for z in [0, bound] with g^z == target.

    The tame kangaroo starts at g^bound and records distinguished points; the
    wild one starts at the target. Jump sets are derived from ``rng_seed`` and
    re-derived on each of up to 8 restarts.
    """
    return _Solver(params, bound, rng_seed, ops).solve(target)


HERD_PER_SQRT_M = 16


def dlog_vector(
    params: GroupParams,
    targets: Sequence[GroupElement],
    bound: int,
    rng_seed: Seed = 0,
    ops: Optional[OpCounter] = None,
) -> list[int]:
    """Solve every component against one shared tame precomputation.

    For a vector of m targets, 16*sqrt(m) tames are spread evenly over
    [0, B] and every point they visit is stored, not only distinguished
    ones. All walks under one jump function coalesce, so a wild kangaroo
    lands on a tame footprint within a few jumps. The precomputation costs
    about B / mean_jump plus a few jumps per tame, and both it and the
    per-vector total vary little from seed to seed.
    """
    if not targets:
        return []
    herd = HERD_PER_SQRT_M * math.isqrt(len(targets))
    solver = _Solver(params, bound, rng_seed, ops, herd, store_all=True)
    return [solver.solve(t, component=i) for i, t in enumerate(targets)]
