"""(t, n) Shamir secret sharing over a prime field.

Evaluation points are always 1..n, so shares produced by different dealers at
the same index can be added locally (the scheme is additively homomorphic).
"""

from __future__ import annotations

import secrets
import struct
from dataclasses import dataclass
from random import Random
from typing import Iterable, Optional, Sequence

import gmpy2

from .counters import OpCounter
from .modmath import FieldElement, FieldParams, decode_int, encode_int


class ShamirError(ValueError):
    pass


class DuplicateIndex(ShamirError):
    pass


class InsufficientShares(ShamirError):
    pass


class IndexMismatch(ShamirError):
    pass


@dataclass(frozen=True)
class ShamirConfig:
    t: int
    n: int
    field: FieldParams

    def __post_init__(self) -> None:
        if not 0 < self.t <= self.n < self.field.P:
            raise ValueError(f"need 0 < t <= n < P, got t={self.t}, n={self.n}, P={self.field.P}")


@dataclass(frozen=True)
class Share:
    index: int
    value: FieldElement

    def to_bytes(self) -> bytes:
        return struct.pack(">I", self.index) + encode_int(self.value)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Share":
        if len(data) < 4:
            raise ValueError("truncated share")
        (index,) = struct.unpack_from(">I", data, 0)
        value, end = decode_int(data, 4)
        if end != len(data):
            raise ValueError("trailing bytes after share")
        return cls(index, value)


def _eval_poly(coeffs: Sequence[int], x: int, P: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % P
    return acc


def share(
    cfg: ShamirConfig,
    secret: FieldElement,
    rng: Optional[Random] = None,
    *,
    coefficients: Optional[Sequence[int]] = None,
    ops: Optional[OpCounter] = None,
) -> list[Share]:
    """Split ``secret`` into shares at indices 1..n.

    ``coefficients`` fixes a_1..a_{t-1} instead of drawing them from ``rng``;
    it exists so hand-computed examples can be reproduced.
    """
    P = cfg.field.P
    if not 0 <= secret < P:
        raise ValueError("secret must lie in [0, P)")
    if coefficients is None:
        rng = rng or secrets.SystemRandom()
        coefficients = [rng.randrange(P) for _ in range(cfg.t - 1)]
    elif len(coefficients) != cfg.t - 1:
        raise ValueError(f"expected {cfg.t - 1} coefficients, got {len(coefficients)}")
    poly = [secret, *(c % P for c in coefficients)]
    if ops is not None:
        ops.field_mul += cfg.n * (cfg.t - 1)
    return [Share(x, _eval_poly(poly, x, P)) for x in range(1, cfg.n + 1)]


def _check_distinct(indices: Iterable[int]) -> None:
    seen: set[int] = set()
    for i in indices:
        if i in seen:
            raise DuplicateIndex(f"index {i} appears more than once")
        seen.add(i)


def precompute_lagrange(
    cfg: ShamirConfig, indices: Sequence[int], ops: Optional[OpCounter] = None
) -> list[FieldElement]:
    """Coefficients l_j with secret = sum(l_j * f(x_j)) mod P, i.e. the Lagrange
    basis polynomials evaluated at zero: l_j = prod_{m != j} x_m / (x_m - x_j)."""
    _check_distinct(indices)
    P = cfg.field.P
    for i in indices:
        if not 1 <= i <= cfg.n:
            raise ValueError(f"index {i} outside 1..{cfg.n}")
    coeffs = []
    for j in indices:
        num, den = 1, 1
        for m in indices:
            if m != j:
                num = num * m % P
                den = den * (m - j) % P
        coeffs.append(num * int(gmpy2.invert(den, P)) % P)
    if ops is not None:
        k = len(indices)
        ops.lagrange_mul += 2 * k * max(k - 1, 0) + k
    return coeffs


def reconstruct(
    cfg: ShamirConfig,
    shares: Sequence[Share],
    ops: Optional[OpCounter] = None,
    basis_cache: Optional[dict[tuple[int, ...], list[int]]] = None,
) -> FieldElement:
    """Recover the secret from at least t shares.

    Only the t shares with the smallest indices are used. ``basis_cache`` maps
    index tuples to precomputed Lagrange coefficients and is filled on a miss.
    """
    _check_distinct(s.index for s in shares)
    if len(shares) < cfg.t:
        raise InsufficientShares(f"need {cfg.t} shares, got {len(shares)}")
    chosen = sorted(shares, key=lambda s: s.index)[: cfg.t]
    key = tuple(s.index for s in chosen)
    if basis_cache is not None and key in basis_cache:
        coeffs = basis_cache[key]
    else:
        coeffs = precompute_lagrange(cfg, key, ops)
        if basis_cache is not None:
            basis_cache[key] = coeffs
    P = cfg.field.P
    secret = sum(c * s.value for c, s in zip(coeffs, chosen)) % P
    if ops is not None:
        ops.field_mul += cfg.t
        ops.reconstructions += 1
    return secret


def add_shares(a: Share, b: Share, field: FieldParams) -> Share:
    if a.index != b.index:
        raise IndexMismatch(f"cannot add shares at indices {a.index} and {b.index}")
    return Share(a.index, (a.value + b.value) % field.P)
