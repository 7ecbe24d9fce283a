"""Modular arithmetic for the Shamir field Z_P and the prime-order group G.

G is the subgroup of quadratic residues of Z_p^* for a safe prime p = 2q + 1,
so it has prime order q. Group elements and field elements are plain Python
integers; the dataclasses below only carry the public parameters.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import gmpy2

from .counters import OpCounter

FieldElement = int
GroupElement = int

H2G_DOMAIN = b"hsecagg/hash-to-group/v1"

def _odd_primes(count: int) -> list[int]:
    out, x = [], gmpy2.mpz(2)
    while len(out) < count:
        x = gmpy2.next_prime(x)
        out.append(int(x))
    return out


# Sieve for safe-prime candidates ahead of Miller-Rabin.
_SIEVE_PRIMES = _odd_primes(2000)


@dataclass(frozen=True)
class FieldParams:
    """The prime field Z_P used for Shamir sharing."""

    P: int

    def __post_init__(self) -> None:
        if self.P < 2 or not is_prime(self.P):
            raise ValueError(f"field modulus {self.P} is not prime")

    def element(self, value: int) -> FieldElement:
        return value % self.P

    @classmethod
    def for_group(cls, group: "GroupParams", n: int) -> "FieldParams":
        """Smallest prime field with P > n*q, so a sum of n seeds never wraps mod P."""
        return cls(int(gmpy2.next_prime(n * group.q)))


@dataclass(frozen=True)
class GroupParams:
    """Order-q subgroup of Z_p^* with p = 2q + 1 and generator g."""

    p: int
    q: int
    g: int

    def __post_init__(self) -> None:
        if self.p != 2 * self.q + 1:
            raise ValueError("p must equal 2q + 1")
        if not (is_prime(self.p) and is_prime(self.q)):
            raise ValueError("p and q must both be prime")
        if self.g % self.p in (0, 1) or pow(self.g, self.q, self.p) != 1:
            raise ValueError("g does not generate the order-q subgroup")

    @property
    def identity(self) -> GroupElement:
        return 1

    @property
    def bits(self) -> int:
        return self.p.bit_length()

    def is_member(self, value: int) -> bool:
        return 0 < value < self.p and pow(value, self.q, self.p) == 1

    def to_bytes(self) -> bytes:
        return encode_int(self.p) + encode_int(self.q) + encode_int(self.g)

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupParams":
        p, off = decode_int(data, 0)
        q, off = decode_int(data, off)
        g, off = decode_int(data, off)
        if off != len(data):
            raise ValueError("trailing bytes after group parameters")
        return cls(p, q, g)


def is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n, 40))


def encode_int(value: int) -> bytes:
    """4-byte big-endian length followed by the minimal big-endian encoding."""
    if value < 0:
        raise ValueError("only non-negative integers are encodable")
    body = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return struct.pack(">I", len(body)) + body


def decode_int(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Inverse of :func:`encode_int`; returns ``(value, next_offset)``."""
    if offset + 4 > len(data):
        raise ValueError("truncated length prefix")
    (length,) = struct.unpack_from(">I", data, offset)
    start = offset + 4
    end = start + length
    if end > len(data):
        raise ValueError("truncated integer body")
    return int.from_bytes(data[start:end], "big"), end


def _sieve_ok(q: int) -> bool:
    # Rejects q when q or 2q+1 has a small factor.
    for r in _SIEVE_PRIMES:
        m = q % r
        if m == 0:
            return q == r
        if m == (r - 1) // 2:
            return False
    return True


@lru_cache(maxsize=32)
def gen_group_params(bit_length: int, rng_seed: bytes = b"\x01") -> GroupParams:
    """Deterministically search for a safe prime of ``bit_length`` bits.

    The candidate stream is driven by ``rng_seed``, so the same arguments always
    return the same group. The generator is 4, the square of the smallest h >= 2.
    """
    if bit_length < 16:
        raise ValueError("bit_length must be at least 16")
    rng = random.Random(hashlib.sha256(b"hsecagg/safe-prime" + bytes(rng_seed)).digest())
    qbits = bit_length - 1
    while True:
        q = rng.getrandbits(qbits) | (1 << (qbits - 1)) | 1
        # p = 2q + 1 must also land in range; top bit of q guarantees it.
        if not _sieve_ok(q):
            continue
        if not gmpy2.is_prime(q, 25):
            continue
        p = 2 * q + 1
        if not gmpy2.is_prime(p, 25):
            continue
        return GroupParams(p=p, q=q, g=4)


def _expand(message: bytes, nbytes: int) -> bytes:
    out = bytearray()
    block = 0
    while len(out) < nbytes:
        out += hashlib.sha256(message + struct.pack(">I", block)).digest()
        block += 1
    return bytes(out[:nbytes])


def hash_to_group(
    params: GroupParams, index: int, tag: bytes = b"", ops: Optional[OpCounter] = None
) -> GroupElement:
    """Random-oracle style map from a non-negative index to a non-identity element of G.

    SHA-256 in counter mode is expanded to |p| + 64 bits, reduced mod p, and
    squared into the quadratic-residue subgroup. ``tag`` separates sessions.
    """
    if index < 0:
        raise ValueError("index must be non-negative")
    return _hash_to_group(params.p, index, bytes(tag), ops)


def _hash_to_group(p: int, index: int, tag: bytes, ops: Optional[OpCounter]) -> int:
    nbytes = (p.bit_length() + 64 + 7) // 8
    counter = 0
    prefix = H2G_DOMAIN + struct.pack(">I", len(tag)) + tag + struct.pack(">Q", index)
    while True:
        h = int.from_bytes(_expand(prefix + struct.pack(">I", counter), nbytes), "big") % p
        e = h * h % p
        if ops is not None:
            ops.hash_to_group += 1
        # A zero residue has no square in the group; 1 is the identity.
        if e not in (0, 1):
            return e
        counter += 1


def group_exp(params: GroupParams, base: GroupElement, e: int, ops: Optional[OpCounter] = None) -> GroupElement:
    if ops is not None:
        ops.group_exp += 1
    return int(gmpy2.powmod(base, e % params.q, params.p))


def group_mul(params: GroupParams, a: GroupElement, b: GroupElement, ops: Optional[OpCounter] = None) -> GroupElement:
    if ops is not None:
        ops.group_mul += 1
    return a * b % params.p


def group_inv(params: GroupParams, a: GroupElement, ops: Optional[OpCounter] = None) -> GroupElement:
    if ops is not None:
        ops.group_inv += 1
    return int(gmpy2.invert(a, params.p))


def generator_power(params: GroupParams, e: int, ops: Optional[OpCounter] = None) -> GroupElement:
    """g^e, the encoding of a plaintext exponent."""
    return group_exp(params, params.g, e, ops)


def small_group(bits: int = 64) -> GroupParams:
    """Fixed-seed group for tests and demos (cached per process)."""
    return gen_group_params(bits, b"hsecagg-test")
