"""Signatures and authenticated public-key encryption for protocol messages.

Ed25519 signs canonical message payloads. Share transport uses an ephemeral
X25519 agreement against the recipient key, HKDF-SHA256 down to a 128-bit key,
and AES-128-GCM with a random 96-bit nonce.

Every function takes an ``rng`` with a ``randbytes`` method. The default is
the OS CSPRNG; the simulator passes seeded ``random.Random`` instances so
transcripts replay byte for byte. Seeded generators are not secure.
"""

from __future__ import annotations

import secrets
import struct
from dataclasses import dataclass
from random import Random
from typing import Optional

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

SIGNATURE_LEN = 64
NONCE_LEN = 12
TAG_LEN = 16
KEY_LEN = 16
_HKDF_INFO = b"hsecagg/share-encryption/v1"


class AuthFailure(Exception):
    """Ciphertext failed authentication or could not be parsed."""


@dataclass(frozen=True)
class SigKeyPair:
    ssk: bytes
    spk: bytes


@dataclass(frozen=True)
class EncKeyPair:
    csk: bytes
    cpk: bytes


def _rng(rng: Optional[Random]) -> Random:
    return rng if rng is not None else secrets.SystemRandom()


def _raw_public(key) -> bytes:
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def sig_keygen(rng: Optional[Random] = None) -> SigKeyPair:
    sk = Ed25519PrivateKey.from_private_bytes(_rng(rng).randbytes(32))
    return SigKeyPair(ssk=sk.private_bytes_raw(), spk=_raw_public(sk))


def sign(ssk: bytes, payload: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(ssk).sign(payload)


def verify(spk: bytes, payload: bytes, sig: Optional[bytes]) -> bool:
    """True iff ``sig`` is a valid signature on ``payload`` under ``spk``. Never raises."""
    if not isinstance(sig, (bytes, bytearray)) or len(sig) != SIGNATURE_LEN:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(spk).verify(bytes(sig), payload)
    except (InvalidSignature, ValueError, TypeError):
        return False
    return True


def enc_keygen(rng: Optional[Random] = None) -> EncKeyPair:
    sk = X25519PrivateKey.from_private_bytes(_rng(rng).randbytes(32))
    return EncKeyPair(csk=sk.private_bytes_raw(), cpk=_raw_public(sk))


def _derive_key(shared: bytes, eph_pub: bytes, cpk: bytes) -> bytes:
    hkdf = HKDF(algorithm=hashes.SHA256(), length=KEY_LEN, salt=None, info=_HKDF_INFO + eph_pub + cpk)
    return hkdf.derive(shared)


def _lp(chunk: bytes) -> bytes:
    return struct.pack(">I", len(chunk)) + chunk


def _split_lp(data: bytes, count: int) -> list[bytes]:
    out, off = [], 0
    for _ in range(count):
        if off + 4 > len(data):
            raise AuthFailure("truncated ciphertext")
        (n,) = struct.unpack_from(">I", data, off)
        off += 4
        if off + n > len(data):
            raise AuthFailure("truncated ciphertext")
        out.append(data[off : off + n])
        off += n
    if off != len(data):
        raise AuthFailure("trailing bytes after ciphertext")
    return out


def encrypt(cpk: bytes, plaintext: bytes, rng: Optional[Random] = None, aad: bytes = b"") -> bytes:
    """Wire format: eph_pub | nonce | body | tag, each with a 4-byte length prefix."""
    rng = _rng(rng)
    eph = X25519PrivateKey.from_private_bytes(rng.randbytes(32))
    eph_pub = _raw_public(eph)
    key = _derive_key(eph.exchange(X25519PublicKey.from_public_bytes(cpk)), eph_pub, cpk)
    nonce = rng.randbytes(NONCE_LEN)
    sealed = AESGCM(key).encrypt(nonce, plaintext, aad)
    return _lp(eph_pub) + _lp(nonce) + _lp(sealed[:-TAG_LEN]) + _lp(sealed[-TAG_LEN:])


def decrypt(csk: bytes, ciphertext: bytes, aad: bytes = b"") -> bytes:
    eph_pub, nonce, body, tag = _split_lp(ciphertext, 4)
    if len(nonce) != NONCE_LEN or len(tag) != TAG_LEN or len(eph_pub) != 32:
        raise AuthFailure("malformed ciphertext fields")
    sk = X25519PrivateKey.from_private_bytes(csk)
    cpk = _raw_public(sk)
    try:
        shared = sk.exchange(X25519PublicKey.from_public_bytes(eph_pub))
    except ValueError as exc:
        raise AuthFailure("invalid ephemeral key") from exc
    key = _derive_key(shared, eph_pub, cpk)
    try:
        return AESGCM(key).decrypt(nonce, body + tag, aad)
    except InvalidTag as exc:
        raise AuthFailure("authentication tag mismatch") from exc


def canonical_payload(kind: int, session_id: bytes, round_no: int, *fields: bytes) -> bytes:
    """Bytes that get signed: kind tag, session id, round number, then each
    body field in declaration order. Variable-length parts are length-prefixed."""
    out = bytearray([kind])
    out += _lp(session_id)
    out += struct.pack(">I", round_no)
    for f in fields:
        out += _lp(f)
    return bytes(out)
