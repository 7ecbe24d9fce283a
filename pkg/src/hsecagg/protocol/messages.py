"""Round messages and their canonical byte encodings.

Each message kind has a signed payload (the fields the sender vouches for)
and a wire encoding (the payload fields plus the signature). Both use
:func:`hsecagg.authcrypto.canonical_payload`. Rosters are always sorted
ascending before encoding, so identical rosters give identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Iterable, Optional, Union

from ..authcrypto import canonical_payload
from ..modmath import decode_int, encode_int
from .config import SERVER


class Kind(IntEnum):
    ENC_SHARE = 1
    MASKED = 2
    ROSTER_ANNOUNCE = 3
    ROSTER_ACK = 4
    ACK_BUNDLE = 5
    UNMASK_SHARE = 6


STEP_OF = {
    Kind.ENC_SHARE: 1,
    Kind.MASKED: 2,
    Kind.ROSTER_ANNOUNCE: 3,
    Kind.ROSTER_ACK: 3,
    Kind.ACK_BUNDLE: 3,
    Kind.UNMASK_SHARE: 4,
}


def _u32(v: int) -> bytes:
    return struct.pack(">I", v)


def encode_roster(roster: Iterable[int]) -> bytes:
    return b"".join(_u32(i) for i in sorted(roster))


def decode_roster(data: bytes) -> tuple[int, ...]:
    if len(data) % 4:
        raise ValueError("roster encoding is not a multiple of 4 bytes")
    return tuple(struct.unpack(f">{len(data) // 4}I", data))


def encode_vector(values: Iterable[int]) -> bytes:
    return b"".join(encode_int(v) for v in values)


def decode_vector(data: bytes) -> tuple[int, ...]:
    out, off = [], 0
    while off < len(data):
        v, off = decode_int(data, off)
        out.append(v)
    return tuple(out)


def _sig(sig: Optional[bytes]) -> bytes:
    return sig if sig is not None else b""


@dataclass(frozen=True)
class EncShare:
    """Step 1: client ``sender``'s seed share, encrypted to ``recipient``."""

    sender: int
    recipient: int
    ciphertext: bytes
    sig: Optional[bytes] = None
    kind = Kind.ENC_SHARE

    def signed_payload(self, session_id: bytes) -> bytes:
        return canonical_payload(self.kind, session_id, 1, _u32(self.sender), _u32(self.recipient), self.ciphertext)

    def to_bytes(self, session_id: bytes) -> bytes:
        return canonical_payload(
            self.kind, session_id, 1, _u32(self.sender), _u32(self.recipient), self.ciphertext, _sig(self.sig)
        )


@dataclass(frozen=True)
class Masked:
    """Step 2: masked vector y = g^x * r."""

    sender: int
    y: tuple[int, ...]
    sig: Optional[bytes] = None
    kind = Kind.MASKED
    recipient = SERVER

    def signed_payload(self, session_id: bytes) -> bytes:
        return canonical_payload(self.kind, session_id, 2, _u32(self.sender), encode_vector(self.y))

    def to_bytes(self, session_id: bytes) -> bytes:
        return canonical_payload(
            self.kind, session_id, 2, _u32(self.sender), encode_vector(self.y), _sig(self.sig)
        )


def roster_payload(session_id: bytes, roster: Iterable[int]) -> bytes:
    """What both the server (announce) and clients (ack) sign: the roster alone."""
    return canonical_payload(Kind.ROSTER_ANNOUNCE, session_id, 3, encode_roster(roster))


@dataclass(frozen=True)
class RosterAnnounce:
    """Server -> client: the list U2. Signed only in malicious mode."""

    recipient: int
    roster: tuple[int, ...]
    sig: Optional[bytes] = None
    kind = Kind.ROSTER_ANNOUNCE
    sender = SERVER

    def signed_payload(self, session_id: bytes) -> bytes:
        return roster_payload(session_id, self.roster)

    def to_bytes(self, session_id: bytes) -> bytes:
        return canonical_payload(
            self.kind, session_id, 3, _u32(self.recipient), encode_roster(self.roster), _sig(self.sig)
        )


@dataclass(frozen=True)
class RosterAck:
    """Client -> server: signature over the roster it was shown."""

    sender: int
    roster: tuple[int, ...]
    sig: Optional[bytes] = None
    kind = Kind.ROSTER_ACK
    recipient = SERVER

    def signed_payload(self, session_id: bytes) -> bytes:
        return roster_payload(session_id, self.roster)

    def to_bytes(self, session_id: bytes) -> bytes:
        return canonical_payload(
            self.kind, session_id, 3, _u32(self.sender), encode_roster(self.roster), _sig(self.sig)
        )


@dataclass(frozen=True)
class AckBundle:
    """Server -> client: the collected roster signatures, keyed by signer."""

    recipient: int
    roster: tuple[int, ...]
    acks: tuple[tuple[int, bytes], ...]
    kind = Kind.ACK_BUNDLE
    sender = SERVER

    @property
    def signers(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.acks)

    def to_bytes(self, session_id: bytes) -> bytes:
        acks = b"".join(_u32(i) + _u32(len(s)) + s for i, s in self.acks)
        return canonical_payload(self.kind, session_id, 3, _u32(self.recipient), encode_roster(self.roster), acks)


@dataclass(frozen=True)
class UnmaskShare:
    """Step 4: the client's share of the aggregate seed, encrypted to the server."""

    sender: int
    ciphertext: bytes
    sig: Optional[bytes] = None
    kind = Kind.UNMASK_SHARE
    recipient = SERVER

    def signed_payload(self, session_id: bytes) -> bytes:
        return canonical_payload(self.kind, session_id, 4, _u32(self.sender), self.ciphertext)

    def to_bytes(self, session_id: bytes) -> bytes:
        return canonical_payload(self.kind, session_id, 4, _u32(self.sender), self.ciphertext, _sig(self.sig))


RoundMessage = Union[EncShare, Masked, RosterAnnounce, RosterAck, AckBundle, UnmaskShare]


def _fields(data: bytes) -> tuple[Kind, bytes, int, list[bytes]]:
    if len(data) < 1:
        raise ValueError("empty message")
    kind = Kind(data[0])
    off = 1
    chunks = []
    (n,) = struct.unpack_from(">I", data, off)
    session = data[off + 4 : off + 4 + n]
    off += 4 + n
    (round_no,) = struct.unpack_from(">I", data, off)
    off += 4
    while off < len(data):
        (n,) = struct.unpack_from(">I", data, off)
        off += 4
        if off + n > len(data):
            raise ValueError("truncated field")
        chunks.append(data[off : off + n])
        off += n
    return kind, session, round_no, chunks


def _u(b: bytes) -> int:
    (v,) = struct.unpack(">I", b)
    return v


def _opt(b: bytes) -> Optional[bytes]:
    return b or None


def from_bytes(data: bytes) -> tuple[bytes, RoundMessage]:
    """Parse a wire encoding back into ``(session_id, message)``."""
    kind, session, _, f = _fields(data)
    if kind is Kind.ENC_SHARE:
        msg: RoundMessage = EncShare(_u(f[0]), _u(f[1]), f[2], _opt(f[3]))
    elif kind is Kind.MASKED:
        msg = Masked(_u(f[0]), decode_vector(f[1]), _opt(f[2]))
    elif kind is Kind.ROSTER_ANNOUNCE:
        msg = RosterAnnounce(_u(f[0]), decode_roster(f[1]), _opt(f[2]))
    elif kind is Kind.ROSTER_ACK:
        msg = RosterAck(_u(f[0]), decode_roster(f[1]), _opt(f[2]))
    elif kind is Kind.ACK_BUNDLE:
        acks, off, raw = [], 0, f[2]
        while off < len(raw):
            i, n = struct.unpack_from(">II", raw, off)
            acks.append((i, raw[off + 8 : off + 8 + n]))
            off += 8 + n
        msg = AckBundle(_u(f[0]), decode_roster(f[1]), tuple(acks))
    else:
        msg = UnmaskShare(_u(f[0]), f[1], _opt(f[2]))
    return session, msg


def with_sig(msg: RoundMessage, sig: Optional[bytes]) -> RoundMessage:
    return replace(msg, sig=sig)
