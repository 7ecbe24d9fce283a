"""Dropout schedules, link and compute cost models, and the message bus."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from ..counters import OpCounter
from ..protocol.config import Mode, ProtocolConfig
from ..protocol.messages import RoundMessage


class DropPoint(str, Enum):
    BEFORE_SEND = "before-send"
    AFTER_SEND = "after-send"


@dataclass(frozen=True)
class DropoutSchedule:
    """When each dropping client goes silent: ``{client: (step, point)}``.

    A client dropped before sending at step k emits nothing from step k on.
    One dropped after sending at step k still delivers its step-k messages
    but takes no part in step k+1 onwards.
    """

    drops: Mapping[int, tuple[int, DropPoint]] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, int, str | DropPoint]]) -> "DropoutSchedule":
        drops: dict[int, tuple[int, DropPoint]] = {}
        for cid, step, point in entries:
            if cid in drops:
                raise ValueError(f"client {cid} appears twice in the dropout schedule")
            drops[cid] = (step, DropPoint(point))
        return cls(drops)

    @classmethod
    def from_rate(
        cls, n: int, rate: float, step: int, point: str | DropPoint = DropPoint.BEFORE_SEND
    ) -> "DropoutSchedule":
        """Drop the ceil(rate * n) highest-numbered clients at ``step``."""
        if not 0 <= rate < 1:
            raise ValueError("dropout rate must lie in [0, 1)")
        k = math.ceil(round(rate * n, 9))
        return cls({cid: (step, DropPoint(point)) for cid in range(n - k + 1, n + 1)})

    def validate(self, config: ProtocolConfig) -> None:
        for cid, (step, _) in self.drops.items():
            if cid not in config.clients:
                raise ValueError(f"unknown client {cid} in dropout schedule")
            if step not in (1, 2, 3, 4):
                raise ValueError(f"dropout step must be 1-4, got {step}")
            if step == 3 and config.mode is not Mode.MALICIOUS:
                raise ValueError("step 3 dropouts only exist in malicious mode")

    def acts(self, cid: int, step: int) -> bool:
        """Whether the client still sends at ``step``."""
        entry = self.drops.get(cid)
        if entry is None:
            return True
        s, point = entry
        return step < s or (step == s and point is DropPoint.AFTER_SEND)

    def as_list(self) -> list[list]:
        return [[cid, s, p.value] for cid, (s, p) in sorted(self.drops.items())]


@dataclass(frozen=True)
class LatencyModel:
    latency_ms: float = 0.0
    bandwidth_bps: float = math.inf

    def __post_init__(self) -> None:
        if self.latency_ms < 0 or self.bandwidth_bps <= 0:
            raise ValueError("latency must be non-negative and bandwidth positive")

    def transfer_ms(self, nbytes: int) -> float:
        return 8000.0 * nbytes / self.bandwidth_bps


LAN = LatencyModel(3.72, 4.80e9)
WAN = LatencyModel(211.31, 4.18e9)
NO_LATENCY = LatencyModel()
LATENCY_PRESETS = {"lan": LAN, "wan": WAN, "none": NO_LATENCY}


@dataclass(frozen=True)
class CostModel:
    """Microseconds per counted operation, used to turn counters into time.

    The defaults were measured once on a 512-bit group; :meth:`calibrate`
    re-measures on the current machine and group.
    """

    group_exp: float = 25.0
    group_mul: float = 0.35
    group_inv: float = 1.5
    hash_to_group: float = 2.0
    field_mul: float = 0.2
    lagrange_mul: float = 0.2
    dlog_ops: float = 0.45
    sign: float = 30.0
    verify: float = 80.0
    encrypt: float = 110.0
    decrypt: float = 75.0

    def compute_ms(self, ops: OpCounter) -> float:
        us = sum(getattr(self, name) * getattr(ops, name) for name in self.__dataclass_fields__)
        return us / 1000.0

    @classmethod
    def calibrate(cls, group, repeats: int = 200) -> "CostModel":
        from .. import authcrypto
        from ..modmath import hash_to_group

        p, q = group.p, group.q
        a, e = pow(group.g, q // 3, p), q - 12345

        def per_call(fn) -> float:
            start = time.perf_counter()
            for _ in range(repeats):
                fn()
            return (time.perf_counter() - start) * 1e6 / repeats

        import gmpy2

        sk = authcrypto.sig_keygen()
        ek = authcrypto.enc_keygen()
        ct = authcrypto.encrypt(ek.cpk, b"x" * 16)
        sig = authcrypto.sign(sk.ssk, b"payload")
        mul = per_call(lambda: a * a % p)
        return cls(
            group_exp=per_call(lambda: gmpy2.powmod(a, e, p)),
            group_mul=mul,
            group_inv=per_call(lambda: gmpy2.invert(a, p)),
            hash_to_group=per_call(lambda: hash_to_group(group, 7)),
            field_mul=mul,
            lagrange_mul=mul,
            dlog_ops=mul * 1.3,
            sign=per_call(lambda: authcrypto.sign(sk.ssk, b"payload")),
            verify=per_call(lambda: authcrypto.verify(sk.spk, b"payload", sig)),
            encrypt=per_call(lambda: authcrypto.encrypt(ek.cpk, b"x" * 16)),
            decrypt=per_call(lambda: authcrypto.decrypt(ek.csk, ct)),
        )


@dataclass(frozen=True)
class Delivery:
    step: int
    sender: int
    recipient: int
    kind: str
    data: bytes
    delivered: bool


class MessageBus:
    """Carries every message of a round and charges bytes to both ends.

    Messages addressed to a party that has already dropped are charged to the
    sender and recorded as undelivered. Deliveries commit in (step, sender,
    recipient) order.
    """

    def __init__(self, session_id: bytes, counters: Mapping[int, OpCounter]):
        self.session_id = session_id
        self.counters = counters
        self.log: list[Delivery] = []
        self.undelivered_bytes = 0

    def send(self, step: int, sender: int, recipient: int, msg: RoundMessage, delivered: bool) -> bool:
        data = msg.to_bytes(self.session_id)
        self.counters[sender].bytes_sent += len(data)
        if delivered:
            self.counters[recipient].bytes_received += len(data)
        else:
            self.undelivered_bytes += len(data)
        self.log.append(Delivery(step, sender, recipient, msg.kind.name, data, delivered))
        return delivered

    def ordered(self) -> list[Delivery]:
        return sorted(self.log, key=lambda d: (d.step, d.sender, d.recipient))
