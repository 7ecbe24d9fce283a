"""Public protocol parameters, key material, and threshold policy."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Optional

from ..authcrypto import EncKeyPair, SigKeyPair, enc_keygen, sig_keygen
from ..modmath import FieldParams, GroupParams
from ..shamir import ShamirConfig

SERVER = 0


class Mode(str, Enum):
    SEMI_HONEST = "semi-honest"
    MALICIOUS = "malicious"


class ConfigError(ValueError):
    pass


class ThresholdTooLow(ConfigError):
    def __init__(self, minimum: int, message: str):
        super().__init__(message)
        self.minimum = minimum


def validate_threshold(
    n: int,
    t: int,
    mode: Mode | str,
    malicious_clients: Optional[int] = None,
    malicious_server: bool = True,
) -> None:
    """Raise :class:`ThresholdTooLow` if t is below the safe minimum.

    Semi-honest: any t >= 1. Malicious clients with an honest server: t >= 2.
    Malicious server with honest clients (``malicious_clients=0``): t >= n//2 + 1,
    otherwise two disjoint halves can be shown different rosters. Malicious
    server and clients (``malicious_clients`` > 0, or ``None`` for the worst
    case): t >= 2n//3 + 1 with at most n/3 corrupted clients.
    """
    if not 0 < t <= n:
        raise ConfigError(f"need 0 < t <= n, got t={t}, n={n}")
    mode = Mode(mode)
    if mode is Mode.SEMI_HONEST:
        return
    if not malicious_server:
        minimum = min(2, n)
    elif malicious_clients == 0:
        minimum = n // 2 + 1
    else:
        if malicious_clients is not None and 3 * malicious_clients > n:
            raise ConfigError(f"at most n/3 = {n / 3:g} malicious clients are tolerable, got {malicious_clients}")
        minimum = 2 * n // 3 + 1
    if t < minimum:
        raise ThresholdTooLow(minimum, f"threshold too low: t={t} but the minimum for n={n} is t={minimum}")


@dataclass(frozen=True)
class KeyDirectory:
    """Public keys of every party. Party 0 is the server, clients are 1..n."""

    cpk: dict[int, bytes]
    spk: dict[int, bytes] = field(default_factory=dict)


@dataclass(frozen=True)
class KeyRing:
    enc: dict[int, EncKeyPair]
    sig: dict[int, SigKeyPair]

    @classmethod
    def generate(cls, n: int, seed: int | bytes = 0, signatures: bool = True) -> "KeyRing":
        rng = Random(hashlib.sha256(b"hsecagg/keys|" + str(seed).encode()).digest())
        enc = {i: enc_keygen(rng) for i in range(n + 1)}
        sig = {i: sig_keygen(rng) for i in range(n + 1)} if signatures else {}
        return cls(enc=enc, sig=sig)

    def directory(self) -> KeyDirectory:
        return KeyDirectory(
            cpk={i: k.cpk for i, k in self.enc.items()},
            spk={i: k.spk for i, k in self.sig.items()},
        )


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    t: int
    m: int
    alpha: int
    mode: Mode
    group: GroupParams
    field: FieldParams
    session_id: bytes
    keys: KeyDirectory

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 < self.t <= self.n:
            raise ConfigError(f"need 0 < t <= n, got t={self.t}, n={self.n}")
        if self.m < 1:
            raise ConfigError("vector length must be positive")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.group.q <= self.n * self.alpha:
            raise ConfigError(f"q too small: need q > n*alpha = {self.n * self.alpha}")
        if self.field.P <= self.n * self.group.q:
            raise ConfigError("field too small: need P > n*q")
        missing = [i for i in range(self.n + 1) if i not in self.keys.cpk]
        if self.mode is Mode.MALICIOUS:
            missing += [i for i in range(self.n + 1) if i not in self.keys.spk]
        if missing:
            raise ConfigError(f"key directory lacks keys for parties {sorted(set(missing))}")

    @property
    def shamir(self) -> ShamirConfig:
        return ShamirConfig(self.t, self.n, self.field)

    @property
    def malicious(self) -> bool:
        return self.mode is Mode.MALICIOUS

    @property
    def clients(self) -> range:
        return range(1, self.n + 1)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "m": self.m,
            "alpha": self.alpha,
            "mode": self.mode.value,
            "group": {"p": hex(self.group.p), "q": hex(self.group.q), "g": hex(self.group.g)},
            "field_P": hex(self.field.P),
            "session_id": self.session_id.hex(),
        }


def setup(
    n: int,
    t: int,
    m: int,
    alpha: int,
    mode: Mode | str,
    group: GroupParams,
    seed: int | bytes = 0,
    session_id: Optional[bytes] = None,
) -> tuple[ProtocolConfig, KeyRing]:
    """Build a config with freshly derived keys for the server and n clients."""
    mode = Mode(mode)
    ring = KeyRing.generate(n, seed, signatures=mode is Mode.MALICIOUS)
    if session_id is None:
        session_id = hashlib.sha256(b"hsecagg/session|" + str(seed).encode()).digest()[:16]
    cfg = ProtocolConfig(
        n=n,
        t=t,
        m=m,
        alpha=alpha,
        mode=mode,
        group=group,
        field=FieldParams.for_group(group, n),
        session_id=session_id,
        keys=ring.directory(),
    )
    return cfg, ring
