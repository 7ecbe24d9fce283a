"""Server side of the aggregation round."""

from __future__ import annotations

from collections import defaultdict
from random import Random
from typing import Iterable, Optional

from .. import authcrypto
from ..authcrypto import AuthFailure, EncKeyPair, SigKeyPair
from ..counters import OpCounter
from ..dlog import NotInRange, dlog_vector
from ..hprg import HashFn, expand
from ..modmath import decode_int, group_inv, group_mul
from ..shamir import Share, reconstruct
from .client import unmask_aad
from .config import ProtocolConfig
from .errors import ProtocolAbort
from .ideal import Rosters
from .messages import AckBundle, EncShare, Masked, RosterAck, RosterAnnounce, UnmaskShare, roster_payload


class Server:
    """Relays step-1 shares, collects masked vectors, and unmasks the sum."""

    def __init__(
        self,
        config: ProtocolConfig,
        enc_key: EncKeyPair,
        sig_key: Optional[SigKeyPair] = None,
        rng: Optional[Random] = None,
        hash_fn: Optional[HashFn] = None,
    ):
        if config.malicious and sig_key is None:
            raise ValueError("malicious mode needs a server signing key")
        self.config = config
        self.enc_key = enc_key
        self.sig_key = sig_key
        self.rng = rng or Random()
        self.hash_fn = hash_fn  # test hook for H; None means hash_to_group
        self.ops = OpCounter()
        self.U1: Optional[tuple[int, ...]] = None
        self.U2: Optional[tuple[int, ...]] = None
        self.U3: Optional[tuple[int, ...]] = None
        self.U4: Optional[tuple[int, ...]] = None
        self.y: dict[int, tuple[int, ...]] = {}
        self.basis_cache: dict[tuple[int, ...], list[int]] = {}
        self.output: Optional[list[int]] = None

    @property
    def rosters(self) -> Rosters:
        return Rosters(tuple(self.config.clients), self.U1, self.U2, self.U3, self.U4)

    def _verify(self, party: int, payload: bytes, sig: Optional[bytes]) -> bool:
        self.ops.verify += 1
        return authcrypto.verify(self.config.keys.spk[party], payload, sig)

    def relay_shares(self, msgs: Iterable[EncShare]) -> list[EncShare]:
        """Forward encrypted shares. U1 holds senders that reached at least t recipients."""
        cfg = self.config
        by_sender: dict[int, dict[int, EncShare]] = defaultdict(dict)
        for msg in msgs:
            if msg.sender in cfg.clients and msg.recipient in cfg.clients:
                by_sender[msg.sender].setdefault(msg.recipient, msg)
        self.U1 = tuple(sorted(i for i, d in by_sender.items() if len(d) >= cfg.t))
        if len(self.U1) < cfg.t:
            raise ProtocolAbort("TooFewClients", 1, f"|U1| = {len(self.U1)} < t = {cfg.t}")
        return [by_sender[i][j] for i in self.U1 for j in sorted(by_sender[i])]

    def collect_masked(self, msgs: Iterable[Masked]) -> tuple[int, ...]:
        cfg = self.config
        p = cfg.group.p
        for msg in sorted(msgs, key=lambda m: m.sender):
            if msg.sender not in self.U1 or msg.sender in self.y:
                continue
            if len(msg.y) != cfg.m or any(not 0 < v < p for v in msg.y):
                continue
            if cfg.malicious and not self._verify(msg.sender, msg.signed_payload(cfg.session_id), msg.sig):
                continue
            self.y[msg.sender] = tuple(msg.y)
        self.U2 = tuple(sorted(self.y))
        if len(self.U2) < cfg.t:
            raise ProtocolAbort("TooFewClients", 2, f"|U2| = {len(self.U2)} < t = {cfg.t}")
        return self.U2

    def announce(self) -> list[RosterAnnounce]:
        """One roster message per member of U2; signed in malicious mode."""
        cfg = self.config
        sig = None
        if cfg.malicious:
            self.ops.sign += 1
            sig = authcrypto.sign(self.sig_key.ssk, roster_payload(cfg.session_id, self.U2))
        return [RosterAnnounce(i, self.U2, sig) for i in self.U2]

    def collect_acks(self, acks: Iterable[RosterAck]) -> list[AckBundle]:
        cfg = self.config
        payload = roster_payload(cfg.session_id, self.U2)
        valid: dict[int, bytes] = {}
        for ack in sorted(acks, key=lambda a: a.sender):
            if ack.sender not in self.U2 or ack.sender in valid or tuple(ack.roster) != self.U2:
                continue
            if self._verify(ack.sender, payload, ack.sig):
                valid[ack.sender] = ack.sig
        self.U3 = tuple(sorted(valid))
        if len(self.U3) < cfg.t:
            raise ProtocolAbort("TooFewAcks", 3, f"|U3| = {len(self.U3)} < t = {cfg.t}")
        bundle = tuple((i, valid[i]) for i in self.U3)
        return [AckBundle(i, self.U2, bundle) for i in self.U3]

    def _open_shares(self, msgs: Iterable[UnmaskShare], eligible: tuple[int, ...]) -> dict[int, int]:
        cfg = self.config
        got: dict[int, int] = {}
        for msg in sorted(msgs, key=lambda m: m.sender):
            if msg.sender not in eligible or msg.sender in got:
                continue
            if cfg.malicious and not self._verify(msg.sender, msg.signed_payload(cfg.session_id), msg.sig):
                continue
            self.ops.decrypt += 1
            try:
                plain = authcrypto.decrypt(self.enc_key.csk, msg.ciphertext, unmask_aad(cfg.session_id, msg.sender))
                value, end = decode_int(plain)
            except (AuthFailure, ValueError):
                continue
            if end != len(plain) or value >= cfg.field.P:
                continue
            got[msg.sender] = value
        return got

    def aggregate_seed(self, shares: dict[int, int]) -> int:
        """One reconstruction of the summed seed, reduced into Z_q."""
        cfg = self.config
        s_R = reconstruct(cfg.shamir, [Share(i, v) for i, v in shares.items()], self.ops, self.basis_cache)
        # P > n*q, so s_R is the exact integer sum of at most n seeds.
        return s_R % cfg.group.q

    def unmask_with(self, roster: tuple[int, ...], seed: int) -> list[int]:
        """prod_{i in roster} y_i / HPRG(seed), then a bounded dlog per component."""
        cfg = self.config
        G = cfg.group
        R = expand(G, seed, cfg.m, cfg.session_id, hash_fn=self.hash_fn, ops=self.ops)
        targets = []
        for j in range(cfg.m):
            acc = self.y[roster[0]][j]
            for i in roster[1:]:
                acc = group_mul(G, acc, self.y[i][j], self.ops)
            targets.append(group_mul(G, acc, group_inv(G, R[j], self.ops), self.ops))
        try:
            return dlog_vector(G, targets, len(roster) * cfg.alpha, cfg.session_id, self.ops)
        except NotInRange as exc:
            raise ProtocolAbort("DlogOutOfRange", 4, f"component {exc.component}") from None

    def unmask(self, msgs: Iterable[UnmaskShare]) -> list[int]:
        cfg = self.config
        eligible = self.U3 if cfg.malicious else self.U2
        got = self._open_shares(msgs, eligible)
        self.U4 = tuple(sorted(got))
        if len(self.U4) < cfg.t:
            raise ProtocolAbort("TooFewShares", 4, f"|U4| = {len(self.U4)} < t = {cfg.t}")
        self.output = self.unmask_with(self.U2, self.aggregate_seed(got))
        return self.output
