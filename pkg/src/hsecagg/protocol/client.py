"""Client side of the aggregation round."""

from __future__ import annotations

import struct
from random import Random
from typing import Iterable, Optional, Sequence

from .. import authcrypto
from ..authcrypto import AuthFailure, EncKeyPair, SigKeyPair
from ..counters import OpCounter
from ..hprg import HashFn, expand
from ..modmath import encode_int, generator_power, group_mul
from ..shamir import Share, share
from .config import SERVER, ProtocolConfig
from .errors import ClientAbort, MissingShare
from .messages import AckBundle, EncShare, Masked, RosterAck, RosterAnnounce, UnmaskShare, roster_payload


def share_aad(session_id: bytes, sender: int, recipient: int) -> bytes:
    return b"share|" + session_id + struct.pack(">II", sender, recipient)


def unmask_aad(session_id: bytes, sender: int) -> bytes:
    return b"unmask|" + session_id + struct.pack(">I", sender)


class Client:
    """One client's state across steps 1-4.

    Methods are called in protocol order by the simulator (or by hand in
    tests). Any failed check raises :class:`ClientAbort`; the client then
    takes no further part in the round.
    """

    def __init__(
        self,
        cid: int,
        config: ProtocolConfig,
        x: Sequence[int],
        enc_key: EncKeyPair,
        sig_key: Optional[SigKeyPair] = None,
        rng: Optional[Random] = None,
        hash_fn: Optional[HashFn] = None,
    ):
        if len(x) != config.m:
            raise ValueError(f"client {cid}: expected a vector of length {config.m}, got {len(x)}")
        if any(not 0 <= v <= config.alpha for v in x):
            raise ValueError(f"client {cid}: inputs must lie in [0, {config.alpha}]")
        if config.malicious and sig_key is None:
            raise ValueError("malicious mode needs a signing key")
        self.cid = cid
        self.config = config
        self.x = tuple(x)
        self.enc_key = enc_key
        self.sig_key = sig_key
        self.rng = rng or Random()
        self.hash_fn = hash_fn  # test hook for H; None means hash_to_group
        self.ops = OpCounter()
        self.seed: Optional[int] = None
        self.shares: dict[int, int] = {}
        self.announced: Optional[tuple[int, ...]] = None
        self.roster: Optional[tuple[int, ...]] = None
        self.aborted: Optional[ClientAbort] = None

    def _abort(self, reason: str, culprit: Optional[int] = None) -> ClientAbort:
        self.aborted = ClientAbort(self.cid, reason, culprit)
        return self.aborted

    def _sign(self, payload: bytes) -> Optional[bytes]:
        if not self.config.malicious:
            return None
        self.ops.sign += 1
        return authcrypto.sign(self.sig_key.ssk, payload)

    def _verify(self, party: int, payload: bytes, sig: Optional[bytes]) -> bool:
        self.ops.verify += 1
        return authcrypto.verify(self.config.keys.spk[party], payload, sig)

    def step1(self) -> list[EncShare]:
        """Pick a seed in Z_q, Shamir-share it over Z_P, and encrypt one share per client."""
        cfg = self.config
        self.seed = self.rng.randrange(cfg.group.q)
        out = []
        for sh in share(cfg.shamir, self.seed, self.rng, ops=self.ops):
            ct = authcrypto.encrypt(
                cfg.keys.cpk[sh.index], sh.to_bytes(), self.rng, share_aad(cfg.session_id, self.cid, sh.index)
            )
            self.ops.encrypt += 1
            msg = EncShare(self.cid, sh.index, ct)
            out.append(EncShare(self.cid, sh.index, ct, self._sign(msg.signed_payload(cfg.session_id))))
        return out

    def receive_shares(self, msgs: Iterable[EncShare]) -> None:
        cfg = self.config
        for msg in sorted(msgs, key=lambda m: m.sender):
            if msg.recipient != self.cid:
                continue
            if cfg.malicious and not self._verify(msg.sender, msg.signed_payload(cfg.session_id), msg.sig):
                raise self._abort("BadSignature", msg.sender)
            try:
                plain = authcrypto.decrypt(self.enc_key.csk, msg.ciphertext, share_aad(cfg.session_id, msg.sender, self.cid))
                sh = Share.from_bytes(plain)
            except (AuthFailure, ValueError):
                raise self._abort("AuthFailure", msg.sender) from None
            finally:
                self.ops.decrypt += 1
            if sh.index != self.cid or not 0 <= sh.value < cfg.field.P:
                raise self._abort("MalformedShare", msg.sender)
            self.shares[msg.sender] = sh.value

    def step2(self) -> Masked:
        """Masked upload y_j = g^{x_j} * H(j)^seed."""
        cfg = self.config
        if self.seed is None:
            raise RuntimeError("step1 must run before step2")
        r = expand(cfg.group, self.seed, cfg.m, cfg.session_id, hash_fn=self.hash_fn, ops=self.ops)
        y = tuple(group_mul(cfg.group, generator_power(cfg.group, xj, self.ops), rj, self.ops) for xj, rj in zip(self.x, r))
        msg = Masked(self.cid, y)
        return Masked(self.cid, y, self._sign(msg.signed_payload(cfg.session_id)))

    def on_roster(self, announce: RosterAnnounce) -> Optional[RosterAck]:
        """Accept the server's U2. In malicious mode, check its signature and co-sign it."""
        cfg = self.config
        roster = tuple(announce.roster)
        if list(roster) != sorted(set(roster)) or any(i not in cfg.clients for i in roster):
            raise self._abort("InconsistentRoster", SERVER)
        if not cfg.malicious:
            self.announced = self.roster = roster
            return None
        if not self._verify(SERVER, announce.signed_payload(cfg.session_id), announce.sig):
            raise self._abort("BadSignature", SERVER)
        self.announced = roster
        return RosterAck(self.cid, roster, self._sign(roster_payload(cfg.session_id, roster)))

    def on_acks(self, bundle: AckBundle) -> None:
        """Require at least t valid co-signatures on the exact roster this client signed."""
        cfg = self.config
        if self.announced is None or tuple(bundle.roster) != self.announced:
            raise self._abort("InconsistentRoster", SERVER)
        payload = roster_payload(cfg.session_id, self.announced)
        valid = {i for i, sig in bundle.acks if i in self.announced and self._verify(i, payload, sig)}
        if len(valid) < cfg.t:
            raise self._abort("TooFewAcks", SERVER)
        self.roster = self.announced

    def step4(self, roster: Optional[Sequence[int]] = None) -> UnmaskShare:
        """Sum the held seed shares over the roster and send the result to the server."""
        cfg = self.config
        roster = tuple(roster) if roster is not None else self.roster
        if roster is None:
            raise RuntimeError("no roster fixed before step4")
        total = 0
        for j in roster:
            if j not in self.shares:
                self.aborted = MissingShare(self.cid, j)
                raise self.aborted
            total += self.shares[j]
        total %= cfg.field.P
        ct = authcrypto.encrypt(cfg.keys.cpk[SERVER], encode_int(total), self.rng, unmask_aad(cfg.session_id, self.cid))
        self.ops.encrypt += 1
        msg = UnmaskShare(self.cid, ct)
        return UnmaskShare(self.cid, ct, self._sign(msg.signed_payload(cfg.session_id)))
