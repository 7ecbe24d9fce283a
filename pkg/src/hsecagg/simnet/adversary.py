"""Adversarial behaviour for negative tests: forged signatures and split rosters."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .. import authcrypto
from ..dlog import NotInRange, dlog_vector
from ..hprg import expand
from ..modmath import group_inv, group_mul
from ..protocol.client import Client
from ..protocol.config import SERVER, KeyRing, ProtocolConfig
from ..protocol.errors import ClientAbort
from ..protocol.messages import AckBundle, Kind, RosterAnnounce, roster_payload
from ..protocol.server import Server
from .runner import Adversary, party_rng

# Which message kind carries each of the five signatures.
SIGNATURE_KINDS = {
    1: Kind.ENC_SHARE,
    2: Kind.MASKED,
    3: Kind.ROSTER_ANNOUNCE,
    4: Kind.ROSTER_ACK,
    5: Kind.UNMASK_SHARE,
}


def _flip(sig: Optional[bytes]) -> bytes:
    sig = sig or bytes(64)
    return sig[:-1] + bytes([sig[-1] ^ 0x01])


class SignatureForgery(Adversary):
    """Corrupt signature number ``which`` (1-5) on the first matching message.

    ``sender`` / ``recipient`` narrow the match; ``None`` matches any party.
    After the run, ``target`` holds the (sender, recipient) that was hit.
    """

    def __init__(self, which: int, sender: Optional[int] = None, recipient: Optional[int] = None):
        if which not in SIGNATURE_KINDS:
            raise ValueError("signature index must be 1-5")
        self.which = which
        self.kind = SIGNATURE_KINDS[which]
        self.sender = sender
        self.recipient = recipient
        self.target: Optional[tuple[int, int]] = None

    def tamper(self, step: int, batch: str, msgs: list) -> list:
        if self.target is not None:
            return msgs
        out = list(msgs)
        for k, msg in enumerate(out):
            if msg.kind is not self.kind:
                continue
            if self.sender is not None and msg.sender != self.sender:
                continue
            if self.recipient is not None and msg.recipient != self.recipient:
                continue
            out[k] = replace(msg, sig=_flip(msg.sig))
            self.target = (msg.sender, msg.recipient)
            break
        return out


@dataclass
class SplitResult:
    """Outcome of a roster-splitting attempt."""

    views: list[tuple[tuple[int, ...], tuple[int, ...]]]
    accepted: dict[int, tuple[int, ...]] = field(default_factory=dict)
    aborted: dict[int, str] = field(default_factory=dict)
    view_seeds: dict[int, int] = field(default_factory=dict)
    recovered: Optional[list[int]] = None
    victim: Optional[int] = None

    @property
    def succeeded(self) -> bool:
        return self.recovered is not None


def roster_split_attack(
    config: ProtocolConfig,
    keys: KeyRing,
    inputs: Mapping[int, Sequence[int]],
    views: Sequence[tuple[Sequence[int], Sequence[int]]],
    corrupted: Sequence[int] = (),
    rng_seed: int | bytes = 0,
) -> SplitResult:
    """A malicious server shows different rosters to different honest clients.

    ``views`` is a list of (roster, honest recipients). Corrupted clients
    co-sign every roster and hand the server their step-4 sum for each one.
    The server reconstructs one aggregate seed per view that gathers t
    unmasking shares. If two such views differ by exactly one client, the
    ratio of their masks is that client's mask and its input falls out.
    """
    cfg = config
    corrupted = set(corrupted)
    views = [(tuple(sorted(r)), tuple(sorted(rec))) for r, rec in views]
    clients = {
        i: Client(i, cfg, inputs[i], keys.enc[i], keys.sig.get(i), party_rng(rng_seed, i)) for i in cfg.clients
    }
    server = Server(cfg, keys.enc[SERVER], keys.sig[SERVER], party_rng(rng_seed, SERVER))
    result = SplitResult(views=views)

    # Steps 1 and 2 run honestly.
    shares = [m for c in clients.values() for m in c.step1()]
    relayed = server.relay_shares(shares)
    for c in clients.values():
        c.receive_shares([m for m in relayed if m.recipient == c.cid])
    server.collect_masked([c.step2() for c in clients.values()])

    # Step 3 per view: the server signs each roster, honest recipients co-sign
    # only the one they were shown, corrupted clients sign them all.
    for v, (roster, recipients) in enumerate(views):
        payload = roster_payload(cfg.session_id, roster)
        server_sig = authcrypto.sign(keys.sig[SERVER].ssk, payload)
        acks = {i: authcrypto.sign(keys.sig[i].ssk, payload) for i in sorted(corrupted) if i in roster}
        for j in recipients:
            try:
                ack = clients[j].on_roster(RosterAnnounce(j, roster, server_sig))
                acks[j] = ack.sig
            except ClientAbort as exc:
                result.aborted[j] = exc.reason
        bundle = tuple(sorted(acks.items()))
        senders = []
        for j in recipients:
            if j in result.aborted:
                continue
            try:
                clients[j].on_acks(AckBundle(j, roster, bundle))
                result.accepted[j] = roster
                senders.append(j)
            except ClientAbort as exc:
                result.aborted[j] = exc.reason
        senders += [i for i in sorted(corrupted) if i in roster]
        # Step 4 per view.
        msgs = [clients[j].step4(roster) for j in sorted(set(senders))]
        got = server._open_shares(msgs, tuple(cfg.clients))
        if len(got) >= cfg.t:
            result.view_seeds[v] = server.aggregate_seed(got)

    # Look for two accepted views one client apart.
    G = cfg.group
    for a in result.view_seeds:
        for b in result.view_seeds:
            extra = set(views[b][0]) - set(views[a][0])
            if not set(views[a][0]) < set(views[b][0]) or len(extra) != 1:
                continue
            victim = extra.pop()
            seed = (result.view_seeds[b] - result.view_seeds[a]) % G.q
            r = expand(G, seed, cfg.m, cfg.session_id)
            targets = [group_mul(G, y, group_inv(G, rj)) for y, rj in zip(server.y[victim], r)]
            try:
                result.recovered = dlog_vector(G, targets, cfg.alpha, cfg.session_id)
            except NotInRange:
                continue
            result.victim = victim
            return result
    return result
