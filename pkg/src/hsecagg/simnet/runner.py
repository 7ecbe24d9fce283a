"""Drive a full aggregation round through the bus and record a transcript."""

from __future__ import annotations

import base64
import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from random import Random
from typing import Mapping, Optional, Sequence, TextIO

from ..counters import OpCounter
from ..protocol.client import Client
from ..protocol.config import SERVER, KeyRing, ProtocolConfig, validate_threshold
from ..protocol.errors import ClientAbort, ProtocolAbort
from ..protocol.ideal import Rosters
from ..protocol.server import Server
from .network import NO_LATENCY, CostModel, Delivery, DropoutSchedule, LatencyModel, MessageBus

STEPS = (1, 2, 3, 4)


def party_rng(seed: int | bytes, party: int) -> Random:
    return Random(hashlib.sha256(b"hsecagg/party|" + str(seed).encode() + b"|" + str(party).encode()).digest())


def synthetic_inputs(n: int, m: int, alpha: int, seed: int | bytes) -> dict[int, list[int]]:
    """Per-client vectors drawn uniformly from [0, alpha]."""
    rng = Random(hashlib.sha256(b"hsecagg/inputs|" + str(seed).encode()).digest())
    return {i: [rng.randint(0, alpha) for _ in range(m)] for i in range(1, n + 1)}


class Adversary:
    """Hook for negative tests. ``tamper`` may rewrite any batch of messages in flight.

    ``step`` is the protocol step and ``batch`` names the batch within it:
    "shares", "relay", "masked", "announce", "acks", "bundles", "unmask".
    """

    def tamper(self, step: int, batch: str, msgs: list) -> list:
        return msgs


@dataclass
class Transcript:
    config: ProtocolConfig
    schedule: DropoutSchedule
    rosters: Rosters
    messages: list[Delivery]
    counters: dict[int, OpCounter]
    step_counters: dict[int, dict[int, OpCounter]]
    step_time_ms: dict[int, float]
    output: Optional[list[int]] = None
    abort: Optional[dict] = None
    client_aborts: list[dict] = field(default_factory=list)
    undelivered_bytes: int = 0

    @property
    def sim_time_ms(self) -> float:
        return sum(self.step_time_ms.values())

    @property
    def server_ops(self) -> OpCounter:
        return self.counters[SERVER]

    def dropped(self) -> set[int]:
        """Clients that left the round, by schedule or by aborting."""
        return set(self.schedule.drops) | {a["client"] for a in self.client_aborts}

    def as_dict(self) -> dict:
        return {
            "config": self.config.summary(),
            "schedule": self.schedule.as_list(),
            "rosters": self.rosters.as_dict(),
            "output": self.output,
            "abort": self.abort,
            "client_aborts": self.client_aborts,
            "counters": {str(p): c.as_dict() for p, c in sorted(self.counters.items())},
            "step_counters": {
                str(s): {str(p): c.as_dict() for p, c in sorted(per.items())} for s, per in sorted(self.step_counters.items())
            },
            "step_time_ms": {str(s): round(v, 6) for s, v in sorted(self.step_time_ms.items())},
            "undelivered_bytes": self.undelivered_bytes,
            "messages": [
                {
                    "step": d.step,
                    "from": d.sender,
                    "to": d.recipient,
                    "kind": d.kind,
                    "delivered": d.delivered,
                    "data": base64.b64encode(d.data).decode(),
                }
                for d in self.messages
            ],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=indent)


def run_round(
    config: ProtocolConfig,
    keys: KeyRing,
    inputs: Mapping[int, Sequence[int]],
    schedule: Optional[DropoutSchedule] = None,
    latency: LatencyModel = NO_LATENCY,
    rng_seed: int | bytes = 0,
    adversary: Optional[Adversary] = None,
    cost: Optional[CostModel] = None,
    enforce_threshold: bool = True,
) -> Transcript:
    """Run one round with synchronous step barriers and return its transcript.

    Protocol aborts end up in ``Transcript.abort``; client-side aborts are
    recorded and the client is treated as dropped from then on.
    """
    schedule = schedule or DropoutSchedule()
    schedule.validate(config)
    if enforce_threshold:
        validate_threshold(config.n, config.t, config.mode)
    missing = [i for i in config.clients if i not in inputs]
    if missing:
        raise ValueError(f"no inputs for clients {missing}")
    cost = cost or CostModel()
    adversary = adversary or Adversary()

    clients = {
        i: Client(i, config, inputs[i], keys.enc[i], keys.sig.get(i), party_rng(rng_seed, i)) for i in config.clients
    }
    server = Server(config, keys.enc[SERVER], keys.sig.get(SERVER), party_rng(rng_seed, SERVER))
    counters = {SERVER: server.ops, **{i: c.ops for i, c in clients.items()}}
    bus = MessageBus(config.session_id, counters)
    client_aborts: list[dict] = []
    step_counters: dict[int, dict[int, OpCounter]] = {}
    step_time: dict[int, float] = {}
    snapshot = {p: c.copy() for p, c in counters.items()}

    def live(i: int, step: int) -> bool:
        return schedule.acts(i, step) and clients[i].aborted is None

    def call(i: int, fn, *args):
        try:
            return fn(*args)
        except ClientAbort as exc:
            client_aborts.append({"client": i, "reason": exc.reason, "culprit": exc.culprit})
            return None

    def close_step(step: int) -> None:
        nonlocal snapshot
        delta = {p: counters[p].minus(snapshot[p]) for p in counters}
        step_counters[step] = delta
        moved = any(d.bytes_sent or d.bytes_received for d in delta.values())
        step_time[step] = max(
            cost.compute_ms(d) + latency.transfer_ms(d.bytes_sent + d.bytes_received) for d in delta.values()
        ) + (latency.latency_ms if moved else 0.0)
        snapshot = {p: c.copy() for p, c in counters.items()}

    def upload(step: int, batch: str, msgs: list) -> list:
        msgs = adversary.tamper(step, batch, msgs)
        for msg in msgs:
            bus.send(step, msg.sender, SERVER, msg, True)
        return msgs

    def download(step: int, batch: str, msgs: list, acting_step: int) -> dict[int, list]:
        inbox: dict[int, list] = {}
        for msg in adversary.tamper(step, batch, msgs):
            ok = msg.recipient in clients and live(msg.recipient, acting_step)
            if bus.send(step, SERVER, msg.recipient, msg, ok):
                inbox.setdefault(msg.recipient, []).append(msg)
        return inbox

    abort = None
    try:
        # Step 1: share seeds through the server.
        shares = [m for i in config.clients if live(i, 1) for m in clients[i].step1()]
        shares = upload(1, "shares", shares)
        inbox = download(1, "relay", server.relay_shares(shares), 2)
        for j in config.clients:
            if live(j, 2):
                call(j, clients[j].receive_shares, inbox.get(j, []))
        close_step(1)

        # Step 2: masked uploads.
        masked = [clients[i].step2() for i in config.clients if live(i, 2)]
        server.collect_masked(upload(2, "masked", masked))
        close_step(2)

        # Step 3: roster consistency (malicious only); semi-honest clients just fetch U2 in step 4.
        if config.malicious:
            inbox = download(3, "announce", server.announce(), 3)
            acks = []
            for j in sorted(inbox):
                for ann in inbox[j]:
                    ack = call(j, clients[j].on_roster, ann)
                    if ack is not None:
                        acks.append(ack)
            bundles = server.collect_acks(upload(3, "acks", acks))
            inbox = download(3, "bundles", bundles, 4)
            for j in sorted(inbox):
                for bundle in inbox[j]:
                    call(j, clients[j].on_acks, bundle)
            close_step(3)
        else:
            inbox = download(4, "announce", server.announce(), 4)
            for j in sorted(inbox):
                for ann in inbox[j]:
                    call(j, clients[j].on_roster, ann)

        # Step 4: unmasking shares.
        unmask = []
        for i in config.clients:
            c = clients[i]
            if live(i, 4) and c.roster is not None:
                msg = call(i, c.step4)
                if msg is not None:
                    unmask.append(msg)
        server.unmask(upload(4, "unmask", unmask))
        close_step(4)
    except ProtocolAbort as exc:
        abort = {"reason": exc.reason, "stage": exc.stage, "detail": exc.detail}
        for step in STEPS:
            if step not in step_time and (step != 3 or config.malicious):
                close_step(step)
                break

    return Transcript(
        config=config,
        schedule=schedule,
        rosters=server.rosters,
        messages=bus.ordered(),
        counters={p: c.copy() for p, c in counters.items()},
        step_counters=step_counters,
        step_time_ms=step_time,
        output=server.output,
        abort=abort,
        client_aborts=client_aborts,
        undelivered_bytes=bus.undelivered_bytes,
    )


SWEEP_HEADER = (
    "rate",
    "clients",
    "t",
    "m",
    "server_group_mul",
    "server_group_exp",
    "reconstructions",
    "client_bytes",
    "server_bytes",
    "sim_time_ms",
)


@dataclass(frozen=True)
class SweepRow:
    """Means over repetitions at one dropout rate."""

    rate: float
    clients: int
    t: int
    m: int
    server_group_mul: float
    server_group_exp: float
    reconstructions: float
    client_bytes: float
    server_bytes: float
    sim_time_ms: float
    server_unmask_ops: float = 0.0
    server_unmask_ms: float = 0.0
    aborts: int = 0

    def csv_fields(self) -> list:
        return [getattr(self, name) for name in SWEEP_HEADER]


def run_sweep(
    config: ProtocolConfig,
    keys: KeyRing,
    rates: Sequence[float],
    repetitions: int = 1,
    *,
    dropout_step: int = 2,
    latency: LatencyModel = NO_LATENCY,
    seed: int | bytes = 0,
    cost: Optional[CostModel] = None,
    transcripts: Optional[list] = None,
) -> list[SweepRow]:
    """One row per rate (ascending), averaging counters over ``repetitions`` runs.

    Each repetition draws fresh synthetic inputs; repetition r uses the same
    inputs and party seeds at every rate, so rows differ only in who drops.
    Aborted runs count in ``aborts`` and are left out of the means.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    cost = cost or CostModel()
    rows = []
    for rate in sorted(rates):
        schedule = DropoutSchedule.from_rate(config.n, rate, dropout_step)
        done = []
        for rep in range(repetitions):
            rep_seed = f"{seed}/{rep}"
            inputs = synthetic_inputs(config.n, config.m, config.alpha, rep_seed)
            tr = run_round(config, keys, inputs, schedule, latency, rep_seed, cost=cost)
            if transcripts is not None:
                transcripts.append((rate, tr))
            if tr.abort is None:
                done.append(tr)
        if not done:
            rows.append(SweepRow(rate, config.n, config.t, config.m, *([float("nan")] * 6), aborts=repetitions))
            continue

        def mean(f) -> float:
            return sum(f(tr) for tr in done) / len(done)

        def client_bytes(tr: Transcript) -> float:
            stayed = [i for i in config.clients if i not in tr.dropped()]
            return sum(tr.counters[i].bytes_sent for i in stayed) / len(stayed)

        def unmask_ops(tr: Transcript) -> OpCounter:
            return tr.step_counters[4][SERVER]

        rows.append(
            SweepRow(
                rate=rate,
                clients=config.n,
                t=config.t,
                m=config.m,
                server_group_mul=mean(lambda tr: tr.server_ops.group_mul),
                server_group_exp=mean(lambda tr: tr.server_ops.group_exp),
                reconstructions=mean(lambda tr: tr.server_ops.reconstructions),
                client_bytes=mean(client_bytes),
                server_bytes=mean(lambda tr: tr.server_ops.bytes_sent + tr.server_ops.bytes_received),
                sim_time_ms=mean(lambda tr: tr.sim_time_ms),
                server_unmask_ops=mean(lambda tr: unmask_ops(tr).group_ops),
                server_unmask_ms=mean(lambda tr: cost.compute_ms(unmask_ops(tr))),
                aborts=repetitions - len(done),
            )
        )
    return rows


def write_csv(rows: Sequence[SweepRow], out: Optional[TextIO] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow([f"{v:.6g}" if isinstance(v, float) else v for v in row.csv_fields()])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
