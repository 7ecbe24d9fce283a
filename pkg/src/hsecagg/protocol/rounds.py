"""In-process helpers that drive parties directly, without the simulator's bus."""

from __future__ import annotations

from typing import Mapping

from .client import Client
from .errors import ClientAbort
from .server import Server


def consistency_round(server: Server, clients: Mapping[int, Client]) -> tuple[int, ...]:
    """Malicious-mode step 3 for the given live clients; returns U3.

    Clients that fail a check are left with ``client.aborted`` set. Raises
    :class:`ProtocolAbort` if fewer than t clients co-sign.
    """
    acks = []
    for ann in server.announce():
        c = clients.get(ann.recipient)
        if c is None or c.aborted:
            continue
        try:
            acks.append(c.on_roster(ann))
        except ClientAbort:
            pass
    for bundle in server.collect_acks(acks):
        c = clients.get(bundle.recipient)
        if c is None or c.aborted:
            continue
        try:
            c.on_acks(bundle)
        except ClientAbort:
            pass
    return server.U3
