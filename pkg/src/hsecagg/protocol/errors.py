"""Abort conditions raised by protocol parties."""

from __future__ import annotations


class ProtocolAbort(Exception):
    """The round cannot finish. ``stage`` is the step (1-4) that failed."""

    def __init__(self, reason: str, stage: int, detail: str = ""):
        super().__init__(f"{reason} at stage {stage}" + (f": {detail}" if detail else ""))
        self.reason = reason
        self.stage = stage
        self.detail = detail


class ClientAbort(Exception):
    """A single client stops participating, e.g. after a failed verification."""

    def __init__(self, client: int, reason: str, culprit: int | None = None):
        msg = f"client {client} aborted: {reason}"
        if culprit is not None:
            msg += f" (from party {culprit})"
        super().__init__(msg)
        self.client = client
        self.reason = reason
        self.culprit = culprit


class MissingShare(ClientAbort):
    """The roster names a client whose seed share never arrived."""

    def __init__(self, client: int, sender: int):
        super().__init__(client, "MissingShare", sender)
        self.sender = sender
