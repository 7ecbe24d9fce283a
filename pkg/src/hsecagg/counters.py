"""Operation counters shared by the arithmetic, protocol and simulator layers."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class OpCounter:
    """Per-party tallies of the operations that dominate protocol cost.

    Every counter only ever grows during a run. Functions that do counted work
    accept an optional ``ops`` argument; passing ``None`` skips the bookkeeping.
    """

    group_exp: int = 0
    group_mul: int = 0
    group_inv: int = 0
    hash_to_group: int = 0
    field_mul: int = 0
    lagrange_mul: int = 0
    reconstructions: int = 0
    dlog_ops: int = 0
    sign: int = 0
    verify: int = 0
    encrypt: int = 0
    decrypt: int = 0
    bytes_sent: int = 0
    bytes_received: int = 0

    def add(self, other: "OpCounter") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def copy(self) -> "OpCounter":
        return OpCounter(**self.as_dict())

    def minus(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(**{f.name: getattr(self, f.name) - getattr(other, f.name) for f in fields(self)})

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def group_ops(self) -> int:
        return self.group_exp + self.group_mul + self.group_inv + self.dlog_ops
