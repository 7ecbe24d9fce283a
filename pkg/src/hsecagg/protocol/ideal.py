"""Rosters and the ideal aggregation functionality used as a test oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence


@dataclass(frozen=True)
class Rosters:
    """Nested client sets of one round.

    U1 shared seeds, U2 uploaded masked vectors, U3 co-signed the roster
    (malicious mode only, ``None`` otherwise), U4 sent unmasking shares.
    Any of them is ``None`` once the round aborted before that stage.
    """

    U: tuple[int, ...]
    U1: Optional[tuple[int, ...]] = None
    U2: Optional[tuple[int, ...]] = None
    U3: Optional[tuple[int, ...]] = None
    U4: Optional[tuple[int, ...]] = None

    def is_nested(self) -> bool:
        chain = [s for s in (self.U, self.U1, self.U2, self.U3, self.U4) if s is not None]
        return all(set(inner) <= set(outer) for outer, inner in zip(chain, chain[1:]))

    def as_dict(self) -> dict[str, Optional[list[int]]]:
        return {k: (list(v) if v is not None else None) for k, v in vars(self).items()}


class IdealAbort(Exception):
    def __init__(self, stage: int):
        super().__init__(f"ideal functionality aborts at stage {stage}")
        self.stage = stage


def ideal_aggregate(
    inputs: Mapping[int, Sequence[int]], rosters: Rosters, t: int, malicious: bool = False
) -> list[int]:
    """What a trusted party would output for the given rosters.

    Aborts at the first stage whose roster has fewer than t clients, and
    otherwise returns the componentwise sum of the inputs of U2, the roster
    every surviving client agreed to aggregate over.
    """
    stages = [(1, rosters.U1), (2, rosters.U2)]
    if malicious:
        stages.append((3, rosters.U3))
    stages.append((4, rosters.U4))
    for stage, roster in stages:
        if roster is None or len(roster) < t:
            raise IdealAbort(stage)
    final = rosters.U2
    m = len(next(iter(inputs.values())))
    return [sum(inputs[i][j] for i in final) for j in range(m)]
