from .adversary import SIGNATURE_KINDS, SignatureForgery, SplitResult, roster_split_attack
from .network import (
    LAN,
    LATENCY_PRESETS,
    NO_LATENCY,
    WAN,
    CostModel,
    Delivery,
    DropoutSchedule,
    DropPoint,
    LatencyModel,
    MessageBus,
)
from .runner import (
    SWEEP_HEADER,
    Adversary,
    SweepRow,
    Transcript,
    run_round,
    run_sweep,
    synthetic_inputs,
    write_csv,
)

__all__ = [
    "LAN",
    "LATENCY_PRESETS",
    "NO_LATENCY",
    "SIGNATURE_KINDS",
    "SWEEP_HEADER",
    "WAN",
    "Adversary",
    "CostModel",
    "Delivery",
    "DropPoint",
    "DropoutSchedule",
    "LatencyModel",
    "MessageBus",
    "SignatureForgery",
    "SplitResult",
    "SweepRow",
    "Transcript",
    "roster_split_attack",
    "run_round",
    "run_sweep",
    "synthetic_inputs",
    "write_csv",
]
