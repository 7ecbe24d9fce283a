from .client import Client
from .config import (
    SERVER,
    ConfigError,
    KeyDirectory,
    KeyRing,
    Mode,
    ProtocolConfig,
    ThresholdTooLow,
    setup,
    validate_threshold,
)
from .errors import ClientAbort, MissingShare, ProtocolAbort
from .ideal import IdealAbort, Rosters, ideal_aggregate
from .messages import AckBundle, EncShare, Kind, Masked, RosterAck, RosterAnnounce, RoundMessage, UnmaskShare
from .rounds import consistency_round
from .server import Server

__all__ = [
    "SERVER",
    "AckBundle",
    "Client",
    "ClientAbort",
    "ConfigError",
    "EncShare",
    "IdealAbort",
    "KeyDirectory",
    "KeyRing",
    "Kind",
    "Masked",
    "MissingShare",
    "Mode",
    "ProtocolAbort",
    "ProtocolConfig",
    "RosterAck",
    "RosterAnnounce",
    "Rosters",
    "RoundMessage",
    "Server",
    "ThresholdTooLow",
    "UnmaskShare",
    "consistency_round",
    "ideal_aggregate",
    "setup",
    "validate_threshold",
]
