"""Dropout-resilient secure aggregation built on a key-homomorphic PRG.

Clients mask their vectors with ``g^x * H(j)^s`` and Shamir-share the seed
``s``; the server multiplies the masked vectors, reconstructs the summed seed
once, strips the aggregate mask and takes a bounded discrete log.
"""

from .counters import OpCounter
from .modmath import FieldParams, GroupParams, gen_group_params, small_group
from .protocol import Mode, ProtocolConfig, setup, validate_threshold

__version__ = "0.1.0"

__all__ = [
    "FieldParams",
    "GroupParams",
    "Mode",
    "OpCounter",
    "ProtocolConfig",
    "__version__",
    "gen_group_params",
    "setup",
    "small_group",
    "validate_threshold",
]
