"""tbnkit: exact analysis of thermodynamic binding networks.

Submodules:
  core           value types and the basic predicates/metrics
  basis          polymer basis enumeration (minimal self-saturated polymers)
  solver         exact stable-configuration solving and oracles
  constructions  signal-amplifier TBN families and small worked examples
  analysis       entropy gaps, TBN distance, amplifier verification, bounds
  io_cli         text/JSON formats and the command-line interface
"""

from .core import (
    BudgetExceededError,
    Configuration,
    ConservationError,
    MonomerType,
    NotFeedForwardError,
    NotStarLimitingError,
    Polymer,
    SiteType,
    Tbn,
    TbnError,
    config_distance,
    distance_to_stability,
    feed_forward_order,
    melt,
    normalize_polarity,
    splits_to,
)

__all__ = [
    "BudgetExceededError",
    "Configuration",
    "ConservationError",
    "MonomerType",
    "NotFeedForwardError",
    "NotStarLimitingError",
    "Polymer",
    "SiteType",
    "Tbn",
    "TbnError",
    "config_distance",
    "distance_to_stability",
    "feed_forward_order",
    "melt",
    "normalize_polarity",
    "splits_to",
]

__version__ = "0.1.0"
