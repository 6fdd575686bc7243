"""Performance of an RIS-assisted dual-hop RF-underwater optical relay link.

Exact (Mellin-Barnes) and high-SNR outage probability, average bit-error rate and
average capacity under fixed-gain AF and DF relaying, with a Monte-Carlo oracle and
a sweep front end.
"""
from .e2e_stats import Protocol, RelayConfig
from .mc_oracle import McConfig, estimate_metric
from .metrics import Method, Metric, MetricResult
from .modulation import BPSK, ModulationParams
from .rf_link import RfLinkFit, RfLinkParams, fit_kg
from .uwoc_link import Detection, EggParams, table_lookup

__version__ = "0.1.0"

__all__ = [
    "BPSK",
    "Detection",
    "EggParams",
    "McConfig",
    "Method",
    "Metric",
    "MetricResult",
    "ModulationParams",
    "Protocol",
    "RelayConfig",
    "RfLinkFit",
    "RfLinkParams",
    "estimate_metric",
    "fit_kg",
    "table_lookup",
]
