"""Secrecy outage probability of multi-user uplinks under eavesdropping.

Exact inclusion-exclusion closed forms for round-robin and max-gain
scheduling over Rayleigh fading, a seeded parallel Monte Carlo simulator and
adaptive quadrature as independent oracles, and a sweep engine with CSV
output and figure presets.
"""

from .closed_form import (
    EnumerationBudgetError,
    NeumaierSum,
    SubsetTerm,
    enumerate_subset_terms,
    proposed_outage,
    roundrobin_outage,
    roundrobin_user_outage,
)
from .experiments import (
    CSV_HEADER,
    Figure,
    Scheme,
    SweepAxis,
    SweepRow,
    SweepSpec,
    VerificationError,
    figure_specs,
    load_config,
    load_sweep_spec,
    read_rows,
    reproduce_figure,
    run_sweep,
    write_rows,
)
from .model import (
    ChannelRealization,
    SystemConfig,
    channel_capacity,
    db_to_linear,
    sample_gains,
    secrecy_capacity,
    secrecy_threshold,
    wiretap_capacity,
)
from .oracle import (
    ConvergenceError,
    Policy,
    SimulationSpec,
    adaptive_simpson,
    quadrature_proposed,
    quadrature_roundrobin_user,
    simulate_outage,
    simulate_scheduling_counts,
    worker_count,
)
from .results import ClampError, Method, OutageResult, clamp_probability

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "ClampError",
    "ConvergenceError",
    "CSV_HEADER",
    "EnumerationBudgetError",
    "Figure",
    "Method",
    "NeumaierSum",
    "OutageResult",
    "Policy",
    "Scheme",
    "SimulationSpec",
    "SubsetTerm",
    "SweepAxis",
    "SweepRow",
    "SweepSpec",
    "SystemConfig",
    "VerificationError",
    "adaptive_simpson",
    "channel_capacity",
    "clamp_probability",
    "db_to_linear",
    "enumerate_subset_terms",
    "figure_specs",
    "load_config",
    "load_sweep_spec",
    "proposed_outage",
    "quadrature_proposed",
    "quadrature_roundrobin_user",
    "read_rows",
    "reproduce_figure",
    "roundrobin_outage",
    "roundrobin_user_outage",
    "run_sweep",
    "sample_gains",
    "secrecy_capacity",
    "secrecy_threshold",
    "simulate_outage",
    "simulate_scheduling_counts",
    "wiretap_capacity",
    "worker_count",
    "write_rows",
    "__version__",
]
