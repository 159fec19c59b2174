"""Teleportation and remote magnetometry with dephased topological qubits."""
__version__ = "0.1.0"

from .specfun import (
    DecoherenceFactor,
    EnvironmentParams,
    PoleError,
    SeriesConvergenceError,
    alpha,
    beta_coefficient,
    gamma_fn,
    hyp1f1,
    hyp2f2_11_3half2,
    i_q,
)
from .qmatrix import PureStateParams, input_state, resource_initial_state
from .channel import ChannelSnapshot, channel_state, kraus_operators
from .teleport import TeleportResult, average_fidelity, output_state, teleport, teleport_generic
from .metrology import EstimationReport, qfi_b1, qfi_closed_form
from .resources import ResourceReport, concurrence_x, discord_x, resource_report
from .sweep import ConfigError, SweepConfig, load_config, parse_config, run_sweep
from .figures import FIGURES, reproduce_figure

__all__ = [
    "__version__",
    "DecoherenceFactor", "EnvironmentParams", "PoleError", "SeriesConvergenceError",
    "alpha", "beta_coefficient", "gamma_fn", "hyp1f1", "hyp2f2_11_3half2", "i_q",
    "PureStateParams", "input_state", "resource_initial_state",
    "ChannelSnapshot", "channel_state", "kraus_operators",
    "TeleportResult", "average_fidelity", "output_state", "teleport", "teleport_generic",
    "EstimationReport", "qfi_b1", "qfi_closed_form",
    "ResourceReport", "concurrence_x", "discord_x", "resource_report",
    "ConfigError", "SweepConfig", "load_config", "parse_config", "run_sweep",
    "FIGURES", "reproduce_figure",
]
