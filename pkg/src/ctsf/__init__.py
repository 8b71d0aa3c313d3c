"""Conceal-truth-show-fake transmission: secrecy-rate power allocation with decoy bands.

Submodules:

* :mod:`ctsf.model` - band plans, channels, scenarios and the JSON config format
* :mod:`ctsf.multiplexing` - inter-band coupling and fitting the multiplexing factor
* :mod:`ctsf.sinr` - SINRs, secrecy rates and interception/deception indicators
* :mod:`ctsf.optimizer` - the alternating secrecy-rate optimizer and its baselines
* :mod:`ctsf.simulation` - Rician Monte-Carlo evaluation and sweeps
* :mod:`ctsf.cli` - the ``ctsf`` command
"""
from .model import (
    BandPlan,
    ChannelSet,
    ConfigError,
    PowerAllocation,
    RicianParams,
    Scenario,
    demo_scenario,
    dump_scenario,
    load_scenario,
    validate_scenario,
)
from .multiplexing import AlphaFitResult, correlation, correlation_matrix, fit_alpha, fit_objective
from .optimizer import (
    Infeasible,
    OptResult,
    RecoveredAllocation,
    RecoveryFailure,
    Substitutions,
    XiVector,
    bado,
    equal_power_baseline,
    ofdm_baseline,
    recover_powers,
    solve_allocation_step,
    solve_substitution_step,
)
from .simulation import MetricsRecord, RealizationBatch, draw_batch, draw_channels, run_point, sweep_power, sweep_threshold
from .sinr import (
    RateReport,
    SinrReport,
    bob_sinr,
    decoy_dominates,
    eve_decoy_sinr,
    eve_intercept_sinr,
    indicators,
    sinr_report,
    sum_secrecy_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFitResult",
    "BandPlan",
    "ChannelSet",
    "ConfigError",
    "Infeasible",
    "MetricsRecord",
    "OptResult",
    "PowerAllocation",
    "RateReport",
    "RealizationBatch",
    "RecoveredAllocation",
    "RecoveryFailure",
    "RicianParams",
    "Scenario",
    "SinrReport",
    "Substitutions",
    "XiVector",
    "bado",
    "bob_sinr",
    "correlation",
    "correlation_matrix",
    "decoy_dominates",
    "demo_scenario",
    "draw_batch",
    "draw_channels",
    "dump_scenario",
    "equal_power_baseline",
    "eve_decoy_sinr",
    "eve_intercept_sinr",
    "fit_alpha",
    "fit_objective",
    "indicators",
    "load_scenario",
    "ofdm_baseline",
    "recover_powers",
    "run_point",
    "sinr_report",
    "solve_allocation_step",
    "solve_substitution_step",
    "sum_secrecy_rate",
    "sweep_power",
    "sweep_threshold",
    "validate_scenario",
]
