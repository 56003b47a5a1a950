"""Homodyne BPSK phase estimation, symbol detection and LO-phase control."""

from ._core import (
    ChannelParams,
    ConfigError,
    InfeasibleError,
    NumericalError,
    __version__,
    ber_theory,
    fc_max,
    fisher_high_snr,
    fisher_symbol,
    optimal_angles,
    parse_config,
    pareto_known_theta,
    q_function,
    run_em,
    run_qisac,
    run_sweep,
    sample_block,
    score_ber,
    select_target,
    update_psi,
    wrap_pi,
)

__all__ = [
    "ChannelParams",
    "ConfigError",
    "InfeasibleError",
    "NumericalError",
    "__version__",
    "ber_theory",
    "fc_max",
    "fisher_high_snr",
    "fisher_symbol",
    "optimal_angles",
    "parse_config",
    "pareto_known_theta",
    "q_function",
    "run_em",
    "run_qisac",
    "run_sweep",
    "sample_block",
    "score_ber",
    "select_target",
    "update_psi",
    "wrap_pi",
]
