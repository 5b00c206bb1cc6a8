"""Monte Carlo simulator of prioritized multi-tier cellular networks."""

from ._hetnet import (
    Config,
    ConfigError,
    Error,
    GenerationError,
    InvalidParameter,
    IoError,
    NumericError,
    Report,
    __version__,
    access_probability,
    config_keys,
    experiment_fig2,
    experiment_fig3,
    feasibility_check,
    fig2_default_text,
    fig3_default_text,
    fixed_point_oracle,
    greedy_access_prob_mc,
    load_config,
    oracle_check,
    parse_config_text,
    path_gain,
    run_monte_carlo,
    run_power_control,
    spectral_radius,
    update,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
