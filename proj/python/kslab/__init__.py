"""Python face of the double-well Kramers-Smoluchowski laboratory."""

try:
    from ._kslab import (
        ConfigError,
        NumericalError,
        RateConstant,
        RunConfig,
        limit_energy,
        limit_energy_slope,
        limit_metric,
        limit_solution,
        measure_limits,
        rate,
        run_epsilon,
        sweep_report,
        transition_profile,
    )
except ImportError:  # development tree: extension lives next to the package
    from _kslab import (
        ConfigError,
        NumericalError,
        RateConstant,
        RunConfig,
        limit_energy,
        limit_energy_slope,
        limit_metric,
        limit_solution,
        measure_limits,
        rate,
        run_epsilon,
        sweep_report,
        transition_profile,
    )

__all__ = [
    "ConfigError",
    "NumericalError",
    "RateConstant",
    "RunConfig",
    "limit_energy",
    "limit_energy_slope",
    "limit_metric",
    "limit_solution",
    "measure_limits",
    "rate",
    "run_epsilon",
    "sweep_report",
    "transition_profile",
]
