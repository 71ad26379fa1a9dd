"""
polyflux: mass-conservative fifth-order solver for polymerization with
coagulation and fragmentation.

Quick Start:
    >>> from polyflux import SimConfig, Simulation, write_outputs
    >>>
    >>> config = SimConfig.from_text("", overrides=["eta=5", "N=200"])
    >>> result = Simulation(config).run()
    >>> print(result.termination.status, result.final.V)
    >>> write_outputs(result, "results/")
"""

__version__ = "0.1.0"
__license__ = "MIT"

# Public API exports
from polyflux.config import ConfigManager, create_default_config_file
from polyflux.core.config import SimConfig, parse_config
from polyflux.core.errors import (
    ConfigurationError,
    DivergenceError,
    DomainError,
    UnsupportedSpanError,
)
from polyflux.output import read_snapshot, read_timeseries, write_outputs
from polyflux.simulation import (
    Simulation,
    SimulationResult,
    count_local_maxima,
    ode_monomer_check,
    oscillation_metric,
    run,
    sweep,
    sweep_cases,
)

__all__ = [
    # Main interface
    "Simulation",
    "SimulationResult",
    "run",
    "sweep",
    "sweep_cases",

    # Diagnostics
    "oscillation_metric",
    "ode_monomer_check",
    "count_local_maxima",

    # Configuration
    "SimConfig",
    "parse_config",
    "ConfigManager",
    "create_default_config_file",

    # Output
    "write_outputs",
    "read_snapshot",
    "read_timeseries",

    # Errors
    "ConfigurationError",
    "DivergenceError",
    "DomainError",
    "UnsupportedSpanError",

    # Metadata
    "__version__",
]
