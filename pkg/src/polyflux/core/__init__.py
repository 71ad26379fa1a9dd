"""Numerical core: grid, rates, quadrature, fluxes, reconstruction and stepping."""

from .config import SimConfig
from .fluxes import CoagFragFlux, SplittingScheme, coagfrag_flux, split_transport
from .grid import Grid, StepProfile, SystemState, init_density, make_grid, polymer_mass
from .kernels import KernelTables, RateModel, tabulate
from .quadrature import integrate, primed_weights, weighted_sum
from .stepping import MethodOfLines, rk3_step
from .weno import GhostedFluxes, flux_divergence, upwind1_divergence

__all__ = [
    "SimConfig",
    "Grid",
    "StepProfile",
    "SystemState",
    "make_grid",
    "init_density",
    "polymer_mass",
    "RateModel",
    "KernelTables",
    "tabulate",
    "weighted_sum",
    "integrate",
    "primed_weights",
    "SplittingScheme",
    "split_transport",
    "CoagFragFlux",
    "coagfrag_flux",
    "GhostedFluxes",
    "flux_divergence",
    "upwind1_divergence",
    "MethodOfLines",
    "rk3_step",
]
