"""
Rate functions of the polymerization model and their nodal tables.

k_on (polymerization), k_off (depolymerization), k_c (coagulation) and k_f
(fragmentation) are evaluated in internal time units: every constant given
in s⁻¹ is multiplied by time_unit_scale (3600, hours) on evaluation.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import RateConfig
from .errors import DomainError
from .grid import Grid

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class RateModel:
    """
    Parameters of the four rate functions.

    k_on(x) = a·x + b for x < x_c, c for x ≥ x_c (μM⁻¹s⁻¹)
    k_off(x) = eta·1e-6 (s⁻¹)
    k_f(x, y) = A·(x+y)/(B + x+y) (s⁻¹)
    k_c(x, y) = C·|x-y|^{3/2}/(1 + x+y) (μM⁻¹s⁻¹)
    """

    kon_slope: float = 4e-6
    kon_intercept: float = 0.2e-6
    kon_critical: float = 0.5
    kon_plateau: float = 4e-6
    eta: float = 5.0
    kf_amplitude: float = 80e-5
    kf_half_size: float = 10.0
    kc_amplitude: float = 4e-6
    time_unit_scale: float = 3600.0

    @classmethod
    def from_config(cls, rates: RateConfig) -> "RateModel":
        """Build the model from the [rates] section, warning on an unexplored eta."""
        if not rates.eta_min <= rates.eta <= rates.eta_max:
            logger.warning(
                f"eta={rates.eta} lies outside the explored range [{rates.eta_min}, {rates.eta_max}]"
            )
        return cls(
            kon_slope=rates.kon_slope,
            kon_intercept=rates.kon_intercept,
            kon_critical=rates.kon_critical,
            kon_plateau=rates.kon_plateau,
            eta=rates.eta,
            kf_amplitude=rates.kf_amplitude,
            kf_half_size=rates.kf_half_size,
            kc_amplitude=rates.kc_amplitude,
            time_unit_scale=rates.time_unit_scale,
        )


def _sizes(*args: ArrayLike) -> list[FloatArray]:
    out = [np.asarray(a, dtype=np.float64) for a in args]
    for a in out:
        if np.any(a < 0):
            raise DomainError(f"rates are defined for sizes >= 0, got {np.min(a)}")
    return out


def eval_kon(model: RateModel, x: ArrayLike) -> FloatArray:
    """Polymerization rate (μM⁻¹ per time unit); right-continuous at x_c."""
    (x,) = _sizes(x)
    s = model.time_unit_scale
    return np.where(
        x < model.kon_critical,
        (model.kon_slope * x + model.kon_intercept) * s,
        model.kon_plateau * s,
    )


def eval_koff(model: RateModel, x: ArrayLike) -> FloatArray:
    """Depolymerization rate (per time unit), independent of size."""
    (x,) = _sizes(x)
    return np.full_like(x, model.eta * 1e-6 * model.time_unit_scale)


def eval_kc(model: RateModel, x: ArrayLike, y: ArrayLike) -> FloatArray:
    """Coagulation kernel (μM⁻¹ per time unit); symmetric in (x, y)."""
    x, y = _sizes(x, y)
    return model.kc_amplitude * np.abs(x - y) ** 1.5 / (1.0 + (x + y)) * model.time_unit_scale


def eval_kf(model: RateModel, x: ArrayLike, y: ArrayLike) -> FloatArray:
    """Fragmentation kernel (per time unit); depends on x + y only."""
    x, y = _sizes(x, y)
    total = x + y
    return model.kf_amplitude * total / (model.kf_half_size + total) * model.time_unit_scale


@dataclass(frozen=True, eq=False)
class KernelTables:
    """
    Nodal values of the rates on one grid.

    Attributes:
        kon: k_on(x_i), length N+1
        koff: k_off(x_i), length N+1
        kc: k_c(x_i, x_j), (N+1)×(N+1), symmetric with zero diagonal
        kf: k_f(x_i, x_j), (N+1)×(N+1), symmetric
    """

    kon: FloatArray
    koff: FloatArray
    kc: FloatArray
    kf: FloatArray


def _symmetric_table(values: FloatArray) -> FloatArray:
    upper = np.triu(values)
    table = upper + np.triu(values, k=1).T
    table.flags.writeable = False
    return table


def tabulate(model: RateModel, grid: Grid) -> KernelTables:
    """
    Evaluate the rates at the grid nodes once per run.

    Only the upper triangle of each pair table is kept and mirrored, so the
    tables are exactly symmetric.

    Args:
        model: Rate parameters
        grid: Target grid

    Returns:
        KernelTables in internal units
    """
    x = grid.nodes
    xi, xj = np.meshgrid(x, x, indexing="ij")
    kon = eval_kon(model, x)
    koff = eval_koff(model, x)
    for a in (kon, koff):
        a.flags.writeable = False
    return KernelTables(
        kon=kon,
        koff=koff,
        kc=_symmetric_table(eval_kc(model, xi, xj)),
        kf=_symmetric_table(eval_kf(model, xi, xj)),
    )


def constant_tables(grid: Grid, kon: float = 0.0, koff: float = 0.0, kc: float = 0.0, kf: float = 0.0) -> KernelTables:
    """Tables of constant rates, for manufactured solutions and operator checks."""
    n = len(grid)
    return KernelTables(
        kon=np.full(n, kon),
        koff=np.full(n, koff),
        kc=np.full((n, n), kc),
        kf=np.full((n, n), kf),
    )
