"""
Method-of-lines operator, CFL time step and SSP-RK3 stepping.

The semi-discrete system is x_i·du_i/dt = G_i·u_i - D_i for i = 1..N, where D
is the reconstructed flux divergence; node 0 is pinned to zero.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .config import ModelToggles, StepControl, WenoConfig
from .errors import DivergenceError
from .fluxes import (
    CoagFragFlux,
    NodalFluxes,
    SplittingScheme,
    TransportSpeeds,
    assemble,
    source_term,
    split_transport,
)
from .grid import Grid, SystemState
from .kernels import KernelTables
from .quadrature import primed_weights, trapezoid_weights
from .weno import GhostedFluxes, divergence

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class CflTerms:
    """The three rates of the CFL bound (per time unit)."""

    G: float
    C: float
    F: float

    @property
    def total(self) -> float:
        return self.G + self.C + self.F


class MethodOfLines:
    """
    Right-hand side L(u) of the semi-discrete system, with everything that is
    fixed for a run (tables, weights, shifted kernels) computed once.
    """

    def __init__(
        self,
        grid: Grid,
        tables: KernelTables,
        scheme: SplittingScheme,
        V0: float,
        m0: float,
        weno: WenoConfig | None = None,
        toggles: ModelToggles | None = None,
    ) -> None:
        """
        Initialize the operator.

        Args:
            grid: Size grid
            tables: Nodal rate tables on grid
            scheme: Transport flux splitting
            V0: Initial monomer concentration
            m0: Initial polymer mass (frozen)
            weno: Reconstruction settings (defaults to WENO5, ε = 1e-6)
            toggles: Process switches (defaults to everything on)
        """
        self.grid = grid
        self.tables = tables
        self.scheme = scheme
        self.V0 = V0
        self.m0 = m0
        self.weno = weno or WenoConfig()
        self.toggles = toggles or ModelToggles()
        self._coagfrag = CoagFragFlux(tables, grid, self.toggles.discoag_weight) if self.toggles.enable_coagfrag else None
        self._zeros = np.zeros(len(grid))

        n = grid.N
        self._mass_weights = primed_weights(0, n, n)
        self._c_weights = primed_weights(1, n, n)
        self._frag_rows = self._fragmentation_rows()

    def _fragmentation_rows(self) -> FloatArray:
        """Σ′_{j=1}^{i-1} kf[j, i-j] for every i (trapezoidal where no composite rule exists)."""
        n = self.grid.N
        sums = np.zeros(n + 1)
        for i in range(3, n + 1):
            j = np.arange(n + 1)
            vals = np.zeros(n + 1)
            vals[1:i] = self.tables.kf[j[1:i], i - j[1:i]]
            w = primed_weights(1, i - 1, n) if i - 2 > 6 else trapezoid_weights(1, i - 1, n)
            sums[i] = float(np.dot(w, vals))
        return sums

    def state(self, u: FloatArray, time: float = 0.0) -> SystemState:
        return SystemState(density=u, time=time, V0=self.V0, m0=self.m0)

    def polymer_mass(self, u: FloatArray) -> float:
        return self.grid.dx * float(np.dot(self._mass_weights, self.grid.nodes * u))

    def monomer(self, u: FloatArray) -> float:
        """V = V0 + m0 - m(u)."""
        return self.V0 + self.m0 - self.polymer_mass(u)

    def speeds(self, u: FloatArray) -> TransportSpeeds:
        if not self.toggles.enable_transport:
            return TransportSpeeds(plus=self._zeros, minus=self._zeros, total=self._zeros)
        return split_transport(self.tables, self.state(u), self.scheme, self.grid)

    def fluxes(self, u: FloatArray) -> NodalFluxes:
        """Nodal H± for the density u."""
        cf = self._coagfrag(u) if self._coagfrag is not None else self._zeros
        return assemble(self.speeds(u), cf, u, self.grid)

    def rhs(self, u: FloatArray) -> FloatArray:
        """
        du/dt at every node; entry 0 is zero (pinned).

        Raises:
            DivergenceError: If any entry is not finite
        """
        fl = self.fluxes(u)
        D = divergence(GhostedFluxes.from_nodal(fl.Hplus, fl.Hminus), self.grid.dx, self.weno)
        out = np.zeros_like(u)
        out[1:] = (source_term(fl.G, u)[1:] - D) / self.grid.nodes[1:]
        if not np.all(np.isfinite(out)):
            raise DivergenceError("non-finite right-hand side", time=float("nan"))
        return out

    def monomer_rate(self, u: FloatArray, V: float) -> float:
        """dV/dt = -Δx·Σ′ (V·k_on - k_off)·u, the monomer equation integrated alongside."""
        if not self.toggles.enable_transport:
            return 0.0
        T = V * self.tables.kon - self.tables.koff
        return -self.grid.dx * float(np.dot(self._mass_weights, T * u))

    def cfl_terms(self, u: FloatArray, literal: bool = False) -> CflTerms:
        """
        G = max(G⁺ - G⁻)/Δx, C = Δx·max_i Σ′_j kc[i,j]·u_j, F = max_i (Δx/2)·Σ′_j kf[j,i-j].

        With literal=True the Δx factors of C and F are dropped.
        """
        dx = self.grid.dx
        G = C = F = 0.0
        if self.toggles.enable_transport:
            sp = self.speeds(u)
            G = float(np.max(sp.plus - sp.minus)) / dx
        if self.toggles.enable_coagfrag:
            scale = 1.0 if literal else dx
            C = max(0.0, scale * float(np.max(self.tables.kc @ (self._c_weights * u))))
            F = scale * 0.5 * float(np.max(self._frag_rows))
        return CflTerms(G=G, C=C, F=F)

    def cfl_timestep(self, u: FloatArray, control: StepControl, terms: CflTerms | None = None) -> float:
        """
        Δt = cfl_safety/(G + C + F), capped by dt_max.

        Args:
            u: Nodal density
            control: Step control settings
            terms: CFL terms already computed for u (computed here when omitted)

        Raises:
            DivergenceError: If Δt falls below dt_min
        """
        if terms is None:
            terms = self.cfl_terms(u, control.cfl_literal)
        dt = control.cfl_safety / terms.total if terms.total > 0 else float("inf")
        if control.dt_max is not None:
            dt = min(dt, control.dt_max)
        if not np.isfinite(terms.total) or dt < control.dt_min:
            raise DivergenceError(f"time step {dt:.3g} below dt_min={control.dt_min:g}", time=float("nan"))
        return dt


Operator = Callable[[FloatArray], FloatArray]


def rk3_step(
    y: FloatArray, dt: float, L: Operator, project: Callable[[FloatArray], None] | None = None
) -> FloatArray:
    """
    One step of the third-order strong-stability-preserving Runge-Kutta method.

        y1 = y + Δt·L(y)
        y2 = 3/4·y + 1/4·y1 + 1/4·Δt·L(y1)
        y' = 1/3·y + 2/3·y2 + 2/3·Δt·L(y2)

    Args:
        y: Current state
        dt: Time step (> 0)
        L: Right-hand side operator
        project: Optional in-place constraint applied after each stage

    Returns:
        State after the step

    Raises:
        DivergenceError: If a stage is not finite
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    y1 = y + dt * L(y)
    _finish_stage(y1, project)
    y2 = 3 / 4 * y + 1 / 4 * y1 + 1 / 4 * dt * L(y1)
    _finish_stage(y2, project)
    y3 = 1 / 3 * y + 2 / 3 * y2 + 2 / 3 * dt * L(y2)
    _finish_stage(y3, project)
    return y3


def _finish_stage(stage: FloatArray, project: Callable[[FloatArray], None] | None) -> None:
    if project is not None:
        project(stage)
    if not np.all(np.isfinite(stage)):
        raise DivergenceError("non-finite Runge-Kutta stage", time=float("nan"))
