"""
Simulation driver for polyflux.

Ties the grid, rate tables, splitting, reconstruction and stepping together
into one run: CFL time step, truncation onto snapshot and end times, SSP-RK3
step, divergence checks and recording of observables.
"""

import logging
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core.config import SimConfig
from .core.errors import ConfigurationError, DivergenceError
from .core.fluxes import SplittingScheme
from .core.grid import Grid, StepProfile, init_density, initial_state, load_profile, make_grid
from .core.kernels import KernelTables, RateModel, tabulate
from .core.stepping import CflTerms, MethodOfLines, rk3_step

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class TimeseriesRow:
    """Observables after one recorded step (t in h, concentrations in μM)."""

    t: float
    dt: float
    V: float
    polymer_mass: float
    total_mass: float
    min_u: float
    max_u: float
    oscillation: float
    V_ode: float


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Density stored at the first state with time >= requested."""

    requested: float
    t: float
    density: FloatArray


@dataclass(frozen=True)
class Termination:
    status: Literal["completed", "diverged"]
    reason: str | None = None
    time: float | None = None


@dataclass
class Diagnostics:
    """Per-run counters.

    Attributes:
        steps: Accepted time steps
        negative_monomer_steps: Steps after which V < 0
        wall_seconds: Wall-clock duration of the run
        cfl: CFL terms of every accepted step
    """

    steps: int = 0
    negative_monomer_steps: int = 0
    wall_seconds: float = 0.0
    cfl: list[CflTerms] = field(default_factory=list)


@dataclass(eq=False)
class SimulationResult:
    """Outcome of one run; always returned, also for diverged runs."""

    config: SimConfig
    grid: Grid
    V0: float
    m0: float
    rows: list[TimeseriesRow]
    snapshots: list[Snapshot]
    termination: Termination
    diagnostics: Diagnostics

    @property
    def completed(self) -> bool:
        return self.termination.status == "completed"

    @property
    def final(self) -> TimeseriesRow:
        return self.rows[-1]

    def snapshot_at(self, requested: float) -> Snapshot:
        """Return the snapshot stored for a requested time."""
        for snap in self.snapshots:
            if snap.requested == requested:
                return snap
        raise KeyError(f"no snapshot requested at t={requested}")


def oscillation_metric(density: ArrayLike, floor: float = 1e-3) -> float:
    """
    Sign changes of the second difference u_{i+1} - 2u_i + u_{i-1}, normalized by N.

    Only interior nodes whose second difference exceeds floor·max|u| in
    magnitude take part.
    """
    u = np.asarray(density, dtype=np.float64)
    n = len(u) - 1
    if n < 2:
        return 0.0
    d2 = u[2:] - 2.0 * u[1:-1] + u[:-2]
    kept = d2[np.abs(d2) > floor * float(np.max(np.abs(u)))]
    if kept.size < 2:
        return 0.0
    return int(np.count_nonzero(np.sign(kept[1:]) != np.sign(kept[:-1]))) / n


def count_local_maxima(density: ArrayLike, floor: float = 1e-3) -> int:
    """Interior local maxima of the 3-point moving average, ignoring plateaus below floor·max.

    The average repeats the end values, so a monotone profile has no maximum.
    """
    u = np.asarray(density, dtype=np.float64)
    smooth = np.convolve(np.pad(u, 1, mode="edge"), np.ones(3) / 3.0, mode="valid")
    top = float(np.max(smooth))
    inner = smooth[1:-1]
    peaks = (inner > smooth[:-2]) & (inner >= smooth[2:]) & (inner > floor * top)
    return int(np.count_nonzero(peaks))


def ode_monomer_check(result: SimulationResult) -> float:
    """max_t |V_ode(t) - V(t)| / V0 over the recorded rows (absolute when V0 = 0)."""
    if not result.rows:
        return 0.0
    gap = max(abs(row.V_ode - row.V) for row in result.rows)
    return gap / result.V0 if result.V0 > 0 else gap


def build_scheme(config: SimConfig) -> SplittingScheme:
    if config.splitting.splitting == "lax_friedrichs":
        return SplittingScheme.lax_friedrichs()
    return SplittingScheme(config.splitting.lam)


class Simulation:
    """
    One configured run.

    The integrated state is the augmented vector [u_0..u_N, V_ode]: the density
    and the monomer ODE companion advance with the same Runge-Kutta stages,
    while the reported V is always the algebraic V0 + m0 - m(u).
    """

    def __init__(self, config: SimConfig | None = None) -> None:
        """
        Build grid, tables and operator for a configuration.

        Args:
            config: Run configuration (defaults to the reference setup)

        Raises:
            ConfigurationError: If the initial data do not fit the grid or u0_file is missing
        """
        self.config = config or SimConfig()
        cfg = self.config
        self.grid = make_grid(cfg.grid.R, cfg.grid.N)
        self.model = RateModel.from_config(cfg.rates)
        self.tables: KernelTables = tabulate(self.model, self.grid)
        self.scheme = build_scheme(cfg)

        if cfg.initial.u0_file is not None:
            if not cfg.initial.u0_file.is_file():
                raise ConfigurationError(f"file not found: {cfg.initial.u0_file}", key="u0_file")
            density = init_density(self.grid, load_profile(cfg.initial.u0_file))
        else:
            density = init_density(self.grid, StepProfile(cfg.initial.u0_height, cfg.initial.u0_cutoff))
        self.initial = initial_state(self.grid, density, cfg.initial.V0)

        self.operator = MethodOfLines(
            self.grid,
            self.tables,
            self.scheme,
            V0=self.initial.V0,
            m0=self.initial.m0,
            weno=cfg.weno,
            toggles=cfg.model,
        )

    @classmethod
    def from_file(cls, path: str | Path, overrides: Iterable[str] = ()) -> "Simulation":
        """Create a Simulation from a config file plus 'key=value' overrides."""
        return cls(SimConfig.from_file(path, overrides))

    def _augmented_rhs(self, y: FloatArray) -> FloatArray:
        u = y[:-1]
        out = np.empty_like(y)
        out[:-1] = self.operator.rhs(u)
        out[-1] = self.operator.monomer_rate(u, float(y[-1]))
        return out

    @staticmethod
    def _pin(y: FloatArray) -> None:
        y[0] = 0.0

    def _row(self, t: float, dt: float, y: FloatArray, oscillation: float | None = None) -> TimeseriesRow:
        u = y[:-1]
        pm = self.operator.polymer_mass(u)
        V = self.initial.V0 + self.initial.m0 - pm
        return TimeseriesRow(
            t=t,
            dt=dt,
            V=V,
            polymer_mass=pm,
            total_mass=V + pm,
            min_u=float(np.min(u)),
            max_u=float(np.max(u)),
            oscillation=(
                oscillation if oscillation is not None else oscillation_metric(u, self.config.output.oscillation_floor)
            ),
            V_ode=float(y[-1]),
        )

    def run(self, progress: Callable[[float], None] | None = None) -> SimulationResult:
        """
        Integrate from t = 0 to t_end.

        Every step uses the CFL time step, shrunk so that the run lands exactly
        on each snapshot time and on t_end. Divergence (non-finite values, a
        time step below dt_min, max|u| above blowup_bound, an oscillation
        metric above oscillation_bound) ends the run with a 'diverged'
        termination instead of raising.

        Args:
            progress: Optional callback receiving the current time after each step

        Returns:
            SimulationResult with the rows and snapshots recorded so far
        """
        out = self.config.output
        control = self.config.stepping
        t_end = out.t_end
        targets = list(out.snapshot_times)
        stops = sorted({t for t in targets if t > 0.0} | {t_end})

        y = np.concatenate([self.initial.density, [self.initial.V0]])
        t = 0.0
        rows = [self._row(0.0, 0.0, y)]
        snapshots: list[Snapshot] = []
        diagnostics = Diagnostics()
        termination = Termination(status="completed")
        warned_negative = False
        started = time.perf_counter()

        def capture() -> None:
            while targets and targets[0] <= t:
                requested = targets.pop(0)
                snapshots.append(Snapshot(requested=requested, t=t, density=y[:-1].copy()))
                logger.debug(f"Snapshot for t={requested} stored at t={t}")

        logger.info(
            f"Starting run: N={self.grid.N}, R={self.grid.R}, {self.scheme}, "
            f"scheme={self.config.weno.scheme}, t_end={t_end} h"
        )
        capture()
        try:
            while t < t_end:
                if control.max_steps is not None and diagnostics.steps >= control.max_steps:
                    logger.warning(f"Step limit {control.max_steps} reached at t={t:.6g} h before t_end={t_end}")
                    break
                u = y[:-1]
                terms = self.operator.cfl_terms(u, control.cfl_literal)
                dt = self.operator.cfl_timestep(u, control, terms)
                stop = next(s for s in stops if s > t)
                landed = t + dt >= stop
                if landed:
                    dt = stop - t

                try:
                    y = rk3_step(y, dt, self._augmented_rhs, self._pin)
                except DivergenceError as e:
                    raise DivergenceError(e.reason, time=t) from None
                t = stop if landed else t + dt
                diagnostics.steps += 1
                diagnostics.cfl.append(terms)

                peak = float(np.max(np.abs(y[:-1])))
                if peak > control.blowup_bound:
                    raise DivergenceError(f"max|u| = {peak:.3g} exceeds {control.blowup_bound:g}", time=t)
                oscillation = oscillation_metric(y[:-1], out.oscillation_floor)
                if control.oscillation_bound is not None and oscillation > control.oscillation_bound:
                    raise DivergenceError(
                        f"oscillation metric {oscillation:.3g} exceeds {control.oscillation_bound:g}", time=t
                    )

                if self.operator.monomer(y[:-1]) < 0:
                    diagnostics.negative_monomer_steps += 1
                    if not warned_negative:
                        logger.warning(f"Monomer concentration negative at t={t:.6g} h")
                        warned_negative = True

                capture()
                if diagnostics.steps % out.timeseries_stride == 0 or t >= t_end:
                    rows.append(self._row(t, dt, y, oscillation))
                if progress is not None:
                    progress(t)
        except DivergenceError as e:
            when = e.time if np.isfinite(e.time) else t
            logger.error(f"Run diverged at t={when:.6g} h: {e.reason}")
            termination = Termination(status="diverged", reason=e.reason, time=when)

        diagnostics.wall_seconds = time.perf_counter() - started
        logger.info(
            f"Run {termination.status} after {diagnostics.steps} steps at t={t:.6g} h "
            f"({diagnostics.wall_seconds:.2f} s)"
        )
        return SimulationResult(
            config=self.config,
            grid=self.grid,
            V0=self.initial.V0,
            m0=self.initial.m0,
            rows=rows,
            snapshots=snapshots,
            termination=termination,
            diagnostics=diagnostics,
        )


def run(config: SimConfig | None = None) -> SimulationResult:
    """Run one simulation for a configuration."""
    return Simulation(config).run()


@dataclass(frozen=True)
class SweepCase:
    """One point of a parameter sweep."""

    label: str
    overrides: tuple[str, ...]


def sweep_cases(
    etas: Iterable[float], lambdas: Iterable[float], lax_friedrichs: bool = False
) -> list[SweepCase]:
    """Cross product of eta values with splittings (each lambda, plus Lax-Friedrichs if asked)."""
    splittings: list[tuple[str, tuple[str, ...]]] = [
        (f"lambda={lam:g}", ("splitting=lambda", f"lambda={lam!r}")) for lam in lambdas
    ]
    if lax_friedrichs:
        splittings.append(("lax_friedrichs", ("splitting=lax_friedrichs",)))
    return [
        SweepCase(label=f"eta={eta:g}_{name}", overrides=(f"eta={eta!r}", *ovr))
        for eta in etas
        for name, ovr in splittings
    ]


def _run_case(config_text: str, case: SweepCase) -> tuple[SweepCase, SimulationResult]:
    return case, Simulation(SimConfig.from_text(config_text, case.overrides)).run()


def sweep(
    base: SimConfig, cases: Iterable[SweepCase], workers: int = 1
) -> list[tuple[SweepCase, SimulationResult]]:
    """
    Run several cases of one base configuration, each with private state.

    Args:
        base: Configuration every case starts from
        cases: Overrides per case
        workers: Worker processes (1 runs in-process)

    Returns:
        (case, result) pairs in the order of cases

    Raises:
        ConfigurationError: If a case's overrides are invalid
    """
    text = base.to_text()
    cases = list(cases)
    # validate every case before starting any work
    for case in cases:
        SimConfig.from_text(text, case.overrides)
    if workers <= 1:
        return [_run_case(text, case) for case in cases]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_case, [text] * len(cases), cases))
