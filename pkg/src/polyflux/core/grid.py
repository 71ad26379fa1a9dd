"""Uniform size grid, nodal size densities and the evolving system state."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .config import MIN_NODES
from .errors import ConfigurationError
from .quadrature import integrate

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes x_i = i·dx, i = 0..N, on [0, R]."""

    R: float
    N: int
    dx: float
    nodes: FloatArray

    def __len__(self) -> int:
        return self.N + 1


@dataclass(frozen=True)
class StepProfile:
    """Indicator profile: height h on (0, c], zero beyond."""

    height: float
    cutoff: float


@dataclass(frozen=True, eq=False)
class SystemState:
    """Nodal density at a given time, with the frozen initial masses.

    Attributes:
        density: u_i ≈ u(x_i, t), length N+1, density[0] == 0
        time: Current time (h)
        V0: Initial monomer concentration (μM)
        m0: Discrete initial polymer mass Δx·Σ′ x_j u⁰_j (μM), never recomputed
    """

    density: FloatArray
    time: float
    V0: float
    m0: float

    def advanced(self, density: FloatArray, time: float) -> "SystemState":
        """Return the state at a later time, keeping V0 and m0."""
        if time < self.time:
            raise ValueError(f"time must not decrease ({time} < {self.time})")
        return SystemState(density=density, time=time, V0=self.V0, m0=self.m0)


def make_grid(R: float, N: int) -> Grid:
    """
    Build the uniform grid.

    Args:
        R: Maximum polymer size (> 0)
        N: Number of cells (>= 16)

    Returns:
        Grid with dx = R/N and exact endpoints x_0 = 0, x_N = R

    Raises:
        ConfigurationError: If R <= 0 or N is below the minimum
    """
    if not R > 0:
        raise ConfigurationError(f"R must be positive, got {R}", key="R")
    if N < MIN_NODES:
        raise ConfigurationError(f"N must be at least {MIN_NODES}, got {N}", key="N")
    nodes = np.linspace(0.0, R, N + 1)
    nodes.flags.writeable = False
    return Grid(R=float(R), N=int(N), dx=R / N, nodes=nodes)


def init_density(grid: Grid, profile: StepProfile | FloatArray) -> FloatArray:
    """
    Sample the initial density on the grid.

    The step profile includes its cutoff node. Node 0 is set to zero whatever
    the profile says, since u(0, t) = 0 holds for all t.

    Args:
        grid: Target grid
        profile: Step profile or a tabulated array of N+1 values

    Returns:
        Density array of length N+1

    Raises:
        ConfigurationError: On a negative height, a cutoff outside (0, R), or a
            tabulated profile of the wrong length
    """
    if isinstance(profile, StepProfile):
        if profile.height < 0:
            raise ConfigurationError(f"must be non-negative, got {profile.height}", key="u0_height")
        if not 0.0 < profile.cutoff < grid.R:
            raise ConfigurationError(f"must lie in (0, {grid.R}), got {profile.cutoff}", key="u0_cutoff")
        x = grid.nodes
        inside = (x <= profile.cutoff) | np.isclose(x, profile.cutoff, rtol=1e-12, atol=0.0)
        u = np.where(inside, profile.height, 0.0)
    else:
        u = np.array(profile, dtype=np.float64)
        if u.shape != (len(grid),):
            raise ConfigurationError(f"tabulated profile needs {len(grid)} values, got {u.size}", key="u0_file")
        if not np.all(np.isfinite(u)):
            raise ConfigurationError("tabulated profile has non-finite values", key="u0_file")
    u[0] = 0.0
    return u


def load_profile(path: Path) -> FloatArray:
    """
    Read a tabulated profile: one column of u, or columns x,u.

    Blank lines and '#' comments are ignored, and the first remaining line may
    be a header. Every other line must hold one or two numbers, separated by a
    comma or whitespace, with the same count on every line.

    Args:
        path: Profile file

    Returns:
        The last column as a float array

    Raises:
        ConfigurationError: On a line that does not parse, ragged columns, or no data
    """
    values: list[float] = []
    width: int | None = None
    first = True
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.replace(",", " ").split()
            try:
                row = [float(field) for field in fields]
            except ValueError:
                if first:
                    first = False
                    continue
                raise ConfigurationError(f"cannot parse line {lineno} of {path}: {line!r}", key="u0_file") from None
            first = False
            if width is None:
                width = len(row)
            if len(row) != width or width > 2:
                raise ConfigurationError(
                    f"line {lineno} of {path} has {len(row)} columns, expected {min(width, 2)}", key="u0_file"
                )
            values.append(row[-1])
    if not values:
        raise ConfigurationError(f"no data rows in {path}", key="u0_file")
    return np.array(values, dtype=np.float64)


def polymer_mass(grid: Grid, density: FloatArray) -> float:
    """
    Discrete first moment Δx·Σ′_{j=0}^{N} x_j u_j.

    Args:
        grid: Grid the density lives on
        density: Nodal density

    Returns:
        Polymer mass (μM)
    """
    if len(density) != len(grid):
        raise ValueError(f"density has {len(density)} values, grid has {len(grid)} nodes")
    return integrate(grid.nodes * density, grid.dx, 0, grid.N)


def initial_state(grid: Grid, density: FloatArray, V0: float) -> SystemState:
    """Freeze V0 and the initial polymer mass m0 at t = 0."""
    return SystemState(density=density, time=0.0, V0=V0, m0=polymer_mass(grid, density))
