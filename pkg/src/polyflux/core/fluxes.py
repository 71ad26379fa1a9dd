"""
Nodal fluxes of the conservative formulation.

H⁺_i = G⁺_i·x_i·u_i + CF_i and H⁻_i = G⁻_i·x_i·u_i, where G = G⁺ + G⁻ is the
transport speed V·k_on - k_off split into an upwind pair, and CF is the
discrete coagulation-minus-fragmentation flux

    CF_i = Δx² Σ′_{j=0}^{i} Σ′_{l=i+1}^{N} w_{j,l} (kc[j, l-j]·u_j·u_{l-j} - kf[j, l-j]·u_l)

with w_{j,l} = x_j ('inner', default) or x_l ('printed').
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError
from .grid import Grid, SystemState, polymer_mass
from .kernels import KernelTables
from .quadrature import primed_weights

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.intp]


@dataclass(frozen=True)
class SplittingScheme:
    """Transport flux decomposition: the λ family, or Lax-Friedrichs when lam is None."""

    lam: float | None = 0.2

    def __post_init__(self) -> None:
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise ConfigurationError(f"must lie in [0,1], got {self.lam}", key="lambda")

    @classmethod
    def lax_friedrichs(cls) -> "SplittingScheme":
        return cls(lam=None)

    @property
    def is_lax_friedrichs(self) -> bool:
        return self.lam is None

    def __str__(self) -> str:
        return "lax_friedrichs" if self.lam is None else f"lambda={self.lam:g}"


@dataclass(frozen=True, eq=False)
class TransportSpeeds:
    """Split transport speeds: plus + minus == total up to roundoff."""

    plus: FloatArray
    minus: FloatArray
    total: FloatArray


@dataclass(frozen=True, eq=False)
class NodalFluxes:
    """H± at every node together with the parts they were built from."""

    Hplus: FloatArray
    Hminus: FloatArray
    Gplus: FloatArray
    Gminus: FloatArray
    G: FloatArray
    CF: FloatArray


def monomer_concentration(state: SystemState, grid: Grid) -> float:
    """
    Monomer concentration from mass conservation: V = V0 + m0 - m(u).

    The result may be negative when the density undershoots; callers decide
    what to do with that.
    """
    return state.V0 + state.m0 - polymer_mass(grid, state.density)


def split_transport(
    tables: KernelTables, state: SystemState, scheme: SplittingScheme, grid: Grid
) -> TransportSpeeds:
    """
    Split G = V·k_on - k_off into G⁺ and G⁻.

    Lambda(λ): G⁺ = (V0 + m0 - m + λm)·k_on, G⁻ = -λm·k_on - k_off, where m is the
    current polymer mass. λ = 0 puts all of V·k_on upwind-positive, λ = 1 puts
    every negatively signed term on the negative side.

    Lax-Friedrichs: G± = (G ± m_LF)/2 with m_LF = max|G| recomputed on every call.
    """
    m = polymer_mass(grid, state.density)
    V = state.V0 + state.m0 - m
    total = V * tables.kon - tables.koff
    if scheme.lam is None:
        m_lf = float(np.max(np.abs(total)))
        plus = 0.5 * (total + m_lf)
        minus = 0.5 * (total - m_lf)
    else:
        lam = scheme.lam
        plus = (state.V0 + state.m0 - m + lam * m) * tables.kon
        minus = -lam * m * tables.kon - tables.koff
    return TransportSpeeds(plus=plus, minus=minus, total=total)


class CoagFragFlux:
    """
    Discrete coagulation-fragmentation flux CF_i for every i in O(N²).

    Each primed-sum weight row is written as an indicator of its span plus a
    correction supported on at most a handful of nodes near the span ends.
    The indicator-by-indicator part of the double sum is read off 2-D prefix
    sums of the integrand; the corrections touch only the short lists.
    """

    def __init__(self, tables: KernelTables, grid: Grid, weight: Literal["inner", "printed"] = "inner") -> None:
        """
        Precompute the shifted kernel tables and the sparse weight corrections.

        Args:
            tables: Nodal rate tables on grid
            grid: Grid the density lives on
            weight: 'inner' (x_j) or 'printed' (x_l) size weight
        """
        if weight not in ("inner", "printed"):
            raise ConfigurationError(f"must be 'inner' or 'printed', got {weight!r}", key="discoag_weight")
        n = grid.N
        self.n = n
        self.dx = grid.dx
        rows, cols = np.triu_indices(n + 1)
        self._rows = rows
        self._cols = cols
        self._shift = cols - rows
        w = grid.nodes[rows] if weight == "inner" else grid.nodes[cols]
        self._wkc = w * tables.kc[rows, self._shift]
        self._wkf = w * tables.kf[rows, self._shift]
        # work arrays reused by every call
        self._B = np.zeros((n + 1, n + 1))
        self._C = np.zeros((n + 1, n + 1))
        self._RT = np.zeros((n + 1, n + 2))
        self._D = np.zeros((n + 1, n + 2))

        nodes = np.arange(n + 1)
        outer = np.zeros((n + 1, n + 1))
        inner = np.zeros((n + 1, n + 1))
        for i in range(n + 1):
            if i > 0:
                outer[i] = primed_weights(0, i, n)
            outer[i] -= nodes <= i
            if i + 1 < n:
                inner[i] = primed_weights(i + 1, n, n)
            inner[i] -= nodes > i
        self._oi, self._ov = _sparse_rows(outer)
        self._ii, self._iv = _sparse_rows(inner)

    def integrand(self, u: FloatArray, out: FloatArray | None = None) -> FloatArray:
        """B[j, l] = w_{j,l}·(kc[j,l-j]·u_j·u_{l-j} - kf[j,l-j]·u_l) for l ≥ j, zero below the diagonal."""
        B = np.zeros((self.n + 1, self.n + 1)) if out is None else out
        r, c, s = self._rows, self._cols, self._shift
        B[r, c] = self._wkc * u[r] * u[s] - self._wkf * u[c]
        return B

    def __call__(self, u: FloatArray) -> FloatArray:
        """Return CF_0..CF_N for the nodal density u."""
        n = self.n
        B = self.integrand(u, self._B)
        # C[i, l] = Σ_{j≤i} B[j, l]
        C = np.cumsum(B, axis=0, out=self._C)
        # RT[j, k] = Σ_{l≥k} B[j, l];  D[i, k] = Σ_{l≥k} C[i, l]; column N+1 stays zero
        RT = self._RT
        np.cumsum(B[:, ::-1], axis=1, out=RT[:, n::-1])
        D = self._D
        np.cumsum(C[:, ::-1], axis=1, out=D[:, n::-1])

        i = np.arange(n + 1)
        core = D[i, i + 1]
        outer = np.sum(self._ov * RT[self._oi, (i + 1)[:, None]], axis=1)
        inner = np.sum(self._iv * C[i[:, None], self._ii], axis=1)
        cross = np.sum(
            self._ov[:, :, None] * self._iv[:, None, :] * B[self._oi[:, :, None], self._ii[:, None, :]],
            axis=(1, 2),
        )
        cf = self.dx**2 * (core + outer + inner + cross)
        # outer span (0, 0) and inner spans (N, N), (N+1, N) are empty
        cf[0] = 0.0
        cf[n - 1] = 0.0
        cf[n] = 0.0
        return cf


def _sparse_rows(dense: FloatArray) -> tuple[IntArray, FloatArray]:
    """Pack the nonzeros of each row into fixed-width index/value arrays (zero padded)."""
    width = max(1, int(np.max(np.count_nonzero(dense, axis=1))))
    idx = np.zeros((dense.shape[0], width), dtype=np.intp)
    val = np.zeros((dense.shape[0], width))
    for r, row in enumerate(dense):
        nz = np.flatnonzero(row)
        idx[r, : nz.size] = nz
        val[r, : nz.size] = row[nz]
    return idx, val


def coagfrag_flux(
    tables: KernelTables, density: FloatArray, grid: Grid, weight: Literal["inner", "printed"] = "inner"
) -> FloatArray:
    """One-off evaluation of CF; runs reuse a CoagFragFlux instead."""
    return CoagFragFlux(tables, grid, weight)(density)


def assemble(speeds: TransportSpeeds, cf: FloatArray, density: FloatArray, grid: Grid) -> NodalFluxes:
    """H⁺ = G⁺·x·u + CF, H⁻ = G⁻·x·u."""
    xu = grid.nodes * density
    return NodalFluxes(
        Hplus=speeds.plus * xu + cf,
        Hminus=speeds.minus * xu,
        Gplus=speeds.plus,
        Gminus=speeds.minus,
        G=speeds.total,
        CF=cf,
    )


def source_term(G: FloatArray, density: FloatArray) -> FloatArray:
    """Right-hand side G·u of the conservative equation (unsplit G)."""
    return G * density
