"""
Node-based fifth-order WENO (Jiang-Peng finite-difference form).

The derivative ∂x(H⁺ + H⁻) at x_i is approximated by
(Ĥ_{i+1/2} - Ĥ_{i-1/2})/Δx with Ĥ = Ĥ⁺ + Ĥ⁻, where Ĥ⁺ is reconstructed from
the left-biased stencil and Ĥ⁻ from the right-biased one. Three ghost nodes
at each end hold zero flux: u = 0 left of the origin, and the transport
speed and the truncated coag-frag flux vanish right of R.

With a closed right boundary (the default) the interface flux at R + Δx/2 is
zero as well, so no polymer mass leaves through R. An open boundary keeps the
reconstructed value, which for a split flux carries the H⁺ part out while
nothing comes back through the zero ghosts.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import WenoConfig

FloatArray = NDArray[np.float64]

Variant = Literal["standard", "printed"]
RightBoundary = Literal["closed", "open"]

# Linear weights of the sub-stencils (V1..V3, V2..V4, V3..V5).
IDEAL_WEIGHTS = (1 / 10, 6 / 10, 3 / 10)
# Reversed pairing; the scheme drops to third order with it.
PRINTED_WEIGHTS = (3 / 10, 6 / 10, 1 / 10)
GHOSTS = 3

_LINEAR_WEIGHTS = {"standard": IDEAL_WEIGHTS, "printed": PRINTED_WEIGHTS}
# Coefficient of the centered gradient term in S2: 1/4 (Jiang-Shu) or 1/2 as printed.
_S2_GRADIENT = {"standard": 0.25, "printed": 0.5}


def smoothness_indicators(
    W1: ArrayLike, W2: ArrayLike, W3: ArrayLike, W4: ArrayLike, W5: ArrayLike,
    indicator: Variant = "standard",
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Smoothness indicators S1, S2, S3 of the three sub-stencils (W1..W3, W2..W4, W3..W5)."""
    W1, W2, W3, W4, W5 = (np.asarray(w, dtype=np.float64) for w in (W1, W2, W3, W4, W5))
    S1 = 13 / 12 * (W1 - 2 * W2 + W3) ** 2 + 1 / 4 * (W1 - 4 * W2 + 3 * W3) ** 2
    S2 = 13 / 12 * (W2 - 2 * W3 + W4) ** 2 + _S2_GRADIENT[indicator] * (W2 - W4) ** 2
    S3 = 13 / 12 * (W3 - 2 * W4 + W5) ** 2 + 1 / 4 * (3 * W3 - 4 * W4 + W5) ** 2
    return S1, S2, S3


def nonlinear_weights(
    S1: ArrayLike, S2: ArrayLike, S3: ArrayLike, epsilon: float = 1e-6,
    ideal: tuple[float, float, float] = IDEAL_WEIGHTS,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """w_r = a_r/Σa with a_r = d_r/(ε + S_r)."""
    d1, d2, d3 = ideal
    a1 = d1 / (epsilon + np.asarray(S1, dtype=np.float64))
    a2 = d2 / (epsilon + np.asarray(S2, dtype=np.float64))
    a3 = d3 / (epsilon + np.asarray(S3, dtype=np.float64))
    total = a1 + a2 + a3
    return a1 / total, a2 / total, a3 / total


def _reconstruct_left_biased(
    V1: FloatArray, V2: FloatArray, V3: FloatArray, V4: FloatArray, V5: FloatArray,
    epsilon: float, indicator: Variant, weights: Variant = "standard",
) -> FloatArray:
    """Value at the interface right of V3 from V1..V5."""
    S1, S2, S3 = smoothness_indicators(V1, V2, V3, V4, V5, indicator)
    w1, w2, w3 = nonlinear_weights(S1, S2, S3, epsilon, _LINEAR_WEIGHTS[weights])
    return (
        w1 * (V1 / 3 - 7 * V2 / 6 + 11 * V3 / 6)
        + w2 * (-V2 / 6 + 5 * V3 / 6 + V4 / 3)
        + w3 * (V3 / 3 + 5 * V4 / 6 - V5 / 6)
    )


def reconstruct_half_flux(
    W: ArrayLike,
    orientation: Literal["plus", "minus"],
    epsilon: float = 1e-6,
    indicator: Variant = "standard",
    weights: Variant = "standard",
) -> float:
    """
    Reconstruct one half-node flux from the five stencil values W1..W5.

    For 'plus' the list is (H_{k-2}, ..., H_{k+2}) for the interface k+1/2.
    For 'minus' it is (H_{k+1}, H_{k+2}, H_{k+3}, H_k, H_{k-1}); the minus
    combination is the plus one applied to (W3, W2, W1, W4, W5), and the
    smoothness indicators are taken on that same mirrored list.
    """
    W1, W2, W3, W4, W5 = (np.float64(w) for w in np.asarray(W, dtype=np.float64))
    if orientation == "minus":
        W1, W3 = W3, W1
    elif orientation != "plus":
        raise ValueError(f"orientation must be 'plus' or 'minus', got {orientation!r}")
    return float(_reconstruct_left_biased(W1, W2, W3, W4, W5, epsilon, indicator, weights))


@dataclass(frozen=True, eq=False)
class GhostedFluxes:
    """H± padded with three zero ghost values at each end (index k stored at k+3)."""

    Hplus: FloatArray
    Hminus: FloatArray

    @classmethod
    def from_nodal(cls, Hplus: FloatArray, Hminus: FloatArray) -> "GhostedFluxes":
        pad = np.zeros(GHOSTS)
        return cls(
            Hplus=np.concatenate([pad, Hplus, pad]),
            Hminus=np.concatenate([pad, Hminus, pad]),
        )

    @property
    def n(self) -> int:
        """Index of the last physical node."""
        return len(self.Hplus) - 2 * GHOSTS - 1


def interface_fluxes(
    ghosted: GhostedFluxes,
    epsilon: float = 1e-6,
    indicator: Variant = "standard",
    weights: Variant = "standard",
    right_boundary: RightBoundary = "closed",
) -> FloatArray:
    """Ĥ⁺ + Ĥ⁻ at the interfaces k+1/2, k = 0..N."""
    n = ghosted.n
    k = np.arange(n + 1) + GHOSTS
    hp, hm = ghosted.Hplus, ghosted.Hminus
    plus = _reconstruct_left_biased(
        hp[k - 2], hp[k - 1], hp[k], hp[k + 1], hp[k + 2], epsilon, indicator, weights
    )
    minus = _reconstruct_left_biased(
        hm[k + 3], hm[k + 2], hm[k + 1], hm[k], hm[k - 1], epsilon, indicator, weights
    )
    F = plus + minus
    if right_boundary == "closed":
        F[n] = 0.0
    return F


def flux_divergence(
    ghosted: GhostedFluxes,
    dx: float,
    epsilon: float = 1e-6,
    indicator: Variant = "standard",
    weights: Variant = "standard",
    right_boundary: RightBoundary = "closed",
) -> FloatArray:
    """WENO5 approximation of ∂x(H⁺ + H⁻) at nodes 1..N (array of length N)."""
    F = interface_fluxes(ghosted, epsilon, indicator, weights, right_boundary)
    return (F[1:] - F[:-1]) / dx


def upwind1_divergence(
    ghosted: GhostedFluxes, dx: float, right_boundary: RightBoundary = "closed"
) -> FloatArray:
    """First-order upwind ∂x(H⁺ + H⁻) at nodes 1..N: backward for H⁺, forward for H⁻."""
    n = ghosted.n
    i = np.arange(1, n + 1) + GHOSTS
    hp, hm = ghosted.Hplus, ghosted.Hminus
    D = (hp[i] - hp[i - 1] + hm[i + 1] - hm[i]) / dx
    if right_boundary == "closed":
        # drop the interface flux H⁺_N + H⁻_{N+1} at R + Δx/2
        D[-1] -= hp[n + GHOSTS] / dx
    return D


def divergence(ghosted: GhostedFluxes, dx: float, config: WenoConfig) -> FloatArray:
    """Dispatch on the configured scheme."""
    if config.scheme == "upwind1":
        return upwind1_divergence(ghosted, dx, config.right_boundary)
    return flux_divergence(
        ghosted, dx, config.weno_epsilon, config.weno_indicator, config.weno_weights, config.right_boundary
    )
