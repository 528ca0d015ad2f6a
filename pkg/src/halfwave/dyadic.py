"""Dyadic shell projections and the frequency-region masks.

Shell 0 is {|xi| <= 1}; shell k >= 1 is {2^(k-1) < |xi| <= 2^k}.  Cutoffs
are sharp indicators so that shell sums and mask partitions recombine
exactly on the lattice.  The 'much smaller' threshold is |xi1| < |xi2|/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bilinear import PowerWeight, SignPair, SurfaceMassResult, surface_mass
from .errors import ParameterError
from .grid import Spectrum

__all__ = [
    "shell_bounds",
    "lp_projection",
    "shell_on_lattice",
    "MaskSpec",
    "region_masks",
    "shell_surface_mass",
]

LL_THRESHOLD = 0.5


def shell_bounds(k: int) -> tuple[float, float]:
    """(lo, hi] bounds of dyadic shell k."""
    if k < 0:
        raise ParameterError(f"shell index must be nonnegative, got {k}")
    if k == 0:
        return (-1.0, 1.0)  # lo < 0 so that |xi| = 0 is included
    return (float(2 ** (k - 1)), float(2**k))


def _shell_mask(grid, k: int) -> np.ndarray:
    lo, hi = shell_bounds(k)
    xi = grid.xi_modulus()
    return (xi > lo) & (xi <= hi)


def shell_on_lattice(grid, k: int) -> bool:
    """Whether shell k contains any lattice frequency."""
    return bool(_shell_mask(grid, k).any())


def lp_projection(F: Spectrum, k: int) -> Spectrum:
    """Sharp restriction of the spectrum to dyadic shell k."""
    return Spectrum(F.grid, F.data * _shell_mask(F.grid, k))


@dataclass(frozen=True)
class MaskSpec:
    """A named pair-frequency mask, evaluable in both kernel backends.

    Calling the mask with stacked (..., 3) arrays (xi1, xi2) evaluates it
    vectorized; the integer code routes it through the compiled kernels.
    """

    name: str
    code: int
    c1: float = 2.0
    threshold: float = LL_THRESHOLD
    sh_lo: float = 0.0
    sh_hi: float = np.inf

    def __call__(self, xi1, xi2) -> np.ndarray:
        n1 = np.linalg.norm(xi1, axis=-1)
        n2 = np.linalg.norm(xi2, axis=-1)
        if self.code == kernels.MASK_ALL:
            return np.ones_like(n1, dtype=bool)
        if self.code == kernels.MASK_GEQ:
            return n1 >= self.threshold * n2
        if self.code == kernels.MASK_LL:
            return n1 < self.threshold * n2
        if self.code in (kernels.MASK_NEAR, kernels.MASK_FAR):
            ns = np.linalg.norm(np.asarray(xi1) + np.asarray(xi2), axis=-1)
            near = n1 + n2 <= self.c1 * ns
            return near if self.code == kernels.MASK_NEAR else ~near
        return (n1 > self.sh_lo) & (n1 <= self.sh_hi) & (n1 < self.threshold * n2)


def region_masks(c1: float = 2.0, threshold: float = LL_THRESHOLD) -> dict[str, MaskSpec]:
    """The mask family used by the bilinear splittings.

    geq/ll split by relative input size; P/Q split the hyperbolic product by
    whether the two focal distances are comparable to the output frequency.
    """
    return {
        "one": MaskSpec("one", kernels.MASK_ALL, c1, threshold),
        "geq": MaskSpec("geq", kernels.MASK_GEQ, c1, threshold),
        "ll": MaskSpec("ll", kernels.MASK_LL, c1, threshold),
        "P": MaskSpec("P", kernels.MASK_NEAR, c1, threshold),
        "Q": MaskSpec("Q", kernels.MASK_FAR, c1, threshold),
    }


def shell_mask(k: int, threshold: float = LL_THRESHOLD) -> MaskSpec:
    """Mask selecting xi1 in shell k with |xi1| < threshold * |xi2|."""
    lo, hi = shell_bounds(k)
    return MaskSpec(f"shell_ll_{k}", kernels.MASK_SHELL_LL, threshold=threshold,
                    sh_lo=max(lo, 0.0), sh_hi=hi)


def shell_surface_mass(
    xi_vec,
    tau: float,
    sp: SignPair,
    k: int,
    h: float,
    **kwargs,
) -> SurfaceMassResult:
    """Surface mass restricted to rho1 in shell k with rho1 < rho2/2."""
    lo, hi = shell_bounds(k)
    weight = PowerWeight(shell=(max(lo, 0.0), hi), require_ll=True)
    return surface_mass(xi_vec, tau, sp, weight, h, **kwargs)
