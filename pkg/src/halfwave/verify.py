"""Numerical verification harness for the bilinear free-wave estimates.

Every check builds concentrated data at a ladder of frequency scales,
computes both sides of an inequality, and reports the ratio statistics.
"Bounded" is operationalized as max/min ratio <= 3 across the ladder;
growth is a fitted log2-log2 slope.  Grids are adapted per scale so that
the concentration frequency sits at half the spatial Nyquist with a fixed
number of cells across the data profile; the inequality weights are
absolute, so ratio trends across the ladder measure the continuum scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import minimize

from .bilinear import (
    SignPair,
    bilinear_symbol_product,
    product_transform_direct,
    surface_mass,
)
from .dyadic import region_masks
from .errors import ParameterError
from .grid import (
    SpacetimeGrid,
    SpacetimeSpectrum,
    SpatialGrid,
    Spectrum,
    forward_transform,
)
from .propagator import EvolutionSpec, free_spacetime
from .spaces import NormParams, WindowSpec, apply_window, dual_exponent, sobolev_hat_norm, xsb_norm

__all__ = [
    "scaling_grid",
    "DataFamily",
    "EstimateReport",
    "family_spectrum",
    "check_elliptic_lemma",
    "check_hyperbolic_lemmas",
    "check_key_estimate",
    "sharpness_probe",
    "check_lowfreq_young",
    "check_strichartz_l2",
    "surface_cross_check",
    "extremizer_search",
    "BOUNDED_SPREAD",
    "GROWTH_SLOPE",
]

BOUNDED_SPREAD = 3.0     # max/min ratio across the scale ladder counts as bounded
GROWTH_SLOPE = 0.25      # fitted log2 slope above this (with good fit) counts as growth


def scaling_grid(lam: float, n: int = 16, m: int = 32) -> tuple[SpacetimeGrid, WindowSpec]:
    """Space-time grid adapted to concentration scale lam.

    The scale sits at half the spatial Nyquist and a quarter of the temporal
    range, so data profiles occupy the same number of cells at every scale.
    """
    if lam <= 0:
        raise ParameterError(f"scale must be positive, got {lam}")
    dxi = 4.0 * lam / n                      # Nyquist = 2 lam
    dtau = 8.0 * lam / m                     # tau range = (-4 lam, 4 lam]
    sg = SpatialGrid(n, np.pi / dxi)
    g = SpacetimeGrid(sg, m, np.pi / dtau)
    w = WindowSpec(support=0.5 * g.half_time, flat_fraction=0.5)
    return g, w


@dataclass(frozen=True)
class DataFamily:
    """Descriptor of a band-limited test-data family at a concentration scale."""

    kind: str = "gaussian-bump"
    scale: float = 4.0
    width: float | None = None
    anisotropy: tuple[float, float, float] = (1.0, 1.0, 1.0)
    amplitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian-bump", "shell-concentrated", "knapp-box", "random-bandlimited"):
            raise ParameterError(f"unknown family kind {self.kind!r}")


def family_spectrum(fam: DataFamily, grid: SpatialGrid, rng=None) -> Spectrum:
    """Band-limited spectrum realizing the family on the given lattice."""
    k1, k2, k3 = grid.xi_mesh()
    xi = grid.xi_modulus()
    lam = fam.scale
    a1, a2, a3 = fam.anisotropy
    if fam.kind == "gaussian-bump":
        w = fam.width if fam.width is not None else lam / 2.0
        prof = np.exp(-((k1 / a1) ** 2 + (k2 / a2) ** 2 + (k3 / a3) ** 2) / (2.0 * w**2))
    elif fam.kind == "shell-concentrated":
        w = fam.width if fam.width is not None else lam / 4.0
        prof = np.exp(-((xi - lam) ** 2) / (2.0 * w**2)) * np.ones_like(xi)
    elif fam.kind == "knapp-box":
        # anisotropic frequency box around lam*e1, widths scaled per axis
        w = fam.width if fam.width is not None else lam / 2.0
        prof = (
            (np.abs(k1 - lam) <= w * a1)
            & (np.abs(k2) <= w * a2)
            & (np.abs(k3) <= w * a3)
        ).astype(float) * np.ones_like(xi)
    else:  # random-bandlimited
        if rng is None:
            rng = np.random.default_rng(fam.seed)
        prof = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
        prof = prof * (xi <= lam)
    band = xi < 0.98 * grid.nyquist
    return Spectrum(grid, fam.amplitude * np.broadcast_to(prof, grid.shape) * band)


@dataclass
class EstimateReport:
    """Per-sample LHS/RHS ratios plus summary statistics of one check."""

    name: str
    params: dict
    rows: list[dict] = dc_field(default_factory=list)
    max_ratio: float = math.nan
    min_ratio: float = math.nan
    median_ratio: float = math.nan
    spread: float = math.nan
    exponent: float | None = None
    exponent_r2: float | None = None
    passed: bool | None = None
    skipped: bool = False
    runtime: float | None = None

    def finalize(self, fit_against: str | None = None):
        ratios = [row["ratio"] for row in self.rows if row.get("ratio", 0.0) > 0.0]
        if not ratios:
            self.skipped = True
            return self
        self.max_ratio = max(ratios)
        self.min_ratio = min(ratios)
        self.median_ratio = float(np.median(ratios))
        self.spread = self.max_ratio / self.min_ratio
        if fit_against is not None and len(ratios) >= 3:
            xs = np.log2([row[fit_against] for row in self.rows if row.get("ratio", 0.0) > 0.0])
            ys = np.log2(ratios)
            slope, intercept = np.polyfit(xs, ys, 1)
            pred = slope * xs + intercept
            ss_res = float(np.sum((ys - pred) ** 2))
            ss_tot = float(np.sum((ys - ys.mean()) ** 2))
            self.exponent = float(slope)
            self.exponent_r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        return self


def _weighted_st_norm(S: SpacetimeSpectrum, r: float, weight: np.ndarray) -> float:
    """L^{r'} space-time lattice norm of weight * |F|."""
    rp = dual_exponent(r)
    g = S.grid
    total = np.sum((weight * np.abs(S.data)) ** rp) * g.spatial.dxi**3 * g.dtau
    return float(total ** (1.0 / rp))


def _bracket(x):
    return np.sqrt(1.0 + x**2)


def _key_weights(grid, sigma: float):
    """(J^sigma, J^(sigma-1) d_x, J^(sigma-1) d_t) weights on the (tau, xi) lattice."""
    xi = grid.spatial.xi_modulus()[None]
    tau = grid.tau_axis[:, None, None, None]
    br = _bracket(xi)
    return br**sigma, br ** (sigma - 1.0) * np.abs(xi), br ** (sigma - 1.0) * np.abs(tau)


def _fixed_window_grid(lam: float, n: int) -> tuple[SpacetimeGrid, WindowSpec]:
    """Adapted spatial lattice with a scale-independent physical time window.

    Keeping the window duration fixed keeps the modulation content of the
    windowed waves fixed, so X-norm ratios are comparable across scales.
    The time step shrinks with the scale to resolve the fastest phase.
    """
    sg = SpatialGrid(n, np.pi * n / (4.0 * lam))
    m = max(64, 2 * int(math.ceil(8.0 * lam)))
    g = SpacetimeGrid(sg, m, 2.0 * np.pi)
    return g, WindowSpec(support=np.pi, flat_fraction=0.5)


def _pair_for(kind: str, lam: float, seed: int) -> tuple[DataFamily, DataFamily]:
    u = DataFamily(kind=kind, scale=lam, seed=seed)
    v = DataFamily(kind=kind, scale=lam, seed=seed + 1)
    return u, v


def _ladder_ratios(
    name: str,
    params: dict,
    lams,
    lhs_rhs,
    fit_against: str | None = None,
) -> EstimateReport:
    report = EstimateReport(name, dict(params))
    for lam in lams:
        lhs, rhs = lhs_rhs(lam)
        ratio = lhs / rhs if rhs > 0 else 0.0
        report.rows.append({"scale": lam, "lhs": lhs, "rhs": rhs, "ratio": ratio})
    return report.finalize(fit_against=fit_against or "scale")


def check_elliptic_lemma(
    r: float,
    sigma: float,
    kind: str = "gaussian-bump",
    lams=(2.0, 4.0, 8.0, 16.0),
    n: int = 16,
    m: int = 32,
    seed: int = 0,
) -> EstimateReport:
    """Equal-sign products: J^sigma and J^(sigma-1) d_t terms vs data norms."""
    if sigma <= 2.0 / r:
        raise ParameterError(f"elliptic check needs sigma > 2/r = {2.0 / r}")

    def one(lam):
        g, w = scaling_grid(lam, n=n, m=m)
        rng = np.random.default_rng(seed)
        uf, vf = _pair_for(kind, lam, seed)
        u0 = family_spectrum(uf, g.spatial, rng)
        v0 = family_spectrum(vf, g.spatial, rng)
        S = product_transform_direct(u0, v0, SignPair(+1, +1), g, w)
        wj, _, wt = _key_weights(g, sigma)
        lhs = _weighted_st_norm(S, r, wj) + _weighted_st_norm(S, r, wt)
        rhs = sobolev_hat_norm(u0, r, sigma) * sobolev_hat_norm(v0, r, sigma)
        return lhs, rhs

    rep = _ladder_ratios(
        "elliptic_lemma", {"r": r, "sigma": sigma, "kind": kind, "n": n, "m": m, "seed": seed},
        lams, one,
    )
    if not rep.skipped:
        rep.passed = rep.spread <= BOUNDED_SPREAD
    return rep


def check_hyperbolic_lemmas(
    r: float,
    sigma: float,
    kind: str = "gaussian-bump",
    lams=(2.0, 4.0, 8.0),
    n: int = 16,
    m: int = 32,
    c1: float = 2.0,
    seed: int = 0,
) -> EstimateReport:
    """Opposite-sign products split into the near (P) and far (Q) regions.

    The near region carries the J^sigma and d_t terms; the far region the
    J^(sigma-1) d_x and d_t terms (the derivative is essential there).
    """
    if sigma <= 2.0 / r:
        raise ParameterError(f"hyperbolic check needs sigma > 2/r = {2.0 / r}")
    masks = region_masks(c1=c1)
    report = EstimateReport(
        "hyperbolic_lemmas",
        {"r": r, "sigma": sigma, "kind": kind, "n": n, "m": m, "c1": c1, "seed": seed},
    )
    sp = SignPair(+1, -1)
    for lam in lams:
        g, w = scaling_grid(lam, n=n, m=m)
        rng = np.random.default_rng(seed)
        uf, vf = _pair_for(kind, lam, seed)
        u0 = family_spectrum(uf, g.spatial, rng)
        v0 = family_spectrum(vf, g.spatial, rng)
        SP = bilinear_symbol_product(u0, v0, sp, masks["P"], g, w)
        SQ = bilinear_symbol_product(u0, v0, sp, masks["Q"], g, w)
        wj, wx, wt = _key_weights(g, sigma)
        rhs = sobolev_hat_norm(u0, r, sigma) * sobolev_hat_norm(v0, r, sigma)
        lhs_p = _weighted_st_norm(SP, r, wj) + _weighted_st_norm(SP, r, wt)
        lhs_q = _weighted_st_norm(SQ, r, wx) + _weighted_st_norm(SQ, r, wt)
        report.rows.append(
            {"scale": lam, "lhs": lhs_p, "rhs": rhs, "ratio": lhs_p / rhs, "region": "P"}
        )
        report.rows.append(
            {"scale": lam, "lhs": lhs_q, "rhs": rhs, "ratio": lhs_q / rhs if rhs > 0 else 0.0,
             "region": "Q"}
        )
    report.finalize()
    if not report.skipped:
        for region in ("P", "Q"):
            ratios = [row["ratio"] for row in report.rows
                      if row["region"] == region and row["ratio"] > 0]
            ok = bool(ratios) and max(ratios) / min(ratios) <= BOUNDED_SPREAD
            report.params[f"spread_{region}"] = (
                max(ratios) / min(ratios) if ratios else math.nan
            )
            report.passed = ok if report.passed is None else (report.passed and ok)
    return report


def check_key_estimate(
    r: float,
    sigma: float,
    b: float,
    signs: SignPair = SignPair(+1, +1),
    kind: str = "gaussian-bump",
    lams=(2.0, 4.0, 8.0, 16.0),
    n: int = 16,
    m: int = 32,
    modulation: float = 0.0,
    seed: int = 0,
) -> EstimateReport:
    """Free-wave form of the key bilinear estimate, plus the full space form.

    Free-wave rows compare the two derivative-weighted product norms to the
    product of data norms.  Full rows window (and optionally modulate) the
    free waves and compare to the product of their modulation-weighted
    space-time norms.
    """
    if sigma <= 2.0 / r or b <= 1.0 / r:
        raise ParameterError(f"key estimate needs sigma > 2/r and b > 1/r")
    report = EstimateReport(
        "key_estimate",
        {"r": r, "sigma": sigma, "b": b, "signs": (signs.first, signs.second),
         "kind": kind, "n": n, "m": m, "modulation": modulation, "seed": seed},
    )
    for lam in lams:
        g, w = scaling_grid(lam, n=n, m=m)
        rng = np.random.default_rng(seed)
        uf, vf = _pair_for(kind, lam, seed)
        u0 = family_spectrum(uf, g.spatial, rng)
        v0 = family_spectrum(vf, g.spatial, rng)
        S = product_transform_direct(u0, v0, signs, g, w)
        _, wx, wt = _key_weights(g, sigma)
        lhs = _weighted_st_norm(S, r, wx) + _weighted_st_norm(S, r, wt)
        rhs = sobolev_hat_norm(u0, r, sigma) * sobolev_hat_norm(v0, r, sigma)
        report.rows.append(
            {"scale": lam, "lhs": lhs, "rhs": rhs,
             "ratio": lhs / rhs if rhs > 0 else 0.0, "form": "free"}
        )
        # full form: windowed (modulated) waves measured in X norms, on a
        # grid whose physical window duration does not depend on the scale
        gf, wf = _fixed_window_grid(lam, n)
        rngf = np.random.default_rng(seed)
        u0f = family_spectrum(uf, gf.spatial, rngf)
        v0f = family_spectrum(vf, gf.spatial, rngf)
        mod = np.exp(1j * modulation * gf.t_axis)[:, None, None, None]
        uw = free_spacetime(u0f, gf, EvolutionSpec("D", signs.first))
        vw = free_spacetime(v0f, gf, EvolutionSpec("D", signs.second))
        uw = apply_window(type(uw)(gf, uw.data * mod), wf)
        vw = apply_window(type(vw)(gf, vw.data * np.conj(mod)), wf)
        prod = forward_transform(type(uw)(gf, uw.data * vw.data))
        wj, _, wt2 = _key_weights(gf, sigma)
        lhs_full = _weighted_st_norm(prod, r, wj) + _weighted_st_norm(prod, r, wt2)
        rhs_full = (
            xsb_norm(uw, NormParams(r, sigma, b, signs.first))
            * xsb_norm(vw, NormParams(r, sigma, b, signs.second))
        )
        report.rows.append(
            {"scale": lam, "lhs": lhs_full, "rhs": rhs_full,
             "ratio": lhs_full / rhs_full if rhs_full > 0 else 0.0, "form": "full"}
        )
    report.finalize()
    if not report.skipped:
        ok = True
        for form in ("free", "full"):
            ratios = [row["ratio"] for row in report.rows if row["form"] == form and row["ratio"] > 0]
            spread = max(ratios) / min(ratios) if ratios else math.nan
            report.params[f"spread_{form}"] = spread
            ok = ok and bool(ratios) and spread <= BOUNDED_SPREAD
        report.passed = ok
    return report


def sharpness_probe(
    r: float,
    sigma_below: float,
    kind: str = "gaussian-bump",
    lams=(4.0, 8.0, 16.0, 32.0),
    n: int = 16,
    m: int = 32,
    seed: int = 0,
) -> EstimateReport:
    """Growth of the free-wave ratio for sigma below the 2/r threshold.

    The predicted growth exponent for concentrated equal-sign interactions
    is 2/r - sigma.
    """
    if len(lams) < 3:
        raise ParameterError("need at least 3 scales to fit a growth exponent")

    def one(lam):
        g, w = scaling_grid(lam, n=n, m=m)
        rng = np.random.default_rng(seed)
        uf, vf = _pair_for(kind, lam, seed)
        u0 = family_spectrum(uf, g.spatial, rng)
        v0 = family_spectrum(vf, g.spatial, rng)
        S = product_transform_direct(u0, v0, SignPair(+1, +1), g, w)
        _, wx, wt = _key_weights(g, sigma_below)
        lhs = _weighted_st_norm(S, r, wx) + _weighted_st_norm(S, r, wt)
        rhs = sobolev_hat_norm(u0, r, sigma_below) * sobolev_hat_norm(v0, r, sigma_below)
        return lhs, rhs

    rep = _ladder_ratios(
        "sharpness_probe",
        {"r": r, "sigma": sigma_below, "prediction": 2.0 / r - sigma_below,
         "kind": kind, "n": n, "m": m, "seed": seed},
        lams, one, fit_against="scale",
    )
    return rep


def check_lowfreq_young(
    r: float,
    sigma: float = 1.25,
    samples: int = 8,
    n: int = 16,
    m: int = 32,
    seed: int = 0,
) -> EstimateReport:
    """Products of data supported in |xi| <= 1: ratios should be uniformly flat."""
    sg = SpatialGrid(n, 4.0 * np.pi)  # dxi = 0.25, Nyquist 2
    g = SpacetimeGrid(sg, m, 2.0 * np.pi)
    w = WindowSpec(support=0.5 * g.half_time)
    rng = np.random.default_rng(seed)
    report = EstimateReport(
        "lowfreq_young", {"r": r, "sigma": sigma, "samples": samples, "seed": seed}
    )
    fam = DataFamily(kind="random-bandlimited", scale=1.0)
    for i in range(samples):
        u0 = family_spectrum(fam, sg, rng)
        v0 = family_spectrum(fam, sg, rng)
        S = product_transform_direct(u0, v0, SignPair(+1, +1), g, w)
        wj, _, _ = _key_weights(g, sigma)
        lhs = _weighted_st_norm(S, r, wj)
        rhs = sobolev_hat_norm(u0, r, sigma) * sobolev_hat_norm(v0, r, sigma)
        report.rows.append(
            {"scale": float(i), "lhs": lhs, "rhs": rhs,
             "ratio": lhs / rhs if rhs > 0 else 0.0}
        )
    report.finalize()
    if not report.skipped:
        report.passed = report.spread <= 2.0
    return report


def check_strichartz_l2(
    sigma1: float,
    sigma2: float,
    kind: str = "gaussian-bump",
    lams=(2.0, 4.0, 8.0, 16.0),
    n: int = 16,
    m: int = 32,
    seed: int = 0,
) -> EstimateReport:
    """Opposite-sign L2 bilinear bound with split regularities sigma1+sigma2."""
    if sigma1 < 0 or sigma2 < 0:
        raise ParameterError("sigma1 and sigma2 must be nonnegative")

    def one(lam):
        g, w = scaling_grid(lam, n=n, m=m)
        rng = np.random.default_rng(seed)
        uf, vf = _pair_for(kind, lam, seed)
        u0 = family_spectrum(uf, g.spatial, rng)
        v0 = family_spectrum(vf, g.spatial, rng)
        S = product_transform_direct(u0, v0, SignPair(+1, -1), g, w)
        lhs = _weighted_st_norm(S, 2.0, np.ones(1))
        rhs = sobolev_hat_norm(u0, 2.0, sigma1) * sobolev_hat_norm(v0, 2.0, sigma2)
        return lhs, rhs

    rep = _ladder_ratios(
        "strichartz_l2",
        {"sigma1": sigma1, "sigma2": sigma2, "kind": kind, "n": n, "m": m, "seed": seed},
        lams, one, fit_against="scale",
    )
    if not rep.skipped:
        if sigma1 + sigma2 > 1.0:
            rep.passed = rep.spread <= BOUNDED_SPREAD
        else:
            rep.passed = rep.exponent is not None and rep.exponent > GROWTH_SLOPE
    return rep


def surface_cross_check(
    widths=(1.2, 1.5),
    n: int = 16,
    m: int = 32,
    n_probes: int = 4,
    tol: float = 0.05,
) -> EstimateReport:
    """Grid transform of a Gaussian free-wave product vs the surface-measure
    quadrature with the matching radial weight.

    One probe calibrates the overall constant; the remaining probes must
    reproduce it to the stated relative tolerance.
    """
    w1, w2 = widths
    sg = SpatialGrid(n, 2.0 * np.pi)  # dxi = 0.5, Nyquist 4
    g = SpacetimeGrid(sg, m, 2.0 * np.pi)  # dtau = 0.5
    win = WindowSpec(support=0.95 * g.half_time, flat_fraction=0.5)
    xi = sg.xi_modulus()
    u0 = Spectrum(sg, np.exp(-(xi**2) / (2.0 * w1**2)))
    v0 = Spectrum(sg, np.exp(-(xi**2) / (2.0 * w2**2)))
    S = product_transform_direct(u0, v0, SignPair(+1, +1), g, win)

    # deterministic probes: strong lattice points well inside the support
    mags = np.abs(S.data)
    order = np.argsort(mags, axis=None)[::-1]
    probes = []
    tau_ax, xi_ax = g.tau_axis, sg.xi_axis
    for flat in order:
        it, i1, i2, i3 = np.unravel_index(flat, S.data.shape)
        tau = tau_ax[it]
        xivec = np.array([xi_ax[i1], xi_ax[i2], xi_ax[i3]])
        rho = np.linalg.norm(xivec)
        if rho < 0.9 or tau < rho + 1.5 or tau > 5.0:
            continue
        # radial data: probes must differ in the reduced variables (|xi|, tau)
        key = (round(rho, 6), round(tau, 6))
        if any(key == p[3] for p in probes):
            continue
        probes.append((xivec, tau, mags[it, i1, i2, i3], key))
        if len(probes) >= n_probes + 1:
            break

    def gauss_weight(r1, r2):
        return np.exp(-(r1**2) / (2.0 * w1**2)) * np.exp(-(r2**2) / (2.0 * w2**2))

    report = EstimateReport(
        "surface_cross_check", {"widths": widths, "n": n, "m": m, "tol": tol}
    )
    consts = []
    for xivec, tau, gridval, _ in probes:
        sm = surface_mass(xivec, tau, SignPair(+1, +1), gauss_weight,
                          h=1.5 * sg.dxi, tol=0.01, n0=48)
        if sm.empty or sm.value <= 0:
            continue
        consts.append(gridval / sm.value)
        report.rows.append(
            {"scale": float(np.linalg.norm(xivec)), "tau": tau, "lhs": gridval,
             "rhs": sm.value, "ratio": gridval / sm.value}
        )
    report.finalize()
    if len(consts) >= 2:
        ref = consts[0]
        devs = [abs(c / ref - 1.0) for c in consts[1:]]
        report.params["max_deviation"] = max(devs)
        report.params["calibration"] = ref
        report.passed = max(devs) <= tol
    else:
        report.skipped = True
    return report


def _random_search(objective, lo, hi, n_points, rng):
    best_val, best_x = -math.inf, None
    for _ in range(n_points):
        x = lo + (hi - lo) * rng.random(len(lo))
        v = objective(x)
        if v > best_val:
            best_val, best_x = v, x
    return best_val, best_x


def extremizer_search(
    r: float,
    sigma: float,
    b: float,
    signs: SignPair = SignPair(+1, +1),
    kinds=("gaussian-bump", "shell-concentrated", "knapp-box"),
    bounds=((1.0, 6.0), (0.2, 3.0), (0.1, 1.0), (0.1, 1.0)),
    budget: int = 120,
    n: int = 12,
    m: int = 16,
    seed: int = 0,
):
    """Simplex-style local maximization of the free-wave ratio over family
    parameters (center scale, width, two transverse anisotropies).

    Restarts once per family kind; returns the best parameters, the ratio,
    the monotone best-so-far trace, and a convergence flag.
    """
    lo = np.array([bb[0] for bb in bounds])
    hi = np.array([bb[1] for bb in bounds])
    degenerate = bool(np.all(hi <= lo))
    sg_cache: dict[float, tuple] = {}

    def ratio_for(kind, x):
        x = np.clip(x, lo, hi)
        scale, width, a2, a3 = x
        key = round(float(scale), 6)
        if key not in sg_cache:
            sg_cache[key] = scaling_grid(float(scale), n=n, m=m)
        g, w = sg_cache[key]
        fam = DataFamily(kind=kind, scale=float(scale), width=float(width),
                         anisotropy=(1.0, float(a2), float(a3)), seed=seed)
        rng = np.random.default_rng(seed)
        u0 = family_spectrum(fam, g.spatial, rng)
        S = product_transform_direct(u0, u0, signs, g, w)
        _, wx, wt = _key_weights(g, sigma)
        lhs = _weighted_st_norm(S, r, wx) + _weighted_st_norm(S, r, wt)
        rhs = sobolev_hat_norm(u0, r, sigma) ** 2
        return lhs / rhs if rhs > 0 else 0.0

    trace = []
    best = {"ratio": -math.inf, "params": None, "kind": None}
    evals = 0
    for kind in kinds:
        x0 = 0.5 * (lo + hi)
        if degenerate:
            val = ratio_for(kind, x0)
            trace.append(max(val, best["ratio"] if trace else val))
            if val > best["ratio"]:
                best = {"ratio": val, "params": tuple(x0), "kind": kind}
            continue

        def neg(x, kind=kind):
            nonlocal evals
            evals += 1
            val = ratio_for(kind, x)
            prev = trace[-1] if trace else -math.inf
            trace.append(max(val, prev))
            if val > best["ratio"]:
                best.update(ratio=val, params=tuple(np.clip(x, lo, hi)), kind=kind)
            return -val

        maxfev = max(1, budget // len(kinds))
        minimize(neg, x0, method="Nelder-Mead",
                 options={"maxfev": maxfev, "xatol": 1e-3, "fatol": 1e-4})
    converged = evals < budget or degenerate
    return {
        "best_ratio": best["ratio"],
        "best_params": best["params"],
        "best_kind": best["kind"],
        "trace": trace,
        "converged": converged,
        "evaluations": evals,
    }
