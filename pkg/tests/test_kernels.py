"""Compiled kernels vs the pure-numpy fallback vs direct reference sums."""

import os
import subprocess
import sys

import numpy as np
import pytest

from halfwave import kernels
from halfwave.grid import SpatialGrid


@pytest.fixture
def sg():
    return SpatialGrid(8, np.pi)


def _random_slices(sg, m=2, seed=0):
    rng = np.random.default_rng(seed)
    shape = (m,) + sg.shape
    return (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
    )


def _direct_convolution(us, vs, ax, mask_fn):
    """O(N^6) reference: out(xi) = sum_{xi1+xi2=xi} mask * u(xi1) v(xi2)."""
    m, n = us.shape[0], us.shape[1]
    half = n // 2
    out = np.zeros_like(us)
    for a1 in range(n):
        for b1 in range(n):
            for g1 in range(n):
                xi1 = np.array([ax[a1], ax[b1], ax[g1]])
                for a2 in range(n):
                    for b2 in range(n):
                        for g2 in range(n):
                            xi2 = np.array([ax[a2], ax[b2], ax[g2]])
                            if not mask_fn(xi1, xi2):
                                continue
                            i = ((a1 + a2 - half) % n, (b1 + b2 - half) % n,
                                 (g1 + g2 - half) % n)
                            out[(slice(None),) + i] += us[:, a1, b1, g1] * vs[:, a2, b2, g2]
    return out


@pytest.mark.parametrize("code", [kernels.MASK_ALL, kernels.MASK_NEAR, kernels.MASK_LL])
def test_convolution_matches_direct(sg, code):
    us, vs = _random_slices(sg)
    got = kernels.masked_convolution(us, vs, sg.xi_axis, code, 2.0, 0.5, 0.0, np.inf)

    def mask_fn(x1, x2):
        n1, n2 = np.linalg.norm(x1), np.linalg.norm(x2)
        if code == kernels.MASK_ALL:
            return True
        if code == kernels.MASK_LL:
            return n1 < 0.5 * n2
        return n1 + n2 <= 2.0 * np.linalg.norm(x1 + x2)

    ref = _direct_convolution(us, vs, sg.xi_axis, mask_fn)
    assert np.abs(got - ref).max() < 1e-10 * max(np.abs(ref).max(), 1.0)


@pytest.mark.parametrize("code", sorted([kernels.MASK_ALL, kernels.MASK_GEQ, kernels.MASK_LL,
                                         kernels.MASK_NEAR, kernels.MASK_FAR]))
def test_backend_equivalence_convolution(sg, code):
    us, vs = _random_slices(sg, seed=1)
    args = (us, vs, sg.xi_axis, code, 2.0, 0.5, 0.0, np.inf)
    a = kernels.masked_convolution(*args, backend="numba")
    b = kernels.masked_convolution(*args, backend="numpy")
    assert np.abs(a - b).max() < 1e-12 * max(np.abs(a).max(), 1.0)


def test_mask_partitions(sg):
    """geq + ll and near + far each recombine to the full convolution."""
    us, vs = _random_slices(sg, seed=2)

    def conv(code):
        return kernels.masked_convolution(us, vs, sg.xi_axis, code, 2.0, 0.5, 0.0, np.inf)

    full = conv(kernels.MASK_ALL)
    assert np.abs(conv(kernels.MASK_GEQ) + conv(kernels.MASK_LL) - full).max() < 1e-10
    assert np.abs(conv(kernels.MASK_NEAR) + conv(kernels.MASK_FAR) - full).max() < 1e-10


def test_band_mass_backend_equivalence():
    xi = np.array([4.0, 0.0, 0.0])
    lo = np.full(3, -5.0)
    kw = dict(tau=6.0, h=0.4, lo=lo, width=10.0, n=48, e1=-0.5, e2=-0.25)
    a = kernels.band_mass(xi, 1, 1, backend="numba", **kw)
    b = kernels.band_mass(xi, 1, 1, backend="numpy", **kw)
    assert a == pytest.approx(b, rel=1e-12)


def test_band_mass_callable_weight():
    """The numpy path accepts arbitrary weights; constant 1 matches powers 0."""
    xi = np.array([4.0, 0.0, 0.0])
    lo = np.full(3, -5.0)
    kw = dict(tau=6.0, h=0.4, lo=lo, width=10.0, n=48)
    a = kernels.band_mass(xi, 1, 1, e1=0.0, e2=0.0, backend="numpy", **kw)
    b = kernels.band_mass(xi, 1, 1, func=lambda r1, r2: np.ones_like(r1), **kw)
    assert a == pytest.approx(b, rel=1e-12)


def test_unknown_backend(sg):
    us, vs = _random_slices(sg, seed=3)
    with pytest.raises(Exception):
        kernels.masked_convolution(us, vs, sg.xi_axis, 0, 2.0, 0.5, 0.0, np.inf,
                                   backend="fortran")


def test_env_flag_selects_numpy():
    """HALFWAVE_NO_NUMBA forces the fallback and reproduces the same numbers."""
    script = (
        "import numpy as np\n"
        "from halfwave import kernels\n"
        "from halfwave.grid import SpatialGrid\n"
        "assert kernels.active_backend() == 'numpy'\n"
        "sg = SpatialGrid(4, np.pi)\n"
        "rng = np.random.default_rng(0)\n"
        "u = rng.standard_normal((1, 4, 4, 4)) + 0j\n"
        "out = kernels.masked_convolution(u, u, sg.xi_axis, 0, 2.0, 0.5, 0.0, np.inf)\n"
        "print(repr(complex(out.sum())))\n"
    )
    env = dict(os.environ, HALFWAVE_NO_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", script], env=env,
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr

    sg = SpatialGrid(4, np.pi)
    rng = np.random.default_rng(0)
    u = rng.standard_normal((1, 4, 4, 4)) + 0j
    here = kernels.masked_convolution(u, u, sg.xi_axis, 0, 2.0, 0.5, 0.0, np.inf)
    assert complex(here.sum()) == complex(eval(res.stdout.strip()))
