"""Tanh-sinh quadrature against beta-function and elementary oracles."""

import math

import pytest

from halfwave.quadrature import tanh_sinh


def _power(p, q):
    """int_0^1 x^p (1-x)^q dx = B(p+1, q+1)."""

    def f(x, da, db):
        return da**p * db**q

    return tanh_sinh(f, 0.0, 1.0)


def _beta(a, b):
    return math.gamma(a) * math.gamma(b) / math.gamma(a + b)


def test_polynomial():
    assert tanh_sinh(lambda x, da, db: x**2, 0.0, 2.0) == pytest.approx(8.0 / 3.0, rel=1e-13)


def test_constant_interval():
    assert tanh_sinh(lambda x, da, db: 1.0, -3.0, 5.0) == pytest.approx(8.0, rel=1e-13)


def test_empty_interval():
    assert tanh_sinh(lambda x, da, db: 1.0, 1.0, 1.0) == 0.0


@pytest.mark.parametrize("p,q", [(-0.5, 0.0), (-0.5, -0.5), (0.5, -0.5), (2.0, -0.9)])
def test_beta_oracle(p, q):
    assert _power(p, q) == pytest.approx(_beta(p + 1, q + 1), rel=1e-10)


def test_sqrt_singularity_pi():
    """int_{-1}^{1} (1-x^2)^{-1/2} dx = pi."""

    def f(x, da, db):
        return 1.0 / math.sqrt(da * db)

    assert tanh_sinh(f, -1.0, 1.0) == pytest.approx(math.pi, rel=1e-12)


def test_endpoint_distance_accuracy():
    """The supplied distances stay accurate where naive subtraction underflows."""
    seen = []

    def f(x, da, db):
        seen.append(da)
        return da ** (-0.5)

    tanh_sinh(f, 0.0, 1.0)
    assert min(seen) < 1e-30  # nodes cluster far below float subtraction range
    assert all(d > 0 for d in seen)


def test_smooth_oscillatory():
    assert tanh_sinh(lambda x, da, db: math.sin(x), 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)
