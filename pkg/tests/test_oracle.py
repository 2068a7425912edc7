import numpy as np
import pytest

from oscint3 import oracle, problems
from oscint3.asym import gamma_factor, sum_asymptotics
from oscint3.core import DomainShift
from oscint3.oracle import (
    Contour1D,
    QuadratureSpec,
    SingularityTooClose,
    branch_power,
    gamma_tilde,
    kelvin_oracle,
    quad_contour_1d,
    quad_deformed_3d,
    small_loop,
)


# ---------------------------------------------------------------------------
# 1D contour quadrature

def test_small_loop_simple_pole():
    v = quad_contour_1d(lambda w: 1.0 / w, small_loop())
    assert v == pytest.approx(2j * np.pi, abs=1e-10)


def test_indented_line_simple_pole_gaussian():
    # int e^{-w^2}/w over the indented-below line: pi*i + 0 (odd remainder)
    v = quad_contour_1d(lambda w: np.exp(-w * w) / w, gamma_tilde(-1, T=8.0))
    assert v == pytest.approx(1j * np.pi, abs=1e-10)


@pytest.mark.parametrize("mu", [-1.5, -1.0, -0.5, 0.25, 0.5])
def test_contour_confirms_gamma_factor(mu):
    """The universal factor against a direct contour evaluation of
    int w^mu e^{iw} dw with the ends lifted into the upper half plane."""
    contour = gamma_tilde(-1, r=0.5, T=40.0, H=40.0)
    if mu == -1.0:
        f = lambda w: 1.0 / w
    else:
        f = lambda w: branch_power(w, mu)
    v = quad_contour_1d(f, contour, lam=1.0)
    assert v == pytest.approx(gamma_factor(mu), rel=1e-10, abs=1e-10)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(R=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(n=17)
    with pytest.raises(ValueError):
        QuadratureSpec(taper=0.7)
    with pytest.raises(ValueError):
        QuadratureSpec(window="hann")


def test_contour_points_sampling():
    c = gamma_tilde(-1, r=0.5, T=3.0)
    pts = c.points(16)
    assert np.isclose(pts[0], -3.0)
    assert np.isclose(pts[-1], 3.0)
    assert np.min(pts.imag) < -0.4     # the indentation dips below the axis


# ---------------------------------------------------------------------------
# deformed 3D quadrature

def test_quad_deformed_gaussian_closed_form():
    prob, entry = problems.get_problem("gaussian-sp")
    lam = 20.0
    val, err = quad_deformed_3d(prob, lam, QuadratureSpec(R=6.0, n=224))
    want = entry.reference(prob, lam)
    assert abs(val - want) / abs(want) < 1e-5
    assert err < 1e-3 * abs(val)


@pytest.mark.parametrize("name", ["pole-sp", "double-cross"])
def test_quad_deformed_matches_factorized_reference(name):
    prob, entry = problems.get_problem(name)
    lam = 20.0
    val, _ = quad_deformed_3d(prob, lam, entry.default_quad)
    want = entry.reference(prob, lam)
    assert abs(val - want) / abs(want) < 1e-4


def test_quad_deformed_window_independence():
    prob, entry = problems.get_problem("pole-sp")
    lam = 20.0
    a, _ = quad_deformed_3d(prob, lam, QuadratureSpec(R=6.0, n=256, taper=0.15))
    b, _ = quad_deformed_3d(prob, lam, QuadratureSpec(R=6.0, n=256, taper=0.25))
    assert abs(a - b) / abs(a) < 1e-4


def test_quad_deformed_rejects_undeformed_singular_domain():
    # without the imaginary shift the pole sheet meets the domain; depending
    # on where the nodes land this trips either the margin probe or the
    # convergence gate, and both are hard failures
    prob, _ = problems.get_problem("pole-sp")
    spec = QuadratureSpec(R=6.0, n=64, shift=DomainShift(np.zeros(3)))
    with pytest.raises((SingularityTooClose, oracle.NonConvergent)):
        quad_deformed_3d(prob, 20.0, spec)


def test_quad_deformed_agrees_with_asymptotics_gaussian():
    # independent cross-check of the whole pipeline at moderate frequency
    prob, _ = problems.get_problem("gaussian-sp")
    lam = 20.0
    val, _ = quad_deformed_3d(prob, lam, QuadratureSpec(R=6.0, n=224))
    asy, _ = sum_asymptotics(prob, lam)
    assert abs(val - asy) / abs(asy) < 3 / lam


# ---------------------------------------------------------------------------
# Kelvin residue oracle

def test_kelvin_oracle_zero_before_onset():
    assert kelvin_oracle(2.0, 0.5, -10.0, 40.0) == 0j
    assert kelvin_oracle(2.0, 0.5, -0.1, 80.0) == 0j


def test_kelvin_oracle_real_and_symmetric():
    v = kelvin_oracle(2.0, 0.5, 10.0, 20.0)
    assert abs(v.imag) < 1e-12 * abs(v)
    w = kelvin_oracle(2.0, -0.5, 10.0, 20.0)
    assert w == pytest.approx(v, rel=1e-12)


# regression fixtures, frozen from this oracle at (z1, z2, tau) = (2, 0.5, 10)
KELVIN_FIXTURES = {
    20.0: 0.044300469155747604,
    40.0: -0.008431894138480804,
    80.0: 0.011446936593960986,
}


@pytest.mark.parametrize("lam,want", sorted(KELVIN_FIXTURES.items()))
def test_kelvin_oracle_regression(lam, want):
    v = kelvin_oracle(2.0, 0.5, 10.0, lam)
    assert v.real == pytest.approx(want, rel=1e-9)


def test_kelvin_residue_bookkeeping_against_line_quadrature():
    """At small lam*tau the frequency integral converges on a long shifted
    line; its value must match -2*pi*i times the residue sum used by the
    oracle."""
    x1, x2, lam, tau = 0.7, 0.4, 0.5, 1.0
    s2 = np.sqrt(x1 ** 2 + x2 ** 2)
    s = np.sqrt(s2)
    eps = 1e-3
    T = 300.0
    line = Contour1D((("line", -T + 1j * eps, T + 1j * eps),))
    f = lambda w: x1 * w / ((w - x1) * (w * w - s2))
    direct = quad_contour_1d(f, line, lam=-lam * tau)
    res = (x1 ** 2 * np.exp(-1j * lam * x1 * tau) / (x1 ** 2 - s2)
           + x1 * np.exp(-1j * lam * s * tau) / (2 * (s - x1))
           - x1 * np.exp(1j * lam * s * tau) / (2 * (s + x1)))
    want = -2j * np.pi * res
    assert direct == pytest.approx(want, rel=2e-2)


def test_kelvin_oracle_node_refinement():
    # doubling n (which halves the panel width) moves the value very little
    a = kelvin_oracle(3.0, 1.5, 10.0, 40.0)
    b = kelvin_oracle(3.0, 1.5, 10.0, 40.0, QuadratureSpec(R=12.0, n=256))
    assert abs(a - b) < 1e-6 * max(abs(a), 1e-12) + 1e-9
