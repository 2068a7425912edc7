import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscint3 import core, kelvin, problems
from oscint3.core import (
    DomainShift,
    IndeterminateSide,
    SingularityComponent,
    TangentialShift,
    bypass_side,
    check_field_derivatives,
    is_desired,
    volume_form,
)

E = np.eye(3)


def test_volume_form_identity():
    assert volume_form(E[0], E[1], E[2]) == 1


def test_volume_form_row_swap():
    assert volume_form(E[1], E[0], E[2]) == -1


def test_volume_form_imaginary_basis():
    v = volume_form(1j * E[0], 1j * E[1], 1j * E[2])
    assert v == pytest.approx(-1j)


finite3 = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


@given(finite3, finite3, finite3, st.floats(-5, 5))
def test_volume_form_alternating_multilinear(a, b, c, s):
    v = volume_form(a, b, c)
    assert volume_form(b, a, c) == pytest.approx(-v, abs=1e-9)
    assert volume_form(s * a, b, c) == pytest.approx(s * v, rel=1e-9, abs=1e-9)
    assert volume_form(a + b, b, c) == pytest.approx(v, rel=1e-9, abs=1e-9)


def _linear_phase(b):
    return core.PhaseSpec(problems.quadratic_field(b=b))


def test_is_desired_aligned():
    sh = DomainShift(np.array([0.1, 0.0, 0.0]))
    assert is_desired(sh, _linear_phase((1, 0, 0)), np.zeros(3)) is True


def test_is_desired_antialigned():
    sh = DomainShift(np.array([-0.1, 0.0, 0.0]))
    assert is_desired(sh, _linear_phase((1, 0, 0)), np.zeros(3)) is False


def test_is_desired_kelvin_shift_needs_deformation():
    # grad G = (z1, z2, -tau) vs eta = (0, 0, eps): product is -tau*eps < 0
    sh = DomainShift(np.array([0.0, 0.0, 1e-3]))
    assert is_desired(sh, _linear_phase((2.0, 1.0, -10.0)), np.zeros(3)) is False


def test_is_desired_tangential_raises():
    sh = DomainShift(np.array([0.0, 0.1, 0.0]))
    with pytest.raises(IndeterminateSide):
        is_desired(sh, _linear_phase((1, 0, 0)), np.zeros(3))


def _kelvin_comps():
    p = kelvin.kelvin_problem(2.0, 2.0, 10.0)
    return p, p.amplitude.components


def test_bypass_side_kelvin_plane_above():
    p, (g1, _) = _kelvin_comps()
    # on the plane varpi = xi1
    assert bypass_side(p.shift, g1, np.array([0.5, 0.3, 0.5])) == +1


def test_bypass_side_kelvin_cone_sign_of_frequency():
    p, (_, g2) = _kelvin_comps()
    up = np.array([1.0, 0.0, 1.0])            # varpi > 0 sheet
    dn = np.array([1.0, 0.0, -1.0])           # varpi < 0 sheet
    assert bypass_side(p.shift, g2, up) == +1
    assert bypass_side(p.shift, g2, dn) == -1


def test_bypass_side_tangential_raises():
    p, (g1, _) = _kelvin_comps()
    tangent_shift = DomainShift(np.array([1e-3, 0.0, 1e-3]))  # along the plane
    with pytest.raises(TangentialShift):
        bypass_side(tangent_shift, g1, np.array([0.5, 0.3, 0.5]))


def test_bypass_side_requires_surface_point():
    p, (g1, _) = _kelvin_comps()
    with pytest.raises(ValueError):
        bypass_side(p.shift, g1, np.array([0.5, 0.3, 0.9]))


def test_bypass_constant_on_plane_sheet():
    p, (g1, _) = _kelvin_comps()
    for a in np.linspace(-2, 2, 20):
        for b in np.linspace(-2, 2, 20):
            assert bypass_side(p.shift, g1, np.array([a, b, a])) == +1


def test_singularity_component_rejects_bad_mu():
    g = problems.quadratic_field(b=(1, 0, 0))
    with pytest.raises(ValueError):
        SingularityComponent(g, 2.0, "bad")
    SingularityComponent(g, -1.0, "pole")
    SingularityComponent(g, -0.5, "branch")


@pytest.mark.parametrize("name", ["gaussian-sp", "pole-sp", "double-cross",
                                  "triple-cross", "cone"])
def test_shipped_fields_pass_derivative_crosscheck(name):
    prob, _ = problems.get_problem(name)
    rng = np.random.default_rng(7)
    box = prob.search_region
    pts = rng.uniform(box.lo, box.hi, size=(100, 3))
    check_field_derivatives(prob.phase.G, pts)
    for c in prob.amplitude.components:
        check_field_derivatives(c.g, pts)


def test_kelvin_fields_pass_derivative_crosscheck():
    prob = kelvin.kelvin_problem(2.0, 2.0, 10.0)
    rng = np.random.default_rng(8)
    pts = rng.uniform(0.5, 2.5, size=(100, 3))  # away from the rho = 0 axis
    check_field_derivatives(prob.phase.G, pts)
    check_field_derivatives(prob.amplitude.smooth_factor, pts)
    for c in prob.amplitude.components:
        check_field_derivatives(c.g, pts)


def test_real_property_of_shipped_fields():
    prob = kelvin.kelvin_problem(1.0, 0.5, 10.0)
    rng = np.random.default_rng(9)
    for _ in range(50):
        x = rng.uniform(0.3, 2.0, size=3)
        for c in prob.amplitude.components:
            v = c.g(x)
            assert abs(np.imag(v)) <= 1e-14 * (1 + abs(np.real(v)))


def test_box_grid_and_exclusion():
    box = core.Box3(np.full(3, -1.0), np.full(3, 1.0),
                    excluded_center=np.zeros(3), excluded_radius=0.3)
    g = box.grid(5)
    assert np.all(np.linalg.norm(g, axis=1) >= 0.3)
    assert not box.contains(np.array([0.1, 0.0, 0.0]))
    assert box.contains(np.array([0.9, 0.9, -0.9]))


def test_empty_box_rejected():
    with pytest.raises(ValueError):
        core.Box3(np.zeros(3), np.zeros(3))
