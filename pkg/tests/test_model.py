import math

import numpy as np
import pytest

from beamcontact.model import (
    BVPSpec,
    GeneralMonotone,
    PiecewiseLinearContact,
    as_general_monotone,
    eval_rhs,
    quartic_coefficients,
    quartic_solution,
    rhs_bound,
    validate_rhs,
)


def beam_spec():
    return BVPSpec(a=0.0, b=1.0, alpha1=0.0, alpha2=0.0, beta1=-20.0, beta2=-20.0)


def test_spec_rejects_bad_interval():
    with pytest.raises(ValueError):
        BVPSpec(a=1.0, b=1.0, alpha1=0, alpha2=0, beta1=0, beta2=0)
    with pytest.raises(ValueError):
        BVPSpec(a=2.0, b=1.0, alpha1=0, alpha2=0, beta1=0, beta2=0)


def test_spec_rejects_nonfinite_data():
    with pytest.raises(ValueError):
        BVPSpec(a=0.0, b=np.inf, alpha1=0, alpha2=0, beta1=0, beta2=0)
    with pytest.raises(ValueError):
        BVPSpec(a=0.0, b=1.0, alpha1=np.nan, alpha2=0, beta1=0, beta2=0)


def test_spec_length_and_scale():
    spec = BVPSpec(a=-1.0, b=3.0, alpha1=2.0, alpha2=-0.5, beta1=0.25, beta2=-7.0)
    assert spec.length == 4.0
    assert spec.boundary_scale() == 7.0


def test_contact_force_activation():
    g = lambda x: x / 2.0
    contact = PiecewiseLinearContact(stiffness=100.0, surface=g, surface_slope=lambda x: 0.5)
    # penetrating: linear restoring force
    assert eval_rhs(contact, 0.5, 0.35) == pytest.approx(-100.0 * 0.1)
    # clear of the surface: no force
    assert eval_rhs(contact, 0.5, 0.1) == 0.0
    # exactly touching: activation is strict, force stays zero
    assert eval_rhs(contact, 0.5, 0.25) == 0.0


def test_contact_rejects_negative_stiffness():
    with pytest.raises(ValueError):
        PiecewiseLinearContact(stiffness=-1.0, surface=lambda x: 0.0, surface_slope=lambda x: 0.0)


def test_eval_rhs_general_and_bounds():
    rhs = GeneralMonotone(fn=lambda x, y: -(y**3) + math.cos(x), bound=1.0)
    assert eval_rhs(rhs, 0.0, 0.0) == pytest.approx(1.0)
    assert rhs_bound(rhs) == 1.0
    contact = PiecewiseLinearContact(stiffness=5.0, surface=lambda x: 0.0, surface_slope=lambda x: 0.0)
    assert rhs_bound(contact) == 0.0


def test_eval_rhs_rejects_nonfinite_point():
    contact = PiecewiseLinearContact(stiffness=1.0, surface=lambda x: 0.0, surface_slope=lambda x: 0.0)
    with pytest.raises(ValueError):
        eval_rhs(contact, np.nan, 0.0)
    with pytest.raises(ValueError):
        eval_rhs(contact, 0.0, np.inf)


def test_as_general_monotone_matches_contact():
    contact = PiecewiseLinearContact(
        stiffness=1e4, surface=lambda x: x / 2.0, surface_slope=lambda x: 0.5
    )
    wrapped = as_general_monotone(contact)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(0.0, 1.0)
        y = rng.uniform(-2.0, 2.0)
        assert eval_rhs(wrapped, x, y) == eval_rhs(contact, x, y)
    assert wrapped.bound == 0.0


def test_validate_rhs_contact_clean():
    contact = PiecewiseLinearContact(
        stiffness=1e4, surface=lambda x: x / 2.0, surface_slope=lambda x: 0.5
    )
    report = validate_rhs(contact, beam_spec(), n_samples=500, seed=0)
    assert report.ok
    assert report.monotonicity_violations == 0
    assert report.bound_violations == 0
    assert report.n_samples == 500


def test_validate_rhs_cube_violates_bound_only():
    # -y^3 is non-increasing but blows past any fixed bound for negative y
    rhs = GeneralMonotone(fn=lambda x, y: -(y**3), bound=0.0)
    report = validate_rhs(rhs, beam_spec(), n_samples=500, seed=1)
    assert report.monotonicity_violations == 0
    assert report.bound_violations > 0
    assert not report.ok


def test_validate_rhs_flags_increasing():
    rhs = GeneralMonotone(fn=lambda x, y: y, bound=1e6)
    report = validate_rhs(rhs, beam_spec(), n_samples=200, seed=2)
    assert report.monotonicity_violations > 0


def test_validate_rhs_deterministic():
    rhs = GeneralMonotone(fn=lambda x, y: -(y**3), bound=0.0)
    first = validate_rhs(rhs, beam_spec(), n_samples=300, seed=9)
    second = validate_rhs(rhs, beam_spec(), n_samples=300, seed=9)
    assert first == second


def test_validate_rhs_needs_samples():
    rhs = GeneralMonotone(fn=lambda x, y: 0.0, bound=0.0)
    with pytest.raises(ValueError):
        validate_rhs(rhs, beam_spec(), n_samples=0)


def test_quartic_matches_all_boundary_data():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.uniform(-3.0, 1.0)
        b = a + rng.uniform(0.5, 4.0)
        spec = BVPSpec(
            a=a, b=b,
            alpha1=rng.normal(), alpha2=rng.normal(),
            beta1=rng.normal(), beta2=rng.normal(),
        )
        load = rng.normal()
        c0, c1, c2, c3, c4 = quartic_coefficients(spec, load)
        ln = spec.length
        assert quartic_solution(spec, load, a) == pytest.approx(spec.alpha1, abs=1e-12)
        assert quartic_solution(spec, load, b) == pytest.approx(spec.alpha2, abs=1e-10)
        # second derivative straight from the coefficients
        assert 2 * c2 == pytest.approx(spec.beta1, abs=1e-12)
        assert 2 * c2 + 6 * c3 * ln + 12 * c4 * ln**2 == pytest.approx(spec.beta2, abs=1e-9)
        assert 24 * c4 == pytest.approx(load, abs=1e-12)


def test_quartic_fourth_difference_recovers_load():
    spec = BVPSpec(a=0.0, b=2.0, alpha1=1.0, alpha2=-1.0, beta1=3.0, beta2=-2.0)
    load = 5.0
    h = 1e-2
    x = 1.0
    stencil = (
        quartic_solution(spec, load, x - 2 * h)
        - 4 * quartic_solution(spec, load, x - h)
        + 6 * quartic_solution(spec, load, x)
        - 4 * quartic_solution(spec, load, x + h)
        + quartic_solution(spec, load, x + 2 * h)
    )
    assert stencil / h**4 == pytest.approx(load, rel=1e-4)


def test_quartic_known_midpoint_value():
    # zero deflection ends, curvature -20, no load: 10 x (1 - x) on [0, 1]
    spec = beam_spec()
    assert quartic_solution(spec, 0.0, 0.5) == pytest.approx(2.5)
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(quartic_solution(spec, 0.0, x), 10.0 * x * (1.0 - x), atol=1e-12)


def test_quartic_scalar_and_array_agree():
    spec = beam_spec()
    xs = np.linspace(0.0, 1.0, 7)
    arr = quartic_solution(spec, 2.0, xs)
    for xi, vi in zip(xs, arr):
        assert quartic_solution(spec, 2.0, float(xi)) == vi


def test_quartic_rejects_outside_interval():
    spec = beam_spec()
    with pytest.raises(ValueError):
        quartic_solution(spec, 0.0, 1.5)
    with pytest.raises(ValueError):
        quartic_solution(spec, 0.0, np.array([0.2, -0.3]))
