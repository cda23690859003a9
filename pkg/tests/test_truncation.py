import numpy as np
import pytest

from beamcontact.discretize import build_grid, build_system, load_vector
from beamcontact.model import BVPSpec, GeneralMonotone, PiecewiseLinearContact
from beamcontact.truncation import fifth_derivative_contact, truncation_vector


def manufactured_cases():
    # (w, w'', w'''', w''''', sup bound of w'''')
    return [
        (
            lambda x: x**5,
            lambda x: 20.0 * x**3,
            lambda x: 120.0 * x,
            lambda s: 120.0 * np.ones_like(np.asarray(s, dtype=float)),
            121.0,
        ),
        (
            lambda x: x**6,
            lambda x: 30.0 * x**4,
            lambda x: 360.0 * x**2,
            lambda s: 720.0 * np.asarray(s, dtype=float),
            361.0,
        ),
        (
            lambda x: np.sin(2.0 * x),
            lambda x: -4.0 * np.sin(2.0 * x),
            lambda x: 16.0 * np.sin(2.0 * x),
            lambda s: 32.0 * np.cos(2.0 * np.asarray(s, dtype=float)),
            17.0,
        ),
    ]


@pytest.mark.parametrize("case", range(3))
def test_manufactured_defect_identity(case):
    # pushing exact nodal values of a smooth w through the scheme leaves a
    # per-row defect that the integral representation must reproduce
    w, w2, w4, w5, bound = manufactured_cases()[case]
    spec = BVPSpec(
        a=0.0, b=1.0,
        alpha1=float(w(0.0)), alpha2=float(w(1.0)),
        beta1=float(w2(0.0)), beta2=float(w2(1.0)),
    )
    rhs = GeneralMonotone(fn=lambda x, y: float(w4(x)), bound=bound)
    grid = build_grid(spec, 9)
    system = build_system(spec, rhs, grid)
    exact = w(grid.interior)
    defect = (
        system.matrix.matvec(exact)
        - load_vector(spec, rhs, grid)
        - grid.h**4 * w4(grid.interior)
    )
    predicted = truncation_vector(grid, w5)
    np.testing.assert_allclose(defect, predicted, rtol=1e-7, atol=1e-12)


def test_quintic_rows_vanish():
    # the scheme is exact through degree five, so a constant fifth
    # derivative must produce a zero remainder in every row
    grid = build_grid(BVPSpec(a=0.0, b=1.0, alpha1=0, alpha2=0, beta1=0, beta2=0), 9)
    tau = truncation_vector(grid, lambda s: np.ones_like(np.asarray(s, dtype=float)))
    assert np.max(np.abs(tau)) < 1e-15


def test_step_fifth_derivative_scales_like_h5():
    spec = BVPSpec(a=0.0, b=1.0, alpha1=0, alpha2=0, beta1=0, beta2=0)

    def w5(s):
        return np.where(np.asarray(s, dtype=float) > 0.5, 1.0, 0.0)

    coarse = np.max(np.abs(truncation_vector(build_grid(spec, 9), w5)))
    fine = np.max(np.abs(truncation_vector(build_grid(spec, 19), w5)))
    # the peak sits on the row centered at the jump: 28 h^5 / 120
    assert coarse == pytest.approx(28.0 * 0.1**5 / 120.0, rel=1e-9)
    assert coarse / fine == pytest.approx(32.0, rel=1e-9)


def test_fifth_derivative_contact_branches():
    contact = PiecewiseLinearContact(
        stiffness=6.0, surface=lambda x: x / 2.0, surface_slope=lambda x: 0.5
    )
    # penetrating: derivative of -K (w - g)
    assert fifth_derivative_contact(contact, 0.2, 1.0, 2.0) == pytest.approx(-6.0 * 1.5)
    # separated: force identically zero
    assert fifth_derivative_contact(contact, 0.2, -1.0, 2.0) == 0.0
    # touching: two-sided average
    assert fifth_derivative_contact(contact, 0.2, 0.1, 2.0) == pytest.approx(-3.0 * 1.5)


def test_fifth_derivative_contact_vectorized():
    contact = PiecewiseLinearContact(
        stiffness=10.0, surface=lambda x: 0.0, surface_slope=lambda x: 0.0
    )
    x = np.array([0.1, 0.2, 0.3])
    w = np.array([1.0, -1.0, 0.0])
    wp = np.array([2.0, 2.0, 2.0])
    out = fifth_derivative_contact(contact, x, w, wp)
    np.testing.assert_allclose(out, [-20.0, 0.0, -10.0])
    assert isinstance(fifth_derivative_contact(contact, 0.1, 1.0, 1.0), float)
