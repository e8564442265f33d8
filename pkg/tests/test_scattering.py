import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipl_boltzmann.errors import DomainError
from ipl_boltzmann.scattering import (
    HARD_SPHERE,
    InteractionParams,
    ScatteringCurve,
    beta_of_x,
    dphi_dx,
    dphi_dx_at_one,
    phi_deficit,
    phi_of_x,
    root_residual,
    theta_of_beta,
    u_of_beta,
    x_of_beta,
    x_of_phi,
)

P3 = InteractionParams(3.0)
X_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]


def test_params():
    assert InteractionParams(5.0).gamma == 0.0
    assert HARD_SPHERE.gamma == 1.0 and HARD_SPHERE.is_hard_sphere
    assert InteractionParams(1e6).gamma == pytest.approx(1.0, abs=1e-5)
    assert InteractionParams.parse("hard_sphere") == HARD_SPHERE
    assert InteractionParams.parse("7").s == 7.0
    for bad in (2.0, 1.5, -1.0):
        with pytest.raises(DomainError, match="exponent must exceed 2"):
            InteractionParams(bad)
    with pytest.raises(DomainError):
        phi_of_x(HARD_SPHERE, 0.5)


@settings(max_examples=30, deadline=None)
@given(st.floats(2.0001, 1e6))
def test_gamma_range(s):
    g = InteractionParams(s).gamma
    assert -3 < g < 1


def test_phi_examples():
    assert phi_of_x(P3, 0.5) == pytest.approx(math.pi / 4, rel=1e-12)
    assert phi_of_x(InteractionParams(7.0), 0.0) == 0.0
    assert phi_of_x(InteractionParams(1e4), 0.5) == pytest.approx(math.asin(0.5), abs=1e-3)
    with pytest.raises(DomainError):
        phi_of_x(P3, 1.0)
    with pytest.raises(DomainError):
        phi_of_x(P3, -0.1)


def test_dphi_examples():
    assert dphi_dx(P3, 1.0) == pytest.approx(math.pi / 2, rel=1e-10)
    assert dphi_dx(P3, 0.3) == pytest.approx(math.pi / 2, rel=1e-10)
    assert dphi_dx(InteractionParams(7.0), 1.0) == pytest.approx(15 * math.pi / 16, rel=1e-10)
    for s in (4.5, 10.0, 40.0):
        oracle = math.sqrt(math.pi) * math.gamma(s / 2) / math.gamma((s - 1) / 2)
        assert dphi_dx_at_one(s) == pytest.approx(oracle, rel=1e-12)
        assert dphi_dx(InteractionParams(s), 1.0) == pytest.approx(oracle, rel=1e-9)


def test_x_of_phi_examples():
    assert x_of_phi(P3, math.pi / 4) == pytest.approx(0.5, rel=1e-10)
    assert x_of_phi(P3, 0.0) == 0.0
    assert x_of_phi(InteractionParams(1e4), math.pi / 6) == pytest.approx(0.5, abs=1e-3)


def test_beta_examples():
    b, db = beta_of_x(P3, 1 / math.sqrt(2))
    assert b == pytest.approx(1.0, rel=1e-14)
    assert db == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    h = 1e-6
    fd = (beta_of_x(P3, 1 / math.sqrt(2) + h)[0] - beta_of_x(P3, 1 / math.sqrt(2) - h)[0]) / (2 * h)
    assert fd == pytest.approx(db, rel=1e-8)
    assert beta_of_x(InteractionParams(9.0), 0.0) == (0.0, pytest.approx(1.0, rel=1e-15))
    b, db = beta_of_x(InteractionParams(1e4), 0.5)
    assert b == pytest.approx(0.5, abs=1e-3) and db == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(DomainError):
        beta_of_x(P3, 1.0)


def test_x_of_beta_examples():
    assert x_of_beta(P3, 1.0) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert x_of_beta(InteractionParams(12.0), 0.0) == 0.0
    assert x_of_beta(P3, 2.0) == pytest.approx(2 / math.sqrt(5), rel=1e-12)


def test_theta_examples():
    assert theta_of_beta(InteractionParams(8.0), 0.0) == math.pi
    assert theta_of_beta(P3, 1.0) == pytest.approx(math.pi * (1 - 1 / math.sqrt(2)), rel=1e-10)
    assert theta_of_beta(P3, 10.0) == pytest.approx(math.pi * (1 - 10 / math.sqrt(101)), rel=1e-9)


@pytest.mark.parametrize("s", [3.0, 5.0, 7.0, 10.0, 40.0])
def test_round_trips(s):
    p = InteractionParams(s)
    for x in X_GRID:
        assert x_of_phi(p, phi_of_x(p, x)) == pytest.approx(x, abs=1e-8)
        assert x_of_beta(p, beta_of_x(p, x)[0]) == pytest.approx(x, abs=1e-8)


@pytest.mark.parametrize("s", [3.0, 4.0, 7.0, 25.0])
def test_dphi_finite_difference(s):
    p = InteractionParams(s)
    h = 1e-5
    for x in (0.05, 0.3, 0.6, 0.9):
        fd = (phi_of_x(p, x + h) - phi_of_x(p, x - h)) / (2 * h)
        assert fd == pytest.approx(dphi_dx(p, x), rel=1e-5)


@pytest.mark.parametrize("s", [3.0, 6.0, 50.0])
def test_monotone_maps(s):
    p = InteractionParams(s)
    betas = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 40)])
    thetas = [theta_of_beta(p, b) for b in betas]
    assert np.all(np.diff(thetas) < 0)
    phis = [phi_of_x(p, x) for x in np.linspace(0, 0.999, 40)]
    assert np.all(np.diff(phis) > 0)


def test_s3_closed_forms():
    for x in np.linspace(0.0, 0.99, 23):
        assert phi_of_x(P3, x) == pytest.approx(math.pi * x / 2, abs=1e-8)
    for beta in np.geomspace(1e-3, 1e3, 25):
        x = beta / math.sqrt(1 + beta * beta)
        assert x_of_beta(P3, beta) == pytest.approx(x, abs=1e-8)
        assert theta_of_beta(P3, beta) == pytest.approx(math.pi * (1 - x), abs=1e-8)


def test_phi_deficit_consistent():
    p = InteractionParams(7.0)
    for u in (0.5, 0.1, 1e-3):
        assert phi_deficit(p, u) == pytest.approx(math.pi / 2 - phi_of_x(p, 1 - u), rel=1e-9)
    # deep grazing: deficit ~ phi'(1) u
    u = 1e-14
    assert phi_deficit(p, u) == pytest.approx(dphi_dx_at_one(7.0) * u, rel=1e-6)


def test_huge_beta_stays_representable():
    p = InteractionParams(5.0)
    u = u_of_beta(p, 1e20)
    assert 0 < u < 1e-70
    assert abs(root_residual(p, 1e20, u)) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999), st.floats(3.0, 200.0))
def test_integrand_majorant(z, x, s):
    g = 1 - z ** (s - 1) - x * x * (z * z - z ** (s - 1))
    bound = 1 / math.sqrt((1 - z) * (1 - x * x * z * z))
    assert 1 / math.sqrt(g) <= bound * (1 + 1e-12)


def test_curve_invariants():
    p = InteractionParams(7.0)
    curve = ScatteringCurve.from_grazing_nodes(p, n=80, u_min=1e-12)
    assert np.all(np.diff(curve.beta) > 0)
    assert np.all(np.diff(curve.x) > 0)
    assert np.all(np.diff(curve.phi) > 0)
    assert np.all(np.diff(curve.theta) < 0)
    assert np.all(np.abs(curve.residual) <= 1e-10)
    assert curve.theta.max() <= math.pi and curve.theta.min() > 0
    rows = list(curve.rows())
    assert len(rows) == len(curve.beta) and len(rows[0]) == 5
    with pytest.raises(Exception):
        curve.beta = None


def test_curve_from_betas():
    curve = ScatteringCurve.from_betas(P3, [0.0, 0.5, 2.0, 50.0])
    expected = [math.pi * (1 - b / math.sqrt(1 + b * b)) for b in curve.beta]
    np.testing.assert_allclose(curve.theta, expected, atol=1e-9)
    assert np.all(np.abs(curve.residual) <= 1e-10)
