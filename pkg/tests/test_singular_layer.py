import math

import numpy as np
import pytest

from ipl_boltzmann.errors import DomainError
from ipl_boltzmann.kernel import angular_kernel_b, singular_constant_Cs
from ipl_boltzmann.scattering import InteractionParams
from ipl_boltzmann.singular_layer import (
    FPRIME0,
    PSI_PRIME_INF_0,
    XI_PRIME_0,
    f_layer,
    fprime_zero,
    h_fn,
    layer_J,
    layer_profile,
    phi_layer,
    phi_layer_regular,
    psi_inf,
    psi_inf_prime,
    xi_inf,
)


def test_h_examples():
    assert h_fn(0.0, 3.0) == 0.0
    assert h_fn(1.0, 0.0) == 2.0
    assert h_fn(1.0, 2.0) == pytest.approx(2 + 2 * (1 - math.exp(-1)), rel=1e-15)
    z = np.linspace(0, 5, 11)
    for xi in (0.0, 0.7, 30.0):
        h = h_fn(z, xi)
        assert np.all(h >= 2 * z - 1e-15) and np.all(h >= z)


def test_psi_examples():
    assert psi_inf(0.0) == 0.0
    assert psi_inf_prime(0.0) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)
    assert psi_inf(1e4) == pytest.approx(200.0, rel=0.02)
    assert psi_inf_prime(1e4) == pytest.approx(0.01, rel=0.02)
    fd = (psi_inf(1.001) - psi_inf(0.999)) / 0.002
    assert fd == pytest.approx(psi_inf_prime(1.0), abs=1e-5)
    with pytest.raises(DomainError):
        psi_inf(-1.0)


def test_psi_monotone_and_derivative_decreasing():
    xis = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 30)])
    psis = [psi_inf(x) for x in xis]
    dps = [psi_inf_prime(x) for x in xis]
    assert np.all(np.diff(psis) > 0)
    assert min(dps) > 0 and np.all(np.diff(dps) < 0)


def test_xi_examples():
    assert xi_inf(0.0)[0] == 0.0
    assert xi_inf(0.0)[1] == pytest.approx(math.sqrt(2 / math.pi), rel=1e-10)
    assert xi_inf(200.0)[0] == pytest.approx(1e4, rel=0.04)


@pytest.mark.parametrize("psi", [0.1, 1.0, 10.0, 100.0])
def test_inverse_round_trip(psi):
    xi, dxi = xi_inf(psi)
    assert psi_inf(xi) == pytest.approx(psi, abs=1e-8)
    assert dxi == pytest.approx(1 / psi_inf_prime(xi), rel=1e-12)


def test_constants():
    assert XI_PRIME_0 * PSI_PRIME_INF_0 == pytest.approx(1.0)
    assert f_layer(0.0) == pytest.approx(1.0, abs=1e-5)
    assert fprime_zero() == pytest.approx(FPRIME0, abs=1e-5)
    assert fprime_zero() + XI_PRIME_0 / 2 == pytest.approx(1 / math.sqrt(math.pi), abs=1e-5)
    # f'(0) by a finite difference of f itself
    h = 1e-4
    fd = (f_layer(h) - f_layer(0.0)) / h
    assert fd == pytest.approx(FPRIME0, abs=1e-4)


def test_tails():
    xi = 1e4
    assert 0.98 <= math.sqrt(xi) * psi_inf_prime(xi) <= 1.02
    assert 0.98 <= math.sqrt(xi) * layer_J(xi) <= 1.02


def test_phi_examples():
    assert phi_layer(100.0) == pytest.approx(0.25, rel=0.02)
    with pytest.raises(DomainError):
        phi_layer(0.0)
    psi = 1e-2
    lead = 1 / psi ** 2 + 1 / (math.sqrt(math.pi) * psi)
    assert abs(phi_layer(psi) - lead) <= abs(phi_layer_regular(0.0)) + 0.1


def test_phi0_definition_and_continuity():
    assert phi_layer_regular(1.0) == pytest.approx(phi_layer(1.0) - 1 - 1 / math.sqrt(math.pi), abs=1e-8)
    assert abs(phi_layer_regular(1e-2) - phi_layer_regular(1e-3)) < 1e-2
    p0 = phi_layer_regular(0.0)
    assert p0 == pytest.approx(phi_layer_regular(1e-3), abs=1e-3)
    with pytest.raises(DomainError):
        phi_layer_regular(-1.0)


def test_profile_positive():
    prof = layer_profile(np.geomspace(1e-2, 1e2, 15))
    assert np.all(prof.Phi_values > 0)
    assert np.all(np.diff(prof.xi_grid) > 0)
    with pytest.raises(DomainError):
        layer_profile([0.0, 1.0])


def test_matching_one_point():
    s = 1e4
    assert angular_kernel_b(InteractionParams(s), 1 / math.sqrt(s)) == pytest.approx(phi_layer(1.0), rel=0.02)


def test_singular_part_consistent_with_cs():
    # b_s sin(theta) ~ C_s theta^-(1+2/(s-1)); in psi, s C_s -> 1 matches Phi ~ 1/psi^2
    s = 1e4
    assert s * singular_constant_Cs(s) == pytest.approx(1.0, abs=1e-2)
    psi = 1e-2
    assert psi ** 2 * phi_layer(psi) == pytest.approx(1.0, abs=1e-2)
