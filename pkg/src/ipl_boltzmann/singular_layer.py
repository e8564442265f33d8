"""
Grazing layer of b_s in the rescaled angle psi = theta * sqrt(s), s -> inf.

With h(zeta, xi) = 2 zeta + xi (1 - exp(-zeta)) and a = sqrt(2 zeta):

    J(xi)        = int_0^inf (1 - e^-zeta) / (a sqrt(h) (a + sqrt(h))) dzeta
    psi_inf(xi)  = 2 xi J(xi)
    psi_inf'(xi) = int_0^inf (1 - e^-zeta) / h**1.5 dzeta

xi_inf is the inverse of psi_inf, and the layer profile is

    Phi(psi) = xi'(psi) / (xi(psi) psi) + xi'(psi) / (2 psi)
             = 1/psi**2 + 1/(sqrt(pi) psi) + Phi0(psi).

J is always computed from its own integral, so psi_inf(0) = 0 needs no
special case and nothing divides by xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite, invert_monotone

__all__ = [
    "F0",
    "FPRIME0",
    "PSI_PRIME_INF_0",
    "XI_PRIME_0",
    "LayerProfile",
    "f_layer",
    "fprime_zero",
    "h_fn",
    "layer_J",
    "layer_J_prime",
    "layer_profile",
    "phi_layer",
    "phi_layer_regular",
    "psi_inf",
    "psi_inf_prime",
    "xi_inf",
]

# closed-form values at the origin
PSI_PRIME_INF_0 = math.sqrt(math.pi / 2)
XI_PRIME_0 = math.sqrt(2 / math.pi)
F0 = 1.0
FPRIME0 = (math.sqrt(2) - 1) / math.sqrt(2 * math.pi)

_TIGHT = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-16)


def h_fn(zeta, xi):
    """2 zeta + xi (1 - exp(-zeta)); works on scalars and arrays."""
    out = 2.0 * np.asarray(zeta, dtype=float) - xi * np.expm1(-np.asarray(zeta, dtype=float))
    return float(out) if out.ndim == 0 else out


def _check_xi(xi):
    if not xi >= 0:
        raise DomainError(f"xi must be non-negative, got {xi!r}")


def layer_J(xi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    _check_xi(xi)

    def integrand(z):
        n = -np.expm1(-z)
        a = np.sqrt(2.0 * z)
        rh = np.sqrt(2.0 * z + xi * n)
        return n / (a * rh * (a + rh))

    return integrate_semi_infinite(integrand, spec).value


def layer_J_prime(xi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """dJ/dxi, by differentiating under the integral sign."""
    _check_xi(xi)

    def integrand(z):
        n = -np.expm1(-z)
        a = np.sqrt(2.0 * z)
        h = 2.0 * z + xi * n
        rh = np.sqrt(h)
        return -n * n * (a + 2.0 * rh) / (2.0 * a * h * rh * (a + rh) ** 2)

    return integrate_semi_infinite(integrand, spec).value


def psi_inf(xi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return 2.0 * xi * layer_J(xi, spec)


def psi_inf_prime(xi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    _check_xi(xi)

    def integrand(z):
        n = -np.expm1(-z)
        h = 2.0 * z + xi * n
        return n / (h * np.sqrt(h))

    return integrate_semi_infinite(integrand, spec).value


def xi_inf(psi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> tuple[float, float]:
    """(xi_inf(psi), xi_inf'(psi)) with the derivative from the chain rule."""
    if not psi >= 0:
        raise DomainError(f"psi must be non-negative, got {psi!r}")
    if psi == 0.0:
        return 0.0, 1.0 / psi_inf_prime(0.0, spec)
    # psi_inf(xi) ~ sqrt(pi/2) xi near 0 and ~ 2 sqrt(xi) at infinity
    hi = max(2.0 * psi, psi * psi)
    while psi_inf(hi, spec) < psi:
        hi *= 4.0
    x0 = min(psi / PSI_PRIME_INF_0, psi * psi / 4.0)
    xi = invert_monotone(
        lambda t: psi_inf(t, spec), psi, (0.0, hi), spec,
        dg=lambda t: psi_inf_prime(t, spec), x0=x0,
    )
    return xi, 1.0 / psi_inf_prime(xi, spec)


def phi_layer(psi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Layer profile Phi(psi), the s -> inf limit of b_s(cos(psi/sqrt(s)))."""
    if not psi > 0:
        raise DomainError(f"Phi is singular at psi = 0; got psi={psi!r} (use phi_layer_regular)")
    xi, dxi = xi_inf(psi, spec)
    return dxi / (xi * psi) + dxi / (2.0 * psi)


def f_layer(psi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """f(psi) = 2 xi'(psi) J(xi(psi)); f(0) = 1."""
    xi, dxi = xi_inf(psi, spec)
    return 2.0 * dxi * layer_J(xi, spec)


def fprime_zero(spec: QuadratureSpec = _TIGHT) -> float:
    """f'(0) from the quadratures for J(0) and J'(0).

    Differentiating f = 2 xi' J(xi) at 0 with xi'' = -psi''/psi'**3 and
    psi'' (0) = 4 J'(0) gives f'(0) = -J'(0) / (2 J(0)**2).
    """
    j0 = layer_J(0.0, spec)
    return -layer_J_prime(0.0, spec) / (2.0 * j0 * j0)


def _phi0_positive(psi, spec):
    xi, dxi = xi_inf(psi, spec)
    f = 2.0 * dxi * layer_J(xi, spec)
    return ((f - F0 - FPRIME0 * psi) / psi + 0.5 * (dxi - XI_PRIME_0)) / psi


def phi_layer_regular(psi: float, spec: QuadratureSpec = _TIGHT, h: float = 1e-3) -> float:
    """Phi0(psi) = Phi(psi) - 1/psi**2 - 1/(sqrt(pi) psi), continuous on [0, inf).

    Evaluated from the Taylor-remainder form, which avoids subtracting two
    numbers of size 1/psi**2.  At psi = 0 the value is Richardson-extrapolated
    from psi = h and 2h.  Tight quadrature is the default because the
    remainder is divided by psi**2.
    """
    if not psi >= 0:
        raise DomainError(f"psi must be non-negative, got {psi!r}")
    if psi > 0:
        return _phi0_positive(psi, spec)
    return 2.0 * _phi0_positive(h, spec) - _phi0_positive(2.0 * h, spec)


@dataclass(frozen=True)
class LayerProfile:
    psi_grid: np.ndarray
    Phi_values: np.ndarray
    Phi0_values: np.ndarray
    xi_grid: np.ndarray
    xi_prime: np.ndarray


def layer_profile(psis, spec: QuadratureSpec = _TIGHT) -> LayerProfile:
    psis = np.asarray(psis, dtype=float)
    if np.any(psis <= 0):
        raise DomainError("layer grid must be strictly positive")
    xis, dxis, phis, phi0s = [], [], [], []
    for p in psis:
        xi, dxi = xi_inf(float(p), spec)
        xis.append(xi)
        dxis.append(dxi)
        phis.append(dxi / (xi * p) + dxi / (2.0 * p))
        phi0s.append(_phi0_positive(float(p), spec))
    return LayerProfile(psis, np.array(phis), np.array(phi0s), np.array(xis), np.array(dxis))
