"""
Boltzmann collision kernel B_s(g, cos theta) = g**gamma * b_s(cos theta).

The angular part is evaluated through the chain rule

    b_s(cos theta) = 1/2 * 2**(4/(s-1)) * beta_s(x) * beta_s'(x) * x_s'(phi) / sin(theta)

with phi = (pi - theta)/2, x = x_s(phi) and x_s'(phi) = 1 / phi_s'(x).  Two
inversions of phi_s are available.  Away from grazing (theta >= 1e-2) x is
found directly from phi_s(x) = phi.  Closer to theta = 0, 1 - x is found from
pi/2 - phi_s(1 - u) = theta/2, where the (1 - x) powers of beta and beta' are
carried analytically; the direct route would lose the leading digits of 1 - x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericsError
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_smooth
from .scattering import (
    InteractionParams,
    _beta_pair_u,
    _dphi_du,
    dphi_dx_at_one,
    u_of_deficit,
    x_of_phi,
)

__all__ = [
    "GRAZING_SWITCH",
    "HARD_SPHERE_B",
    "AngularKernelEval",
    "angular_kernel_b",
    "evaluate_angular_kernel",
    "full_kernel_B",
    "momentum_transfer_integral",
    "singular_constant_Cs",
    "singular_sup_norm",
    "weighted_kernel",
]

GRAZING_SWITCH = 1e-2
HARD_SPHERE_B = 0.25
# below this distance from pi the x -> 0 limit of b is used (error O(delta**2))
_BACKWARD_EPS = 1e-7
_OUTER_SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-13, max_refinements=60)


def _check_theta(theta):
    if not 0.0 < theta <= math.pi * (1 + 1e-15):
        raise DomainError(f"theta must lie in (0, pi], got {theta!r}")


def _b_backward(s, spec):
    # x -> 0: beta ~ x, beta' -> 1, sin(theta) ~ 2 phi_s'(0) x
    d0 = _dphi_du(s, 1.0, spec)
    return 2.0 ** (4.0 / (s - 1.0)) / (4.0 * d0 * d0)


def _b_from_u(s, u, theta, spec):
    beta, dbeta = _beta_pair_u(s, u)
    xprime = 1.0 / _dphi_du(s, u, spec)
    return 0.5 * 2.0 ** (4.0 / (s - 1.0)) * beta * dbeta * xprime / math.sin(theta)


def deflection_u(params: InteractionParams, theta: float, spec: QuadratureSpec = DEFAULT_SPEC,
                 branch: str = "auto") -> float:
    """1 - x_s((pi - theta)/2) by the direct or the grazing inversion."""
    if branch == "auto":
        branch = "grazing" if theta < GRAZING_SWITCH else "direct"
    if branch == "direct":
        return 1.0 - x_of_phi(params, 0.5 * (math.pi - theta), spec)
    if branch == "grazing":
        return u_of_deficit(params, 0.5 * theta, spec)
    raise ValueError(f"unknown branch {branch!r}")


def angular_kernel_b(params: InteractionParams, theta: float, spec: QuadratureSpec = DEFAULT_SPEC,
                     branch: str = "auto") -> float:
    """Angular part b_s(cos theta); 1/4 for hard spheres.

    ``branch`` forces the "direct" or "grazing" inversion (for cross-checks).
    """
    _check_theta(theta)
    if params.is_hard_sphere:
        return HARD_SPHERE_B
    s = params.s
    if math.pi - theta < _BACKWARD_EPS:
        return _b_backward(s, spec)
    u = deflection_u(params, theta, spec, branch)
    return _b_from_u(s, u, theta, spec)


def full_kernel_B(params: InteractionParams, g: float, theta: float,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """B_s(g, cos theta) = g**gamma(s) b_s(cos theta); g/4 for hard spheres."""
    if g < 0:
        raise DomainError(f"relative speed must be non-negative, got {g!r}")
    gamma = params.gamma
    if g == 0.0 and gamma < 0:
        raise DomainError("B is singular at g = 0 for s < 5")
    return g ** gamma * angular_kernel_b(params, theta, spec)


def weighted_kernel(params: InteractionParams, theta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """theta**(1 + 2/(s-1)) * b_s(cos theta) * sin(theta), bounded as theta -> 0."""
    b = angular_kernel_b(params, theta, spec)
    return theta ** params.singular_exponent * b * math.sin(theta)


def wallis_integral(n: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """W_n = int_0^{pi/2} sin(t)**n dt by quadrature."""
    return integrate_smooth(lambda t: np.sin(t) ** n, 0.0, math.pi / 2, spec).value


def singular_constant_Cs(s: float, check: bool = True) -> float:
    """Grazing constant C_s = 2**(4/(s-1))/(s-1) * (phi_s'(1))**(2/(s-1)).

    With ``check`` the Gamma-function value of phi_s'(1) is compared against
    (s-1) * W_{s-1} with the Wallis integral done by quadrature.
    """
    if not s > 2:
        raise DomainError(f"exponent must exceed 2, got s={s!r}")
    if math.isinf(s):
        return 0.0
    d1 = dphi_dx_at_one(s)
    if check:
        wallis = (s - 1.0) * wallis_integral(s - 1.0)
        if abs(wallis - d1) > 1e-8 * d1:
            raise NumericsError(f"Gamma and Wallis forms of phi_s'(1) disagree: {d1!r} vs {wallis!r}")
    return 2.0 ** (4.0 / (s - 1.0)) / (s - 1.0) * d1 ** (2.0 / (s - 1.0))


def singular_sup_norm(s: float, theta_grid, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """max over the grid of theta**(1+2/(s-1)) b_s(cos theta) sin(theta)."""
    if not s >= 3:
        raise DomainError(f"the uniform bound is stated for s >= 3, got s={s!r}")
    grid = np.asarray(theta_grid, dtype=float)
    if grid.size == 0 or grid.min() > 1e-4 * (1 + 1e-12):
        raise ValueError("theta grid must reach down to 1e-4")
    params = InteractionParams(s)
    return max(weighted_kernel(params, float(t), spec) for t in grid)


def momentum_transfer_integral(s: float, theta_max: float = math.pi,
                               spec: QuadratureSpec = _OUTER_SPEC) -> float:
    """int_0^theta_max theta b_s(cos theta) sin(theta) dtheta.

    The leading grazing term C_s theta**(-2/(s-1)) is subtracted under the
    integral and added back in closed form.  Requires s > 3; at s = 3 the
    integrand decays like pi/theta and the integral diverges.
    """
    if math.isinf(s):
        # b = 1/4: int theta sin(theta)/4 = (sin t - t cos t)/4
        return 0.25 * (math.sin(theta_max) - theta_max * math.cos(theta_max))
    if not s > 3:
        raise DomainError(f"momentum-transfer integral diverges for s <= 3, got s={s!r}")
    if not 0.0 < theta_max <= math.pi:
        raise DomainError(f"theta_max must lie in (0, pi], got {theta_max!r}")
    params = InteractionParams(s)
    alpha = 2.0 / (s - 1.0)
    cs = singular_constant_Cs(s, check=False)
    inner = QuadratureSpec(rel_tol=min(1e-11, spec.rel_tol), abs_tol=1e-15)

    def remainder(thetas):
        out = np.empty_like(thetas)
        for idx, t in np.ndenumerate(thetas):
            out[idx] = t * angular_kernel_b(params, t, inner) * math.sin(t) - cs * t ** -alpha
        return out

    body = integrate_smooth(remainder, 0.0, theta_max, spec).value
    return body + cs * theta_max ** (1.0 - alpha) / (1.0 - alpha)


@dataclass(frozen=True)
class AngularKernelEval:
    params: InteractionParams
    theta_grid: np.ndarray
    b_values: np.ndarray
    singular_exponent: float
    C_s: float

    @property
    def weighted(self) -> np.ndarray:
        t = self.theta_grid
        return t ** self.singular_exponent * self.b_values * np.sin(t)


def evaluate_angular_kernel(params: InteractionParams, thetas,
                            spec: QuadratureSpec = DEFAULT_SPEC) -> AngularKernelEval:
    thetas = np.asarray(thetas, dtype=float)
    bs = np.array([angular_kernel_b(params, float(t), spec) for t in thetas])
    cs = 0.0 if params.is_hard_sphere else singular_constant_Cs(params.s)
    return AngularKernelEval(params, thetas, bs, params.singular_exponent, cs)
