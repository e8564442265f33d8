"""
Classical two-body scattering for the repulsive potential U(r) = r**-(s-1).

The orbit is described by three monotone maps for fixed s:

    beta  (rescaled impact parameter)  ->  x in [0, 1)  ->  phi in [0, pi/2)

with deviation angle theta = pi - 2*phi.  x is the positive root of
1 - x**2 - (x/beta)**(s-1) = 0 and

    phi_s(x) = x * int_0^1 dz / sqrt(g(z)),
    g(z)     = (1 - x**2)(1 - z**(s-1)) + x**2 (1 - z**2).

Grazing collisions live at x -> 1, so internally every map is written in
terms of u = 1 - x.  With u carried exactly, 1 - x**2 = u(2 - u) has no
cancellation, and the complementary angle pi/2 - phi (= theta/2) is computed
from its own integral instead of as a difference of two numbers near pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_endpoint_singular, invert_monotone

__all__ = [
    "HARD_SPHERE",
    "InteractionParams",
    "ScatteringCurve",
    "beta_of_x",
    "dphi_dx",
    "dphi_dx_at_one",
    "phi_deficit",
    "phi_of_x",
    "theta_of_beta",
    "u_of_beta",
    "u_of_deficit",
    "root_residual",
    "x_of_beta",
    "x_of_phi",
]

X_MAX = 1.0 - 1e-12


@dataclass(frozen=True)
class InteractionParams:
    """Potential exponent s; ``s = inf`` stands for hard spheres."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if math.isnan(s) or not s > 2:
            raise DomainError(f"exponent must exceed 2, got s={self.s!r}")
        object.__setattr__(self, "s", s)

    @classmethod
    def hard_sphere(cls) -> "InteractionParams":
        return cls(math.inf)

    @classmethod
    def parse(cls, value) -> "InteractionParams":
        """Accept a number, a numeric string, or ``"hard_sphere"``."""
        if isinstance(value, str):
            key = value.strip().lower().replace("-", "_")
            if key in ("hard_sphere", "hs", "inf", "infinity"):
                return cls.hard_sphere()
            try:
                value = float(key)
            except ValueError:
                raise DomainError(f"cannot parse exponent {value!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DomainError(f"cannot parse exponent {value!r}")
        return cls(float(value))

    @property
    def is_hard_sphere(self) -> bool:
        return math.isinf(self.s)

    @property
    def gamma(self) -> float:
        """Velocity exponent (s - 5)/(s - 1); 1 for hard spheres."""
        if self.is_hard_sphere:
            return 1.0
        return (self.s - 5.0) / (self.s - 1.0)

    @property
    def singular_exponent(self) -> float:
        if self.is_hard_sphere:
            return 1.0
        return 1.0 + 2.0 / (self.s - 1.0)

    def label(self) -> str:
        return "hard_sphere" if self.is_hard_sphere else f"{self.s:g}"


HARD_SPHERE = InteractionParams.hard_sphere()


def _finite(params: InteractionParams) -> float:
    if params.is_hard_sphere:
        raise DomainError("scattering maps are undefined for hard spheres; use the kernel directly")
    return params.s


def _pieces(s, u, w):
    """Shared building blocks of the orbit integrands.

    u = 1 - x, w = 1 - z (array).  Returns (q, one_m_z2, one_m_zs1, g) with
    q = 1 - x**2, one_m_z2 = 1 - z**2, one_m_zs1 = 1 - z**(s-1).
    """
    q = u * (2.0 - u)
    x2 = (1.0 - u) ** 2
    lz = np.log1p(-w)
    one_m_z2 = w * (2.0 - w)
    one_m_zs1 = -np.expm1((s - 1.0) * lz)
    g = q * one_m_zs1 + x2 * one_m_z2
    return q, lz, one_m_z2, one_m_zs1, g


def _check_x(x, allow_one=False):
    if not (0.0 <= x <= 1.0) or (x == 1.0 and not allow_one):
        raise DomainError(f"x must lie in [0, 1{']' if allow_one else ')'}, got {x!r}")


def phi_of_x(params: InteractionParams, x: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Half the supplement of the deviation angle, phi_s(x)."""
    s = _finite(params)
    _check_x(x)
    if x == 0.0:
        return 0.0
    u = 1.0 - x

    def integrand(w):
        return 1.0 / np.sqrt(_pieces(s, u, w)[-1])

    return x * integrate_endpoint_singular(integrand, 0.0, 1.0, spec, distance=True).value


def phi_deficit(params: InteractionParams, u: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """pi/2 - phi_s(1 - u), accurate to full relative precision as u -> 0.

    Equals theta/2.  Uses

        pi/2 - phi = q * int (z**2 - z**(s-1)) / (a sqrt(g) (a + sqrt(g))) dz
                     + u * int dz / sqrt(g),      a = sqrt(1 - z**2).
    """
    s = _finite(params)
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u = 1 - x must lie in [0, 1], got {u!r}")
    if u == 0.0:
        return 0.0

    def integrand(w):
        q, lz, one_m_z2, _, g = _pieces(s, u, w)
        z2_m_zs1 = -np.exp(2.0 * lz) * np.expm1((s - 3.0) * lz)
        a = np.sqrt(one_m_z2)
        rg = np.sqrt(g)
        return q * z2_m_zs1 / (a * rg * (a + rg)) + u / rg

    return integrate_endpoint_singular(integrand, 0.0, 1.0, spec, distance=True).value


def _dphi_du(s, u, spec):
    def integrand(w):
        _, _, _, one_m_zs1, g = _pieces(s, u, w)
        return one_m_zs1 / g ** 1.5

    return integrate_endpoint_singular(integrand, 0.0, 1.0, spec, distance=True).value


def dphi_dx(params: InteractionParams, x: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Derivative phi_s'(x); finite up to and including x = 1."""
    s = _finite(params)
    _check_x(x, allow_one=True)
    return _dphi_du(s, 1.0 - x, spec)


def dphi_dx_at_one(s: float) -> float:
    """Closed form phi_s'(1) = sqrt(pi) Gamma(s/2) / Gamma((s-1)/2)."""
    return math.sqrt(math.pi) * math.exp(math.lgamma(s / 2.0) - math.lgamma((s - 1.0) / 2.0))


def _beta_pair_u(s, u):
    q = u * (2.0 - u)
    x = 1.0 - u
    qa = q ** (-1.0 / (s - 1.0))
    beta = x * qa
    dbeta = (2.0 / (s - 1.0)) * q ** (-s / (s - 1.0)) + ((s - 3.0) / (s - 1.0)) * qa
    return beta, dbeta


def beta_of_x(params: InteractionParams, x: float) -> tuple[float, float]:
    """(beta_s(x), beta_s'(x)) with beta_s(x) = x (1 - x**2)**(-1/(s-1))."""
    s = _finite(params)
    _check_x(x)
    return _beta_pair_u(s, 1.0 - x)


def x_of_phi(params: InteractionParams, phi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Inverse of phi_of_x on [0, 1 - 1e-12]."""
    s = _finite(params)
    if phi == 0.0:
        return 0.0
    if not 0.0 < phi < math.pi / 2:
        raise DomainError(f"phi must lie in [0, pi/2), got {phi!r}")
    x0 = min(math.sin(phi), 0.999)
    return invert_monotone(
        lambda x: phi_of_x(params, x, spec),
        phi,
        (0.0, X_MAX),
        spec,
        dg=lambda x: _dphi_du(s, 1.0 - x, spec),
        x0=x0,
    )


def u_of_deficit(params: InteractionParams, deficit: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Solve phi_deficit(u) = deficit for u = 1 - x (the grazing-side inverse)."""
    s = _finite(params)
    if deficit == 0.0:
        return 0.0
    if not 0.0 < deficit <= math.pi / 2:
        raise DomainError(f"deficit must lie in [0, pi/2], got {deficit!r}")
    # phi_deficit(u) ~ phi_s'(1) u for small u
    u0 = deficit / dphi_dx_at_one(s)
    return invert_monotone(
        lambda u: phi_deficit(params, u, spec),
        deficit,
        (0.0, 1.0),
        spec,
        dg=lambda u: _dphi_du(s, u, spec),
        x0=u0 if u0 < 1.0 else None,
    )


def u_of_beta(params: InteractionParams, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """1 - x for the root x of 1 - x**2 - (x/beta)**(s-1) = 0.

    Solved for w = -log(u), on which log(beta) is increasing and nearly
    linear in the grazing regime, so huge beta (x within 1e-40 of 1) is fine.
    """
    s = _finite(params)
    if beta < 0 or math.isnan(beta):
        raise DomainError(f"beta must be non-negative, got {beta!r}")
    if beta == 0.0:
        return 1.0

    def log_beta(w):
        u = math.exp(-w)
        return math.log1p(-u) - math.log(u * (2.0 - u)) / (s - 1.0)

    def dlog_beta(w):
        u = math.exp(-w)
        b, db = _beta_pair_u(s, u)
        return u * db / b

    if beta <= 1.0:
        # x stays well below 1 here; solve for x directly
        def beta_x(x):
            return _beta_pair_u(s, 1.0 - x)[0]

        x = invert_monotone(
            beta_x, beta, (0.0, X_MAX), spec,
            dg=lambda x: _beta_pair_u(s, 1.0 - x)[1], x0=beta / (1.0 + beta),
        )
        return 1.0 - x

    target = math.log(beta)
    # log beta(w) >= (w - log 2)/(s - 1) + log(1 - e^-w); pick an upper end beyond the root
    hi = (s - 1.0) * target + math.log(2.0) + 2.0
    if hi > 700.0:
        raise DomainError(f"beta={beta!r} too large for s={s}: 1 - x underflows")
    lo = -math.log1p(-1e-3)  # x = 1e-3, where beta < 1
    w = invert_monotone(log_beta, target, (lo, hi), spec, dg=dlog_beta)
    return math.exp(-w)


def x_of_beta(params: InteractionParams, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return 1.0 - u_of_beta(params, beta, spec)


def theta_of_beta(params: InteractionParams, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Deviation angle theta = pi - 2 phi for rescaled impact parameter beta."""
    u = u_of_beta(params, beta, spec)
    return 2.0 * phi_deficit(params, u, spec)


def root_residual(params: InteractionParams, beta: float, u: float) -> float:
    """1 - x**2 - (x/beta)**(s-1) evaluated at x = 1 - u."""
    s = _finite(params)
    x = 1.0 - u
    if beta == 0.0:
        return 0.0 if x == 0.0 else -math.inf
    return u * (2.0 - u) - (x / beta) ** (s - 1.0)


@dataclass(frozen=True)
class ScatteringCurve:
    """Tabulated beta -> x -> phi -> theta relation for one exponent.

    ``u`` holds 1 - x at full precision; ``x`` is derived from it.
    """

    params: InteractionParams
    beta: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    residual: np.ndarray = field(repr=False)

    @property
    def x(self) -> np.ndarray:
        return 1.0 - self.u

    @classmethod
    def from_betas(cls, params, betas, spec: QuadratureSpec = DEFAULT_SPEC) -> "ScatteringCurve":
        betas = np.sort(np.asarray(betas, dtype=float))
        us = np.array([u_of_beta(params, b, spec) for b in betas])
        return cls._build(params, betas, us, spec)

    @classmethod
    def from_grazing_nodes(
        cls, params, n: int = 200, u_min: float = 1e-10, spec: QuadratureSpec = DEFAULT_SPEC
    ) -> "ScatteringCurve":
        """Nodes logarithmic in 1 - x (dense near grazing) merged with a linear x grid."""
        s = _finite(params)
        us = np.unique(np.concatenate([
            np.geomspace(u_min, 1.0, n),
            1.0 - np.linspace(0.0, 0.9, max(n // 4, 2)),
        ]))[::-1]
        betas = np.array([_beta_pair_u(s, u)[0] if u < 1.0 else 0.0 for u in us])
        return cls._build(params, betas, us, spec)

    @classmethod
    def _build(cls, params, betas, us, spec):
        deficits = np.array([phi_deficit(params, u, spec) for u in us])
        phis = math.pi / 2 - deficits
        thetas = 2.0 * deficits
        res = np.array([root_residual(params, b, u) for b, u in zip(betas, us)])
        return cls(params, betas, us, phis, thetas, res)

    def rows(self):
        for b, x, p, t, r in zip(self.beta, self.x, self.phi, self.theta, self.residual):
            yield float(b), float(x), float(p), float(t), float(r)
