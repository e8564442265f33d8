"""
Quadrature and inversion primitives.

Everything here works on plain Python callables.  Integrands passed to the
quadrature routines must accept numpy arrays; the adaptive rule evaluates all
active panels of one refinement round in a single call.

The two quadrature entry points differ only in the change of variables that
makes the integrand smooth before the adaptive Gauss-Kronrod rule sees it:

* ``integrate_endpoint_singular`` maps x = b - u**2, which removes an
  inverse-square-root singularity at the right endpoint.
* ``integrate_semi_infinite`` splits (0, inf) at 1, maps zeta = u**2 on the
  left piece and zeta = 1/v**2 on the tail, so integrands bounded by
  C*min(zeta**-0.5, zeta**-1.5) become bounded on both pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BracketInvalid, InvalidDomain, NonConvergence, NonFiniteIntegrand

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "DEFAULT_SPEC",
    "integrate_endpoint_singular",
    "integrate_semi_infinite",
    "integrate_smooth",
    "invert_monotone",
]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_refinements: int = 50

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")

    def tolerance(self, value: float) -> float:
        return max(self.rel_tol * abs(value), self.abs_tol)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self):
        return float(self.value)


DEFAULT_SPEC = QuadratureSpec()

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15), positive half.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point node set on [-1, 1] and matching weight vectors
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes: xgk[1], xgk[3], xgk[5], xgk[7]
for _k, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_W[_k] = _w
    _GAUSS_W[14 - _k] = _w
_GAUSS_W[7] = _WG[3]

_MAX_PANELS = 200_000


def _adaptive_gk15(F, a, b, spec, initial_panels=8):
    """Vectorised adaptive Gauss-Kronrod on a finite interval [a, b].

    Panels whose Kronrod-Gauss difference is below their share of the
    global tolerance are frozen; the rest are bisected.  The best
    (value, error) pair seen over all rounds is kept, so more refinements can
    never report a larger error.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    length = b - a
    frozen_val = 0.0
    frozen_err = 0.0
    evaluations = 0
    best = None
    for _ in range(spec.max_refinements):
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        with np.errstate(all="ignore"):
            fx = np.asarray(F(x), dtype=float)
        evaluations += fx.size
        if not np.all(np.isfinite(fx)):
            bad = x[~np.isfinite(fx)][0]
            raise NonFiniteIntegrand(f"integrand is not finite at {bad!r}")
        kron = half * (fx @ _KRONROD_W)
        gauss = half * (fx @ _GAUSS_W)
        err = np.abs(kron - gauss)

        value = frozen_val + float(kron.sum())
        total_err = frozen_err + float(err.sum())
        if best is None or total_err <= best.error_estimate:
            best = QuadResult(value, total_err, evaluations)
        else:
            best = QuadResult(best.value, best.error_estimate, evaluations)
        tol = spec.tolerance(value)
        if total_err <= tol:
            return QuadResult(value, total_err, evaluations)

        done = err <= tol * (2.0 * half) / length
        frozen_val += float(kron[done].sum())
        frozen_err += float(err[done].sum())
        left, mid, right = left[~done], mid[~done], right[~done]
        if left.size * 2 > _MAX_PANELS:
            break
        left, right = np.concatenate([left, mid]), np.concatenate([mid, right])
    raise NonConvergence(
        f"quadrature did not reach tolerance within {spec.max_refinements} refinements",
        partial=best,
    )


def integrate_smooth(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """Adaptive quadrature of a bounded integrand on [a, b] with no substitution."""
    if not a < b:
        raise InvalidDomain(f"need a < b, got a={a}, b={b}")
    return _adaptive_gk15(f, a, b, spec)


def integrate_endpoint_singular(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    distance: bool = False,
) -> QuadResult:
    """Integrate f over (a, b) where f may blow up like (b - x)**-0.5 at b.

    With ``distance=True`` f is called with d = b - x instead of x.  The
    distance is then exact (d = u**2), which matters when f needs 1 - x for
    x close to 1.
    """
    if not a < b:
        raise InvalidDomain(f"need a < b, got a={a}, b={b}")
    if distance:
        def F(u):
            return 2.0 * u * f(u * u)
    else:
        def F(u):
            return 2.0 * u * f(b - u * u)
    return _adaptive_gk15(F, 0.0, math.sqrt(b - a), spec)


def integrate_semi_infinite(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """Integrate f over (0, inf) for f = O(zeta**-0.5) at 0 and O(zeta**-1.5) at inf."""
    # both halves share one tolerance budget; each gets half of it
    half_spec = QuadratureSpec(spec.rel_tol / 2, spec.abs_tol / 2, spec.max_refinements)

    def head(u):
        return 2.0 * u * f(u * u)

    def tail(v):
        return 2.0 * f(1.0 / (v * v)) / (v * v * v)

    first = _adaptive_gk15(head, 0.0, 1.0, half_spec)
    second = _adaptive_gk15(tail, 0.0, 1.0, half_spec)
    return QuadResult(
        first.value + second.value,
        first.error_estimate + second.error_estimate,
        first.evaluations + second.evaluations,
    )


def _safe_eval(g, x):
    try:
        y = float(g(x))
    except (ArithmeticError, ValueError):
        return math.inf
    return y if not math.isnan(y) else math.inf


def invert_monotone(
    g: Callable[[float], float],
    target: float,
    bracket: tuple[float, float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    dg: Callable[[float], float] | None = None,
    x0: float | None = None,
    max_iter: int = 200,
) -> float:
    """Solve g(x) = target for a strictly increasing g on ``bracket``.

    Newton steps (when ``dg`` is given) or Illinois false-position steps are
    taken inside a shrinking bracket and replaced by bisection whenever they
    leave it, so convergence never depends on the quality of ``x0``.  An
    upper endpoint where g is infinite or undefined is treated as +inf,
    which lets callers pass half-open brackets such as [0, 1).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketInvalid(f"empty bracket [{lo}, {hi}]")
    tol = spec.tolerance(target)
    g_lo = float(g(lo))
    if abs(g_lo - target) <= tol:
        return lo
    g_hi = _safe_eval(g, hi)
    if abs(g_hi - target) <= tol:
        return hi
    if not (g_lo < target < g_hi):
        raise BracketInvalid(
            f"target {target!r} outside [g(lo), g(hi)] = [{g_lo!r}, {g_hi!r}]"
        )

    x = x0 if x0 is not None and lo < x0 < hi else None
    side = 0
    width = hi - lo
    for it in range(max_iter):
        if x is None and dg is None and math.isfinite(g_hi):
            x = lo + (target - g_lo) * (hi - lo) / (g_hi - g_lo)
        if x is None or not lo < x < hi:
            x = 0.5 * (lo + hi)
        gx = float(g(x))
        r = gx - target
        if abs(r) <= tol:
            return x
        if r < 0:
            lo, g_lo = x, gx
            if side == -1 and dg is None:
                # Illinois: damp the stale end so false position keeps moving
                g_hi = target + 0.5 * (g_hi - target)
            side = -1
        else:
            hi, g_hi = x, gx
            if side == 1 and dg is None:
                g_lo = target + 0.5 * (g_lo - target)
            side = 1
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))):
            return x
        last = x
        x = None
        if it % 3 == 2:
            # every third step must have halved the bracket, else bisect
            if hi - lo > 0.5 * width:
                continue
            width = hi - lo
        if dg is not None:
            slope = float(dg(last))
            if slope > 0 and math.isfinite(slope):
                x = last - r / slope
    raise NonConvergence(f"invert_monotone did not converge for target {target!r}")
