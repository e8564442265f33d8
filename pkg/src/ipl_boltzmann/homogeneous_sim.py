"""
Particle (DSMC) solver for the spatially homogeneous Boltzmann equation

    df/dt = Q(f, f),    B(g, cos theta) = g**gamma * b(cos theta).

N particles carry the velocity distribution.  Binary collisions are drawn by
majorant/acceptance stepping: candidate pairs are generated at the rate
allowed by the bound (2 v_max)**gamma and accepted with probability
g**gamma / (2 v_max)**gamma.  Within one sub-step every particle takes part in
at most one candidate pair, which keeps the update fully vectorised.

The non-cutoff angular kernel has infinite total mass, so deflection angles
are drawn from b(cos theta) sin(theta) restricted to [theta_min, pi].  That
density has a closed-form cumulative mass in the impact parameter,

    int_theta^pi b sin = 2**(4/(s-1)) * beta(theta)**2 / 2,

so sampling beta**2 uniformly and mapping through theta(beta) is exact up to
table interpolation.

Time is measured in units where the hard-sphere collision frequency of a
unit-temperature Maxwellian is one per particle; every kernel is multiplied by
the same factor RATE_SCALE so runs with different s are comparable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidExponent, IPLError, RateOverflow
from .kernel import HARD_SPHERE_B, momentum_transfer_integral
from .scattering import InteractionParams, ScatteringCurve, _beta_pair_u, phi_deficit, u_of_deficit

__all__ = [
    "CSV_HEADER",
    "INIT_KINDS",
    "RATE_SCALE",
    "AngleSampler",
    "ConfigError",
    "MomentRecord",
    "ParticleEnsemble",
    "SimulationConfig",
    "ConvergenceSweep",
    "build_angle_sampler",
    "convergence_sweep",
    "collide",
    "dsmc_step",
    "entropy_estimate",
    "initial_ensemble",
    "moments",
    "radial_histogram",
    "run_simulation",
]

# hard-sphere equilibrium rate is pi * <g> = pi * 4/sqrt(pi) at T = 1
RATE_SCALE = 1.0 / (4.0 * math.sqrt(math.pi))
CSV_HEADER = ["time", "M0", "M2", "M4", "M6", "px", "py", "pz", "entropy"]
INIT_KINDS = ("bimodal", "anisotropic", "maxwellian")
BIMODAL_TEMPERATURES = (0.1, 10.0)
BIMODAL_WEIGHT = 0.9  # fraction of particles in the first (cold) component
ANISOTROPIC_TEMPERATURES = (1.8, 0.6, 0.6)
HIST_BINS = 64
HIST_RANGE = 12.0
HIST_TIMES = (1.0, 2.0, 4.0)


class ConfigError(IPLError, ValueError):
    pass


@dataclass
class ParticleEnsemble:
    """Velocities of N particles; owns the RNG stream of its run."""

    velocities: np.ndarray
    rng_seed: int
    time: float = 0.0
    rng: np.random.Generator = field(default=None, repr=False)
    collisions: int = 0

    def __post_init__(self):
        v = np.asarray(self.velocities, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("velocities must have shape (N, 3)")
        if v.shape[0] < 2 or v.shape[0] % 2:
            raise ValueError("need an even number N >= 2 of particles")
        self.velocities = v
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    def max_speed(self) -> float:
        return float(np.sqrt(np.max(np.einsum("ij,ij->i", self.velocities, self.velocities))))


def collide(v, v_star, sigma):
    """Post-collision velocities (v', v'_*) for unit vector(s) sigma."""
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    centre = 0.5 * (v + v_star)
    half_g = 0.5 * np.linalg.norm(v - v_star, axis=-1, keepdims=True)
    return centre + half_g * sigma, centre - half_g * sigma


@dataclass(frozen=True)
class AngleSampler:
    """Deflection angles with density proportional to b(cos theta) sin(theta).

    For finite s the table maps r = beta/beta_max in [0, 1] to theta, so that
    r = sqrt(U) with U uniform gives the right law on [theta_min, pi].
    ``total_mass`` is int_{theta_min}^pi b sin dtheta.
    """

    params: InteractionParams
    theta_min: float
    table_r: np.ndarray = field(repr=False)
    table_theta: np.ndarray = field(repr=False)
    total_mass: float
    neglected_momentum: float
    uniform: bool = False

    @property
    def cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(theta ascending, cumulative mass fraction of [theta_min, theta])."""
        theta = self.table_theta[::-1]
        cdf = 1.0 - self.table_r[::-1] ** 2
        return theta, cdf

    @property
    def solid_angle_mass(self) -> float:
        """int over the sphere of b d sigma."""
        return 2.0 * math.pi * self.total_mass

    def theta_of_r(self, r):
        return np.interp(r, self.table_r, self.table_theta)

    def sample_cos(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.uniform:
            return 1.0 - 2.0 * rng.random(n)
        return np.cos(self.theta_of_r(np.sqrt(rng.random(n))))


def build_angle_sampler(params: InteractionParams, theta_min: float = 1e-2,
                        table_size: int = 2000) -> AngleSampler:
    if params.is_hard_sphere:
        return AngleSampler(params, 0.0, np.array([0.0, 1.0]), np.array([math.pi, 0.0]),
                            2.0 * HARD_SPHERE_B, 0.0, uniform=True)
    return _finite_sampler(params.s, float(theta_min), int(table_size))


@lru_cache(maxsize=32)
def _finite_sampler(s, theta_min, table_size):
    if not 0.0 < theta_min <= math.pi / 4:
        raise DomainError("grazing cutoff required for finite s: theta_min must lie in (0, pi/4]")
    params = InteractionParams(s)
    u_min = u_of_deficit(params, 0.5 * theta_min)
    curve = ScatteringCurve.from_grazing_nodes(params, n=table_size, u_min=u_min)
    beta, theta = curve.beta, curve.theta
    # curve is ordered by increasing beta; pin the cutoff node exactly
    beta_max = _beta_pair_u(s, u_min)[0]
    keep = beta < beta_max
    r = np.concatenate([beta[keep] / beta_max, [1.0]])
    th = np.concatenate([theta[keep], [2.0 * phi_deficit(params, u_min)]])
    total = 2.0 ** (4.0 / (s - 1.0)) * beta_max ** 2 / 2.0
    neglected = momentum_transfer_integral(s, theta_min) if s > 3 else math.inf
    return AngleSampler(params, theta_min, r, th, total, neglected)


def _sigma_vectors(n_hat, cos_t, rng):
    """Unit vectors at polar angle theta from n_hat with uniform azimuth."""
    m = n_hat.shape[0]
    helper = np.zeros((m, 3))
    use_x = np.abs(n_hat[:, 2]) > 0.9
    helper[use_x, 0] = 1.0
    helper[~use_x, 2] = 1.0
    e1 = np.cross(helper, n_hat)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(n_hat, e1)
    eps = 2.0 * math.pi * rng.random(m)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    sigma = (cos_t[:, None] * n_hat
             + (sin_t * np.cos(eps))[:, None] * e1
             + (sin_t * np.sin(eps))[:, None] * e2)
    return sigma / np.linalg.norm(sigma, axis=1, keepdims=True)


def dsmc_step(ensemble: ParticleEnsemble, params: InteractionParams, sampler: AngleSampler,
              dt: float, v_max_hint: float) -> ParticleEnsemble:
    """Advance the ensemble by dt; returns a new ensemble sharing the RNG."""
    gamma = params.gamma
    if gamma < 0:
        raise InvalidExponent(f"soft potentials (gamma={gamma:.3g} < 0, s < 5) are not supported")
    if dt < 0:
        raise ValueError("dt must be non-negative")
    v = ensemble.velocities.copy()
    rng = ensemble.rng
    done = ensemble.collisions
    if dt == 0:
        return ParticleEnsemble(v, ensemble.rng_seed, ensemble.time, rng, done)
    n = v.shape[0]
    g_major = (2.0 * v_max_hint) ** gamma
    expected = 0.5 * (n - 1) * RATE_SCALE * sampler.solid_angle_mass * g_major * dt
    n_sub = max(1, math.ceil(expected / (0.5 * (n // 2))))
    per_sub = expected / n_sub
    for _ in range(n_sub):
        k = int(per_sub) + int(rng.random() < per_sub - int(per_sub))
        if k == 0:
            continue
        idx = rng.permutation(n)[: 2 * k]
        i, j = idx[:k], idx[k:]
        rel = v[i] - v[j]
        g = np.sqrt(np.einsum("ij,ij->i", rel, rel))
        p = g ** gamma / g_major
        if np.any(p > 1.0):
            raise RateOverflow(f"acceptance probability {p.max():.4g} > 1; refresh v_max_hint")
        acc = rng.random(k) < p
        i, j, rel, g = i[acc], j[acc], rel[acc], g[acc]
        if i.size == 0:
            continue
        done += int(i.size)
        n_hat = np.zeros_like(rel)
        nz = g > 0
        n_hat[nz] = rel[nz] / g[nz, None]
        n_hat[~nz, 0] = 1.0
        sigma = _sigma_vectors(n_hat, sampler.sample_cos(rng, i.size), rng)
        v[i], v[j] = collide(v[i], v[j], sigma)
    return ParticleEnsemble(v, ensemble.rng_seed, ensemble.time + dt, rng, done)


def moments(ensemble, p: int, weighted: bool = False) -> float:
    """<|v|**p>, or <(1 + |v|**2)**(p/2)> with ``weighted``."""
    if p not in (0, 2, 4, 6):
        raise ValueError("moment order must be one of 0, 2, 4, 6")
    v = ensemble.velocities if isinstance(ensemble, ParticleEnsemble) else np.asarray(ensemble)
    sq = np.einsum("ij,ij->i", v, v)
    if weighted:
        sq = 1.0 + sq
    return float(np.mean(sq ** (p // 2)))


def entropy_estimate(ensemble, bins_per_axis: int = 16) -> float:
    """Histogram plug-in estimate of H(f) = int f ln f (biased; diagnostic only)."""
    if bins_per_axis < 8:
        raise ValueError("bins_per_axis must be at least 8")
    v = ensemble.velocities if isinstance(ensemble, ParticleEnsemble) else np.asarray(ensemble)
    lo, hi = float(v.min()), float(v.max())
    pad = 1e-9 * max(hi - lo, 1.0)
    lo, hi = lo - pad, hi + pad
    counts, _ = np.histogramdd(v, bins=bins_per_axis, range=[(lo, hi)] * 3)
    width = (hi - lo) / bins_per_axis
    prob = counts[counts > 0] / v.shape[0]
    return float(np.sum(prob * np.log(prob / width ** 3)))


def radial_histogram(ensemble, bins: int = HIST_BINS, v_range: float = HIST_RANGE) -> np.ndarray:
    """Probability mass of |v| in equal bins on [0, v_range]; the top bin absorbs the tail."""
    v = ensemble.velocities if isinstance(ensemble, ParticleEnsemble) else np.asarray(ensemble)
    speed = np.minimum(np.linalg.norm(v, axis=1), v_range * (1 - 1e-12))
    counts, _ = np.histogram(speed, bins=bins, range=(0.0, v_range))
    return counts / v.shape[0]


def default_entropy_bins(n: int) -> int:
    return max(8, int(round((n / 10.0) ** (1.0 / 3.0))))


@dataclass(frozen=True)
class SimulationConfig:
    n_particles: int
    exponent_s: object
    theta_min: float
    dt: float
    t_end: float
    init: str
    seed: int
    record_every: int

    KEYS = ("n_particles", "exponent_s", "theta_min", "dt", "t_end", "init", "seed", "record_every")

    def __post_init__(self):
        if isinstance(self.n_particles, bool) or not isinstance(self.n_particles, int):
            raise ConfigError("n_particles must be an integer")
        if self.n_particles < 2 or self.n_particles % 2:
            raise ConfigError("n_particles must be even and at least 2")
        try:
            params = InteractionParams.parse(self.exponent_s)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if not params.is_hard_sphere:
            if not params.s > 5:
                raise ConfigError(f"simulation requires s > 5 (gamma > 0), got s={params.s:g}")
            if not 0.0 < float(self.theta_min) <= math.pi / 4:
                raise ConfigError("grazing cutoff required for finite s: theta_min must lie in (0, pi/4]")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_end >= 0:
            raise ConfigError("t_end must be non-negative")
        if self.init not in INIT_KINDS:
            raise ConfigError(f"init must be one of {INIT_KINDS}, got {self.init!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if isinstance(self.record_every, bool) or not isinstance(self.record_every, int) \
                or self.record_every < 1:
            raise ConfigError("record_every must be a positive integer (steps)")

    @property
    def params(self) -> InteractionParams:
        return InteractionParams.parse(self.exponent_s)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        missing = [k for k in cls.KEYS if k not in data]
        unknown = [k for k in data if k not in cls.KEYS]
        if missing:
            raise ConfigError(f"missing config keys: {missing}")
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        kw = dict(data)
        for key in ("theta_min", "dt", "t_end"):
            if isinstance(kw[key], bool) or not isinstance(kw[key], (int, float)):
                raise ConfigError(f"{key} must be a number")
            kw[key] = float(kw[key])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "SimulationConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.KEYS}

    def replace(self, **changes) -> "SimulationConfig":
        d = self.to_dict()
        d.update(changes)
        return SimulationConfig(**d)


@dataclass
class MomentRecord:
    times: np.ndarray
    M0: np.ndarray
    M2: np.ndarray
    M4: np.ndarray
    M6: np.ndarray
    momentum: np.ndarray
    entropy_est: np.ndarray
    histograms: dict = field(default_factory=dict, repr=False)
    collisions: int = 0

    def rows(self):
        for k in range(len(self.times)):
            yield [self.times[k], self.M0[k], self.M2[k], self.M4[k], self.M6[k],
                   *self.momentum[k], self.entropy_est[k]]

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows():
            w.writerow([repr(float(x)) for x in row])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "MomentRecord":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        data = np.array([[float(x) for x in row] for row in reader if row], dtype=float).reshape(-1, 9)
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4], data[:, 5:8], data[:, 8])

    @property
    def m2_drift(self) -> float:
        return float(np.max(np.abs(self.M2 / self.M2[0] - 1.0)))

    @property
    def momentum_drift(self) -> float:
        return float(np.max(np.abs(self.momentum - self.momentum[0])))


def initial_ensemble(kind: str, n: int, seed: int) -> ParticleEnsemble:
    """Zero-momentum initial data rescaled to <|v|^2> = 3 exactly."""
    rng = np.random.default_rng(seed)
    if kind == "bimodal":
        temps = np.where(rng.random(n) < BIMODAL_WEIGHT, *BIMODAL_TEMPERATURES)
        v = rng.standard_normal((n, 3)) * np.sqrt(temps)[:, None]
    elif kind == "anisotropic":
        v = rng.standard_normal((n, 3)) * np.sqrt(ANISOTROPIC_TEMPERATURES)
    elif kind == "maxwellian":
        v = rng.standard_normal((n, 3))
    else:
        raise ConfigError(f"unknown initial condition {kind!r}")
    v -= v.mean(axis=0)
    v *= math.sqrt(3.0 / np.mean(np.einsum("ij,ij->i", v, v)))
    return ParticleEnsemble(v, seed, 0.0, rng)


def run_simulation(config: SimulationConfig, hist_times=(), entropy_bins: int | None = None) -> MomentRecord:
    """Run one configured simulation; deterministic in ``config.seed``.

    ``hist_times`` lists instants at which a radial histogram of |v| is stored
    in ``record.histograms`` (snapped to the nearest step).
    """
    params = config.params
    sampler = build_angle_sampler(params, config.theta_min)
    ens = initial_ensemble(config.init, config.n_particles, config.seed)
    bins = entropy_bins or default_entropy_bins(config.n_particles)
    hist_steps = {int(round(t / config.dt)): t for t in hist_times}

    rec = {k: [] for k in ("t", "m0", "m2", "m4", "m6", "p", "h")}
    hists = {}

    def record(e):
        rec["t"].append(e.time)
        for p in (0, 2, 4, 6):
            rec[f"m{p}"].append(moments(e, p))
        rec["p"].append(e.velocities.mean(axis=0))
        rec["h"].append(entropy_estimate(e, bins))

    v_max = 1.25 * ens.max_speed()
    record(ens)
    if 0 in hist_steps:
        hists[hist_steps[0]] = radial_histogram(ens)
    for step in range(1, config.n_steps + 1):
        while True:
            try:
                ens_next = dsmc_step(ens, params, sampler, config.dt, v_max)
                break
            except RateOverflow:
                v_max = 1.25 * max(ens.max_speed(), v_max)
        # keep the time axis on the step lattice rather than accumulating dt
        ens = ParticleEnsemble(ens_next.velocities, ens.rng_seed, step * config.dt, ens_next.rng,
                               ens_next.collisions)
        if step % config.record_every == 0 or step == config.n_steps:
            record(ens)
        if step in hist_steps:
            hists[hist_steps[step]] = radial_histogram(ens)
    return MomentRecord(
        np.array(rec["t"]), np.array(rec["m0"]), np.array(rec["m2"]), np.array(rec["m4"]),
        np.array(rec["m6"]), np.array(rec["p"]), np.array(rec["h"]), hists, ens.collisions,
    )


THREADS_ENV = "IPL_BOLTZMANN_THREADS"


def default_workers() -> int:
    """Worker count from $IPL_BOLTZMANN_THREADS, capped at the available cores."""
    cores = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw) if raw else 1
    except ValueError:
        n = 1
    return max(1, min(n, cores))


def _run_one(args):
    config, hist_times = args
    rec = run_simulation(config, hist_times=hist_times)
    hists = np.array([rec.histograms[t] for t in hist_times]) if hist_times else np.zeros((0, HIST_BINS))
    return rec.M4, rec.M6, hists, rec.times


@dataclass
class ConvergenceSweep:
    """Matched-seed comparison of finite-s runs against the hard-sphere baseline.

    ``sup_dM4[k]`` is sup_t |mean M4^s(t) - mean M4^inf(t)| with means over
    seeds; ``hist_l1[k, j]`` is the L1 distance of seed-averaged radial
    histograms at ``hist_times[j]``.  Bootstrap replicates resample seed
    indices jointly for all s (paired bootstrap).
    """

    s_values: list
    seeds: list
    times: np.ndarray
    hist_times: tuple
    sup_dM4: np.ndarray
    hist_l1: np.ndarray
    boot_dM4: np.ndarray = field(repr=False)
    boot_l1: np.ndarray = field(repr=False)
    m6_ratio: np.ndarray = field(repr=False)

    @property
    def sd_dM4(self) -> np.ndarray:
        return self.boot_dM4.std(axis=0, ddof=1)

    def ci_dM4(self, level: float = 0.95) -> np.ndarray:
        a = 50.0 * (1.0 - level)
        return np.percentile(self.boot_dM4, [a, 100.0 - a], axis=0).T

    def gap_z(self) -> np.ndarray:
        """(D_k - D_{k+1}) / bootstrap sd of that difference, consecutive s."""
        d = self.boot_dM4[:, :-1] - self.boot_dM4[:, 1:]
        return (self.sup_dM4[:-1] - self.sup_dM4[1:]) / d.std(axis=0, ddof=1)

    def hist_gap_z(self) -> np.ndarray:
        d = self.boot_l1[:, :-1] - self.boot_l1[:, 1:]
        return (self.hist_l1[:-1] - self.hist_l1[1:]) / d.std(axis=0, ddof=1)

    def monotone(self, n_sigma: float = 3.0) -> bool | None:
        """Decrease beyond n_sigma for M4 and every histogram time; None for one s."""
        if len(self.s_values) < 2:
            return None
        ok = bool(np.all(self.gap_z() > n_sigma))
        if self.hist_l1.size:
            ok = ok and bool(np.all(self.hist_gap_z() > n_sigma))
        return ok

    def summary(self) -> dict:
        ci = self.ci_dM4()
        rows = []
        for k, s in enumerate(self.s_values):
            rows.append({
                "s": s,
                "sup_abs_dM4": float(self.sup_dM4[k]),
                "bootstrap_sd": float(self.sd_dM4[k]),
                "ci95": [float(ci[k, 0]), float(ci[k, 1])],
                "hist_l1": {str(t): float(v) for t, v in zip(self.hist_times, self.hist_l1[k])},
                "m6_max_over_running_max": float(self.m6_ratio[k]),
            })
        out = {"seeds": list(self.seeds), "rows": rows}
        verdict = self.monotone()
        if verdict is not None:
            out["gap_z_M4"] = [float(z) for z in self.gap_z()]
            out["gap_z_hist"] = self.hist_gap_z().tolist()
            out["monotone_decreasing"] = verdict
        return out


def _m6_excess(m6):
    # largest ratio of M6 to the running maximum of the earlier records
    run_max = np.maximum.accumulate(m6)
    return float(np.max(m6[1:] / run_max[:-1])) if m6.size > 1 else 1.0


def convergence_sweep(s_values, base: SimulationConfig, seeds, hist_times=HIST_TIMES,
                      n_boot: int = 1000, workers: int | None = None,
                      boot_seed: int = 0) -> ConvergenceSweep:
    """Run every s and the hard-sphere baseline over the same seeds."""
    s_values = list(s_values)
    for s in s_values:
        params = InteractionParams.parse(s)
        if params.gamma < 0:
            raise InvalidExponent(f"soft potentials (s={params.s:g} < 5) are not supported")
    seeds = list(seeds)
    labels = ["hard_sphere"] + s_values
    hist_times = tuple(t for t in hist_times if t <= base.t_end)
    jobs = [(base.replace(exponent_s=s, seed=int(seed)), hist_times) for s in labels for seed in seeds]
    workers = workers or default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    n_s = len(seeds)
    m4 = np.array([r[0] for r in results]).reshape(len(labels), n_s, -1)
    hist = np.array([r[2] for r in results]).reshape(len(labels), n_s, len(hist_times), -1)
    m6_ratio = np.array([max(_m6_excess(results[i * n_s + k][1]) for k in range(n_s))
                         for i in range(1, len(labels))])

    def stat(idx):
        base_m4 = m4[0, idx].mean(axis=0)
        base_h = hist[0, idx].mean(axis=0)
        d = [np.max(np.abs(m4[i, idx].mean(axis=0) - base_m4)) for i in range(1, len(labels))]
        l1 = [np.abs(hist[i, idx].mean(axis=0) - base_h).sum(axis=-1) for i in range(1, len(labels))]
        return np.array(d), np.array(l1).reshape(len(s_values), len(hist_times))

    d0, l0 = stat(np.arange(n_s))
    rng = np.random.default_rng(boot_seed)
    boots = [stat(rng.integers(0, n_s, n_s)) for _ in range(n_boot)]
    times = results[0][3]
    return ConvergenceSweep(s_values, seeds, times, hist_times, d0, l0,
                            np.array([b[0] for b in boots]), np.array([b[1] for b in boots]), m6_ratio)
