"""
Path simulation for the winding functionals.

Two routes lead to a winding sample ``zeta(t)``:

* the skew-product (time change) route simulates only the radial diffusion,
  accumulates the clock ``A_t`` and draws ``zeta ~ N(0, A_t I_7)``, which is the
  exact law of the winding given the radial path;
* the line-integral route simulates the Brownian motion in the inhomogeneous
  chart and sums the winding form at step midpoints (Stratonovich convention).

Everything is vectorized across a batch of paths; each path reads its own
Philox stream so results do not depend on batching.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from . import geometry, octonion, streams
from .exceptions import DomainError, SimulationError
from .geometry import FLAT, HYPERBOLIC, PROJECTIVE, ModelSpace

logger = logging.getLogger(__name__)


DEFAULT_SEED = 20201019
DEFAULT_DT = 1e-3

# Radii closer than this to a singular endpoint are advanced with a
# semi-implicit step on the 1/r part of the drift.
IMPLICIT_ZONE = 0.1

# A coordinate step may move w by at most this fraction of |w|; longer steps
# are halved up to MAX_REFINEMENTS times.
STEP_SAFETY = 0.5
MAX_REFINEMENTS = 12

CHUNK_STEPS = 1024


class Scheme(Enum):
    EULER_MARUYAMA = 'EulerMaruyama'
    STRATONOVICH_HEUN = 'StratonovichHeun'

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        for scheme in cls:
            if str(value).lower() in (scheme.value.lower(), scheme.name.lower()):
                return scheme
        raise DomainError("unknown scheme %r (choose EulerMaruyama or StratonovichHeun)" % (value,))

    def __str__(self):
        return self.value


class Provenance(Enum):
    TIME_CHANGE = 'TimeChange'
    LINE_INTEGRAL = 'LineIntegral'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SimConfig:
    space: ModelSpace
    t_end: float
    dt: float = DEFAULT_DT
    r0: float = None
    w0: tuple = None
    scheme: Scheme = Scheme.STRATONOVICH_HEUN
    seed: int = DEFAULT_SEED
    r_min: float = geometry.R_MIN
    r_max: float = None
    exact_besq: bool = False
    grid_points: int = 4000
    grid_start: float = 1e-4

    def __post_init__(self):
        space = ModelSpace.coerce(self.space)
        object.__setattr__(self, 'space', space)
        object.__setattr__(self, 'scheme', Scheme.coerce(self.scheme))
        object.__setattr__(self, 'seed', streams.check_seed(self.seed))
        if not self.dt > 0:
            raise DomainError("dt must be positive, got %r" % (self.dt,))
        if not self.t_end >= self.dt:
            raise DomainError("t_end must be at least dt, got t_end=%r dt=%r" % (self.t_end, self.dt))
        if self.r_max is None:
            object.__setattr__(self, 'r_max', geometry.chart_r_max(space))
        if self.exact_besq and space is not FLAT:
            raise DomainError("exact BESQ transitions only exist for the flat space")
        if self.exact_besq and not 0 < self.grid_start < self.t_end:
            raise DomainError("grid_start must lie in (0, t_end)")
        if self.exact_besq and self.grid_points < 2:
            raise DomainError("grid_points must be at least 2")

        if self.w0 is None and self.r0 is None:
            raise DomainError("an initial condition (r0 or w0) is required")
        if self.w0 is not None:
            w0 = octonion.as_components(self.w0)
            if w0.shape != (octonion.DIM,):
                raise DomainError("w0 must have 8 components")
            w_norm = float(octonion.norm(w0))
            if w_norm <= 0:
                raise DomainError("paths are not started from the origin")
            r0 = float(geometry.coord_radius(space, w_norm))
            if self.r0 is not None and not np.isclose(r0, self.r0, rtol=1e-9, atol=1e-12):
                raise DomainError("r0=%r disagrees with |w0| (distance %r)" % (self.r0, r0))
            object.__setattr__(self, 'w0', tuple(float(c) for c in w0))
            object.__setattr__(self, 'r0', r0 if self.r0 is None else float(self.r0))
        else:
            geometry.check_radius(space, self.r0)
            object.__setattr__(self, 'r0', float(self.r0))
            w0 = geometry.coord_point(space, self.r0)
            object.__setattr__(self, 'w0', tuple(float(c) for c in w0))
        if not self.r_min < self.r0 < space.radial_upper - self.r_min:
            raise DomainError("r0=%r is not strictly inside the radial domain" % (self.r0,))

    @property
    def n_steps(self):
        if self.exact_besq:
            return self.grid_points
        return max(1, int(round(self.t_end / self.dt)))

    def times(self):
        if self.exact_besq:
            return log_time_grid(self.t_end, self.grid_points, self.grid_start)
        return np.arange(self.n_steps + 1) * self.dt

    def start_point(self):
        return np.array(self.w0)

    def replace(self, **changes):
        return replace(self, **changes)


def log_time_grid(t_end, n_points, t_start):
    """0 followed by n_points log-spaced times from t_start to t_end."""
    return np.concatenate(([0.0], np.geomspace(t_start, t_end, n_points)))


def tilt_parameter(space, lambda_norm):
    """The Girsanov tilt that turns E[exp(-|lambda|^2 A_t / 2)] into a moment.

    ``mu = sqrt(9 + |lambda|^2) - 3`` for the flat and projective spaces, the pair
    ``(a, b) = (-3 + nu, -3 - nu)`` for the hyperbolic space.
    """
    space = ModelSpace.coerce(space)
    nu = np.sqrt(9.0 + float(lambda_norm) ** 2)
    if space is HYPERBOLIC:
        return (nu - 3.0, -3.0 - nu)
    return nu - 3.0


def tilted_radial_drift(space, tilt, r):
    """Drift of the radial diffusion under a Girsanov tilt (None for the untilted law)."""
    return _RadialModel(space, tilt).drift(np.asarray(r, dtype=float))


def _is_null_tilt(tilt):
    if tilt is None:
        return True
    return not np.any(np.atleast_1d(np.asarray(tilt, dtype=float)))


class _RadialModel(object):
    """Drift of the (possibly tilted) radial diffusion without domain checks."""

    def __init__(self, space, tilt=None):
        self.space = space = ModelSpace.coerce(space)
        self.upper = space.radial_upper
        self.tilt = None if _is_null_tilt(tilt) else tilt
        if space is HYPERBOLIC:
            if self.tilt is None:
                self.kappa = 3.5
                self.drift = lambda r: 7.0 / np.tanh(2.0 * r)
            else:
                a, b = (float(x) for x in self.tilt)
                self.kappa = a + 3.5
                self.drift = lambda r: (a + 3.5) / np.tanh(r) + (b + 3.5) * np.tanh(r)
        else:
            mu = 0.0 if self.tilt is None else float(self.tilt)
            self.kappa = 3.5 + mu
            if space is FLAT:
                self.drift = lambda r: (3.5 + mu) / r
            else:
                self.drift = lambda r: (7.0 + 2.0 * mu) / np.tan(2.0 * r)
        if not self.kappa > 0:
            raise DomainError("the tilted radial drift must still repel the origin (got %r)" % (self.tilt,))

    def implicit_low(self, r, dB, dt):
        # Solve r' = c + kappa dt / r' for the singular part, explicit for the rest.
        c = r + (self.drift(r) - self.kappa / r) * dt + dB
        return 0.5 * (c + np.sqrt(c * c + 4.0 * self.kappa * dt))

    def implicit_high(self, r, dB, dt):
        s = self.upper - r
        c = s + (-self.drift(r) - self.kappa / s) * dt - dB
        return self.upper - 0.5 * (c + np.sqrt(c * c + 4.0 * self.kappa * dt))

    def step(self, r, dB, dt, scheme):
        with np.errstate(all='ignore'):
            b0 = self.drift(r)
            new = r + b0 * dt + dB
            if scheme is Scheme.STRATONOVICH_HEUN:
                inside = (new > 0) & (new < self.upper)
                b1 = self.drift(np.where(inside, new, r))
                new = np.where(inside, r + 0.5 * (b0 + b1) * dt + dB, new)
            low = (r < IMPLICIT_ZONE) | ~(new > 0)
            if np.any(low):
                new[low] = self.implicit_low(r[low], dB[low], dt)
            if self.space.is_compact:
                high = (self.upper - r < IMPLICIT_ZONE) | ~(new < self.upper)
                if np.any(high):
                    new[high] = self.implicit_high(r[high], dB[high], dt)
        return new


def _clock_rate(space, r):
    if space is FLAT:
        return 1.0 / r ** 2
    if space is PROJECTIVE:
        return 4.0 / np.sin(2.0 * r) ** 2
    return 4.0 / np.sinh(2.0 * r) ** 2


def _check_radial_domain(space, r, r_min, t, path_indices):
    bad = ~(r > r_min) | ~(r < space.radial_upper - r_min)
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise SimulationError("radial path left (%g, %s)" % (r_min, "pi/2 - r_min" if space.is_compact else "inf"),
                              exit_time=t, path_index=int(path_indices[first]))


def _brownian_chunk(generators, n_steps, coarsen, dt, width=None):
    """Standard Brownian increments of step dt for every path, drawn at dt / coarsen."""
    shape = (n_steps * coarsen,) if width is None else (n_steps * coarsen, width)
    draws = np.stack([g.standard_normal(shape) for g in generators])
    if coarsen > 1:
        draws = draws.reshape((len(generators), n_steps, coarsen) + draws.shape[2:]).sum(axis=2)
    return draws * np.sqrt(dt / coarsen)


@dataclass(frozen=True)
class RadialPath:
    space: ModelSpace
    times: np.ndarray
    r: np.ndarray
    clock: np.ndarray = None
    path_index: int = 0
    seed: int = None
    tilt: object = None

    def __post_init__(self):
        object.__setattr__(self, 'space', ModelSpace.coerce(self.space))
        if len(self.times) != len(self.r):
            raise DomainError("times and r must have the same length")
        if self.clock is None:
            object.__setattr__(self, 'clock', cumulative_clock(self.space, self.times, self.r))

    @property
    def t_end(self):
        return float(self.times[-1])

    @property
    def clock_end(self):
        return float(self.clock[-1])


@dataclass(frozen=True)
class WindingSample:
    zeta: np.ndarray
    t_end: float
    clock_end: float
    provenance: Provenance
    seed: int = None
    path_index: int = None
    scheme: Scheme = None
    dt: float = None


@dataclass
class WindingBatch:
    """Winding samples of several paths, stored column-wise."""

    zeta: np.ndarray
    clock: np.ndarray
    t_end: float
    provenance: Provenance
    path_indices: np.ndarray
    seed: int = None
    scheme: Scheme = None
    dt: float = None
    r_end: np.ndarray = None
    switched_at: np.ndarray = None

    def __len__(self):
        return len(self.path_indices)

    def __getitem__(self, i):
        return WindingSample(zeta=self.zeta[i].copy(), t_end=self.t_end, clock_end=float(self.clock[i]),
                             provenance=self.provenance, seed=self.seed,
                             path_index=int(self.path_indices[i]), scheme=self.scheme, dt=self.dt)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @classmethod
    def concatenate(cls, batches):
        batches = sorted(batches, key=lambda b: int(b.path_indices[0]) if len(b) else -1)
        batches = [b for b in batches if len(b)]
        if not batches:
            raise DomainError("nothing to concatenate")
        first = batches[0]

        def stack(name):
            parts = [getattr(b, name) for b in batches]
            if any(p is None for p in parts):
                return None
            return np.concatenate(parts)

        return cls(zeta=stack('zeta'), clock=stack('clock'), t_end=first.t_end,
                   provenance=first.provenance, path_indices=stack('path_indices'), seed=first.seed,
                   scheme=first.scheme, dt=first.dt, r_end=stack('r_end'),
                   switched_at=stack('switched_at'))


@dataclass
class RadialBatch:
    space: ModelSpace
    times: np.ndarray
    path_indices: np.ndarray
    r_end: np.ndarray
    clock_end: np.ndarray
    r: np.ndarray = None
    clock: np.ndarray = None
    tilt: object = None
    windings: WindingBatch = None

    def path(self, i, seed=None):
        if self.r is None:
            raise DomainError("trajectories were not kept for this batch")
        return RadialPath(space=self.space, times=self.times, r=self.r[i], clock=self.clock[i],
                          path_index=int(self.path_indices[i]), seed=seed, tilt=self.tilt)


@dataclass
class CoordinatePath:
    space: ModelSpace
    times: np.ndarray
    w: np.ndarray
    zeta: np.ndarray
    r: np.ndarray
    clock: np.ndarray
    switched_at: float = float('nan')


def cumulative_clock(space, times, r):
    """Running trapezoidal clock on the path's own grid."""
    space = ModelSpace.coerce(space)
    rate = geometry.clock_rate(space, np.asarray(r, dtype=float))
    return cumulative_trapezoid(np.atleast_1d(rate), np.asarray(times, dtype=float), initial=0.0)


def accumulate_clock(path):
    """A_t of a complete radial path by the trapezoidal rule on its grid."""
    rate = geometry.clock_rate(path.space, np.asarray(path.r, dtype=float))
    return float(trapezoid(np.atleast_1d(rate), np.asarray(path.times, dtype=float)))


def _time_change_windings(generators, clock):
    normals = np.stack([g.standard_normal(octonion.IMAG_DIM) for g in generators])
    return np.sqrt(clock)[:, np.newaxis] * normals


def simulate_radial_batch(cfg, path_indices, tilt=None, keep_paths=False, coarsen=1, windings=False):
    """Simulate the radial diffusion for each path index.

    ``coarsen`` draws the Brownian motion at ``cfg.dt / coarsen`` and sums it, so
    runs that differ only in ``dt`` and ``coarsen`` share one Brownian draw.
    With ``windings`` the time-change winding of every path is drawn from the
    path's stream after its radial increments.
    """
    path_indices = np.asarray(path_indices, dtype=np.int64)
    if cfg.exact_besq:
        return _besq_batch(cfg, path_indices, tilt, keep_paths, windings)
    coarsen = int(coarsen)
    if coarsen < 1:
        raise DomainError("coarsen must be a positive integer")

    space = cfg.space
    model = _RadialModel(space, tilt)
    generators = streams.path_generators(cfg.seed, path_indices)
    n, n_steps, dt = len(path_indices), cfg.n_steps, cfg.dt
    times = cfg.times()
    logger.debug("radial batch: %s, %d paths from index %s, %d steps", space, n,
                 path_indices[0] if n else '-', n_steps)

    r = np.full(n, cfg.r0)
    clock = np.zeros(n)
    rate = _clock_rate(space, r)
    if keep_paths:
        r_path = np.empty((n, n_steps + 1))
        clock_path = np.empty((n, n_steps + 1))
        r_path[:, 0] = r
        clock_path[:, 0] = 0.0

    step = 0
    while step < n_steps:
        m = min(CHUNK_STEPS, n_steps - step)
        noise = _brownian_chunk(generators, m, coarsen, dt)
        for k in range(m):
            r = model.step(r, noise[:, k], dt, cfg.scheme)
            step += 1
            _check_radial_domain(space, r, cfg.r_min, step * dt, path_indices)
            new_rate = _clock_rate(space, r)
            clock = clock + 0.5 * (rate + new_rate) * dt
            rate = new_rate
            if keep_paths:
                r_path[:, step] = r
                clock_path[:, step] = clock

    batch = RadialBatch(space=space, times=times, path_indices=path_indices, r_end=r, clock_end=clock,
                        r=r_path if keep_paths else None, clock=clock_path if keep_paths else None,
                        tilt=model.tilt)
    if windings:
        batch.windings = WindingBatch(zeta=_time_change_windings(generators, clock), clock=clock,
                                      t_end=float(times[-1]), provenance=Provenance.TIME_CHANGE,
                                      path_indices=path_indices, seed=cfg.seed, scheme=cfg.scheme,
                                      dt=dt, r_end=r)
    return batch


def _besq_batch(cfg, path_indices, tilt, keep_paths, windings):
    """Flat radial paths from exact squared-Bessel transitions on a log grid.

    X = R^2 is BESQ of dimension delta = 8 + 2 mu; over a step h,
    X' = h * chi'^2_delta(X / h), drawn as (Z + sqrt(X/h))^2 + 2 Gamma((delta-1)/2).
    """
    mu = 0.0 if _is_null_tilt(tilt) else float(tilt)
    delta = 8.0 + 2.0 * mu
    if delta <= 2.0:
        raise DomainError("BESQ dimension must exceed 2")
    times = cfg.times()
    steps = np.diff(times)
    generators = streams.path_generators(cfg.seed, path_indices)
    n = len(path_indices)
    normals = np.stack([g.standard_normal(len(steps)) for g in generators])
    gammas = np.stack([g.standard_gamma(0.5 * (delta - 1.0), len(steps)) for g in generators])
    logger.debug("BESQ batch: %d paths, %d log-grid points to t=%g", n, len(steps), times[-1])

    x = np.full(n, cfg.r0 ** 2)
    clock = np.zeros(n)
    rate = 1.0 / x
    if keep_paths:
        r_path = np.empty((n, len(times)))
        clock_path = np.empty((n, len(times)))
        r_path[:, 0] = cfg.r0
        clock_path[:, 0] = 0.0
    r_min_sq = cfg.r_min ** 2
    for j, h in enumerate(steps):
        x = h * ((normals[:, j] + np.sqrt(x / h)) ** 2 + 2.0 * gammas[:, j])
        bad = ~(x > r_min_sq)
        if np.any(bad):
            raise SimulationError("BESQ path reached r_min", exit_time=float(times[j + 1]),
                                  path_index=int(path_indices[np.flatnonzero(bad)[0]]))
        new_rate = 1.0 / x
        clock = clock + 0.5 * (rate + new_rate) * h
        rate = new_rate
        if keep_paths:
            r_path[:, j + 1] = np.sqrt(x)
            clock_path[:, j + 1] = clock

    r = np.sqrt(x)
    batch = RadialBatch(space=FLAT, times=times, path_indices=path_indices, r_end=r, clock_end=clock,
                        r=r_path if keep_paths else None, clock=clock_path if keep_paths else None,
                        tilt=None if mu == 0.0 else mu)
    if windings:
        batch.windings = WindingBatch(zeta=_time_change_windings(generators, clock), clock=clock,
                                      t_end=float(times[-1]), provenance=Provenance.TIME_CHANGE,
                                      path_indices=path_indices, seed=cfg.seed, scheme=cfg.scheme,
                                      dt=None, r_end=r)
    return batch


def simulate_radial(cfg, path_index=0):
    """One trajectory of the radial diffusion with its running clock."""
    return simulate_radial_batch(cfg, [path_index], keep_paths=True).path(0, seed=cfg.seed)


def simulate_tilted_radial(cfg, tilt, path_index=0):
    """One radial trajectory under the Girsanov-tilted measure.

    ``tilt`` is mu for the flat and projective spaces (drift (7 + 2 mu)/(2r),
    resp. (7 + 2 mu) cot 2r) and the pair (a, b) for the hyperbolic space
    (drift (a + 7/2) coth r + (b + 7/2) tanh r).
    """
    _check_tilt_shape(cfg.space, tilt)
    batch = simulate_radial_batch(cfg, [path_index], tilt=tilt, keep_paths=True)
    return batch.path(0, seed=cfg.seed)


def _check_tilt_shape(space, tilt):
    pair = np.ndim(tilt) == 1 and len(tilt) == 2
    if ModelSpace.coerce(space) is HYPERBOLIC and not pair:
        raise DomainError("the hyperbolic tilt is a pair (a, b)")
    if ModelSpace.coerce(space) is not HYPERBOLIC and np.ndim(tilt) != 0:
        raise DomainError("the %s tilt is a single number mu" % space)


def sample_winding_timechange(path, rng):
    """Draw zeta(t) ~ N(0, A_t I_7) given a complete radial path."""
    clock_end = float(path.clock[-1])
    zeta = np.sqrt(clock_end) * rng.standard_normal(octonion.IMAG_DIM)
    return WindingSample(zeta=zeta, t_end=path.t_end, clock_end=clock_end,
                         provenance=Provenance.TIME_CHANGE, seed=path.seed, path_index=path.path_index)


def _as_simulation_error(exc, t, path_indices):
    index = int(path_indices[0]) if len(path_indices) else None
    return SimulationError(str(exc), exit_time=t, path_index=index)


def _in_chart(space, w):
    with np.errstate(invalid='ignore'):
        w_norm = octonion.norm(w)
        inside = np.isfinite(w_norm) & (w_norm > 0.0)
        if space is HYPERBOLIC:
            inside &= w_norm < 1.0
    return inside


def _propose(space, w, dW, dt, scheme):
    """One Euler or Heun step for every row and the mask of acceptable proposals.

    A proposal is refused when it leaves the chart or moves w by more than
    STEP_SAFETY |w|.
    """
    drift, sigma = geometry.coordinate_sde_coeffs(space, w)
    sigma = np.reshape(sigma, (-1, 1))
    if scheme is Scheme.EULER_MARUYAMA:
        new = w + drift * dt + sigma * dW
    else:
        a0 = geometry.stratonovich_drift(space, w)
        guess = w + a0 * dt + sigma * dW
        ok = _in_chart(space, guess)
        new = np.full_like(w, np.nan)
        if np.any(ok):
            _, sigma1 = geometry.coordinate_sde_coeffs(space, guess[ok])
            a1 = geometry.stratonovich_drift(space, guess[ok])
            new[ok] = (w[ok] + 0.5 * (a0[ok] + a1) * dt
                       + 0.5 * (sigma[ok] + np.reshape(sigma1, (-1, 1))) * dW[ok])
    with np.errstate(invalid='ignore'):
        accepted = _in_chart(space, new) & (octonion.norm(new - w) <= STEP_SAFETY * octonion.norm(w))
    return new, accepted


def _refined_step(space, w, dW, dt, scheme, refiners, depth=0):
    """Advance every row over dt, halving refused steps at a Brownian-bridge midpoint.

    Returns the new points, the winding increments and the mask of rows that
    reached the end of the step within MAX_REFINEMENTS halvings.
    """
    new, resolved = _propose(space, w, dW, dt, scheme)
    dzeta = np.zeros((len(w), octonion.IMAG_DIM))
    if np.any(resolved):
        dzeta[resolved] = octonion.winding_form(0.5 * (w[resolved] + new[resolved]), new[resolved] - w[resolved])
    refused = np.flatnonzero(~resolved)
    if not len(refused) or depth >= MAX_REFINEMENTS:
        return new, dzeta, resolved

    sub = [refiners[i] for i in refused]
    bridge = np.stack([g.standard_normal(octonion.DIM) for g in sub])
    first = 0.5 * dW[refused] + 0.5 * np.sqrt(dt) * bridge
    second = dW[refused] - first
    mid, dz_first, ok = _refined_step(space, w[refused], first, 0.5 * dt, scheme, sub, depth + 1)
    end = np.full_like(mid, np.nan)
    dz_second = np.zeros_like(dz_first)
    done = np.zeros(len(refused), dtype=bool)
    if np.any(ok):
        keep = np.flatnonzero(ok)
        end[keep], dz_second[keep], done[keep] = _refined_step(
            space, mid[keep], second[keep], 0.5 * dt, scheme, [sub[i] for i in keep], depth + 1)
    new[refused] = end
    dzeta[refused] = dz_first + dz_second
    resolved[refused] = done
    return new, dzeta, resolved


def simulate_coordinate_batch(cfg, path_indices, keep_paths=False, coarsen=1):
    """Simulate w(t) in the chart and integrate the winding form along it.

    A step that would move w too far is halved at a Brownian-bridge midpoint
    drawn from the path's refinement stream. Once a path's radius exceeds
    ``cfg.r_max``, or a step cannot be resolved within MAX_REFINEMENTS halvings,
    the path continues in the skew-product representation: the radius follows
    its own SDE driven by the first Brownian component and the winding receives
    Gaussian increments of variance dA from the remaining seven.
    """
    path_indices = np.asarray(path_indices, dtype=np.int64)
    space, dt, scheme = cfg.space, cfg.dt, cfg.scheme
    radial = _RadialModel(space)
    generators = streams.path_generators(cfg.seed, path_indices)
    refiners = streams.refinement_generators(cfg.seed, path_indices)
    n, n_steps = len(path_indices), cfg.n_steps
    times = cfg.times()
    logger.debug("coordinate batch: %s, %d paths, %d steps, %s", space, n, n_steps, scheme)

    w = np.tile(cfg.start_point(), (n, 1))
    r = np.full(n, cfg.r0)
    zeta = np.zeros((n, octonion.IMAG_DIM))
    clock = np.zeros(n)
    switched = np.zeros(n, dtype=bool)
    switched_at = np.full(n, np.nan)
    rate = _clock_rate(space, r)
    if keep_paths:
        w_path = np.empty((n, n_steps + 1, octonion.DIM))
        zeta_path = np.empty((n, n_steps + 1, octonion.IMAG_DIM))
        r_path = np.empty((n, n_steps + 1))
        clock_path = np.empty((n, n_steps + 1))
        w_path[:, 0], zeta_path[:, 0], r_path[:, 0], clock_path[:, 0] = w, zeta, r, clock

    step = 0
    while step < n_steps:
        m = min(CHUNK_STEPS, n_steps - step)
        noise = _brownian_chunk(generators, m, coarsen, dt, width=octonion.DIM)
        for k in range(m):
            dW = noise[:, k]
            t = (step + 1) * dt
            new_r = r.copy()
            new_zeta = zeta.copy()
            active = np.flatnonzero(~switched)
            if len(active):
                try:
                    w_new, dz, resolved = _refined_step(space, w[active], dW[active], dt, scheme,
                                                        [refiners[i] for i in active])
                    done = active[resolved]
                    w[done] = w_new[resolved]
                    new_r[done] = geometry.coord_radius(space, octonion.norm(w[done]))
                except DomainError as exc:
                    raise _as_simulation_error("coordinate path left the chart: %s" % exc, t,
                                               path_indices[active])
                new_zeta[done] += dz[resolved]
                stuck = active[~resolved]
                if len(stuck):
                    logger.debug("%d path(s) could not resolve the step at t=%g; continuing by time change",
                                 len(stuck), t)
                    switched[stuck] = True
                    switched_at[stuck] = t - dt
                    w[stuck] = np.nan
            if np.any(switched):
                new_r[switched] = radial.step(r[switched], dW[switched, 0], dt, scheme)
            _check_radial_domain(space, new_r, cfg.r_min, t, path_indices)

            new_rate = _clock_rate(space, new_r)
            d_clock = 0.5 * (rate + new_rate) * dt
            if np.any(switched):
                gauss = dW[switched, 1:] / np.sqrt(dt)
                new_zeta[switched] += np.sqrt(d_clock[switched])[:, np.newaxis] * gauss
            clock = clock + d_clock
            rate = new_rate
            r, zeta = new_r, new_zeta

            leaving = ~switched & (r > cfg.r_max)
            if np.any(leaving):
                logger.debug("%d path(s) passed r_max=%g at t=%g; continuing by time change",
                             int(leaving.sum()), cfg.r_max, t)
                switched |= leaving
                switched_at[leaving] = t
                w[leaving] = np.nan
            step += 1
            if keep_paths:
                w_path[:, step], zeta_path[:, step] = w, zeta
                r_path[:, step], clock_path[:, step] = r, clock

    windings = WindingBatch(zeta=zeta, clock=clock, t_end=float(times[-1]), provenance=Provenance.LINE_INTEGRAL,
                            path_indices=path_indices, seed=cfg.seed, scheme=scheme, dt=dt, r_end=r,
                            switched_at=switched_at)
    paths = None
    if keep_paths:
        paths = [CoordinatePath(space=space, times=times, w=w_path[i], zeta=zeta_path[i], r=r_path[i],
                                clock=clock_path[i], switched_at=float(switched_at[i])) for i in range(n)]
    return windings, paths


def simulate_coordinate(cfg, path_index=0):
    """One chart trajectory and its line-integral winding sample."""
    windings, paths = simulate_coordinate_batch(cfg, [path_index], keep_paths=True)
    return paths[0], windings[0]


__all__ = [
    'Scheme', 'Provenance', 'SimConfig', 'RadialPath', 'WindingSample', 'WindingBatch', 'RadialBatch',
    'CoordinatePath', 'log_time_grid', 'tilt_parameter', 'tilted_radial_drift', 'simulate_radial_batch',
    'simulate_radial', 'simulate_tilted_radial', 'sample_winding_timechange', 'simulate_coordinate_batch',
    'simulate_coordinate', 'accumulate_clock', 'cumulative_clock', 'DEFAULT_SEED', 'DEFAULT_DT',
]

