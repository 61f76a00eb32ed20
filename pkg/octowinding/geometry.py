"""
Coordinate geometry of the three octonionic model spaces.

Each space is a radial diffusion with drift ``b(r)`` (the radial part of half
the Laplacian) plus a clock rate, the factor in front of the Laplacian of the
geodesic sphere, that drives the angular Brownian motion. In the inhomogeneous
coordinate ``w`` the flat space uses ``r = |w|``, the projective line
``r = arctan|w|`` and the hyperbolic line ``tanh r = |w|``.

All functions accept scalars or numpy arrays of radii.
"""
from enum import Enum

import numpy as np

from . import octonion
from .exceptions import DomainError


R_MIN = 1e-6
PROJECTIVE_R_MAX = 1.45
HYPERBOLIC_R_MAX = 6.0


class ModelSpace(Enum):
    FLAT = 'flat'
    PROJECTIVE = 'projective'
    HYPERBOLIC = 'hyperbolic'

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError("unknown model space %r (choose flat, projective or hyperbolic)" % (value,))

    @property
    def radial_upper(self):
        return np.pi / 2 if self is ModelSpace.PROJECTIVE else np.inf

    @property
    def is_compact(self):
        return self is ModelSpace.PROJECTIVE

    def __str__(self):
        return self.value


FLAT = ModelSpace.FLAT
PROJECTIVE = ModelSpace.PROJECTIVE
HYPERBOLIC = ModelSpace.HYPERBOLIC


def check_radius(space, r):
    space = ModelSpace.coerce(space)
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0.0)) or np.any(~(r < space.radial_upper)):
        raise DomainError("radius outside the radial domain (0, %s) of the %s space"
                          % ("pi/2" if space.is_compact else "inf", space))
    return space, r


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def radial_drift(space, r):
    """Drift b(r) of dr = b(r) dt + dB for the radial part of Brownian motion."""
    space, r = check_radius(space, r)
    if space is FLAT:
        b = 3.5 / r
    elif space is PROJECTIVE:
        b = 7.0 / np.tan(2.0 * r)
    else:
        b = 7.0 / np.tanh(2.0 * r)
    return _scalar(b)


def clock_rate(space, r):
    """Integrand of the clock A_t that time-changes the angular motion."""
    space, r = check_radius(space, r)
    if space is FLAT:
        rate = 1.0 / r ** 2
    elif space is PROJECTIVE:
        rate = 4.0 / np.sin(2.0 * r) ** 2
    else:
        rate = 4.0 / np.sinh(2.0 * r) ** 2
    return _scalar(rate)


def radial_generator(space, f, r, h=1e-4):
    """Apply 1/2 (f'' + 2 b(r) f') at r by centered differences of step h."""
    r = np.asarray(r, dtype=float)
    second = (f(r + h) - 2.0 * f(r) + f(r - h)) / h ** 2
    first = (f(r + h) - f(r - h)) / (2.0 * h)
    return _scalar(0.5 * (second + 2.0 * radial_drift(space, r) * first))


def coord_radius(space, w_norm):
    """Geodesic distance from the origin of a chart point with |w| = w_norm."""
    space = ModelSpace.coerce(space)
    w_norm = np.asarray(w_norm, dtype=float)
    if np.any(~(w_norm >= 0.0)):
        raise DomainError("|w| must be non-negative")
    if space is FLAT:
        r = w_norm
    elif space is PROJECTIVE:
        if np.any(~np.isfinite(w_norm)):
            raise DomainError("the projective chart excludes the point at infinity")
        r = np.arctan(w_norm)
    else:
        if np.any(~(w_norm < 1.0)):
            raise DomainError("the hyperbolic chart is the open unit ball: |w| must be < 1")
        r = np.arctanh(w_norm)
    return _scalar(r)


def coord_norm(space, r):
    """|w| of a chart point at geodesic distance r (inverse of coord_radius)."""
    space, r = check_radius(space, r)
    if space is FLAT:
        n = r
    elif space is PROJECTIVE:
        n = np.tan(r)
    else:
        n = np.tanh(r)
    return _scalar(n)


def coord_point(space, r, direction=None):
    """The chart point at distance r along a unit direction (e0 by default)."""
    if direction is None:
        direction = octonion.basis(0)
    _, unit = octonion.polar(direction)
    return coord_norm(space, r) * unit


def chart_r_max(space):
    space = ModelSpace.coerce(space)
    if space is PROJECTIVE:
        return PROJECTIVE_R_MAX
    if space is HYPERBOLIC:
        return HYPERBOLIC_R_MAX
    return np.inf


def _chart_radius(space, w):
    w = octonion.as_components(w)
    w_norm = octonion.norm(w)
    if np.any(w_norm <= 0.0):
        raise DomainError("the coordinate SDE is only used away from the origin")
    return coord_radius(space, w_norm)


def coordinate_sde_coeffs(space, w):
    """Ito coefficients of dw = drift dt + diffusion dW in the inhomogeneous chart.

    Returns ``(drift, diffusion)`` where ``drift`` has the shape of ``w`` and
    ``diffusion`` is the scalar factor multiplying the octonionic Brownian
    increment.
    """
    space = ModelSpace.coerce(space)
    w = octonion.as_components(w)
    if space is FLAT:
        return np.zeros_like(w), _scalar(np.ones(w.shape[:-1]))
    r = np.asarray(_chart_radius(space, w))
    if space is PROJECTIVE:
        sigma = 1.0 / np.cos(r) ** 2
        drift = -6.0 * sigma[..., np.newaxis] * w
    else:
        sigma = 1.0 / np.cosh(r) ** 2
        drift = 6.0 * sigma[..., np.newaxis] * w
    return drift, _scalar(sigma)


def stratonovich_drift(space, w):
    """Drift of the same diffusion written as a Stratonovich SDE.

    The noise coefficient is ``sigma(|w|) I`` so the correction is
    ``1/2 sigma grad(sigma)``; it turns the factor 6 into 7 in both curved charts.
    """
    space = ModelSpace.coerce(space)
    w = octonion.as_components(w)
    if space is FLAT:
        return np.zeros_like(w)
    r = np.asarray(_chart_radius(space, w))
    if space is PROJECTIVE:
        return -7.0 / np.cos(r)[..., np.newaxis] ** 2 * w
    return 7.0 / np.cosh(r)[..., np.newaxis] ** 2 * w
