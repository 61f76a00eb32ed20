"""
Closed forms and quadratures for the winding laws.

Modified Bessel functions of real order are summed from their power series in
log space; the flat finite-time transform is an adaptive quadrature against the
Bessel(8) endpoint density; the curved spaces have explicit limits. The
hyperbolic limit is also rebuilt from the tilted moment cascade, which
solves dm_n/dt = c_n m_n - d_n m_{n-2} exactly as a sum of exponentials.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy import integrate, special

from .exceptions import DomainError, QuadratureError, SeriesError
from .geometry import FLAT, HYPERBOLIC, PROJECTIVE, ModelSpace
from .octonion import IMAG_DIM

logger = logging.getLogger(__name__)


MAX_SERIES_TERMS = 500
SERIES_RTOL = 1e-16
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
# The integrand of flat_laplace carries exp(-(r - z)^2 / 2); past z + 12 it is below 1e-30.
QUAD_TAIL = 12.0

BesselSeries = namedtuple('BesselSeries', 'log_value n_terms tail_bound')


def lambda_norm(lam):
    """|lambda| for a scalar norm or an ImVector7."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        return abs(float(lam))
    if lam.shape != (IMAG_DIM,):
        raise DomainError("lambda must be a norm or a vector of length 7, got shape %r" % (lam.shape,))
    return float(np.sqrt(lam.dot(lam)))


def girsanov_index(lam):
    """nu = sqrt(9 + |lambda|^2), the Bessel order reached by the tilt."""
    return float(np.sqrt(9.0 + lambda_norm(lam) ** 2))


def bessel_series(nu, x):
    """Sum I_nu(x) = sum_j (x/2)^(2j+nu) / (Gamma(1+j+nu) j!) in log space.

    Stops once the terms decrease and the last one is below ``SERIES_RTOL`` of the
    partial sum. ``tail_bound`` bounds the relative size of the dropped terms by
    the geometric series of the last term ratio.
    """
    nu, x = float(nu), float(x)
    if not nu >= 0 or not x >= 0:
        raise DomainError("bessel_i needs nu >= 0 and x >= 0, got nu=%r x=%r" % (nu, x))
    if x == 0.0:
        return BesselSeries(0.0 if nu == 0.0 else -np.inf, 1, 0.0)
    j = np.arange(MAX_SERIES_TERMS, dtype=float)
    log_terms = (2.0 * j + nu) * np.log(x / 2.0) - special.gammaln(1.0 + j + nu) - special.gammaln(1.0 + j)
    partial = np.logaddexp.accumulate(log_terms)
    ratio = (x / 2.0) ** 2 / ((j + 1.0) * (j + 1.0 + nu))
    done = (ratio < 1.0) & (log_terms - partial < np.log(SERIES_RTOL))
    if not np.any(done):
        raise SeriesError("Bessel series for nu=%g, x=%g did not converge" % (nu, x),
                          n_terms=MAX_SERIES_TERMS, last_ratio=float(np.exp(log_terms[-1] - partial[-1])))
    k = int(np.argmax(done))
    tail = float(np.exp(log_terms[k] - partial[k]) * ratio[k] / (1.0 - ratio[k]))
    return BesselSeries(float(partial[k]), k + 1, tail)


def log_bessel_i(nu, x):
    return bessel_series(nu, x).log_value


def bessel_i(nu, x):
    """The modified Bessel function I_nu(x) of real order nu >= 0."""
    log_value = log_bessel_i(nu, x)
    if log_value > np.log(np.finfo(float).max):
        raise SeriesError("I_%g(%g) overflows a double" % (nu, x), n_terms=None, last_ratio=None)
    return float(np.exp(log_value))


def hartman_watson_ratio(lambda_norm_, rho, r, t):
    """E_rho[exp(-|lambda|^2 A_t / 2) | R_t = r] = I_nu(rho r / t) / I_3(rho r / t)."""
    if not (rho > 0 and r > 0 and t > 0):
        raise DomainError("hartman_watson_ratio needs rho, r, t > 0")
    nu = girsanov_index(lambda_norm_)
    if nu == 3.0:
        return 1.0
    z = rho * r / t
    return float(np.exp(log_bessel_i(nu, z) - log_bessel_i(3.0, z)))


def bessel8_density(rho, t, y):
    """Transition density of the 8-dimensional Bessel process from rho to y at time t."""
    z = rho * y / t
    log_p = (np.log(y / t) + 3.0 * np.log(y / rho) - (rho - y) ** 2 / (2.0 * t)
             + np.log(special.ive(3, z)))
    return np.exp(log_p)


def _quad(func, upper, what):
    result = integrate.quad(func, 0.0, upper, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
                            full_output=1)
    value, abserr, info = result[:3]
    if len(result) > 3:
        raise QuadratureError("%s did not converge: %s" % (what, result[3]), abserr=abserr,
                              n_evals=info.get('neval'), upper=upper)
    return value, abserr


def flat_laplace(rho, t, lambda_norm_):
    """E_rho[exp(-|lambda|^2 A_t / 2)] for the flat winding at finite t.

    e^{-rho^2/2t} rho^-3 int_0^inf r^4 e^{-r^2/2} t^{3/2} I_nu(rho r / sqrt t) dr,
    integrated in log space with the exponentially scaled Bessel function.
    """
    if not (rho > 0 and t > 0):
        raise DomainError("flat_laplace needs rho > 0 and t > 0")
    nu = girsanov_index(lambda_norm_)
    shift = rho / np.sqrt(t)
    log_const = 1.5 * np.log(t) - 3.0 * np.log(rho) - rho ** 2 / (2.0 * t)

    def integrand(r):
        if r <= 0.0:
            return 0.0
        z = shift * r
        scaled = special.ive(nu, z)
        if scaled <= 0.0:
            return 0.0
        return np.exp(log_const + 4.0 * np.log(r) - r * r / 2.0 + np.log(scaled) + z)

    what = "flat_laplace(rho=%g, t=%g, |lambda|=%g)" % (rho, t, lambda_norm(lambda_norm_))
    upper = shift + QUAD_TAIL
    value, abserr = _quad(integrand, upper, what)
    # E exp(-|lambda|^2 A_t / 2) <= 1; an excess beyond the error estimate means the quadrature is wrong.
    if value > 1.0 + abserr + QUAD_EPSREL:
        raise QuadratureError("%s = %r exceeds 1 beyond its error estimate %.3g" % (what, value, abserr),
                              abserr=abserr, upper=upper)
    return value


def flat_laplace_scaled(rho, t, lambda_norm_):
    """flat_laplace at the limit scaling lambda * sqrt(6 / log t)."""
    if not t > 1:
        raise DomainError("the logarithmic scaling needs t > 1")
    return flat_laplace(rho, t, lambda_norm(lambda_norm_) * np.sqrt(6.0 / np.log(t)))


def flat_limit_charfn(lam):
    return float(np.exp(-0.5 * lambda_norm(lam) ** 2))


def op1_limit_charfn(lam):
    """Limit of E exp(i lambda . zeta(t) / sqrt t) on the projective line: N(0, 14/3 I_7)."""
    return float(np.exp(-7.0 / 3.0 * lambda_norm(lam) ** 2))


def _check_r0(r0):
    if not r0 > 0:
        raise DomainError("r0 must be positive, got %r" % (r0,))


def oh1_correction(lam, r0):
    """A(lambda) of the hyperbolic limit."""
    _check_r0(r0)
    nu = girsanov_index(lam)
    c2 = np.cosh(r0) ** 2
    return c2 ** 2 / 12.0 + (nu - 2.0) * c2 / 60.0 + (lambda_norm(lam) ** 2 - 3.0 * nu + 11.0) / 720.0


def oh1_limit_charfn(lam, r0):
    """lim E exp(i lambda . zeta(t)) on the hyperbolic line (no rescaling)."""
    _check_r0(r0)
    nu = girsanov_index(lam)
    power = np.tanh(r0) ** (nu - 3.0)
    return float(power * (1.0 + (6.0 * nu - 18.0) * oh1_correction(lam, r0) / np.cosh(r0) ** 6))


def oh1_limit_charfn_proof_form(lam, r0):
    """Same limit as the final display of the derivation: tanh^(nu-3) / cosh^6 * (cosh^6 + (6 nu - 18) A)."""
    _check_r0(r0)
    nu = girsanov_index(lam)
    c6 = np.cosh(r0) ** 6
    return float(np.tanh(r0) ** (nu - 3.0) / c6 * (c6 + (6.0 * nu - 18.0) * oh1_correction(lam, r0)))


def cosh_power_rates(a, b, n):
    """(c_n, d_n) with L cosh^n = c_n cosh^n - d_n cosh^(n-2).

    L is the generator of dr = ((a + 7/2) coth r + (b + 7/2) tanh r) dt + dB.
    """
    c = n * n / 2.0 + n * (a + b + 7.0)
    d = n * (n - 1.0) / 2.0 + n * (b + 3.5)
    return c, d


class MomentCascade(object):
    """E^(a,b) cosh^n r(t) for n = 2, 4, 6 as explicit sums of exponentials."""

    ORDERS = (2, 4, 6)

    def __init__(self, a, b, r0):
        _check_r0(r0)
        self.a, self.b, self.r0 = float(a), float(b), float(r0)
        self.rates = {0: 0.0}
        self.coefficients = {0: {0: 1.0}}
        c2_0 = np.cosh(r0) ** 2
        for n in self.ORDERS:
            c_n, d_n = cosh_power_rates(self.a, self.b, n)
            previous = self.coefficients[n - 2]
            coef = {}
            for k, value in previous.items():
                gap = c_n - self.rates[k]
                if gap == 0.0:
                    raise DomainError("moment cascade is resonant for (a, b) = (%g, %g)" % (a, b))
                coef[k] = d_n * value / gap
            coef[n] = c2_0 ** (n // 2) - sum(coef.values())
            self.rates[n] = c_n
            self.coefficients[n] = coef

    def scaled(self, n, t):
        """e^(-c_n t) E cosh^n r(t), finite for every t."""
        rate = self.rates[n]
        return float(sum(value * np.exp((self.rates[k] - rate) * t)
                         for k, value in self.coefficients[n].items()))

    def moment(self, n, t):
        with np.errstate(over='ignore'):
            return float(np.exp(self.rates[n] * t) * self.scaled(n, t))

    def scaled_limit(self, n):
        """lim e^(-c_n t) E cosh^n r(t); requires c_n to be the top rate."""
        rate = self.rates[n]
        if any(self.rates[k] >= rate for k in self.coefficients[n] if k != n):
            raise DomainError("c_%d is not the leading rate of the cascade" % n)
        return self.coefficients[n][n]


def oh1_moment_cascade(a_hat, b_hat, r0, t):
    """The tilted moments (E cosh^2, E cosh^4, E cosh^6) of r(t)."""
    if not t >= 0:
        raise DomainError("t must be non-negative")
    cascade = MomentCascade(a_hat, b_hat, r0)
    return tuple(cascade.moment(n, t) for n in MomentCascade.ORDERS)


def hyperbolic_tilt(lam):
    nu = girsanov_index(lam)
    return -3.0 + nu, -3.0 - nu


def oh1_limit_from_cascade(lam, r0):
    """The hyperbolic limit rebuilt from the cosh^6 moment of the tilted cascade."""
    a_hat, b_hat = hyperbolic_tilt(lam)
    nu = girsanov_index(lam)
    limit = MomentCascade(a_hat, b_hat, r0).scaled_limit(6)
    return float(np.tanh(r0) ** (nu - 3.0) * limit / np.cosh(r0) ** 6)


def flat_girsanov_weight(lam, rho, r_end):
    """(rho / R_t)^mu: under the tilted Bessel law its mean is E exp(-|lambda|^2 A_t / 2)."""
    mu = girsanov_index(lam) - 3.0
    return (rho / np.asarray(r_end, dtype=float)) ** mu


def op1_girsanov_weight(lam, r0, r_end, t):
    """(sin 2r0)^mu e^(-2t(|lambda|^2 + mu)) (sin 2r_t)^(-mu) under the tilted Jacobi law."""
    mu = girsanov_index(lam) - 3.0
    norm_sq = lambda_norm(lam) ** 2
    sin_end = np.sin(2.0 * np.asarray(r_end, dtype=float))
    return np.sin(2.0 * r0) ** mu * np.exp(-2.0 * t * (norm_sq + mu)) * sin_end ** (-mu)


def oh1_girsanov_weight(lam, r0, r_end, t):
    """e^(-24t) (tanh r_t / tanh r0)^(3 - nu) (cosh r_t / cosh r0)^6 under the (a, b) tilt."""
    nu = girsanov_index(lam)
    r_end = np.asarray(r_end, dtype=float)
    log_w = (-24.0 * t + (3.0 - nu) * (np.log(np.tanh(r_end)) - np.log(np.tanh(r0)))
             + 6.0 * (np.log(np.cosh(r_end)) - np.log(np.cosh(r0))))
    return np.exp(log_w)


def stationary_cdf(r):
    """CDF of the density proportional to sin^7(2r) on (0, pi/2).

    With c = cos 2r the antiderivative of sin^7(2r) is (-c + c^3 - 3c^5/5 + c^7/7) / 2,
    and the total mass is 16/35.
    """
    r = np.asarray(r, dtype=float)
    c = np.cos(2.0 * np.clip(r, 0.0, np.pi / 2))
    antiderivative = -c + c ** 3 - 3.0 * c ** 5 / 5.0 + c ** 7 / 7.0
    value = (antiderivative + 16.0 / 35.0) / (32.0 / 35.0)
    return float(value) if value.ndim == 0 else value


def stationary_clock_rate():
    """Mean of 4 / sin^2(2r) under the stationary law; equals 14/3."""
    weighted, _ = integrate.quad(lambda r: 4.0 * np.sin(2.0 * r) ** 5, 0.0, np.pi / 2, epsabs=0.0,
                                 epsrel=1e-13)
    mass, _ = integrate.quad(lambda r: np.sin(2.0 * r) ** 7, 0.0, np.pi / 2, epsabs=0.0, epsrel=1e-13)
    return weighted / mass


def limit_charfn(space, lam, r0=None):
    """Long-time limit of the (suitably scaled) winding characteristic function in each space."""
    space = ModelSpace.coerce(space)
    if space is FLAT:
        return flat_limit_charfn(lam)
    if space is PROJECTIVE:
        return op1_limit_charfn(lam)
    if space is HYPERBOLIC:
        return oh1_limit_charfn(lam, r0)
