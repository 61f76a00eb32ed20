"""
Monte Carlo estimators and distribution tests for winding samples.

Estimators accept a ``WindingBatch``, a sequence of ``WindingSample`` or a bare
``(n, 7)`` array of windings. Reductions run over samples in path-index order.
"""
import json
import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as scipy_stats

from . import special
from .exceptions import DomainError
from .geometry import FLAT, HYPERBOLIC, PROJECTIVE, ModelSpace
from .octonion import IMAG_DIM
from .sde import WindingBatch

logger = logging.getLogger(__name__)


KS_THRESHOLD = 0.02
COV_REL_TOL = 0.05
COV_OFFDIAG_TOL = 0.1
MIN_GAUSS_SAMPLES = 100


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int

    def within(self, reference, n_se=3.0, extra=0.0):
        return abs(self.value - reference) <= n_se * self.std_error + extra

    def __str__(self):
        return "%.6f +/- %.6f (n=%d)" % (self.value, self.std_error, self.n_samples)


def mc_mean(values):
    values = np.asarray(values, dtype=float).ravel()
    n = len(values)
    if n == 0:
        raise DomainError("cannot average an empty sample")
    if not np.all(np.isfinite(values)):
        raise DomainError("sample contains non-finite values")
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return McEstimate(value=float(values.mean()), std_error=se, n_samples=n)


def winding_arrays(samples):
    """(zeta, clock) arrays; clock is None when it is not known for every sample."""
    if isinstance(samples, WindingBatch):
        return np.asarray(samples.zeta, dtype=float), np.asarray(samples.clock, dtype=float)
    if isinstance(samples, np.ndarray):
        zeta = np.asarray(samples, dtype=float)
        clock = None
    else:
        samples = list(samples)
        if not samples:
            raise DomainError("no winding samples given")
        zeta = np.stack([np.asarray(s.zeta, dtype=float) for s in samples])
        clocks = [s.clock_end for s in samples]
        clock = None if any(c is None for c in clocks) else np.asarray(clocks, dtype=float)
    if zeta.ndim != 2 or zeta.shape[1] != IMAG_DIM:
        raise DomainError("windings must form an (n, 7) array, got shape %r" % (zeta.shape,))
    if len(zeta) == 0:
        raise DomainError("no winding samples given")
    return zeta, clock


def _lambda_vector(lam):
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        # The laws are isotropic; a bare norm is read along the first axis.
        vector = np.zeros(IMAG_DIM)
        vector[0] = float(lam)
        return vector
    if lam.shape != (IMAG_DIM,):
        raise DomainError("lambda must be a norm or a vector of length 7")
    return lam


def mc_charfn(samples, lam, method='auto', scale=1.0):
    """Estimate E exp(i lambda . scale * zeta).

    ``conditional`` averages exp(-|lambda|^2 scale^2 A_t / 2), the conditional
    expectation given the radial path; ``direct`` averages cos(lambda . scale * zeta).
    ``auto`` picks the conditional form whenever clock values are present.
    """
    zeta, clock = winding_arrays(samples)
    vector = _lambda_vector(lam) * scale
    if method == 'auto':
        method = 'direct' if clock is None else 'conditional'
    if method == 'conditional':
        if clock is None:
            raise DomainError("the conditional estimator needs clock values")
        return mc_mean(np.exp(-0.5 * vector.dot(vector) * clock))
    if method == 'direct':
        return mc_mean(np.cos(zeta.dot(vector)))
    raise DomainError("unknown estimator %r" % (method,))


def empirical_cov(samples, scale=1.0):
    zeta, _ = winding_arrays(samples)
    if len(zeta) < 2:
        raise DomainError("the sample covariance needs at least two samples")
    return np.cov(zeta * scale, rowvar=False, ddof=1)


@dataclass
class GaussTestReport:
    ks_per_marginal: list
    cov_matrix: list
    max_offdiag: float
    max_diag_rel_error: float
    passed: bool
    n_samples: int
    ks_threshold: float
    cov_rel_tol: float
    offdiag_tol: float

    def to_dict(self):
        data = asdict(self)
        data['pass'] = data.pop('passed')
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = [
            "gaussian test on %d samples: %s" % (self.n_samples, "PASS" if self.passed else "FAIL"),
            "  KS per marginal: %s (threshold %.3g)" % (
                " ".join("%.4f" % d for d in self.ks_per_marginal), self.ks_threshold),
            "  max diagonal relative error: %.4f (tolerance %.3g)" % (self.max_diag_rel_error, self.cov_rel_tol),
            "  max |off-diagonal correlation error|: %.4f (tolerance %.3g)" % (self.max_offdiag, self.offdiag_tol),
        ]
        return "\n".join(lines)


def gaussian_test(samples, target_cov, ks_threshold=KS_THRESHOLD, cov_rel_tol=COV_REL_TOL,
                  offdiag_tol=COV_OFFDIAG_TOL, scale=1.0):
    """Compare scaled windings with N(0, target_cov) marginal by marginal."""
    zeta, _ = winding_arrays(samples)
    zeta = zeta * scale
    n = len(zeta)
    if n < MIN_GAUSS_SAMPLES:
        raise DomainError("gaussian_test needs at least %d samples, got %d" % (MIN_GAUSS_SAMPLES, n))
    target = np.asarray(target_cov, dtype=float)
    if target.ndim == 0:
        target = float(target) * np.eye(IMAG_DIM)
    if target.shape != (IMAG_DIM, IMAG_DIM):
        raise DomainError("target covariance must be 7x7")
    target_diag = np.diag(target)
    if np.any(~(target_diag > 0)) or np.any(np.linalg.eigvalsh(target) <= 0):
        raise DomainError("target covariance is not positive definite")

    cov = np.cov(zeta, rowvar=False, ddof=1)
    if np.any(~(np.diag(cov) > 0)):
        raise DomainError("sample covariance is degenerate")

    standardized = zeta / np.sqrt(target_diag)
    ks = [float(scipy_stats.kstest(standardized[:, i], 'norm')[0]) for i in range(IMAG_DIM)]
    diag_rel = float(np.max(np.abs(np.diag(cov) - target_diag) / target_diag))
    # Off-diagonal error on the correlation scale of the target, like the standardized KS.
    offdiag = (cov - target) / np.sqrt(np.outer(target_diag, target_diag))
    np.fill_diagonal(offdiag, 0.0)
    max_offdiag = float(np.max(np.abs(offdiag)))
    passed = max(ks) < ks_threshold and diag_rel <= cov_rel_tol and max_offdiag < offdiag_tol
    report = GaussTestReport(ks_per_marginal=ks, cov_matrix=cov.tolist(), max_offdiag=max_offdiag,
                             max_diag_rel_error=diag_rel, passed=bool(passed), n_samples=n,
                             ks_threshold=ks_threshold, cov_rel_tol=cov_rel_tol, offdiag_tol=offdiag_tol)
    logger.debug(report.to_text())
    return report


def stationary_density_check(radii, space):
    """KS distance between long-run projective radii and the sin^7(2r) law."""
    if ModelSpace.coerce(space) is not PROJECTIVE:
        raise DomainError("only the projective radial process has a stationary law")
    radii = np.asarray(radii, dtype=float).ravel()
    if len(radii) == 0:
        raise DomainError("no radii given")
    return float(scipy_stats.kstest(radii, special.stationary_cdf)[0])


def ks_two_sample(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if not len(a) or not len(b):
        raise DomainError("both samples must be nonempty")
    return float(scipy_stats.ks_2samp(a, b)[0])


def girsanov_estimate(space, lam, r_end, r0, t):
    """Estimate E exp(-|lambda|^2 A_t / 2) from endpoints of tilted radial paths."""
    space = ModelSpace.coerce(space)
    if space is FLAT:
        weights = special.flat_girsanov_weight(lam, r0, r_end)
    elif space is PROJECTIVE:
        weights = special.op1_girsanov_weight(lam, r0, r_end, t)
    elif space is HYPERBOLIC:
        weights = special.oh1_girsanov_weight(lam, r0, r_end, t)
    return mc_mean(weights)
