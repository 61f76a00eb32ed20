"""
Octonion algebra and the octonionic winding form.

Elements are stored as real arrays of shape ``(..., 8)`` holding the
coefficients of ``e0..e7``; every function here broadcasts over the leading
axes so the path engine can work on whole batches at once. ``Octonion`` is a
small immutable value wrapper for interactive and test use.

Multiplication follows ``e_i e_j = -delta_ij e_0 + eps_ijk e_k`` with the
totally antisymmetric ``eps`` equal to 1 on the oriented triples below.
"""
import itertools
import logging

import numpy as np

from .exceptions import DomainError

logger = logging.getLogger(__name__)


ORIENTED_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))

DIM = 8
IMAG_DIM = 7


def _build_structure_constants():
    eps = np.zeros((DIM, DIM, DIM))
    for i, j, k in ORIENTED_TRIPLES:
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            eps[a, b, c] = 1.0
            eps[b, a, c] = -1.0

    table = np.zeros((DIM, DIM, DIM))
    for j in range(DIM):
        table[0, j, j] = 1.0
        table[j, 0, j] = 1.0
    for i in range(1, DIM):
        table[i, i, 0] = -1.0
        for j in range(1, DIM):
            table[i, j, :] += eps[i, j, :]
    _check_structure_constants(table)
    return table


def _check_structure_constants(table):
    # Every product of basis elements is a signed basis element.
    for i, j in itertools.product(range(DIM), repeat=2):
        nonzero = np.flatnonzero(table[i, j])
        if len(nonzero) != 1 or abs(table[i, j, nonzero[0]]) != 1.0:
            raise AssertionError("e%d e%d is not a signed basis element" % (i, j))
        if i and j and i != j and not np.array_equal(table[i, j], -table[j, i]):
            raise AssertionError("e%d e%d does not anticommute" % (i, j))
    # Hurwitz identity on pairs of basis sums: |xy|^2 = |x|^2 |y|^2.
    basis = np.eye(DIM)
    for i, j, k, m in itertools.product(range(DIM), repeat=4):
        x = basis[i] + basis[j]
        y = basis[k] + basis[m]
        xy = np.einsum('i,j,ijk->k', x, y, table)
        if abs(xy.dot(xy) - x.dot(x) * y.dot(y)) > 1e-12:
            raise AssertionError("norm identity fails for (e%d+e%d)(e%d+e%d)" % (i, j, k, m))


STRUCTURE_CONSTANTS = _build_structure_constants()
STRUCTURE_CONSTANTS.setflags(write=False)


def structure_constants():
    """Return the read-only 8x8x8 tensor C with (ab)_k = sum_ij a_i b_j C_ijk."""
    return STRUCTURE_CONSTANTS


def basis(j):
    """The basis element e_j as a length-8 array."""
    e = np.zeros(DIM)
    e[j] = 1.0
    return e


def as_components(a):
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (DIM,):
        raise DomainError("octonion arrays must have a trailing axis of length 8, got %r" % (a.shape,))
    return a


def mul(a, b):
    a = as_components(a)
    b = as_components(b)
    return np.einsum('...i,...j,ijk->...k', a, b, STRUCTURE_CONSTANTS)


def conj(a):
    a = as_components(a)
    out = -a
    out[..., 0] = a[..., 0]
    return out


def norm_sq(a):
    a = as_components(a)
    return np.einsum('...i,...i->...', a, a)


def norm(a):
    return np.sqrt(norm_sq(a))


def _require_nonzero(n2, what):
    if np.any(n2 <= 0.0):
        raise DomainError("%s is undefined at the zero octonion" % what)


def inv(a):
    a = as_components(a)
    n2 = norm_sq(a)
    _require_nonzero(n2, "inverse")
    return conj(a) / n2[..., np.newaxis]


def imag(a):
    """The ImVector7 part (coefficients of e1..e7)."""
    return as_components(a)[..., 1:].copy()


def associator(a, b, c):
    """(ab)c - a(bc); zero for every triple in an associative algebra."""
    return mul(mul(a, b), c) - mul(a, mul(b, c))


def winding_form(x, v):
    """Evaluate eta = Im(conj(x) v) / |x|^2 at base point x on tangent vector v."""
    x = as_components(x)
    n2 = norm_sq(x)
    _require_nonzero(n2, "the winding form")
    return imag(mul(conj(x), v)) / n2[..., np.newaxis]


# Coefficients of the printed coordinate expressions eta_1..eta_7: each row lists
# (sign, i, j) for a term sign * x_i dx_j.
_ETA_TERMS = (
    ((-1, 1, 0), (1, 0, 1), (1, 3, 2), (-1, 2, 3), (1, 5, 4), (-1, 4, 5), (-1, 7, 6), (1, 6, 7)),
    ((-1, 2, 0), (-1, 3, 1), (1, 0, 2), (1, 1, 3), (1, 6, 4), (1, 7, 5), (-1, 4, 6), (-1, 5, 7)),
    ((-1, 3, 0), (1, 2, 1), (-1, 1, 2), (1, 0, 3), (1, 7, 4), (-1, 6, 5), (1, 5, 6), (-1, 4, 7)),
    ((-1, 4, 0), (-1, 5, 1), (-1, 6, 2), (-1, 7, 3), (1, 0, 4), (1, 1, 5), (1, 2, 6), (1, 3, 7)),
    ((-1, 5, 0), (1, 4, 1), (-1, 7, 2), (1, 6, 3), (-1, 1, 4), (1, 0, 5), (-1, 3, 6), (1, 2, 7)),
    ((-1, 6, 0), (1, 7, 1), (1, 4, 2), (-1, 5, 3), (-1, 2, 4), (1, 3, 5), (1, 0, 6), (-1, 1, 7)),
    ((-1, 7, 0), (-1, 6, 1), (1, 5, 2), (1, 4, 3), (-1, 3, 4), (-1, 2, 5), (1, 1, 6), (1, 0, 7)),
)


def _eta_matrices():
    mats = np.zeros((IMAG_DIM, DIM, DIM))
    for row, terms in enumerate(_ETA_TERMS):
        for sign, i, j in terms:
            mats[row, i, j] = sign
    return mats


ETA_MATRICES = _eta_matrices()
ETA_MATRICES.setflags(write=False)


def winding_form_coordinates(x, v):
    """The winding form from the seven explicit coordinate expressions.

    Kept independent of the multiplication table; under the table above both
    forms agree term by term with no sign changes.
    """
    x = as_components(x)
    v = as_components(v)
    n2 = norm_sq(x)
    _require_nonzero(n2, "the winding form")
    return np.einsum('...i,kij,...j->...k', x, ETA_MATRICES, v) / n2[..., np.newaxis]


def polar(x):
    """Split x into (radius, unit octonion)."""
    x = as_components(x)
    radius = norm(x)
    _require_nonzero(radius, "the polar decomposition")
    return radius, x / np.asarray(radius)[..., np.newaxis]


class Octonion(object):
    """Immutable octonion value."""

    __slots__ = ('_c',)

    def __init__(self, components):
        c = np.array(as_components(components), dtype=float)
        if c.shape != (DIM,):
            raise DomainError("an Octonion has exactly 8 components")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def unit(cls, j):
        return cls(basis(j))

    @classmethod
    def real(cls, value):
        return cls(value * basis(0))

    @property
    def components(self):
        return self._c

    def __getitem__(self, j):
        return self._c[j]

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return DIM

    def __add__(self, other):
        return Octonion(self._c + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Octonion(self._c - _coerce(other))

    def __rsub__(self, other):
        return Octonion(_coerce(other) - self._c)

    def __neg__(self):
        return Octonion(-self._c)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(mul(self._c, other._c))
        return Octonion(self._c * float(other))

    def __rmul__(self, other):
        # Only real scalars reach here; they are central.
        return Octonion(self._c * float(other))

    def __truediv__(self, other):
        if isinstance(other, Octonion):
            return self * other.inverse()
        return Octonion(self._c / float(other))

    def __eq__(self, other):
        if not isinstance(other, Octonion):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return "Octonion(%s)" % ", ".join("%.6g" % c for c in self._c)

    def isclose(self, other, atol=1e-12):
        return np.allclose(self._c, _coerce(other), rtol=0.0, atol=atol)

    def conjugate(self):
        return Octonion(conj(self._c))

    def inverse(self):
        return Octonion(inv(self._c))

    def norm_sq(self):
        return float(norm_sq(self._c))

    def norm(self):
        return float(norm(self._c))

    def imag(self):
        return imag(self._c)

    def polar(self):
        radius, unit = polar(self._c)
        return float(radius), Octonion(unit)


def _coerce(other):
    if isinstance(other, Octonion):
        return other.components
    return float(other) * basis(0)
