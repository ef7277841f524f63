"""Grid functions and self-adjoint positive definite operators.

Vectors live on the interior nodes of a uniform grid and carry the mesh
weight h; the inner product is the weighted sum (v, w) = sum_i v_i w_i h.
Operators that know their symmetric band (stored in scipy's upper
diagonal ordered form) get direct Cholesky solves for the shifted systems
(E + c A) x = b and for low-degree operator polynomials.  Operators given
only as a raw matvec fall back to conjugate gradients.

Grid functions and operators are immutable after construction, so they
can be shared freely between concurrently running integrations; every
solve works on private storage.
"""

from __future__ import annotations

import numbers

import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, solveh_banded
from scipy.sparse.linalg import LinearOperator, cg

__all__ = [
    "DimensionMismatch",
    "NumericalError",
    "GridFunction",
    "SpdOperator",
    "OperatorPolynomial",
    "inner_product",
    "norm",
]


class DimensionMismatch(ValueError):
    """Vector and operator sizes (or mesh weights) do not agree."""


class NumericalError(RuntimeError):
    """A linear solve broke down or missed its residual tolerance."""


class GridFunction:
    """Real values on the interior nodes of a uniform grid, with weight h."""

    __slots__ = ("_values", "_h")

    def __init__(self, values, h):
        v = np.array(values, dtype=float)
        if v.ndim != 1:
            raise DimensionMismatch("grid function values must be one-dimensional")
        h = float(h)
        if not h > 0.0:
            raise ValueError(f"mesh weight must be positive, got {h}")
        v.setflags(write=False)
        self._values = v
        self._h = h

    @classmethod
    def zeros(cls, n, h):
        return cls(np.zeros(n), h)

    @property
    def values(self):
        return self._values

    @property
    def h(self):
        return self._h

    def __len__(self):
        return self._values.size

    def __repr__(self):
        return f"GridFunction(n={len(self)}, h={self._h:g})"

    def _wrap(self, values):
        """Adopt a freshly computed array without copying it again."""
        out = object.__new__(GridFunction)
        values.setflags(write=False)
        out._values = values
        out._h = self._h
        return out

    def _compatible(self, other):
        if len(other) != len(self) or other._h != self._h:
            raise DimensionMismatch(
                f"grid mismatch: (n={len(self)}, h={self._h}) vs (n={len(other)}, h={other._h})"
            )

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        self._compatible(other)
        return self._wrap(self._values + other._values)

    def __sub__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        self._compatible(other)
        return self._wrap(self._values - other._values)

    def __mul__(self, scalar):
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        return self._wrap(self._values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self._values)


def inner_product(v, w):
    """Weighted discrete inner product (v, w) = sum_i v_i w_i h."""
    v._compatible(w)
    return float(np.dot(v.values, w.values) * v.h)


def norm(v):
    """Weighted L2 norm sqrt((v, v))."""
    return float(np.sqrt(v.h) * np.linalg.norm(v.values))


def _band_matvec(band, x):
    u = band.shape[0] - 1
    y = band[u] * x
    for k in range(1, u + 1):
        d = band[u - k, k:]
        y[: x.size - k] += d * x[k:]
        y[k:] += d * x[: x.size - k]
    return y


def _sparse_from_band(band):
    u = band.shape[0] - 1
    n = band.shape[1]
    diags = [band[u]]
    offsets = [0]
    for k in range(1, u + 1):
        d = band[u - k, k:]
        diags.extend([d, d])
        offsets.extend([k, -k])
    return sparse.diags(diags, offsets, shape=(n, n), format="csr")


def _band_from_dia(matrix, bandwidth):
    n = matrix.shape[0]
    band = np.zeros((bandwidth + 1, n))
    for off, row in zip(matrix.offsets, matrix.data):
        if off < 0:
            continue
        if off > bandwidth:
            raise ValueError("matrix is wider than the requested band")
        band[bandwidth - off, off:] = row[off:]
    return band


def _solveh(band, b, context):
    try:
        return solveh_banded(band, b, lower=False)
    except LinAlgError as exc:
        raise NumericalError(f"{context}: matrix is not positive definite") from exc


def _cg(matvec, b, rtol):
    lin = LinearOperator((b.size, b.size), matvec=matvec, dtype=float)
    x, info = cg(lin, b, rtol=rtol, atol=0.0, maxiter=50 * b.size)
    if info != 0:
        raise NumericalError(f"conjugate gradients stopped with status {info}")
    return x


def _check_residual(matvec, x, b, rtol, context):
    scale = np.linalg.norm(b)
    if scale == 0.0:
        return
    if np.linalg.norm(b - matvec(x)) > rtol * scale:
        raise NumericalError(f"{context}: residual exceeds {rtol:g} * ||rhs||")


class SpdOperator:
    """Self-adjoint positive definite linear operator on grid functions.

    Banded instances store the upper triangle of the matrix in scipy's
    diagonal ordered form (last row = main diagonal) and solve shifted
    systems with a direct symmetric factorization.  Matrix-free instances
    supply ``apply_fn`` acting on raw arrays and are solved by conjugate
    gradients instead.  ``lower_bound``/``upper_bound`` optionally record
    spectral bounds of the operator.
    """

    def __init__(self, dimension, *, band=None, apply_fn=None,
                 lower_bound=None, upper_bound=None):
        self.dimension = int(dimension)
        if self.dimension < 1:
            raise ValueError("operator dimension must be at least 1")
        if (band is None) == (apply_fn is None):
            raise ValueError("provide exactly one of band= or apply_fn=")
        if band is not None:
            band = np.array(band, dtype=float)
            if band.ndim != 2 or band.shape[1] != self.dimension:
                raise DimensionMismatch("band must have shape (bandwidth + 1, dimension)")
            band.setflags(write=False)
        self.band = band
        self.apply_fn = apply_fn
        self.lower_bound = lower_bound
        self.upper_bound = upper_bound

    @property
    def bandwidth(self):
        return None if self.band is None else self.band.shape[0] - 1

    def _check(self, v):
        if len(v) != self.dimension:
            raise DimensionMismatch(
                f"operator of dimension {self.dimension} applied to vector of length {len(v)}"
            )

    def matvec(self, x):
        """Raw array action A @ x."""
        if self.band is not None:
            return _band_matvec(self.band, x)
        y = np.asarray(self.apply_fn(x), dtype=float)
        if y.shape != x.shape:
            raise DimensionMismatch("apply_fn changed the vector length")
        return y

    def apply(self, v):
        """Apply the operator to a grid function."""
        self._check(v)
        return v._wrap(self.matvec(v.values))

    def solve_shifted(self, c, rhs, rtol=1e-12):
        """Solve (E + c A) x = rhs for x, with shift c >= 0.

        The residual is verified against rtol * ||rhs||; a breakdown or a
        missed tolerance raises NumericalError.
        """
        self._check(rhs)
        c = float(c)
        if c < 0.0:
            raise ValueError("shift coefficient must be nonnegative")
        b = rhs.values
        shifted = lambda z: z + c * self.matvec(z)
        if self.band is not None:
            sb = c * self.band
            sb[-1] += 1.0
            x = _solveh(sb, b, "shifted solve")
        else:
            x = _cg(shifted, b, rtol)
        _check_residual(shifted, x, b, rtol, "shifted solve")
        return rhs._wrap(x)


class OperatorPolynomial:
    """Polynomial c0 E + c1 A + ... + cd A^d in a fixed self-adjoint operator."""

    def __init__(self, base, coefficients):
        coeffs = tuple(float(c) for c in coefficients)
        if not coeffs:
            raise ValueError("need at least one polynomial coefficient")
        self.base = base
        self.coefficients = coeffs
        self._band = self._polynomial_band() if base.band is not None else None

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def _polynomial_band(self):
        n = self.base.dimension
        a = _sparse_from_band(self.base.band)
        total = self.coefficients[0] * sparse.identity(n, format="csr")
        power = sparse.identity(n, format="csr")
        for c in self.coefficients[1:]:
            power = power @ a
            if c != 0.0:
                total = total + c * power
        return _band_from_dia(total.todia(), self.degree * self.base.bandwidth)

    def _matvec(self, x):
        # Horner: p(A) x = c0 x + A (c1 x + A (c2 x + ...))
        acc = self.coefficients[-1] * x
        for c in reversed(self.coefficients[:-1]):
            acc = self.base.matvec(acc) + c * x
        return acc

    def apply(self, v):
        """Apply the polynomial to a grid function."""
        self.base._check(v)
        return v._wrap(self._matvec(v.values))

    def solve(self, rhs, rtol=1e-10):
        """Solve p(A) x = rhs; the polynomial must be positive on the spectrum."""
        self.base._check(rhs)
        b = rhs.values
        if self._band is not None:
            x = _solveh(self._band, b, "operator polynomial solve")
        else:
            x = _cg(self._matvec, b, rtol)
        _check_residual(self._matvec, x, b, rtol, "operator polynomial solve")
        return rhs._wrap(x)
