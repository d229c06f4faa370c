"""Uniform quadrature on the d-torus.

Nodes are ``theta_j = 2*pi*j/m - pi`` per axis and every node carries the
weight ``m**-d``, so integrals are taken against the normalized measure
``dm = (2*pi)^-d dtheta``.  The rectangle rule is exact for trigonometric
polynomials of per-axis degree below ``m`` and converges geometrically for
smooth periodic integrands.

Grid values are stored as arrays of shape ``(m,)*d``; flattening them in C
order gives the row-major node order with axis 1 slowest.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AliasingError, GridMismatch


@dataclass(frozen=True)
class TorusGrid:
    d: int
    m: int

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValueError(f"need positive d and m, got d={self.d}, m={self.m}")

    @property
    def shape(self):
        return (self.m,) * self.d

    @property
    def size(self):
        return self.m ** self.d

    @property
    def weight(self):
        return float(self.m) ** -self.d

    @cached_property
    def axis(self):
        return 2.0 * np.pi * np.arange(self.m) / self.m - np.pi

    @cached_property
    def mesh(self):
        """Tuple of ``d`` arrays, each of shape ``(m,)*d``, holding theta_j."""
        return tuple(np.meshgrid(*([self.axis] * self.d), indexing="ij"))

    def nodes(self):
        """All nodes as an array of shape ``(m**d, d)``."""
        return np.stack([t.ravel() for t in self.mesh], axis=1)


@dataclass(frozen=True)
class GridFunction:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.size != self.grid.size:
            raise GridMismatch(f"{vals.size} values for a grid of {self.grid.size} nodes")
        object.__setattr__(self, "values", vals.reshape(self.grid.shape))

    @property
    def flat(self):
        return self.values.ravel()

    def _check(self, other):
        if not isinstance(other, GridFunction) or other.grid != self.grid:
            raise GridMismatch("grid functions live on different grids")

    def __add__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values / other.values)
        return GridFunction(self.grid, self.values / other)

    @classmethod
    def from_callable(cls, grid, func):
        """Evaluate ``func(theta_1, ..., theta_d)`` on the grid mesh."""
        return cls(grid, np.broadcast_to(func(*grid.mesh), grid.shape).copy())

    @classmethod
    def constant(cls, grid, value=1.0):
        return cls(grid, np.full(grid.shape, value, dtype=float))


def integrate(f):
    """Rectangle-rule integral of ``f`` against the normalized measure."""
    total = f.values.mean()
    return complex(total) if np.iscomplexobj(total) else float(total)


def _check_alias(grid, omega):
    if grid.d != omega.d:
        raise GridMismatch(f"grid dimension {grid.d} != index set dimension {omega.d}")
    if grid.m <= 2 * omega.n:
        raise AliasingError(f"m={grid.m} must exceed 2n={2 * omega.n}")


def fourier_box(values, grid, omega):
    """Box array of ``integrate(exp(i(k, theta)) * f)`` for all k in ``omega``.

    Uses an inverse FFT of the grid values; the sign array compensates for
    the ``-pi`` offset of the nodes.
    """
    _check_alias(grid, omega)
    coef = np.fft.ifftn(np.asarray(values).reshape(grid.shape))
    n = omega.n
    idx = np.arange(-n, n + 1) % grid.m
    coef = coef[np.ix_(*([idx] * grid.d))]
    ks = np.indices(omega.box_shape).sum(axis=0) - n * grid.d
    return coef * np.where(ks % 2 == 0, 1.0, -1.0)


def fourier_coefficients(f, omega):
    """Fourier coefficients ``c_k = integrate(exp(i(k, theta)) f)`` over ``omega``."""
    from .moments import MomentSequence

    return MomentSequence(omega, fourier_box(f.values, f.grid, omega))


def trig_poly_values(box, grid, omega):
    """Evaluate ``sum_k box[k] * exp(-i(k, theta))`` at every grid node.

    Returns a complex array of shape ``grid.shape``.  This is the convention
    used for both numerator and denominator polynomials: the coefficient of
    index k equals the k-th Fourier coefficient of the polynomial.
    """
    _check_alias(grid, omega)
    n, m = omega.n, grid.m
    ks = np.indices(omega.box_shape).sum(axis=0) - n * grid.d
    placed = np.zeros(grid.shape, dtype=complex)
    idx = np.arange(-n, n + 1) % m
    placed[np.ix_(*([idx] * grid.d))] = box * np.where(ks % 2 == 0, 1.0, -1.0)
    return np.fft.fftn(placed)


def evaluate_basis(grid, omega):
    """Kronecker basis ``K(theta)`` at every node.

    Returns an array of shape ``(m**d, (n+1)**d)`` whose row for a node holds
    ``exp(i(kappa(i), theta))`` at column ``i``.
    """
    if grid.d != omega.d:
        raise GridMismatch(f"grid dimension {grid.d} != index set dimension {omega.d}")
    k1 = np.exp(1j * np.outer(grid.axis, np.arange(omega.n + 1)))  # (m, n+1)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(grid.d):
        # node index grows with axis 1 slowest, as does the basis index
        out = np.einsum("ab,cd->acbd", out, k1).reshape(out.shape[0] * grid.m, -1)
    return out
