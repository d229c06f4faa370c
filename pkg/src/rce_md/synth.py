"""Ground-truth densities from recursive filters and synthetic lattice fields.

A filter with taps ``b`` and ``a`` on ``{0..n}^d`` has transfer function
``b(theta)/a(theta)`` with ``b(theta) = sum_k b_k exp(-i(k, theta))``; the
output spectrum is ``|b|^2 / |a|^2``.
"""
from dataclasses import dataclass

import numpy as np

from .dual import StructuredLagrangian
from .errors import UnstableFilter
from .indexing import MultiIndexSet
from .moments import LatticeField, MomentSequence, lag_sums
from .spectral import RationalSpectralDensity, evaluate
from .torus import GridFunction, TorusGrid

#: Numerator taps of the two-dimensional benchmark filter, ``b[k1, k2]``.
BENCHMARK_B = np.array([[0.9, -0.2, 0.05],
                    [0.2, 0.3, 0.05],
                    [-0.05, -0.05, 0.1]])

#: Denominator taps of the benchmark filter, ``a[k1, k2]``.
BENCHMARK_A = np.array([[1.0, 0.1, 0.1],
                    [-0.2, 0.2, -0.1],
                    [0.4, -0.1, -0.2]])

RNG_ALGORITHM = "numpy.random.Philox"


@dataclass
class FilterCoefficients:
    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=complex)
        self.a = np.asarray(self.a, dtype=complex)
        if self.b.shape != self.a.shape or len(set(self.a.shape)) != 1:
            raise ValueError(f"b and a must share a hypercube shape, got {self.b.shape}, {self.a.shape}")

    @property
    def d(self):
        return self.a.ndim

    @property
    def n(self):
        return self.a.shape[0] - 1

    @property
    def omega(self):
        return MultiIndexSet(self.d, self.n)

    @classmethod
    def benchmark(cls):
        return cls(BENCHMARK_B, BENCHMARK_A)

    @classmethod
    def identity(cls, d, n=0):
        unit = np.zeros((n + 1,) * d)
        unit[(0,) * d] = 1.0
        return cls(unit, unit.copy())


def autocorrelation(taps):
    """Box array ``r_k = sum_j taps[j+k] conj(taps[j])``.

    With this convention ``|sum_k taps_k exp(-i(k,theta))|^2 = sum_k r_k exp(-i(k,theta))``.
    """
    taps = np.asarray(taps, dtype=complex)
    omega = MultiIndexSet(taps.ndim, taps.shape[0] - 1)
    return np.conj(lag_sums(LatticeField(taps), omega))


def symbol(taps, grid):
    """``sum_k taps_k exp(-i(k, theta))`` on the grid mesh."""
    taps = np.asarray(taps, dtype=complex)
    out = np.zeros(grid.shape, dtype=complex)
    for k in np.ndindex(*taps.shape):
        if taps[k] != 0:
            phase = sum(kj * t for kj, t in zip(k, grid.mesh))
            out += taps[k] * np.exp(-1j * phase)
    return out


def truth_density(fc, grid, floor=1e-8):
    """Rational density ``|b/a|^2`` with coefficient-form numerator and denominator.

    Raises :class:`UnstableFilter` when ``|a(theta)| <= floor`` at a grid node.
    """
    amin = float(np.min(np.abs(symbol(fc.a, grid))))
    if amin <= floor:
        raise UnstableFilter(f"denominator symbol nearly vanishes on the grid (min |a| = {amin:.3e})")
    omega = fc.omega
    p = MomentSequence(omega, autocorrelation(fc.b))
    lam = StructuredLagrangian(omega, autocorrelation(fc.a))
    return RationalSpectralDensity(p, lam)


@dataclass(frozen=True)
class RandomSource:
    seed: int
    algorithm: str = RNG_ALGORITHM

    def generator(self):
        if self.algorithm != RNG_ALGORITHM:
            raise ValueError(f"unsupported generator {self.algorithm!r}")
        return np.random.Generator(np.random.Philox(self.seed))


def _density_on(phi, d, N):
    grid = TorusGrid(d, N)
    if isinstance(phi, GridFunction):
        if phi.grid != grid:
            raise ValueError("density grid must be the N-point frequency grid")
        return np.asarray(phi.values, dtype=float)
    if 2 * phi.omega.n < N:
        return evaluate(phi, grid).values
    # coarse grids alias in the FFT path; sum the polynomials directly
    P = _direct(phi.p.box, phi.omega, grid).real
    Q = _direct(phi.lam.box, phi.omega, grid).real
    return P / Q


def _direct(box, omega, grid):
    out = np.zeros(grid.shape, dtype=complex)
    for k in omega.members:
        phase = sum(kj * t for kj, t in zip(k, grid.mesh))
        out += box[omega.box_index(k)] * np.exp(-1j * phase)
    return out


def generate_field(phi, N, rs, d=None):
    """Draw a complex stationary field on ``{0..N-1}^d`` with spectrum ``phi``.

    Complex white noise ``Z = (W1 + i W2)/sqrt(2)`` on the N-point frequency
    grid is shaped by ``sqrt(Phi)`` and transformed back; the scaling makes
    ``Phi == 1`` produce unit-variance white samples, and
    ``E[y_t conj(y_{t+k})]`` equals the N-point quadrature of the k-th moment.
    """
    if N < 2:
        raise ValueError("need at least two samples per axis")
    if isinstance(rs, int):
        rs = RandomSource(rs)
    d = d or (phi.grid.d if isinstance(phi, GridFunction) else phi.omega.d)
    Phi = _density_on(phi, d, N)
    rng = rs.generator()
    shape = (N,) * d
    Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    Y = np.sqrt(Phi) * Z
    # nodes start at -pi, hence the alternating sign in the time domain
    t = np.indices(shape).sum(axis=0)
    y = np.fft.fftn(Y) * np.where(t % 2 == 0, 1.0, -1.0) / np.sqrt(float(N) ** d)
    return LatticeField(y)
