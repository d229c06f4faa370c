"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's FFT paths: Fourier
coefficients and trigonometric polynomials are evaluated by explicit sums,
lag sums by nested loops, autocorrelations by ``scipy.signal`` convolution.
"""
import itertools

import numpy as np
import pytest
from scipy.linalg import solve_toeplitz
from scipy.signal import fftconvolve

from rce_md.dual import SolverConfig
from rce_md.indexing import MultiIndexSet
from rce_md.moments import MomentSequence
from rce_md.pipeline import exact_moments, numerator_values
from rce_md.synth import FilterCoefficients, truth_density
from rce_md.torus import TorusGrid


def direct_coefficient(values, grid, k):
    """``mean(exp(i(k, theta)) f)`` by explicit summation over the mesh."""
    phase = sum(kj * t for kj, t in zip(k, grid.mesh))
    return complex(np.mean(np.exp(1j * phase) * np.asarray(values).reshape(grid.shape)))


def direct_poly(coefs, grid):
    """``sum_k coefs[k] exp(-i(k, theta))`` for a ``{k: value}`` mapping."""
    out = np.zeros(grid.shape, dtype=complex)
    for k, v in coefs.items():
        phase = sum(kj * t for kj, t in zip(k, grid.mesh))
        out += v * np.exp(-1j * phase)
    return out


def brute_lag_sum(y, k):
    """``sum_t y_t conj(y_{t+k})`` over pairs inside the box, by loops."""
    y = np.asarray(y)
    N = y.shape[0]
    total = 0j
    for t in itertools.product(range(N), repeat=y.ndim):
        s = tuple(a + b for a, b in zip(t, k))
        if all(0 <= v < N for v in s):
            total += y[t] * np.conj(y[s])
    return total


def convolution_autocorrelation(taps):
    """``r_k = sum_j taps[j+k] conj(taps[j])`` as a centred box, via convolution."""
    taps = np.asarray(taps, dtype=complex)
    rev = np.conj(taps[(slice(None, None, -1),) * taps.ndim])
    return fftconvolve(taps, rev)


def levinson_ar_spectrum(c, theta):
    """Maximum-entropy AR spectrum of a real Toeplitz moment sequence ``c_0..c_n``."""
    c = np.asarray(c, dtype=float)
    e0 = np.zeros(len(c))
    e0[0] = 1.0
    x = solve_toeplitz(c, e0)
    poly = np.exp(1j * np.outer(theta, np.arange(len(c)))) @ x
    return x[0] / np.abs(poly) ** 2


def random_real_poly_density(rng, d, n, floor=0.3):
    """Strictly positive trigonometric polynomial coefficients (as a mapping)."""
    omega = MultiIndexSet(d, n)
    coefs = {}
    total = 0.0
    for k in omega.half[1:]:
        v = complex(rng.normal(), rng.normal()) * 0.3
        coefs[tuple(k)] = v
        coefs[tuple(-k)] = np.conj(v)
        total += 2 * abs(v)
    coefs[(0,) * d] = total + floor
    return coefs


@pytest.fixture(scope="session")
def bench_filter():
    return FilterCoefficients.benchmark()


@pytest.fixture(scope="session")
def grid64():
    return TorusGrid(2, 64)


@pytest.fixture(scope="session")
def bench_truth(bench_filter, grid64):
    return truth_density(bench_filter, grid64)


@pytest.fixture(scope="session")
def bench_moments(bench_truth, grid64):
    return exact_moments(bench_truth, grid64)


@pytest.fixture(scope="session")
def bench_numerator(bench_truth, grid64):
    return numerator_values(bench_truth.p, grid64)


@pytest.fixture(scope="session")
def bench_config():
    return SolverConfig(grid_m=64, grad_tol=1e-9)


@pytest.fixture
def unit_moments():
    def make(d, n):
        return MomentSequence.from_mapping(MultiIndexSet(d, n), {(0,) * d: 1.0})
    return make


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
