"""End-to-end estimation: moments from data, statistic selection, dual solve."""
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .dual import SolveReport, SolverConfig, fit_l2_baseline, solve
from .indexing import MultiIndexSet
from .moments import (MomentSequence, assemble_moment_matrix, estimate_biased, estimate_unbiased,
                      is_positive_definite, select_statistic)
from .spectral import RationalSpectralDensity, evaluate, verify_moments
from .torus import GridFunction, TorusGrid, fourier_coefficients, trig_poly_values


def exact_moments(phi, grid):
    """Quadrature moments of a rational density on ``grid``."""
    return fourier_coefficients(evaluate(phi, grid), phi.omega)


def numerator_values(p_coeffs, grid):
    return GridFunction(grid, trig_poly_values(p_coeffs.box, grid, p_coeffs.omega).real)


def flat_numerator(omega):
    return MomentSequence.from_mapping(omega, {(0,) * omega.d: 1.0})


def choose_statistic(field, omega, statistic="auto"):
    if statistic == "auto":
        return select_statistic(field, omega)
    if statistic == "biased":
        return estimate_biased(field, omega), "biased"
    if statistic == "unbiased":
        return estimate_unbiased(field, omega), "unbiased"
    raise ValueError(f"unknown statistic {statistic!r}")


@dataclass
class Estimate:
    density: RationalSpectralDensity
    report: SolveReport
    moments: MomentSequence
    branch: str


def solve_moments(c, p_coeffs=None, config=None):
    """Solve for the density with numerator ``p_coeffs`` (flat if omitted) matching ``c``."""
    config = config or SolverConfig()
    omega = c.omega
    p_coeffs = p_coeffs if p_coeffs is not None else flat_numerator(omega)
    grid = config.grid(omega.d)
    P = numerator_values(p_coeffs, grid)
    report = solve(P, c, config)
    return RationalSpectralDensity(p_coeffs, report.lambda_star), report


def estimate_from_field(field, n, p_coeffs=None, config=None, statistic="auto"):
    """Compute both lag statistics, keep the unbiased one if its moment
    matrix is positive definite (else the biased one), then solve."""
    omega = MultiIndexSet(field.d, n)
    c, branch = choose_statistic(field, omega, statistic)
    phi, report = solve_moments(c, p_coeffs, config)
    return Estimate(phi, report, c, branch)


def periodogram(field, grid=None):
    """``|sum_t y_t exp(i(t, theta))|^2 / N^d`` at the nodes of ``grid``.

    Without a grid the N-point torus grid is used (one FFT).  Its Fourier
    coefficients are the biased lag estimates.
    """
    d, N = field.d, field.N
    if grid is None:
        grid = TorusGrid(d, N)
        t = np.indices(field.values.shape).sum(axis=0)
        signed = field.values * np.where(t % 2 == 0, 1.0, -1.0)
        F = np.fft.ifftn(signed) * float(N) ** d
    else:
        if grid.d != d:
            raise GridMismatch(f"grid dimension {grid.d} != field dimension {d}")
        E = np.exp(1j * np.outer(grid.axis, np.arange(N)))  # (m, N)
        F = field.values
        for _ in range(d):
            # contract the leading time axis; frequency axes collect at the end
            F = np.tensordot(F, E, axes=([0], [1]))
    return GridFunction(grid, np.abs(F) ** 2 / float(N) ** d)


@dataclass
class L2Fit:
    density: RationalSpectralDensity
    residual: float


def fit_periodogram_l2(field, n, p_coeffs=None, config=None, max_iters=5000):
    """Least-squares fit of ``P/Q`` to the periodogram of ``field`` on the
    solver's quadrature grid."""
    config = config or SolverConfig()
    omega = MultiIndexSet(field.d, n)
    p_coeffs = p_coeffs if p_coeffs is not None else flat_numerator(omega)
    target = periodogram(field, config.grid(field.d))
    P = numerator_values(p_coeffs, target.grid)
    lam, resid = fit_l2_baseline(P, target, omega, config, max_iters)
    return L2Fit(RationalSpectralDensity(p_coeffs, lam), resid)


def moment_matrix_min_eig(c):
    return is_positive_definite(assemble_moment_matrix(c))[1]


def residual(phi, c, grid):
    return verify_moments(phi, c, grid).linf
