import numpy as np
import pytest

from rce_md.dual import SolverConfig
from rce_md.indexing import MultiIndexSet
from rce_md.moments import LatticeField, estimate_biased
from rce_md.pipeline import choose_statistic, estimate_from_field, fit_periodogram_l2, periodogram
from rce_md.spectral import verify_moments
from rce_md.synth import RandomSource, generate_field
from rce_md.torus import TorusGrid, fourier_coefficients


def direct_periodogram(y, grid):
    out = np.zeros(grid.size)
    t = np.array(list(np.ndindex(*y.shape)))
    for i, theta in enumerate(grid.nodes()):
        out[i] = abs(np.sum(y.ravel() * np.exp(1j * t @ theta))) ** 2
    return out / y.size


@pytest.mark.parametrize("m", [None, 5, 12])
def test_periodogram_matches_direct_sum(m):
    rng = np.random.default_rng(0)
    y = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    grid = None if m is None else TorusGrid(2, m)
    f = periodogram(LatticeField(y), grid)
    assert np.allclose(f.flat, direct_periodogram(y, f.grid), atol=1e-12)


def test_periodogram_coefficients_are_biased_estimates():
    rng = np.random.default_rng(1)
    y = LatticeField(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    om = MultiIndexSet(2, 3)
    c = fourier_coefficients(periodogram(y, TorusGrid(2, 11)), om)
    assert np.max(np.abs(c.box - estimate_biased(y, om).box)) <= 1e-13


def test_choose_statistic():
    y = LatticeField(np.random.default_rng(2).normal(size=(20, 20)) + 0j)
    om = MultiIndexSet(2, 1)
    assert choose_statistic(y, om, "biased")[1] == "biased"
    assert choose_statistic(y, om, "unbiased")[1] == "unbiased"
    with pytest.raises(ValueError):
        choose_statistic(y, om, "median")


def test_estimate_from_field(bench_truth):
    y = generate_field(bench_truth, 100, RandomSource(4))
    est = estimate_from_field(y, 2, bench_truth.p, SolverConfig())
    assert est.branch in ("biased", "unbiased")
    assert est.report.converged
    assert verify_moments(est.density, est.moments, TorusGrid(2, 64)).linf <= 1e-8 * est.moments.c0


def test_l2_fit_leaves_moment_mismatch(bench_truth):
    y = generate_field(bench_truth, 100, RandomSource(4))
    cfg = SolverConfig()
    fit = fit_periodogram_l2(y, 2, bench_truth.p, cfg)
    c = estimate_biased(y, MultiIndexSet(2, 2))
    assert fit.residual > 0
    assert verify_moments(fit.density, c, TorusGrid(2, 64)).linf > 1e-3
