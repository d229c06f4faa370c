"""Multidimensional rational covariance extension.

Estimates a spectral density ``P/Q`` on the d-torus that matches a finite
set of trigonometric moments, by minimizing a strictly convex dual
functional over the coefficients of ``Q``.
"""
from .dual import SolveReport, SolverConfig, StructuredLagrangian, fit_l2_baseline, gradient, objective, solve
from .errors import RCEError
from .indexing import MultiIndexSet
from .moments import (LatticeField, MomentSequence, assemble_moment_matrix, estimate_biased,
                      estimate_unbiased, is_positive_definite, select_statistic)
from .spectral import (RationalSpectralDensity, count_modes, entropy, evaluate, mode_bound, normalize,
                       shannon_maxent, total_variation, tv_upper_bound, verify_moments)
from .synth import FilterCoefficients, RandomSource, generate_field, truth_density
from .torus import GridFunction, TorusGrid, fourier_coefficients, integrate, trig_poly_values
from .arma import ArmaModel, extract_arma

__version__ = "0.1.0"
