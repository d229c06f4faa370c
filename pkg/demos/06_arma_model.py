"""
The ARMA form of a solved density
=================================

With the autoregressive taps known, the solved multipliers are written as
the right-hand-side weights of a two-dimensional difference equation and
saved as JSON.  No spectral factorization is attempted.
"""

import json

import numpy as np

from rce_md import FilterCoefficients, SolverConfig, TorusGrid, extract_arma, truth_density
from rce_md.io import arma_to_dict
from rce_md.pipeline import exact_moments, solve_moments

fc = FilterCoefficients.benchmark()
grid = TorusGrid(2, 64)
truth = truth_density(fc, grid)
c = exact_moments(truth, grid)
phi, _ = solve_moments(c, truth.p, SolverConfig(grid_m=64, grad_tol=1e-9))

model = extract_arma(phi, fc, moments=c, grid=grid)
print("form:", model.form)
print("AR taps a[k1, k2]:\n", np.round(model.ar_taps.real, 3))
print("right-hand-side weights lambda*[k1, k2]:\n", np.round(model.rhs_weights.real, 4))

doc = arma_to_dict(model)
print(json.dumps({k: doc[k] for k in ("format_version", "kind", "d", "n", "form")}))
print("first lags:", [tuple(e["k"]) for e in doc["rhs_weights"][:4]])
