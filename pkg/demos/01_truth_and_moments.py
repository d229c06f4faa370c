"""
A two-dimensional rational spectrum and its moments
===================================================

The benchmark density is the output spectrum of a recursive filter with
3x3 numerator and denominator taps.  We sample it on the torus, take its
trigonometric moments over the box of order 2 and look at the structured
moment matrix they induce.
"""

import numpy as np

from rce_md import FilterCoefficients, MultiIndexSet, TorusGrid, evaluate, truth_density
from rce_md.moments import assemble_moment_matrix, is_positive_definite
from rce_md.pipeline import exact_moments

# The filter taps and a 64-point-per-axis quadrature grid
fc = FilterCoefficients.benchmark()
grid = TorusGrid(2, 64)
phi = truth_density(fc, grid)

# Phi = P/Q with P = |b|^2 and Q = |a|^2, both order-2 trigonometric polynomials
values = evaluate(phi, grid).values
print("density range on the grid: %.3g .. %.3g" % (values.min(), values.max()))

# Moments c_k for |k_j| <= 2, by the rectangle rule (an FFT of the node values)
c = exact_moments(phi, grid)
print("c_0 =", round(c.c0, 6))
print("c_(1,0) =", np.round(c[(1, 0)], 6), " c_(0,1) =", np.round(c[(0, 1)], 6))

# The 9x9 moment matrix has entry (i, j) = c[kappa(i) - kappa(j)]
T = assemble_moment_matrix(c)
ok, lmin = is_positive_definite(T)
print("moment matrix %s, positive definite: %s (smallest eigenvalue %.4f)" % (T.shape, ok, lmin))

# A coarser quadrature grid misses part of the sharp peak; compare moments at a few resolutions
for m in (64, 128, 256):
    g = TorusGrid(2, m)
    print("m=%4d  c_0=%.9f" % (m, exact_moments(truth_density(fc, g), g).c0))

omega = MultiIndexSet(2, 2)
print("index set: %d moments, %d free real parameters" % (omega.size, omega.size))
