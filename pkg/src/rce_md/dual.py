"""Dual problem of the rational covariance extension.

The denominator is parametrized by Lagrange multipliers ``lambda_k`` over the
box index set with ``lambda_{-k} = conj(lambda_k)``:

    Q(theta) = sum_k lambda_k exp(-i(k, theta)) = K(theta)^H Lam K(theta),

where ``Lam[i, j] = lambda_{kappa(i)-kappa(j)} / card_N(kappa(i)-kappa(j))``.
The dual objective

    J(lambda) = -integrate(P log Q) + sum_k lambda_k c_{-k}

is strictly convex on ``{Q > 0}``; its gradient with respect to
``lambda_k`` is ``c_{-k} - integrate(exp(-i(k, theta)) P/Q)``, so a
stationary point is exactly a density ``P/Q`` whose moments equal ``c``.

Free real parameters are ``[lambda_0, Re lambda_h, Im lambda_h, ...]`` for
``h`` running over the half-set without ``0``.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from .errors import (GridMismatch, InfeasiblePoint, InfeasibleStart, MaxIterations,
                     NonPositiveDensity, NotPositiveDefinite)
from .indexing import MultiIndexSet
from .moments import MomentSequence, assemble_moment_matrix, is_positive_definite
from .optimize import minimize_bfgs
from .torus import GridFunction, TorusGrid, evaluate_basis, fourier_box, trig_poly_values

log = logging.getLogger(__name__)


@dataclass
class StructuredLagrangian:
    omega: MultiIndexSet
    box: np.ndarray

    def __post_init__(self):
        self.box = np.asarray(self.box, dtype=complex)
        if self.box.shape != self.omega.box_shape:
            raise ValueError(f"box shape {self.box.shape} != {self.omega.box_shape}")

    @classmethod
    def from_half(cls, omega, values):
        return cls(omega, omega.hermitian_from_half(values))

    @classmethod
    def constant(cls, omega, value):
        vals = np.zeros(len(omega.half), dtype=complex)
        vals[0] = value
        return cls.from_half(omega, vals)

    @classmethod
    def from_params(cls, omega, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (omega.size,):
            raise ValueError(f"expected {omega.size} parameters, got {x.shape}")
        vals = np.empty(len(omega.half), dtype=complex)
        vals[0] = x[0]
        vals[1:] = x[1::2] + 1j * x[2::2]
        return cls.from_half(omega, vals)

    def to_params(self):
        vals = self.values
        x = np.empty(self.omega.size)
        x[0] = vals[0].real
        x[1::2] = vals[1:].real
        x[2::2] = vals[1:].imag
        return x

    @property
    def values(self):
        return self.box[self.omega.half_positions()]

    def __getitem__(self, k):
        k = (k,) if np.isscalar(k) else tuple(k)
        return complex(self.box[self.omega.box_index(k)])

    def matrix(self):
        """The structured Hermitian matrix ``Lam`` of the Kronecker form."""
        om = self.omega
        scaled = self.box / om.card_box
        return scaled[om.difference_index]


def _chart(G, omega):
    """Real-chart gradient from ``G_k = integrate(exp(i(k, theta)) dF/dQ)``-type
    coefficients: ``dF/dlambda_0 = G_0``, ``dF/dRe = 2 Re G_h``, ``dF/dIm = 2 Im G_h``."""
    vals = G[omega.half_positions()]
    out = np.empty(omega.size)
    out[0] = vals[0].real
    out[1::2] = 2.0 * vals[1:].real
    out[2::2] = 2.0 * vals[1:].imag
    return out


def q_values(lam, grid):
    """Q on the grid via the coefficient sum (an FFT of the multipliers)."""
    return GridFunction(grid, trig_poly_values(lam.box, grid, lam.omega).real)


def q_values_kronecker(lam, grid):
    """Q on the grid via ``K^H Lam K``; slow, kept as an independent path."""
    K = evaluate_basis(grid, lam.omega)
    vals = np.einsum("ai,ij,aj->a", K.conj(), lam.matrix(), K)
    return GridFunction(grid, vals.real)


def trace_term(lam, c):
    """``tr(Lam T)`` computed coefficient-wise as ``sum_k lambda_k c_{-k}``."""
    return float(np.sum(lam.box * c.omega.mirror(c.box)).real)


class _DualProblem:
    """Caches the grid data for repeated objective/gradient evaluation."""

    def __init__(self, p, c):
        if p.grid.d != c.omega.d:
            raise GridMismatch(f"P lives in dimension {p.grid.d}, moments in {c.omega.d}")
        self.grid = p.grid
        self.omega = c.omega
        self.P = np.asarray(p.values, dtype=float)
        self.c = c
        self.c_mirror = c.omega.mirror(c.box)

    def q(self, lam_box):
        return trig_poly_values(lam_box, self.grid, self.omega).real

    def evaluate(self, x):
        lam = StructuredLagrangian.from_params(self.omega, x)
        Q = self.q(lam.box)
        if np.min(Q) <= 0:
            return np.inf, None
        f = -np.mean(self.P * np.log(Q)) + float(np.sum(lam.box * self.c_mirror).real)
        g_mom = fourier_box(self.P / Q, self.grid, self.omega)
        return f, _chart(self.c.box - g_mom, self.omega)

    def moment_mismatch(self, lam):
        Q = self.q(lam.box)
        return self.c.box - fourier_box(self.P / Q, self.grid, self.omega)


def objective(lam, p, c, grid=None):
    """Dual objective; raises :class:`InfeasiblePoint` if ``Q <= 0`` on the grid."""
    _same_grid(p, grid)
    f, _ = _DualProblem(p, c).evaluate(lam.to_params())
    if not np.isfinite(f):
        raise InfeasiblePoint("Q(theta) <= 0 at some grid node")
    return f


def gradient(lam, p, c, grid=None):
    """Exact gradient of :func:`objective` in the real parameter chart."""
    _same_grid(p, grid)
    f, g = _DualProblem(p, c).evaluate(lam.to_params())
    if not np.isfinite(f):
        raise InfeasiblePoint("Q(theta) <= 0 at some grid node")
    return g


def _same_grid(p, grid):
    if grid is not None and p.grid != grid:
        raise GridMismatch("P is sampled on a different grid")


@dataclass
class SolverConfig:
    grid_m: int = 64
    grad_tol: float = 1e-8
    max_iters: int = 500
    shrink: float = 0.5
    c1: float = 1e-4
    initial: StructuredLagrangian = None

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")

    def grid(self, d):
        return TorusGrid(d, self.grid_m)


@dataclass
class SolveReport:
    lambda_star: StructuredLagrangian
    iterations: int
    grad_norm: float
    moment_residual: float
    lambda_matrix_pd: bool
    lambda_min: float
    converged: bool
    objective_trace: list = field(default_factory=list)


def _initial_point(p, c, config):
    if config.initial is not None:
        return config.initial
    # Q = const chosen so that integrate(P/Q) = c_0
    return StructuredLagrangian.constant(c.omega, float(np.mean(p.values)) / c.c0)


def solve(p, c, config=None):
    """Minimize the dual objective for numerator ``p`` and moments ``c``.

    Parameters
    ----------
    p : GridFunction
        Strictly positive numerator ``P`` sampled on the quadrature grid.
    c : MomentSequence
        Target moments; their moment matrix must be positive definite.
    config : SolverConfig, optional

    Returns
    -------
    SolveReport
        ``moment_residual`` is ``max_k |c_k - integrate(exp(i(k,theta)) P/Q*)|``.
    """
    config = config or SolverConfig()
    omega = c.omega
    ok, lmin = is_positive_definite(assemble_moment_matrix(c))
    if not ok:
        raise NotPositiveDefinite(f"moment matrix is not positive definite (lambda_min={lmin:.3e})")
    if np.min(p.values) <= 0:
        raise NonPositiveDensity("numerator P must be strictly positive on the grid")
    problem = _DualProblem(p, c)
    lam0 = _initial_point(p, c, config)
    f0, _ = problem.evaluate(lam0.to_params())
    if not np.isfinite(f0):
        raise InfeasibleStart("initial multipliers give Q <= 0 on the grid")

    tol = config.grad_tol * c.c0

    def stop(x, f, g):
        mism = problem.moment_mismatch(StructuredLagrangian.from_params(omega, x))
        return np.max(np.abs(mism)) <= tol

    res = minimize_bfgs(problem.evaluate, lam0.to_params(), stop,
                        max_iters=config.max_iters, shrink=config.shrink, c1=config.c1)
    lam = StructuredLagrangian.from_params(omega, res.x)
    resid = float(np.max(np.abs(problem.moment_mismatch(lam))))
    pd, lam_min = is_positive_definite(lam.matrix(), rtol=0.0)
    report = SolveReport(lambda_star=lam, iterations=res.iterations,
                         grad_norm=float(np.max(np.abs(res.grad))), moment_residual=resid,
                         lambda_matrix_pd=pd, lambda_min=lam_min, converged=res.converged,
                         objective_trace=[float(v) for v in res.trace])
    log.debug("solve: %s after %d iterations, residual %.3e", res.message, res.iterations, resid)
    if not res.converged:
        raise MaxIterations(f"{res.message} after {res.iterations} iterations "
                            f"(moment residual {resid:.3e})", report)
    return report


L2_STALL_WINDOW = 20
L2_STALL_RTOL = 1e-10


def fit_l2_baseline(p, target, omega, config=None, max_iters=5000):
    """Least-squares fit of ``P/Q`` to ``target`` on the grid.

    Minimizes ``integrate((P/Q - target)^2)`` (the mean squared node error)
    over the same multipliers and feasible region as :func:`solve`.  The
    problem is not convex; the local minimum reached from the start
    ``Q = integrate(P)/integrate(target)`` is returned.  The fit stops once
    the gradient is small or the objective has dropped by less than
    ``L2_STALL_RTOL`` (relative) over ``L2_STALL_WINDOW`` iterations.

    Returns ``(lambda, residual)``.
    """
    config = config or SolverConfig()
    if target.grid != p.grid:
        raise GridMismatch("target and P live on different grids")
    grid = p.grid
    P = np.asarray(p.values, dtype=float)
    T = np.asarray(target.values, dtype=float)
    if np.min(P) <= 0:
        raise NonPositiveDensity("numerator P must be strictly positive on the grid")

    def evaluate(x):
        lam = StructuredLagrangian.from_params(omega, x)
        Q = trig_poly_values(lam.box, grid, omega).real
        if np.min(Q) <= 0:
            return np.inf, None
        r = P / Q - T
        f = float(np.mean(r * r))
        w = -2.0 * r * P / (Q * Q)
        return f, _chart(fourier_box(w, grid, omega), omega)

    if config.initial is not None:
        lam0 = config.initial
    else:
        lam0 = StructuredLagrangian.constant(omega, float(P.mean() / max(T.mean(), 1e-300)))
    x0 = lam0.to_params()
    f0, _ = evaluate(x0)
    if not np.isfinite(f0):
        raise InfeasibleStart("initial multipliers give Q <= 0 on the grid")
    scale = max(f0, 1e-300)

    history = []

    def stop(x, f, g):
        # the fit may stall against the Q > 0 boundary; accept a flat objective
        history.append(f)
        flat = len(history) > L2_STALL_WINDOW and \
            history[-L2_STALL_WINDOW - 1] - f <= L2_STALL_RTOL * max(abs(f), 1.0)
        return flat or np.max(np.abs(g)) <= config.grad_tol * scale

    res = minimize_bfgs(evaluate, x0, stop, max_iters=max_iters,
                        shrink=config.shrink, c1=config.c1)
    lam = StructuredLagrangian.from_params(omega, res.x)
    if res.message == "max iterations":
        report = SolveReport(lam, res.iterations, float(np.max(np.abs(res.grad))), np.nan,
                             False, np.nan, False, [float(v) for v in res.trace])
        raise MaxIterations(f"L2 fit did not converge in {res.iterations} iterations", report)
    return lam, float(res.fun)
