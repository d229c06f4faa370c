"""Rational spectral densities ``Phi = P/Q`` and diagnostics on them."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .dual import StructuredLagrangian, _chart
from .errors import GridMismatch, MaxIterations, NegativeGap, NonPositiveDensity, NotNormalized
from .moments import MomentSequence
from .optimize import minimize_bfgs
from .torus import GridFunction, fourier_box, integrate, trig_poly_values


@dataclass
class RationalSpectralDensity:
    """``Phi(theta) = P(theta) / Q(theta)``.

    Both polynomials use ``sum_k coef_k exp(-i(k, theta))``, so ``p.box[k]``
    is also the k-th Fourier coefficient of ``P``.
    """

    p: MomentSequence
    lam: StructuredLagrangian

    def __post_init__(self):
        if self.p.omega != self.lam.omega:
            raise ValueError("numerator and denominator use different index sets")

    @property
    def omega(self):
        return self.lam.omega

    def p_values(self, grid):
        return GridFunction(grid, trig_poly_values(self.p.box, grid, self.omega).real)

    def q_values(self, grid):
        return GridFunction(grid, trig_poly_values(self.lam.box, grid, self.omega).real)

    @classmethod
    def flat(cls, omega, level=1.0):
        """``Phi == level`` with ``P == 1``."""
        p = MomentSequence.from_mapping(omega, {(0,) * omega.d: 1.0})
        return cls(p, StructuredLagrangian.constant(omega, 1.0 / level))


def evaluate(phi, grid):
    """Node values ``P/Q``; raises :class:`NonPositiveDensity` unless both are positive."""
    P = phi.p_values(grid).values
    Q = phi.q_values(grid).values
    if np.min(P) <= 0 or np.min(Q) <= 0:
        raise NonPositiveDensity(f"min P = {np.min(P):.3e}, min Q = {np.min(Q):.3e}")
    return GridFunction(grid, P / Q)


class MomentResidual(NamedTuple):
    linf: float
    l2: float


def _as_grid_function(phi, grid):
    if isinstance(phi, GridFunction):
        if grid is not None and phi.grid != grid:
            raise GridMismatch("density sampled on a different grid")
        return phi
    return evaluate(phi, grid)


def verify_moments(phi, c, grid=None):
    """Max and Euclidean norms of ``fourier_coefficients(Phi) - c`` over the index set."""
    f = _as_grid_function(phi, grid)
    diff = fourier_box(f.values, f.grid, c.omega) - c.box
    return MomentResidual(float(np.max(np.abs(diff))), float(np.linalg.norm(diff)))


def normalize(f):
    """Rescale a grid density to unit mass."""
    return f / integrate(f)


def entropy(phi, grid=None):
    """Shannon entropy ``-integrate(Phi log Phi)`` of a unit-mass density."""
    f = _as_grid_function(phi, grid)
    mass = integrate(f)
    if abs(mass - 1.0) > 1e-8:
        raise NotNormalized(f"density has mass {mass:.12g}, expected 1")
    v = np.asarray(f.values, dtype=float)
    if np.min(v) < 0:
        raise NonPositiveDensity("entropy needs a nonnegative density")
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(v > 0, v * np.log(v), 0.0)
    return float(-plogp.mean())


def total_variation(f, g):
    """``0.5 * integrate(|f - g|)``."""
    if f.grid != g.grid:
        raise GridMismatch("total variation needs both densities on one grid")
    return 0.5 * float(np.mean(np.abs(f.values - g.values)))


def _tv_term(gap):
    return 3.0 * np.sqrt(-1.0 + np.sqrt(1.0 + 4.0 * gap / 9.0))


def tv_upper_bound(dH_a, dH_b):
    """Upper bound on the total variation between two densities sharing the
    same moments, given their entropy gaps to the entropy maximizer."""
    if dH_a < 0 or dH_b < 0:
        raise NegativeGap(f"entropy gaps must be nonnegative, got {dH_a}, {dH_b}")
    return float(min(_tv_term(dH_a) + _tv_term(dH_b), 1.0))


def mode_bound(n, d):
    """Largest mode count allowed for an order-``n`` estimate in dimension ``d``."""
    return (n * (n - 1)) ** d


class ModeCount(NamedTuple):
    count: int
    plateau: bool


def _grid_maxima(v, rtol):
    top = rtol * max(abs(float(v.max())), 1.0)
    strict = np.ones(v.shape, dtype=bool)
    weak = np.ones(v.shape, dtype=bool)
    d = v.ndim
    for shift in np.ndindex(*(3,) * d):
        off = tuple(s - 1 for s in shift)
        if not any(off):
            continue
        nb = np.roll(v, off, axis=tuple(range(d)))
        strict &= v > nb + top
        weak &= v >= nb - top
    return strict, weak


def _log_density_and_grad(phi):
    """Closure returning ``(-log Phi(theta), -grad log Phi(theta))`` at any theta."""
    K = phi.omega.members.astype(float)
    pos = tuple(K.astype(int).T + phi.omega.n)
    pc, qc = phi.p.box[pos], phi.lam.box[pos]

    def fg(theta):
        e = np.exp(-1j * (K @ theta))
        P, Q = float((pc * e).sum().real), float((qc * e).sum().real)
        if P <= 0 or Q <= 0:
            return np.inf, np.zeros_like(theta)
        dP = ((-1j * pc * e) @ K).real
        dQ = ((-1j * qc * e) @ K).real
        return -(np.log(P) - np.log(Q)), -(dP / P - dQ / Q)

    return fg


def _polish(phi, starts, spacing):
    """Hill-climb from each grid maximum and merge the peaks reached."""
    fg = _log_density_and_grad(phi)
    peaks = []
    for x0 in starts:
        res = minimize(fg, x0, jac=True, method="BFGS", options={"gtol": 1e-10, "maxiter": 200})
        x = np.mod(res.x + np.pi, 2 * np.pi) - np.pi
        for q in peaks:
            gap = np.abs(np.mod(x - q + np.pi, 2 * np.pi) - np.pi)
            if np.max(gap) < 0.5 * spacing:
                break
        else:
            peaks.append(x)
    return len(peaks)


def count_modes(phi, grid=None, rtol=1e-12, refine=True):
    """Count the modes (strict local maxima) of a density.

    Candidates are grid nodes that exceed all ``3**d - 1`` periodic
    neighbours.  For a rational density with ``refine=True`` each candidate
    is then hill-climbed on the continuous function and candidates that
    reach the same peak are merged; thin ridges otherwise show up as
    several adjacent grid maxima.  A flat density counts zero modes with
    the ``plateau`` flag set; so does any top-level tie between neighbours.
    """
    f = _as_grid_function(phi, grid)
    v = np.asarray(f.values, dtype=float)
    span = float(v.max() - v.min())
    if span <= rtol * max(abs(float(v.max())), 1.0):
        return ModeCount(0, True)
    strict, weak = _grid_maxima(v, rtol)
    plateau = bool(np.any(weak & ~strict))
    if not refine or isinstance(phi, GridFunction):
        return ModeCount(int(strict.sum()), plateau)
    starts = [np.array([f.grid.axis[i] for i in idx]) for idx in np.argwhere(strict)]
    return ModeCount(_polish(phi, starts, 2 * np.pi / f.grid.m), plateau)


def shannon_maxent(c, grid, tol=1e-10, max_iters=2000):
    """Entropy-maximizing density matching the moments ``c`` on ``grid``.

    The maximizer is ``exp(S(theta))`` with ``S`` a real trigonometric
    polynomial over the index set; its coefficients minimize the convex
    function ``integrate(exp(S)) - sum_k s_k c_{-k}``.
    """
    omega = c.omega
    c_mirror = omega.mirror(c.box)

    def evaluate_dual(x):
        s = StructuredLagrangian.from_params(omega, x)
        S = trig_poly_values(s.box, grid, omega).real
        if np.max(S) > 700:
            return np.inf, None
        E = np.exp(S)
        f = float(E.mean()) - float(np.sum(s.box * c_mirror).real)
        return f, _chart(fourier_box(E, grid, omega) - c.box, omega)

    x0 = StructuredLagrangian.constant(omega, np.log(c.c0)).to_params()

    def stop(x, f, g):
        return np.max(np.abs(g)) <= tol * c.c0

    res = minimize_bfgs(evaluate_dual, x0, stop, max_iters=max_iters)
    if not res.converged:
        raise MaxIterations(f"entropy maximization stopped: {res.message}")
    s = StructuredLagrangian.from_params(omega, res.x)
    return GridFunction(grid, np.exp(trig_poly_values(s.box, grid, omega).real))
