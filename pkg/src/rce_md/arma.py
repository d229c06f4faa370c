"""ARMA difference-equation form of a solved rational density.

With a known AR polynomial ``a`` the model is

    sum_{k in {0..n}^d} a_k y(t - k) = sum_{k in {0..n}^d} lambda*_k u(t - k),

i.e. the right-hand side carries the solved multipliers as lag weights
("lambda-weighted" form).  No spectral factorization is attempted; in
``d >= 2`` it does not exist in general.  Without an AR reference only the
coefficients are reported ("spectral-coefficient" form).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSolved
from .spectral import RationalSpectralDensity, verify_moments

LAMBDA_WEIGHTED = "lambda-weighted"
SPECTRAL_COEFFICIENT = "spectral-coefficient"


@dataclass
class ArmaModel:
    d: int
    n: int
    ar_taps: np.ndarray
    rhs_weights: np.ndarray
    form: str
    meta: dict = field(default_factory=dict)

    def lags(self):
        """Lags ``{0..n}^d`` in serialization order (axis 1 outermost)."""
        return list(np.ndindex(*(self.n + 1,) * self.d))

    def implied_density(self):
        """The rational density carried in ``meta`` (numerator and full multipliers)."""
        return self.meta["density"]


def extract_arma(phi_star, ar_reference=None, *, moments=None, grid=None, tol=1e-6):
    """Build the ARMA model of a solved density.

    Parameters
    ----------
    phi_star : RationalSpectralDensity
    ar_reference : FilterCoefficients, optional
        Known AR side; its ``a`` taps are normalized so ``a_0 = 1``.
    moments, grid : optional
        When given, the moment residual of ``phi_star`` is checked against
        ``tol`` and :class:`NotSolved` is raised if it is larger.
    """
    if not isinstance(phi_star, RationalSpectralDensity):
        raise TypeError("phi_star must be a RationalSpectralDensity")
    omega = phi_star.omega
    residual = None
    if moments is not None:
        residual = verify_moments(phi_star, moments, grid).linf
        if residual > tol:
            raise NotSolved(f"moment residual {residual:.3e} exceeds {tol:.1e}")
    n, d = omega.n, omega.d
    rhs = phi_star.lam.box[(slice(n, None),) * d].copy()
    if ar_reference is not None:
        a = np.asarray(ar_reference.a, dtype=complex)
        if a.shape != (n + 1,) * d:
            raise ValueError(f"AR reference has shape {a.shape}, expected {(n + 1,) * d}")
        a0 = a[(0,) * d]
        if a0 == 0:
            raise ValueError("AR reference has a zero leading tap")
        ar, form = a / a0, LAMBDA_WEIGHTED
    else:
        ar, form = None, SPECTRAL_COEFFICIENT
    meta = {"density": phi_star, "moment_residual": residual}
    return ArmaModel(d, n, ar, rhs, form, meta)
