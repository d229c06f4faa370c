"""Trigonometric moment sequences, lag-sum estimators and the moment matrix.

The moment ``c_k`` is the k-th Fourier coefficient ``integrate(exp(i(k, theta)) Phi)``.
From an observation record ``y_t`` on the box ``{0..N-1}^d`` the estimators
use the lag sums ``sum_t y_t conj(y_{t+k})`` over pairs that stay inside
the box.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, InsufficientData
from .indexing import MultiIndexSet


@dataclass
class MomentSequence:
    """Moments over the full box, stored as a box array.

    Sequences produced by the estimators are exactly Hermitian
    (``c[-k] == conj(c[k])``); sequences obtained by quadrature of a
    real-valued function are Hermitian up to rounding.
    """

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
    def from_mapping(cls, omega, mapping):
        """Build from ``{k: c_k}`` over (part of) the half-set; missing entries are zero."""
        vals = np.zeros(len(omega.half), dtype=complex)
        lookup = {tuple(int(v) for v in k): i for i, k in enumerate(omega.half)}
        for k, v in mapping.items():
            k = (k,) if np.isscalar(k) else tuple(k)
            vals[lookup[k]] = v
        return cls.from_half(omega, vals)

    def __getitem__(self, k):
        k = (k,) if np.isscalar(k) else tuple(k)
        return complex(self.box[self.omega.box_index(k)])

    @property
    def values(self):
        """Moments on the canonical half-set, in ``omega.half`` order."""
        return self.box[self.omega.half_positions()]

    @property
    def c0(self):
        return float(self.box[(self.omega.n,) * self.omega.d].real)

    def hermitian_defect(self):
        return float(np.max(np.abs(self.box - np.conj(self.omega.mirror(self.box)))))

    def scaled(self, factor):
        return MomentSequence(self.omega, self.box * factor)


@dataclass
class LatticeField:
    """Complex samples ``y_t`` on ``{0..N-1}^d``, stored with shape ``(N,)*d``."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if len(set(self.values.shape)) > 1:
            raise ValueError(f"field must be a hypercube, got shape {self.values.shape}")

    @property
    def d(self):
        return self.values.ndim

    @property
    def N(self):
        return self.values.shape[0]


def lag_sums(field, omega):
    """Raw lag sums ``S_k = sum_t y_t conj(y_{t+k})`` for k on the half-set,
    mirrored to the full box by conjugation."""
    y = field.values
    if field.d != omega.d:
        raise ValueError(f"field dimension {field.d} != index set dimension {omega.d}")
    N = field.N
    if N <= omega.n:
        raise InsufficientData(f"N={N} samples per axis cannot resolve lags up to {omega.n}")
    out = np.empty(len(omega.half), dtype=complex)
    for i, k in enumerate(omega.half):
        src, dst = [], []
        for kj in k:
            if kj >= 0:
                src.append(slice(0, N - kj))
                dst.append(slice(kj, N))
            else:
                src.append(slice(-kj, N))
                dst.append(slice(0, N + kj))
        out[i] = np.vdot(y[tuple(dst)], y[tuple(src)])
    return omega.hermitian_from_half(out)


def estimate_biased(field, omega):
    """Biased estimate: lag sums normalized by ``N**d``."""
    S = lag_sums(field, omega)
    return MomentSequence(omega, S / float(field.N) ** field.d)


def estimate_unbiased(field, omega):
    """Unbiased estimate: lag sums normalized by ``prod_j (N - |k_j|)``."""
    S = lag_sums(field, omega)
    per_axis = field.N - np.abs(np.arange(-omega.n, omega.n + 1))
    norm = np.ones(omega.box_shape)
    for ax in range(omega.d):
        shape = [1] * omega.d
        shape[ax] = -1
        norm = norm * per_axis.reshape(shape)
    return MomentSequence(omega, S / norm)


def assemble_moment_matrix(c):
    """Structured matrix with entry ``(i, j) = c[kappa(i) - kappa(j)]``."""
    return c.box[c.omega.difference_index]


def is_positive_definite(T, rtol=1e-10):
    """Eigenvalue test ``lambda_min > rtol * lambda_max``.

    Returns ``(flag, lambda_min)``.
    """
    T = np.asarray(T)
    ev = np.linalg.eigvalsh(0.5 * (T + T.conj().T))
    lmin, lmax = float(ev[0]), float(ev[-1])
    return bool(lmax > 0 and lmin > rtol * lmax), lmin


def select_statistic(field, omega, rtol=1e-10):
    """Pick the unbiased estimate when its moment matrix is positive definite,
    otherwise fall back to the biased one.

    Returns ``(moments, branch)`` with ``branch`` in ``{"unbiased", "biased"}``.
    """
    cu = estimate_unbiased(field, omega)
    ok, _ = is_positive_definite(assemble_moment_matrix(cu), rtol)
    if ok:
        return cu, "unbiased"
    cb = estimate_biased(field, omega)
    ok, lmin = is_positive_definite(assemble_moment_matrix(cb), rtol)
    if ok:
        return cb, "biased"
    raise DegenerateData(f"neither statistic gives a positive definite moment matrix (lambda_min={lmin:.3e})")

