"""Multi-index algebra for the symmetric box index set.

The index set is ``{k in Z^d : |k_j| <= n}``.  Coefficient sequences indexed
by it are stored as dense "box arrays" of shape ``(2n+1,)*d`` where the entry
for ``k`` lives at ``box[k + n]``.

The flat map ``kappa`` enumerates the nonnegative box ``{0..n}^d`` in
row-major order with axis 1 slowest; it is the ordering of the Kronecker
basis ``K(theta) = K(theta_1) (x) ... (x) K(theta_d)``.
"""
from dataclasses import dataclass
from functools import cached_property
import itertools

import numpy as np

from .errors import IndexOutOfOmega


@dataclass(frozen=True)
class MultiIndexSet:
    """Full box index set of per-axis order ``n`` in dimension ``d``."""

    d: int
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if self.n < 0:
            raise ValueError(f"order must be nonnegative, got {self.n}")

    @property
    def box_shape(self):
        return (2 * self.n + 1,) * self.d

    @property
    def size(self):
        return (2 * self.n + 1) ** self.d

    @property
    def basis_size(self):
        """Length of the Kronecker basis vector, ``(n+1)^d``."""
        return (self.n + 1) ** self.d

    @cached_property
    def members(self):
        """All multi-indices, shape ``(size, d)``, row-major over [-n, n]^d."""
        axis = range(-self.n, self.n + 1)
        return np.array(list(itertools.product(axis, repeat=self.d)), dtype=int).reshape(-1, self.d)

    @cached_property
    def half(self):
        """Canonical half-set: ``0`` first, then every k whose first nonzero
        component is positive, in row-major order."""
        keep = [np.zeros(self.d, dtype=int)]
        for k in self.members:
            nz = np.flatnonzero(k)
            if nz.size and k[nz[0]] > 0:
                keep.append(k)
        return np.array(keep, dtype=int)

    @cached_property
    def kappa_table(self):
        """Row ``i`` is ``kappa(i)``, a multi-index in ``{0..n}^d``."""
        axis = range(self.n + 1)
        return np.array(list(itertools.product(axis, repeat=self.d)), dtype=int).reshape(-1, self.d)

    def kappa(self, i):
        return tuple(int(v) for v in self.kappa_table[i])

    def contains(self, k):
        k = np.asarray(k)
        return k.shape == (self.d,) and bool(np.all(np.abs(k) <= self.n))

    def box_index(self, k):
        """Tuple index into a box array for multi-index ``k``."""
        if not self.contains(k):
            raise IndexOutOfOmega(f"{tuple(np.asarray(k).tolist())} not in box of order {self.n}")
        return tuple(int(v) + self.n for v in k)

    def card_N(self, k):
        """Number of matrix positions ``(i, j)`` with ``kappa(i) - kappa(j) = k``."""
        idx = self.box_index(k)
        return int(np.prod([self.n + 1 - abs(v - self.n) for v in idx]))

    @cached_property
    def card_box(self):
        """``card_N`` for every k, as a box array."""
        per_axis = self.n + 1 - np.abs(np.arange(-self.n, self.n + 1))
        out = np.ones(self.box_shape, dtype=int)
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = -1
            out = out * per_axis.reshape(shape)
        return out

    def pair_difference(self, i, j):
        return tuple(int(v) for v in self.kappa_table[i] - self.kappa_table[j])

    @cached_property
    def difference_index(self):
        """Box-array index of ``kappa(i) - kappa(j)`` for every pair.

        A tuple of ``d`` integer arrays of shape ``(B, B)`` with
        ``B = (n+1)^d``, usable for fancy indexing: ``box[difference_index]``
        yields the matrix with entry ``(i, j) = box[kappa(i) - kappa(j)]``.
        """
        diff = self.kappa_table[:, None, :] - self.kappa_table[None, :, :] + self.n
        return tuple(diff[..., ax] for ax in range(self.d))

    def half_positions(self):
        """Box indices (tuple of arrays) of the half-set members."""
        h = self.half + self.n
        return tuple(h[:, ax] for ax in range(self.d))

    def mirror(self, box):
        """Box array ``b'`` with ``b'[k] = b[-k]``."""
        return np.flip(box, axis=tuple(range(self.d)))

    def hermitian_from_half(self, values):
        """Build a Hermitian box array (``b[-k] = conj(b[k])``) from half-set values."""
        values = np.asarray(values, dtype=complex)
        if values.shape != (len(self.half),):
            raise ValueError(f"expected {len(self.half)} half-set values, got shape {values.shape}")
        box = np.zeros(self.box_shape, dtype=complex)
        pos = self.half_positions()
        box[pos] = values
        neg = tuple(2 * self.n - p for p in pos)
        box[neg] = np.conj(values)
        # the zero index is its own mirror
        zero = (self.n,) * self.d
        box[zero] = values[0].real
        return box
