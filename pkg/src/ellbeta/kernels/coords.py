"""Coordinate views that kernels are evaluated on.

A kernel is written once against the small interface ``n`` /
``apply(fn, c)``: ``apply`` evaluates a one-argument function at the
monomial prod z_i^{c_i} (multiplicative coordinates) or the linear form
sum c_i u_i (additive coordinates).  ``c`` is an integer vector of length n.

* :class:`Points` holds explicit, broadcastable coordinate arrays.  Passing
  an open grid (shapes (N,1), (1,N), ...) keeps one-variable factors at O(N)
  cost automatically.
* :class:`TorusGrid` is a tensor grid of M-th roots of unity given by integer
  indices.  Any integer monomial of grid points is again a grid point, so
  ``apply`` evaluates ``fn`` once on the M roots and gathers by index: factors
  such as Gamma(z_i/z_j) cost O(M) instead of O(M^2).
"""

from __future__ import annotations

import numpy as np


def unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=int)
    e[i] = 1
    return e


class Points:
    def __init__(self, values, additive: bool = False):
        self.values = [np.asarray(v, dtype=np.complex128) for v in values]
        self.n = len(self.values)
        self.additive = additive

    def combine(self, c):
        if self.additive:
            out = np.zeros((), dtype=np.complex128)
            for ci, v in zip(c, self.values):
                if ci:
                    out = out + ci * v
            return out
        out = np.ones((), dtype=np.complex128)
        for ci, v in zip(c, self.values):
            if ci:
                out = out * v ** int(ci)
        return out

    def apply(self, fn, c):
        return fn(self.combine(c))

    def shape(self):
        return np.broadcast_shapes(*(v.shape for v in self.values))


class TorusGrid:
    """Points z_i = exp(2 pi i k_i / M) with broadcastable index arrays k_i."""

    additive = False

    def __init__(self, M: int, indices, cache=None):
        self.M = int(M)
        self.indices = [np.asarray(k, dtype=np.int64) for k in indices]
        self.n = len(self.indices)
        self.roots = np.exp(2j * np.pi * np.arange(self.M) / self.M)
        self.cache = cache

    def _index(self, c):
        out = np.zeros((), dtype=np.int64)
        for ci, k in zip(c, self.indices):
            if ci:
                out = out + int(ci) * k
        return out % self.M

    def combine(self, c):
        return self.roots[self._index(c)]

    def apply(self, fn, c):
        if not np.any(c):
            return fn(np.ones((), dtype=np.complex128))
        key = (fn.__code__, self.M)
        vals = None if self.cache is None else self.cache.get(key)
        if vals is None:
            vals = np.asarray(fn(self.roots))
            if self.cache is not None:
                self.cache[key] = vals
        return vals[self._index(c)]

    def shape(self):
        return np.broadcast_shapes(*(k.shape for k in self.indices))


class LineGrid:
    """Additive points u_i = origin + k_i * step with broadcastable integer k_i.

    A linear form sum c_i u_i equals (sum c_i) origin + (sum c_i k_i) step, so
    ``apply`` evaluates ``fn`` once on the range of integers sum c_i k_i can
    take and gathers, the additive analogue of :class:`TorusGrid`.
    """

    additive = True

    def __init__(self, origin: complex, step: complex, indices, extent=None, cache=None):
        self.origin = complex(origin)
        self.step = complex(step)
        self.indices = [np.asarray(k, dtype=np.int64) for k in indices]
        self.n = len(self.indices)
        # with every k_i known to lie in [0, extent], the table of fn values
        # can be built once for the whole grid and shared through ``cache``
        self.extent = extent
        self.cache = cache

    def _index(self, c):
        out = np.zeros((), dtype=np.int64)
        for ci, k in zip(c, self.indices):
            if ci:
                out = out + int(ci) * k
        return out

    def combine(self, c):
        return int(np.sum(c)) * self.origin + self._index(c) * self.step

    def apply(self, fn, c):
        if not np.any(c):
            return fn(np.zeros((), dtype=np.complex128))
        idx = self._index(c)
        if self.extent is None:
            lo, hi = int(idx.min()), int(idx.max())
        else:
            lo = sum(min(0, int(ci)) for ci in c) * self.extent
            hi = sum(max(0, int(ci)) for ci in c) * self.extent
        total = int(np.sum(c))
        key = (fn.__code__, total, lo, hi, self.origin, self.step)
        vals = None if self.cache is None else self.cache.get(key)
        if vals is None:
            vals = np.asarray(fn(total * self.origin + np.arange(lo, hi + 1) * self.step))
            if self.cache is not None:
                self.cache[key] = vals
        return vals[idx - lo]

    def shape(self):
        return np.broadcast_shapes(*(k.shape for k in self.indices))
