"""Equispaced quadrature on the torus, the segment [-omega3/2, omega3/2] and the line i*omega2*R.

Integrands are analytic and periodic on the torus and the segment, so the
trapezoid rule converges geometrically.  Grids are refined by doubling and
the samples of the coarser grid are reused: the new points of a doubled
tensor grid split into the 2^n - 1 sub-grids whose index parity vector is
nonzero.

Kernel handles are callables ``f(X)`` taking a coordinate view (see
:mod:`ellbeta.kernels.coords`) and returning the integrand on it, or its
logarithm when ``log_values=True``.

Sums are deterministic: every sub-grid is cut into chunks whose layout only
depends on the grid, each chunk is summed with ``math.fsum`` and the chunk
totals are combined in chunk order, so the number of worker threads cannot
change a single bit of the result.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import ConfigError
from .kernels.coords import LineGrid, TorusGrid

WORKERS_ENV = "ELLBETA_WORKERS"
_CHUNK_POINTS = 1 << 16


@dataclass(frozen=True)
class GridOptions:
    initial_points: int = 64
    max_points: Optional[int] = None
    rel_tol: float = 1e-9
    line_halfwidth: Optional[float] = None

    def __post_init__(self):
        if self.initial_points < 16 or self.initial_points % 2:
            raise ConfigError("initial_points must be even and >= 16")
        if self.max_points is not None and self.max_points < self.initial_points:
            raise ConfigError("max_points must be >= initial_points")
        if not 0 < self.rel_tol < 1:
            raise ConfigError("rel_tol must lie in (0, 1)")
        if self.line_halfwidth is not None and self.line_halfwidth <= 0:
            raise ConfigError("line_halfwidth must be positive")

    def max_for(self, n: int) -> int:
        if self.max_points is not None:
            return self.max_points
        return {1: 4096, 2: 1024}.get(n, 128)


@dataclass
class QuadratureResult:
    value: complex
    err_estimate: float
    points_per_dim: int
    converged: bool
    history: List[complex] = field(default_factory=list)
    halfwidth: Optional[float] = None
    boundary_ratio: Optional[float] = None


def worker_count() -> int:
    """Threads used for grid evaluation, from the environment (0 or unset = auto)."""
    raw = os.environ.get(WORKERS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ConfigError(f"{WORKERS_ENV} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _fsum_complex(values) -> complex:
    v = np.asarray(values).ravel()
    return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))


class _Engine:
    """Evaluates a kernel over sub-grids given by 1-D index vectors per axis."""

    def __init__(self, f: Callable, log_values: bool, make_view: Callable, workers: int):
        self.f = f
        self.log_values = log_values
        self.make_view = make_view
        self.workers = workers
        self.cache: dict = {}

    def _eval(self, axes):
        n = len(axes)
        idx = [a.reshape((1,) * d + (-1,) + (1,) * (n - 1 - d)) for d, a in enumerate(axes)]
        vals = self.f(self.make_view(idx, self.cache))
        vals = np.broadcast_to(vals, tuple(len(a) for a in axes))
        if self.log_values:
            vals = np.exp(vals)
        return vals

    def _chunk_sum(self, axes):
        return _fsum_complex(self._eval(axes))

    def sum_grid(self, axes) -> complex:
        """Deterministic sum of the integrand over the tensor product of ``axes``."""
        rest = int(np.prod([len(a) for a in axes[1:]])) if len(axes) > 1 else 1
        rows = max(1, _CHUNK_POINTS // max(rest, 1))
        first = axes[0]
        chunks = [[first[i : i + rows]] + list(axes[1:]) for i in range(0, len(first), rows)]
        if self.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(self._chunk_sum, chunks))
        else:
            parts = [self._chunk_sum(c) for c in chunks]
        return _fsum_complex(np.array(parts, dtype=np.complex128))

    def sample(self, axes):
        return self._eval(axes)


def _refine(engine: _Engine, n: int, level_axes: Callable, N0: int, Nmax: int, weight: Callable, rel_tol: float):
    """Nested doubling driver shared by the three contours.

    ``level_axes(N, parity)`` gives the 1-D index vector of one axis at
    resolution N restricted to the given parity (parity None = full axis).
    ``weight(N)`` is the per-sample weight.
    """
    N = N0
    total = engine.sum_grid([level_axes(N, None)] * n)
    value = weight(N) * total
    history = [value]
    converged = False
    err = float("inf")
    while N < Nmax:
        N2 = 2 * N
        new = 0j
        for par in itertools.product((0, 1), repeat=n):
            if not any(par):
                continue
            new += engine.sum_grid([level_axes(N2, pi) for pi in par])
        total = total + new
        N = N2
        prev, value = value, weight(N) * total
        history.append(value)
        err = abs(value - prev)
        if err < rel_tol * (1 + abs(value)):
            converged = True
            break
    return QuadratureResult(value, err, N, converged, history)


def torus_integrate(f: Callable, n: int, opt: GridOptions = GridOptions(), *, log_values: bool = False) -> QuadratureResult:
    """Integral over T^n of f(z) prod dz_i / z_i by the periodic trapezoid rule."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    state = {"N": opt.initial_points}

    def make_view(idx, cache):
        return TorusGrid(state["N"], idx, cache=cache)

    engine = _Engine(f, log_values, make_view, worker_count())

    def level_axes(N, parity):
        state["N"] = N
        if parity is None:
            return np.arange(N)
        return np.arange(parity, N, 2)

    return _refine(engine, n, level_axes, opt.initial_points, opt.max_for(n), lambda N: (2j * math.pi / N) ** n, opt.rel_tol)


def segment_grid_integrate(f: Callable, n: int, w, opt: GridOptions = GridOptions(), *, log_values: bool = True) -> QuadratureResult:
    """Integral over u_i in [-omega3/2, omega3/2] of f(u) prod du_i / omega2 (uniform periodic grid)."""
    workers = worker_count()
    state = {"N": opt.initial_points}

    def make_view(idx, cache):
        N = state["N"]
        return LineGrid(-w.omega3 / 2, w.omega3 / N, idx, extent=N - 1, cache=cache)

    engine = _Engine(f, log_values, make_view, workers)

    def level_axes(N, parity):
        state["N"] = N
        if parity is None:
            return np.arange(N)
        return np.arange(parity, N, 2)

    return _refine(engine, n, level_axes, opt.initial_points, opt.max_for(n), lambda N: (w.omega3 / (N * w.omega2)) ** n, opt.rel_tol)


def default_halfwidth(w, rel_tol: float) -> float:
    """X with exp(-2 pi (1 + Re(omega2/omega1)) X) = rel_tol / 10."""
    rate = 2 * math.pi * (1 + (w.omega2 / w.omega1).real)
    if rate <= 0:
        raise ConfigError("line truncation needs 1 + Re(omega2/omega1) > 0")
    return math.log(10.0 / rel_tol) / rate


def _boundary_ratio(f, n, w, X, N, log_values) -> float:
    """max |f| on the faces x_i = +-X relative to the max over the coarse grid."""
    step = 2 * X / N

    def view(idx):
        return LineGrid(-1j * w.omega2 * X, 1j * w.omega2 * step, idx)

    full = np.arange(N + 1)

    def absvals(axes):
        idx = [a.reshape((1,) * d + (-1,) + (1,) * (n - 1 - d)) for d, a in enumerate(axes)]
        v = np.asarray(f(view(idx)))
        return np.exp(v.real) if log_values else np.abs(v)

    peak = float(np.max(absvals([full] * n)))
    edge = 0.0
    for d in range(n):
        for end in (0, N):
            axes = [full] * n
            axes[d] = np.array([end])
            edge = max(edge, float(np.max(absvals(axes))))
    return edge / peak if peak > 0 else 0.0


def line_integrate(f: Callable, n: int, w, opt: GridOptions = GridOptions(), *, log_values: bool = True,
                   max_widenings: int = 6) -> QuadratureResult:
    """Integral over u_i = i omega2 x_i, x_i in [-X, X], of f(u) prod du_i / omega2.

    X comes from the decay rate of the q-reduced kernels unless
    ``opt.line_halfwidth`` is given.  Before integrating, the integrand on
    the faces of the cube must be below rel_tol/10 of its peak; the window
    is widened by 25% at a time until it is (at most ``max_widenings`` times),
    otherwise the result is flagged unconverged.
    """
    X = opt.line_halfwidth or default_halfwidth(w, opt.rel_tol)
    N0 = opt.initial_points
    ratio = _boundary_ratio(f, n, w, X, N0, log_values)
    widen = 0
    while ratio > opt.rel_tol / 10 and widen < max_widenings:
        X *= 1.25
        widen += 1
        ratio = _boundary_ratio(f, n, w, X, N0, log_values)
    workers = worker_count()
    state = {"N": N0}

    def make_view(idx, cache):
        N = state["N"]
        return LineGrid(-1j * w.omega2 * X, 1j * w.omega2 * (2 * X / N), idx, extent=N, cache=cache)

    engine = _Engine(f, log_values, make_view, workers)

    def level_axes(N, parity):
        state["N"] = N
        if parity is None:
            return np.arange(N + 1)
        return np.arange(parity, N + 1, 2)

    res = _refine(engine, n, level_axes, N0, opt.max_for(n), lambda N: (1j * 2 * X / N) ** n, opt.rel_tol)
    res.halfwidth = X
    res.boundary_ratio = ratio
    if ratio > opt.rel_tol / 10:
        res.converged = False
    return res
