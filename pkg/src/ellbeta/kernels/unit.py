"""Kernels on additive variables: G-built (unit circle) and S-built (q-reduced).

Each q-reduced kernel is its unit-circle partner with every G replaced by
1/S, so one builder per root system serves both.  It is parametrised by

* ``lg(x)``: log G(x), or -log S(x);
* ``lpair(x)``: log of 1/(G(x) G(-x)), or log S(x) S(-x).

Both pair functions are evaluated in closed form (theta functions in the
modular variable, resp. the reflection formula), so the kernels stay finite
where G(x) G(-x) has a pole at x = 0.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DomainError
from ..special import (
    TWO_PI_I,
    BaseSet,
    OmegaTriple,
    log_double_sine,
    log_double_sine_pair,
    log_modified_gamma,
    log_modified_gamma_pair_inv,
    poly_p,
)
from .coords import Points, unit
from .elliptic import _exp, log_delta_dn, log_rho_an, log_rho_cn
from .params import AnParams, CnParams, DnParams, ModifiedParams, QReducedParams, RootSystem


def _stacked(fn):
    def total(args):
        arrs = np.broadcast_arrays(*[np.asarray(a, dtype=np.complex128) for a in args])
        return fn(np.stack(arrs)).sum(axis=0)

    return total


def _vec(root, n, i):
    if root is RootSystem.CN or i < n:
        return unit(n, i)
    return -np.ones(n, dtype=int)


def _log_kernel(X, par, lg, lpair):
    """Shared log-kernel for the three root systems; ``lg`` sums over a list."""
    root, g, h, n = par.root, par.g, par.h, par.n
    total = 0
    if root is RootSystem.CN:
        A = par.F
        total = lg([A - gm for gm in g]) - lg([g[m] + g[s] for m, s in combinations(range(len(g)), 2)])

        def f(u):
            return lg([gm + u for gm in g] + [gm - u for gm in g]) - lg([A + u, A - u]) + lpair(2 * u)

        for i in range(n):
            total = total + X.apply(f, unit(n, i))
        for i, j in combinations(range(n), 2):
            total = total + X.apply(lpair, unit(n, i) + unit(n, j)) + X.apply(lpair, unit(n, i) - unit(n, j))
        return total

    F, H = par.F, par.H
    nv = n + 1
    if root is RootSystem.AN:
        total = lg([H + gi for gi in g]) - lg([gi + hj for gi in g for hj in h]) - lg([F])
        total = total + lg([F + H - hj for hj in h]) - lg([H - hj for hj in h])

        def f(u):
            return lg([gm - u for gm in g] + [hj + u for hj in h]) - lg([F + H + u])

        for i in range(nv):
            total = total + X.apply(f, _vec(root, n, i))
        for i, j in combinations(range(nv), 2):
            total = total + X.apply(lpair, _vec(root, n, i) - _vec(root, n, j))
        return total

    total = lg([F + hm - gj for gj in g for hm in h]) - lg([hm + gj for gj in g for hm in h])
    total = total - lg([F - g[j] - g[k] for j, k in combinations(range(len(g)), 2)])

    def f(u):
        return lg([hm + u for hm in h] + [gj - u for gj in g]) - lg([F + hm - u for hm in h])

    def cross(x):
        return lg([F - x])

    for i in range(nv):
        total = total + X.apply(f, _vec(root, n, i))
    for i, j in combinations(range(nv), 2):
        total = total + X.apply(cross, _vec(root, n, i) + _vec(root, n, j))
        total = total + X.apply(lpair, _vec(root, n, i) - _vec(root, n, j))
    return total


def _additive(u):
    if np.ndim(u) == 0:
        u = [u]
    return Points(list(u), additive=True)


# ---------------------------------------------------------------------------
# unit-circle (G) kernels


def log_rho_modified(X, par: ModifiedParams, path="auto"):
    w = par.w
    lg = _stacked(lambda x: log_modified_gamma(x, w, path))
    lpair = lambda x: log_modified_gamma_pair_inv(x, w)  # noqa: E731
    return _log_kernel(X, par, lg, lpair)


def rho_modified(u, par: ModifiedParams, path="auto"):
    """The G-built kernel of the family selected by ``par.root`` at u = (u_1..u_n)."""
    return _exp(log_rho_modified(_additive(u), par, path))


def modular_bases(w: OmegaTriple) -> BaseSet:
    """(r~, p~) as the (q, p) of the multiplicative kernels after z = e(-u/omega3)."""
    b = w.bases()
    if not (abs(b.r_tilde) < 1 and abs(b.p_tilde) < 1):
        raise DomainError("the modular substitution needs |r~|, |p~| < 1")
    return BaseSet(b.r_tilde, b.p_tilde)


def multiplicative_partner(par: ModifiedParams):
    """The elliptic-gamma parameter set the G-kernel maps to under z = e(-u/omega3)."""
    t, s = par.multiplicative()
    if par.root is RootSystem.CN:
        return CnParams(par.n, t)
    if par.root is RootSystem.AN:
        return AnParams(par.n, t, s)
    # the D-type kernel takes its n t's from h and its n+3 s's from g
    return DnParams(par.n, s, t)


def modular_phase(par: ModifiedParams) -> complex:
    """e^{-pi i n P(0)}: kernel(u) = phase * Gamma-kernel(e(-u/omega3)) for every family."""
    return complex(np.exp(-1j * np.pi * par.n * poly_p(0.0, par.w)))


def log_rho_modified_via_torus(Z, par: ModifiedParams):
    """log of the G-kernel through its multiplicative partner at z = e(-u/omega3)."""
    mpar = multiplicative_partner(par)
    b = modular_bases(par.w)
    phase = -1j * np.pi * par.n * poly_p(0.0, par.w)
    fn = {RootSystem.CN: log_rho_cn, RootSystem.AN: log_rho_an, RootSystem.DN: log_delta_dn}[par.root]
    return phase + fn(Z, mpar, b)


def rho_modified_via_torus(u, par: ModifiedParams):
    u = np.atleast_1d(np.asarray(u, dtype=np.complex128)) if np.ndim(u) == 0 else u
    z = [np.exp(-TWO_PI_I * np.asarray(ui, dtype=np.complex128) / par.w.omega3) for ui in u]
    return _exp(log_rho_modified_via_torus(Points(z), par))


# ---------------------------------------------------------------------------
# q-reduced (S) kernels


def log_rho_qreduced(X, par: QReducedParams):
    w = par.w
    lg = _stacked(lambda x: -log_double_sine(x, w))
    lpair = lambda x: log_double_sine_pair(x, w)  # noqa: E731
    return _log_kernel(X, par, lg, lpair)


def rho_qreduced(u, par: QReducedParams):
    """The S-built kernel of the family selected by ``par.root``."""
    return _exp(log_rho_qreduced(_additive(u), par))


def _e(x, w2):
    return np.exp(TWO_PI_I * np.asarray(x, dtype=np.complex128) / w2)


def cert_f_qreduced(i: int, u, par: QReducedParams):
    """Certificate f_i (0-based) of the omega1-shift equation of the S-kernels (C and A only)."""
    if par.root is RootSystem.DN:
        raise NotImplementedError("no certificate is available for the D-type q-reduced kernel")
    u = [np.asarray(v, dtype=np.complex128) for v in (u if np.ndim(u) else [u])]
    w2 = par.w.omega2
    rho = rho_qreduced(u, par)
    z = [_e(v, w2) for v in u]
    t = [complex(_e(x, w2)) for x in par.g]
    t1 = t[0]
    zi = z[i]
    if par.root is RootSystem.CN:
        A = complex(_e(par.F, w2))
        out = rho
        for j, zj in enumerate(z):
            if j != i:
                out = out * (1 - t1 * zj) * (1 - t1 / zj) / ((1 - zi * zj) * (1 - zi / zj))
        out = out * np.prod([1 - tj * zi for tj in t], axis=0) / np.prod([1 - t1 * tj for tj in t[1:]])
        return out * (1 - t1 * A) * t1 / ((1 - zi * zi) * (1 - A * zi) * zi)
    s = [complex(_e(x, w2)) for x in par.h]
    T, S = complex(np.prod(t)), complex(np.prod(s))
    zf = z + [1.0 / np.prod(np.broadcast_arrays(*z), axis=0)]
    out = rho
    for j, zj in enumerate(zf):
        if j != i:
            out = out * (1 - t1 / zj) / (1 - zi / zj)
    out = out * np.prod([1 - zi * sj for sj in s], axis=0) / np.prod([1 - t1 * sj for sj in s])
    return out * (1 - zi * T / t1) * (1 - T * S * t1) * t1 / ((1 - T) * (1 - T * S * zi) * zi)
