"""Kernels and certificate functions built on Gamma(z; q, p).

Kernels are summed in log space; the ``log_*`` functions take a coordinate
view (see :mod:`ellbeta.kernels.coords`) so the same code serves point
evaluation and tensor-grid quadrature.  Pairs Gamma(x) Gamma(1/x) in a
denominator are replaced by the entire function theta(x; q) theta(1/x; p),
which keeps the kernels finite at z = +-1 and on the A_n diagonal.
"""

from __future__ import annotations

import enum
from itertools import combinations

import numpy as np

from ..errors import PoleError
from ..special import BaseSet, log_elliptic_gamma, log_gamma_pair_inv, log_theta, theta
from .coords import Points, unit
from .params import AnParams, AnSymParams, CnParams, DnParams, UnivariateParams


def _lg(args, b: BaseSet):
    """sum of log Gamma over a list of broadcast-compatible arguments."""
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=np.complex128) for a in args])
    return log_elliptic_gamma(np.stack(arrs), b.q, b.p).sum(axis=0)


def _pinv(x, b: BaseSet):
    return log_gamma_pair_inv(x, b.q, b.p)


def _points(z):
    """Coordinates (z_1, ..., z_n) of a multivariate kernel; each may be an array."""
    if np.ndim(z) == 0:
        z = [z]
    return Points(list(z))


def _scalar_points(z):
    """The single coordinate of a univariate kernel; any array shape is a batch of points."""
    return Points([z])


def _exp(logv):
    if np.any(np.isposinf(np.real(logv))):
        raise PoleError("kernel has a pole here (a Gamma factor in a denominator vanishes)")
    v = np.exp(logv)
    return complex(v) if np.ndim(v) == 0 else v


# ---------------------------------------------------------------------------
# univariate


def log_rho_univariate(X, par: UnivariateParams, b: BaseSet):
    t, A = par.t, par.A
    const = _lg([A / tm for tm in t], b) - _lg([t[m] * t[s] for m, s in combinations(range(5), 2)], b)

    def f(z):
        num = _lg([tm * z for tm in t] + [tm / z for tm in t], b)
        return num - _lg([A * z, A / z], b) + _pinv(z * z, b)

    return const + X.apply(f, unit(1, 0))


def rho_univariate(z, par: UnivariateParams, b: BaseSet):
    """The univariate kernel prod Gamma(t_m z^+-, A/t_m) / (Gamma(z^+-2, A z^+-) prod Gamma(t_m t_s))."""
    return _exp(log_rho_univariate(_scalar_points(z), par, b))


def cert_g_univariate(z, par: UnivariateParams, b: BaseSet):
    z = np.asarray(z, dtype=np.complex128)
    t, A, p = par.t, par.A, b.p
    logc = (
        sum(log_theta(tj * z, p) for tj in t)
        - sum(log_theta(t[0] * tj, p) for tj in t[1:])
        + log_theta(t[0] * A, p)
        - log_theta(z * z, p)
        - log_theta(A * z, p)
    )
    return _exp(log_rho_univariate(_scalar_points(z), par, b) + logc) * t[0] / z


def eqn_exp_univariate(z, par: UnivariateParams, b: BaseSet):
    """Both sides of the kernel difference equation divided by rho; returns (lhs, rhs)."""
    t, A, p = par.t, par.A, b.p
    th = lambda x: theta(x, p)  # noqa: E731
    pair = np.prod([th(A / tj) / th(t[0] * tj) for tj in t[1:]], axis=0)
    lhs = th(t[0] * z) * th(t[0] / z) / (th(A * z) * th(A / z)) * pair - 1
    pre = t[0] * th(t[0] * A) / (z * th(z * z) * np.prod([th(t[0] * tj) for tj in t[1:]], axis=0))
    inner = z**4 * np.prod([th(tj / z) for tj in t], axis=0) / th(A / z) - np.prod(
        [th(tj * z) for tj in t], axis=0
    ) / th(A * z)
    return lhs, pre * inner


# ---------------------------------------------------------------------------
# C_n


def log_rho_cn(X, par: CnParams, b: BaseSet):
    n, t, A = par.n, par.t, par.A
    M = len(t)
    const = _lg([A / tm for tm in t], b) - _lg([t[m] * t[s] for m, s in combinations(range(M), 2)], b)

    def f(z):
        num = _lg([tm * z for tm in t] + [tm / z for tm in t], b)
        return num - _lg([A * z, A / z], b) + _pinv(z * z, b)

    total = const
    for i in range(n):
        total = total + X.apply(f, unit(n, i))
    pinv = lambda x: _pinv(x, b)  # noqa: E731
    for i, j in combinations(range(n), 2):
        total = total + X.apply(pinv, unit(n, i) + unit(n, j)) + X.apply(pinv, unit(n, i) - unit(n, j))
    return total


def rho_cn(z, par: CnParams, b: BaseSet):
    """The C_n type I kernel at z = (z_1, ..., z_n)."""
    return _exp(log_rho_cn(_points(z), par, b))


def _cn_cert_log(i, z, par: CnParams, b: BaseSet):
    t, A, p = par.t, par.A, b.p
    zi = z[i]
    out = sum(log_theta(tj * zi, p) for tj in t) - sum(log_theta(t[0] * tj, p) for tj in t[1:])
    out = out + log_theta(t[0] * A, p) - log_theta(zi * zi, p) - log_theta(A * zi, p)
    for j, zj in enumerate(z):
        if j == i:
            continue
        out = out + log_theta(t[0] * zj, p) + log_theta(t[0] / zj, p)
        out = out - log_theta(zi * zj, p) - log_theta(zi / zj, p)
    return out


def cert_g_cn(i: int, z, par: CnParams, b: BaseSet):
    """Certificate g_i (0-based i) of the C_n difference equation."""
    z = [np.asarray(v, dtype=np.complex128) for v in z]
    logv = log_rho_cn(Points(z), par, b) + _cn_cert_log(i, z, par, b)
    return _exp(logv) * par.t[0] / z[i]


def eqn_exp_cn(z, par: CnParams, b: BaseSet):
    """Divided form of the C_n difference equation; returns (lhs, rhs)."""
    z = [np.asarray(v, dtype=np.complex128) for v in z]
    n, t, A, p = par.n, par.t, par.A, b.p
    th = lambda x: theta(x, p)  # noqa: E731
    lhs = np.prod([th(t[0] * zi) * th(t[0] / zi) / (th(A * zi) * th(A / zi)) for zi in z], axis=0)
    lhs = lhs * np.prod([th(A / tj) / th(t[0] * tj) for tj in t[1:]], axis=0) - 1
    pre = t[0] * th(t[0] * A) / np.prod([th(t[0] * tj) for tj in t[1:]], axis=0)
    total = 0
    for i, zi in enumerate(z):
        cross = 1
        for j, zj in enumerate(z):
            if j != i:
                cross = cross * th(t[0] * zj) * th(t[0] / zj) / (th(zi * zj) * th(zi / zj))
        a = zi ** (2 * n + 2) * np.prod([th(tj / zi) for tj in t], axis=0) / th(A / zi)
        c = np.prod([th(tj * zi) for tj in t], axis=0) / th(A * zi)
        total = total + cross * (a - c) / (zi * th(zi * zi))
    return lhs, pre * total


# ---------------------------------------------------------------------------
# A_n (z_{n+1} = 1 / (z_1 ... z_n))


def _last(n):
    return -np.ones(n, dtype=int)


def _an_vec(n, i):
    return _last(n) if i == n else unit(n, i)


def log_rho_an(X, par: AnParams, b: BaseSet):
    n, t, s, T, S = par.n, par.t, par.s, par.T, par.S
    const = -_lg([T], b)
    const = const + _lg([S * ti for ti in t] + [S * T / sj for sj in s], b)
    const = const - _lg([ti * sj for ti in t for sj in s] + [S / sj for sj in s], b)

    def f(z):
        return _lg([tm / z for tm in t] + [sj * z for sj in s], b) - _lg([T * S * z], b)

    total = const
    for i in range(n + 1):
        total = total + X.apply(f, _an_vec(n, i))
    pinv = lambda x: _pinv(x, b)  # noqa: E731
    for i, j in combinations(range(n + 1), 2):
        total = total + X.apply(pinv, _an_vec(n, i) - _an_vec(n, j))
    return total


def rho_an(z, par: AnParams, b: BaseSet):
    """The A_n type I kernel at z = (z_1, ..., z_n); z_{n+1} is implied."""
    return _exp(log_rho_an(_points(z), par, b))


def _full(z):
    z = [np.asarray(v, dtype=np.complex128) for v in z]
    return z + [1.0 / np.prod(np.broadcast_arrays(*z), axis=0)]


def _an_cert_log(i, zf, par: AnParams, b: BaseSet):
    t, s, T, S, p = par.t, par.s, par.T, par.S, b.p
    zi = zf[i]
    out = 0
    for j, zj in enumerate(zf):
        if j != i:
            out = out + log_theta(t[0] / zj, p) - log_theta(zi / zj, p)
    for sj in s:
        out = out + log_theta(zi * sj, p) - log_theta(t[0] * sj, p)
    out = out + log_theta(zi * T / t[0], p) + log_theta(T * S * t[0], p)
    return out - log_theta(T, p) - log_theta(T * S * zi, p)


def cert_g_an(i: int, z, par: AnParams, b: BaseSet):
    """Certificate g_i (0-based, i < n) of the A_n difference equation."""
    zf = _full(z)
    logv = log_rho_an(Points(zf[:-1]), par, b) + _an_cert_log(i, zf, par, b)
    return _exp(logv) * par.t[0] / zf[i]


def an_shift_ratio(i: int, z, par: AnParams, b: BaseSet):
    """rho(.., z_i/q, ..) / rho(z) from the closed theta expression."""
    zf = _full(z)
    n, t, s, T, S, q, p = par.n, par.t, par.s, par.T, par.S, b.q, b.p
    th = lambda x: theta(x, p)  # noqa: E731
    zi, zl = zf[i], zf[n]
    out = np.prod([th(sm * zl) / th(sm * zi / q) for sm in s], axis=0)
    out = out * np.prod([th(tj / zi) / th(tj / (q * zl)) for tj in t], axis=0)
    out = out * th(T * S * zi / q) / th(T * S * zl)
    for j in range(n):
        if j != i:
            zj = zf[j]
            out = out * th(zi / (q * zj)) * th(zj / (q * zl)) / (th(zj / zi) * th(zl / zj))
    return out * th(zi / (q * q * zl)) * zi**2 / (th(zi / zl) * q * zl**2)


def eqn_exp_an(z, par: AnParams, b: BaseSet):
    """Divided form of the A_n difference equation; returns (lhs, rhs)."""
    zf = _full(z)
    n, t, s, T, S, q, p = par.n, par.t, par.s, par.T, par.S, b.q, b.p
    th = lambda x: theta(x, p)  # noqa: E731
    zl = zf[n]
    lhs = np.prod([th(t[0] / zi) / th(T * S * zi) for zi in zf], axis=0) * th(t[0] * S) / th(T)
    lhs = lhs * np.prod([th(T * S / sj) / th(t[0] * sj) for sj in s], axis=0) - 1
    pre = t[0] * th(t[0] * T * S) / (th(T) * np.prod([th(t[0] * sj) for sj in s], axis=0))
    total = 0
    for i in range(n):
        zi = zf[i]
        cross = 1
        tail = 1
        for j in range(n):
            if j != i:
                cross = cross * th(t[0] / zf[j]) / th(zi / zf[j])
                tail = tail * th(zf[j] / (q * zl)) / th(zf[j] / zl)
        a = (zi / zl) ** (n + 1) * np.prod([th(sj * zl) for sj in s], axis=0)
        a = a * np.prod([th(tj / zi) for tj in t], axis=0) * th(zi * T / (q * t[0]))
        a = a / (np.prod([th(tj / (q * zl)) for tj in t[1:]], axis=0) * th(T * S * zl)) * tail
        c = np.prod([th(sj * zi) for sj in s], axis=0) * th(t[0] / zl) * th(zi * T / t[0]) / th(T * S * zi)
        total = total + cross * (a - c) / (zi * th(zi / zl))
    return lhs, pre * total


class ThetaIdentity(str, enum.Enum):
    A_FUNCTION = "AFunction"
    ZN_PLUS_ONE_TJ = "ZnPlusOneTj"
    Z1_ZN_PLUS_ONE = "Z1ZnPlusOne"


def theta_identity_locus(which, z_free, par: AnParams, b: BaseSet, k: int = 1):
    """Complete (z_1..z_{n-1}) to the n-tuple on which the identity is stated.

    AFunction: z_1...z_n = TS (z_{n+1} = 1/TS); ZnPlusOneTj: z_1...z_n = q/t_k
    (z_{n+1} = t_k/q, k is 0-based in 1..n); Z1ZnPlusOne: z_{n+1} = z_1.
    """
    which = ThetaIdentity(which)
    z = [complex(v) for v in z_free]
    if len(z) != par.n - 1:
        raise ValueError(f"expected {par.n - 1} free coordinates, got {len(z)}")
    rest = complex(np.prod(z)) if z else 1.0
    if which is ThetaIdentity.A_FUNCTION:
        return z + [par.T * par.S / rest]
    if which is ThetaIdentity.ZN_PLUS_ONE_TJ:
        if not 1 <= k <= par.n:
            raise ValueError("k must index one of t_2 .. t_{n+1}")
        return z + [b.q / par.t[k] / rest]
    if not z:
        raise ValueError("the z_1 = z_{n+1} identity needs n >= 2")
    return z + [1.0 / (z[0] * rest)]


def theta_identity_residual(which, z, par: AnParams, b: BaseSet, k: int = 1):
    """lhs - rhs of one of the three theta-function identities behind the A_n proof.

    ``z`` is the full n-tuple (use :func:`theta_identity_locus` to place it on
    the identity's locus).  Returns (lhs, rhs).
    """
    which = ThetaIdentity(which)
    n, t, q, p = par.n, par.t, b.q, b.p
    T, S = par.T, par.S
    th = lambda x: theta(x, p)  # noqa: E731
    z = [complex(v) for v in z]
    if which is ThetaIdentity.A_FUNCTION:
        lhs = 0
        for i in range(n):
            term = th(z[i] * T / (q * t[0]))
            for j in range(n):
                if j != i:
                    term *= th(T * S * z[j] / q) / th(z[j] / z[i])
            for j in range(1, n + 1):
                term *= th(t[j] / z[i])
            lhs += term
        rhs = th(1 / (t[0] * S))
        for j in range(1, n + 1):
            rhs *= th(t[j] * T * S / q)
        return lhs, rhs
    if which is ThetaIdentity.ZN_PLUS_ONE_TJ:
        lhs = 0
        for i in range(n):
            term = th(q * t[0] / (z[i] * T))
            for j in range(1, n + 1):
                if j != k:
                    term *= th(t[j] / z[i])
            for j in range(n):
                if j != i:
                    term /= th(z[j] / z[i])
            lhs += term
        return lhs, 0j
    lhs = 0
    for i in range(n):
        term = th(z[i] * T / (q * t[0]))
        for j in range(n):
            if j != i:
                term *= th(z[j] / (q * z[0])) / th(z[j] / z[i])
        for j in range(1, n + 1):
            term *= th(t[j] / z[i]) / th(t[j] / (q * z[0]))
        lhs += term
    return lhs, th(z[0] * T / t[0])


# ---------------------------------------------------------------------------
# symmetric A_n and the D_n-type kernel


def log_rho_an_sym(X, par: AnSymParams, b: BaseSet):
    n, t, s = par.n, par.t, par.s

    def f(z):
        return _lg([tm / z for tm in t] + [sm * z for sm in s], b)

    total = 0
    for i in range(n + 1):
        total = total + X.apply(f, _an_vec(n, i))
    pinv = lambda x: _pinv(x, b)  # noqa: E731
    for i, j in combinations(range(n + 1), 2):
        total = total + X.apply(pinv, _an_vec(n, i) - _an_vec(n, j))
    return total


def rho_an_sym(z, par: AnSymParams, b: BaseSet):
    """prod_{i,m} Gamma(t_m/z_i, s_m z_i) / prod_{i<j} Gamma(z_i/z_j, z_j/z_i)."""
    return _exp(log_rho_an_sym(_points(z), par, b))


def log_delta_dn(X, par: DnParams, b: BaseSet):
    n, t, s, D = par.n, par.t, par.s, par.D
    const = _lg([D * tm / sj for sj in s for tm in t], b) - _lg([tm * sj for sj in s for tm in t], b)
    const = const - _lg([D / (s[j] * s[k]) for j, k in combinations(range(n + 3), 2)], b)

    def f(z):
        return _lg([tm * z for tm in t] + [sj / z for sj in s], b) - _lg([D * tm / z for tm in t], b)

    def cross(x):
        return _lg([D / x], b)

    total = const
    for i in range(n + 1):
        total = total + X.apply(f, _an_vec(n, i))
    pinv = lambda x: _pinv(x, b)  # noqa: E731
    for i, j in combinations(range(n + 1), 2):
        total = total + X.apply(cross, _an_vec(n, i) + _an_vec(n, j))
        total = total + X.apply(pinv, _an_vec(n, i) - _an_vec(n, j))
    return total


def delta_dn(z, par: DnParams, b: BaseSet):
    """The A_n ("D_n") kernel Delta(z, t, s) on the bases (b.q, b.p)."""
    return _exp(log_delta_dn(_points(z), par, b))
