"""Extended-precision reference evaluator.

A deliberately plain, slow code path: every function is a direct product
or a literal transcription of its defining formula in mpmath arithmetic.
It shares no evaluation code with the fast path (no log-space sums, no
truncation lattices, no pair identities) so agreement between the two is
evidence about both.

Truncation: a product over j is cut at the first J with |a| |b|^J below
10^-(dps+5); double products use the same bound on |q|^j |p|^k.  The depth
actually used is recorded in :data:`last_depths` for fixture metadata.
"""

from __future__ import annotations

import math
from contextlib import contextmanager

import mpmath as mp

DEFAULT_DPS = 40
last_depths: dict = {}


@contextmanager
def precision(dps: int = DEFAULT_DPS):
    old = mp.mp.dps
    mp.mp.dps = dps
    try:
        yield
    finally:
        mp.mp.dps = old


def _c(x):
    return mp.mpc(x) if not isinstance(x, (mp.mpc, mp.mpf)) else mp.mpc(x)


def _cut():
    return mp.mpf(10) ** (-(mp.mp.dps + 5))


def _depth(a, b, tag):
    a, b = abs(_c(a)), abs(_c(b))
    if b >= 1:
        raise ValueError(f"oracle product with |base| = {float(b):.6g} >= 1 does not converge")
    if b == 0 or a == 0:
        J = 1
    else:
        J = max(1, int(mp.ceil(mp.log(_cut() / max(a, mp.mpf(1))) / mp.log(b))) + 1)
    last_depths[tag] = max(last_depths.get(tag, 0), J)
    return J


def qpoch(a, b):
    """(a; b)_inf by direct multiplication."""
    a, b = _c(a), _c(b)
    out = mp.mpc(1)
    bj = mp.mpc(1)
    for _ in range(_depth(a, b, "qpoch")):
        out *= 1 - a * bj
        bj *= b
    return out


def theta(z, p):
    z, p = _c(z), _c(p)
    return qpoch(z, p) * qpoch(p / z, p)


def egamma(z, q, p):
    """Gamma(z; q, p) as the literal double product."""
    z, q, p = _c(z), _c(q), _c(p)
    Jq = _depth(max(abs(z), abs(q * p / z)), q, "egamma_j")
    Jp = _depth(max(abs(z), abs(q * p / z)), p, "egamma_k")
    out = mp.mpc(1)
    qj = mp.mpc(1)
    for _ in range(Jq):
        pk = mp.mpc(1)
        for _ in range(Jp):
            out *= (1 - q * p * qj * pk / z) / (1 - z * qj * pk)
            pk *= p
        qj *= q
    return out


def e(x):
    return mp.exp(2j * mp.pi * _c(x))


def bases(w1, w2, w3):
    w1, w2, w3 = _c(w1), _c(w2), _c(w3)
    return {
        "q": e(w1 / w2),
        "p": e(w3 / w2),
        "r": e(w3 / w1),
        "qt": e(-w2 / w1),
        "pt": e(-w2 / w3),
        "rt": e(-w1 / w3),
    }


def b22(u, w1, w2):
    u, w1, w2 = _c(u), _c(w1), _c(w2)
    return u**2 / (w1 * w2) - u / w1 - u / w2 + w1 / (6 * w2) + w2 / (6 * w1) + mp.mpf(1) / 2


def poly_p(u, w1, w2, w3):
    u, w1, w2, w3 = _c(u), _c(w1), _c(w2), _c(w3)
    v = u - (w1 + w2 + w3) / 2
    return v * (v**2 - (w1**2 + w2**2 + w3**2) / 4) / (3 * w1 * w2 * w3)


def gmod_modular(u, w1, w2, w3):
    b = bases(w1, w2, w3)
    return mp.exp(-1j * mp.pi * poly_p(u, w1, w2, w3)) * egamma(e(-_c(u) / w3), b["rt"], b["pt"])


def gmod_product(u, w1, w2, w3):
    """G(u) as the double product over (q, p) and (q~, r) written out factor by factor."""
    u = _c(u)
    b = bases(w1, w2, w3)
    q, p, r, qt = b["q"], b["p"], b["r"], b["qt"]
    z = e(u / w2)
    y = e(u / w1)
    out = mp.mpc(1)
    J = _depth(1, max(abs(q), abs(p)), "gmod_j")
    for j in range(J):
        for k in range(J):
            out *= (1 - e(-u / w2) * q ** (j + 1) * p ** (k + 1)) / (1 - z * q**j * p**k)
    J = _depth(1, max(abs(qt), abs(r)), "gmod_k")
    for j in range(J):
        for k in range(J):
            out *= (1 - y * qt ** (j + 1) * r**k) / (1 - e(-u / w1) * qt**j * r ** (k + 1))
    return out


def double_sine(u, w1, w2):
    u, w1, w2 = _c(u), _c(w1), _c(w2)
    q, qt = e(w1 / w2), e(-w2 / w1)
    return qpoch(e(u / w2), q) / qpoch(e(u / w1) * qt, qt)


def kappa_eta(w1, w2, w3):
    b = bases(w1, w2, w3)
    return -qpoch(b["qt"], b["qt"]) / (qpoch(b["q"], b["q"]) * qpoch(b["p"], b["p"]) * qpoch(b["r"], b["r"]))


def kappa_omega(w1, w2, w3):
    w1, w2, w3 = _c(w1), _c(w2), _c(w3)
    b = bases(w1, w2, w3)
    s = (w1 + w2 + w3) * (1 / w1 + 1 / w2 + 1 / w3)
    return w3 * mp.exp(1j * mp.pi / 12 * s) / (w2 * qpoch(b["rt"], b["rt"]) * qpoch(b["pt"], b["pt"]))


# ---------------------------------------------------------------------------
# kernels, transcribed factor by factor


def _prod(xs):
    out = mp.mpc(1)
    for x in xs:
        out *= x
    return out


def rho_univariate(z, t, q, p):
    z = _c(z)
    t = [_c(x) for x in t]
    A = _prod(t)
    G = lambda x: egamma(x, q, p)  # noqa: E731
    num = _prod(G(tm * z) * G(tm / z) * G(A / tm) for tm in t)
    den = G(z**2) * G(z**-2) * G(A * z) * G(A / z)
    den *= _prod(G(t[m] * t[s]) for m in range(5) for s in range(m + 1, 5))
    return num / den


def cert_g_univariate(z, t, q, p):
    z = _c(z)
    t = [_c(x) for x in t]
    A = _prod(t)
    th = lambda x: theta(x, p)  # noqa: E731
    fac = _prod(th(tj * z) for tj in t) / _prod(th(t[0] * tj) for tj in t[1:])
    fac *= th(t[0] * A) / (th(z**2) * th(A * z)) * t[0] / z
    return rho_univariate(z, t, q, p) * fac


def rho_cn(z, t, q, p):
    z = [_c(x) for x in z]
    t = [_c(x) for x in t]
    n, M = len(z), len(t)
    A = _prod(t)
    G = lambda x: egamma(x, q, p)  # noqa: E731
    out = mp.mpc(1)
    for i in range(n):
        for j in range(i + 1, n):
            for a in (z[i], 1 / z[i]):
                for c in (z[j], 1 / z[j]):
                    out /= G(a * c)
    for zi in z:
        out *= _prod(G(tm * zi) * G(tm / zi) for tm in t)
        out /= G(zi**2) * G(zi**-2) * G(A * zi) * G(A / zi)
    out *= _prod(G(A / tm) for tm in t)
    out /= _prod(G(t[m] * t[s]) for m in range(M) for s in range(m + 1, M))
    return out


def cert_g_cn(i, z, t, q, p):
    z = [_c(x) for x in z]
    t = [_c(x) for x in t]
    A = _prod(t)
    th = lambda x: theta(x, p)  # noqa: E731
    zi = z[i]
    fac = mp.mpc(1)
    for j, zj in enumerate(z):
        if j != i:
            fac *= th(t[0] * zj) * th(t[0] / zj) / (th(zi * zj) * th(zi / zj))
    fac *= _prod(th(tj * zi) for tj in t) / _prod(th(t[0] * tj) for tj in t[1:])
    fac *= th(t[0] * A) / (th(zi**2) * th(A * zi)) * t[0] / zi
    return rho_cn(z, t, q, p) * fac


def rho_an(z, t, s, q, p):
    z = [_c(x) for x in z]
    z = z + [1 / _prod(z)]
    t = [_c(x) for x in t]
    s = [_c(x) for x in s]
    T, S = _prod(t), _prod(s)
    G = lambda x: egamma(x, q, p)  # noqa: E731
    out = mp.mpc(1)
    for i, zi in enumerate(z):
        out *= _prod(G(tm / zi) for tm in t) * _prod(G(sj * zi) for sj in s) * G(S * t[i])
        out /= G(T * S * zi) * _prod(G(t[i] * sj) for sj in s)
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            out /= G(z[i] / z[j]) * G(z[j] / z[i])
    out /= G(T)
    out *= _prod(G(S * T / sj) / G(S / sj) for sj in s)
    return out


def cert_g_an(i, z, t, s, q, p):
    zz = [_c(x) for x in z]
    zf = zz + [1 / _prod(zz)]
    t = [_c(x) for x in t]
    s = [_c(x) for x in s]
    T, S = _prod(t), _prod(s)
    th = lambda x: theta(x, p)  # noqa: E731
    zi = zf[i]
    fac = mp.mpc(1)
    for j, zj in enumerate(zf):
        if j != i:
            fac *= th(t[0] / zj) / th(zi / zj)
    fac *= _prod(th(zi * sj) / th(t[0] * sj) for sj in s)
    fac *= th(zi * T / t[0]) * th(T * S * t[0]) / (th(T) * th(T * S * zi)) * t[0] / zi
    return rho_an(zz, t, s, q, p) * fac


def delta_dn(z, t, s, q, p):
    z = [_c(x) for x in z]
    z = z + [1 / _prod(z)]
    t = [_c(x) for x in t]
    s = [_c(x) for x in s]
    D = _prod(s)
    G = lambda x: egamma(x, q, p)  # noqa: E731
    out = mp.mpc(1)
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            out *= G(D / (z[i] * z[j])) / (G(z[i] / z[j]) * G(z[j] / z[i]))
    for sj in s:
        for tm in t:
            out *= G(D * tm / sj) / G(tm * sj)
    for zi in z:
        out *= _prod(G(tm * zi) for tm in t) * _prod(G(sj / zi) for sj in s)
        out /= _prod(G(D * tm / zi) for tm in t)
    for j in range(len(s)):
        for k in range(j + 1, len(s)):
            out /= G(D / (s[j] * s[k]))
    return out


def rho_modified_cn(u, g, w1, w2, w3):
    """The G-built C_n kernel with G from its modular representation."""
    u = [_c(x) for x in u]
    g = [_c(x) for x in g]
    A = sum(g)
    G = lambda x: gmod_modular(x, w1, w2, w3)  # noqa: E731
    out = mp.mpc(1)
    for ui in u:
        out *= _prod(G(gm + ui) * G(gm - ui) for gm in g)
        out /= G(2 * ui) * G(-2 * ui) * G(A + ui) * G(A - ui)
    out *= _prod(G(A - gm) for gm in g)
    out /= _prod(G(g[m] + g[s]) for m in range(len(g)) for s in range(m + 1, len(g)))
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            for a in (1, -1):
                for c in (1, -1):
                    out /= G(a * u[i] + c * u[j])
    return out


def rho_qreduced_cn(u, g, w1, w2):
    u = [_c(x) for x in u]
    g = [_c(x) for x in g]
    A = sum(g)
    S = lambda x: double_sine(x, w1, w2)  # noqa: E731
    out = mp.mpc(1)
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            for a in (1, -1):
                for c in (1, -1):
                    out *= S(a * u[i] + c * u[j])
    for ui in u:
        out *= S(2 * ui) * S(-2 * ui) * S(A + ui) * S(A - ui)
        out /= _prod(S(gm + ui) * S(gm - ui) for gm in g)
    out *= _prod(S(g[m] + g[s]) for m in range(len(g)) for s in range(m + 1, len(g)))
    out /= _prod(S(A - gm) for gm in g)
    return out


def cert_f_qreduced_cn(i, u, g, w1, w2):
    u = [_c(x) for x in u]
    g = [_c(x) for x in g]
    w2c = _c(w2)
    z = [e(x / w2c) for x in u]
    t = [e(x / w2c) for x in g]
    A = e(sum(g) / w2c)
    zi = z[i]
    fac = mp.mpc(1)
    for j, zj in enumerate(z):
        if j != i:
            fac *= (1 - t[0] * zj) * (1 - t[0] / zj) / ((1 - zi * zj) * (1 - zi / zj))
    fac *= _prod(1 - tj * zi for tj in t) / _prod(1 - t[0] * tj for tj in t[1:])
    fac *= (1 - t[0] * A) * t[0] / ((1 - zi**2) * (1 - A * zi) * zi)
    return rho_qreduced_cn(u, g, w1, w2) * fac


def rhs_an_sym(n, t, s, q, p):
    t = [_c(x) for x in t]
    s = [_c(x) for x in s]
    A, S = _prod(t), _prod(s)
    G = lambda x: egamma(x, q, p)  # noqa: E731
    out = math.factorial(n + 1) * (2j * mp.pi / (qpoch(q, q) * qpoch(p, p))) ** n
    out *= _prod(G(S / sm) * G(A / tm) for sm, tm in zip(s, t))
    out *= _prod(G(tj * sk) for tj in t for sk in s)
    return out


def rhs_univariate(q, p):
    return 4j * mp.pi / (qpoch(q, q) * qpoch(p, p))


def afunction(z, t, s, q, p):
    """Both sides of the theta identity met at z_{n+1}^{-1} = TS (z is the n-tuple on that locus)."""
    z = [_c(x) for x in z]
    t = [_c(x) for x in t]
    s = [_c(x) for x in s]
    q = _c(q)
    n = len(z)
    T, S = _prod(t), _prod(s)
    th = lambda x: theta(x, p)  # noqa: E731
    lhs = mp.mpc(0)
    for i in range(n):
        term = th(z[i] * T / (q * t[0]))
        for j in range(n):
            if j != i:
                term *= th(T * S * z[j] / q) / th(z[j] / z[i])
        term *= _prod(th(t[j] / z[i]) for j in range(1, n + 1))
        lhs += term
    rhs = th(1 / (t[0] * S)) * _prod(th(t[j] * T * S / q) for j in range(1, n + 1))
    return lhs, rhs
