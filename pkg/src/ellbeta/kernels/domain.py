"""Pole enumeration and parameter-domain validation for every family.

Multiplicative families have poles in z_i (and in z_{n+1}^{-1} = z_1...z_n
for the A-type kernels) accumulating at 0 or at infinity; the unit circle is
an admissible contour when every TowardZero point lies inside it and every
TowardInfinity point outside.  The unit-circle families are checked through
their multiplicative partner at z = e(-u/omega3).  The q-reduced families
integrate over the line i*omega2*R; their poles lie on rays running off to
the left or to the right of that line, and the side is Re(u/omega2) < 0 or
> 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ..special import BaseSet, OmegaTriple
from .params import (
    AnParams,
    AnSymParams,
    CnParams,
    DnParams,
    ModifiedParams,
    QReducedParams,
    RootSystem,
    UnivariateParams,
)

DEFAULT_MARGIN = 0.02


class Direction(str, enum.Enum):
    TOWARD_ZERO = "TowardZero"
    TOWARD_INFINITY = "TowardInfinity"
    LEFT_OF_LINE = "LeftOfLine"
    RIGHT_OF_LINE = "RightOfLine"


@dataclass(frozen=True)
class Pole:
    location: complex
    direction: Direction
    source: tuple  # (label, m, j, k)
    variable: str = "z_i"


@dataclass(frozen=True)
class PoleList:
    points: Tuple[Pole, ...]

    def toward_zero(self):
        return [p for p in self.points if p.direction is Direction.TOWARD_ZERO]

    def toward_infinity(self):
        return [p for p in self.points if p.direction is Direction.TOWARD_INFINITY]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ValidationResult:
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def default_depth(b: BaseSet) -> int:
    """Smallest d with max(|q|, |p|)^d < 1e-6."""
    m = max(abs(b.q), abs(b.p))
    if m == 0:
        return 1
    return max(1, int(math.ceil(math.log(1e-6) / math.log(m))))


def _lattice(base: complex, q, p, depth, direction, label, m, variable, qshift=0, pshift=0):
    out = []
    for j in range(depth):
        for k in range(depth):
            if direction is Direction.TOWARD_ZERO:
                loc = base * q ** (j + qshift) * p ** (k + pshift)
            else:
                loc = base * q ** (-j - qshift) * p ** (-k - pshift)
            out.append(Pole(complex(loc), direction, (label, m, j, k), variable))
    return out


def _zero(base, b, d, label, m, var="z_i", qs=0, ps=0):
    return _lattice(base, b.q, b.p, d, Direction.TOWARD_ZERO, label, m, var, qs, ps)


def _inf(base, b, d, label, m, var="z_i", qs=0, ps=0):
    return _lattice(base, b.q, b.p, d, Direction.TOWARD_INFINITY, label, m, var, qs, ps)


def _cn_like(t, A, b, d):
    pts = []
    for m, tm in enumerate(t, 1):
        pts += _zero(tm, b, d, "t", m)
    pts += _zero(1 / A, b, d, "A^-1", 0, qs=1, ps=1)
    for m, tm in enumerate(t, 1):
        pts += _inf(1 / tm, b, d, "t^-1", m)
    pts += _inf(A, b, d, "A", 0, qs=1, ps=1)
    return pts


def _an_like(t, s, TS, b, d):
    last = "z_{n+1}^-1"
    pts = []
    for m, tm in enumerate(t, 1):
        pts += _zero(tm, b, d, "t", m)
    if TS is not None:
        pts += _zero(1 / TS, b, d, "(TS)^-1", 0, qs=1, ps=1)
    for m, sm in enumerate(s, 1):
        pts += _zero(sm, b, d, "s", m, var=last)
    for m, sm in enumerate(s, 1):
        pts += _inf(1 / sm, b, d, "s^-1", m)
    for m, tm in enumerate(t, 1):
        pts += _inf(1 / tm, b, d, "t^-1", m, var=last)
    if TS is not None:
        pts += _inf(TS, b, d, "TS", 0, var=last, qs=1, ps=1)
    return pts


def _dn_like(t, s, D, b, d):
    last = "z_{n+1}^-1"
    pts = []
    for j, sj in enumerate(s, 1):
        pts += _zero(sj, b, d, "s", j)
    for m, tm in enumerate(t, 1):
        pts += _zero(1 / (D * tm), b, d, "(D t)^-1", m, var=last, qs=1, ps=1)
        pts += _zero(tm, b, d, "t", m, var=last)
    for m, tm in enumerate(t, 1):
        pts += _inf(1 / tm, b, d, "t^-1", m)
        pts += _inf(D * tm, b, d, "D t", m, qs=1, ps=1)
    for j, sj in enumerate(s, 1):
        pts += _inf(1 / sj, b, d, "s^-1", j, var=last)
    return pts


def _line_poles(par: QReducedParams, depth: int):
    w1, w2 = par.w.omega1, par.w.omega2
    g, h = par.g, par.h
    pts = []

    def ray(base, sign, label, m, direction, var="u_i", shift=0):
        for j in range(depth):
            for k in range(depth):
                loc = base + sign * ((j + shift) * w1 + (k + shift) * w2)
                pts.append(Pole(complex(loc), direction, (label, m, j, k), var))

    R, L = Direction.RIGHT_OF_LINE, Direction.LEFT_OF_LINE
    if par.root is RootSystem.CN:
        for m, gm in enumerate(g, 1):
            ray(gm, 1, "g", m, R)
            ray(-gm, -1, "-g", m, L)
        ray(-par.F, 1, "-A", 0, R, shift=1)
        ray(par.F, -1, "A", 0, L, shift=1)
        return pts
    last = "u_{n+1}"
    F = par.F
    if par.root is RootSystem.AN:
        for var in ("u_i", last):
            for m, gm in enumerate(g, 1):
                ray(gm, 1, "g", m, R, var)
            for j, hj in enumerate(h, 1):
                ray(-hj, -1, "-h", j, L, var)
            ray(-F - par.H, 1, "-(F+H)", 0, R, var, shift=1)
        return pts
    for var in ("u_i", last):
        for j, gj in enumerate(g, 1):
            ray(gj, 1, "g", j, R, var)
        for m, hm in enumerate(h, 1):
            ray(-hm, -1, "-h", m, L, var)
            ray(F + hm, -1, "F+h", m, L, var, shift=1)
    return pts


def _bases_for(family, b) -> Optional[BaseSet]:
    if isinstance(b, OmegaTriple):
        return b.bases()
    return b


def pole_list(family, b=None, depth: Optional[int] = None) -> PoleList:
    """Enumerate the pole sequences of a family's kernel to ``depth`` terms in j and k."""
    if isinstance(family, QReducedParams):
        return PoleList(tuple(_line_poles(family, depth or 4)))
    if isinstance(family, ModifiedParams):
        from .unit import modular_bases, multiplicative_partner

        return pole_list(multiplicative_partner(family), modular_bases(family.w), depth)
    b = _bases_for(family, b)
    if b is None:
        raise ValueError("a BaseSet is required for multiplicative families")
    d = default_depth(b) if depth is None else int(depth)
    if d < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(family, (UnivariateParams, CnParams)):
        return PoleList(tuple(_cn_like(family.t, family.A, b, d)))
    if isinstance(family, AnParams):
        return PoleList(tuple(_an_like(family.t, family.s, family.T * family.S, b, d)))
    if isinstance(family, AnSymParams):
        return PoleList(tuple(_an_like(family.t, family.s, None, b, d)))
    if isinstance(family, DnParams):
        return PoleList(tuple(_dn_like(family.t, family.s, family.D, b, d)))
    raise TypeError(f"unknown family type {type(family).__name__}")


def certificate_poles(family, b: BaseSet, depth: Optional[int] = None) -> PoleList:
    """Pole sequences of the certificate functions g / g_i (univariate, C_n, A_n)."""
    d = default_depth(b) if depth is None else int(depth)
    pts = []
    if isinstance(family, (UnivariateParams, CnParams)):
        t, A = family.t, family.A
        for m, tm in enumerate(t, 1):
            pts += _zero(tm, b, d, "t", m)
            pts += _inf(1 / tm, b, d, "t^-1", m, qs=1)
        pts += _zero(1 / A, b, d, "A^-1", 0, ps=1)
        pts += _inf(A, b, d, "A", 0, qs=1, ps=1)
        return PoleList(tuple(pts))
    if isinstance(family, AnParams):
        last = "z_{n+1}^-1"
        t, s, TS = family.t, family.s, family.T * family.S
        for m, tm in enumerate(t, 1):
            pts += _zero(tm, b, d, "t", m)
        pts += _zero(1 / TS, b, d, "(TS)^-1", 0, ps=1)
        for m, sm in enumerate(s, 1):
            pts += _zero(sm, b, d, "s", m, var=last)
            pts += _inf(1 / sm, b, d, "s^-1", m, qs=1)
        pts += _inf(1 / t[0], b, d, "t^-1", 1, var=last, qs=1)
        for m, tm in enumerate(t[1:], 2):
            pts += _inf(1 / tm, b, d, "t^-1", m, var=last)
        pts += _inf(TS, b, d, "TS", 0, var=last, qs=1, ps=1)
        return PoleList(tuple(pts))
    raise TypeError("certificate poles are listed for the univariate, C_n and A_n kernels only")


def annulus_clear(family, b: BaseSet, depth: Optional[int] = None) -> bool:
    """True when no certificate pole lies in the annulus 1 <= |z| <= 1/|q|."""
    hi = 1.0 / abs(b.q)
    for pole in certificate_poles(family, b, depth).points:
        if 1.0 <= abs(pole.location) <= hi:
            return False
    return True


# ---------------------------------------------------------------------------
# validation


def _fmt(x):
    return f"{x:.6g}" if isinstance(x, float) else f"{complex(x):.6g}"


def _abs_below_one(values, name, out):
    for m, v in enumerate(values, 1):
        if not abs(v) < 1:
            out.append(f"|{name}_{m}| < 1 (got {abs(v):.6g})")


def _margin_check(pl: PoleList, margin: float, out):
    for pole in pl.points:
        r = abs(pole.location)
        if pole.direction is Direction.TOWARD_ZERO and r > 1 - margin:
            out.append(f"pole margin: {pole.variable} pole {pole.source} at |z|={r:.6g} > 1 - {margin}")
            return
        if pole.direction is Direction.TOWARD_INFINITY and r < 1 + margin:
            out.append(f"pole margin: {pole.variable} pole {pole.source} at |z|={r:.6g} < 1 + {margin}")
            return


def _multiplicative_checks(family, b: BaseSet, out):
    if not (abs(b.q) < 1 and abs(b.p) < 1):
        out.append(f"|q|, |p| < 1 (got {abs(b.q):.6g}, {abs(b.p):.6g})")
        return False
    pq = abs(b.p * b.q)
    if isinstance(family, (UnivariateParams, CnParams)):
        _abs_below_one(family.t, "t", out)
        if not pq < abs(family.A):
            out.append(f"|pq| < |A| (got |pq|={pq:.6g}, |A|={abs(family.A):.6g})")
    elif isinstance(family, AnParams):
        _abs_below_one(family.t, "t", out)
        _abs_below_one(family.s, "s", out)
        TS = abs(family.T * family.S)
        if not pq < TS:
            out.append(f"|pq| < |TS| (got |pq|={pq:.6g}, |TS|={TS:.6g})")
    elif isinstance(family, AnSymParams):
        _abs_below_one(family.t, "t", out)
        _abs_below_one(family.s, "s", out)
        bal = abs(family.A * family.S - b.p * b.q)
        if bal > 1e-12 * pq:
            out.append(f"balancing A S = pq (got |AS - pq|={bal:.3g})")
    elif isinstance(family, DnParams):
        _abs_below_one(family.s, "s", out)
        _abs_below_one(family.t, "t", out)
        for m, tm in enumerate(family.t, 1):
            if not pq < abs(family.D * tm):
                out.append(f"|pq| < |D t_{m}| (got |pq|={pq:.6g}, |D t_{m}|={abs(family.D * tm):.6g})")
    return True


def _im(x):
    return complex(x).imag


def _re(x):
    return complex(x).real


def _modified_checks(par: ModifiedParams, out):
    w1, w2, w3 = par.w.omegas
    if not _im(w1 / w2) >= 0:
        out.append(f"Im(omega1/omega2) >= 0 (got {_im(w1 / w2):.6g})")
    if not _im(w3 / w1) > 0:
        out.append(f"Im(omega3/omega1) > 0 (got {_im(w3 / w1):.6g})")
    if not _im(w3 / w2) > 0:
        out.append(f"Im(omega3/omega2) > 0 (got {_im(w3 / w2):.6g})")
    for m, gm in enumerate(par.g, 1):
        if not _im(gm / w3) < 0:
            out.append(f"Im(g_{m}/omega3) < 0 (got {_im(gm / w3):.6g})")
    for j, hj in enumerate(par.h, 1):
        if not _im(hj / w3) < 0:
            out.append(f"Im(h_{j}/omega3) < 0 (got {_im(hj / w3):.6g})")
    if par.root is RootSystem.CN:
        v = _im((par.F - w1 - w2) / w3)
        if not v > 0:
            out.append(f"Im((A - omega1 - omega2)/omega3) > 0 (got {v:.6g})")
    elif par.root is RootSystem.AN:
        v = _im((par.F + par.H - w1 - w2) / w3)
        if not v > 0:
            out.append(f"Im((F + H - omega1 - omega2)/omega3) > 0 (got {v:.6g})")
    else:
        for m, hm in enumerate(par.h, 1):
            v = _im((par.F + hm - w1 - w2) / w3)
            if not v > 0:
                out.append(f"Im((F + h_{m} - omega1 - omega2)/omega3) > 0 (got {v:.6g})")


def _qreduced_checks(par: QReducedParams, out):
    w1, w2 = par.w.omega1, par.w.omega2
    tau = w1 / w2
    if not _im(tau) >= 0:
        out.append(f"Im(omega1/omega2) >= 0 (got {_im(tau):.6g})")
    elif not _im(tau) > 0:
        out.append("Im(omega1/omega2) > 0 (the double-sine product needs |q| < 1)")
    if not _re(tau) > 0:
        out.append(f"Re(omega1/omega2) > 0 (got {_re(tau):.6g})")
    for m, gm in enumerate(par.g, 1):
        if not _re(gm / w2) > 0:
            out.append(f"Re(g_{m}/omega2) > 0 (got {_re(gm / w2):.6g})")
    for j, hj in enumerate(par.h, 1):
        if not _re(hj / w2) > 0:
            out.append(f"Re(h_{j}/omega2) > 0 (got {_re(hj / w2):.6g})")
    if par.root is RootSystem.CN:
        v = _re((par.F - w1) / w2)
        if not v < 1:
            out.append(f"Re((A - omega1)/omega2) < 1 (got {v:.6g})")
    elif par.root is RootSystem.AN:
        v = _re((par.F + par.H - w1) / w2)
        if not v < 1:
            out.append(f"Re((F + H - omega1)/omega2) < 1 (got {v:.6g})")
    else:
        for m, hm in enumerate(par.h, 1):
            v = _re((par.F + hm - w1) / w2)
            if not v < 1:
                out.append(f"Re((F + h_{m} - omega1)/omega2) < 1 (got {v:.6g})")


def validate_domain(family, b=None, margin: float = DEFAULT_MARGIN) -> ValidationResult:
    """Check every hypothesis of the family's theorem plus a pole-to-contour margin.

    Violations are returned as data; an empty list means the closed form
    applies with the standard contour (unit circle, segment or line).
    """
    out = []
    if isinstance(family, QReducedParams):
        _qreduced_checks(family, out)
        if not out:
            for pole in _line_poles(family, 4):
                side = _re(pole.location / family.w.omega2)
                want_right = pole.direction is Direction.RIGHT_OF_LINE
                if (side > 0) != want_right or abs(side) < margin:
                    out.append(f"pole margin: {pole.variable} pole {pole.source} at Re(u/omega2)={side:.6g}")
                    break
        return ValidationResult(tuple(out))
    if isinstance(family, ModifiedParams):
        _modified_checks(family, out)
        if not out:
            from .unit import modular_bases, multiplicative_partner

            mb = modular_bases(family.w)
            mpar = multiplicative_partner(family)
            _multiplicative_checks(mpar, mb, out)
            _margin_check(pole_list(mpar, mb, depth=1), margin, out)
        return ValidationResult(tuple(out))
    b = _bases_for(family, b)
    if b is None:
        raise ValueError("a BaseSet is required for multiplicative families")
    if _multiplicative_checks(family, b, out) and not out:
        # with |q|, |p| < 1 the (0, 0) point of each lattice is the one nearest the circle
        _margin_check(pole_list(family, b, depth=1), margin, out)
    return ValidationResult(tuple(out))
