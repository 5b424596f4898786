"""Closed-form evaluations and their quadrature counterparts for every family."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .kernels.domain import ValidationResult, annulus_clear, validate_domain
from .kernels.elliptic import (
    log_delta_dn,
    log_rho_an,
    log_rho_an_sym,
    log_rho_cn,
    log_rho_univariate,
)
from .kernels.params import (
    AnParams,
    AnSymParams,
    CnParams,
    DnParams,
    ModifiedParams,
    QReducedParams,
    RootSystem,
    UnivariateParams,
)
from .kernels.unit import (
    log_rho_modified,
    log_rho_qreduced,
    modular_bases,
    modular_phase,
    multiplicative_partner,
)
from .quadrature import (
    GridOptions,
    QuadratureResult,
    line_integrate,
    segment_grid_integrate,
    torus_integrate,
)
from .special import BaseSet, OmegaTriple, KappaPath, elliptic_gamma, kappa, qpoch_inf, _product_ok


class SegmentPath(str, enum.Enum):
    DIRECT = "direct"
    TORUS = "torus"


def _log_kernel_for(par, b):
    if isinstance(par, UnivariateParams):
        return lambda X: log_rho_univariate(X, par, b)
    if isinstance(par, CnParams):
        return lambda X: log_rho_cn(X, par, b)
    if isinstance(par, AnParams):
        return lambda X: log_rho_an(X, par, b)
    if isinstance(par, AnSymParams):
        return lambda X: log_rho_an_sym(X, par, b)
    if isinstance(par, DnParams):
        return lambda X: log_delta_dn(X, par, b)
    raise TypeError(f"no torus kernel for {type(par).__name__}")


def segment_integrate(par: ModifiedParams, opt: GridOptions = GridOptions(), path=SegmentPath.DIRECT) -> QuadratureResult:
    """The unit-circle integral over [-omega3/2, omega3/2]^n with measure prod du_i/omega2.

    DIRECT samples the G-kernel on the segment.  TORUS maps u -> z = e(-u/omega3):
    the kernel becomes e^{-pi i n P(0)} times the elliptic-gamma kernel at bases
    (r~, p~) and prod du_i/omega2 becomes (omega3/(2 pi i omega2))^n prod dz_i/z_i
    over the positively oriented torus (the two orientation reversals cancel).
    """
    path = SegmentPath(path)
    n, w = par.n, par.w
    if path is SegmentPath.DIRECT:
        return segment_grid_integrate(lambda X: log_rho_modified(X, par), n, w, opt, log_values=True)
    mpar = multiplicative_partner(par)
    res = torus_integrate(_log_kernel_for(mpar, modular_bases(w)), n, opt, log_values=True)
    factor = modular_phase(par) * (w.omega3 / (2j * math.pi * w.omega2)) ** n
    res.value = res.value * factor
    res.err_estimate = res.err_estimate * abs(factor)
    res.history = [v * factor for v in res.history]
    return res


def qreduced_integrate(par: QReducedParams, opt: GridOptions = GridOptions()) -> QuadratureResult:
    return line_integrate(lambda X: log_rho_qreduced(X, par), par.n, par.w, opt, log_values=True)


def _pp(b: BaseSet):
    return qpoch_inf(b.q, b.q) * qpoch_inf(b.p, b.p)


def kappa_auto(w: OmegaTriple) -> complex:
    """kappa from the eta products when they converge, else from the omega form."""
    return kappa(w, KappaPath.ETA_PRODUCTS if _product_ok(w.bases()) else KappaPath.OMEGA_FORM)


def rhs_closed_form(par, b=None) -> complex:
    """The closed-form value of the integral of the family's kernel."""
    if isinstance(par, ModifiedParams):
        k = kappa_auto(par.w)
        n = par.n
        mult = 2**n * math.factorial(n) if par.root is RootSystem.CN else math.factorial(n + 1)
        return k**n * mult
    if isinstance(par, QReducedParams):
        bb = par.w.bases()
        n = par.n
        ratio = (qpoch_inf(bb.q_tilde, bb.q_tilde) / qpoch_inf(bb.q, bb.q)) ** n
        mult = (-2) ** n * math.factorial(n) if par.root is RootSystem.CN else (-1) ** n * math.factorial(n + 1)
        return mult * ratio
    if isinstance(b, OmegaTriple):
        b = b.bases()
    two_pi_i = 2j * math.pi
    if isinstance(par, UnivariateParams):
        return 2 * two_pi_i / _pp(b)
    n = par.n
    base = (two_pi_i / _pp(b)) ** n
    if isinstance(par, CnParams):
        return 2**n * math.factorial(n) * base
    if isinstance(par, (AnParams, DnParams)):
        return math.factorial(n + 1) * base
    if isinstance(par, AnSymParams):
        A, S = par.A, par.S
        prod = 1 + 0j
        for sm in par.s:
            prod *= elliptic_gamma(S / sm, b.q, b.p)
        for tm in par.t:
            prod *= elliptic_gamma(A / tm, b.q, b.p)
        for tj in par.t:
            for sk in par.s:
                prod *= elliptic_gamma(tj * sk, b.q, b.p)
        return math.factorial(n + 1) * base * prod
    raise TypeError(f"unknown family {type(par).__name__}")


@dataclass
class IntegralRecord:
    lhs: QuadratureResult
    rhs: complex
    rel_err: float
    validation: ValidationResult


def _ensure_valid(par, b):
    v = validate_domain(par, b)
    if not v.ok:
        raise DomainError("parameters outside the theorem's domain: " + "; ".join(v.violations))
    return v


def integrate(par, b=None, opt: GridOptions = GridOptions()) -> QuadratureResult:
    """Quadrature of the family's kernel over its standard contour (no validation)."""
    if isinstance(par, ModifiedParams):
        return segment_integrate(par, opt)
    if isinstance(par, QReducedParams):
        return qreduced_integrate(par, opt)
    if isinstance(b, OmegaTriple):
        b = b.bases()
    return torus_integrate(_log_kernel_for(par, b), par.n, opt, log_values=True)


def eval_integral(par, b=None, opt: GridOptions = GridOptions()) -> IntegralRecord:
    """Validate, integrate and compare against the closed form."""
    v = _ensure_valid(par, b)
    lhs = integrate(par, b, opt)
    rhs = rhs_closed_form(par, b)
    return IntegralRecord(lhs, rhs, abs(lhs.value - rhs) / abs(rhs), v)


@dataclass
class TelescopeResult:
    residual: float
    base_value: complex
    shifted_value: complex
    annulus_ok: bool
    shift: str


def telescope_check(par, b: BaseSet, opt: GridOptions = GridOptions(), shift: str = "q") -> TelescopeResult:
    """|I(q t_1, ...) / I(t) - 1| from two independent quadratures.

    ``shift="p"`` checks I(p t_1, ...) = I(t) through the q <-> p symmetry of
    the elliptic gamma function.  The annulus between the unit circle and its
    image under the inverse shift must be free of certificate poles; this is
    checked before the two integrals are compared.
    """
    if not isinstance(par, (UnivariateParams, CnParams, AnParams)):
        raise TypeError("telescoping is defined for the univariate, C_n and A_n families")
    if isinstance(b, OmegaTriple):
        b = b.bases()
    if shift == "p":
        b = BaseSet(b.p, b.q)
    elif shift != "q":
        raise ValueError("shift must be 'q' or 'p'")
    shifted = par.scaled(0, b.q)
    _ensure_valid(par, b)
    _ensure_valid(shifted, b)
    ok = annulus_clear(par, b)
    i0 = integrate(par, b, opt).value
    i1 = integrate(shifted, b, opt).value
    return TelescopeResult(abs(i1 / i0 - 1), i0, i1, ok, shift)


def sweep_t1(par, b: BaseSet, values, opt: GridOptions = GridOptions()):
    """Integral as a function of the first parameter; rows with domain violations are skipped."""
    rows = []
    for v in values:
        if isinstance(par, QReducedParams):
            cand = par.shifted(0, v - par.g[0])
        else:
            cand = par.scaled(0, v / par.t[0])
        check = validate_domain(cand, b)
        if not check.ok:
            rows.append({"value": v, "skipped": True, "violations": list(check.violations)})
            continue
        rec = eval_integral(cand, b, opt)
        rows.append({"value": v, "skipped": False, "lhs": rec.lhs.value, "rel_err": rec.rel_err})
    return rows
