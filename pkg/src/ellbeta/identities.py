"""Randomized battery of functional equations and certificate identities.

Every identity is a function ``check(rng) -> (point, pairs)`` which draws one
admissible input from its own random stream and returns the serializable
input together with one or more ``(lhs, rhs)`` pairs.  The residual of a
sample is ``|lhs - rhs| / (1 + max(|lhs|, |rhs|))``, maximised over its pairs.

Streams are split per identity by hashing the identity id with the seed, so
adding or removing identities never changes the samples of the others.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .errors import ConfigError, DomainError, EllBetaError, PoleError
from .kernels.domain import validate_domain
from .kernels.elliptic import (
    ThetaIdentity,
    an_shift_ratio,
    cert_g_an,
    cert_g_cn,
    cert_g_univariate,
    eqn_exp_an,
    eqn_exp_cn,
    eqn_exp_univariate,
    rho_an,
    rho_cn,
    rho_univariate,
    theta_identity_locus,
    theta_identity_residual,
)
from .kernels.params import (
    AnParams,
    AnSymParams,
    CnParams,
    DnParams,
    Family,
    ModifiedParams,
    QReducedParams,
    RootSystem,
    UnivariateParams,
)
from .kernels.unit import cert_f_qreduced, rho_modified, rho_modified_via_torus, rho_qreduced
from .quadrature import worker_count
from .special import (
    BaseSet,
    GPath,
    KappaPath,
    OmegaTriple,
    b22,
    double_sine,
    elliptic_gamma,
    log_double_sine,
    modified_gamma_g,
    poly_p,
    theta,
)

MAX_TRIES = 10_000
MODULUS_RANGE = (0.55, 0.85)
BASE_RANGE = (0.1, 0.5)


class SamplerStarvation(DomainError):
    """No admissible point was found within the rejection budget."""


@dataclass
class IdentityReport:
    identity_id: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    seed: int
    worst_point: Dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
            "worst_point": self.worst_point,
        }


@dataclass(frozen=True)
class Identity:
    id: str
    group: str
    tolerance: float
    check: Callable
    description: str = ""


REGISTRY: Dict[str, Identity] = {}


def identity(id_: str, group: str, tolerance: float):
    def register(fn):
        REGISTRY[id_] = Identity(id_, group, tolerance, fn, (fn.__doc__ or "").strip())
        return fn

    return register


def residual(lhs, rhs) -> float:
    lhs, rhs = complex(lhs), complex(rhs)
    return abs(lhs - rhs) / (1 + max(abs(lhs), abs(rhs)))


def stream(identity_id: str, seed: int) -> np.random.Generator:
    """The random stream of one identity: sha256 of (id, seed) seeds a PCG64."""
    digest = hashlib.sha256(f"{identity_id}|{int(seed)}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def serialize(x):
    """Inputs as JSON-friendly data; complex numbers become [re, im]."""
    if isinstance(x, dict):
        return {k: serialize(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [serialize(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, OmegaTriple):
        return serialize(list(x.omegas))
    if isinstance(x, BaseSet):
        return {"q": serialize(x.q), "p": serialize(x.p)}
    return x


# ---------------------------------------------------------------------------
# random draws


def _phase(rng) -> complex:
    return cmath.exp(2j * math.pi * rng.random())


def _modulus(rng, lo, hi) -> float:
    return float(lo + (hi - lo) * rng.random())


def draw_bases(rng, lo=BASE_RANGE[0], hi=BASE_RANGE[1]) -> BaseSet:
    return BaseSet(_modulus(rng, lo, hi) * _phase(rng), _modulus(rng, lo, hi) * _phase(rng))


def draw_unit(rng, n) -> List[complex]:
    return [_phase(rng) for _ in range(n)]


def draw_omega_modified(rng, unit_circle: bool = False) -> OmegaTriple:
    """(1, a - i b, i c): |q|, |p|, |r|, |q~|, |p~|, |r~| < 1, or |q| = 1 when ``unit_circle``."""
    a = _modulus(rng, 0.6, 2.0)
    b = 0.0 if unit_circle else _modulus(rng, 0.15, 0.6)
    c = _modulus(rng, 1.5, 3.5)
    return OmegaTriple(1.0, complex(a, -b), complex(0.0, c))


def draw_omega_qreduced(rng) -> OmegaTriple:
    """(1, a - i b, i c) with Re, Im of omega1/omega2 positive."""
    a = _modulus(rng, 0.7, 1.5)
    b = _modulus(rng, 0.3, 0.8)
    return OmegaTriple(1.0, complex(a, -b), 5j)


def _moduli(rng, k, lo=MODULUS_RANGE[0], hi=MODULUS_RANGE[1]):
    return [_modulus(rng, lo, hi) * _phase(rng) for _ in range(k)]


def _counts(family: Family, n: int):
    """(len g or t, len h or s) for a family kind."""
    if family in (Family.UNIVARIATE,):
        return 5, 0
    if family in (Family.CN, Family.CN_UNIT, Family.CN_Q):
        return 2 * n + 3, 0
    if family in (Family.AN, Family.AN_UNIT, Family.AN_Q):
        return n + 1, n + 2
    if family is Family.AN_SYM:
        return n + 2, n + 2
    return n + 3, n  # Dn kinds: g (or s) has n+3 entries, h (or t) has n


def _candidate(family: Family, n: int, b, rng):
    k1, k2 = _counts(family, n)
    if family is Family.UNIVARIATE:
        return UnivariateParams(_moduli(rng, 5))
    if family is Family.CN:
        return CnParams(n, _moduli(rng, k1))
    if family is Family.AN:
        return AnParams(n, _moduli(rng, k1), _moduli(rng, k2))
    if family is Family.AN_SYM:
        t = _moduli(rng, k1)
        s = _moduli(rng, k2 - 1)
        last = b.p * b.q / (complex(np.prod(t)) * complex(np.prod(s)))
        return AnSymParams(n, t, s + [last])
    if family is Family.DN:
        return DnParams(n, _moduli(rng, k2), _moduli(rng, k1))
    root = {
        Family.CN_UNIT: RootSystem.CN, Family.AN_UNIT: RootSystem.AN, Family.DN_UNIT: RootSystem.DN,
        Family.CN_Q: RootSystem.CN, Family.AN_Q: RootSystem.AN, Family.DN_Q: RootSystem.DN,
    }[family]
    w = b
    if family in (Family.CN_UNIT, Family.AN_UNIT, Family.DN_UNIT):
        # g = omega3 (x - i y) maps to t = e(-g/omega3) with |t| = e^{-2 pi y}
        def one():
            y = -math.log(_modulus(rng, *MODULUS_RANGE)) / (2 * math.pi)
            return w.omega3 * complex(rng.random(), -y)

        return ModifiedParams(root, [one() for _ in range(k1)], [one() for _ in range(k2)], w)
    # line kernels: Re(g/omega2) > 0 with the sum below 1 + Re(omega1/omega2)
    budget = 1 + (w.omega1 / w.omega2).real
    terms = k1 + (k2 if root is RootSystem.AN else 1 if root is RootSystem.DN else 0)
    hi = 1.6 * budget / terms

    def one_line():
        return w.omega2 * complex(_modulus(rng, 0.04, hi), _modulus(rng, -0.3, 0.3))

    return QReducedParams(root, [one_line() for _ in range(k1)], [one_line() for _ in range(k2)], w)


def sample_params(family, b, seed, n: int = 1, max_tries: int = MAX_TRIES, accept=None):
    """Rejection-sample parameters of ``family`` that pass ``validate_domain`` with pole margin.

    ``b`` is a BaseSet for the elliptic-gamma families and an OmegaTriple for
    the unit-circle and line families.  ``seed`` is an int or a numpy Generator.
    ``accept`` is an optional extra predicate on admissible candidates.
    """
    family = Family(family)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if family in (Family.UNIVARIATE,):
        n = 1
    for _ in range(max_tries):
        cand = _candidate(family, n, b, rng)
        try:
            ok = validate_domain(cand, b).ok and (accept is None or accept(cand))
        except EllBetaError:
            ok = False
        if ok:
            return cand
    raise SamplerStarvation(f"no admissible {family.value} parameters (n={n}) in {max_tries} draws")


def sample_with_bases(family, rng, n: int = 1, max_tries: int = MAX_TRIES):
    """Draw bases and admissible parameters together, rejecting the pair as a whole."""
    family = Family(family)
    for _ in range(max_tries):
        b = draw_bases(rng)
        cand = _candidate(family, 1 if family is Family.UNIVARIATE else n, b, rng)
        try:
            ok = validate_domain(cand, b).ok
        except EllBetaError:
            ok = False
        if ok:
            return b, cand
    raise SamplerStarvation(f"no admissible {family.value} bases and parameters (n={n}) in {max_tries} draws")


def _draw(rng, fn, max_tries=MAX_TRIES):
    """Retry ``fn(rng)`` while the draw lands on a pole or outside the domain."""
    for _ in range(max_tries):
        try:
            return fn(rng)
        except (PoleError, DomainError) as exc:
            if isinstance(exc, SamplerStarvation):
                raise
            continue
    raise SamplerStarvation("no admissible sample point within the rejection budget")


# ---------------------------------------------------------------------------
# theta and elliptic gamma


def _z_annulus(rng, lo=0.1, hi=10.0) -> complex:
    return math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * rng.random()) * _phase(rng)


def _p_disk(rng, hi=0.5) -> complex:
    return hi * rng.random() * _phase(rng)


@identity("theta_quasiperiod", "special", 1e-12)
def _theta_quasiperiod(rng):
    """theta(p z; p) = -z^{-1} theta(z; p)."""
    z, p = _z_annulus(rng), _p_disk(rng)
    return {"z": z, "p": p}, [(theta(p * z, p), -theta(z, p) / z)]


@identity("theta_inversion", "special", 1e-12)
def _theta_inversion(rng):
    """theta(1/z; p) = -z^{-1} theta(z; p)."""
    z, p = _z_annulus(rng), _p_disk(rng)
    return {"z": z, "p": p}, [(theta(1 / z, p), -theta(z, p) / z)]


def _gamma_point(rng):
    b = draw_bases(rng)
    return _z_annulus(rng, 0.2, 5.0), b


@identity("gamma_shift_q", "special", 1e-11)
def _gamma_shift_q(rng):
    """Gamma(q z) = theta(z; p) Gamma(z)."""
    z, b = _gamma_point(rng)
    g = elliptic_gamma(z, b.q, b.p)
    return {"z": z, "q": b.q, "p": b.p}, [(elliptic_gamma(b.q * z, b.q, b.p), theta(z, b.p) * g)]


@identity("gamma_shift_p", "special", 1e-11)
def _gamma_shift_p(rng):
    """Gamma(p z) = theta(z; q) Gamma(z)."""
    z, b = _gamma_point(rng)
    g = elliptic_gamma(z, b.q, b.p)
    return {"z": z, "q": b.q, "p": b.p}, [(elliptic_gamma(b.p * z, b.q, b.p), theta(z, b.q) * g)]


@identity("gamma_reflection", "special", 1e-11)
def _gamma_reflection(rng):
    """Gamma(z) Gamma(pq/z) = 1."""
    z, b = _gamma_point(rng)
    lhs = elliptic_gamma(z, b.q, b.p) * elliptic_gamma(b.p * b.q / z, b.q, b.p)
    return {"z": z, "q": b.q, "p": b.p}, [(lhs, 1.0)]


@identity("gamma_base_symmetry", "special", 1e-12)
def _gamma_base_symmetry(rng):
    """Gamma(z; q, p) = Gamma(z; p, q)."""
    z, b = _gamma_point(rng)
    return {"z": z, "q": b.q, "p": b.p}, [(elliptic_gamma(z, b.q, b.p), elliptic_gamma(z, b.p, b.q))]


# ---------------------------------------------------------------------------
# modified elliptic gamma, P(u), double sine, kappa


def _u_strip(rng, w: OmegaTriple) -> complex:
    """u = x omega1 + y omega2 + s omega3 with moderate coefficients."""
    x, y, s = (rng.random() - 0.5 for _ in range(3))
    return 2 * x * w.omega1 + 2 * y * w.omega2 + 0.8 * s * w.omega3


def _g_shift(k):
    def check(rng):
        w = draw_omega_modified(rng)
        u = _u_strip(rng, w)
        b = w.bases()
        pairs = []
        for path in (GPath.PRODUCT, GPath.MODULAR):
            g = modified_gamma_g(u, w, path)
            if k == 1:
                pairs.append((modified_gamma_g(u + w.omega1, w, path), theta(cmath.exp(2j * math.pi * u / w.omega2), b.p) * g))
            elif k == 2:
                pairs.append((modified_gamma_g(u + w.omega2, w, path), theta(cmath.exp(2j * math.pi * u / w.omega1), b.r) * g))
            else:
                pairs.append((modified_gamma_g(u + w.omega3, w, path), cmath.exp(-1j * math.pi * b22(u, w)) * g))
        return {"u": u, "omega": w}, pairs

    return check


identity("g_shift_omega1", "special", 1e-10)(_g_shift(1))
identity("g_shift_omega2", "special", 1e-10)(_g_shift(2))
identity("g_shift_omega3", "special", 1e-10)(_g_shift(3))


@identity("g_path_agreement", "special", 1e-10)
def _g_paths(rng):
    """Double product and modular representation of G coincide."""
    w = draw_omega_modified(rng)
    u = _u_strip(rng, w)
    return {"u": u, "omega": w}, [(modified_gamma_g(u, w, GPath.PRODUCT), modified_gamma_g(u, w, GPath.MODULAR))]


@identity("g_reflection", "special", 1e-10)
def _g_reflection(rng):
    """G(a) G(b) = 1 for a + b = omega1 + omega2 + omega3, on both paths."""
    w = draw_omega_modified(rng)
    a = _u_strip(rng, w)
    s = sum(w.omegas)
    pairs = [(modified_gamma_g(a, w, path) * modified_gamma_g(s - a, w, path), 1.0) for path in (GPath.PRODUCT, GPath.MODULAR)]
    return {"a": a, "omega": w}, pairs


@identity("g_omega_symmetry", "special", 1e-11)
def _g_symmetry(rng):
    """G(u; omega1, omega2, omega3) = G(u; omega2, omega1, omega3)."""
    w = draw_omega_modified(rng)
    u = _u_strip(rng, w)
    return {"u": u, "omega": w}, [(modified_gamma_g(u, w, GPath.MODULAR), modified_gamma_g(u, w.swapped(), GPath.MODULAR))]


@identity("p_antisymmetry", "special", 1e-12)
def _p_antisymmetry(rng):
    """P(omega1 + omega2 + omega3 - u) = -P(u)."""
    w = draw_omega_modified(rng)
    u = _u_strip(rng, w)
    return {"u": u, "omega": w}, [(poly_p(sum(w.omegas) - u, w), -poly_p(u, w))]


@identity("g_to_double_sine", "special", 1e-10)
def _g_to_s(rng):
    """1/G(u; omega1, omega2, k omega3) approaches S(u) monotonically as k = 4, 8, 16."""
    w = draw_omega_qreduced(rng)
    w3 = complex(0.0, _modulus(rng, 0.6, 1.0))
    u = (0.2 + 0.6 * rng.random()) * w.omega1 + (0.2 + 0.6 * rng.random()) * w.omega2
    s = double_sine(u, w)
    gaps = []
    inv = None
    for k in (4, 8, 16):
        inv = 1 / modified_gamma_g(u, OmegaTriple(w.omega1, w.omega2, k * w3), GPath.PRODUCT)
        gaps.append(abs(inv - s))
    excess = max(0.0, gaps[1] - gaps[0] - 1e-12, gaps[2] - gaps[1] - 1e-12)
    return {"u": u, "omega": [w.omega1, w.omega2, w3]}, [(inv, s), (excess, 0.0)]


@identity("s_reflection", "special", 1e-10)
def _s_reflection(rng):
    """S(u) S(-u) = e^{-pi i B22(u)} (1 - e(-u/omega2)) (1 - e(-u/omega1))."""
    w = draw_omega_qreduced(rng)
    u = (rng.random() - 0.5) * w.omega1 + (rng.random() - 0.5) * w.omega2
    rhs = cmath.exp(-1j * math.pi * b22(u, w))
    rhs *= (1 - cmath.exp(-2j * math.pi * u / w.omega2)) * (1 - cmath.exp(-2j * math.pi * u / w.omega1))
    return {"u": u, "omega": w}, [(double_sine(u, w) * double_sine(-u, w), rhs)]


def _u_with_imaginary_parts(w: OmegaTriple, level: float) -> complex:
    """u with Im(u/omega1) = Im(u/omega2) = level (solved as a real 2x2 system)."""
    rows = []
    for om in (w.omega1, w.omega2):
        inv = 1 / om
        rows.append([inv.imag, inv.real])  # Im((x + i y)/om) = x Im(1/om) + y Re(1/om)
    x, y = np.linalg.solve(np.array(rows), np.array([level, level]))
    return complex(x, y)


@identity("s_asymptotics_plus", "special", 1e-10)
def _s_asym_plus(rng):
    """S(u) -> 1 when Im(u/omega1), Im(u/omega2) -> +infinity (checked at +50)."""
    w = draw_omega_qreduced(rng)
    level = 50.0
    u = _u_with_imaginary_parts(w, level)
    return {"u": u, "omega": w}, [(double_sine(u, w), 1.0)]


@identity("s_asymptotics_minus", "special", 1e-10)
def _s_asym_minus(rng):
    """e^{pi i B22(u)} S(u) -> 1 when Im(u/omega1), Im(u/omega2) -> -infinity (checked at -50)."""
    w = draw_omega_qreduced(rng)
    level = -50.0
    u = _u_with_imaginary_parts(w, level)
    lhs = cmath.exp(1j * math.pi * b22(u, w) + complex(log_double_sine(u, w)))
    return {"u": u, "omega": w}, [(lhs, 1.0)]


@identity("kappa_paths", "special", 1e-10)
def _kappa(rng):
    """Eta-product and omega forms of kappa agree (modular transformation of eta)."""
    from .special import kappa

    w = draw_omega_modified(rng)
    return {"omega": w}, [(kappa(w, KappaPath.ETA_PRODUCTS), kappa(w, KappaPath.OMEGA_FORM))]


# ---------------------------------------------------------------------------
# certificates of the elliptic-gamma kernels


def _univariate(rng):
    return sample_with_bases(Family.UNIVARIATE, rng)


@identity("eqn_univariate", "certificate", 1e-9)
def _eqn_univariate(rng):
    """rho(z, q t_1) - rho(z, t) = g(z/q) - g(z)."""
    b, par = _univariate(rng)
    z = _phase(rng)
    lhs = rho_univariate(z, par.scaled(0, b.q), b) - rho_univariate(z, par, b)
    rhs = cert_g_univariate(z / b.q, par, b) - cert_g_univariate(z, par, b)
    return {"z": z, "t": par.t, "bases": b}, [(lhs, rhs)]


@identity("eqn_exp_univariate", "certificate", 1e-9)
def _eqn_exp_univariate(rng):
    """The univariate difference equation divided by rho."""
    b, par = _univariate(rng)
    z = _phase(rng)
    return {"z": z, "t": par.t, "bases": b}, [eqn_exp_univariate(z, par, b)]


@identity("exact_point_univariate", "certificate", 1e-12)
def _exact_univariate(rng):
    """At z = t_1 the divided equation reads -1 = -1."""
    b, par = _univariate(rng)
    lhs, rhs = eqn_exp_univariate(par.t[0], par, b)
    return {"t": par.t, "bases": b}, [(lhs, -1.0), (rhs, -1.0)]


def _shifted_z(z, i, q):
    z = list(z)
    z[i] = z[i] / q
    return z


def _cn(rng, n=2):
    return sample_with_bases(Family.CN, rng, n)


@identity("eqn_cn", "certificate", 1e-9)
def _eqn_cn(rng):
    """rho(z, q t_1; C_2) - rho(z, t; C_2) = sum_i g_i(.., z_i/q, ..) - g_i(z)."""
    b, par = _cn(rng)
    z = draw_unit(rng, par.n)
    lhs = rho_cn(z, par.scaled(0, b.q), b) - rho_cn(z, par, b)
    rhs = sum(cert_g_cn(i, _shifted_z(z, i, b.q), par, b) - cert_g_cn(i, z, par, b) for i in range(par.n))
    return {"z": z, "t": par.t, "bases": b}, [(lhs, rhs)]


@identity("eqn_exp_cn", "certificate", 1e-9)
def _eqn_exp_cn(rng):
    """The C_2 difference equation divided by rho."""
    b, par = _cn(rng)
    z = draw_unit(rng, par.n)
    return {"z": z, "t": par.t, "bases": b}, [eqn_exp_cn(z, par, b)]


@identity("exact_point_cn", "certificate", 1e-12)
def _exact_cn(rng):
    """At z_1 = t_1 the divided C_2 equation reads -1 = -1."""
    b, par = _cn(rng)
    z = [par.t[0]] + draw_unit(rng, par.n - 1)
    lhs, rhs = eqn_exp_cn(z, par, b)
    return {"z": z, "t": par.t, "bases": b}, [(lhs, -1.0), (rhs, -1.0)]


def _an(rng, n=2):
    return sample_with_bases(Family.AN, rng, n)


@identity("eqn_an", "certificate", 1e-9)
def _eqn_an(rng):
    """rho(z, q t_1; A_2) - rho(z, t; A_2) = sum_i g_i(.., z_i/q, ..) - g_i(z)."""
    b, par = _an(rng)
    z = draw_unit(rng, par.n)
    lhs = rho_an(z, par.scaled(0, b.q), b) - rho_an(z, par, b)
    rhs = sum(cert_g_an(i, _shifted_z(z, i, b.q), par, b) - cert_g_an(i, z, par, b) for i in range(par.n))
    return {"z": z, "t": par.t, "s": par.s, "bases": b}, [(lhs, rhs)]


@identity("eqn_exp_an", "certificate", 1e-9)
def _eqn_exp_an(rng):
    """The A_2 difference equation divided by rho."""
    b, par = _an(rng)
    z = draw_unit(rng, par.n)
    return {"z": z, "t": par.t, "s": par.s, "bases": b}, [eqn_exp_an(z, par, b)]


@identity("exact_point_an", "certificate", 1e-12)
def _exact_an(rng):
    """At z_1 = t_1 the divided A_2 equation reads -1 = -1."""
    b, par = _an(rng)
    z = [par.t[0]] + draw_unit(rng, par.n - 1)
    lhs, rhs = eqn_exp_an(z, par, b)
    return {"z": z, "t": par.t, "s": par.s, "bases": b}, [(lhs, -1.0), (rhs, -1.0)]


@identity("an_shift_ratio", "certificate", 1e-9)
def _an_ratio(rng):
    """rho(.., z_i/q, ..; A_2) / rho(z; A_2) equals its theta-function expression."""
    b, par = _an(rng)
    z = draw_unit(rng, par.n)
    i = int(rng.integers(par.n))
    lhs = rho_an(_shifted_z(z, i, b.q), par, b) / rho_an(z, par, b)
    return {"z": z, "i": i, "t": par.t, "s": par.s, "bases": b}, [(lhs, an_shift_ratio(i, z, par, b))]


@identity("ellipticity_univariate", "certificate", 1e-9)
def _ellipticity_univariate(rng):
    """Both sides of the divided univariate equation are unchanged by z -> p z."""
    b, par = _univariate(rng)
    z = _phase(rng)
    l0, r0 = eqn_exp_univariate(z, par, b)
    l1, r1 = eqn_exp_univariate(b.p * z, par, b)
    return {"z": z, "t": par.t, "bases": b}, [(l1, l0), (r1, r0)]


@identity("ellipticity_cn", "certificate", 1e-9)
def _ellipticity_cn(rng):
    """Both sides of the divided C_2 equation are unchanged by z_1 -> p z_1."""
    b, par = _cn(rng)
    z = draw_unit(rng, par.n)
    l0, r0 = eqn_exp_cn(z, par, b)
    l1, r1 = eqn_exp_cn([b.p * z[0]] + z[1:], par, b)
    return {"z": z, "t": par.t, "bases": b}, [(l1, l0), (r1, r0)]


@identity("kernel_symmetry_cn", "certificate", 1e-12)
def _symmetry_cn(rng):
    """The C_2 kernel is invariant under permutations and inversions of the z_i."""
    b, par = _cn(rng)
    z = draw_unit(rng, par.n)
    perm = rng.permutation(par.n)
    flips = rng.integers(0, 2, par.n)
    w = [z[k] ** (1 - 2 * int(f)) for k, f in zip(perm, flips)]
    return {"z": z, "w": w, "t": par.t, "bases": b}, [(rho_cn(w, par, b), rho_cn(z, par, b))]


@identity("kernel_symmetry_an", "certificate", 1e-12)
def _symmetry_an(rng):
    """The A_2 kernel is invariant under permutations of (z_1, z_2, z_3), z_1 z_2 z_3 = 1."""
    b, par = _an(rng)
    z = draw_unit(rng, par.n)
    full = z + [1 / np.prod(z)]
    w = [full[k] for k in rng.permutation(par.n + 1)][: par.n]
    return {"z": z, "w": w, "t": par.t, "s": par.s, "bases": b}, [(rho_an(w, par, b), rho_an(z, par, b))]


# ---------------------------------------------------------------------------
# theta-function identities behind the A_n proof


def _theta_identity(which, n):
    def check(rng):
        b, par = _an(rng, n)
        k = int(rng.integers(1, n + 1))
        z = theta_identity_locus(which, draw_unit(rng, n - 1), par, b, k)
        lhs, rhs = theta_identity_residual(which, z, par, b, k)
        return {"z": z, "k": k, "t": par.t, "s": par.s, "bases": b}, [(lhs, rhs)]

    return check


for _n in (2, 3):
    identity(f"afunction_n{_n}", "theta", 1e-10)(_theta_identity(ThetaIdentity.A_FUNCTION, _n))
    identity(f"znplus1_tj_n{_n}", "theta", 1e-10)(_theta_identity(ThetaIdentity.ZN_PLUS_ONE_TJ, _n))
    identity(f"z1_znplus1_n{_n}", "theta", 1e-10)(_theta_identity(ThetaIdentity.Z1_ZN_PLUS_ONE, _n))


# ---------------------------------------------------------------------------
# unit-circle kernels: change of variables to the elliptic-gamma kernels


def _modular_kernel(root, n):
    family = {RootSystem.CN: Family.CN_UNIT, RootSystem.AN: Family.AN_UNIT, RootSystem.DN: Family.DN_UNIT}[root]

    def check(rng):
        w = draw_omega_modified(rng, unit_circle=rng.random() < 0.5)
        par = sample_params(family, w, rng, n=n)
        u = [(rng.random() - 0.5) * w.omega3 for _ in range(n)]
        return {"u": u, "g": par.g, "h": par.h, "omega": w}, [(rho_modified(u, par), rho_modified_via_torus(u, par))]

    return check


identity("rho_cn_modular", "modified", 1e-10)(_modular_kernel(RootSystem.CN, 1))
identity("rho_an_modular", "modified", 1e-10)(_modular_kernel(RootSystem.AN, 1))
identity("rho_dn_modular", "modified", 1e-10)(_modular_kernel(RootSystem.DN, 1))


# ---------------------------------------------------------------------------
# q-reduced kernels


def _eqn_q(root):
    family = Family.CN_Q if root is RootSystem.CN else Family.AN_Q

    def check(rng):
        w = draw_omega_qreduced(rng)
        par = sample_params(family, w, rng, n=2)
        u = [1j * w.omega2 * (2 * rng.random() - 1) for _ in range(par.n)]
        lhs = rho_qreduced(u, par.shifted(0, w.omega1)) - rho_qreduced(u, par)
        rhs = 0
        for i in range(par.n):
            v = list(u)
            v[i] = v[i] - w.omega1
            rhs = rhs + cert_f_qreduced(i, v, par) - cert_f_qreduced(i, u, par)
        return {"u": u, "g": par.g, "h": par.h, "omega": w}, [(lhs, rhs)]

    return check


identity("eqn_cn_q", "qreduced", 1e-9)(_eqn_q(RootSystem.CN))
identity("eqn_an_q", "qreduced", 1e-9)(_eqn_q(RootSystem.AN))


# ---------------------------------------------------------------------------
# battery


def default_selection() -> List[str]:
    return list(REGISTRY)


def run_identity(identity_id: str, samples: int, seed: int, tol: Optional[float] = None,
                 registry: Optional[Dict[str, Identity]] = None) -> IdentityReport:
    reg = REGISTRY if registry is None else registry
    if identity_id not in reg:
        raise ConfigError(f"unknown identity id {identity_id!r}")
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    entry = reg[identity_id]
    rng = stream(identity_id, seed)
    worst, worst_point, done = -1.0, {}, 0
    for _ in range(samples):
        point, pairs = _draw(rng, entry.check)
        r = max(residual(lhs, rhs) for lhs, rhs in pairs)
        if not math.isfinite(r):
            r = math.inf
        if r > worst:
            worst, worst_point = r, serialize(point)
        done += 1
    if done == 0:
        raise EllBetaError(f"identity {identity_id} produced no samples")
    tolerance = entry.tolerance if tol is None else tol
    return IdentityReport(identity_id, done, worst, tolerance, worst <= tolerance, int(seed), worst_point)


def run_battery(selection: Optional[Sequence[str]] = None, samples: int = 100, seed: int = 0,
                tol: Optional[float] = None, registry: Optional[Dict[str, Identity]] = None,
                workers: Optional[int] = None) -> List[IdentityReport]:
    """Run the selected identities (all by default), in parallel across identities.

    ``tol`` overrides every identity's own tolerance.  Reports come back in
    selection order and do not depend on the number of workers.
    """
    reg = REGISTRY if registry is None else registry
    selection = list(reg) if selection is None else list(selection)
    unknown = [s for s in selection if s not in reg]
    if unknown:
        raise ConfigError(f"unknown identity ids: {', '.join(unknown)}")
    workers = worker_count() if workers is None else max(1, workers)
    job = lambda i: run_identity(i, samples, seed, tol, reg)  # noqa: E731
    if workers > 1 and len(selection) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, selection))
    return [job(i) for i in selection]
