"""Theta, elliptic gamma, modified elliptic gamma and double sine functions.

Every infinite product is evaluated as ``exp`` of a sum of ``log(1 - x)``
terms.  Summing logarithms factor by factor means the branch of each
individual logarithm is irrelevant (only the exponential of the total is
used), and products spanning many orders of magnitude never overflow.
Functions prefixed with ``log_`` return that log-sum directly, which is what
the kernel code composes.

All functions accept scalars or numpy arrays for the argument; bases are
scalars.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, PoleError, TruncationError

TWO_PI_I = 2j * math.pi

#: a denominator factor smaller than this in modulus is reported as a pole
POLE_TOL = 1e-13
#: a numerator factor smaller than this in modulus is treated as an exact zero
ZERO_TOL = 1e-14
#: ||q| - 1| below this selects the modular representation of G
UNIT_CIRCLE_TOL = 1e-12

# cap on (array size) x (number of factors) materialised at once
_BLOCK = 1 << 20
_GROUP = 16


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of infinite products.

    ``eps`` bounds the absolute size of the neglected tail of the log-sum;
    ``max_terms`` caps the number of factors per product index.
    """

    eps: float = 1e-17
    max_terms: int = 20000

    def __post_init__(self):
        if not 0 < self.eps < 1e-6:
            raise ValueError(f"eps must lie in (0, 1e-6), got {self.eps}")
        if self.max_terms < 8:
            raise ValueError(f"max_terms must be >= 8, got {self.max_terms}")


DEFAULT_POLICY = TruncationPolicy()


class Regime(enum.Enum):
    ALL_INSIDE = "AllInside"
    UNIT_CIRCLE_Q = "UnitCircleQ"
    OTHER = "Other"


@dataclass(frozen=True)
class BaseSet:
    """The bases of one evaluation.

    Families built on the ordinary elliptic gamma function only need ``q``
    and ``p``; the remaining four are filled in when the set comes from an
    :class:`OmegaTriple`.
    """

    q: complex
    p: complex
    r: Optional[complex] = None
    q_tilde: Optional[complex] = None
    p_tilde: Optional[complex] = None
    r_tilde: Optional[complex] = None

    @property
    def regime(self) -> Regime:
        if abs(self.q) < 1 and abs(self.p) < 1:
            return Regime.ALL_INSIDE
        if (
            abs(abs(self.q) - 1) <= 1e-14
            and self.p_tilde is not None
            and abs(self.p_tilde) < 1
            and abs(self.r_tilde) < 1
        ):
            return Regime.UNIT_CIRCLE_Q
        return Regime.OTHER


@dataclass(frozen=True)
class OmegaTriple:
    """Quasi-periods (omega1, omega2, omega3) and the six bases they define."""

    omega1: complex
    omega2: complex
    omega3: complex
    _bases: BaseSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega3"):
            v = complex(getattr(self, name))
            if v == 0:
                raise DomainError(f"{name} must be nonzero")
            object.__setattr__(self, name, v)
        w1, w2, w3 = self.omega1, self.omega2, self.omega3
        e = lambda x: cmath.exp(TWO_PI_I * x)  # noqa: E731
        bases = BaseSet(
            q=e(w1 / w2),
            p=e(w3 / w2),
            r=e(w3 / w1),
            q_tilde=e(-w2 / w1),
            p_tilde=e(-w2 / w3),
            r_tilde=e(-w1 / w3),
        )
        object.__setattr__(self, "_bases", bases)

    @property
    def omegas(self) -> tuple:
        return (self.omega1, self.omega2, self.omega3)

    def bases(self) -> BaseSet:
        return self._bases

    def swapped(self) -> "OmegaTriple":
        """The triple with omega1 and omega2 exchanged."""
        return OmegaTriple(self.omega2, self.omega1, self.omega3)


# ---------------------------------------------------------------------------
# log-sum primitives


def _as_complex_array(a):
    return np.asarray(a, dtype=np.complex128)


def _check_factors(fac, index, denominator, args, nreal):
    """Pole / zero screening of the factors (1 - a b^j); returns a zero mask."""
    small = np.abs(fac[:, :nreal]) < (POLE_TOL if denominator else ZERO_TOL)
    if not small.any():
        return None
    if denominator:
        row, col = np.argwhere(small)[0]
        loc = complex(args[row])
        idx = tuple(int(i) for i in np.atleast_1d(index[col]))
        raise PoleError(f"pole: factor {idx} vanishes for argument {loc}", location=loc, index=idx)
    mask = np.zeros(fac.shape, dtype=bool)
    mask[:, :nreal] = small
    return mask


def _log_products(a, powers, index, denominator):
    """sum_j log(1 - a * powers[j]) for every element of ``a``.

    ``powers`` is the flat list of base monomials; ``index`` labels them for
    error messages.  Factors are multiplied directly in groups of ``_GROUP``
    (bounded away from overflow by the magnitude check) and the logarithms of
    the group products are summed.  Zero factors in a numerator give ``-inf``.
    """
    flat = a.reshape(-1)
    out = np.zeros(flat.shape, dtype=np.complex128)
    if flat.size == 0 or powers.size == 0:
        return out.reshape(a.shape)
    pmax = float(np.max(np.abs(powers)))
    amax = float(np.max(np.abs(flat)))
    group = _GROUP if amax * pmax < 1e15 else 1
    ncol = -(-powers.size // group) * group
    padded = np.zeros(ncol, dtype=np.complex128)
    padded[: powers.size] = powers
    rows = max(1, _BLOCK // ncol)
    for start in range(0, flat.size, rows):
        fac = 1.0 - flat[start : start + rows, None] * padded[None, :]
        zero = _check_factors(fac, index, denominator, flat[start : start + rows], powers.size)
        if zero is not None:
            fac[zero] = 0.0
        prods = fac.reshape(fac.shape[0], -1, group).prod(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[start : start + rows] = np.log(prods).sum(axis=1)
    return out.reshape(a.shape)


def _depth(amax, bmod, policy):
    """Smallest J with amax * |b|^J / (1 - |b|) < eps."""
    if bmod == 0.0 or amax == 0.0:
        return 1
    need = math.log(policy.eps * (1.0 - bmod) / amax) / math.log(bmod)
    J = max(1, int(math.ceil(need)))
    if J > policy.max_terms:
        raise TruncationError(
            f"product needs {J} factors (|base|={bmod:.6g}), max_terms={policy.max_terms}"
        )
    return J


def log_qpoch(a, b, policy: TruncationPolicy = DEFAULT_POLICY, *, denominator=False):
    """log of (a; b)_inf as a sum of logarithms of its factors."""
    b = complex(b)
    bmod = abs(b)
    if bmod >= 1:
        raise DomainError(f"|b| must be < 1 for (a;b)_inf, got |b|={bmod}")
    a = _as_complex_array(a)
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    J = _depth(amax, bmod, policy)
    j = np.arange(J)
    powers = b**j if b != 0 else (j == 0).astype(np.complex128)
    return _log_products(a, powers, j, denominator)


@dataclass(frozen=True)
class _Lattice:
    powers: np.ndarray
    index: np.ndarray


def _lattice(q: complex, p: complex, amax: float, policy: TruncationPolicy) -> _Lattice:
    """Monomials q^j p^k kept in a double product over j, k >= 0.

    Keeps every (j, k) with amax |q|^j |p|^k >= delta.  For a given k the
    discarded j-tail is below delta / (1 - |q|); summing over the K values of
    k with some survivor plus the all-discarded rows k >= K gives a total tail
    of at most (K + 1) delta / ((1 - |q|)(1 - |p|)), and delta is chosen to
    make that < eps.
    """
    qm, pm = abs(q), abs(p)
    if qm >= 1 or pm >= 1:
        raise DomainError(f"bases must satisfy |q|,|p| < 1, got {qm}, {pm}")
    scale = policy.eps * (1 - qm) * (1 - pm)
    if amax == 0.0:
        return _Lattice(np.ones(1, dtype=np.complex128), np.zeros((1, 2), dtype=int))
    delta = scale
    for _ in range(3):
        K = 1 if pm == 0 else max(1, int(math.ceil(math.log(delta / amax) / math.log(pm))))
        delta = scale / (K + 1)
    if K > policy.max_terms:
        raise TruncationError(f"double product needs {K} rows, max_terms={policy.max_terms}")
    ks = np.arange(K)
    lead = amax * pm**ks
    ks, lead = ks[lead >= delta], lead[lead >= delta]
    if ks.size == 0:
        return _Lattice(np.zeros(0, dtype=np.complex128), np.zeros((0, 2), dtype=int))
    if qm == 0:
        Jk = np.ones(ks.size, dtype=int)
    else:
        Jk = np.maximum(1, np.ceil(np.log(delta / lead) / math.log(qm)).astype(int))
    if Jk.max() > policy.max_terms:
        raise TruncationError(f"double product needs {int(Jk.max())} columns, max_terms={policy.max_terms}")
    starts = np.repeat(np.cumsum(Jk) - Jk, Jk)
    index = np.stack([np.arange(int(Jk.sum())) - starts, np.repeat(ks, Jk)], axis=1)
    powers = (q ** index[:, 0]) * (p ** index[:, 1])
    return _Lattice(powers.astype(np.complex128), index)


def log_theta(z, p, policy: TruncationPolicy = DEFAULT_POLICY, *, denominator=False):
    """log of theta(z; p) = (z; p)_inf (p/z; p)_inf."""
    z = _as_complex_array(z)
    if np.any(z == 0):
        raise DomainError("theta(z; p) is undefined at z = 0")
    return log_qpoch(z, p, policy, denominator=denominator) + log_qpoch(
        p / z, p, policy, denominator=denominator
    )


def log_elliptic_gamma(z, q, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """log of Gamma(z; q, p); raises PoleError on the pole lattice q^-j p^-k."""
    z = _as_complex_array(z)
    q, p = complex(q), complex(p)
    if np.any(z == 0):
        raise DomainError("elliptic gamma is undefined at z = 0")
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    den = _lattice(q, p, zmax, policy)
    out = -_log_products(z, den.powers, den.index, denominator=True)
    w = (q * p) / z
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    num = _lattice(q, p, wmax, policy)
    out += _log_products(w, num.powers, num.index, denominator=False)
    return out


def log_gamma_pair_inv(x, q, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """log of 1 / (Gamma(x) Gamma(1/x)) = log theta(x; q) + log theta(1/x; p).

    Follows from Gamma(qz) = theta(z; p) Gamma(z), Gamma(pz) = theta(z; q) Gamma(z)
    and reflection; entire in x, so no pole screening.
    """
    x = _as_complex_array(x)
    return log_theta(x, q, policy) + log_theta(1.0 / x, p, policy)


def _finish(logv):
    v = np.exp(logv)
    return complex(v) if np.ndim(v) == 0 else v


def qpoch_inf(a, b, policy: TruncationPolicy = DEFAULT_POLICY):
    """(a; b)_inf = prod_{j >= 0} (1 - a b^j), for |b| < 1."""
    return _finish(log_qpoch(a, b, policy))


def theta(z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """theta(z; p) = (z; p)_inf (p/z; p)_inf."""
    return _finish(log_theta(z, p, policy))


def elliptic_gamma(z, q, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """Gamma(z; q, p) = prod_{j,k>=0} (1 - q^{j+1} p^{k+1}/z) / (1 - z q^j p^k)."""
    return _finish(log_elliptic_gamma(z, q, p, policy))


# ---------------------------------------------------------------------------
# quasi-period functions


def b22(u, w: OmegaTriple):
    """The Bernoulli polynomial B_{2,2}(u; omega1, omega2)."""
    w1, w2 = w.omega1, w.omega2
    u = np.asarray(u, dtype=np.complex128) if np.ndim(u) else complex(u)
    return u * u / (w1 * w2) - u / w1 - u / w2 + w1 / (6 * w2) + w2 / (6 * w1) + 0.5


def poly_p(u, w: OmegaTriple):
    """The cubic P(u) with P(v + s/2) = v (v^2 - sum(omega^2)/4) / (3 omega1 omega2 omega3)."""
    w1, w2, w3 = w.omegas
    u = np.asarray(u, dtype=np.complex128) if np.ndim(u) else complex(u)
    v = u - (w1 + w2 + w3) / 2
    return v * (v * v - (w1 * w1 + w2 * w2 + w3 * w3) / 4) / (3 * w1 * w2 * w3)


class GPath(enum.Enum):
    AUTO = "auto"
    PRODUCT = "product"
    MODULAR = "modular"


def _product_ok(b: BaseSet) -> bool:
    return max(abs(b.q), abs(b.p), abs(b.r), abs(b.q_tilde)) < 1


def _modular_ok(b: BaseSet) -> bool:
    return max(abs(b.r_tilde), abs(b.p_tilde)) < 1


def _resolve_path(w: OmegaTriple, path) -> GPath:
    path = GPath(path)
    b = w.bases()
    if path is GPath.AUTO:
        if abs(abs(b.q) - 1) <= UNIT_CIRCLE_TOL and _modular_ok(b):
            return GPath.MODULAR
        if _product_ok(b):
            return GPath.PRODUCT
        if _modular_ok(b):
            return GPath.MODULAR
        raise DomainError("neither representation of G converges for these quasi-periods")
    if path is GPath.PRODUCT and not _product_ok(b):
        raise DomainError("product form of G needs |q|, |p|, |r|, |q~| < 1")
    if path is GPath.MODULAR and not _modular_ok(b):
        raise DomainError("modular form of G needs |r~|, |p~| < 1")
    return path


def log_modified_gamma(u, w: OmegaTriple, path=GPath.AUTO, policy=DEFAULT_POLICY):
    """log G(u; omega) by the double product or by the modular representation."""
    u = _as_complex_array(u)
    b = w.bases()
    path = _resolve_path(w, path)
    if path is GPath.PRODUCT:
        # the (q, p) half of the double product is Gamma(e(u/w2); q, p) and the
        # (q~, r) half is Gamma(r e(-u/w1); q~, r)
        x = np.exp(TWO_PI_I * u / w.omega2)
        y = b.r * np.exp(-TWO_PI_I * u / w.omega1)
        return log_elliptic_gamma(x, b.q, b.p, policy) + log_elliptic_gamma(
            y, b.q_tilde, b.r, policy
        )
    z = np.exp(-TWO_PI_I * u / w.omega3)
    return -1j * math.pi * poly_p(u, w) + log_elliptic_gamma(z, b.r_tilde, b.p_tilde, policy)


def modified_gamma_g(u, w: OmegaTriple, path=GPath.AUTO, policy=DEFAULT_POLICY):
    """The modified elliptic gamma function G(u; omega)."""
    return _finish(log_modified_gamma(u, w, path, policy))


def log_modified_gamma_pair_inv(x, w: OmegaTriple, policy=DEFAULT_POLICY):
    """log of 1 / (G(x) G(-x)), entire in x (modular representation)."""
    x = _as_complex_array(x)
    b = w.bases()
    if not _modular_ok(b):
        raise DomainError("1/(G(x)G(-x)) uses the modular form: needs |r~|, |p~| < 1")
    z = np.exp(-TWO_PI_I * x / w.omega3)
    phase = 1j * math.pi * (poly_p(x, w) + poly_p(-x, w))
    return phase + log_gamma_pair_inv(z, b.r_tilde, b.p_tilde, policy)


def _check_double_sine(w: OmegaTriple):
    b = w.bases()
    if not (abs(b.q) < 1 and abs(b.q_tilde) < 1):
        raise DomainError("double sine product needs Im(omega1/omega2) > 0")
    return b


def log_double_sine(u, w: OmegaTriple, policy=DEFAULT_POLICY):
    """log S(u; omega1, omega2) from the ratio of two q-Pochhammer symbols."""
    u = _as_complex_array(u)
    b = _check_double_sine(w)
    num = log_qpoch(np.exp(TWO_PI_I * u / w.omega2), b.q, policy)
    den = log_qpoch(np.exp(TWO_PI_I * u / w.omega1) * b.q_tilde, b.q_tilde, policy, denominator=True)
    return num - den


def double_sine(u, w: OmegaTriple, policy=DEFAULT_POLICY):
    """S(u; omega1, omega2) = (e(u/w2); q)_inf / (e(u/w1) q~; q~)_inf."""
    return _finish(log_double_sine(u, w, policy))


def log_double_sine_pair(u, w: OmegaTriple):
    """log of S(u) S(-u) from the reflection formula (elementary)."""
    u = _as_complex_array(u)
    with np.errstate(divide="ignore"):
        return (
            -1j * math.pi * b22(u, w)
            + np.log(1 - np.exp(-TWO_PI_I * u / w.omega2))
            + np.log(1 - np.exp(-TWO_PI_I * u / w.omega1))
        )


class KappaPath(enum.Enum):
    ETA_PRODUCTS = "eta"
    OMEGA_FORM = "omega"


def kappa(w: OmegaTriple, path=KappaPath.ETA_PRODUCTS, policy=DEFAULT_POLICY) -> complex:
    """The normalisation constant of the unit-circle integrals, two ways."""
    path = KappaPath(path)
    b = w.bases()
    if path is KappaPath.ETA_PRODUCTS:
        if not _product_ok(b):
            raise DomainError("eta-product form of kappa needs |q|, |p|, |r|, |q~| < 1")
        logv = (
            log_qpoch(b.q_tilde, b.q_tilde, policy)
            - log_qpoch(b.q, b.q, policy)
            - log_qpoch(b.p, b.p, policy)
            - log_qpoch(b.r, b.r, policy)
        )
        return -complex(np.exp(logv))
    if not _modular_ok(b):
        raise DomainError("omega form of kappa needs |r~|, |p~| < 1")
    w1, w2, w3 = w.omegas
    expo = 1j * math.pi / 12 * (w1 + w2 + w3) * (1 / w1 + 1 / w2 + 1 / w3)
    logv = expo - log_qpoch(b.r_tilde, b.r_tilde, policy) - log_qpoch(b.p_tilde, b.p_tilde, policy)
    return complex(w3 / w2 * np.exp(logv))
