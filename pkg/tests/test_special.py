import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ellbeta import oracle as O
from ellbeta.errors import DomainError, PoleError, TruncationError
from ellbeta.special import (
    BaseSet,
    GPath,
    KappaPath,
    OmegaTriple,
    Regime,
    TruncationPolicy,
    b22,
    double_sine,
    elliptic_gamma,
    kappa,
    log_double_sine,
    log_double_sine_pair,
    modified_gamma_g,
    poly_p,
    qpoch_inf,
    theta,
)
from tests._util import PHI, normres, polar, relerr

phases = st.floats(0, 2 * math.pi)


def moduli(lo, hi):
    return st.floats(lo, hi)


@st.composite
def base_pairs(draw, lo=0.1, hi=0.5):
    return polar(draw(moduli(lo, hi)), draw(phases)), polar(draw(moduli(lo, hi)), draw(phases))


@st.composite
def omega_triples(draw):
    # (1, a - ib, ic): every one of the six bases lies inside the unit disk
    a = draw(st.floats(0.6, 2.0))
    b = draw(st.floats(0.15, 0.6))
    c = draw(st.floats(1.5, 3.5))
    return OmegaTriple(1, complex(a, -b), complex(0, c))


# ---------------------------------------------------------------------------
# types


def test_omega_triple_reconstructs_bases():
    w = OmegaTriple(1, 2 - 0.5j, 1 + 2j)
    b = w.bases()
    e = lambda x: cmath.exp(2j * math.pi * x)  # noqa: E731
    w1, w2, w3 = w.omegas
    expected = {
        "q": e(w1 / w2), "p": e(w3 / w2), "r": e(w3 / w1),
        "q_tilde": e(-w2 / w1), "p_tilde": e(-w2 / w3), "r_tilde": e(-w1 / w3),
    }
    for name, v in expected.items():
        assert relerr(getattr(b, name), v) <= 1e-14


def test_omega_triple_rejects_zero():
    with pytest.raises(DomainError):
        OmegaTriple(1, 0, 1j)


def test_regimes():
    assert BaseSet(0.3, 0.2).regime is Regime.ALL_INSIDE
    assert OmegaTriple(1, PHI, 3j).bases().regime is Regime.UNIT_CIRCLE_Q
    assert BaseSet(1.2, 0.2).regime is Regime.OTHER


@pytest.mark.parametrize("kw", [{"eps": 0.0}, {"eps": 1e-5}, {"max_terms": 7}])
def test_truncation_policy_invariants(kw):
    with pytest.raises(ValueError):
        TruncationPolicy(**kw)


# ---------------------------------------------------------------------------
# q-Pochhammer and theta


def test_qpoch_trivial_cases():
    assert qpoch_inf(0.3, 0) == pytest.approx(0.7, abs=1e-15)
    assert qpoch_inf(0, 0.5) == 1


def test_qpoch_exact_zero():
    # a = b^-2 kills the third factor exactly
    assert qpoch_inf(1 / 0.25, 0.5) == 0


def test_qpoch_rejects_unit_base():
    with pytest.raises(DomainError):
        qpoch_inf(0.2, 1.0)


def test_qpoch_truncation_error():
    with pytest.raises(TruncationError):
        qpoch_inf(0.5, 0.999, TruncationPolicy(max_terms=8))


def test_qpoch_tail_bound_holds():
    a, b = 0.2 + 0.1j, 0.9
    with O.precision(30):
        exact = complex(O.qpoch(a, b))
    assert relerr(qpoch_inf(a, b), exact) < 1e-14


def test_theta_trivial_cases():
    assert theta(1, 0.3) == 0
    assert theta(0.4, 0) == pytest.approx(0.6, abs=1e-15)


def test_theta_rejects_zero():
    with pytest.raises(DomainError):
        theta(0, 0.3)


def test_theta_vectorised_matches_scalar():
    z = np.array([0.5 + 0.2j, 2 - 1j, 0.3j])
    assert np.allclose(theta(z, 0.25), [theta(complex(v), 0.25) for v in z], rtol=1e-15, atol=0)


# p = 0 would put p z at the excluded point 0
@given(moduli(0.1, 10), phases, moduli(1e-3, 0.5), phases)
def test_theta_quasiperiodicity(zr, zphi, pr, pphi):
    z, p = polar(zr, zphi), polar(pr, pphi)
    assert normres(theta(p * z, p), -theta(z, p) / z) < 1e-12
    assert normres(theta(1 / z, p), -theta(z, p) / z) < 1e-12


# ---------------------------------------------------------------------------
# elliptic gamma


def test_gamma_at_square_root_of_pq_is_one():
    q, p = 0.3, 0.2
    assert abs(elliptic_gamma(math.sqrt(p * q), q, p) - 1) < 1e-15


def test_gamma_reflection_example():
    q, p = 0.3, 0.2
    assert abs(elliptic_gamma(0.5, q, p) * elliptic_gamma(p * q / 0.5, q, p) - 1) < 1e-14


def test_gamma_pole_reports_index():
    q, p = 0.3, 0.2
    with pytest.raises(PoleError) as info:
        elliptic_gamma(1 / (q**2 * p), q, p)
    assert info.value.index == (2, 1)
    assert info.value.location == pytest.approx(1 / (q**2 * p))


def test_gamma_zero_of_numerator_is_exact():
    q, p = 0.3, 0.2
    assert elliptic_gamma(q * p, q, p) == 0


def test_gamma_rejects_outside_disk():
    with pytest.raises(DomainError):
        elliptic_gamma(0.5, 1.1, 0.2)


def _away_from_lattice(z, q, p):
    # keep the point 1e-3 away (relatively) from the poles q^-j p^-k and the zeros
    for j in range(6):
        for k in range(6):
            for x in (z * q**j * p**k, q ** (j + 1) * p ** (k + 1) / z):
                if abs(1 - x) < 1e-3:
                    return False
    return True


@given(moduli(0.3, 3), phases, base_pairs())
def test_gamma_shift_and_reflection(zr, zphi, qp):
    q, p = qp
    z = polar(zr, zphi)
    assume(_away_from_lattice(z, q, p) and _away_from_lattice(q * z, q, p) and _away_from_lattice(p * z, q, p))
    g = elliptic_gamma(z, q, p)
    assert normres(elliptic_gamma(q * z, q, p), theta(z, p) * g) < 1e-11
    assert normres(elliptic_gamma(p * z, q, p), theta(z, q) * g) < 1e-11
    assert normres(g * elliptic_gamma(p * q / z, q, p), 1) < 1e-11
    assert normres(elliptic_gamma(z, p, q), g) < 1e-12


# ---------------------------------------------------------------------------
# polynomials


def test_b22_examples():
    w = OmegaTriple(1, 1, 1j)
    assert b22(0, w) == pytest.approx(5 / 6, abs=1e-15)
    assert b22(1, w) == pytest.approx(-1 / 6, abs=1e-15)


def test_poly_p_vanishes_at_centre():
    w = OmegaTriple(1, 2, 3j)
    assert poly_p(sum(w.omegas) / 2, w) == 0


def test_poly_p_antisymmetry_example():
    w = OmegaTriple(1, 2, 3j)
    assert abs(poly_p(sum(w.omegas) - 0.7, w) + poly_p(0.7, w)) < 1e-15


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), omega_triples())
def test_poly_p_antisymmetry(u, w):
    assert normres(poly_p(sum(w.omegas) - u, w), -poly_p(u, w)) < 1e-12


# ---------------------------------------------------------------------------
# modified elliptic gamma


def test_g_paths_agree_example():
    w = OmegaTriple(1, 2 - 0.5j, 1 + 2j)
    a = modified_gamma_g(0.3, w, GPath.PRODUCT)
    b = modified_gamma_g(0.3, w, GPath.MODULAR)
    assert relerr(a, b) < 1e-10


def test_g_reflection_example():
    w = OmegaTriple(1, 2 - 0.5j, 1 + 2j)
    a = 0.4
    assert abs(modified_gamma_g(a, w) * modified_gamma_g(sum(w.omegas) - a, w) - 1) < 1e-10


def test_g_auto_picks_modular_on_unit_circle():
    w = OmegaTriple(1, PHI, 3j)
    assert abs(abs(w.bases().q) - 1) < 1e-12
    assert modified_gamma_g(0.25, w) == modified_gamma_g(0.25, w, GPath.MODULAR)
    with pytest.raises(DomainError):
        modified_gamma_g(0.25, w, GPath.PRODUCT)


def test_g_no_admissible_path():
    # all three periods real: every base sits on the unit circle
    with pytest.raises(DomainError):
        modified_gamma_g(0.1, OmegaTriple(1, PHI, 2.5))


def _away_from_periods(u, w, tol=1e-3):
    # poles and zeros of G sit on the period lattice; near them a factor
    # (1 - z) with |1 - z| ~ d costs eps/d of relative accuracy
    w1, w2, w3 = w.omegas
    r = range(-3, 4)
    return all(abs(u - (j * w1 + k * w2 + m * w3)) > tol for j in r for k in r for m in r)


@given(st.floats(-0.6, 0.6), st.floats(-0.4, 0.4), omega_triples(), st.sampled_from([GPath.PRODUCT, GPath.MODULAR]))
def test_g_difference_equations(x, y, w, path):
    u = complex(x, y)
    assume(_away_from_periods(u, w))
    b = w.bases()
    w1, w2, w3 = w.omegas
    try:
        g = modified_gamma_g(u, w, path)
        g1 = modified_gamma_g(u + w1, w, path)
        g2 = modified_gamma_g(u + w2, w, path)
        g3 = modified_gamma_g(u + w3, w, path)
    except PoleError:
        assume(False)
    e = lambda v: cmath.exp(2j * math.pi * v)  # noqa: E731
    assert normres(g1 / g, theta(e(u / w2), b.p)) < 1e-10
    assert normres(g2 / g, theta(e(u / w1), b.r)) < 1e-10
    assert normres(g3 / g, cmath.exp(-1j * math.pi * b22(u, w))) < 1e-10


@given(st.floats(-0.6, 0.6), st.floats(-0.4, 0.4), omega_triples())
def test_g_symmetric_in_first_two_periods(x, y, w):
    u = complex(x, y)
    assume(_away_from_periods(u, w))
    try:
        a = modified_gamma_g(u, w, GPath.MODULAR)
        b = modified_gamma_g(u, w.swapped(), GPath.MODULAR)
    except PoleError:
        assume(False)
    assert normres(a, b) < 1e-11


# ---------------------------------------------------------------------------
# double sine and kappa


def test_double_sine_zero_at_origin():
    assert double_sine(0, OmegaTriple(1, 1 - 1j, 3j)) == 0


def test_double_sine_reflection_example():
    w = OmegaTriple(1, 1 - 1j, 3j)
    u = 0.3 + 0.1j
    lhs = double_sine(u, w) * double_sine(-u, w)
    b = b22(u, w)
    rhs = cmath.exp(-1j * math.pi * b) * (1 - cmath.exp(-2j * math.pi * u / w.omega2)) * (
        1 - cmath.exp(-2j * math.pi * u / w.omega1)
    )
    assert relerr(lhs, rhs) < 1e-12
    assert relerr(cmath.exp(complex(log_double_sine_pair(u, w))), rhs) < 1e-14


def test_double_sine_needs_upper_half_plane_ratio():
    with pytest.raises(DomainError):
        double_sine(0.5, OmegaTriple(1, 1 + 2j, 3j))


def test_double_sine_pole():
    w = OmegaTriple(1, 1 - 1j, 3j)
    with pytest.raises(PoleError):
        double_sine(w.omega1 + w.omega2, w)


@given(st.floats(0.7, 1.5), st.floats(0.3, 0.8))
def test_double_sine_asymptotics(a, bb):
    w = OmegaTriple(1, complex(a, -bb), 5j)
    # Im(u/w) = Re(u) Im(1/w) + Im(u) Re(1/w): solve for Im(u/w1) = Im(u/w2) = level
    m = np.array([[(1 / w.omega1).imag, (1 / w.omega1).real], [(1 / w.omega2).imag, (1 / w.omega2).real]])
    for level in (50.0, -50.0):
        ur, ui = np.linalg.solve(m, [level, level])
        u = complex(ur, ui)
        # rational omega ratios can land u on the lattice k omega1 + m omega2
        k, mm = np.linalg.solve(np.array([[1.0, w.omega2.real], [0.0, w.omega2.imag]]), [u.real, u.imag])
        assume(abs(k - round(k)) > 1e-6 or abs(mm - round(mm)) > 1e-6)
        logs = complex(log_double_sine(u, w))
        if level < 0:
            # S itself is huge here; combine with the phase in log space
            logs += 1j * math.pi * complex(b22(u, w))
        assert abs(cmath.exp(logs) - 1) < 1e-8


def test_kappa_paths_agree_example():
    w = OmegaTriple(1, 2 - 0.5j, 3j)
    assert relerr(kappa(w, KappaPath.ETA_PRODUCTS), kappa(w, KappaPath.OMEGA_FORM)) < 1e-10


def test_kappa_eta_needs_product_bases():
    with pytest.raises(DomainError):
        kappa(OmegaTriple(1, PHI, 2j), KappaPath.ETA_PRODUCTS)


@given(omega_triples())
def test_kappa_paths_agree(w):
    assert relerr(kappa(w, "eta"), kappa(w, "omega")) < 1e-10
