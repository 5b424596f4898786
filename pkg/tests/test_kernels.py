import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellbeta.errors import PoleError
from ellbeta.identities import sample_params
from ellbeta.kernels.domain import (
    Direction,
    annulus_clear,
    default_depth,
    pole_list,
    validate_domain,
)
from ellbeta.kernels.elliptic import (
    cert_g_univariate,
    delta_dn,
    eqn_exp_an,
    eqn_exp_cn,
    eqn_exp_univariate,
    rho_an,
    rho_cn,
    rho_univariate,
)
from ellbeta.kernels.params import (
    AnParams,
    AnSymParams,
    CnParams,
    DnParams,
    Family,
    ModifiedParams,
    QReducedParams,
    UnivariateParams,
)
from ellbeta.kernels.unit import rho_modified, rho_modified_via_torus, rho_qreduced
from ellbeta.special import BaseSet, OmegaTriple
from tests._util import PHI, normres, relerr

B = BaseSet(0.3, 0.2)
T5 = (0.6, 0.65, 0.7, 0.55, 0.62)
W_UNIT = OmegaTriple(1, PHI, 3j)
W_LINE = OmegaTriple(1, 1 - 0.4j, 5j)


# ---------------------------------------------------------------------------
# parameter objects


@pytest.mark.parametrize(
    "make",
    [
        lambda: UnivariateParams((0.5,) * 4),
        lambda: CnParams(2, (0.5,) * 6),
        lambda: AnParams(2, (0.5,) * 3, (0.5,) * 3),
        lambda: AnSymParams(1, (0.5,) * 3, (0.5,) * 2),
        lambda: DnParams(1, (0.5,) * 2, (0.5,) * 4),
        lambda: ModifiedParams("Cn", (0.1,) * 4, (), W_UNIT),
        lambda: QReducedParams("An", (0.1,) * 3, (0.1,), W_LINE),
    ],
)
def test_parameter_shapes_are_checked(make):
    with pytest.raises(ValueError):
        make()


def test_derived_products():
    par = AnParams(1, (0.5, 0.4), (0.3, 0.2, 0.9))
    assert par.T == pytest.approx(0.2)
    assert par.S == pytest.approx(0.054)
    mp = ModifiedParams("Dn", (0.1, 0.2, 0.3, 0.4), (0.5,), W_UNIT)
    assert mp.n == 1
    assert mp.F == pytest.approx(1.0)
    assert mp.H == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# domain validation


def test_univariate_small_parameters_violate_product_bound():
    v = validate_domain(UnivariateParams((0.3,) * 5), B)
    assert not v.ok
    assert any(msg.startswith("|pq| < |A|") for msg in v.violations)


def test_cn_n2_with_three_quarter_moduli_is_admissible():
    par = CnParams(2, [0.75 * cmath.exp(0.4j * m) for m in range(7)])
    assert validate_domain(par, B).ok


def test_modified_cn_wrong_half_plane_reported():
    g = [W_UNIT.omega3 * complex(0.1, -0.1)] * 5
    g[0] = W_UNIT.omega3 * complex(0.1, 0.1)
    v = validate_domain(ModifiedParams("Cn", g, (), W_UNIT))
    assert any(msg.startswith("Im(g_1/omega3) < 0") for msg in v.violations)


def test_unit_moduli_reported_per_parameter():
    v = validate_domain(UnivariateParams((0.6, 1.2, 0.7, 0.8, 0.9)), B)
    assert any(msg.startswith("|t_2| < 1") for msg in v.violations)


def test_an_sym_balancing_checked():
    t, s = (0.7, 0.75, 0.72), (0.6, 0.65)
    good = s + (0.06 / (0.7 * 0.75 * 0.72 * 0.6 * 0.65),)
    assert validate_domain(AnSymParams(1, t, good), B).ok
    bad = s + (1.01 * good[2],)
    assert any("balancing" in m for m in validate_domain(AnSymParams(1, t, bad), B).violations)


def test_margin_violation_for_parameter_near_circle():
    par = UnivariateParams((0.99, 0.65, 0.7, 0.55, 0.62))
    v = validate_domain(par, B)
    assert any(msg.startswith("pole margin") for msg in v.violations)
    assert validate_domain(par, B, margin=0.005).ok


def test_line_family_checks():
    g = [W_LINE.omega2 * x for x in (0.3, 0.25, 0.2 + 0.1j, 0.22, 0.27)]
    assert validate_domain(QReducedParams("Cn", g, (), W_LINE)).ok
    g[2] = -g[2]
    assert not validate_domain(QReducedParams("Cn", g, (), W_LINE)).ok


def test_default_depth():
    assert default_depth(BaseSet(0.1, 0.01)) == 6
    assert max(0.5, 0.2) ** default_depth(BaseSet(0.5, 0.2)) < 1e-6


FAMILIES = [
    (Family.UNIVARIATE, 1, B),
    (Family.CN, 2, B),
    (Family.AN, 2, BaseSet(0.6, 0.02)),
    (Family.AN_SYM, 1, B),
    (Family.DN, 1, B),
]


@pytest.mark.parametrize("fam, n, b", FAMILIES)
@given(seed=st.integers(0, 2**32 - 1))
def test_toward_zero_poles_inside_circle(fam, n, b, seed):
    par = sample_params(fam, b, seed, n=n)
    pl = pole_list(par, b)
    assert pl.toward_zero() and pl.toward_infinity()
    assert all(abs(p.location) < 1 for p in pl.toward_zero())
    assert all(abs(p.location) > 1 for p in pl.toward_infinity())


@pytest.mark.parametrize("fam", [Family.CN_Q, Family.AN_Q, Family.DN_Q])
def test_line_poles_on_their_side(fam):
    par = sample_params(fam, W_LINE, 3, n=1)
    for p in pole_list(par).points:
        side = (p.location / W_LINE.omega2).real
        assert (side > 0) == (p.direction is Direction.RIGHT_OF_LINE)


def test_certificate_pole_annulus():
    b = BaseSet(0.6, 0.02)
    par = UnivariateParams(T5)
    assert annulus_clear(par, b)
    # with |pq| < |A| < |p| the certificate pole p/A lies between 1 and 1/|q|
    b = BaseSet(0.5, 0.3)
    par = UnivariateParams((0.8, 0.8, 0.8, 0.8, 0.2 / 0.8**4))
    assert validate_domain(par, b).ok
    assert 1 < abs(b.p / par.A) < 1 / abs(b.q)
    assert not annulus_clear(par, b)


# ---------------------------------------------------------------------------
# kernels


def test_univariate_kernel_symmetries():
    par = UnivariateParams((0.3, 0.4, 0.21, 0.35, 0.25))
    z = 0.9 * cmath.exp(0.3j)
    base = rho_univariate(z, par, B)
    assert relerr(rho_univariate(1 / z, par, B), base) < 1e-13
    for perm in itertools.permutations(par.t):
        assert relerr(rho_univariate(z, UnivariateParams(perm), B), base) < 1e-13


def test_cn_at_n1_is_the_univariate_kernel():
    z = cmath.exp(1.1j)
    assert relerr(rho_cn([z], CnParams(1, T5), B), rho_univariate(z, UnivariateParams(T5), B)) < 1e-13


def test_kernel_vectorised_over_points():
    par = UnivariateParams(T5)
    z = np.exp(1j * np.linspace(0.1, 3, 7))
    vec = rho_univariate(z, par, B)
    assert np.allclose(vec, [rho_univariate(complex(v), par, B) for v in z], rtol=1e-14, atol=0)


def test_kernel_pole_raises():
    par = UnivariateParams(T5)
    with pytest.raises(PoleError):
        rho_univariate(T5[0], par, B)


def test_exact_points_of_divided_equations():
    par = UnivariateParams(T5)
    lhs, rhs = eqn_exp_univariate(par.t[0], par, B)
    assert abs(lhs + 1) < 1e-12 and abs(rhs + 1) < 1e-12
    cn = CnParams(2, (0.6, 0.65, 0.7, 0.55, 0.62, 0.68, 0.66))
    lhs, rhs = eqn_exp_cn([cn.t[0], cmath.exp(0.8j)], cn, B)
    assert abs(lhs + 1) < 1e-12 and abs(rhs + 1) < 1e-12
    b = BaseSet(0.6, 0.02)
    an = sample_params(Family.AN, b, 0, n=2)
    lhs, rhs = eqn_exp_an([an.t[0], cmath.exp(0.8j)], an, b)
    assert abs(lhs + 1) < 1e-12 and abs(rhs + 1) < 1e-12


def test_univariate_difference_equation_at_spec_point():
    par = UnivariateParams((0.3, 0.4, 0.21, 0.35, 0.25))
    z = cmath.exp(1.1j)
    lhs = rho_univariate(z, par.scaled(0, B.q), B) - rho_univariate(z, par, B)
    rhs = cert_g_univariate(z / B.q, par, B) - cert_g_univariate(z, par, B)
    assert normres(lhs, rhs) < 1e-10


def test_an_kernel_symmetric_in_all_coordinates():
    b = BaseSet(0.6, 0.02)
    par = sample_params(Family.AN, b, 5, n=2)
    z = [cmath.exp(0.4j), cmath.exp(-1.7j)]
    full = z + [1 / (z[0] * z[1])]
    base = rho_an(z, par, b)
    for perm in itertools.permutations(full):
        assert relerr(rho_an(list(perm[:2]), par, b), base) < 1e-12


def test_dn_kernel_invariant_under_inversion():
    par = sample_params(Family.DN, B, 2, n=1)
    z = cmath.exp(0.7j)
    assert relerr(delta_dn([1 / z], par, B), delta_dn([z], par, B)) < 1e-12


# ---------------------------------------------------------------------------
# unit-circle and line kernels


def _cn_unit():
    return ModifiedParams("Cn", (0.4, 0.35 + 0.1j, 0.45, 0.3 - 0.05j, 0.38), (), W_UNIT)


def test_segment_endpoints_are_exact_zeros():
    # z = e(-u/omega3) = -1 at both ends, where the 1/G(2u)G(-2u) factor vanishes
    par = _cn_unit()
    half = W_UNIT.omega3 / 2
    assert rho_modified([half], par) == 0
    assert rho_modified([-half], par) == 0


def test_segment_kernel_is_omega3_periodic():
    par = _cn_unit()
    for u in (1.4j, 0.3 + 0.2j, -0.9j):
        assert relerr(rho_modified([u - W_UNIT.omega3], par), rho_modified([u], par)) < 1e-9


def test_modified_kernel_matches_torus_form():
    par = _cn_unit()
    for u in (0.4j, -1.1j, 0.2 - 0.3j):
        assert relerr(rho_modified([u], par), rho_modified_via_torus([u], par)) < 1e-10


def test_qreduced_cn_kernel_is_even():
    g = [W_LINE.omega2 * x for x in (0.3, 0.25, 0.2 + 0.1j, 0.22, 0.27)]
    par = QReducedParams("Cn", g, (), W_LINE)
    for x in (0.1, 0.37, 1.2):
        u = 1j * W_LINE.omega2 * x
        assert relerr(rho_qreduced([-u], par), rho_qreduced([u], par)) < 1e-12
