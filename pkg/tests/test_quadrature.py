import math

import numpy as np
import pytest

from ellbeta.errors import ConfigError
from ellbeta.integrals import integrate, qreduced_integrate, rhs_closed_form
from ellbeta.kernels.coords import Points, unit
from ellbeta.kernels.params import CnParams, QReducedParams, UnivariateParams
from ellbeta.kernels.unit import log_rho_qreduced
from ellbeta.quadrature import (
    WORKERS_ENV,
    GridOptions,
    default_halfwidth,
    line_integrate,
    torus_integrate,
    worker_count,
)
from ellbeta.special import BaseSet, OmegaTriple
from tests._util import relerr

B = BaseSet(0.3, 0.2)
T5 = (0.6, 0.65, 0.7, 0.55, 0.62)
W_LINE = OmegaTriple(1, 1 - 0.4j, 5j)


def _monomial(k, n=1):
    return lambda X: X.apply(lambda z: z**k, unit(n, 0))


@pytest.mark.parametrize("kw", [{"initial_points": 8}, {"initial_points": 33}, {"max_points": 32},
                                {"rel_tol": 0.0}, {"line_halfwidth": -1.0}])
def test_grid_options_invariants(kw):
    with pytest.raises(ConfigError):
        GridOptions(**kw)


def test_default_caps():
    opt = GridOptions()
    assert (opt.max_for(1), opt.max_for(2), opt.max_for(3)) == (4096, 1024, 128)


def test_constant_integrates_to_two_pi_i():
    res = torus_integrate(_monomial(0), 1)
    assert abs(res.value - 2j * math.pi) < 1e-14
    res2 = torus_integrate(_monomial(0, 2), 2)
    assert abs(res2.value - (2j * math.pi) ** 2) < 1e-12


@pytest.mark.parametrize("k", [1, -1, 3, 17])
def test_monomials_integrate_to_zero(k):
    assert abs(torus_integrate(_monomial(k), 1).value) < 1e-14


def test_result_invariants():
    opt = GridOptions(initial_points=16)
    f = lambda X: X.apply(lambda z: 1 / (1 - 0.5 * z) + 1 / (1 - 0.5 / z), unit(1, 0))  # noqa: E731
    res = torus_integrate(f, 1, opt)
    assert res.converged
    assert res.err_estimate <= opt.rel_tol * (1 + abs(res.value))
    ratio = res.points_per_dim // opt.initial_points
    assert ratio * opt.initial_points == res.points_per_dim and ratio & (ratio - 1) == 0
    # constant terms of the two geometric series
    assert abs(res.value - 4j * math.pi) < 1e-13


def test_unconverged_is_flagged_not_raised():
    f = lambda X: X.apply(lambda z: 1 / (1 - 0.999 * z), unit(1, 0))  # noqa: E731
    res = torus_integrate(f, 1, GridOptions(initial_points=16, max_points=64))
    assert not res.converged
    assert res.points_per_dim == 64


def test_spectral_convergence_univariate():
    par = UnivariateParams(T5)
    rhs = rhs_closed_form(par, B)
    err = {}
    for N in (32, 64, 128):
        v = integrate(par, B, GridOptions(initial_points=N, max_points=N)).value
        err[N] = relerr(v, rhs)
    assert err[64] / err[32] < 1e-2
    assert err[128] < 1e-14 or err[128] / err[64] < 1e-2


def test_nested_doubling_matches_direct_grid():
    par = UnivariateParams(T5)
    nested = integrate(par, B, GridOptions(initial_points=16, max_points=128, rel_tol=1e-15))
    direct = integrate(par, B, GridOptions(initial_points=128, max_points=128))
    assert nested.points_per_dim == 128
    assert relerr(nested.value, direct.value) < 1e-14


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(WORKERS_ENV, "0")
    assert worker_count() >= 1
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ConfigError):
        worker_count()


def test_bit_identical_across_worker_counts(monkeypatch):
    par = CnParams(2, (0.6, 0.65, 0.7, 0.55, 0.62, 0.68, 0.66))
    # 512^2 samples span several summation chunks
    opt = GridOptions(initial_points=512, max_points=512)
    values = []
    for w in ("1", "2", "8"):
        monkeypatch.setenv(WORKERS_ENV, w)
        values.append(integrate(par, B, opt).value)
    assert values[0] == values[1] == values[2]


# ---------------------------------------------------------------------------
# line contour


def _cn_line():
    g = [W_LINE.omega2 * x for x in (0.3, 0.25, 0.2 + 0.1j, 0.22, 0.27)]
    return QReducedParams("Cn", g, (), W_LINE)


def test_default_halfwidth_decay():
    X = default_halfwidth(W_LINE, 1e-9)
    rate = 2 * math.pi * (1 + (W_LINE.omega2 / W_LINE.omega1).real)
    assert math.exp(-rate * X) == pytest.approx(1e-10)


def test_line_boundary_guard():
    res = qreduced_integrate(_cn_line(), GridOptions())
    assert res.boundary_ratio < 1e-10
    assert res.converged


def test_line_window_widened_when_too_narrow():
    res = qreduced_integrate(_cn_line(), GridOptions(line_halfwidth=1.0))
    assert res.halfwidth == pytest.approx(1.0 * 1.25**4)
    assert res.boundary_ratio < 1e-10
    assert res.converged
    # six widenings from 0.5 stop short of the decay window
    res = qreduced_integrate(_cn_line(), GridOptions(line_halfwidth=0.5))
    assert res.halfwidth == pytest.approx(0.5 * 1.25**6)
    assert res.boundary_ratio > 1e-10
    assert not res.converged


def test_line_guard_failure_marks_unconverged():
    par = _cn_line()
    f = lambda X: log_rho_qreduced(X, par)  # noqa: E731
    res = line_integrate(f, 1, W_LINE, GridOptions(line_halfwidth=0.3), max_widenings=0)
    assert res.boundary_ratio > 1e-10
    assert not res.converged


def test_cn_line_integrand_even():
    par = _cn_line()
    res = qreduced_integrate(par, GridOptions())
    X, N = res.halfwidth, res.points_per_dim
    # trapezoid over [0, X] on the same grid, doubled
    x = np.linspace(0, X, N // 2 + 1)
    u = 1j * W_LINE.omega2 * x
    vals = np.exp(log_rho_qreduced(Points([u], additive=True), par))
    w = np.full(x.size, 1.0)
    w[0] = w[-1] = 0.5
    half = 1j * (x[1] - x[0]) * complex(np.sum(w * vals))
    assert relerr(2 * half, res.value) < 1e-10
