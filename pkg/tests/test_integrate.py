import numpy as np
import pytest

from kakangles import g2, spn
from kakangles.integrate import (CubeBlock, CubeTorusDomain, IntegralResult, PoisonedResultError, QuadratureSpec,
                                 chain_map, chart_mass, gl_rule, haar_sample_check, haar_sample_sp,
                                 integrate_chart, integrate_cube_torus, integrate_params, unit_weight)
from kakangles.oracles import schur_integrand, schur_targets

GL40 = QuadratureSpec.gauss_legendre(40)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec("simpson")
    with pytest.raises(ValueError):
        QuadratureSpec.monte_carlo(0)
    with pytest.raises(ValueError):
        QuadratureSpec.gauss_legendre(0)


def test_gl_rule_exact_for_polynomials():
    x, w = gl_rule(5, 0.0, 2.0)
    assert np.sum(w * x ** 9) == pytest.approx(2.0 ** 10 / 10, rel=1e-14)


def test_constant_normalises_to_one():
    chart = spn.build_chart(1)
    r = integrate_params(chart, lambda p: np.ones(len(p)), QuadratureSpec.gauss_legendre(10))
    assert r.value == pytest.approx(1.0, abs=1e-15)
    mc = integrate_params(chart, lambda p: np.ones(len(p)), QuadratureSpec.monte_carlo(1000, seed=3))
    assert mc.value == pytest.approx(1.0, abs=1e-14) and mc.error <= 1e-12


def test_sp1_schur_quadrature():
    r = integrate_chart(spn.build_chart(1), lambda g: np.abs(g[:, 0, 0]) ** 2, GL40)
    assert abs(r.value - 0.5) <= 1e-6


def test_g2_entry_mean_mc():
    r = integrate_chart(g2.build_chart(), lambda g: g[:, 0, 0], QuadratureSpec.monte_carlo(100_000, seed=11))
    assert r.within(0.0)


def test_mc_deterministic_and_thread_independent():
    chart = spn.build_chart(2)
    spec = QuadratureSpec.monte_carlo(30_000, seed=4, chunk=7_000)
    a = integrate_chart(chart, schur_integrand, spec)
    b = integrate_chart(chart, schur_integrand, spec, threads=3)
    assert np.array_equal(a.value, b.value) and np.array_equal(a.error, b.error)
    c = integrate_chart(chart, schur_integrand, QuadratureSpec.monte_carlo(30_000, seed=5, chunk=7_000))
    assert not np.array_equal(a.value, c.value)


def test_poisoned_integrand():
    chart = spn.build_chart(1)
    with pytest.raises(PoisonedResultError):
        integrate_params(chart, lambda p: np.where(p[:, 0] > 1, np.nan, 1.0), QuadratureSpec.gauss_legendre(6))


def test_chart_mass_cached():
    chart = spn.build_chart(1)
    spec = QuadratureSpec.gauss_legendre(12)
    assert chart_mass(chart, spec) is chart_mass(chart, spec)
    # tilde U(1)/Z2 (pi) * int sin 2y (1) * U(1) (2 pi)
    assert chart_mass(chart, spec).value == pytest.approx(2 * np.pi ** 2, rel=1e-12)


def test_torus_half_exponent():
    dom = CubeTorusDomain.free(0, 1)
    r = integrate_cube_torus(lambda x, th: np.exp(0.5j * th[:, 0]), dom, QuadratureSpec.gauss_legendre(30))
    assert abs(r.value - 4j) <= 1e-10


def test_cube_sqrt_integral():
    dom = CubeTorusDomain.free(1, 0)
    r = integrate_cube_torus(lambda x, th: x[:, 0] * np.sqrt(1 - x[:, 0] ** 2), dom, QuadratureSpec.gauss_legendre(40))
    assert abs(r.value - 1 / 3) <= 1e-10


def test_simplex_volume():
    dom = CubeTorusDomain(2, 0, (CubeBlock((0, 1), chain_map, unit_weight),))
    r = integrate_cube_torus(lambda x, th: np.ones(len(x)), dom, QuadratureSpec.gauss_legendre(10))
    assert abs(r.value - 0.5) <= 1e-10


def test_blocks_must_partition():
    with pytest.raises(ValueError):
        CubeTorusDomain(2, 0, (CubeBlock((0,), chain_map, unit_weight),))


def test_within():
    r = IntegralResult(1.0, 0.1, 10)
    assert r.within(1.25) and not r.within(1.31)


@pytest.mark.parametrize("N", [1, 2])
def test_haar_sampler(N):
    A = haar_sample_sp(N, 1_000_000, seed=N)
    assert haar_sample_check(A[:2000]) <= 1e-10
    vals = schur_integrand(A)
    mean = vals.mean(axis=0)
    se = np.sqrt(vals.real.var(axis=0) + vals.imag.var(axis=0)) / np.sqrt(len(A))
    target = np.array(list(schur_targets(2 * N).values()))
    assert np.all(np.abs(mean - target) <= 3 * se + 1e-15)


def test_haar_sampler_rejects_n3():
    with pytest.raises(ValueError):
        haar_sample_sp(3, 10)
