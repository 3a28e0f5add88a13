import numpy as np
import pytest

from kakangles import sun
from kakangles.kak import numeric_density
from kakangles.linalg import SPECIAL_UNITARY, UNITARY, check
from oracles import expm_product


def test_su1_is_constant():
    assert np.array_equal(sun.su_evaluate(1, np.zeros(0), np.zeros(0), np.zeros(0)), np.ones((1, 1)))


def test_su2_zero_params_identity():
    assert np.allclose(sun.build_su(2).evaluate(np.zeros(3)), np.eye(2))


def test_su2_against_expm_product():
    lam = sun.su_basis(2)
    g = sun.build_su(2).evaluate(np.array([0.2, 0.3, 0.4]))
    ref = expm_product((0.2, lam[3]), (0.3, lam[2]), (0.4, lam[3]))
    assert np.abs(g - ref).max() <= 1e-13


def test_u1_phase():
    g = sun.build_u(1).evaluate(np.array([np.pi]))
    assert np.allclose(g, [[-1]], atol=1e-15)


@pytest.mark.parametrize("N", [2, 3])
def test_u_det_and_membership(rng, N):
    chart = sun.build_u(N)
    p = chart.random_interior(rng, 100)
    g = chart.evaluate(p)
    assert np.allclose(np.linalg.det(g), np.exp(1j * p[:, -1]), atol=1e-12)
    assert max(check(UNITARY, x)[1] for x in g) <= 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_su_membership(rng, N):
    chart = sun.build_su(N)
    assert max(check(SPECIAL_UNITARY, x)[1] for x in chart.evaluate(chart.random_interior(rng, 50))) <= 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
def test_quotient_volume_ratio(N):
    full, red = sun.build_u(N), sun.build_u_mod_z2(N)
    assert red.box_volume() / full.box_volume() == pytest.approx(2.0 ** -N, rel=1e-12)


def test_quotient_coset_shift(rng):
    # right multiplication by a sign matrix only moves (omega_1, xi)
    red, full = sun.build_u_mod_z2(2), sun.build_u(2)
    for p in red.random_interior(rng, 10):
        g = red.evaluate(p)
        for m in (np.diag([-1.0, 1.0]), np.diag([1.0, -1.0]), -np.eye(2)):
            target = g @ m
            found = False
            for dw in (0, np.pi / 2, np.pi, 3 * np.pi / 2):
                for dx in (0, np.pi):
                    q = p.copy()
                    q[2] = (q[2] + dw) % (2 * np.pi)
                    q[3] = (q[3] + dx) % (2 * np.pi)
                    if np.abs(full.evaluate(q) - target).max() < 1e-12:
                        found = True
            assert found


def test_su2_density_is_sincos(rng):
    chart = sun.build_su(2)
    p = chart.random_interior(rng, 20, margin=0.05)
    ratio = numeric_density(chart, p) / (np.cos(p[:, 1]) * np.sin(p[:, 1]))
    assert np.ptp(ratio) / ratio.mean() <= 1e-6


def test_su3_density_depends_on_psi_only(rng):
    chart = sun.build_su(3)
    p = chart.random_interior(rng, 5, margin=0.05)
    q = chart.random_interior(rng, 5, margin=0.05)
    q[:, 3:6] = p[:, 3:6]
    w = sun.su_density(3)
    assert np.allclose(w(p), w(q), rtol=1e-6)


def test_lambda_index_bounds():
    with pytest.raises(ValueError):
        sun.lambda_matrix(2, 4)
