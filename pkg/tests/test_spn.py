from fractions import Fraction

import numpy as np
import pytest

from kakangles import spn
from kakangles.kak import numeric_density
from kakangles.linalg import SYMPLECTIC, check
from oracles import expm_product


def test_zero_params_identity():
    for N in (1, 2, 3):
        assert np.allclose(spn.build_chart(N).evaluate(np.zeros(spn.build_chart(N).dim)), np.eye(2 * N), atol=1e-15)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_outputs_symplectic(rng, N):
    chart = spn.build_chart(N)
    g = chart.evaluate(chart.random_interior(rng, 1000))
    assert max(check(SYMPLECTIC, x)[1] for x in g) <= 1e-12


def test_sp1_against_expm_product(rng):
    chart = spn.build_chart(1)
    for p in chart.random_interior(rng, 10):
        tx, y, x = p
        e1 = spn.a_basis(1)[0]
        D = np.diag([1j, -1j])
        ref = expm_product((tx, D), (y, e1), (x, D))
        assert np.abs(chart.evaluate(p) - ref).max() <= 1e-13


def test_jacobian_values():
    assert spn.jacobian(1, [np.pi / 4]) == pytest.approx(1.0, abs=1e-15)
    assert spn.jacobian(2, [0.4, 0.4]) == 0.0


def test_jacobian_sp2_against_fiber_density():
    """The exp(a)-fibre density of the full chart is proportional to J."""
    chart = spn.build_chart(2)
    rng = np.random.default_rng(5)
    base = chart.random_interior(rng, 1, margin=0.1)[0]
    pts = []
    for y in ([0.3, 0.9], [0.2, 0.5], [0.6, 1.1], [0.1, 1.4]):
        q = base.copy()
        q[chart.region_slice] = y
        pts.append(q)
    pts = np.array(pts)
    ratio = numeric_density(chart, pts) / chart.weight(pts)
    assert np.ptp(ratio) / ratio.mean() <= 1e-5


def test_region():
    reg = spn.region(1)
    assert reg.contains(np.array([np.pi / 2])) and not reg.contains(np.array([np.pi / 2 + 1e-6]))
    assert not spn.region(2).contains(np.array([0.2, 0.1]))


def test_region_volume_mc():
    rng = np.random.default_rng(1)
    u = rng.uniform(0, np.pi / 2, (400_000, 3))
    frac = spn.region(3).contains(u).mean() * (np.pi / 2) ** 3
    assert frac == pytest.approx((np.pi / 2) ** 3 / 6, rel=1e-2)
    assert spn.region(3).volume() == pytest.approx((np.pi / 2) ** 3 / 6, rel=1e-3)


def test_m_group():
    M1 = spn.m_group(1)
    assert len(M1) == 2 and any(np.array_equal(m, -np.eye(2)) for m in M1)
    M3 = spn.m_group(3)
    assert len(M3) == 8
    keys = {m.tobytes() for m in M3}
    assert all((a @ b).tobytes() in keys for a in M3 for b in M3)
    for m in M3:
        for e in spn.a_basis(3):
            assert np.array_equal(m @ e @ m.T, e)


def test_positive_roots_sp2():
    got = {tuple(r.coords) for r in spn.cartan(2).positive_roots}
    F = Fraction
    assert got == {(F(2), F(0)), (F(0), F(2)), (F(1), F(1)), (F(-1), F(1))}


def test_structure_residuals():
    for N in (1, 2, 3):
        cd = spn.cartan(N)
        assert max(cd.residuals().values()) <= 1e-12
        assert cd.group.closure_residual() <= 1e-10
