import json
from fractions import Fraction as F

import numpy as np
import pytest

from kakangles import g2, spn
from kakangles.admissible import FormatError
from kakangles.integrate import QuadratureSpec, gl_rule
from kakangles.transform import (FiniteTypeG2, FiniteTypeSpN, G2Term, SpNTerm, SUFactor, finite_type_to_dict,
                                 g2_layout, g2_weight_pullback, j_tilde_g2_xi, loads_finite_type, lower,
                                 matching_radical_branch, radical_branches, random_g2, random_spn, spn_layout,
                                 spn_weight_pullback, triple_angle_s, verify_transform)


def test_triple_angle_values():
    assert triple_angle_s(0.0) == 0.0
    assert triple_angle_s(1.0) == pytest.approx(0.5, abs=1e-15)
    xi = np.linspace(0, 1, 1000)
    s = triple_angle_s(xi)
    assert np.abs(4 * s ** 3 - 3 * s + xi).max() <= 1e-14


def test_radical_branch_diagnostic():
    assert radical_branches(0.0)[0] == pytest.approx(np.sqrt(3) / 2)
    assert all(matching_radical_branch(x) == 2 for x in (0.1, 0.5, 0.9))


def test_xi_substitution():
    y, wy = gl_rule(30, 0, np.pi / 2)
    x, wx = gl_rule(30)
    assert np.sum(wy * np.sin(2 * y)) == pytest.approx(1.0, abs=1e-14)
    assert np.sum(wx * 2 * x) == pytest.approx(1.0, abs=1e-14)


def test_quarter_range_substitution():
    t, w = gl_rule(30, 0, np.pi / 4)
    x, wx = gl_rule(30)
    assert np.sum(w * np.cos(t)) == pytest.approx(1 / np.sqrt(2), abs=1e-14)
    assert np.sum(wx) / np.sqrt(2) == pytest.approx(1 / np.sqrt(2), abs=1e-14)


def test_theoretical_constants():
    assert spn_layout(1).theoretical_constant() == pytest.approx(1 / 2)
    assert spn_layout(2).theoretical_constant() == pytest.approx(1 / 16)
    assert g2_layout().theoretical_constant() == pytest.approx(1 / 256)


def test_sp1_degenerate_term():
    z = SUFactor.zero(1)
    f = FiniteTypeSpN(1, (SpNTerm(1.0, z, (1,), (0,), z),))
    low = lower(f)
    assert low.domain.k == 1 and low.domain.l == 2
    assert dict(low.function.terms) == {(F(0), F(0)): {((1,), (0,)): 1 + 0j}}
    xi = np.linspace(0.1, 0.9, 5)[:, None]
    assert np.allclose(low.domain.blocks[0].weight(xi), 2 * xi[:, 0])


def test_g2_exponent_denominators():
    f = FiniteTypeG2((G2Term(1.0, (1,) * 8, (0,) * 6, (0,) * 6),))
    low = lower(f)
    (m,) = low.function.spectrum()
    assert m == (F(1, 2), F(1, 4), F(1, 2), F(1), F(1, 2), F(1, 2), F(1, 2), F(1))
    assert low.function.is_admissible(4)


def test_random_spn_full_circles_vanish():
    rng = np.random.default_rng(0)
    f = random_spn(rng, 2, n_terms=3)
    lay = f.layout()
    full = [lay.torus[i] == 1 for i in lay.angle_idx]
    for m in lower(f).function.spectrum():
        assert all(e == 0 for e, fl in zip(m, full) if fl)


@pytest.mark.parametrize("P", [1, 2, 3])
def test_sp1_transform_quadrature(P):
    rng = np.random.default_rng(P)
    for _ in range(2):
        f = random_spn(rng, 1, n_terms=2)
        c = verify_transform(f, P, QuadratureSpec.gauss_legendre(40))
        assert c.difference <= 1e-6


def test_g2_transform_mc_small():
    f = random_g2(np.random.default_rng(4), 1, lmax=1, paired=True)
    c = verify_transform(f, 1, QuadratureSpec.monte_carlo(50_000, seed=2))
    assert c.difference <= 3 * c.joint_sigma


@pytest.mark.parametrize("N,tol", [(1, 1e-10), (2, 1e-10), (3, 1e-7)])
def test_spn_weight_pullback(N, tol):
    p = spn.build_chart(N).random_interior(np.random.default_rng(N), 200)
    a, b = spn_weight_pullback(N, p)
    assert np.abs(a / b - 1).max() <= tol


def test_g2_weight_pullback():
    y = g2.region().from_cube(np.random.default_rng(1).uniform(0.02, 0.98, (500, 2)))[0]
    a, b = g2_weight_pullback(y)
    assert np.abs(a / b - 1).max() <= 1e-10
    assert np.allclose(j_tilde_g2_xi(np.sin(y)), g2.jacobian(y) / (np.cos(y[:, 0]) * np.cos(y[:, 1])), rtol=1e-12)


def test_finite_type_roundtrip():
    rng = np.random.default_rng(8)
    for f in (random_spn(rng, 2, n_terms=2), random_g2(rng, 2)):
        doc = finite_type_to_dict(f)
        assert loads_finite_type(json.dumps(doc)) == f


def test_finite_type_errors():
    with pytest.raises(FormatError):
        loads_finite_type('{"group": "g2", "terms": [{"c": [1, 0], "k": [1, 2]}]}')
    with pytest.raises(FormatError):
        loads_finite_type('{"group": "e8", "terms": []}')
    with pytest.raises(FormatError):
        loads_finite_type('{"group": "spn", "N": 1, "terms": [{"c": [1, 0], "y": {"cos": [2]}}]}')
    with pytest.raises(FormatError) as e:
        loads_finite_type('{"group": ')
    assert e.value.line == 1
