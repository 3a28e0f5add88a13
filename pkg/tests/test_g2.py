import numpy as np
import pytest

from kakangles import g2
from kakangles.kak import ad_matrix, numeric_density
from kakangles.linalg import ORTHOGONAL, check


def test_generators_independent_and_closed():
    G = g2.g2_group()
    assert G.rank() == 14
    assert G.closure_residual() <= 1e-10


def test_ad_matrices_match_printed():
    A5 = g2.ad_matrix_printed_basis(g2.lam(5))
    A11 = g2.ad_matrix_printed_basis(g2.lam(11))
    assert A5[0, 4] == 1
    assert np.array_equal(A5, g2.AD5_PRINTED)
    assert np.array_equal(A11, g2.AD11_PRINTED)
    assert np.array_equal(A5 @ A11, A11 @ A5)


def test_extracted_roots():
    roots = {tuple(int(c) for c in r.coords) for r in g2.extract_roots()}
    assert (0, 2) in roots and (1, -3) in roots
    assert roots == {(-a, -b) for a, b in roots}
    assert {tuple(int(c) for c in r.coords) for r in g2.cartan().positive_roots} == {
        (0, 2), (1, -3), (1, -1), (1, 1), (1, 3), (2, 0)}


def test_corrected_root_spaces():
    for lab, ab, coeffs in g2.ROOT_SPACES:
        assert g2.root_space_residual(coeffs, ab) <= 1e-10, lab


def test_printed_root_spaces_known_defects():
    """The verbatim table: four vectors satisfy their eigen-equation, eight do not."""
    res = {lab: g2.root_space_residual(c, ab) for lab, ab, c in g2.ROOT_SPACES_PRINTED}
    good = {k for k, v in res.items() if v <= 1e-10}
    assert good == {"alpha+beta", "-(alpha+beta)", "3alpha+beta", "-(3alpha+beta)"}


def test_k_chart_identity_and_orthogonality(rng):
    assert np.allclose(g2.k_evaluate(np.zeros(6)), np.eye(7))
    kc = g2.build_k_chart()
    for g in kc.evaluate(kc.random_interior(rng, 50)):
        assert check(ORTHOGONAL, g)[1] <= 1e-12
        assert g2.k_defect(g) <= 1e-10


def test_k_triple_blocks_commute(rng):
    p = rng.uniform(0, 1, 6)
    swapped = g2.k_evaluate(np.concatenate([[0, 0, 0], p[3:]])) @ g2.k_evaluate(np.concatenate([p[:3], [0, 0, 0]]))
    assert np.abs(g2.k_evaluate(p) - swapped).max() <= 1e-13


def test_sigma_eta_reparametrisations(rng):
    kc = g2.build_k_mod_m_chart()
    for p in kc.random_interior(rng, 10):
        g = g2.k_evaluate(p)
        assert np.abs(g2.k_evaluate(g2.sigma_reparam(p)) - g @ g2.SIGMA).max() <= 1e-12
        assert np.abs(g2.k_evaluate(g2.eta_reparam(p)) - g @ g2.ETA).max() <= 1e-12


def test_k_mod_m_volume():
    assert g2.build_k_mod_m_chart().box_volume() / g2.build_k_chart().box_volume() == pytest.approx(0.25)


def test_chart_outputs_in_g2(rng):
    chart = g2.build_chart()
    assert np.allclose(chart.evaluate(np.zeros(14)), np.eye(7))
    for g in chart.evaluate(chart.random_interior(rng, 100)):
        assert check(ORTHOGONAL, g)[1] <= 1e-12
        assert abs(np.linalg.det(g) - 1) <= 1e-12
        assert g2.subspace_residual(g) <= 1e-10


def test_jacobian_boundary_and_closed_form(rng):
    assert abs(g2.jacobian(np.array([np.pi / 4, np.pi / 12]))) <= 1e-16
    y = g2.region().from_cube(rng.random((1000, 2)))[0]
    assert np.all(g2.jacobian(y) >= 0)


def test_jacobian_matches_density(rng):
    chart = g2.build_chart()
    p = chart.random_interior(rng, 30, margin=0.05)
    r = numeric_density(chart, p) / chart.weight(p)
    assert np.ptp(r) / r.mean() <= 1e-5


def test_m_group_centralizes_a():
    for m in g2.M_GROUP:
        for a in (g2.lam(5), g2.lam(11)):
            assert np.array_equal(m @ a @ m.T, a)
