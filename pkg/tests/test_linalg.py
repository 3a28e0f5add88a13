import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from kakangles import g2, spn
from kakangles.linalg import (ORTHOGONAL, SPECIAL_UNITARY, SYMPLECTIC, UNITARY, DimensionError, MatrixPredicate,
                              OneParameterSubgroup, bracket, check, expm, residual, trace_form, Kind)
from oracles import loop_bracket, random_skew_hermitian, taylor_expm


def test_expm_zero_is_identity():
    assert np.array_equal(expm(np.zeros((7, 7))), np.eye(7))


def test_expm_pi_lambda3_is_diagonal_sign():
    E = expm(np.pi * g2.lam(3))
    assert np.allclose(E, np.diag([1, 1, 1, -1, -1, -1, -1]), atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_expm_matches_taylor_and_scipy(rng, n):
    for _ in range(10):
        X = random_skew_hermitian(rng, n)
        U = expm(X)
        assert np.abs(U.conj().T @ U - np.eye(n)).max() <= 1e-12
        assert np.abs(U - taylor_expm(X)).max() <= 1e-12
        assert np.abs(U - scipy_expm(X)).max() <= 1e-12


def test_expm_large_norm_uses_squaring(rng):
    X = random_skew_hermitian(rng, 4, norm=40.0)
    assert np.abs(expm(X) - scipy_expm(X)).max() <= 1e-10


def test_expm_rejects_non_square():
    with pytest.raises(DimensionError):
        expm(np.zeros((2, 3)))


def test_one_parameter_subgroup_batched(rng):
    X = random_skew_hermitian(rng, 3, norm=2.0)
    E = OneParameterSubgroup(X)
    t = rng.uniform(-3, 3, 11)
    out = E(t)
    assert out.shape == (11, 3, 3)
    for ti, Ui in zip(t, out):
        assert np.abs(Ui - scipy_expm(ti * X)).max() <= 1e-12


def test_one_parameter_subgroup_rejects_hermitian():
    with pytest.raises(ValueError):
        OneParameterSubgroup(np.eye(2))


def test_bracket_antisymmetric_and_against_loops():
    L1, L2 = g2.lam(1), g2.lam(2)
    assert np.array_equal(bracket(L1, L1), np.zeros((7, 7)))
    assert np.array_equal(bracket(g2.lam(5), g2.lam(11)), np.zeros((7, 7)))
    assert np.allclose(bracket(L1, L2), loop_bracket(L1, L2), atol=0)


def test_bracket_shape_mismatch():
    with pytest.raises(DimensionError):
        bracket(np.zeros((2, 2)), np.zeros((3, 3)))


def test_trace_form_positive_on_skew(rng):
    X = random_skew_hermitian(rng, 4)
    assert trace_form(X, X) > 0


def test_membership_examples(rng):
    assert check(SYMPLECTIC, np.eye(4)) == (True, 0.0)
    ok, r = check(SPECIAL_UNITARY, np.diag([-1.0, 1.0]))
    assert not ok and r == pytest.approx(2.0)
    chart = spn.build_chart(1)
    for g in chart.evaluate(chart.random_interior(rng, 50)):
        assert check(SYMPLECTIC, g)[1] <= 1e-12


def test_membership_rejects_bad_shapes():
    assert residual(UNITARY, np.zeros((2, 3))) == float("inf")
    assert residual(UNITARY, np.array([[np.nan]])) == float("inf")
    assert residual(SYMPLECTIC, np.eye(3)) == float("inf")
    assert residual(ORTHOGONAL, 1j * np.eye(2)) >= 1.0


def test_predicate_tolerance_range():
    with pytest.raises(ValueError):
        MatrixPredicate(Kind.UNITARY, tolerance=0.1)
