from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kakangles.admissible import (CONSISTENT, HYPOTHESIS_NOT_MET, POTENTIAL_COUNTEREXAMPLE, AdmissibilityError,
                                  AdmissibleFunction as A, DomainError, FormatError, SizeGuardError, dumps,
                                  from_json_dict, loads, moment, moment_scan, power_expand, random_admissible,
                                  to_json_dict, torus_factor, zero_in_hull)
from kakangles.integrate import CubeTorusDomain, QuadratureSpec, integrate_cube_torus
from kakangles.oracles import caratheodory_zero_in_hull, random_rational_points
from oracles import fourier_integral, lp_zero_in_hull

seeds = st.integers(0, 2 ** 32 - 1)


def rand_f(seed, N=4, k=2, l=2, n_terms=3):
    return random_admissible(np.random.default_rng(seed), N, k, l, n_terms=n_terms)


# -- construction and evaluation -----------------------------------------------------------


def test_evaluate_examples():
    z = A.monomial(1, 0, 1, [1])
    assert z.evaluate(np.zeros(0), np.array([np.pi / 2])) == pytest.approx(1j)
    xs = A.monomial(1, 1, 0, xpow=[1], spow=[1])
    assert xs.evaluate(np.array([0.5]), np.zeros(0)) == pytest.approx(0.5 * np.sqrt(3) / 2)


def test_half_exponent_branch():
    h = A.monomial(2, 0, 1, ["1/2"])
    eps = 1e-9
    assert h.evaluate(np.zeros(0), np.array([2 * np.pi - eps])) == pytest.approx(-1, abs=1e-8)
    assert h.evaluate(np.zeros(0), np.array([eps])) == pytest.approx(1, abs=1e-8)


def test_evaluate_domain_checks():
    f = A.monomial(1, 1, 1, [1])
    with pytest.raises(DomainError):
        f.evaluate(np.array([1.5]), np.array([0.0]))
    with pytest.raises(DomainError):
        f.evaluate(np.array([0.5]), np.array([2 * np.pi]))
    with pytest.raises(DomainError):
        f.evaluate(np.array([0.5, 0.1]), np.array([0.0]))


def test_admissibility_enforced():
    with pytest.raises(AdmissibilityError):
        A.monomial(2, 0, 1, ["1/3"])
    with pytest.raises(TypeError):
        A.monomial(2, 0, 1, [0.5])
    assert A.monomial(3, 0, 1, ["2/3"]).is_admissible()


def test_s_squared_reduces():
    f = A.monomial(1, 1, 0, spow=[2], s_scale=[F(1, 2)])
    assert f == A.constant(1, 1, 0, s_scale=[F(1, 2)]) + A.monomial(1, 1, 0, xpow=[2], coeff=-0.5, s_scale=[F(1, 2)])


def test_cancellation_prunes():
    f = A.monomial(1, 0, 1, [1]) + A.monomial(1, 0, 1, [1], coeff=-1.0)
    assert f.n_terms == 0 and f.spectrum() == frozenset()


# -- power expansion -------------------------------------------------------------------


def test_power_examples():
    z = A.monomial(1, 0, 1, [1])
    zi = A.monomial(1, 0, 1, [-1])
    assert power_expand(z + zi, 2) == A.monomial(1, 0, 1, [2]) + A.constant(1, 0, 1, 2.0) + A.monomial(1, 0, 1, [-2])
    xh = A.monomial(2, 1, 1, ["1/2"], xpow=[1])
    assert power_expand(xh, 3) == A.monomial(2, 1, 1, ["3/2"], xpow=[3])


def test_power_expand_against_pointwise():
    rng = np.random.default_rng(3)
    f = random_admissible(rng, 4, 3, 2, n_terms=3)
    g = power_expand(f, 4)
    x = rng.random((100, 3))
    th = rng.uniform(0, 2 * np.pi, (100, 2))
    ref = f.evaluate(x, th) ** 4
    assert np.abs(g.evaluate(x, th) - ref).max() <= 1e-10 * np.abs(ref).max()


def test_power_grows_denominator_bound():
    f = A.monomial(3, 0, 1, ["1/2"]) * A.monomial(3, 0, 1, ["1/3"])
    assert f.max_denominator() == 6 and f.N == 6


def test_size_guard():
    f = rand_f(1, n_terms=4)
    with pytest.raises(SizeGuardError):
        power_expand(f, 6, size_guard=50)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_canonicalisation_idempotent(seed):
    f = rand_f(seed)
    assert f.canonical() == f
    assert hash(f.canonical()) == hash(f)
    assert A(f.N, f.k, f.l, f.terms, f.s_scale) == f


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_product_spectrum_in_sumset(s1, s2):
    f, g = rand_f(s1), rand_f(s2)
    sumset = {tuple(a + b for a, b in zip(m, n)) for m in f.spectrum() for n in g.spectrum()}
    assert (f * g).spectrum() <= sumset


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_json_roundtrip(seed):
    f = rand_f(seed)
    assert loads(dumps(f)) == f
    assert from_json_dict(to_json_dict(f)) == f


# -- hull ------------------------------------------------------------------------------


def test_hull_examples():
    assert zero_in_hull([(1, 0)]) is False
    assert zero_in_hull([(1, 0), (-1, 0)]) is True
    with pytest.raises(DomainError):
        zero_in_hull([])


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_hull_matches_caratheodory(seed):
    pts = random_rational_points(np.random.default_rng(seed))
    assert zero_in_hull(pts) == caratheodory_zero_in_hull(pts)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 7))
def test_hull_invariances(seed, k):
    rng = np.random.default_rng(seed)
    pts = random_rational_points(rng)
    base = zero_in_hull(pts)
    perm = [pts[i] for i in rng.permutation(len(pts))]
    assert zero_in_hull(perm) == base
    assert zero_in_hull([tuple(F(k) * c for c in p) for p in pts]) == base
    assert zero_in_hull(pts + [pts[0]]) == base


def test_hull_matches_lp_on_integer_points():
    rng = np.random.default_rng(9)
    for _ in range(100):
        pts = [tuple(int(v) for v in rng.integers(-5, 6, 3)) for _ in range(int(rng.integers(2, 7)))]
        assert zero_in_hull(pts) == lp_zero_in_hull(pts)


# -- moments -----------------------------------------------------------------------------


@pytest.mark.parametrize("q", [F(0), F(1), F(-3), F(1, 2), F(-3, 4), F(5, 3)])
def test_torus_factor(q):
    assert torus_factor((q,)) == pytest.approx(fourier_integral(q), abs=1e-14)


def test_curated_scans():
    one_circle = CubeTorusDomain.free(0, 1)
    z = A.monomial(1, 0, 1, [1])
    rep = moment_scan(z, one_circle, 4)
    assert rep.status == CONSISTENT and all(m.value == 0 for m in rep.moments)
    assert moment_scan(A.constant(1, 0, 1), one_circle, 3).status == HYPOTHESIS_NOT_MET
    pair = z + A.monomial(1, 0, 1, [-1])
    m2 = moment(pair, 2, one_circle)
    assert m2.value == pytest.approx(2 * 2 * np.pi, rel=1e-14)
    rep = moment_scan(pair, one_circle, 4)
    assert rep.status == HYPOTHESIS_NOT_MET and rep.zero_in_hull


def test_signed_weight_flags_counterexample():
    from kakangles.integrate import CubeBlock, endpoint_map
    dom = CubeTorusDomain(1, 1, (CubeBlock((0,), endpoint_map, lambda x: 2 * x[..., 0] - 1),))
    rep = moment_scan(A.constant(1, 1, 1), dom, 3)
    assert rep.status == POTENTIAL_COUNTEREXAMPLE


def test_expanded_moment_matches_pointwise():
    rng = np.random.default_rng(2)
    f = random_admissible(rng, 2, 2, 1, n_terms=2)
    dom = CubeTorusDomain.free(2, 1)
    m = moment(f, 2, dom)
    r = integrate_cube_torus(lambda x, th: f.evaluate(x, th) ** 2, dom, QuadratureSpec.gauss_legendre(40))
    assert abs(m.value - r.value) <= 1e-8 * m.scale


def test_moment_shape_mismatch():
    with pytest.raises(DomainError):
        moment(A.constant(1, 1, 1), 1, CubeTorusDomain.free(2, 1))


# -- documents ---------------------------------------------------------------------------


def test_format_errors_carry_position():
    with pytest.raises(FormatError) as e:
        loads('{"N": 1,\n "k": }')
    assert e.value.line == 2
    with pytest.raises(FormatError) as e:
        loads('{"N": 1, "k": 0, "l": 1, "terms": [{"exponents": ["1/x"], "poly": []}]}')
    assert e.value.path == "terms[0].exponents[0]"
    with pytest.raises(FormatError):
        loads('{"N": 1, "k": 0, "l": 1, "terms": [{"exponents": ["1/2"], "poly": []}]}')
    with pytest.raises(FormatError):
        loads('{"N": true, "k": 0, "l": 1, "terms": []}')
