"""The exceptional group G2 in its 7-dimensional real representation."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chart import EulerChart, Param, RegionSpec
from .kak import (
    CartanData, GroupSpec, RootFunctional, StructureError, ad_matrix, positive_system,
    restricted_roots, split_by_involution,
)
from .linalg import Kind, MatrixPredicate, OneParameterSubgroup

# (row, col, value), 1-based, for lambda_1 ... lambda_14.
_TRIPLES = {
    1: [(4, 7, -1), (5, 6, -1), (6, 5, 1), (7, 4, 1)],
    2: [(4, 6, 1), (5, 7, -1), (6, 4, -1), (7, 5, 1)],
    3: [(4, 5, -1), (5, 4, 1), (6, 7, -1), (7, 6, 1)],
    4: [(2, 7, 1), (3, 6, 1), (6, 3, -1), (7, 2, -1)],
    5: [(2, 6, -1), (3, 7, 1), (6, 2, 1), (7, 3, -1)],
    6: [(2, 5, 1), (3, 4, -1), (4, 3, 1), (5, 2, -1)],
    7: [(2, 4, -1), (3, 5, -1), (4, 2, 1), (5, 3, 1)],
    8: [(2, 3, -2), (3, 2, 2), (4, 5, 1), (5, 4, -1), (6, 7, -1), (7, 6, 1)],
    9: [(1, 2, -2), (2, 1, 2), (4, 7, 1), (5, 6, -1), (6, 5, 1), (7, 4, -1)],
    10: [(1, 3, -2), (3, 1, 2), (4, 6, -1), (5, 7, -1), (6, 4, 1), (7, 5, 1)],
    11: [(1, 4, -2), (2, 7, -1), (3, 6, 1), (4, 1, 2), (6, 3, -1), (7, 2, 1)],
    12: [(1, 5, -2), (2, 6, 1), (3, 7, 1), (5, 1, 2), (6, 2, -1), (7, 3, -1)],
    13: [(1, 6, -2), (2, 5, -1), (3, 4, -1), (4, 3, 1), (5, 2, 1), (6, 1, 2)],
    14: [(1, 7, -2), (2, 4, 1), (3, 5, -1), (4, 2, -1), (5, 3, 1), (7, 1, 2)],
}


def _build(j: int) -> np.ndarray:
    L = np.zeros((7, 7))
    for r, c, v in _TRIPLES[j]:
        L[r - 1, c - 1] = v
    return L


LAMBDAS: tuple[np.ndarray, ...] = tuple(_build(j) for j in range(1, 15))


def lam(j: int) -> np.ndarray:
    """``lambda_j`` with 1-based ``j``."""
    return LAMBDAS[j - 1]


SIGMA = np.diag([1.0, -1, -1, 1, 1, -1, -1])
ETA = np.array([
    [-1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, -1],
    [0, 0, 0, 0, 0, -1, 0],
], dtype=float)
THETA = np.diag([1.0, 1, 1, -1, -1, -1, -1])

K_INDICES = (1, 2, 3, 8, 9, 10)
AD_ORDER = (1, 2, 3, 4, 6, 7, 8, 9, 10, 12, 13, 14)

AD5_PRINTED = np.array([
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 3, 0, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0],
], dtype=float)

AD11_PRINTED = np.array([
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -3, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, -3, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -3, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, -2],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0],
    [0, 0, -1, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, -2, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0],
], dtype=float)

ALPHA = (Fraction(0), Fraction(2))
BETA = (Fraction(1), Fraction(-3))


def _comb(a: int, b: int) -> RootFunctional:
    return RootFunctional(tuple(a * x + b * y for x, y in zip(ALPHA, BETA)))


POSITIVE_ROOT_LABELS = {
    "alpha": (1, 0), "beta": (0, 1), "alpha+beta": (1, 1),
    "2alpha+beta": (2, 1), "3alpha+beta": (3, 1), "3alpha+2beta": (3, 2),
}
POSITIVE_ROOTS = tuple(_comb(*ab) for ab in POSITIVE_ROOT_LABELS.values())

# Root-space vectors as printed: (label, (a, b) multiple of (alpha, beta), {j: coeff of lambda_j}).
# The second beta entry is printed with the label of +beta; its lambda-pattern is the -beta candidate.
ROOT_SPACES_PRINTED = (
    ("alpha", (1, 0), {3: 1, 4: -2j, 8: 1}),
    ("-alpha", (-1, 0), {3: 1, 4: 2j, 8: 1}),
    ("beta", (0, 1), {1: 1j, 2: 1j, 6: -1, 7: -1, 9: -1j, 10: -1, 13: -1, 14: 1}),
    ("-beta", (0, -1), {1: 1j, 2: -1j, 6: -1, 7: -1, 9: 1j, 10: -1, 13: -1, 14: 1}),
    ("alpha+beta", (1, 1), {1: 3j, 2: -3j, 6: -3, 7: 3, 9: 1j, 10: -1j, 13: 1, 14: 1}),
    ("-(alpha+beta)", (-1, -1), {1: -3j, 2: 3j, 6: -3, 7: 3, 9: -1j, 10: 1j, 13: 1, 14: 1}),
    ("2alpha+beta", (2, 1), {1: -3j, 2: -3j, 6: 3, 7: 3, 9: -1j, 10: -1j, 12: -1, 14: 1}),
    ("-(2alpha+beta)", (-2, -1), {1: 3j, 2: 3j, 6: 3, 7: 3, 9: 1j, 10: 1j, 12: -1, 14: 1}),
    ("3alpha+beta", (3, 1), {1: -1j, 2: 1j, 6: 1, 7: -1, 9: 1j, 10: -1j, 13: 1, 14: 1}),
    ("-(3alpha+beta)", (-3, -1), {1: 1j, 2: -1j, 6: 1, 7: -1, 9: -1j, 10: 1j, 13: 1, 14: 1}),
    ("3alpha+2beta", (3, 2), {3: -3j, 8: 1j, 12: 2}),
    ("-(3alpha+2beta)", (-3, -2), {3: 3j, 8: -1j, 12: 2}),
)

# Root-space vectors that satisfy ad(H) v = i root(H) v for this generator set.
# Differences from the printed table: the +-alpha and +-(3alpha+2beta) vectors
# trade places, the beta pair uses -i lambda_10, and the +-(2alpha+beta) pair
# carries lambda_13 where the printed one has lambda_12.
ROOT_SPACES = (
    ("alpha", (1, 0), {3: -3j, 8: 1j, 12: 2}),
    ("-alpha", (-1, 0), {3: 3j, 8: -1j, 12: 2}),
    ("beta", (0, 1), {1: 1j, 2: 1j, 6: -1, 7: -1, 9: -1j, 10: -1j, 13: -1, 14: 1}),
    ("-beta", (0, -1), {1: -1j, 2: -1j, 6: -1, 7: -1, 9: 1j, 10: 1j, 13: -1, 14: 1}),
    ("alpha+beta", (1, 1), {1: 3j, 2: -3j, 6: -3, 7: 3, 9: 1j, 10: -1j, 13: 1, 14: 1}),
    ("-(alpha+beta)", (-1, -1), {1: -3j, 2: 3j, 6: -3, 7: 3, 9: -1j, 10: 1j, 13: 1, 14: 1}),
    ("2alpha+beta", (2, 1), {1: -3j, 2: -3j, 6: 3, 7: 3, 9: -1j, 10: -1j, 13: -1, 14: 1}),
    ("-(2alpha+beta)", (-2, -1), {1: 3j, 2: 3j, 6: 3, 7: 3, 9: 1j, 10: 1j, 13: -1, 14: 1}),
    ("3alpha+beta", (3, 1), {1: -1j, 2: 1j, 6: 1, 7: -1, 9: 1j, 10: -1j, 13: 1, 14: 1}),
    ("-(3alpha+beta)", (-3, -1), {1: 1j, 2: -1j, 6: 1, 7: -1, 9: -1j, 10: 1j, 13: 1, 14: 1}),
    ("3alpha+2beta", (3, 2), {3: 1, 4: -2j, 8: 1}),
    ("-(3alpha+2beta)", (-3, -2), {3: 1, 4: 2j, 8: 1}),
)


def root_vector(coeffs: dict) -> np.ndarray:
    return sum(c * lam(j) for j, c in coeffs.items())


def root_space_residual(coeffs: dict, ab: tuple[int, int]) -> float:
    """``max_H |ad(H) v - i root(H) v|`` over ``H in {lambda_5, lambda_11}``."""
    v = root_vector(coeffs)
    root = _comb(*ab) if ab[0] >= 0 and ab[1] >= 0 else -_comb(-ab[0], -ab[1])
    worst = 0.0
    for H, coord in ((lam(5), root.coords[0]), (lam(11), root.coords[1])):
        worst = max(worst, float(np.abs(H @ v - v @ H - 1j * float(coord) * v).max()))
    return worst


def _ortho_defect(g) -> float:
    return float(np.abs(g.T @ g - np.eye(7)).max())


@lru_cache(maxsize=None)
def _lambda_projector():
    B = np.stack([L.ravel() for L in LAMBDAS], axis=1)
    return B, np.linalg.pinv(B)


def subspace_residual(g) -> float:
    """How far ``Ad(g)`` moves g2 out of itself (least-squares residual)."""
    g = np.asarray(g)
    if np.iscomplexobj(g):
        if np.abs(g.imag).max() > 1e-12:
            return float("inf")
        g = g.real
    B, Bp = _lambda_projector()
    moved = np.stack([(g @ L @ g.T).ravel() for L in LAMBDAS], axis=1)
    return float(np.abs(B @ (Bp @ moved) - moved).max())


def g2_defect(g) -> float:
    """Combined SO(7) and Ad-invariance defect."""
    return max(abs(float(np.linalg.det(g)) - 1.0), subspace_residual(g))


G2_MEMBERSHIP = MatrixPredicate(Kind.IN_GROUP, 1e-10, Kind.ORTHOGONAL, g2_defect)


def k_defect(g) -> float:
    """Defect of membership in K: G2 element that is block diagonal (3 + 4)."""
    g = np.asarray(g)
    off = max(float(np.abs(g[:3, 3:]).max()), float(np.abs(g[3:, :3]).max()))
    return max(off, _ortho_defect(g), g2_defect(g))


K_MEMBERSHIP = MatrixPredicate(Kind.IN_GROUP, 1e-10, Kind.ORTHOGONAL, k_defect)


@lru_cache(maxsize=None)
def g2_group() -> GroupSpec:
    return GroupSpec("G2", 7, LAMBDAS, G2_MEMBERSHIP)


@lru_cache(maxsize=None)
def k_group() -> GroupSpec:
    return GroupSpec("K", 7, tuple(lam(j) for j in K_INDICES), K_MEMBERSHIP)


def ad_matrix_printed_basis(X) -> np.ndarray:
    """``ad(X)`` on ``lambda_1..4, 6..10, 12..14`` (column j = coordinates of [X, lambda_j])."""
    g = g2_group()
    full = ad_matrix(g, X, [j - 1 for j in AD_ORDER])
    cols = [g.coordinates(X @ lam(j) - lam(j) @ X)[0] for j in AD_ORDER]
    leak = max(abs(c[4]) + abs(c[10]) for c in cols)
    if leak > 1e-10:
        raise StructureError("ad(X) leaves the complement of the Cartan subalgebra")
    # snap least-squares noise so integer matrices compare exactly
    snapped = np.rint(full)
    return np.where(np.abs(full - snapped) <= 1e-12, snapped, full)


def region() -> RegionSpec:
    """``0 <= y_i <= pi/2`` and ``y_2 <= y_1 / 3``."""
    F = Fraction
    cons = (
        ((F(-1), F(0)), F(0)),
        ((F(0), F(-1)), F(0)),
        ((F(1), F(0)), F(1, 2)),
        ((F(0), F(1)), F(1, 2)),
        ((F(-1), F(3)), F(0)),
    )

    def from_cube(u):
        u = np.asarray(u, dtype=float)
        y1 = np.pi / 2 * u[..., 0]
        y2 = y1 / 3 * u[..., 1]
        return np.stack([y1, y2], axis=-1), np.pi / 2 * y1 / 3

    return RegionSpec(2, cons, from_cube, (1.0, 0.2))


M_GROUP = (np.eye(7), SIGMA, ETA, SIGMA @ ETA)


@lru_cache(maxsize=None)
def cartan() -> CartanData:
    g = g2_group()
    k_idx, p_idx = split_by_involution(g, THETA)
    reg = region()
    roots = restricted_roots(g, (lam(5), lam(11)))
    pos = positive_system(roots, reg.interior_point)
    return CartanData(g, THETA, k_idx, p_idx, (lam(5), lam(11)), pos, reg, M_GROUP, k_defect)


def extract_roots() -> set[RootFunctional]:
    return set(restricted_roots(g2_group(), (lam(5), lam(11))))


def jacobian(y) -> np.ndarray:
    """The six-factor product over the positive roots."""
    y = np.asarray(y, dtype=float)
    y1, y2 = y[..., 0], y[..., 1]
    return (np.sin(y1 - 3 * y2) * np.sin(y1 - y2) * np.sin(y1 + y2) * np.sin(y1 + 3 * y2)
            * np.sin(2 * y1) * np.sin(2 * y2))


@lru_cache(maxsize=None)
def _one_param():
    return {j: OneParameterSubgroup(lam(j)) for j in (2, 3, 5, 8, 9, 11)}


def k_evaluate(p) -> np.ndarray:
    """``e^{phi1 l3} e^{psi1 l2} e^{omega1 l3} e^{phi2 l8} e^{psi2 l9} e^{omega2 l8}``."""
    p = np.asarray(p, dtype=float)
    E = _one_param()
    order = (3, 2, 3, 8, 9, 8)
    out = E[order[0]](p[..., 0])
    for i, j in enumerate(order[1:], 1):
        out = out @ E[j](p[..., i])
    return out


def a_evaluate(y) -> np.ndarray:
    E = _one_param()
    y = np.asarray(y, dtype=float)
    return E[5](y[..., 0]) @ E[11](y[..., 1])


def _k_weight(p):
    return np.cos(p[..., 1]) * np.sin(p[..., 1]) * np.cos(p[..., 4]) * np.sin(p[..., 4])


_K_RANGES = (np.pi, np.pi / 2, np.pi, np.pi, np.pi / 2, 2 * np.pi)
_KM_RANGES = (np.pi, np.pi / 4, np.pi / 2, np.pi, np.pi / 2, 2 * np.pi)
_K_NAMES = ("phi1", "psi1", "omega1", "phi2", "psi2", "omega2")


def _k_params(ranges, prefix):
    return tuple(Param(prefix + n, 0.0, hi, "sincos" if n.startswith("psi") else "angle")
                 for n, hi in zip(_K_NAMES, ranges))


def build_k_chart() -> EulerChart:
    return EulerChart("K", _k_params(_K_RANGES, ""), k_evaluate, _k_weight, k_group())


def build_k_mod_m_chart() -> EulerChart:
    """Same product with psi1 in [0, pi/4] and omega1 in [0, pi/2]."""
    return EulerChart("K/M", _k_params(_KM_RANGES, "t"), k_evaluate, _k_weight, k_group())


SIGMA_SHIFT = np.array([0, 0, np.pi / 2, 0, 0, np.pi / 2])


def sigma_reparam(p) -> np.ndarray:
    """Parameters of ``F_K(p) sigma``."""
    return np.asarray(p, dtype=float) + SIGMA_SHIFT


def eta_reparam(p) -> np.ndarray:
    """Parameters of ``F_K(p) eta`` (the omega_2 offset is 3pi/4)."""
    p = np.asarray(p, dtype=float)
    q = np.empty_like(p)
    q[..., 0] = p[..., 0] + np.pi / 2
    q[..., 1] = np.pi / 2 - p[..., 1]
    q[..., 2] = np.pi / 4 - p[..., 2]
    q[..., 3] = p[..., 3] + np.pi / 2
    q[..., 4] = np.pi / 2 - p[..., 4]
    q[..., 5] = 3 * np.pi / 4 - p[..., 5]
    return q


@lru_cache(maxsize=None)
def build_chart() -> EulerChart:
    """``F_G2(p~, y, p) = F_{K/M}(p~) e^{y1 l5} e^{y2 l11} F_K(p)`` (14 parameters)."""
    km = build_k_mod_m_chart()
    kc = build_k_chart()
    params = km.params + (Param("y1", 0.0, np.pi / 2, "region"), Param("y2", 0.0, np.pi / 6, "region")) + kc.params

    def factors(p):
        p = np.asarray(p, dtype=float)
        return k_evaluate(p[..., :6]), a_evaluate(p[..., 6:8]), k_evaluate(p[..., 8:])

    def evaluate(p):
        x, a, k = factors(p)
        return x @ a @ k

    def weight(p):
        p = np.asarray(p, dtype=float)
        return _k_weight(p[..., :6]) * jacobian(p[..., 6:8]) * _k_weight(p[..., 8:])

    return EulerChart("G2", params, evaluate, weight, g2_group(), region(), slice(6, 8), factors)
