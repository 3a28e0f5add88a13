"""Generic KAK framework: Cartan data, restricted roots and Haar densities."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .chart import EulerChart, RegionSpec
from .linalg import MatrixPredicate, OneParameterSubgroup, bracket, check

DENSITY_STEP = 1e-6
BOUNDARY_MARGIN = 1e-4


class NotAdaptedError(ValueError):
    """A basis element is not an eigenvector of the involution."""


class StructureError(ValueError):
    """Algebra data fails a structural check (closure, rational roots, ...)."""


class BoundaryError(ValueError):
    """Parameters too close to the boundary of the chart domain."""


class MembershipError(ValueError):
    """A matrix expected in the group fails the membership predicate."""


@dataclass(frozen=True)
class GroupSpec:
    """Compact matrix group: Lie algebra basis plus membership test.

    The algebra inner product is always ``-Re Tr(XY)``; ``inner_product``
    only records the form a group traditionally quotes (it differs by a
    positive constant, which never matters here).
    """

    name: str
    matrix_dim: int
    basis: tuple[np.ndarray, ...]
    membership: MatrixPredicate
    inner_product: str = "-Re Tr(XY)"

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _flat(self) -> np.ndarray:
        B = np.stack([np.asarray(b, dtype=complex).ravel() for b in self.basis], axis=1)
        return np.concatenate([B.real, B.imag], axis=0)

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self._flat)

    def gram(self) -> np.ndarray:
        return self._flat.T @ self._flat

    def coordinates(self, X) -> tuple[np.ndarray, float]:
        """Least-squares coordinates of ``X`` in the basis and the residual norm."""
        X = np.asarray(X, dtype=complex).ravel()
        v = np.concatenate([X.real, X.imag])
        c = self._pinv @ v
        return c, float(np.linalg.norm(self._flat @ c - v))

    @cached_property
    def orthonormal(self) -> np.ndarray:
        """Orthonormal basis (stack of matrices) spanning the same algebra."""
        L = np.linalg.cholesky(self.gram())
        coef = np.linalg.inv(L).T  # columns: new vectors in old coordinates
        B = np.stack([np.asarray(b, dtype=complex) for b in self.basis])
        return np.einsum("ij,ikl->jkl", coef, B)

    def closure_residual(self) -> float:
        worst = 0.0
        for i, a in enumerate(self.basis):
            for b in self.basis[i + 1:]:
                worst = max(worst, self.coordinates(bracket(a, b))[1])
        return worst

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self._flat, tol=1e-10))

    def contains(self, g) -> tuple[bool, float]:
        return check(self.membership, g)


@dataclass(frozen=True)
class RootFunctional:
    """Restricted root as rational coordinates on the chosen basis of 𝔞."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if all(c == 0 for c in self.coords):
            raise ValueError("root functional must be nonzero")

    def __call__(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ np.array([float(c) for c in self.coords])

    def __neg__(self) -> RootFunctional:
        return RootFunctional(tuple(-c for c in self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class CartanData:
    """Involution split, maximal abelian 𝔞, positive roots, region and ``M``."""

    group: GroupSpec
    theta: np.ndarray  # θ(X) = T X T^{-1}
    k_idx: tuple[int, ...]
    p_idx: tuple[int, ...]
    a_basis: tuple[np.ndarray, ...]
    positive_roots: tuple[RootFunctional, ...]
    region: RegionSpec
    m_group: tuple[np.ndarray, ...]
    k_membership: Callable[[np.ndarray], float] | None = field(default=None, compare=False)

    def apply_theta(self, X) -> np.ndarray:
        T = self.theta
        return T @ X @ np.linalg.inv(T)

    def a_element(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.tensordot(y, np.stack(self.a_basis), axes=(-1, 0))

    @cached_property
    def _a_exps(self) -> tuple[OneParameterSubgroup, ...]:
        return tuple(OneParameterSubgroup(a) for a in self.a_basis)

    def exp_a(self, y) -> np.ndarray:
        """``exp(sum y_j a_j)`` (the 𝔞-basis commutes, so factors are independent)."""
        y = np.asarray(y, dtype=float)
        out = self._a_exps[0](y[..., 0])
        for j, E in enumerate(self._a_exps[1:], 1):
            out = out @ E(y[..., j])
        return out

    def residuals(self) -> dict[str, float]:
        """Defects of every structural invariant (all should be ~0)."""
        B = self.group.basis
        out = {}
        out["theta_k"] = max((np.abs(self.apply_theta(B[i]) - B[i]).max() for i in self.k_idx), default=0.0)
        out["theta_p"] = max((np.abs(self.apply_theta(B[i]) + B[i]).max() for i in self.p_idx), default=0.0)
        out["a_abelian"] = max(
            (np.abs(bracket(a, b)).max() for i, a in enumerate(self.a_basis) for b in self.a_basis[i + 1:]),
            default=0.0,
        )
        cent = 0.0
        for m in self.m_group:
            minv = np.linalg.inv(m)
            for a in self.a_basis:
                cent = max(cent, float(np.abs(m @ a @ minv - a).max()))
        out["m_centralizes_a"] = cent
        if self.k_membership is not None:
            out["m_in_k"] = max(float(self.k_membership(m)) for m in self.m_group)
        out["m_closed"] = group_closure_defect(self.m_group)
        return out


def group_closure_defect(elems: Sequence[np.ndarray]) -> float:
    """Distance from ``{a b, a^{-1}}`` to the listed set, maximised (0 for a finite group)."""
    def dist(x):
        return min(float(np.abs(x - e).max()) for e in elems)
    worst = 0.0
    for a in elems:
        worst = max(worst, dist(np.linalg.inv(a)))
        for b in elems:
            worst = max(worst, dist(a @ b))
    return worst


def split_by_involution(group: GroupSpec, theta, tol: float = 1e-12) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition basis indices into the +1 and -1 eigenspaces of ``Ad(theta)``."""
    T = np.asarray(theta)
    Tinv = np.linalg.inv(T)
    for b in group.basis:
        if np.abs(T @ (T @ b @ Tinv) @ Tinv - b).max() > tol:
            raise ValueError("theta is not an involution on the algebra")
    k_idx, p_idx = [], []
    for i, b in enumerate(group.basis):
        tb = T @ b @ Tinv
        scale = max(1.0, float(np.abs(b).max()))
        if np.abs(tb - b).max() <= tol * scale:
            k_idx.append(i)
        elif np.abs(tb + b).max() <= tol * scale:
            p_idx.append(i)
        else:
            raise NotAdaptedError(f"basis element {i} is not an eigenvector of theta")
    return tuple(k_idx), tuple(p_idx)


def ad_matrix(group: GroupSpec, X, indices: Sequence[int] | None = None) -> np.ndarray:
    """Matrix of ``ad(X)`` on the basis (restricted to ``indices``).

    Column ``j`` holds the coordinates of ``[X, b_j]``. Raises
    :class:`StructureError` if a bracket leaves the span.
    """
    idx = list(range(group.dim)) if indices is None else list(indices)
    cols = []
    for j in idx:
        c, res = group.coordinates(bracket(X, group.basis[j]))
        if res > 1e-10:
            raise StructureError(f"[X, b_{j}] not in span (residual {res:.2e})")
        cols.append(c[idx])
    return np.stack(cols, axis=1)


def _rationalize(x: float, max_den: int = 12, tol: float = 1e-8) -> Fraction:
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) > tol:
        raise StructureError(f"eigenvalue {x!r} is not a small rational")
    return f


def restricted_roots(group: GroupSpec, a_basis: Sequence[np.ndarray]) -> dict[RootFunctional, int]:
    """Simultaneous eigenvalues of ``ad(𝔞)`` on the complexified algebra.

    Uses the convention ``ad(H) v = i alpha(H) v``. Returns each nonzero root
    with its multiplicity.
    """
    ads = [ad_matrix(group, a) for a in a_basis]
    for i, A in enumerate(ads):
        for B in ads[i + 1:]:
            if np.abs(A @ B - B @ A).max() > 1e-10:
                raise StructureError("ad(𝔞) matrices do not commute")
    rng = np.random.default_rng(12345)
    c = rng.uniform(1.0, 2.0, size=len(ads)) * np.sqrt([2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0][: len(ads)])
    H = sum(ci * A for ci, A in zip(c, ads))
    _, vecs = np.linalg.eig(H)
    roots: dict[RootFunctional, int] = {}
    for v in vecs.T:
        k = int(np.argmax(np.abs(v)))
        vals = [(A @ v)[k] / v[k] / 1j for A in ads]
        if max(abs(val.imag) for val in vals) > 1e-8:
            raise StructureError("ad(𝔞) has non-imaginary eigenvalues")
        coords = tuple(_rationalize(val.real) for val in vals)
        if all(q == 0 for q in coords):
            continue
        r = RootFunctional(coords)
        roots[r] = roots.get(r, 0) + 1
    return roots


def positive_system(roots, interior_point) -> tuple[RootFunctional, ...]:
    """Roots positive at a generic interior point of the region."""
    pos = [r for r in roots if r(interior_point) > 0]
    return tuple(sorted(pos, key=lambda r: tuple(r.coords)))


def generic_jacobian(cd: CartanData, y) -> np.ndarray:
    """``prod sin(alpha(y))`` over the positive restricted roots."""
    y = np.asarray(y, dtype=float)
    out = np.ones(y.shape[:-1])
    for r in cd.positive_roots:
        out = out * np.sin(r(y))
    return out


def maurer_cartan_matrix(chart: EulerChart, params, h: float = DENSITY_STEP) -> np.ndarray:
    """Columns: orthonormal coordinates of ``g^{-1} dF/dθ_i`` (batched)."""
    p = np.asarray(params, dtype=float)
    n = chart.dim
    Q = chart.group.orthonormal
    Qc = np.conj(Q.reshape(Q.shape[0], -1))
    g = chart.evaluate(p)
    ginv = np.swapaxes(np.conj(g), -1, -2)
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0

        def central(step):
            return (chart.evaluate(p + step * e) - chart.evaluate(p - step * e)) / (2 * step)

        d = (4 * central(h / 2) - central(h)) / 3
        X = ginv @ d
        cols.append((X.reshape(*X.shape[:-2], -1) @ Qc.T).real)
    return np.stack(cols, axis=-1)


def numeric_density(chart: EulerChart, params, h: float = DENSITY_STEP, margin: float = BOUNDARY_MARGIN) -> np.ndarray:
    """Pullback Haar density of ``chart`` by finite differences (up to a constant).

    For a chart with fewer parameters than the algebra dimension the
    ``sqrt(det(M^T M))`` volume form is returned, which reduces to
    ``|det M|`` for square ``M``.
    """
    p = np.asarray(params, dtype=float)
    if np.any(chart.margin(p) < margin):
        raise BoundaryError(f"{chart.name}: parameters within {margin} of the boundary")
    M = maurer_cartan_matrix(chart, p, h)
    if M.shape[-1] == M.shape[-2]:
        return np.abs(np.linalg.det(M))
    G = np.swapaxes(M, -1, -2) @ M
    return np.sqrt(np.clip(np.linalg.det(G), 0.0, None))


def haar_invariance_defect(chart: EulerChart, h, f: Callable, side: str, spec, *, threads: int = 1):
    """Estimate ``int f(hg) dg - int f(g) dg`` (or the right/middle variant).

    ``side`` is ``"left"`` (g -> hg), ``"right"`` (g -> gh) or ``"middle"``
    (x a k -> x a h k, needs ``chart.factors``). Returns an
    :class:`~kakangles.integrate.IntegralResult`; its ``value`` is the signed
    defect and ``error`` its standard error (MC) or refinement delta.
    """
    from .integrate import integrate_params

    h = np.asarray(h)
    ok, res = chart.group.contains(h)
    if not ok:
        raise MembershipError(f"translation not in {chart.group.name} (residual {res:.2e})")
    if side == "middle" and chart.factors is None:
        raise ValueError(f"{chart.name} has no KAK factors")

    def integrand(p):
        if side == "middle":
            x, a, k = chart.factors(p)
            g = x @ a @ k
            return f(x @ a @ h @ k) - f(g)
        g = chart.evaluate(p)
        moved = h @ g if side == "left" else g @ h
        return f(moved) - f(g)

    if side not in ("left", "right", "middle"):
        raise ValueError(f"unknown side {side!r}")
    return integrate_params(chart, integrand, spec, threads=threads)


@dataclass(frozen=True)
class InjectivityReport:
    trials: int
    min_separation: float
    worst_pair: tuple[tuple[float, ...], tuple[float, ...]]


def exp_injectivity_probe(cd: CartanData, trials: int, seed: int = 0, min_gap: float = 1e-3) -> InjectivityReport:
    """Smallest ``||exp(H) - exp(H')||`` over random distinct pairs in int(𝒜)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    region = cd.region
    y1 = np.empty((0, region.dim))
    y2 = np.empty((0, region.dim))
    while len(y1) < trials:
        u = rng.uniform(1e-6, 1 - 1e-6, size=(2, trials, region.dim))
        a = region.from_cube(u[0])[0]
        b = region.from_cube(u[1])[0]
        keep = np.linalg.norm(a - b, axis=-1) >= min_gap
        y1 = np.concatenate([y1, a[keep]])
        y2 = np.concatenate([y2, b[keep]])
    y1, y2 = y1[:trials], y2[:trials]
    d = np.abs(cd.exp_a(y1) - cd.exp_a(y2)).max(axis=(-1, -2))
    i = int(np.argmin(d))
    return InjectivityReport(trials, float(d[i]), (tuple(y1[i]), tuple(y2[i])))
