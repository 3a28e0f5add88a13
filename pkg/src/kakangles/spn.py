"""The compact symplectic group Sp(N): Cartan data, chart and Jacobian."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .chart import EulerChart, Param, RegionSpec, ordered_chain_region
from .kak import CartanData, GroupSpec, RootFunctional, positive_system, restricted_roots
from .linalg import SYMPLECTIC, symplectic_form
from .sun import build_u, build_u_mod_z2, su_basis

MAX_M_ORDER_N = 20


def _block_k(U: np.ndarray) -> np.ndarray:
    N = U.shape[-1]
    out = np.zeros(U.shape[:-2] + (2 * N, 2 * N), dtype=complex)
    out[..., :N, :N] = U
    out[..., N:, N:] = np.conj(U)
    return out


def a_basis(N: int) -> tuple[np.ndarray, ...]:
    """``[e_j]_{k,l} = d(k,j) d(l,N+j) - d(l,j) d(k,N+j)`` (integer matrices)."""
    out = []
    for j in range(N):
        e = np.zeros((2 * N, 2 * N))
        e[j, N + j] = 1.0
        e[N + j, j] = -1.0
        out.append(e)
    return tuple(out)


@lru_cache(maxsize=None)
def sp_group(N: int) -> GroupSpec:
    """sp(N) with a basis adapted to the Cartan involution.

    The first ``N^2`` elements are ``diag(U, conj U)`` for the u(N)
    generators; the rest are ``[[0, A], [-A^dagger, 0]]`` for real and
    imaginary symmetric ``A``.
    """
    basis = [_block_k(lam) for lam in su_basis(N)]
    for a in range(N):
        for b in range(a, N):
            S = np.zeros((N, N))
            S[a, b] = S[b, a] = 1.0
            for A in (S.astype(complex), 1j * S):
                X = np.zeros((2 * N, 2 * N), dtype=complex)
                X[:N, N:] = A
                X[N:, :N] = -A.conj().T
                basis.append(X)
    return GroupSpec(f"Sp({N})", 2 * N, tuple(basis), SYMPLECTIC, inner_product="4 Tr(XY)")


def theta_matrix(N: int) -> np.ndarray:
    return np.diag([1j] * N + [-1j] * N)


def region(N: int) -> RegionSpec:
    """``0 <= y_1 <= ... <= y_N <= pi/2``."""
    return ordered_chain_region(N, Fraction(1, 2))


def m_group(N: int) -> tuple[np.ndarray, ...]:
    """All ``2^N`` sign matrices ``diag(eps, eps)``."""
    if N > MAX_M_ORDER_N:
        raise ValueError(f"refusing to enumerate 2^{N} elements")
    return tuple(np.diag(np.array(eps + eps, dtype=float)) for eps in product((1, -1), repeat=N))


def positive_roots(N: int) -> tuple[RootFunctional, ...]:
    """Closed form ``{2 alpha_j} u {alpha_j +- alpha_k : j > k}``."""
    def e(j):
        return [Fraction(int(i == j)) for i in range(N)]
    roots = [RootFunctional(tuple(2 * c for c in e(j))) for j in range(N)]
    for j in range(N):
        for k in range(j):
            roots.append(RootFunctional(tuple(a + b for a, b in zip(e(j), e(k)))))
            roots.append(RootFunctional(tuple(a - b for a, b in zip(e(j), e(k)))))
    return tuple(sorted(roots, key=lambda r: tuple(r.coords)))


def k_defect(A) -> float:
    """Distance of ``A`` from the block form ``diag(U, conj U)`` with ``U`` unitary."""
    A = np.asarray(A)
    N = A.shape[-1] // 2
    U = A[:N, :N]
    off = max(float(np.abs(A[:N, N:]).max()), float(np.abs(A[N:, :N]).max()))
    return max(off, float(np.abs(A[N:, N:] - U.conj()).max()), float(np.abs(U.conj().T @ U - np.eye(N)).max()))


@lru_cache(maxsize=None)
def cartan(N: int) -> CartanData:
    g = sp_group(N)
    from .kak import split_by_involution

    k_idx, p_idx = split_by_involution(g, theta_matrix(N))
    reg = region(N)
    roots = restricted_roots(g, a_basis(N))
    pos = positive_system(roots, reg.interior_point)
    return CartanData(g, theta_matrix(N), k_idx, p_idx, a_basis(N), pos, reg, m_group(N), k_defect)


def jacobian(N: int, y) -> np.ndarray:
    """``prod sin(2 y_j) prod_{i > k} sin(y_i - y_k) sin(y_i + y_k)``."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != N:
        raise ValueError(f"expected {N} coordinates")
    out = np.prod(np.sin(2 * y), axis=-1)
    for i in range(N):
        for k in range(i):
            out = out * np.sin(y[..., i] - y[..., k]) * np.sin(y[..., i] + y[..., k])
    return out


def exp_a(N: int, y) -> np.ndarray:
    """``exp(sum y_j e_j)`` assembled from planar rotations."""
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape[:-1] + (2 * N, 2 * N))
    c, s = np.cos(y), np.sin(y)
    for j in range(N):
        out[..., j, j] = c[..., j]
        out[..., N + j, N + j] = c[..., j]
        out[..., j, N + j] = s[..., j]
        out[..., N + j, j] = -s[..., j]
    return out


@lru_cache(maxsize=None)
def build_chart(N: int) -> EulerChart:
    """``F_Sp(N)(p~, y, p) = diag(F~, conj F~) exp(sum y_j e_j) diag(F, conj F)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    tilde = build_u_mod_z2(N)
    plain = build_u(N)
    n = tilde.dim
    ysl = slice(n, n + N)
    params = tilde.params + tuple(Param(f"y{j + 1}", 0.0, np.pi / 2, "region") for j in range(N)) + plain.params

    def factors(p):
        p = np.asarray(p, dtype=float)
        x = _block_k(tilde.evaluate(p[..., :n]))
        a = exp_a(N, p[..., ysl])
        k = _block_k(plain.evaluate(p[..., n + N:]))
        return x, a, k

    def evaluate(p):
        x, a, k = factors(p)
        return x @ a @ k

    def weight(p):
        p = np.asarray(p, dtype=float)
        return tilde.weight(p[..., :n]) * jacobian(N, p[..., ysl]) * plain.weight(p[..., n + N:])

    return EulerChart(f"Sp({N})", params, evaluate, weight, sp_group(N), region(N), ysl, factors)


def k_element(U) -> np.ndarray:
    """Embed ``U`` in ``U(N)`` as ``diag(U, conj U)``."""
    return _block_k(np.asarray(U))


__all__ = [
    "a_basis", "build_chart", "cartan", "exp_a", "jacobian", "k_defect", "k_element",
    "m_group", "positive_roots", "region", "sp_group", "symplectic_form", "theta_matrix",
]
