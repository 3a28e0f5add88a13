"""Generators of u(N) and the recursive Euler charts of SU(N), U(N) and U(N)/Z_2^N."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .chart import EulerChart, Param
from .kak import GroupSpec, maurer_cartan_matrix
from .linalg import SPECIAL_UNITARY, UNITARY, OneParameterSubgroup


def lambda_matrix(N: int, index: int) -> np.ndarray:
    """The generator ``lambda_index`` of u(N), entries exactly as defined.

    ``index = 0`` is ``i E_11``; ``index = j^2 - 1 + k`` with ``1 <= k <= 2j``
    is an off-diagonal generator coupling rows ``ceil(k/2)`` and ``j + 1``;
    ``index = (j+1)^2 - 1`` is the diagonal one.
    """
    if N < 1 or not 0 <= index < N * N:
        raise ValueError(f"no lambda_{index} for N={N}")
    L = np.zeros((N, N), dtype=complex)
    if index == 0:
        L[0, 0] = 1j
        return L
    j = int(np.floor(np.sqrt(index + 1)))
    k = index - (j * j - 1)
    if k == 0:  # index = j^2 - 1: diagonal generator of level j - 1
        jj = j - 1
        for a in range(jj):
            L[a, a] = 1j
        L[jj, jj] = -1j * jj
        return L
    r = (k + 1) // 2 - 1  # ceil(k/2), zero-based
    c = j  # j + 1, zero-based
    if k % 2:
        L[r, c] = L[c, r] = 1j
    else:
        L[r, c], L[c, r] = 1.0, -1.0
    return L


@lru_cache(maxsize=None)
def su_basis(N: int) -> tuple[np.ndarray, ...]:
    """``(lambda_0, ..., lambda_{N^2-1})``."""
    return tuple(lambda_matrix(N, i) for i in range(N * N))


@lru_cache(maxsize=None)
def su_group(N: int) -> GroupSpec:
    return GroupSpec(f"SU({N})", N, su_basis(N)[1:], SPECIAL_UNITARY)


@lru_cache(maxsize=None)
def u_group(N: int) -> GroupSpec:
    return GroupSpec(f"U({N})", N, su_basis(N), UNITARY)


def n_angles(N: int) -> int:
    """Number of phi (and of psi) parameters, ``N(N-1)/2``."""
    return N * (N - 1) // 2


def phi_upper(N: int) -> list[float]:
    """Upper ends of the phi ranges: first of each recursion block is pi."""
    out = []
    for size in range(N - 1, 0, -1):
        out += [np.pi] + [2 * np.pi] * (size - 1)
    return out


@lru_cache(maxsize=None)
def _generators(N: int):
    lam = su_basis(N)
    l3 = OneParameterSubgroup(lam[3])
    rots = {k: OneParameterSubgroup(lam[(k - 1) ** 2 + 1]) for k in range(2, N + 1)}
    last = OneParameterSubgroup(lam[N * N - 1])
    first = OneParameterSubgroup(lam[0])
    return l3, rots, last, first


def su_prefix(N: int, phi, psi) -> np.ndarray:
    """``A(2)(phi_1, psi_1) ... A(N)(phi_{N-1}, psi_{N-1})``."""
    l3, rots, _, _ = _generators(N)
    out = None
    for k in range(2, N + 1):
        f = l3(phi[..., k - 2]) @ rots[k](psi[..., k - 2])
        out = f if out is None else out @ f
    return out


def su_evaluate(N: int, phi, psi, omega) -> np.ndarray:
    """Recursive SU(N) Euler product, batched over leading axes."""
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    omega = np.asarray(omega, dtype=float)
    batch = phi.shape[:-1] if phi.ndim else ()
    if N == 1:
        return np.ones(batch + (1, 1), dtype=complex)
    _, _, last, _ = _generators(N)
    out = su_prefix(N, phi, psi)
    inner = su_evaluate(N - 1, phi[..., N - 1:], psi[..., N - 1:], omega[..., : N - 2])
    emb = np.zeros(out.shape, dtype=complex)
    emb[..., : N - 1, : N - 1] = inner
    emb[..., N - 1, N - 1] = 1.0
    return out @ emb @ last(omega[..., N - 2])


def _split(N: int, p):
    M = n_angles(N)
    return p[..., :M], p[..., M:2 * M], p[..., 2 * M:2 * M + N - 1]


def _params(N: int, prefix: str, omega_scale: float) -> list[Param]:
    M = n_angles(N)
    ps = [Param(f"{prefix}phi{i + 1}", 0.0, hi) for i, hi in enumerate(phi_upper(N))]
    ps += [Param(f"{prefix}psi{i + 1}", 0.0, np.pi / 2, "sincos") for i in range(M)]
    ps += [Param(f"{prefix}omega{j}", 0.0, omega_scale * 2 * np.pi / j) for j in range(1, N)]
    return ps


def _sincos_weight(N: int):
    M = n_angles(N)

    def weight(p):
        psi = p[..., M:2 * M]
        return np.prod(np.cos(psi) * np.sin(psi), axis=-1)

    return weight


@lru_cache(maxsize=None)
def su_density_constant(N: int) -> float:
    """Oracle density at the reference point, used to rescale it to order one."""
    chart = _raw_su_chart(N)
    return float(_oracle(chart, reference_point(N)))


def reference_point(N: int) -> np.ndarray:
    """Generic interior parameters used wherever phi/omega must be fixed."""
    chart = _raw_su_chart(N)
    t = (np.arange(chart.dim) % 5 + 1.3) / 7.1
    return chart.lo + t * (chart.hi - chart.lo)


def _oracle(chart: EulerChart, p) -> np.ndarray:
    # Same construction as kak.numeric_density but without the boundary guard,
    # since callers evaluate on closed cubes where the map is still smooth.
    M = maurer_cartan_matrix(chart, p)
    return np.abs(np.linalg.det(M))


@lru_cache(maxsize=None)
def _raw_su_chart(N: int) -> EulerChart:
    def evaluate(p):
        return su_evaluate(N, *_split(N, p))

    return EulerChart(f"SU({N})-raw", tuple(_params(N, "", 1.0)), evaluate, lambda p: np.ones(p.shape[:-1]), su_group(N))


def su_density(N: int):
    """Density of the SU(N) chart in its own parameters (global constant free).

    ``cos(psi) sin(psi)`` for ``N <= 2``; the Maurer-Cartan oracle, rescaled by
    a cached constant, for ``N >= 3``.
    """
    if N <= 2:
        return _sincos_weight(N)
    chart = _raw_su_chart(N)
    c = su_density_constant(N)

    def weight(p):
        return _oracle(chart, p) / c

    return weight


def su_x_weight(N: int):
    """SU(N) density after ``x = sin(psi)``: ``w(psi) / prod cos(psi)`` as a function of ``x``.

    Equals ``prod x`` for ``N = 2`` and 1 for ``N = 1``.
    """
    M = n_angles(N)
    if N <= 2:
        return lambda x: np.prod(np.asarray(x, dtype=float), axis=-1) if M else np.ones(np.shape(x)[:-1])
    dens = su_density(N)
    ref = reference_point(N)

    def weight(x):
        x = np.asarray(x, dtype=float)
        p = np.broadcast_to(ref, x.shape[:-1] + ref.shape).copy()
        p[..., M:2 * M] = np.arcsin(x)
        return dens(p) / np.prod(np.sqrt(1 - x * x), axis=-1)

    return weight


def build_su(N: int) -> EulerChart:
    """Euler chart of SU(N): parameters phi_1..phi_M, psi_1..psi_M, omega_1..omega_{N-1}."""
    if N < 1:
        raise ValueError("N must be >= 1")

    def evaluate(p):
        return su_evaluate(N, *_split(N, p))

    return EulerChart(f"SU({N})", tuple(_params(N, "", 1.0)), evaluate, su_density(N), su_group(N))


def _u_chart(N: int, tilde: bool) -> EulerChart:
    if N < 1:
        raise ValueError("N must be >= 1")
    scale = 0.5 if tilde else 1.0
    prefix = "t" if tilde else ""
    params = _params(N, prefix, scale) + [Param(f"{prefix}xi", 0.0, 2 * np.pi * scale)]
    dens = su_density(N)
    _, _, _, first = _generators(N) if N > 1 else (None, None, None, OneParameterSubgroup(su_basis(1)[0]))

    def evaluate(p):
        return su_evaluate(N, *_split(N, p[..., :-1])) @ first(p[..., -1])

    def weight(p):
        return dens(p[..., :-1])

    name = f"U({N})/Z2^{N}" if tilde else f"U({N})"
    return EulerChart(name, tuple(params), evaluate, weight, u_group(N))


def build_u(N: int) -> EulerChart:
    """``F_U(p, xi) = F_SU(p) exp(xi lambda_0)`` with ``xi`` in [0, 2pi]."""
    return _u_chart(N, tilde=False)


def build_u_mod_z2(N: int) -> EulerChart:
    """The U(N)/Z_2^N chart: omega_j in [0, pi/j] and xi in [0, pi]."""
    return _u_chart(N, tilde=True)
