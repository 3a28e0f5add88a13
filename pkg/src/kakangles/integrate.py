"""Quadrature and Monte-Carlo over chart domains and cube x torus domains."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .chart import EulerChart
from .linalg import SYMPLECTIC, check

_EPS = np.finfo(float).eps
_U_CLIP = 1e-16


class PoisonedResultError(FloatingPointError):
    """The integrand returned a non-finite value."""

    def __init__(self, point):
        super().__init__(f"non-finite integrand at {np.asarray(point).tolist()}")
        self.point = np.asarray(point)


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate: tensor Gauss-Legendre of ``order`` or ``samples`` MC draws."""

    method: str = "gauss-legendre"
    order: int = 20
    samples: int = 0
    seed: int = 0
    chunk: int = 50_000

    def __post_init__(self):
        if self.method not in ("gauss-legendre", "monte-carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "gauss-legendre" and self.order < 1:
            raise ValueError("order must be >= 1")
        if self.method == "monte-carlo" and self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")

    @classmethod
    def gauss_legendre(cls, order: int) -> QuadratureSpec:
        return cls("gauss-legendre", order=order)

    @classmethod
    def monte_carlo(cls, samples: int, seed: int = 0, chunk: int = 50_000) -> QuadratureSpec:
        return cls("monte-carlo", samples=samples, seed=seed, chunk=chunk)

    @property
    def is_mc(self) -> bool:
        return self.method == "monte-carlo"

    def coarse(self) -> QuadratureSpec:
        return QuadratureSpec("gauss-legendre", order=max(1, self.order // 2), chunk=self.chunk)


@dataclass(frozen=True)
class IntegralResult:
    """Estimate with one standard error (MC) or the last-refinement delta (quadrature).

    ``value`` and ``error`` may be arrays when the integrand is vector valued.
    ``mass`` is the un-normalised integral of the weight alone.
    """

    value: complex | np.ndarray
    error: float | np.ndarray
    budget: int
    seed: int | None = None
    mass: float = float("nan")
    mass_error: float = 0.0

    def within(self, target, sigmas: float = 3.0, floor: float = 0.0):
        return np.abs(np.asarray(self.value) - target) <= sigmas * np.asarray(self.error) + floor


# -- primitive rules ---------------------------------------------------------

def gl_rule(order: int, lo: float = 0.0, hi: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    half = (hi - lo) / 2
    return lo + half * (x + 1), half * w


def _fsum_array(parts: Sequence[np.ndarray]) -> np.ndarray:
    """Exactly rounded sum over the first axis, elementwise, in the given order."""
    stack = np.asarray(parts)
    flat = stack.reshape(len(parts), -1)
    if np.iscomplexobj(flat):
        re = [math.fsum(c) for c in flat.real.T]
        im = [math.fsum(c) for c in flat.imag.T]
        out = np.array(re) + 1j * np.array(im)
    else:
        out = np.array([math.fsum(c) for c in flat.T])
    return out.reshape(stack.shape[1:])


def _check_finite(vals, pts):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad.reshape(len(pts), -1).any(axis=1))[0, 0]
        raise PoisonedResultError(pts[idx])


def _map_chunks(fn, chunks, threads: int):
    if threads <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, chunks))


# -- chart domains -------------------------------------------------------------

@dataclass
class _ChartAxes:
    """Flattened view of a chart domain for tensor rules and samplers."""

    chart: EulerChart
    flat: list[int] = field(init=False)

    def __post_init__(self):
        self.flat = [i for i, q in enumerate(self.chart.params) if q.kind != "region"]

    @property
    def n_axes(self) -> int:
        reg = self.chart.region.dim if self.chart.region is not None else 0
        return len(self.flat) + reg

    def place(self, u_flat_vals, u_region):
        """Parameters from flat-axis values and region-cube coordinates; returns (p, jac)."""
        c = self.chart
        n = u_flat_vals.shape[0]
        p = np.empty((n, c.dim))
        p[:, self.flat] = u_flat_vals
        jac = np.ones(n)
        if c.region is not None:
            y, jac = c.region.from_cube(u_region)
            p[:, c.region_slice] = y
        return p, jac


def _gl_chunks(chart: EulerChart, order: int, chunk: int):
    ax = _ChartAxes(chart)
    rules = [gl_rule(order, chart.params[i].lo, chart.params[i].hi) for i in ax.flat]
    reg_dim = chart.region.dim if chart.region is not None else 0
    rules += [gl_rule(order)] * reg_dim
    sizes = [order] * len(rules)
    total = int(np.prod(sizes))
    starts = list(range(0, total, chunk))

    def make(s):
        idx = np.unravel_index(np.arange(s, min(total, s + chunk)), sizes)
        vals = np.stack([rules[a][0][idx[a]] for a in range(len(rules))], axis=-1)
        w = np.prod(np.stack([rules[a][1][idx[a]] for a in range(len(rules))], axis=-1), axis=-1)
        nf = len(ax.flat)
        p, jac = ax.place(vals[:, :nf], vals[:, nf:])
        return p, w * jac

    return total, starts, make


def _mc_chunks(chart: EulerChart, samples: int, seed: int, chunk: int):
    ax = _ChartAxes(chart)
    starts = list(range(0, samples, chunk))

    def make(s):
        n = min(samples, s + chunk) - s
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(s // chunk,))
        rng = np.random.default_rng(ss)
        u = np.clip(rng.random((n, ax.n_axes)), _U_CLIP, 1 - _U_CLIP)
        vals = np.empty((n, len(ax.flat)))
        inv_q = np.ones(n)
        for a, i in enumerate(ax.flat):
            q = chart.params[i]
            if q.kind == "sincos":
                s_lo, s_hi = np.sin(q.lo) ** 2, np.sin(q.hi) ** 2
                psi = np.arcsin(np.sqrt(s_lo + u[:, a] * (s_hi - s_lo)))
                vals[:, a] = psi
                inv_q = inv_q * (s_hi - s_lo) / (2 * np.sin(psi) * np.cos(psi))
            else:
                vals[:, a] = q.lo + u[:, a] * q.length
                inv_q = inv_q * q.length
        p, jac = ax.place(vals, u[:, len(ax.flat):])
        return p, inv_q * jac

    return samples, starts, make


def _accumulate(chart, fn, make, starts, threads):
    def work(s):
        p, base = make(s)
        w = base * chart.weight(p)
        vals = np.asarray(fn(p))
        _check_finite(vals, p)
        wf = np.tensordot(w, vals, axes=(0, 0))
        w2 = w * w
        return (
            math.fsum(w), wf, math.fsum(w2), np.tensordot(w2, vals, axes=(0, 0)),
            np.tensordot(w2, np.abs(vals) ** 2, axes=(0, 0)), np.tensordot(np.abs(w), np.abs(vals), axes=(0, 0)),
        )

    parts = _map_chunks(work, starts, threads)
    S0 = math.fsum(q[0] for q in parts)
    S1 = _fsum_array([q[1] for q in parts])
    T0 = math.fsum(q[2] for q in parts)
    T1 = _fsum_array([q[3] for q in parts])
    T2 = _fsum_array([q[4] for q in parts])
    A = _fsum_array([q[5] for q in parts])
    return S0, S1, T0, T1, T2, A


def integrate_params(chart: EulerChart, fn: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec,
                     normalize: bool = True, threads: int = 1) -> IntegralResult:
    """``int fn(p) w(p) dp`` over the chart domain, divided by ``int w`` if ``normalize``.

    ``fn`` receives a ``(n, dim)`` parameter batch and returns ``(n, ...)`` values.
    """
    if spec.is_mc:
        total, starts, make = _mc_chunks(chart, spec.samples, spec.seed, spec.chunk)
        S0, S1, T0, T1, T2, _ = _accumulate(chart, fn, make, starts, threads)
        n = total
        if normalize:
            est = S1 / S0
            var = np.clip(T2 - 2 * np.real(np.conj(est) * T1) + np.abs(est) ** 2 * T0, 0.0, None)
            err = np.sqrt(var) / S0
        else:
            est = S1 / n
            err = np.sqrt(np.clip(T2 / n - np.abs(est) ** 2, 0.0, None) / n)
        mass = S0 / n
        mass_err = math.sqrt(max(T0 / n - mass * mass, 0.0) / n)
        return IntegralResult(_scalar(est), _scalar(err), n, spec.seed, mass, mass_err)

    def run(order):
        total, starts, make = _gl_chunks(chart, order, spec.chunk)
        S0, S1, _, _, _, A = _accumulate(chart, fn, make, starts, threads)
        return total, S0, (S1 / S0 if normalize else S1), (A / abs(S0) if normalize else A)

    total, S0, est, scale = run(spec.order)
    _, S0c, est_c, _ = run(spec.coarse().order)
    err = np.maximum(np.abs(est - est_c), 64 * _EPS * scale)
    return IntegralResult(_scalar(est), _scalar(err), total, None, S0, abs(S0 - S0c))


def integrate_chart(chart: EulerChart, f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec,
                    normalize: bool = True, threads: int = 1) -> IntegralResult:
    """Haar-normalised ``int f(g) dg`` through the chart; ``f`` maps a batch of matrices to values."""
    return integrate_params(chart, lambda p: f(chart.evaluate(p)), spec, normalize, threads)


_MASS_CACHE: dict = {}


def chart_mass(chart: EulerChart, spec: QuadratureSpec) -> IntegralResult:
    """Cached ``int w(p) dp`` (the inverse normalisation constant) for a chart and spec."""
    key = (chart.name, spec)
    if key not in _MASS_CACHE:
        _MASS_CACHE[key] = integrate_params(chart, lambda p: np.ones(len(p)), spec, normalize=False)
    return _MASS_CACHE[key]


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


# -- cube x torus ---------------------------------------------------------------

@dataclass(frozen=True)
class CubeBlock:
    """A group of cube coordinates with a map from ``[0,1]^len`` and a weight.

    ``to_domain(u) -> (x, jac)``; ``weight(x) -> w`` (both batched).
    """

    indices: tuple[int, ...]
    to_domain: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    weight: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def endpoint_map(u):
    """``x = 1 - (1-u)^2`` on each axis: smooths ``sqrt(1-x^2)`` at ``x = 1``."""
    u = np.asarray(u, dtype=float)
    return 1 - (1 - u) ** 2, np.prod(2 * (1 - u), axis=-1)


def unit_weight(x):
    return np.ones(np.shape(x)[:-1])


def chain_map(u):
    """Onto ``0 <= xi_1 <= ... <= xi_n <= 1``: ``xi_n`` endpoint-regularised, ``xi_j = xi_{j+1} u_j``."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    xi = np.empty_like(u)
    xi[..., n - 1] = 1 - (1 - u[..., n - 1]) ** 2
    jac = 2 * (1 - u[..., n - 1])
    for j in range(n - 2, -1, -1):
        xi[..., j] = xi[..., j + 1] * u[..., j]
        jac = jac * xi[..., j + 1]
    return xi, jac


@dataclass(frozen=True)
class CubeTorusDomain:
    """``k`` cube coordinates (partitioned into blocks) and ``l`` circle angles in ``[0, 2pi)``."""

    k: int
    l: int
    blocks: tuple[CubeBlock, ...]

    def __post_init__(self):
        seen = sorted(i for b in self.blocks for i in b.indices)
        if seen != list(range(self.k)):
            raise ValueError("blocks must partition the cube coordinates")

    @classmethod
    def free(cls, k: int, l: int, weight=None) -> CubeTorusDomain:
        blocks = tuple(CubeBlock((i,), endpoint_map, unit_weight, f"x{i + 1}") for i in range(k))
        if weight is not None:
            blocks = blocks[:-1] + (CubeBlock(blocks[-1].indices, endpoint_map, weight),) if k else blocks
        return cls(k, l, blocks)

    def to_cube(self, u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Map unit-cube points to ``(x, jac, weight)``."""
        u = np.asarray(u, dtype=float)
        x = np.empty_like(u)
        jac = np.ones(u.shape[:-1])
        w = np.ones(u.shape[:-1])
        for b in self.blocks:
            idx = list(b.indices)
            xb, jb = b.to_domain(u[..., idx])
            x[..., idx] = xb
            jac = jac * jb
            w = w * b.weight(xb)
        return x, jac, w


def integrate_cube_torus(f: Callable[[np.ndarray, np.ndarray], np.ndarray], domain: CubeTorusDomain,
                         spec: QuadratureSpec, threads: int = 1) -> IntegralResult:
    """``int f(x, theta) W(x) dx dtheta`` (plain ``dtheta``; any ``1/i`` factors are the caller's)."""
    k, l = domain.k, domain.l
    dim = k + l
    if spec.is_mc:
        starts = list(range(0, spec.samples, spec.chunk))

        def work(s):
            n = min(spec.samples, s + spec.chunk) - s
            rng = np.random.default_rng(np.random.SeedSequence(entropy=spec.seed, spawn_key=(s // spec.chunk,)))
            u = np.clip(rng.random((n, dim)), _U_CLIP, 1 - _U_CLIP)
            x, jac, w = domain.to_cube(u[:, :k])
            th = 2 * np.pi * u[:, k:]
            wt = jac * w * (2 * np.pi) ** l
            vals = np.asarray(f(x, th))
            _check_finite(vals, u)
            return np.tensordot(wt, vals, axes=(0, 0)), np.tensordot(wt * wt, np.abs(vals) ** 2, axes=(0, 0))

        parts = _map_chunks(work, starts, threads)
        n = spec.samples
        mean = _fsum_array([q[0] for q in parts]) / n
        second = _fsum_array([q[1] for q in parts]) / n
        err = np.sqrt(np.clip(second - np.abs(mean) ** 2, 0.0, None) / n)
        return IntegralResult(_scalar(mean), _scalar(err), n, spec.seed)

    def run(order):
        ru, rw = gl_rule(order)
        rt, rtw = gl_rule(order, 0.0, 2 * np.pi)
        sizes = [order] * dim
        total = order ** dim
        starts = list(range(0, total, spec.chunk))

        def work(s):
            idx = np.unravel_index(np.arange(s, min(total, s + spec.chunk)), sizes)
            u = np.stack([ru[idx[a]] for a in range(k)], axis=-1) if k else np.empty((len(idx[0]) if dim else 1, 0))
            th = np.stack([rt[idx[k + a]] for a in range(l)], axis=-1) if l else np.empty((u.shape[0], 0))
            wq = np.ones(u.shape[0])
            for a in range(k):
                wq = wq * rw[idx[a]]
            for a in range(l):
                wq = wq * rtw[idx[k + a]]
            x, jac, w = domain.to_cube(u)
            wt = wq * jac * w
            vals = np.asarray(f(x, th))
            _check_finite(vals, np.concatenate([u, th], axis=-1))
            return np.tensordot(wt, vals, axes=(0, 0)), np.tensordot(np.abs(wt), np.abs(vals), axes=(0, 0))

        parts = _map_chunks(work, starts, threads)
        return total, _fsum_array([q[0] for q in parts]), _fsum_array([q[1] for q in parts])

    total, est, scale = run(spec.order)
    _, est_c, _ = run(spec.coarse().order)
    err = np.maximum(np.abs(est - est_c), 64 * _EPS * scale)
    return IntegralResult(_scalar(est), _scalar(err), total)


# -- independent Haar sampler --------------------------------------------------------

def _partner(c: np.ndarray, N: int) -> np.ndarray:
    """Quaternionic partner ``(u, v) -> (-conj v, conj u)`` of a column."""
    return np.concatenate([-np.conj(c[..., N:]), np.conj(c[..., :N])], axis=-1)


def haar_sample_sp(N: int, count: int, seed: int = 0) -> np.ndarray:
    """Haar-random Sp(N) elements (N in {1, 2}) by quaternionic Gram-Schmidt.

    Each column ``j`` is orthonormalised against the earlier columns and their
    partners; its partner becomes column ``N + j``. Outputs satisfy
    ``J conj(A) J^T = A``.
    """
    if N not in (1, 2):
        raise ValueError("haar_sample_sp supports N = 1, 2")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((count, N, 2 * N)) + 1j * rng.standard_normal((count, N, 2 * N))
    cols = []
    for j in range(N):
        c = Z[:, j, :]
        for prev in cols:
            for b in (prev, _partner(prev, N)):
                c = c - np.sum(np.conj(b) * c, axis=-1, keepdims=True) * b
        c = c / np.linalg.norm(c, axis=-1, keepdims=True)
        cols.append(c)
    out = np.empty((count, 2 * N, 2 * N), dtype=complex)
    for j, c in enumerate(cols):
        out[:, :, j] = c
        out[:, :, N + j] = _partner(c, N)
    return out


def haar_sample_check(A) -> float:
    return max(check(SYMPLECTIC, a)[1] for a in A)
