"""Lowering finite-type functions on Sp(N) and G2 to admissible functions on cube x torus.

A structured finite-type function is a sum of monomials in the chart
parameters: ``exp(i k phi)`` on every circle-like angle and
``sin^l cos^m`` on every polar angle and radial coordinate. Each angle of
length ``L`` becomes a circle ``z^(k L / 2pi)``; a polar angle on
``[0, h]`` becomes ``x = sin(psi) / sin(h)``; a radial coordinate becomes
``xi = sin(y)``. The Haar weight turns into a polynomial weight on the cube.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import g2 as g2mod
from . import spn
from .admissible import AdmissibleFunction, CubeMomentCache, FormatError, moment
from .chart import EulerChart
from .integrate import (CubeBlock, CubeTorusDomain, QuadratureSpec, chain_map, endpoint_map,
                        integrate_params)
from .sun import n_angles, su_x_weight

# -- triple angle ----------------------------------------------------------------------


def triple_angle_s(xi) -> np.ndarray:
    """``sin(asin(xi) / 3)``: the root of ``4 s^3 - 3 s + xi = 0`` in ``[0, 1/2]``."""
    xi = np.asarray(xi, dtype=float)
    return np.sin(np.arcsin(xi) / 3)


def radical_branches(xi: float) -> dict[int, float]:
    """The printed radical ``(r + 1/r) / 2`` with ``r`` each complex cube root of ``sqrt(xi^2-1) - xi``.

    ``k = 0`` is the principal root. Only ``k = 2`` reproduces ``sin(asin(xi)/3)``
    on ``[0, 1]``; principal branches give ``sqrt(3)/2`` at ``xi = 0``.
    """
    w = np.sqrt(complex(xi * xi - 1)) - xi
    out = {}
    for k in range(3):
        r = abs(w) ** (1 / 3) * np.exp(1j * (np.angle(w) + 2 * np.pi * k) / 3)
        out[k] = float(((r + 1 / r) / 2).real)
    return out


def matching_radical_branch(xi: float, tol: float = 1e-12) -> int | None:
    target = float(triple_angle_s(xi))
    for k, v in radical_branches(xi).items():
        if abs(v - target) <= tol:
            return k
    return None


# -- weights ------------------------------------------------------------------------------


def xi_chain_weight(xi) -> np.ndarray:
    """``prod 2 xi_j * prod_{j>k} (xi_j^2 (1 - xi_k^2) - (1 - xi_j^2) xi_k^2)``."""
    xi = np.asarray(xi, dtype=float)
    out = np.prod(2 * xi, axis=-1)
    n = xi.shape[-1]
    for j in range(n):
        for k in range(j):
            a, b = xi[..., j] ** 2, xi[..., k] ** 2
            out = out * (a * (1 - b) - (1 - a) * b)
    return out


def j_tilde_spn(N: int, x_tilde, x, xi) -> np.ndarray:
    """Lowered Sp(N) weight: SU(N) x-weights on both sides times the radial factor."""
    wx = su_x_weight(N)
    return wx(np.asarray(x_tilde, dtype=float)) * xi_chain_weight(xi) * wx(np.asarray(x, dtype=float))


def j_tilde_g2_xi(xi) -> np.ndarray:
    """``4 xi1 xi2 [xi1^2 (16c^3 + 9c - 24c^2) - (1 - xi1^2)(3 xi2 - 4 xi2^3)^2][xi1^2 c - (1 - xi1^2) xi2^2]``, ``c = 1 - xi2^2``."""
    xi = np.asarray(xi, dtype=float)
    a, b = xi[..., 0], xi[..., 1]
    c = 1 - b * b
    t = 3 * b - 4 * b ** 3
    return 4 * a * b * (a * a * (16 * c ** 3 + 9 * c - 24 * c ** 2) - (1 - a * a) * t * t) * (a * a * c - (1 - a * a) * b * b)


def j_tilde_g2(x, xi) -> np.ndarray:
    return np.prod(np.asarray(x, dtype=float), axis=-1) * j_tilde_g2_xi(xi)


def g2_xi_map(u):
    """``xi1 = 1 - (1 - u1)^2``, ``xi2 = S(xi1) u2`` onto ``0 <= xi2 <= S(xi1)``."""
    u = np.asarray(u, dtype=float)
    xi = np.empty_like(u)
    xi[..., 0] = 1 - (1 - u[..., 0]) ** 2
    s = triple_angle_s(xi[..., 0])
    xi[..., 1] = s * u[..., 1]
    return xi, 2 * (1 - u[..., 0]) * s


def _x_product(x):
    return np.prod(x, axis=-1)


# -- layouts ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Layout:
    """How chart parameters map to the lowered coordinates.

    ``torus[i]`` is ``L / 2pi`` for circle-like angle ``i`` (or None);
    ``cube[i]`` is ``(cube index, sin^2 of the upper end)`` for polar and
    radial coordinates (or None).
    """

    chart: EulerChart
    N: int
    torus: tuple
    cube: tuple
    domain: CubeTorusDomain

    @property
    def angle_idx(self) -> list[int]:
        return [i for i, t in enumerate(self.torus) if t is not None]

    @property
    def polar_idx(self) -> list[int]:
        return [i for i, c in enumerate(self.cube) if c is not None]

    @property
    def s_scale(self) -> tuple:
        k = self.domain.k
        out = [Fraction(1)] * k
        for c in self.cube:
            if c is not None:
                out[c[0]] = c[1]
        return tuple(out)

    def theoretical_constant(self) -> float:
        """``int_chart f^P w dp / int_lowered f^P W`` implied by the substitutions."""
        out = 1.0
        for t in self.torus:
            if t is not None:
                out *= float(t)
        for c in self.cube:
            if c is not None:
                out *= float(c[1])
        return out


def _rational(v: float, max_den: int = 64) -> Fraction:
    q = Fraction(v).limit_denominator(max_den)
    if abs(float(q) - v) > 1e-12:
        raise ValueError(f"{v} is not a small rational")
    return q


def _layout(chart: EulerChart, N: int, domain: CubeTorusDomain) -> Layout:
    torus, cube = [], []
    polar = [i for i, q in enumerate(chart.params) if q.kind == "sincos"]
    radial = [i for i, q in enumerate(chart.params) if q.kind == "region"]
    slot = {i: n for n, i in enumerate(polar + radial)}
    for i, q in enumerate(chart.params):
        if q.kind == "angle":
            torus.append(_rational(q.length / (2 * np.pi)))
            cube.append(None)
        else:
            torus.append(None)
            scale = _rational(np.sin(q.hi) ** 2) if q.kind == "sincos" else Fraction(1)
            cube.append((slot[i], scale))
    return Layout(chart, N, tuple(torus), tuple(cube), domain)


@lru_cache(maxsize=None)
def spn_domain(N: int) -> CubeTorusDomain:
    """Cube ``(x~, x, xi)`` with SU(N) x-weights and the ordered xi chain; ``N(N+1)`` circles."""
    M = n_angles(N)
    wx = su_x_weight(N)
    blocks = []
    for off in (0, M):
        if M == 0:
            continue
        if N == 2:
            blocks.append(CubeBlock((off,), endpoint_map, _x_product, "x"))
        else:
            blocks.append(CubeBlock(tuple(range(off, off + M)), endpoint_map, wx, "x-SU"))
    blocks.append(CubeBlock(tuple(range(2 * M, 2 * M + N)), chain_map, xi_chain_weight, "xi"))
    return CubeTorusDomain(N * N, N * (N + 1), tuple(blocks))


@lru_cache(maxsize=None)
def g2_domain() -> CubeTorusDomain:
    """Cube ``(x1..x4, xi1, xi2)`` with ``xi2 <= S(xi1)``; 8 circles."""
    blocks = tuple(CubeBlock((i,), endpoint_map, _x_product, f"x{i + 1}") for i in range(4))
    blocks += (CubeBlock((4, 5), g2_xi_map, j_tilde_g2_xi, "xi"),)
    return CubeTorusDomain(6, 8, blocks)


@lru_cache(maxsize=None)
def spn_layout(N: int) -> Layout:
    return _layout(spn.build_chart(N), N, spn_domain(N))


@lru_cache(maxsize=None)
def g2_layout() -> Layout:
    return _layout(g2mod.build_chart(), 4, g2_domain())


# -- structured finite-type functions -------------------------------------------------


@dataclass(frozen=True)
class AngleTerm:
    """``c * exp(i k . angles) * prod sin^l cos^m`` over the polar/radial coordinates."""

    c: complex
    k: tuple
    l: tuple
    m: tuple


def _eval_terms(layout: Layout, terms: Sequence[AngleTerm], p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    ang = p[..., layout.angle_idx]
    pol = p[..., layout.polar_idx]
    s, c = np.sin(pol), np.cos(pol)
    out = np.zeros(p.shape[:-1], dtype=complex)
    for t in terms:
        phase = np.exp(1j * (ang @ np.array(t.k, dtype=float)))
        out = out + t.c * phase * np.prod(s ** np.array(t.l) * c ** np.array(t.m), axis=-1)
    return out


def _lower_terms(layout: Layout, terms: Sequence[AngleTerm]) -> AdmissibleFunction:
    k = layout.domain.k
    torus = [layout.torus[i] for i in layout.angle_idx]
    cube = [layout.cube[i] for i in layout.polar_idx]
    out: dict = {}
    for t in terms:
        expo = tuple(Fraction(int(kk)) * q for kk, q in zip(t.k, torus))
        xp, sp = [0] * k, [0] * k
        coef = complex(t.c)
        for (idx, scale), l, m in zip(cube, t.l, t.m):
            xp[idx] += int(l)
            sp[idx] += int(m)
            coef *= math.sqrt(scale) ** int(l)
        poly = out.setdefault(expo, {})
        key = (tuple(xp), tuple(sp))
        poly[key] = poly.get(key, 0j) + coef
    den = max([1] + [e.denominator for m in out for e in m])
    return AdmissibleFunction(max(layout.N, den), k, layout.domain.l, out, layout.s_scale)


def _check_int(v, what, lo=None, allowed=None):
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise FormatError(f"{what} must be an integer")
    if lo is not None and v < lo:
        raise FormatError(f"{what} must be >= {lo}")
    if allowed is not None and v not in allowed:
        raise FormatError(f"{what} must be one of {sorted(allowed)}")
    return int(v)


def _int_list(vals, n, what, lo=None, allowed=None):
    if not isinstance(vals, (list, tuple)) or len(vals) != n:
        raise FormatError(f"{what} needs {n} integers")
    return tuple(_check_int(v, f"{what}[{i}]", lo, allowed) for i, v in enumerate(vals))


@dataclass(frozen=True)
class SUFactor:
    """SU(N)/U(N) monomial: ``e^{i kphi.phi} prod sin^a cos^b (psi) e^{i l.omega} e^{i xi_power xi}``."""

    kphi: tuple
    a: tuple
    b: tuple
    l: tuple
    xi_power: int = 0

    def validate(self, N: int, what: str):
        M = n_angles(N)
        _int_list(self.kphi, M, f"{what}.phi")
        _int_list(self.a, M, f"{what}.sin", lo=0)
        _int_list(self.b, M, f"{what}.cos", lo=0)
        _int_list(self.l, N - 1, f"{what}.omega")
        _check_int(self.xi_power, f"{what}.xi")

    @classmethod
    def zero(cls, N: int) -> SUFactor:
        M = n_angles(N)
        return cls((0,) * M, (0,) * M, (0,) * M, (0,) * (N - 1), 0)


@dataclass(frozen=True)
class SpNTerm:
    """One term ``c f~(p~) e^{i m xi~} prod sin^p cos^q (y) h(p) e^{i n xi}``."""

    c: complex
    tilde: SUFactor
    p: tuple
    q: tuple
    plain: SUFactor


@dataclass(frozen=True)
class FiniteTypeSpN:
    N: int
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.N < 1:
            raise FormatError("N must be >= 1")
        for i, t in enumerate(self.terms):
            t.tilde.validate(self.N, f"terms[{i}].tilde")
            t.plain.validate(self.N, f"terms[{i}].plain")
            _int_list(t.p, self.N, f"terms[{i}].y.sin", lo=0)
            _int_list(t.q, self.N, f"terms[{i}].y.cos", allowed={0, 1})

    def angle_terms(self) -> list[AngleTerm]:
        out = []
        for t in self.terms:
            k = t.tilde.kphi + t.tilde.l + (t.tilde.xi_power,) + t.plain.kphi + t.plain.l + (t.plain.xi_power,)
            l = t.tilde.a + t.plain.a + t.p
            m = t.tilde.b + t.plain.b + t.q
            out.append(AngleTerm(complex(t.c), k, l, m))
        return out

    def layout(self) -> Layout:
        return spn_layout(self.N)

    def __call__(self, p) -> np.ndarray:
        return _eval_terms(self.layout(), _chart_order_spn(self.N, self.angle_terms()), p)


def _chart_order_spn(N: int, terms):
    # AngleTerm.l/m are stored (psi~, psi, y); chart polar order is psi~, y, psi.
    M = n_angles(N)
    perm = list(range(M)) + list(range(2 * M, 2 * M + N)) + list(range(M, 2 * M))
    return [AngleTerm(t.c, t.k, tuple(t.l[i] for i in perm), tuple(t.m[i] for i in perm)) for t in terms]


G2_TORUS_SLOTS = ("tphi1", "tomega1", "tphi2", "tomega2", "phi1", "omega1", "phi2", "omega2")
G2_POLAR_SLOTS = ("tpsi1", "tpsi2", "y1", "y2", "psi1", "psi2")


@dataclass(frozen=True)
class G2Term:
    """``c`` with 8 circle exponents ``k`` and sin/cos powers ``l``, ``m`` on
    ``(psi~1, psi~2, y1, y2, psi1, psi2)``."""

    c: complex
    k: tuple
    l: tuple
    m: tuple


@dataclass(frozen=True)
class FiniteTypeG2:
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for i, t in enumerate(self.terms):
            _int_list(t.k, 8, f"terms[{i}].k")
            _int_list(t.l, 6, f"terms[{i}].l", lo=0)
            _int_list(t.m, 6, f"terms[{i}].m", allowed={0, 1})

    def layout(self) -> Layout:
        return g2_layout()

    def angle_terms(self) -> list[AngleTerm]:
        return [AngleTerm(complex(t.c), tuple(t.k), tuple(t.l), tuple(t.m)) for t in self.terms]

    def _chart_terms(self):
        # polar slots are listed in chart order already: tpsi1, tpsi2, y1, y2, psi1, psi2
        return self.angle_terms()

    def __call__(self, p) -> np.ndarray:
        return _eval_terms(self.layout(), self._chart_terms(), p)


def _spn_cube_terms(f: FiniteTypeSpN):
    # cube order is (x~, x, xi) while chart polar order is (psi~, y, psi)
    return _chart_order_spn(f.N, f.angle_terms())


@dataclass(frozen=True)
class Lowered:
    function: AdmissibleFunction
    domain: CubeTorusDomain
    constant: float
    metadata: dict

    def weight_name(self) -> str:
        return self.metadata["weight"]


def lower_spn(f: FiniteTypeSpN) -> Lowered:
    """``f^`` with half exponents on the tilde side and the squared radial weight."""
    lay = f.layout()
    fn = _lower_terms(lay, _spn_cube_terms(f))
    meta = {
        "weight": f"spn:{f.N}",
        "weight_form": "J_SU(x~) prod 2 xi_j prod_{j>k} (xi_j^2 (1-xi_k^2) - (1-xi_j^2) xi_k^2) J_SU(x)",
        "note": "radial factor uses xi_k^2 (the substitution xi = sin y forces the square)",
        "cube": ["x~"] * n_angles(f.N) + ["x"] * n_angles(f.N) + ["xi"] * f.N,
        "admissibility": fn.max_denominator(),
    }
    return Lowered(fn, lay.domain, lay.theoretical_constant(), meta)


def lower_g2(f: FiniteTypeG2) -> Lowered:
    """``f~_G2`` with exponent map ``(k1/2, k2/4, k3/2, k4, k5/2, k6/2, k7/2, k8)``."""
    lay = f.layout()
    fn = _lower_terms(lay, f._chart_terms())
    meta = {
        "weight": "g2",
        "weight_form": "x1 x2 x3 x4 * 4 xi1 xi2 [xi1^2(16c^3+9c-24c^2) - (1-xi1^2)(3 xi2 - 4 xi2^3)^2][xi1^2 c - (1-xi1^2) xi2^2], c = 1 - xi2^2",
        "note": "x1 enters as (x1/sqrt2)^l (1 - x1^2/2)^(m/2); domain xi2 <= S(xi1)",
        "cube": ["x1", "x2", "x3", "x4", "xi1", "xi2"],
        "admissibility": fn.max_denominator(),
    }
    return Lowered(fn, lay.domain, lay.theoretical_constant(), meta)


def lower(f) -> Lowered:
    if isinstance(f, FiniteTypeSpN):
        return lower_spn(f)
    if isinstance(f, FiniteTypeG2):
        return lower_g2(f)
    raise TypeError(f"cannot lower {type(f).__name__}")


# -- random inputs -------------------------------------------------------------------------


def random_spn(rng: np.random.Generator, N: int, n_terms: int = 1, kmax: int = 2, pmax: int = 2,
               nonvanishing: bool = True) -> FiniteTypeSpN:
    """Random structured function; with ``nonvanishing`` the full-period circles carry exponent 0."""
    lay = spn_layout(N)
    M = n_angles(N)
    full = [lay.torus[i] == 1 for i in lay.angle_idx]

    def ints(n, lo, hi):
        return tuple(int(v) for v in rng.integers(lo, hi + 1, n))

    terms = []
    for _ in range(n_terms):
        k = list(ints(2 * (M + N), -kmax, kmax))
        if nonvanishing:
            k = [0 if f else v for v, f in zip(k, full)]
        nt = M + N - 1
        tilde = SUFactor(tuple(k[:M]), ints(M, 0, pmax), ints(M, 0, 1), tuple(k[M:nt]), k[nt])
        plain = SUFactor(tuple(k[nt + 1:nt + 1 + M]), ints(M, 0, pmax), ints(M, 0, 1),
                         tuple(k[nt + 1 + M:2 * nt + 1]), k[2 * nt + 1])
        c = complex(rng.standard_normal(), rng.standard_normal())
        terms.append(SpNTerm(c, tilde, ints(N, 0, pmax), ints(N, 0, 1), plain))
    return FiniteTypeSpN(N, tuple(terms))


def random_g2(rng: np.random.Generator, n_terms: int = 1, kmax: int = 2, lmax: int = 2,
              nonvanishing: bool = True, paired: bool = False) -> FiniteTypeG2:
    """Random structured G2 function.

    ``nonvanishing`` zeroes the full-period circles and makes the other
    exponents odd, so the first moment survives. ``paired`` appends, for each
    term, a partner with negated exponents, so even moments survive as well.
    """
    lay = g2_layout()
    full = [lay.torus[i] == 1 for i in lay.angle_idx]
    terms = []
    for _ in range(n_terms):
        k = [int(v) for v in rng.integers(-kmax, kmax + 1, 8)]
        if nonvanishing:
            k = [0 if f else (v if v % 2 else v + 1) for v, f in zip(k, full)]
        group = [tuple(k), tuple(-v for v in k)] if paired else [tuple(k)]
        for kk in group:
            l = tuple(int(v) for v in rng.integers(0, lmax + 1, 6))
            m = tuple(int(v) for v in rng.integers(0, 2, 6))
            terms.append(G2Term(complex(rng.standard_normal(), rng.standard_normal()), kk, l, m))
    return FiniteTypeG2(tuple(terms))


# -- verification -------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformCheck:
    P: int
    lhs: complex
    lhs_error: float
    rhs: complex
    rhs_error: float
    lhs_raw: complex
    rhs_raw: complex
    lhs_raw_error: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def joint_sigma(self) -> float:
        return math.hypot(self.lhs_error, self.rhs_error)

    @property
    def fitted_constant(self) -> complex:
        return self.lhs_raw / self.rhs_raw if self.rhs_raw != 0 else complex("nan")


def verify_transform(f, P: int, spec: QuadratureSpec, order: int = 48, threads: int = 1) -> TransformCheck:
    """Normalised ``int_G f^P dg`` through the chart versus the lowered moment.

    Both sides are divided by their own ``int 1``; the raw ratio is the
    fitted constant, to be compared with ``Layout.theoretical_constant``.
    """
    low = lower(f)
    chart = f.layout().chart
    fn = lambda p: f(p) ** P  # noqa: E731
    lhs = integrate_params(chart, fn, spec, normalize=True, threads=threads)
    raw = integrate_params(chart, fn, spec, normalize=False, threads=threads)
    cache = _moment_cache(low.domain, low.function.s_scale, order)
    rhs = moment(low.function, P, low.domain, cache)
    one = AdmissibleFunction.constant(low.function.N, low.domain.k, low.domain.l, s_scale=low.function.s_scale)
    mass = moment(one, 1, low.domain, cache)
    rhs_norm = rhs.value / mass.value.real
    rhs_err = abs(rhs_norm) * (rhs.error / max(abs(rhs.value), 1e-300) + mass.error / mass.value.real) \
        if rhs.value != 0 else rhs.error / mass.value.real
    return TransformCheck(P, complex(lhs.value), float(lhs.error), complex(rhs_norm), float(rhs_err),
                          complex(raw.value), complex(rhs.value), float(raw.error))


_CACHES: dict = {}


def _moment_cache(domain, s_scale, order) -> CubeMomentCache:
    key = (id(domain), tuple(s_scale), order)
    if key not in _CACHES:
        _CACHES[key] = CubeMomentCache(domain, s_scale, order)
    return _CACHES[key]


def spn_weight_pullback(N: int, p) -> tuple[np.ndarray, np.ndarray]:
    """``(J~(sin-coordinates) / prod cos, chart weight)`` at Sp(N) chart parameters ``p``.

    The two agree pointwise when the lowered weight is the exact pullback.
    """
    chart = spn.build_chart(N)
    p = np.asarray(p, dtype=float)
    M = n_angles(N)
    n = chart.dim
    half = (n - N) // 2
    psi_t = p[..., M:2 * M]
    y = p[..., half:half + N]
    psi = p[..., half + N + M:half + N + 2 * M]
    lhs = j_tilde_spn(N, np.sin(psi_t), np.sin(psi), np.sin(y))
    lhs = lhs * np.prod(np.cos(psi_t), axis=-1) * np.prod(np.cos(psi), axis=-1) * np.prod(np.cos(y), axis=-1)
    return lhs, chart.weight(p)


def g2_weight_pullback(y) -> tuple[np.ndarray, np.ndarray]:
    """``(J~_G2(sin y1, sin y2) cos y1 cos y2, J_G2(y))``."""
    y = np.asarray(y, dtype=float)
    return j_tilde_g2_xi(np.sin(y)) * np.cos(y[..., 0]) * np.cos(y[..., 1]), g2mod.jacobian(y)


# -- document format -------------------------------------------------------------------------


def _coeff(v, what):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise FormatError(f"{what} must be [re, im]")
    return complex(float(v[0]), float(v[1]))


def _su_factor(d, N, what) -> SUFactor:
    if not isinstance(d, dict):
        raise FormatError(f"{what} must be an object")
    M = n_angles(N)
    return SUFactor(
        _int_list(d.get("phi", [0] * M), M, f"{what}.phi"),
        _int_list(d.get("sin", [0] * M), M, f"{what}.sin", lo=0),
        _int_list(d.get("cos", [0] * M), M, f"{what}.cos", lo=0),
        _int_list(d.get("omega", [0] * (N - 1)), N - 1, f"{what}.omega"),
        _check_int(d.get("xi", 0), f"{what}.xi"),
    )


def finite_type_from_dict(doc):
    if not isinstance(doc, dict) or "group" not in doc or "terms" not in doc:
        raise FormatError("need 'group' and 'terms'")
    if doc["group"] == "g2":
        terms = []
        for i, t in enumerate(doc["terms"]):
            terms.append(G2Term(_coeff(t.get("c"), f"terms[{i}].c"),
                                _int_list(t.get("k"), 8, f"terms[{i}].k"),
                                _int_list(t.get("l", [0] * 6), 6, f"terms[{i}].l", lo=0),
                                _int_list(t.get("m", [0] * 6), 6, f"terms[{i}].m", allowed={0, 1})))
        return FiniteTypeG2(tuple(terms))
    if doc["group"] == "spn":
        N = _check_int(doc.get("N"), "N", lo=1)
        terms = []
        for i, t in enumerate(doc["terms"]):
            y = t.get("y", {})
            terms.append(SpNTerm(_coeff(t.get("c"), f"terms[{i}].c"),
                                 _su_factor(t.get("tilde", {}), N, f"terms[{i}].tilde"),
                                 _int_list(y.get("sin", [0] * N), N, f"terms[{i}].y.sin", lo=0),
                                 _int_list(y.get("cos", [0] * N), N, f"terms[{i}].y.cos", allowed={0, 1}),
                                 _su_factor(t.get("plain", {}), N, f"terms[{i}].plain")))
        return FiniteTypeSpN(N, tuple(terms))
    raise FormatError(f"unknown group {doc['group']!r}")


def finite_type_to_dict(f) -> dict:
    if isinstance(f, FiniteTypeG2):
        return {"group": "g2", "terms": [
            {"c": [t.c.real, t.c.imag], "k": list(t.k), "l": list(t.l), "m": list(t.m)} for t in f.terms]}

    def su(s: SUFactor):
        return {"phi": list(s.kphi), "sin": list(s.a), "cos": list(s.b), "omega": list(s.l), "xi": s.xi_power}

    return {"group": "spn", "N": f.N, "terms": [
        {"c": [t.c.real, t.c.imag], "tilde": su(t.tilde), "y": {"sin": list(t.p), "cos": list(t.q)},
         "plain": su(t.plain)} for t in f.terms]}


def loads_finite_type(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from exc
    return finite_type_from_dict(doc)
