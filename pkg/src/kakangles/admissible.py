"""Admissible functions on cube x torus: algebra, spectrum, convex hull of 0, moment scan.

A 1/N-admissible function is ``sum_m c_m(x) z^m`` with exponents in
``(1/j) Z`` for ``j <= N`` and coefficients polynomial in ``x_i`` and
``s_i = sqrt(1 - c_i x_i^2)``. The scale ``c_i`` is 1 unless a lowering
introduces a rescaled coordinate.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .integrate import CubeTorusDomain, QuadratureSpec, gl_rule, integrate_cube_torus

DEFAULT_SIZE_GUARD = 10 ** 6
PRUNE_RTOL = 1e-14
ZERO_RTOL = 1e-9

Exponents = tuple  # tuple[Fraction, ...]
Mono = tuple  # (xpow tuple[int], spow tuple[int])


class DomainError(ValueError):
    pass


class AdmissibilityError(ValueError):
    pass


class SizeGuardError(OverflowError):
    """powerExpand would exceed the term budget; fall back to pointwise evaluation."""


class FormatError(ValueError):
    """Malformed admissible-function document, with position information."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None, path: str = ""):
        where = f"line {line}, column {col}: " if line is not None else ""
        where += f"{path}: " if path else ""
        super().__init__(where + msg)
        self.line, self.col, self.path = line, col, path


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise TypeError("exponents must be exact; got a float")
    return Fraction(v)


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- coefficient polynomials ----------------------------------------------------

def _reduce_s(poly: dict, s_scale: Sequence[Fraction]) -> dict:
    """Rewrite ``s_i^2 = 1 - c_i x_i^2`` until every s-exponent is 0 or 1."""
    out: dict = defaultdict(complex)
    stack = list(poly.items())
    while stack:
        (xp, sp), c = stack.pop()
        i = next((j for j, e in enumerate(sp) if e >= 2), None)
        if i is None:
            out[(xp, sp)] += c
            continue
        sp2 = sp[:i] + (sp[i] - 2,) + sp[i + 1:]
        xp2 = xp[:i] + (xp[i] + 2,) + xp[i + 1:]
        stack.append(((xp, sp2), c))
        stack.append(((xp2, sp2), -c * float(s_scale[i])))
    return dict(out)


def _poly_mul(a: Mapping, b: Mapping, s_scale) -> dict:
    out: dict = defaultdict(complex)
    for (xa, sa), ca in a.items():
        for (xb, sb), cb in b.items():
            out[(tuple(p + q for p, q in zip(xa, xb)), tuple(p + q for p, q in zip(sa, sb)))] += ca * cb
    return _reduce_s(out, s_scale)


# -- admissible functions ---------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleFunction:
    """Canonical, immutable ``sum_m c_m(x) z^m``.

    ``terms`` maps exponent tuples (Fractions, length ``l``) to coefficient
    polynomials ``{(xpow, spow): complex}`` with ``spow`` entries in {0, 1}.
    """

    N: int
    k: int
    l: int
    terms: Mapping = field(default_factory=dict)
    s_scale: tuple = ()

    def __post_init__(self):
        if self.N < 1 or self.k < 0 or self.l < 0:
            raise AdmissibilityError("need N >= 1 and k, l >= 0")
        scale = tuple(as_fraction(c) for c in self.s_scale) or (Fraction(1),) * self.k
        if len(scale) != self.k or any(not 0 < c <= 1 for c in scale):
            raise AdmissibilityError("s_scale needs k entries in (0, 1]")
        object.__setattr__(self, "s_scale", scale)
        object.__setattr__(self, "terms", _canonical_terms(self.terms, self.k, self.l, self.N, scale))

    # construction helpers
    @classmethod
    def monomial(cls, N: int, k: int, l: int, exponents=None, xpow=None, spow=None, coeff: complex = 1.0,
                 s_scale=()) -> AdmissibleFunction:
        m = tuple(as_fraction(e) for e in (exponents or (0,) * l))
        xp = tuple(xpow or (0,) * k)
        sp = tuple(spow or (0,) * k)
        return cls(N, k, l, {m: {(xp, sp): complex(coeff)}}, s_scale)

    @classmethod
    def constant(cls, N: int, k: int, l: int, c: complex = 1.0, s_scale=()) -> AdmissibleFunction:
        return cls.monomial(N, k, l, coeff=c, s_scale=s_scale)

    def _like(self, terms, N=None) -> AdmissibleFunction:
        return AdmissibleFunction(N or self.N, self.k, self.l, terms, self.s_scale)

    def _check_compatible(self, other: AdmissibleFunction):
        if (self.k, self.l, self.s_scale) != (other.k, other.l, other.s_scale):
            raise AdmissibilityError("incompatible cube/torus shapes")

    def __add__(self, other: AdmissibleFunction) -> AdmissibleFunction:
        self._check_compatible(other)
        out: dict = defaultdict(lambda: defaultdict(complex))
        for f in (self, other):
            for m, poly in f.terms.items():
                for mono, c in poly.items():
                    out[m][mono] += c
        return self._like(out, max(self.N, other.N))

    def __mul__(self, other) -> AdmissibleFunction:
        if not isinstance(other, AdmissibleFunction):
            return self._like({m: {mono: c * complex(other) for mono, c in p.items()} for m, p in self.terms.items()})
        self._check_compatible(other)
        out: dict = defaultdict(lambda: defaultdict(complex))
        for ma, pa in self.terms.items():
            for mb, pb in other.terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                for mono, c in _poly_mul(pa, pb, self.s_scale).items():
                    out[m][mono] += c
        return self._like(out, _bound_for(out, max(self.N, other.N)))

    __rmul__ = __mul__

    @property
    def n_terms(self) -> int:
        return sum(len(p) for p in self.terms.values())

    def spectrum(self) -> frozenset:
        return frozenset(self.terms)

    def max_denominator(self) -> int:
        return max((e.denominator for m in self.terms for e in m), default=1)

    def is_admissible(self, N: int | None = None) -> bool:
        """Every exponent lies in ``(1/j) Z`` for some ``j <= N``."""
        return self.max_denominator() <= (N or self.N)

    def canonical(self) -> AdmissibleFunction:
        return self._like(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AdmissibleFunction):
            return NotImplemented
        return (self.N, self.k, self.l, self.s_scale) == (other.N, other.k, other.l, other.s_scale) and \
            _terms_key(self.terms) == _terms_key(other.terms)

    def __hash__(self):
        return hash((self.N, self.k, self.l, self.s_scale, _terms_key(self.terms)))

    # evaluation
    def evaluate(self, x, theta) -> np.ndarray:
        """``sum c_m(x) exp(i <m, theta>)`` with ``s_i >= 0``; batched over leading axes."""
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if x.shape[-1:] != (self.k,) or theta.shape[-1:] != (self.l,):
            raise DomainError(f"expected x in R^{self.k} and theta in R^{self.l}")
        if np.any((x < 0) | (x > 1)):
            raise DomainError("x outside [0, 1]")
        if np.any((theta < 0) | (theta >= 2 * np.pi)):
            raise DomainError("theta outside [0, 2pi)")
        c = np.array([float(q) for q in self.s_scale])
        s = np.sqrt(np.clip(1 - c * x * x, 0.0, None))
        batch = np.broadcast_shapes(x.shape[:-1], theta.shape[:-1])
        out = np.zeros(batch, dtype=complex)
        for m, poly in self.terms.items():
            phase = np.exp(1j * (theta @ np.array([float(e) for e in m]))) if self.l else 1.0
            val = np.zeros(batch, dtype=complex)
            for (xp, sp), coef in poly.items():
                val = val + coef * np.prod(x ** np.array(xp) * s ** np.array(sp), axis=-1)
            out = out + val * phase
        return out

    __call__ = evaluate


def _terms_key(terms):
    return tuple(sorted((m, tuple(sorted(p.items()))) for m, p in terms.items()))


def _bound_for(terms, N):
    d = max((e.denominator for m in terms for e in m), default=1)
    return max(N, d)


def _canonical_terms(terms, k, l, N, s_scale) -> dict:
    out: dict = {}
    raw: dict = {}
    for m, poly in terms.items():
        m = tuple(as_fraction(e) for e in m)
        if len(m) != l:
            raise AdmissibilityError(f"exponent vector {m} has length != l={l}")
        for e in m:
            if e.denominator > N:
                raise AdmissibilityError(f"exponent {e} not in (1/j)Z for j <= {N}")
        cleaned: dict = defaultdict(complex)
        for (xp, sp), c in dict(poly).items():
            xp, sp = tuple(int(v) for v in xp), tuple(int(v) for v in sp)
            if len(xp) != k or len(sp) != k or min(xp + sp, default=0) < 0:
                raise AdmissibilityError("monomial powers must be k nonnegative integers")
            cleaned[(xp, sp)] += complex(c)
        reduced = _reduce_s(cleaned, s_scale)
        acc = raw.setdefault(m, defaultdict(complex))
        for mono, c in reduced.items():
            acc[mono] += c
    top = max((abs(c) for p in raw.values() for c in p.values()), default=0.0)
    cut = PRUNE_RTOL * top
    for m, poly in raw.items():
        kept = {mono: c for mono, c in poly.items() if abs(c) > cut}
        if kept:
            out[m] = dict(sorted(kept.items()))
    return dict(sorted(out.items()))


def power_expand(f: AdmissibleFunction, P: int, size_guard: int = DEFAULT_SIZE_GUARD) -> AdmissibleFunction:
    """``f^P`` in canonical form; the bound ``N`` grows to cover any new denominators."""
    if P < 1:
        raise ValueError("P must be >= 1")
    result, base, e = None, f, P
    while True:
        if e & 1:
            result = base if result is None else result * base
            if result.n_terms > size_guard:
                raise SizeGuardError(f"f^{P} exceeds {size_guard} terms")
        e >>= 1
        if not e:
            return result
        base = base * base
        if base.n_terms > size_guard:
            raise SizeGuardError(f"f^{P} exceeds {size_guard} terms")


# -- exact convex hull membership ---------------------------------------------------

def zero_in_hull(points: Iterable[Sequence]) -> bool:
    """Exact decision whether 0 lies in the convex hull of rational points.

    Phase-I simplex on ``sum t_i v_i = 0, sum t_i = 1, t >= 0`` in Fractions
    with Bland's rule, so the answer never depends on rounding.
    """
    pts = [tuple(as_fraction(c) for c in p) for p in points]
    if not pts:
        raise DomainError("empty spectrum")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DomainError("points of mixed dimension")
    n = len(pts)
    rows = [[p[r] for p in pts] + [Fraction(0)] for r in range(d)] + [[Fraction(1)] * n + [Fraction(1)]]
    return _phase_one(rows, n)


def _phase_one(rows: list[list[Fraction]], n: int) -> bool:
    """Feasibility of ``A t = b, t >= 0`` (rows hold ``[A | b]``)."""
    m = len(rows)
    tab = []
    for i, r in enumerate(rows):
        r = list(r)
        if r[-1] < 0:
            r = [-v for v in r]
        tab.append(r[:n] + [Fraction(int(i == j)) for j in range(m)] + [r[-1]])
    width = n + m
    basis = list(range(n, n + m))
    # objective: minimise the sum of artificials, reduced costs w.r.t. the starting basis
    cost = [Fraction(0)] * (width + 1)
    for r in tab:
        for j in range(width + 1):
            cost[j] -= r[j]
    for j in range(n, width):
        cost[j] += 1
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i, r in enumerate(tab):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unbounded cannot happen in phase I
            break
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, tab[leave])]
        basis[leave] = enter
    return cost[-1] == 0


# -- moments ------------------------------------------------------------------------------

def torus_factor(m: Sequence[Fraction]) -> complex:
    """``prod_j int_0^{2pi} exp(i m_j theta) dtheta`` with the ``[0, 2pi)`` branch."""
    out = 1.0 + 0j
    for e in m:
        if e == 0:
            out *= 2 * np.pi
        elif e.denominator == 1:
            return 0j
        else:
            q = float(e)
            out *= (np.exp(2j * np.pi * q) - 1) / (1j * q)
    return out


class CubeMomentCache:
    """Per-block integrals ``int x^a s^b W_block`` (and of ``|.|``) by Gauss-Legendre.

    Error per integral is the order-halving delta.
    """

    def __init__(self, domain: CubeTorusDomain, s_scale: Sequence[Fraction], order: int = 48):
        self.domain = domain
        self.order = order
        self.scale = np.array([float(c) for c in s_scale])
        self._grids = {}
        self._cache: dict = {}

    def _grid(self, bi: int, order: int):
        key = (bi, order)
        if key not in self._grids:
            b = self.domain.blocks[bi]
            dim = len(b.indices)
            u1, w1 = gl_rule(order)
            mesh = np.stack(np.meshgrid(*([u1] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
            wq = np.prod(np.stack(np.meshgrid(*([w1] * dim), indexing="ij"), axis=-1).reshape(-1, dim), axis=-1)
            x, jac = b.to_domain(mesh)
            wt = wq * jac * b.weight(x)
            s = np.sqrt(np.clip(1 - self.scale[list(b.indices)] * x * x, 0.0, None))
            self._grids[key] = (x, s, wt)
        return self._grids[key]

    def block(self, bi: int, xp: tuple, sp: tuple) -> tuple[float, float, float]:
        key = (bi, xp, sp)
        if key not in self._cache:
            vals = []
            for order in (self.order, max(1, self.order // 2)):
                x, s, wt = self._grid(bi, order)
                g = np.prod(x ** np.array(xp) * s ** np.array(sp), axis=-1)
                vals.append((math.fsum(wt * g), math.fsum(np.abs(wt) * g)))
            (v, a), (vc, _) = vals
            self._cache[key] = (v, max(abs(v - vc), 64 * np.finfo(float).eps * a), a)
        return self._cache[key]

    def monomial(self, xp: tuple, sp: tuple) -> tuple[float, float, float]:
        """``(value, error, abs-value)`` of ``int x^xp s^sp W`` over the whole cube."""
        val, err, mag = 1.0, 0.0, 1.0
        for bi, b in enumerate(self.domain.blocks):
            idx = list(b.indices)
            v, e, a = self.block(bi, tuple(xp[i] for i in idx), tuple(sp[i] for i in idx))
            err = abs(val) * e + err * (abs(v) + e)
            val *= v
            mag *= a
        return val, err, mag


@dataclass(frozen=True)
class Moment:
    P: int
    value: complex
    error: float
    scale: float
    method: str

    @property
    def is_zero(self) -> bool:
        return abs(self.value) <= ZERO_RTOL * self.scale + 3 * self.error


def moment(f: AdmissibleFunction, P: int, domain: CubeTorusDomain, cache: CubeMomentCache | None = None,
           spec: QuadratureSpec | None = None, size_guard: int = DEFAULT_SIZE_GUARD) -> Moment:
    """``int f^P W dx dtheta`` by exact torus factors and cached cube integrals.

    Falls back to pointwise integration of ``f^P`` under ``spec`` when the
    expansion would exceed ``size_guard`` terms.
    """
    if (domain.k, domain.l) != (f.k, f.l):
        raise DomainError("weight domain does not match the function's shape")
    cache = cache or CubeMomentCache(domain, f.s_scale)
    try:
        g = power_expand(f, P, size_guard)
    except SizeGuardError:
        spec = spec or QuadratureSpec.monte_carlo(10 ** 5)
        r = integrate_cube_torus(lambda x, th: f.evaluate(x, th) ** P, domain, spec)
        mag = integrate_cube_torus(lambda x, th: np.abs(f.evaluate(x, th)) ** P, domain, spec)
        return Moment(P, complex(r.value), float(r.error), float(abs(mag.value)), "pointwise")
    re, im, errs, mags = [], [], [], []
    for m, poly in g.terms.items():
        T = torus_factor(m)
        Tabs = (2 * np.pi) ** f.l
        for (xp, sp), c in poly.items():
            v, e, a = cache.monomial(xp, sp)
            mags.append(abs(c) * Tabs * a)
            if T == 0:
                continue
            z = c * T * v
            re.append(z.real)
            im.append(z.imag)
            errs.append(abs(c * T) * e)
    value = complex(math.fsum(re), math.fsum(im))
    return Moment(P, value, math.fsum(errs), math.fsum(mags), "expanded")


@dataclass(frozen=True)
class ScanReport:
    moments: tuple
    zero_in_hull: bool
    status: str
    order: int

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "zero_in_hull": self.zero_in_hull,
            "order": self.order,
            "moments": [
                {"P": m.P, "value": [m.value.real, m.value.imag], "error": m.error, "scale": m.scale,
                 "zero": m.is_zero, "method": m.method}
                for m in self.moments
            ],
        }


CONSISTENT = "consistent"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"
POTENTIAL_COUNTEREXAMPLE = "potential-counterexample"


def moment_scan(f: AdmissibleFunction, domain: CubeTorusDomain, Pmax: int, order: int = 48,
                spec: QuadratureSpec | None = None, size_guard: int = DEFAULT_SIZE_GUARD) -> ScanReport:
    """Moments for ``P = 1..Pmax`` and the hull verdict.

    A scan can only falsify: all moments zero with 0 in the hull is flagged
    as a potential counterexample; nothing is ever reported as proved.
    """
    if Pmax < 1:
        raise ValueError("Pmax must be >= 1")
    cache = CubeMomentCache(domain, f.s_scale, order)
    moments = tuple(moment(f, P, domain, cache, spec, size_guard) for P in range(1, Pmax + 1))
    hull = zero_in_hull(f.spectrum()) if f.terms else True
    if not all(m.is_zero for m in moments):
        status = HYPOTHESIS_NOT_MET
    elif hull:
        status = POTENTIAL_COUNTEREXAMPLE
    else:
        status = CONSISTENT
    return ScanReport(moments, hull, status, order)


def random_admissible(rng: np.random.Generator, N: int, k: int, l: int, n_terms: int = 3, max_num: int = 4,
                      max_xpow: int = 2) -> AdmissibleFunction:
    """Random 1/N-admissible function with small exponents (for scans and property tests)."""
    terms: dict = defaultdict(dict)
    for _ in range(n_terms):
        m = tuple(Fraction(int(rng.integers(-max_num, max_num + 1)), int(rng.integers(1, N + 1))) for _ in range(l))
        mono = (tuple(int(v) for v in rng.integers(0, max_xpow + 1, k)), tuple(int(v) for v in rng.integers(0, 2, k)))
        terms[m][mono] = complex(rng.standard_normal(), rng.standard_normal())
    return AdmissibleFunction(N, k, l, terms)


# -- document format --------------------------------------------------------------------

def to_json_dict(f: AdmissibleFunction) -> dict:
    doc = {"N": f.N, "k": f.k, "l": f.l}
    if any(c != 1 for c in f.s_scale):
        doc["sscale"] = [fraction_str(c) for c in f.s_scale]
    doc["terms"] = [
        {"exponents": [fraction_str(e) for e in m],
         "poly": [{"xpow": list(xp), "spow": list(sp), "coeff": [c.real, c.imag]} for (xp, sp), c in poly.items()]}
        for m, poly in f.terms.items()
    ]
    return doc


def dumps(f: AdmissibleFunction) -> str:
    return json.dumps(to_json_dict(f), indent=2)


def _parse_fraction(s, path):
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError("exponent must be a \"p/q\" string or integer", path=path)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad fraction {s!r}", path=path) from exc


def from_json_dict(doc) -> AdmissibleFunction:
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    for key in ("N", "k", "l", "terms"):
        if key not in doc:
            raise FormatError(f"missing field {key!r}")
    for key in ("N", "k", "l"):
        if isinstance(doc[key], bool) or not isinstance(doc[key], int):
            raise FormatError("must be an integer", path=key)
    N, k, l = doc["N"], doc["k"], doc["l"]
    scale = [_parse_fraction(s, f"sscale[{i}]") for i, s in enumerate(doc.get("sscale", []))]
    terms: dict = defaultdict(lambda: defaultdict(complex))
    if not isinstance(doc["terms"], list):
        raise FormatError("must be a list", path="terms")
    for ti, t in enumerate(doc["terms"]):
        base = f"terms[{ti}]"
        if not isinstance(t, dict) or "exponents" not in t or "poly" not in t:
            raise FormatError("term needs 'exponents' and 'poly'", path=base)
        m = tuple(_parse_fraction(e, f"{base}.exponents[{i}]") for i, e in enumerate(t["exponents"]))
        for i, e in enumerate(m):
            if e.denominator > N:
                raise FormatError(f"{fraction_str(e)} is not in (1/j)Z for j <= {N}", path=f"{base}.exponents[{i}]")
        for pi, mono in enumerate(t["poly"]):
            path = f"{base}.poly[{pi}]"
            try:
                xp, sp, (re, im) = tuple(mono["xpow"]), tuple(mono["spow"]), mono["coeff"]
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError("needs xpow, spow and coeff [re, im]", path=path) from exc
            if any(v not in (0, 1) for v in sp):
                raise FormatError("spow entries must be 0 or 1", path=path)
            terms[m][(xp, sp)] += complex(float(re), float(im))
    try:
        return AdmissibleFunction(N, k, l, terms, tuple(scale))
    except AdmissibilityError as exc:
        raise FormatError(str(exc)) from exc


def loads(text: str) -> AdmissibleFunction:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from exc
    return from_json_dict(doc)
