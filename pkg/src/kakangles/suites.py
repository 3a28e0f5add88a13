"""Verification suites: each returns a :class:`SuiteReport` of residual/tolerance checks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import g2 as g2mod
from . import spn, sun
from .admissible import zero_in_hull
from .integrate import QuadratureSpec, haar_sample_sp, integrate_chart
from .kak import generic_jacobian, haar_invariance_defect, numeric_density
from .oracles import caratheodory_zero_in_hull, random_rational_points, schur_integrand, schur_targets
from .transform import (g2_weight_pullback, random_g2, random_spn, spn_weight_pullback, triple_angle_s,
                        verify_transform)

log = logging.getLogger("kakangles")

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    gated: bool = True
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        d = {"name": self.name, "residual": float(self.residual), "tolerance": float(self.tolerance),
             "passed": self.passed, "gated": self.gated}
        if self.info:
            d["info"] = self.info
        return d


@dataclass
class SuiteReport:
    group: str
    suite: str
    checks: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)
    status_override: str | None = None
    reason: str = ""

    def add(self, *args, **kw) -> Check:
        c = Check(*args, **kw)
        self.checks.append(c)
        log.info("%s %s: %s residual=%.3e tol=%.1e", self.group, self.suite, c.name, c.residual, c.tolerance)
        return c

    @property
    def status(self) -> str:
        if self.status_override:
            return self.status_override
        return PASS if all(c.passed for c in self.checks if c.gated) else FAIL

    def to_dict(self) -> dict:
        out = {"group": self.group, "suite": self.suite, "status": self.status, "budget": self.budget,
               "checks": [c.to_dict() for c in self.checks]}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class Budget:
    order: int | None = None
    samples: int | None = None
    seed: int = 0
    threads: int = 1
    P: int | None = None
    tol: float | None = None

    def spec(self, default_order: int | None, default_samples: int) -> QuadratureSpec:
        if self.samples is not None:
            return QuadratureSpec.monte_carlo(self.samples, self.seed)
        if self.order is not None:
            return QuadratureSpec.gauss_legendre(self.order)
        if default_order is not None:
            return QuadratureSpec.gauss_legendre(default_order)
        return QuadratureSpec.monte_carlo(default_samples, self.seed)

    def as_dict(self, spec: QuadratureSpec | None = None) -> dict:
        d = {"seed": self.seed, "threads": self.threads}
        if spec is not None:
            d.update({"method": spec.method, "order": spec.order if not spec.is_mc else None,
                      "samples": spec.samples if spec.is_mc else None})
        return d


def _chart(group: str, N: int | None):
    if group == "g2":
        return g2mod.build_chart()
    if group == "spn":
        return spn.build_chart(N)
    raise ValueError(f"no KAK chart for {group}")


def _cartan(group: str, N: int | None):
    return g2mod.cartan() if group == "g2" else spn.cartan(N)


def _closed_jacobian(group: str, N: int | None) -> Callable:
    return g2mod.jacobian if group == "g2" else (lambda y: spn.jacobian(N, y))


def _label(group: str, N: int | None) -> str:
    return "G2" if group == "g2" else f"{'Sp' if group == 'spn' else 'SU'}({N})"


# -- structure -------------------------------------------------------------------------


def structure_suite(group: str, N: int | None, budget: Budget) -> SuiteReport:
    rep = SuiteReport(_label(group, N), "structure", budget=budget.as_dict())
    tol = budget.tol or 1e-10
    if group == "sun":
        G = sun.su_group(N)
        rep.add("rank_deficit", float(G.dim - G.rank()), 0.0)
        rep.add("closure", G.closure_residual(), tol)
        chart = sun.build_su(N)
        p = chart.random_interior(np.random.default_rng(budget.seed), 50)
        rep.add("chart_membership", max(G.contains(g)[1] for g in chart.evaluate(p)), tol)
        return rep
    cd = _cartan(group, N)
    G = cd.group
    rep.add("rank_deficit", float(G.dim - G.rank()), 0.0)
    rep.add("closure", G.closure_residual(), tol)
    for name, r in cd.residuals().items():
        rep.add(f"cartan_{name}", r, tol)
    if group == "g2":
        rep.add("ad_lambda5_printed", float(np.abs(g2mod.ad_matrix_printed_basis(g2mod.lam(5)) - g2mod.AD5_PRINTED).max()), 0.0)
        rep.add("ad_lambda11_printed", float(np.abs(g2mod.ad_matrix_printed_basis(g2mod.lam(11)) - g2mod.AD11_PRINTED).max()), 0.0)
        expected = set(g2mod.POSITIVE_ROOTS) | {-r for r in g2mod.POSITIVE_ROOTS}
        got = g2mod.extract_roots()
        rep.add("roots_mismatch", float(len(expected ^ got)), 0.0, info={"roots": sorted(str(r) for r in got)})
        rep.add("root_spaces", max(g2mod.root_space_residual(c, ab) for _, ab, c in g2mod.ROOT_SPACES), tol)
        printed = {lab: g2mod.root_space_residual(c, ab) for lab, ab, c in g2mod.ROOT_SPACES_PRINTED}
        rep.add("root_spaces_printed", max(printed.values()), tol, gated=False,
                info={"per_vector": printed, "note": "printed table kept verbatim; see corrected root_spaces"})
    else:
        expected = set(spn.positive_roots(N))
        rep.add("roots_mismatch", float(len(expected ^ set(cd.positive_roots))), 0.0,
                info={"positive_roots": [str(r) for r in cd.positive_roots]})
    return rep


# -- jacobian ---------------------------------------------------------------------------


def jacobian_suite(group: str, N: int | None, budget: Budget, points: int = 1000, density_points: int = 100) -> SuiteReport:
    rep = SuiteReport(_label(group, N), "jacobian", budget=budget.as_dict())
    rng = np.random.default_rng(budget.seed)
    cd = _cartan(group, N)
    chart = _chart(group, N)
    J = _closed_jacobian(group, N)
    u = rng.uniform(size=(points, cd.region.dim))
    y = cd.region.from_cube(u)[0]
    rep.add("closed_vs_generic", float(np.abs(J(y) - generic_jacobian(cd, y)).max()), budget.tol or 1e-13)
    inside = y[cd.region.margins(y).min(axis=-1) > 1e-3]
    rep.add("closed_nonnegative", float(max(0.0, -J(inside).min())), 0.0)
    p = chart.random_interior(rng, density_points, margin=0.05)
    ratio = numeric_density(chart, p) / chart.weight(p)
    spread = float(ratio.std() / ratio.mean())
    rep.add("density_ratio_spread", spread, 1e-5, info={"constant": float(ratio.mean())})
    return rep


# -- haar -----------------------------------------------------------------------------------


def _random_translations(group, N, count, rng):
    chart = _chart(group, N)
    return chart.evaluate(chart.random_interior(rng, count))


def _random_k(group, N, count, rng):
    """Elements of K for the middle-insertion check (only K-valued h keep x a h k Haar distributed)."""
    if group == "g2":
        kc = g2mod.build_k_chart()
        return g2mod.k_evaluate(kc.random_interior(rng, count))
    uc = sun.build_u(N)
    return spn.k_element(uc.evaluate(uc.random_interior(rng, count)))


def _test_function(g):
    return np.abs(g[:, 0, 0]) ** 4 + g[:, 0, 1] + 0.5 * g[:, 1, 0] * np.conj(g[:, 0, 0])


def _band(res, target, spec) -> tuple[float, float]:
    """``(|value - target|, allowed)``: 3 sigma for MC, the refinement delta plus 1e-6 for quadrature."""
    diff = np.abs(np.asarray(res.value) - target)
    err = np.asarray(res.error)
    allowed = 3 * err if spec.is_mc else np.maximum(1e-6, err)
    return diff, allowed


def haar_suite(group: str, N: int | None, budget: Budget, translations: int = 5) -> SuiteReport:
    default_order = 40 if (group == "spn" and N == 1) else None
    if budget.samples == 0 or budget.order == 0:
        rep = SuiteReport(_label(group, N), "haar", budget=budget.as_dict(), status_override=INCONCLUSIVE,
                          reason="zero budget")
        return rep
    spec = budget.spec(default_order, 10 ** 5)
    rep = SuiteReport(_label(group, N), "haar", budget=budget.as_dict(spec))
    chart = _chart(group, N)
    dim = 7 if group == "g2" else 2 * N
    targets = schur_targets(dim)
    res = integrate_chart(chart, schur_integrand, spec, threads=budget.threads)
    diff, allowed = _band(res, np.array(list(targets.values())), spec)
    for (name, t), d, a, v, e in zip(targets.items(), diff, allowed, np.atleast_1d(res.value), np.atleast_1d(res.error)):
        rep.add(f"schur {name}", float(d), float(a), info={"value": [v.real, v.imag], "error": float(e), "target": t})
    if spec.is_mc and group == "g2":
        e = float(np.atleast_1d(res.error)[0])
        # the 2e-3 band target is stated for 10^6 samples; smaller budgets only report it
        rep.add("schur g00 band width (3 sigma)", 3 * e, 2e-3, gated=spec.samples >= 10 ** 6)
    rng = np.random.default_rng(budget.seed + 1)
    hs = _random_translations(group, N, translations, rng)
    sides = [("left", hs), ("right", hs)]
    if chart.factors is not None:
        sides.append(("middle", _random_k(group, N, translations, rng)))
    for side, hlist in sides:
        for i, h in enumerate(hlist):
            r = haar_invariance_defect(chart, h, _test_function, side, spec, threads=budget.threads)
            d, a = _band(r, 0.0, spec)
            rep.add(f"invariance {side} #{i}", float(d), float(a), info={"error": float(r.error)})
    if group == "spn" and N in (1, 2) and spec.is_mc:
        A = haar_sample_sp(N, spec.samples, budget.seed + 2)
        vals = schur_integrand(A)
        mean = vals.mean(axis=0)
        se = np.sqrt(np.var(vals.real, axis=0) + np.var(vals.imag, axis=0)) / math.sqrt(len(A))
        joint = np.sqrt(se ** 2 + np.atleast_1d(res.error) ** 2)
        for (name, _), m, c, j in zip(targets.items(), mean, np.atleast_1d(res.value), joint):
            rep.add(f"sampler vs chart {name}", float(abs(m - c)), float(3 * j))
    return rep


# -- transform ------------------------------------------------------------------------------


def transform_suite(group: str, N: int | None, budget: Budget, functions: int | None = None) -> SuiteReport:
    if budget.samples == 0 or budget.order == 0:
        return SuiteReport(_label(group, N), "transform", budget=budget.as_dict(), status_override=INCONCLUSIVE,
                           reason="zero budget")
    quad = group == "spn" and N == 1
    spec = budget.spec(40 if quad else None, 10 ** 5)
    rep = SuiteReport(_label(group, N), "transform", budget=budget.as_dict(spec))
    rng = np.random.default_rng(budget.seed)
    Pmax = budget.P or (3 if quad else 2)
    count = functions or (5 if group == "spn" else 2)
    fs = [random_spn(rng, N, n_terms=2) if group == "spn" else random_g2(rng, 1, lmax=1, paired=True)
          for _ in range(count)]
    theory = fs[0].layout().theoretical_constant()
    tol = budget.tol or 1e-6
    for i, f in enumerate(fs):
        for P in range(1, Pmax + 1):
            c = verify_transform(f, P, spec, threads=budget.threads)
            info = {"lhs": [c.lhs.real, c.lhs.imag], "rhs": [c.rhs.real, c.rhs.imag], "lhs_error": c.lhs_error}
            if spec.is_mc:
                rep.add(f"f{i} P={P} lhs-rhs", c.difference, 3 * c.joint_sigma + 1e-12, info=info)
            else:
                rep.add(f"f{i} P={P} lhs-rhs", c.difference, tol, info=info)
            if abs(c.rhs_raw) > 1e-12 * max(1.0, abs(c.rhs_raw)) and abs(c.rhs_raw) > 0:
                fit = c.fitted_constant
                if spec.is_mc:
                    sig = c.lhs_raw_error / abs(c.rhs_raw)
                    if abs(fit) > 3 * sig:  # only informative moments constrain the constant
                        rep.add(f"f{i} P={P} constant", abs(fit - theory), 3 * sig, info={"fitted": [fit.real, fit.imag]})
                elif abs(c.lhs_raw) > 1e-8:
                    rep.add(f"f{i} P={P} constant", abs(fit - theory) / theory, 1e-3, info={"fitted": [fit.real, fit.imag]})
    rep.budget["theoretical_constant"] = theory
    rng2 = np.random.default_rng(budget.seed + 3)
    if group == "spn":
        p = spn.build_chart(N).random_interior(rng2, 200)
        a, b = spn_weight_pullback(N, p)
        rep.add("weight_pullback", float(np.abs(a / b - 1).max()), 1e-10 if N <= 2 else 1e-7)
    else:
        y = g2mod.build_chart().random_interior(rng2, 200)[:, 6:8]
        a, b = g2_weight_pullback(y)
        rep.add("weight_pullback", float(np.abs(a / b - 1).max()), 1e-10)
        xi = np.linspace(0, 1, 1000)
        s = triple_angle_s(xi)
        rep.add("triple_angle_cubic", float(np.abs(4 * s ** 3 - 3 * s + xi).max()), 1e-14)
    return rep


# -- hull -------------------------------------------------------------------------------------


def hull_suite(group: str, N: int | None, budget: Budget, instances: int = 1000) -> SuiteReport:
    rep = SuiteReport(_label(group, N) if group else "-", "hull", budget=budget.as_dict())
    rng = np.random.default_rng(budget.seed)
    bad, inside = 0, 0
    for _ in range(instances):
        pts = random_rational_points(rng)
        a = zero_in_hull(pts)
        bad += a != caratheodory_zero_in_hull(pts)
        inside += a
    rep.add("disagreements", float(bad), 0.0, info={"instances": instances, "zero_inside": inside})
    return rep


SUITES = {
    "structure": structure_suite,
    "jacobian": jacobian_suite,
    "haar": haar_suite,
    "transform": transform_suite,
    "hull": hull_suite,
}
