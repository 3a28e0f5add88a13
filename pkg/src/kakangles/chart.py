"""Parameter charts onto matrix groups."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


class RegionError(ValueError):
    """Parameters fall outside the chart's radial region."""


@dataclass(frozen=True)
class Param:
    """One chart coordinate.

    ``kind`` tells samplers how the coordinate enters the density:
    ``"angle"`` is flat, ``"sincos"`` carries a ``sin*cos`` factor and
    ``"region"`` belongs to the radial block constrained by a :class:`RegionSpec`.
    """

    name: str
    lo: float
    hi: float
    kind: str = "angle"

    @property
    def length(self) -> float:
        return self.hi - self.lo


Constraint = tuple[tuple[Fraction, ...], Fraction]


@dataclass(frozen=True)
class RegionSpec:
    """Polytope ``{y : a . y <= r * pi for every (a, r)}``.

    ``from_cube`` maps ``[0, 1]^dim`` onto the region and returns
    ``(y, jacobian)``; it is how quadrature and samplers see the region.
    """

    dim: int
    constraints: tuple[Constraint, ...]
    from_cube: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    interior_point: tuple[float, ...]

    def margins(self, y) -> np.ndarray:
        """Signed distance of ``y`` to each facet (positive inside)."""
        y = np.asarray(y, dtype=float)
        out = []
        for a, r in self.constraints:
            a_f = np.array([float(c) for c in a])
            out.append((float(r) * np.pi - y @ a_f) / np.linalg.norm(a_f))
        return np.stack(out, axis=-1)

    def contains(self, y, tol: float = 1e-12) -> np.ndarray | bool:
        return np.all(self.margins(y) >= -tol, axis=-1)

    def volume(self, order: int = 24) -> float:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        u1 = (nodes + 1) / 2
        w1 = weights / 2
        grids = np.meshgrid(*([u1] * self.dim), indexing="ij")
        u = np.stack([g.ravel() for g in grids], axis=-1)
        w = np.prod(np.stack(np.meshgrid(*([w1] * self.dim), indexing="ij")).reshape(self.dim, -1), axis=0)
        _, jac = self.from_cube(u)
        return float(np.sum(w * jac))


def ordered_chain_region(n: int, top: Fraction = Fraction(1, 2)) -> RegionSpec:
    """``0 <= y_1 <= y_2 <= ... <= y_n <= top * pi``."""
    cons: list[Constraint] = []
    zero = Fraction(0)
    e = lambda j, s: tuple(Fraction(s) if i == j else zero for i in range(n))  # noqa: E731
    cons.append((e(0, -1), zero))
    for i in range(n - 1):
        a = [zero] * n
        a[i], a[i + 1] = Fraction(1), Fraction(-1)
        cons.append((tuple(a), zero))
    cons.append((e(n - 1, 1), top))
    ymax = float(top) * np.pi

    def from_cube(u):
        u = np.asarray(u, dtype=float)
        y = np.empty_like(u)
        jac = np.full(u.shape[:-1], ymax)
        y[..., n - 1] = ymax * u[..., n - 1]
        for i in range(n - 2, -1, -1):
            y[..., i] = y[..., i + 1] * u[..., i]
            jac = jac * y[..., i + 1]
        return y, jac

    interior = tuple(ymax * (i + 1) / (n + 1) for i in range(n))
    return RegionSpec(n, tuple(cons), from_cube, interior)


@dataclass(frozen=True)
class EulerChart:
    """Named parameters plus the evaluation map and its density.

    ``evaluate`` and ``weight`` are vectorised over leading axes of the
    parameter array. ``factors`` (KAK charts only) returns the triple
    ``(x, a, k)`` whose product is ``evaluate``.
    """

    name: str
    params: tuple[Param, ...]
    evaluate: Callable[[np.ndarray], np.ndarray]
    weight: Callable[[np.ndarray], np.ndarray]
    group: object
    region: RegionSpec | None = None
    region_slice: slice | None = None
    factors: Callable | None = None

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise ValueError(f"{self.name}: expected {self.dim} parameters, got {p.shape[-1]}")
        if self.region is not None and not np.all(self.region.contains(p[..., self.region_slice], 1e-12)):
            raise RegionError(f"{self.name}: radial parameters outside region")
        return self.evaluate(p)

    @property
    def dim(self) -> int:
        return len(self.params)

    @property
    def names(self) -> list[str]:
        return [q.name for q in self.params]

    @property
    def lo(self) -> np.ndarray:
        return np.array([q.lo for q in self.params])

    @property
    def hi(self) -> np.ndarray:
        return np.array([q.hi for q in self.params])

    def box_volume(self) -> float:
        """Volume of the parameter domain (the radial block counts as its region)."""
        vol = 1.0
        for i, q in enumerate(self.params):
            if q.kind != "region":
                vol *= q.length
        if self.region is not None:
            vol *= self.region.volume()
        return vol

    def margin(self, p) -> np.ndarray:
        """Distance from ``p`` to the nearest face of the domain."""
        p = np.asarray(p, dtype=float)
        m = np.minimum(p - self.lo, self.hi - p)
        if self.region is not None:
            flat = [i for i, q in enumerate(self.params) if q.kind != "region"]
            m_box = m[..., flat].min(axis=-1) if flat else np.inf
            return np.minimum(m_box, self.region.margins(p[..., self.region_slice]).min(axis=-1))
        return m.min(axis=-1)

    def random_interior(self, rng: np.random.Generator, count: int | None = None, margin: float = 0.02):
        """Uniform-ish interior points, kept ``margin`` (relative) away from every face."""
        shape = (1 if count is None else count,)
        lo = self.lo + margin * (self.hi - self.lo)
        hi = self.hi - margin * (self.hi - self.lo)
        p = rng.uniform(lo, hi, size=shape + (self.dim,))
        if self.region is not None:
            sl = self.region_slice
            u = rng.uniform(margin, 1 - margin, size=shape + (self.region.dim,))
            p[..., sl] = self.region.from_cube(u)[0]
        return p[0] if count is None else p


def product_chart(name: str, parts: Sequence[EulerChart], group) -> EulerChart:
    """Chart whose value is the ordered product of independent sub-charts."""
    sizes = [c.dim for c in parts]
    offs = np.cumsum([0] + sizes)

    def evaluate(p):
        out = parts[0].evaluate(p[..., offs[0]:offs[1]])
        for i, c in enumerate(parts[1:], 1):
            out = out @ c.evaluate(p[..., offs[i]:offs[i + 1]])
        return out

    def weight(p):
        w = parts[0].weight(p[..., offs[0]:offs[1]])
        for i, c in enumerate(parts[1:], 1):
            w = w * c.weight(p[..., offs[i]:offs[i + 1]])
        return w

    params = tuple(q for c in parts for q in c.params)
    return EulerChart(name, params, evaluate, weight, group)
