"""Independent reference computations used by the verification suites."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank, col = 0, 0
    ncol = len(m[0]) if m else 0
    while rank < len(m) and col < ncol:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _solve_square(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(A)
    M = [list(r) + [v] for r, v in zip(A, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * p for a, p in zip(M[i], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def caratheodory_zero_in_hull(points: Sequence[Sequence]) -> bool:
    """Brute force: 0 is in the hull iff some affinely independent subset of
    at most ``d + 1`` points has 0 as a convex combination."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    d = len(pts[0])
    for size in range(1, min(len(pts), d + 1) + 1):
        for sub in combinations(pts, size):
            lifted = [list(p) + [Fraction(1)] for p in sub]
            if _rank(lifted) < size:
                continue
            # columns are the lifted points; pick `size` independent rows of the (d+1) x size system
            rows = [[p[r] for p in sub] for r in range(d)] + [[Fraction(1)] * size]
            rhs = [Fraction(0)] * d + [Fraction(1)]
            chosen: list[int] = []
            for r in range(d + 1):
                if _rank([rows[i] for i in chosen + [r]]) > len(chosen):
                    chosen.append(r)
                if len(chosen) == size:
                    break
            t = _solve_square([rows[i] for i in chosen], [rhs[i] for i in chosen])
            if t is None or any(v < 0 for v in t):
                continue
            if all(sum(ti * c for ti, c in zip(t, row)) == v for row, v in zip(rows, rhs)):
                return True
    return False


def random_rational_points(rng: np.random.Generator, max_points: int = 8, max_dim: int = 4,
                           span: int = 3, den: int = 3) -> list[tuple[Fraction, ...]]:
    """Small random rational point sets, biased so both verdicts occur often."""
    d = int(rng.integers(1, max_dim + 1))
    n = int(rng.integers(1, max_points + 1))
    pts = []
    for _ in range(n):
        pts.append(tuple(Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, den + 1))) for _ in range(d)))
    if rng.random() < 0.4:  # push into a half space so that 0 is often outside
        pts = [tuple(abs(p[0]) + Fraction(1, den) if i == 0 else c for i, c in enumerate(p)) for p in pts]
    return pts


def schur_targets(dim: int) -> dict[str, float]:
    """``int g_ij conj(g_kl) dg = delta_ik delta_jl / dim`` for the defining representation."""
    return {"g00*conj(g00)": 1 / dim, "g01*conj(g01)": 1 / dim, "g00*conj(g11)": 0.0,
            "g00*conj(g01)": 0.0, "g00": 0.0}


def schur_integrand(g: np.ndarray) -> np.ndarray:
    """Columns in the order of :func:`schur_targets`."""
    return np.stack([
        np.abs(g[:, 0, 0]) ** 2, np.abs(g[:, 0, 1]) ** 2, g[:, 0, 0] * np.conj(g[:, 1, 1]),
        g[:, 0, 0] * np.conj(g[:, 0, 1]), g[:, 0, 0],
    ], axis=-1)
