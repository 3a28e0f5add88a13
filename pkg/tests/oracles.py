"""Reference computations that share no code with the package."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.linalg import expm as scipy_expm
from scipy.optimize import linprog


def taylor_expm(X, terms: int = 60) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    out = np.eye(X.shape[0], dtype=complex)
    term = np.eye(X.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ X / n
        out = out + term
    return out


def loop_bracket(X, Y) -> np.ndarray:
    """``XY - YX`` by explicit triple loops."""
    n = len(X)
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            s = 0j
            for k in range(n):
                s += X[i][k] * Y[k][j] - Y[i][k] * X[k][j]
            out[i, j] = s
    return out


def expm_product(*pairs) -> np.ndarray:
    """``prod exp(t X)`` through scipy."""
    out = None
    for t, X in pairs:
        E = scipy_expm(t * np.asarray(X, dtype=complex))
        out = E if out is None else out @ E
    return out


def random_skew_hermitian(rng, n: int, norm: float = 1.0) -> np.ndarray:
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = A - A.conj().T
    return norm * X / np.linalg.norm(X, 2)


def lp_zero_in_hull(points) -> bool:
    """Floating-point LP feasibility (only used on well-conditioned instances)."""
    P = np.array([[float(c) for c in p] for p in points]).T
    n = P.shape[1]
    A = np.vstack([P, np.ones((1, n))])
    b = np.concatenate([np.zeros(P.shape[0]), [1.0]])
    res = linprog(np.zeros(n), A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    return res.status == 0


def fourier_integral(q: Fraction) -> complex:
    """``int_0^{2pi} exp(i q t) dt`` in closed form."""
    if q == 0:
        return 2 * math.pi
    x = float(q)
    return (complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x)) - 1) / (1j * x)
