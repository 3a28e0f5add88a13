"""Small dense complex matrix kernel.

Everything here works on plain ``numpy`` arrays. Matrices in this package
are at most 14x14, so the routines favour robustness over asymptotic speed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

STRUCTURAL_TOL = 1e-12
QUADRATURE_TOL = 1e-6


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible with an operation."""


def as_square(X) -> np.ndarray:
    A = np.asarray(X)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DimensionError(f"expected square matrix, got shape {A.shape}")
    return A


# Pade(13) coefficients and the matching 1-norm threshold (Higham 2005).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm(X) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    Accepts a single square matrix or a stack ``(..., n, n)``.
    """
    A = as_square(X)
    if not np.all(np.isfinite(A)):
        raise ValueError("expm: non-finite entries")
    if A.ndim > 2:
        return np.stack([expm(a) for a in A.reshape(-1, *A.shape[-2:])]).reshape(A.shape)
    A = A.astype(np.result_type(A.dtype, np.float64))
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return np.eye(n, dtype=A.dtype)
    s = 0 if norm <= _THETA13 else int(np.ceil(np.log2(norm / _THETA13)))
    A = A / 2.0**s
    b = _PADE13
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


class OneParameterSubgroup:
    """Batched ``t -> exp(t X)`` for a fixed skew-Hermitian generator ``X``.

    The generator is diagonalised once (``iX`` is Hermitian), after which any
    array of parameters is exponentiated by a diagonal phase and two products.
    """

    def __init__(self, X):
        X = as_square(X)
        if np.abs(X + X.conj().T).max() > 1e-12:
            raise ValueError("generator must be skew-Hermitian")
        evals, W = np.linalg.eigh(1j * X)
        self.generator = X
        self._evals = evals
        self._W = W
        self._Wh = W.conj().T
        self.real = bool(np.isrealobj(X) or np.abs(X.imag).max() == 0)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * t[..., None] * self._evals)
        out = (self._W * phases[..., None, :]) @ self._Wh
        return out.real.copy() if self.real else out


def bracket(X, Y) -> np.ndarray:
    X, Y = as_square(X), as_square(Y)
    if X.shape != Y.shape:
        raise DimensionError(f"bracket of {X.shape} and {Y.shape}")
    return X @ Y - Y @ X


def adjoint(X) -> np.ndarray:
    return np.swapaxes(np.conj(X), -1, -2)


def trace_form(X, Y) -> float:
    """Positive definite form ``-Re Tr(XY)`` on skew-Hermitian matrices."""
    return float(-np.trace(np.asarray(X) @ np.asarray(Y)).real)


def symplectic_form(N: int) -> np.ndarray:
    J = np.zeros((2 * N, 2 * N))
    J[:N, N:] = np.eye(N)
    J[N:, :N] = -np.eye(N)
    return J


class Kind(enum.Enum):
    UNITARY = "unitary"
    SPECIAL_UNITARY = "special-unitary"
    SYMPLECTIC = "symplectic"
    ORTHOGONAL = "orthogonal"
    IN_GROUP = "in-group"


@dataclass(frozen=True)
class MatrixPredicate:
    """Membership test with a defect residual.

    ``IN_GROUP`` predicates carry an extra ``residual_fn`` that returns the
    defect of whatever defining relation the group has beyond the base kind.
    """

    kind: Kind
    tolerance: float = STRUCTURAL_TOL
    base: Kind | None = None
    residual_fn: object = field(default=None, compare=False)

    def __post_init__(self):
        if not (0 < self.tolerance <= 1e-6):
            raise ValueError("tolerance must lie in (0, 1e-6]")


def _unitary_defect(A):
    n = A.shape[-1]
    return float(np.abs(adjoint(A) @ A - np.eye(n)).max())


def residual(pred: MatrixPredicate, A) -> float:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.all(np.isfinite(A)):
        return float("inf")
    n = A.shape[0]
    kind = pred.kind
    if kind is Kind.UNITARY:
        return _unitary_defect(A)
    if kind is Kind.SPECIAL_UNITARY:
        return max(_unitary_defect(A), float(abs(np.linalg.det(A) - 1)))
    if kind is Kind.ORTHOGONAL:
        return max(_unitary_defect(A), float(np.abs(A.imag).max()) if np.iscomplexobj(A) else 0.0)
    if kind is Kind.SYMPLECTIC:
        if n % 2:
            return float("inf")
        J = symplectic_form(n // 2)
        # J conj(A) J^T = A together with unitarity
        return max(_unitary_defect(A), float(np.abs(J @ A.conj() @ J.T - A).max()))
    if kind is Kind.IN_GROUP:
        base = MatrixPredicate(pred.base or Kind.UNITARY, pred.tolerance)
        return max(residual(base, A), float(pred.residual_fn(A)))
    raise ValueError(kind)


def check(pred: MatrixPredicate, A) -> tuple[bool, float]:
    r = residual(pred, A)
    return r <= pred.tolerance, r


UNITARY = MatrixPredicate(Kind.UNITARY)
SPECIAL_UNITARY = MatrixPredicate(Kind.SPECIAL_UNITARY)
SYMPLECTIC = MatrixPredicate(Kind.SYMPLECTIC)
ORTHOGONAL = MatrixPredicate(Kind.ORTHOGONAL)
