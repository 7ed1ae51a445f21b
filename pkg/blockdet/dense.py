"""Dense complex matrix arithmetic, factorizations and determinants.

Matrices are two-dimensional ``numpy.complex128`` arrays; real symmetric
inputs are the special case with zero imaginary part. Every function is pure:
inputs are never modified and results are fresh arrays.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as la

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    IndexOutOfRange,
    NotHermitian,
    NotPositiveDefinite,
    NotSquare,
)

DTYPE = np.complex128

# Relative tolerance used when no explicit Hermiticity tolerance is given.
HERMITIAN_RTOL = 1e-10

# Eigenvalues above -PSD_RTOL * (largest magnitude) count as zero.
PSD_RTOL = 1e-9

ORACLE_MAX_DIM = 8

Sign = Union[int, float, complex]


@dataclass(frozen=True)
class LogDet:
    """A determinant as sign (or unit phase) and natural log of its magnitude.

    ``sign == 0`` exactly when ``log_abs`` is ``-inf``.
    """

    sign: Sign
    log_abs: float

    def __post_init__(self):
        if (self.sign == 0) != (self.log_abs == -math.inf):
            raise ValueError(f"inconsistent LogDet(sign={self.sign!r}, log_abs={self.log_abs!r})")

    @classmethod
    def zero(cls) -> LogDet:
        return cls(0, -math.inf)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def value(self) -> complex:
        """The determinant itself; may overflow for large ``log_abs``."""
        if self.is_zero:
            return 0.0
        return self.sign * math.exp(self.log_abs)


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite two-dimensional complex matrix."""
    m = np.asarray(a, dtype=DTYPE)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=DTYPE)


def max_norm(a: np.ndarray) -> float:
    """Largest entry magnitude."""
    return float(np.max(np.abs(a)))


def is_real(a: np.ndarray) -> bool:
    return not np.any(a.imag)


def _require_square(a: np.ndarray, what: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"{what} must be square, got {a.shape[0]}x{a.shape[1]}")


def default_hermitian_tol(a: np.ndarray) -> float:
    return HERMITIAN_RTOL * (1.0 + max_norm(a))


def conjugate_transpose(a) -> np.ndarray:
    a = as_matrix(a)
    return np.ascontiguousarray(a.conj().T)


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def is_hermitian(a, tol: float = 1e-12) -> bool:
    a = as_matrix(a)
    _require_square(a)
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def symmetrize(a: np.ndarray) -> np.ndarray:
    """(a + a^H) / 2."""
    return (a + a.conj().T) / 2


def hermitian_part(a, tol: float | None = None) -> np.ndarray:
    """Check Hermiticity within ``tol`` and return the symmetrized matrix."""
    a = as_matrix(a)
    _require_square(a)
    if tol is None:
        tol = default_hermitian_tol(a)
    if not is_hermitian(a, tol):
        err = float(np.max(np.abs(a - a.conj().T)))
        raise NotHermitian(f"max |a - a^H| = {err:.3e} exceeds tolerance {tol:.3e}")
    return symmetrize(a)


def is_psd(a, rtol: float = PSD_RTOL) -> bool:
    h = hermitian_part(a)
    w = la.eigvalsh(h, check_finite=False)
    return bool(w[0] >= -rtol * float(np.max(np.abs(w))))


def cholesky(a, shift: float = 0.0, tol: float | None = None) -> np.ndarray:
    """Lower-triangular L with ``a + shift*I == L @ L^H``.

    Raises NotPositiveDefinite when a pivot is not strictly positive.
    """
    h = hermitian_part(a, tol)
    if shift:
        h = h + shift * identity(h.shape[0])
    try:
        factor = la.cholesky(h, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(f"{h.shape[0]}x{h.shape[0]} matrix is not positive definite: {exc}") from None
    if not np.all(factor.diagonal().real > 0.0):
        raise NotPositiveDefinite("Cholesky produced a non-positive pivot")
    return factor


def log_det_pd(a) -> LogDet:
    """log det of a Hermitian positive definite matrix via Cholesky."""
    factor = cholesky(a)
    log_abs = 2.0 * math.fsum(np.log(factor.diagonal().real))
    return LogDet(1, log_abs)


def det_lu(a) -> LogDet:
    """Determinant by LU with partial pivoting (LAPACK getrf).

    The sign tracks row interchanges and, for complex input, pivot phases.
    Real input yields a real sign in {-1, 0, +1}.
    """
    a = as_matrix(a)
    _require_square(a)
    work = a.real.copy() if is_real(a) else a.copy()
    with warnings.catch_warnings():
        # getrf reports an exactly-zero pivot as a warning, handled below
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(work, check_finite=False)
    pivots = lu.diagonal()
    if np.any(pivots == 0):
        return LogDet.zero()
    swaps = int(np.count_nonzero(piv != np.arange(piv.shape[0])))
    magnitudes = np.abs(pivots)
    log_abs = math.fsum(np.log(magnitudes))
    if np.iscomplexobj(pivots):
        phase = complex(np.prod(pivots / magnitudes))
        phase /= abs(phase)
        sign: Sign = -phase if swaps % 2 else phase
    else:
        negatives = int(np.count_nonzero(pivots < 0))
        sign = -1 if (swaps + negatives) % 2 else 1
    return LogDet(sign, log_abs)


def _cofactor_det(rows: list) -> complex:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0j
    for j in range(n):
        entry = rows[0][j]
        if entry == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = entry * _cofactor_det(minor)
        total = total - term if j % 2 else total + term
    return total


def det_cofactor_oracle(a) -> LogDet:
    """Brute-force determinant by recursive cofactor expansion.

    Reference implementation for tests; O(n!) so capped at dimension 8.
    """
    a = as_matrix(a)
    _require_square(a)
    n = a.shape[0]
    if n > ORACLE_MAX_DIM:
        raise DimensionTooLarge(f"cofactor oracle accepts dimension <= {ORACLE_MAX_DIM}, got {n}")
    real = is_real(a)
    rows = [[complex(x) for x in row] for row in a.tolist()]
    det = _cofactor_det(rows)
    if det == 0:
        return LogDet.zero()
    log_abs = math.log(abs(det))
    if real:
        return LogDet(1 if det.real > 0 else -1, log_abs)
    return LogDet(cmath.exp(1j * cmath.phase(det)), log_abs)


def kronecker(a, b) -> np.ndarray:
    """A (x) B = [a_ij * B]."""
    return np.kron(as_matrix(a), as_matrix(b))


def hadamard(a, b) -> np.ndarray:
    """Entrywise product of equally shaped matrices."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Hadamard product needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def leading_principal(a, k: int) -> np.ndarray:
    """Top-left k x k submatrix A_k."""
    a = as_matrix(a)
    _require_square(a)
    if not 1 <= k <= a.shape[0]:
        raise IndexOutOfRange(f"leading principal order {k} outside 1..{a.shape[0]}")
    return a[:k, :k].copy()
