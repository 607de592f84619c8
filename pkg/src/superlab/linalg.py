"""Dense LU factorisation with partial pivoting (row interchanges)."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import FactorizationError, ValidationError


@dataclass(frozen=True)
class LUFactors:
    lu: np.ndarray
    piv: np.ndarray

    def solve(self, rhs):
        b = np.ascontiguousarray(rhs, dtype=float)
        if b.shape != (self.lu.shape[0],):
            raise ValidationError(f"rhs shape {b.shape} does not match system size {self.lu.shape[0]}")
        return kernels.lu_solve(self.lu, self.piv, b)


def lu_factor(a):
    """Factor ``P a = L U``; raises :class:`FactorizationError` on a vanishing pivot.

    A pivot counts as vanishing when it is below ``n * eps * max|a|``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    n = a.shape[0]
    scale = float(np.max(np.abs(a)))
    tol = n * np.finfo(float).eps * scale if scale > 0.0 else 0.0
    lu, piv, info = kernels.lu_factor(a, tol)
    if info >= 0:
        raise FactorizationError(f"matrix is singular to working precision (pivot {info})")
    return LUFactors(lu, piv)


def lu_solve(a, rhs):
    """Solve ``a x = rhs`` by LU with partial pivoting."""
    return lu_factor(a).solve(rhs)
