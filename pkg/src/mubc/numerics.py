"""Small dense complex linear algebra for d <= ~16.

Vectors and matrices are plain ``numpy`` complex arrays. The eigenvalue
routine is a cyclic Jacobi sweep so the positivity checks do not depend on
LAPACK behaviour.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, NormalizationError, NotHermitianError

UNIT_TOL = 1e-12
HERMITIAN_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    return v


def as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_unit(v, tol: float = UNIT_TOL) -> np.ndarray:
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"vector norm {norm!r} differs from 1 by more than {tol}")
    return v


def projector(v) -> np.ndarray:
    """Rank-one projector |v><v| onto a unit vector."""
    v = check_unit(v)
    return np.outer(v, v.conj())


def trace_product(a, b) -> float:
    """tr(AB), returned as a real number.

    The imaginary part is dropped; it vanishes for Hermitian inputs.
    """
    a = as_square(a)
    b = as_square(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {b.shape}")
    # tr(AB) = sum_ij A_ij B_ji
    return float(np.real(np.sum(a * b.T)))


def hermiticity_defect(a) -> float:
    a = as_square(a)
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_square(a)
    defect = hermiticity_defect(a)
    if defect >= tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A^H| = {defect:.3e})")
    return a


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with values in descending order and the
    matching eigenvectors as columns. Sweeps stop once the off-diagonal
    Frobenius mass drops below ``tol`` (scaled by the matrix norm when that
    exceeds one).
    """
    a = check_hermitian(a).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                # negligible entries are dropped; rotating on denormals yields nan
                if mag <= 1e-20 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                cph = np.conj(apq) / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * cph, c * cph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ rot
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    vals = np.real(np.diag(a))
    order = np.argsort(vals, kind="stable")[::-1]
    return vals[order], v[:, order]


def hermitian_eigenvalues(a) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    return jacobi_eigh(a)[0]
