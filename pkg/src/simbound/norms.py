"""Matrix norms, dual norms, rank-1 dual factorizations, and proximal operators.

Four regularizers are supported on symmetric matrices:

* ``l1``       entrywise L1, ``sum |a_kl|``
* ``fro``      Frobenius
* ``mixed21``  sum over rows of the row Euclidean norm
* ``trace``    sum of singular values (equal to ``sum |eigenvalue|`` by symmetry)

Dual norms accept arbitrary square matrices: max entry magnitude, Frobenius,
max row Euclidean norm, and the largest singular value respectively.
"""

import math
from enum import Enum

import numpy as np

from .errors import NumericalError


class NormKind(str, Enum):
    """Regularizer selector."""

    L1 = "l1"
    FROBENIUS = "fro"
    MIXED21 = "mixed21"
    TRACE = "trace"


def _as_square(b):
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {b.shape}")
    return b


def symmetrize(b):
    """Return (B + B^T) / 2, the symmetric part of a square matrix."""
    b = _as_square(b)
    return (b + b.T) / 2.0


def require_symmetric(a):
    """Return A as a float array, raising ValueError unless exactly symmetric."""
    a = _as_square(a)
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    return a


def norm(a, kind):
    """Norm of the symmetric matrix A under the selected regularizer."""
    a = require_symmetric(a)
    kind = NormKind(kind)
    if kind is NormKind.L1:
        return float(np.abs(a).sum())
    if kind is NormKind.FROBENIUS:
        return float(np.linalg.norm(a))
    if kind is NormKind.MIXED21:
        return float(np.linalg.norm(a, axis=1).sum())
    eigenvalues, _ = sym_eigendecomposition(a)
    return float(np.abs(eigenvalues).sum())


def dual_norm(b, kind):
    """Dual norm of a square (not necessarily symmetric) matrix B.

    l1 -> max entry magnitude; mixed21 -> max row Euclidean norm;
    fro -> Frobenius; trace -> spectral norm, computed as
    sqrt(largest eigenvalue of B^T B) so that no general SVD is needed.
    """
    b = _as_square(b)
    kind = NormKind(kind)
    if kind is NormKind.L1:
        return float(np.abs(b).max())
    if kind is NormKind.FROBENIUS:
        return float(np.linalg.norm(b))
    if kind is NormKind.MIXED21:
        return float(np.linalg.norm(b, axis=1).max())
    gram = symmetrize(b.T @ b)
    eigenvalues, _ = sym_eigendecomposition(gram)
    return float(math.sqrt(max(float(eigenvalues.max()), 0.0)))


def dual_norm_rank1(v, x, kind):
    """Dual norm of the rank-1 matrix v x^T without forming it.

    Closed forms: l1 -> ||v||_inf ||x||_inf; fro -> ||v|| ||x||;
    mixed21 -> ||v||_inf ||x||; trace -> ||v|| ||x|| (the spectral and
    Frobenius norms agree on rank-1 matrices).
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if v.ndim != 1 or x.ndim != 1 or v.shape != x.shape:
        raise ValueError(
            f"expected two vectors of equal length, got shapes {v.shape} and {x.shape}"
        )
    kind = NormKind(kind)
    if kind is NormKind.L1:
        return float(np.abs(v).max() * np.abs(x).max())
    if kind is NormKind.MIXED21:
        return float(np.abs(v).max() * np.linalg.norm(x))
    return float(np.linalg.norm(v) * np.linalg.norm(x))


def prox(b, tau, kind):
    """Proximal operator: argmin over A of 0.5*||A - B||_F^2 + tau*||A||.

    B must be symmetric and tau nonnegative.  The l1, fro, and trace cases
    are exact; the mixed21 case applies the row-group soft threshold and
    then symmetrizes, which keeps iterates symmetric but is only a
    heuristic for the minimizer over the symmetric subspace.
    """
    b = require_symmetric(b)
    tau = float(tau)
    if not tau >= 0.0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    kind = NormKind(kind)
    if tau == 0.0:
        return b.copy()
    if kind is NormKind.L1:
        return np.sign(b) * np.maximum(np.abs(b) - tau, 0.0)
    if kind is NormKind.FROBENIUS:
        total = np.linalg.norm(b)
        if total <= tau:
            return np.zeros_like(b)
        return b * (1.0 - tau / total)
    if kind is NormKind.MIXED21:
        row_norms = np.linalg.norm(b, axis=1)
        scale = np.where(row_norms > tau, 1.0 - tau / np.maximum(row_norms, tau), 0.0)
        return symmetrize(b * scale[:, None])
    eigenvalues, vectors = sym_eigendecomposition(b)
    thresholded = np.sign(eigenvalues) * np.maximum(np.abs(eigenvalues) - tau, 0.0)
    return symmetrize((vectors * thresholded) @ vectors.T)


def sym_eigendecomposition(a, tol=1e-13, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvector columns) with
    A = Q diag(w) Q^T.  Sweeps stop once the off-diagonal Frobenius mass
    falls below tol * ||A||_F; exceeding max_sweeps raises NumericalError,
    which signals numerically pathological input.
    """
    a = require_symmetric(a).copy()
    d = a.shape[0]
    vectors = np.eye(d)
    scale = np.linalg.norm(a)
    if d == 1 or scale == 0.0:
        return np.diag(a).copy(), vectors

    for sweep in range(max_sweeps + 1):
        strict_lower = np.tril(a, -1)
        off = math.sqrt(2.0 * float((strict_lower * strict_lower).sum()))
        if off <= tol * scale:
            break
        if sweep == max_sweeps:
            raise NumericalError(
                f"Jacobi eigendecomposition did not converge in {max_sweeps} sweeps"
            )
        for p in range(d - 1):
            for r in range(p + 1, d):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (theta + math.copysign(math.sqrt(theta * theta + 1.0), theta))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_r = a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                col_p = a[:, p].copy()
                col_r = a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                a[p, r] = 0.0
                a[r, p] = 0.0
                vec_p = vectors[:, p].copy()
                vec_r = vectors[:, r].copy()
                vectors[:, p] = c * vec_p - s * vec_r
                vectors[:, r] = s * vec_p + c * vec_r

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], vectors[:, order]
