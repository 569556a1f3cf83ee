"""Geometry of the oblique manifold OB(r, n).

Points are r x n arrays whose columns have unit l2 norm. Tangent vectors at
``A`` are arrays ``Z`` with ``diag(A^T Z) = 0``. Everything here works
column-wise, so no n x n diagonal matrix is ever formed.
"""

import numpy as np

from .errors import ZeroColumn

MANIFOLD_TOL = 1e-12
ZERO_NORM = 1e-300


def _check_shapes(A, Z):
    if A.shape != Z.shape:
        raise ValueError(f"shape mismatch: point {A.shape} vs matrix {Z.shape}")


def coldot(A, Z):
    """Column-wise inner products, i.e. the diagonal of ``A^T Z``."""
    return np.einsum("ij,ij->j", A, Z)


def is_on_manifold(M, tol=MANIFOLD_TOL):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        return False
    norms = np.linalg.norm(M, axis=0)
    return bool(np.all(np.abs(norms - 1.0) <= tol))


def project_normal(A, Z):
    """Normal component ``A diag(A^T Z)``."""
    _check_shapes(A, Z)
    return A * coldot(A, Z)


def project_tangent(A, Z):
    """Tangent component ``Z - A diag(A^T Z)``.

    Also used as the vector transport for conjugate gradient: a tangent
    vector at one point is carried to another by projecting it there.
    """
    _check_shapes(A, Z)
    return Z - A * coldot(A, Z)


def normalize_columns(M):
    """Divide each column by its l2 norm.

    Raises
    ------
    ZeroColumn
        If some column has norm below 1e-300.
    """
    M = np.asarray(M, dtype=float)
    norms = np.linalg.norm(M, axis=0)
    bad = np.flatnonzero(~(norms >= ZERO_NORM))
    if bad.size:
        raise ZeroColumn(f"columns {bad.tolist()[:10]} have zero norm")
    return M / norms


def retract(A, Z):
    """Metric retraction: normalize the columns of ``A + Z``."""
    _check_shapes(A, Z)
    return normalize_columns(A + Z)


def random_point(rng, r, n, nonnegative=False):
    """Uniformly distributed point on OB(r, n) (Gaussian columns, normalized)."""
    G = rng.standard_normal((r, n))
    if nonnegative:
        G = np.abs(G)
    return normalize_columns(G)
