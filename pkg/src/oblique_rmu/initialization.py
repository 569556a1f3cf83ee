"""NNSVD initialization and the penalty-balancing heuristic."""

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePenalty, RankTooLarge
from .model import quasi_norm_half


@dataclass(frozen=True)
class InitBundle:
    W_init: np.ndarray
    H_init: np.ndarray
    lam: float


def _fix_signs(U, Vt):
    """Make the first nonzero entry of every left singular vector positive."""
    U, Vt = U.copy(), Vt.copy()
    for j in range(U.shape[1]):
        nz = np.flatnonzero(U[:, j])
        if nz.size and U[nz[0], j] < 0:
            U[:, j] *= -1
            Vt[j, :] *= -1
    return U, Vt


def nnsvd_init(X, r):
    """Nonnegative double singular value decomposition (NNSVD).

    The leading singular pair gives the first component through absolute
    values. For every further pair ``(u, v)`` the positive and negative
    sections are compared by ``||u_+|| ||v_+||`` vs ``||u_-|| ||v_-||`` and the
    larger one is kept, scaled so that ``w h^T`` carries ``sigma`` times that
    product. Exact zeros are left in place.

    Returns
    -------
    W : ndarray, shape (m, r)
    H : ndarray, shape (r, n)
    """
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    if not 1 <= r <= min(m, n):
        raise RankTooLarge(f"r={r} must be in [1, min(m, n)={min(m, n)}]")
    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    U, Vt = _fix_signs(U[:, :r], Vt[:r])
    W = np.zeros((m, r))
    H = np.zeros((r, n))

    W[:, 0] = np.sqrt(S[0]) * np.abs(U[:, 0])
    H[0, :] = np.sqrt(S[0]) * np.abs(Vt[0, :])

    for j in range(1, r):
        u, v = U[:, j], Vt[j, :]
        up, un = np.maximum(u, 0), np.maximum(-u, 0)
        vp, vn = np.maximum(v, 0), np.maximum(-v, 0)
        nup, nun = np.linalg.norm(up), np.linalg.norm(un)
        nvp, nvn = np.linalg.norm(vp), np.linalg.norm(vn)
        mp, mn = nup * nvp, nun * nvn
        if mp >= mn:
            uu, vv, norm_u, norm_v, prod = up, vp, nup, nvp, mp
        else:
            uu, vv, norm_u, norm_v, prod = un, vn, nun, nvn, mn
        if prod == 0:
            continue
        scale = np.sqrt(S[j] * prod)
        W[:, j] = scale * uu / norm_u
        H[j, :] = scale * vv / norm_v
    return W, H


def feasibilize(H_raw, eps=None):
    """Floor tiny entries and rescale columns onto the unit simplex.

    With ``eps=None`` the floor is 1e-8 times the mean positive entry of
    ``H_raw``; an all-zero ``H_raw`` becomes the uniform matrix.
    """
    H = np.maximum(np.asarray(H_raw, dtype=float), 0.0)
    if eps is None:
        pos = H[H > 0]
        if pos.size == 0:
            return np.full(H.shape, 1.0 / H.shape[0])
        eps = 1e-8 * float(pos.mean())
    H = np.where(H < eps, eps, H)
    return H / H.sum(axis=0)


def select_lambda(X, W, H_init):
    """``0.5 ||X - W H||_F^2 / sum sqrt(H)``, which makes the least-squares
    and sparsity terms equal at the starting point."""
    qn = quasi_norm_half(H_init)
    if qn <= 0:
        raise DegeneratePenalty("H_init has zero quasi-norm")
    R = np.asarray(X, dtype=float) - np.asarray(W, dtype=float) @ H_init
    return 0.5 * float(np.vdot(R, R)) / qn


NNSVD_VARIANTS = ("nndsvda", "nndsvd")


def fill_zeros(H_raw, value):
    """Replace exact zeros of ``H_raw`` by ``value`` (the NNDSVDa variant
    fills with the mean entry of the data)."""
    H = np.asarray(H_raw, dtype=float)
    return np.where(H == 0, value, H)


def initialize(X, W, r, variant="nndsvda"):
    """NNSVD start point, made simplex-feasible, and the matching penalty.

    ``W`` is the fixed dictionary the solvers use; it is also the one the
    penalty is balanced against.

    ``variant="nndsvda"`` fills the exact zeros NNSVD leaves with the mean of
    ``X`` before feasibilization. ``"nndsvd"`` keeps them and relies on the
    tiny default floor of :func:`feasibilize` alone. Multiplicative methods
    can barely regrow an entry that starts near zero, so the plain variant
    tends to lock them onto the sparsity pattern of the start point.
    """
    if variant not in NNSVD_VARIANTS:
        raise ValueError(f"unknown NNSVD variant {variant!r}; use one of {NNSVD_VARIANTS}")
    W_init, H_raw = nnsvd_init(X, r)
    if variant == "nndsvda":
        H_raw = fill_zeros(H_raw, float(np.mean(X)))
    H_init = feasibilize(H_raw)
    return InitBundle(W_init=W_init, H_init=H_init, lam=select_lambda(X, W, H_init))
