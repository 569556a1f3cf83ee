"""Problem data, objectives and (sub)gradients.

Two equivalent views of the same problem are kept side by side:

* the simplex view, ``F(H) = 1/2 ||X - W H||_F^2 + lam * sum_ij sqrt(H_ij)``
  with the columns of ``H`` on the unit simplex, and
* the oblique view, ``f(A) = 1/4 ||X - W (A*A)||_F^2 + lam * ||A||_1`` with
  ``A`` on OB(r, n) and ``H = A*A``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeEntry, NotOnSimplex
from .manifold import coldot, project_tangent

NEG_TOL = 1e-12
SIMPLEX_TOL = 1e-8


@dataclass(frozen=True)
class ProblemInstance:
    X: np.ndarray
    W: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        W = np.asarray(self.W, dtype=float)
        if X.ndim != 2 or W.ndim != 2 or X.shape[0] != W.shape[0]:
            raise ValueError(f"incompatible shapes X {X.shape}, W {W.shape}")
        if np.any(X < 0) or np.any(W < 0):
            raise NegativeEntry("X and W must be entrywise nonnegative")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def shape(self):
        """``(m, n, r)``."""
        return self.X.shape[0], self.X.shape[1], self.W.shape[1]

    def with_lambda(self, lam):
        return ProblemInstance(self.X, self.W, lam)


@dataclass(frozen=True)
class GramCache:
    """``Q = W^T W`` and ``P = W^T X``; computed once per run since W is fixed."""

    Q: np.ndarray
    P: np.ndarray

    @classmethod
    def from_instance(cls, inst):
        return cls(Q=inst.W.T @ inst.W, P=inst.W.T @ inst.X)


@dataclass(frozen=True)
class SplitGradient:
    """Riemannian subgradient written as ``plus - minus`` with both parts >= 0."""

    plus: np.ndarray
    minus: np.ndarray
    lambda_prime: float

    @property
    def grad(self):
        return self.plus - self.minus


def _check_nonneg(H):
    H = np.asarray(H, dtype=float)
    if np.any(H < -NEG_TOL):
        raise NegativeEntry(f"min entry {H.min():.3e} is negative")
    return np.maximum(H, 0.0)


def quasi_norm_half(H):
    """``sum_ij sqrt(H_ij)``, the l_{1/2}^{1/2} quasi-norm."""
    return float(np.sqrt(_check_nonneg(H)).sum())


def objective_nssls(inst, H):
    H = _check_nonneg(H)
    R = inst.X - inst.W @ H
    return 0.5 * float(np.vdot(R, R)) + inst.lam * float(np.sqrt(H).sum())


def objective_quartic(inst, A):
    R = inst.X - inst.W @ (A * A)
    return 0.25 * float(np.vdot(R, R)) + inst.lam * float(np.abs(A).sum())


def hadamard_square(A):
    return A * A


def lift_to_oblique(H, tol=SIMPLEX_TOL):
    """Entrywise square root of a column-stochastic ``H``.

    Raises
    ------
    NotOnSimplex
        If some column of ``H`` does not sum to one within ``tol``.
    """
    H = _check_nonneg(H)
    dev = np.abs(H.sum(axis=0) - 1.0)
    if np.any(dev > tol):
        raise NotOnSimplex(f"max column-sum deviation {dev.max():.3e}")
    return np.sqrt(H)


def sign_subgradient(A):
    # np.sign picks 0 at exact zeros, which is a valid element of [-1, 1]
    return np.sign(A)


def euclidean_subgradient(inst, cache, A, scale=1.0):
    """Subgradient of ``f`` at ``A``.

    ``scale`` multiplies the whole subgradient (least-squares part and
    penalty alike); 1 is the exact derivative of ``f``. Only tests vary it.
    """
    QAA_A = (cache.Q @ (A * A)) * A
    return scale * (QAA_A - cache.P * A + inst.lam * sign_subgradient(A))


def split_riemannian_subgradient(inst, cache, A, scale=1.0):
    """Sign-wise split of the tangent projection of the Euclidean subgradient.

    With ``Qh = (Q (A*A)) * A`` and ``Pa = P * A``::

        plus  = Qh + A diag(A^T Pa) + lam' sgn(A)
        minus = Pa + A diag(A^T Qh) + lam' A diag(A^T sgn(A))

    For nonnegative ``A``, ``X`` and ``W`` both parts are nonnegative.
    """
    QAA_A = (cache.Q @ (A * A)) * A
    PA = cache.P * A
    S = sign_subgradient(A)
    lp = scale * inst.lam
    plus = scale * (QAA_A + A * coldot(A, PA)) + lp * S
    minus = scale * (PA + A * coldot(A, QAA_A)) + lp * (A * coldot(A, S))
    return SplitGradient(plus=plus, minus=minus, lambda_prime=lp)


def riemannian_subgradient(inst, cache, A):
    return project_tangent(A, euclidean_subgradient(inst, cache, A))
