"""Seeded synthetic data: ``X = W_true H_true + sigma E``.

Everything is drawn from ``numpy.random.Generator(PCG64(seed))`` in a fixed
order: ``W_true``, ``H_true``, the zero mask, then ``E``.
"""

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb

from .errors import InfeasibleSparsity

PRNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class DatasetSpec:
    """``s`` is the fraction of zero entries in ``H_true``."""

    m: int
    n: int
    r: int
    s: float = 0.6
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n, self.r) < 1:
            raise ValueError("m, n, r must be positive")
        if self.r > min(self.m, self.n):
            raise ValueError(f"r={self.r} exceeds min(m, n)")
        if not 0 <= self.s < 1:
            raise ValueError(f"s must lie in [0, 1), got {self.s}")
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")
        target_zeros(self.r, self.n, self.s)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    W_true: np.ndarray
    H_true: np.ndarray
    E: np.ndarray
    spec: DatasetSpec


def target_zeros(r, n, fraction):
    k = int(round(fraction * r * n))
    if k > n * (r - 1):
        raise InfeasibleSparsity(
            f"{k} zeros in a {r}x{n} matrix leave some column empty"
        )
    return k


def _tilt(r, mean):
    """``theta`` such that ``p(z) ~ C(r, z) theta^z`` on ``z = 0..r-1`` has
    the given mean."""
    z = np.arange(r)
    logc = np.log(comb(r, z))

    def gap(log_theta):
        w = logc + z * log_theta
        p = np.exp(w - w.max())
        return float((z * p).sum() / p.sum()) - mean

    lo, hi = -50.0, 50.0
    while gap(lo) > 0:
        lo *= 2
    while gap(hi) < 0:
        hi *= 2
    return brentq(gap, lo, hi, xtol=1e-12)


def _column_counts(rng, r, n, k, max_tries=100_000):
    """Zero counts per column, distributed as ``prod_j C(r, z_j)`` subject to
    ``sum z_j = k`` and ``z_j <= r - 1``.

    Draw i.i.d. counts from the exponentially tilted law and keep the first
    draw whose total is exactly ``k``; conditioning removes the tilt.
    """
    if k == 0:
        return np.zeros(n, dtype=int)
    if k == n * (r - 1):
        return np.full(n, r - 1, dtype=int)
    z = np.arange(r)
    log_theta = _tilt(r, k / n)
    w = np.log(comb(r, z)) + z * log_theta
    p = np.exp(w - w.max())
    p /= p.sum()
    for _ in range(max_tries):
        counts = rng.choice(r, size=n, p=p)
        if counts.sum() == k:
            return counts
    raise RuntimeError("rejection sampler for zero counts did not terminate")


def zero_mask(rng, r, n, target_zero_fraction):
    """Boolean r x n mask with ``round(target * r * n)`` True entries, uniform
    among all such masks that leave at least one False in every column."""
    k = target_zeros(r, n, target_zero_fraction)
    counts = _column_counts(rng, r, n, k)
    ranks = np.argsort(np.argsort(rng.random((r, n)), axis=0), axis=0)
    return ranks < counts


def generate(spec):
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    m, n, r = spec.m, spec.n, spec.r
    W_true = rng.random((m, r))
    H = rng.random((r, n))
    H[zero_mask(rng, r, n, spec.s)] = 0.0
    H_true = H / H.sum(axis=0)
    E = rng.random((m, n))
    X = W_true @ H_true + spec.sigma * E
    return Dataset(X=X, W_true=W_true, H_true=H_true, E=E, spec=spec)


def export_csv(dataset, out_dir):
    """Write ``X.csv``, ``W_true.csv`` and ``H_true.csv`` (row-major,
    comma-separated, 17 significant digits)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name in ("X", "W_true", "H_true"):
        p = out / f"{name}.csv"
        np.savetxt(p, getattr(dataset, name), delimiter=",", fmt="%.17g")
        paths[name] = p
    return paths


def load_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)
