"""The four solvers and the common run loop.

RMU and RCG work on the oblique manifold with ``H = A*A``; EMU-proj and
SparseMU-proj are Euclidean multiplicative updates followed by a column
l1 normalization. All of them record the simplex objective ``F`` so their
traces are directly comparable.
"""

import math
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import LineSearchFailed, NegativeEntry, ZeroColumn
from .manifold import normalize_columns, project_tangent, retract
from .methods import Method
from .metrics import flops_per_iteration
from .model import (
    GramCache,
    _check_nonneg,
    lift_to_oblique,
    split_riemannian_subgradient,
)


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rules and numerical guards shared by all methods.

    ``quartic_penalty_factor`` maps the simplex penalty ``lam`` to the
    penalty used by RMU/RCG on the oblique objective. With 0.5 the oblique
    objective is exactly half the simplex objective at ``H = A*A``.
    """

    k_max: int = 1000
    t_max: float = 5.0
    epsilon_floor: float = 1e-16
    grad_tol: float = 1e-12
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    wolfe_max_evals: int = 5
    quartic_penalty_factor: float = 0.5

    def __post_init__(self):
        if not (isinstance(self.k_max, (int, np.integer)) and self.k_max >= 1):
            raise ValueError(f"k_max must be a positive integer, got {self.k_max!r}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if not self.epsilon_floor > 0:
            raise ValueError("epsilon_floor must be positive")
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.wolfe_max_evals < 1:
            raise ValueError("wolfe_max_evals must be >= 1")


@dataclass
class SolverTrace:
    method: Method
    times: list
    values: list
    H_last: np.ndarray
    iterations: int
    converged: bool = False
    error: Optional[str] = None

    @property
    def points(self):
        return list(zip(self.times, self.values))

    @property
    def final_value(self):
        return self.values[-1]

    @property
    def initial_value(self):
        return self.values[0]


# ---------------------------------------------------------------- clocks


class WallClock:
    """``time.perf_counter`` based clock.

    Time between :meth:`tick` and :meth:`resume` (trace recording) is not
    counted.
    """

    resolution = time.get_clock_info("perf_counter").resolution

    def start(self, method, r, n):
        self._t0 = time.perf_counter()
        self._excluded = 0.0
        self._mark = None

    def tick(self):
        now = time.perf_counter()
        self._mark = now
        return now - self._t0 - self._excluded

    def resume(self):
        if self._mark is not None:
            self._excluded += time.perf_counter() - self._mark
            self._mark = None


class FlopClock:
    """Deterministic clock: each iteration costs its per-iteration FLOP count
    divided by ``flops_per_second``."""

    def __init__(self, flops_per_second=1e8):
        if not flops_per_second > 0:
            raise ValueError("flops_per_second must be positive")
        self.flops_per_second = float(flops_per_second)

    def start(self, method, r, n):
        self._cost = flops_per_iteration(method, r, n) / self.flops_per_second
        self._k = 0

    def tick(self):
        self._k += 1
        return self._k * self._cost

    def resume(self):
        pass


# ------------------------------------------------------ shared helpers


RECORD_BATCH = 512
TINY = np.finfo(float).tiny


class _GramObjective:
    """Evaluates the simplex objective from the Gram cache in O(r^2 n)."""

    def __init__(self, inst, cache):
        self.lam = inst.lam
        self.xx = float(np.vdot(inst.X, inst.X))
        self.cache = cache

    def least_squares(self, H, QH=None):
        if QH is None:
            QH = self.cache.Q @ H
        rr = self.xx - 2.0 * float(np.vdot(self.cache.P, H)) + float(np.vdot(QH, H))
        return max(rr, 0.0)

    def __call__(self, H, QH=None):
        return 0.5 * self.least_squares(H, QH) + self.lam * float(np.sqrt(H).sum())

    def batch(self, Hs):
        """Objective of each matrix in a stack of shape ``(b, r, n)``."""
        Hs = np.asarray(Hs)
        QH = self.cache.Q @ Hs
        cross = np.einsum("brn,brn->b", QH - 2.0 * self.cache.P, Hs)
        rr = np.maximum(self.xx + cross, 0.0)
        return 0.5 * rr + self.lam * np.sqrt(Hs).sum(axis=(1, 2))


def project_simplex_columns(M):
    """Scale each column to unit l1 norm (zero pattern is preserved)."""
    M = _check_nonneg(M)
    sums = M.sum(axis=0)
    bad = np.flatnonzero(~(sums > 1e-300))
    if bad.size:
        raise ZeroColumn(f"columns {bad.tolist()[:10]} are identically zero")
    return M / sums


def flush_subnormals(M):
    """Set entries below the smallest normal double to zero.

    Multiplicative updates shrink inactive entries geometrically until they
    underflow into the subnormal range, where arithmetic is many times slower
    on common hardware. Those entries are zero for every purpose here, and
    zero is a fixed point of every multiplicative update.
    """
    M[np.abs(M) < TINY] = 0.0
    return M


def quartic_instance(inst, cfg):
    return inst.with_lambda(cfg.quartic_penalty_factor * inst.lam)


# ----------------------------------------------------------------- RMU


def rmu_step(inst, cache, A, cfg=None, scale=1.0):
    """One Riemannian multiplicative update.

    ``B = A * grad_minus / grad_plus`` followed by column renormalization.
    ``inst.lam`` is used as-is as the oblique penalty; :func:`run_solver`
    applies ``quartic_penalty_factor`` before calling in.
    """
    eps = cfg.epsilon_floor if cfg is not None else 1e-16
    sg = split_riemannian_subgradient(inst, cache, A, scale=scale)
    B = A * sg.minus / np.maximum(sg.plus, eps)
    return flush_subnormals(normalize_columns(B))


# ----------------------------------------------------------------- RCG


@dataclass
class RcgState:
    A: np.ndarray
    direction: Optional[np.ndarray] = None
    prev_grad: Optional[np.ndarray] = None
    beta: float = 0.0
    value: Optional[float] = None
    alpha: float = 1.0
    converged: bool = False
    line_search_failed: bool = False


def _quartic_value_and_grad(qinst, cache, obj, A):
    H = A * A
    QH = cache.Q @ H
    value = 0.25 * obj.least_squares(H, QH) + qinst.lam * float(np.abs(A).sum())
    G = QH * A - cache.P * A + qinst.lam * np.sign(A)
    grad = project_tangent(A, G)
    return value, grad


def _grad_scale(qinst, cache, A):
    H = A * A
    return (
        float(np.linalg.norm((cache.Q @ H) * A))
        + float(np.linalg.norm(cache.P * A))
        + qinst.lam * math.sqrt(A.size)
    )


def wolfe_search(phi, f0, d0, alpha0, c1=1e-4, c2=0.9, max_evals=5):
    """Bracketing search for a weak Wolfe step.

    ``phi(alpha)`` returns ``(value, slope, payload)``. Returns
    ``(alpha, value, payload)`` for the first trial meeting both conditions.

    Raises
    ------
    LineSearchFailed
        After ``max_evals`` trials; ``best_alpha``/``best_value`` hold the
        lowest-value trial and ``payload`` attribute its payload.
    """
    lo, hi = 0.0, math.inf
    alpha = alpha0
    best = (None, math.inf, None)
    for _ in range(max_evals):
        val, slope, payload = phi(alpha)
        if val < best[1]:
            best = (alpha, val, payload)
        if not val <= f0 + c1 * alpha * d0:
            hi = alpha
        elif slope < c2 * d0:
            lo = alpha
        else:
            return alpha, val, payload
        alpha = 2.0 * lo if math.isinf(hi) else 0.5 * (lo + hi)
    err = LineSearchFailed(
        f"no Wolfe point in {max_evals} trials", best_alpha=best[0], best_value=best[1]
    )
    err.payload = best[2]
    raise err


def rcg_step(qinst, cache, state, cfg, obj=None):
    """One Riemannian conjugate-gradient iteration on the oblique objective.

    Hybrid ``beta = max(0, min(beta_DY, beta_HS))``, projection transport,
    Wolfe line search with at most ``cfg.wolfe_max_evals`` trials. If the
    search fails the lowest trial is taken provided it decreases the
    objective; otherwise the point stays put and the direction is reset.
    """
    if obj is None:
        obj = _GramObjective(qinst, cache)
    A = state.A
    if state.value is None or state.prev_grad is None:
        value, g = _quartic_value_and_grad(qinst, cache, obj, A)
    else:
        value, g = state.value, state.prev_grad

    gnorm = float(np.linalg.norm(g))
    if gnorm <= cfg.grad_tol * max(_grad_scale(qinst, cache, A), 1e-300):
        return replace(state, value=value, prev_grad=g, converged=True)

    d = state.direction if state.direction is not None else -g
    slope0 = float(np.vdot(g, d))
    if slope0 >= 0:
        d = -g
        slope0 = -gnorm**2

    def phi(alpha):
        A_new = retract(A, alpha * d)
        v, g_new = _quartic_value_and_grad(qinst, cache, obj, A_new)
        d_new = project_tangent(A_new, d)
        return v, float(np.vdot(g_new, d_new)), (A_new, g_new, d_new)

    failed = False
    try:
        alpha, v_new, (A_new, g_new, d_tr) = wolfe_search(
            phi, value, slope0, state.alpha, cfg.wolfe_c1, cfg.wolfe_c2, cfg.wolfe_max_evals
        )
    except LineSearchFailed as exc:
        failed = True
        if exc.best_value < value:
            alpha, v_new = exc.best_alpha, exc.best_value
            A_new, g_new, d_tr = exc.payload
        else:
            # no decrease anywhere: stay, restart along -g with a smaller step
            return replace(
                state,
                direction=-g,
                prev_grad=g,
                value=value,
                beta=0.0,
                alpha=0.1 * state.alpha,
                line_search_failed=True,
            )

    g_tr = project_tangent(A_new, g)
    y = g_new - g_tr
    denom = float(np.vdot(d_tr, y))
    if abs(denom) > 1e-300:
        beta_hs = float(np.vdot(g_new, y)) / denom
        beta_dy = float(np.vdot(g_new, g_new)) / denom
        beta = max(0.0, min(beta_dy, beta_hs))
    else:
        beta = 0.0
    d_next = project_tangent(A_new, -g_new + beta * d_tr)
    if float(np.vdot(d_next, -g_new)) <= 0:
        d_next = -g_new
        beta = 0.0
    return RcgState(
        A=A_new,
        direction=d_next,
        prev_grad=g_new,
        beta=beta,
        value=v_new,
        alpha=alpha,
        line_search_failed=failed,
    )


# ------------------------------------------------ Euclidean baselines


def emu_update(inst, H, cfg=None, cache=None):
    """EMU multiplicative update before projection.

    The penalty enters the denominator as the scalar
    ``lam/2 * sum_ij sqrt(H_ij)`` added to every entry of ``W^T W H``.
    """
    eps = cfg.epsilon_floor if cfg is not None else 1e-16
    cache = cache or GramCache.from_instance(inst)
    shift = 0.5 * inst.lam * float(np.sqrt(H).sum())
    return H * (cache.P / np.maximum(cache.Q @ H + shift, eps))


def sparsemu_update(inst, H, cfg=None, cache=None):
    """Sparse MU (constant penalty in the denominator) before projection."""
    eps = cfg.epsilon_floor if cfg is not None else 1e-16
    cache = cache or GramCache.from_instance(inst)
    return H * (cache.P / np.maximum(cache.Q @ H + inst.lam, eps))


def emu_step(inst, H, cfg=None, cache=None):
    return flush_subnormals(project_simplex_columns(emu_update(inst, H, cfg, cache)))


def sparsemu_step(inst, H, cfg=None, cache=None):
    return flush_subnormals(project_simplex_columns(sparsemu_update(inst, H, cfg, cache)))


# ----------------------------------------------------------- run loop


def run_solver(method, inst, H_init, cfg, cache=None, clock=None):
    """Run one method from ``H_init`` until ``k_max`` or ``t_max``.

    Returns a :class:`SolverTrace` whose first point is ``(0, F(H_init))``.
    A step error ends the run early; the trace so far is returned with
    ``error`` set.
    """
    method = Method.parse(method)
    cache = cache or GramCache.from_instance(inst)
    clock = clock if clock is not None else WallClock()
    obj = _GramObjective(inst, cache)
    m, n, r = inst.shape

    H = project_simplex_columns(H_init)
    if method in (Method.RMU, Method.RCG):
        A = lift_to_oblique(H)
        H = A * A
        qinst = quartic_instance(inst, cfg)
    times, values = [0.0], [obj(H)]

    if method is Method.RMU:
        def step():
            nonlocal A
            A = rmu_step(qinst, cache, A, cfg)
            return A * A
    elif method is Method.RCG:
        state = RcgState(A=A)
        qobj = _GramObjective(qinst, cache)
        def step():
            nonlocal state
            state = rcg_step(qinst, cache, state, cfg, obj=qobj)
            return state.A * state.A
    elif method is Method.EMU_PROJ:
        def step():
            return emu_step(inst, H, cfg, cache)
    else:
        def step():
            return sparsemu_step(inst, H, cfg, cache)

    # iterates are buffered and their objective evaluated in vectorized
    # batches; every step returns a fresh array, so no copies are needed
    pending = []

    def flush():
        if pending:
            values.extend(obj.batch(pending).tolist())
            pending.clear()

    converged = False
    error = None
    k = 0
    clock.start(method, r, n)
    while k < cfg.k_max:
        try:
            H_next = step()
        except (ZeroColumn, NegativeEntry, FloatingPointError) as exc:
            error = f"{type(exc).__name__}: {exc}"
            break
        t = clock.tick()
        if method is Method.RCG and state.converged:
            converged = True
            clock.resume()
            break
        k += 1
        H = H_next
        if t <= times[-1]:
            t = math.nextafter(times[-1], math.inf)
        times.append(t)
        pending.append(H)
        if len(pending) == RECORD_BATCH:
            flush()
        clock.resume()
        if t > cfg.t_max:
            break

    flush()
    return SolverTrace(
        method=method,
        times=times,
        values=values,
        H_last=H,
        iterations=k,
        converged=converged,
        error=error,
    )
