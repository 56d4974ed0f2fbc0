"""Multistart projected local descent over test channels.

The feasible set is the product of per-source-symbol simplices (with
forbidden reconstruction pairs pinned at zero) intersected with the two
linear distortion half-spaces.  Projection onto that intersection is
computed with Dykstra's alternating-projection scheme, which converges to
the exact Euclidean projection for closed convex sets; the stopping
tolerance is 1e-10.

The objective is any nonnegative combination of conditional mutual
informations of the form I(X; B | Y, D), where B and D are groups of
reconstruction variables and Y is one of the side informations (or
absent).  Gradients are analytic: for a term I(X;B|Y,D) the derivative
with respect to the channel entry q(a, b | x) is

    sum_y p(x, y) * (-log p(b-part | y, d-part)) + p(x) * log q(b-part | d-part, x),

with logs clipped near zero mass.  Convexity of the combined objective is
not assumed; the solver is a multistart local method whose results are
cross-checked against the enumeration oracles in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .channels import TestChannel
from .closed_form import DistortionPair
from .errors import InfeasibleBudgetError, InvalidSpecError
from .prob import DistortionMetric, JointSource

__all__ = [
    "MITerm",
    "HB_CR_TERMS",
    "DescentResult",
    "feasible_channel",
    "descent_weighted",
    "descent_hb_cr",
]

_TINY = 1e-18
_DYKSTRA_TOL = 1e-10


@dataclass(frozen=True)
class MITerm:
    """One conditional-mutual-information term I(X; B | Y, D).

    `b_axes` and `cond_axes` are subsets of (1, 2) naming the
    reconstruction variables (1 = first decoder, 2 = second decoder);
    `y_axis` is 1, 2, or None for the side information in the condition.
    """

    b_axes: tuple[int, ...]
    y_axis: int | None
    cond_axes: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.b_axes or not set(self.b_axes) <= {1, 2}:
            raise InvalidSpecError("b_axes must be a nonempty subset of (1, 2)")
        if set(self.cond_axes) & set(self.b_axes):
            raise InvalidSpecError("cond_axes must be disjoint from b_axes")
        if self.y_axis not in (None, 1, 2):
            raise InvalidSpecError("y_axis must be 1, 2 or None")


#: Terms of the broadcast CR objective I(X;Xh1|Y1) + I(X;Xh2|Y2,Xh1).
HB_CR_TERMS: tuple[MITerm, ...] = (MITerm((1,), 1), MITerm((2,), 2, (1,)))


def _entropy_bits(a: np.ndarray) -> float:
    a = a.reshape(-1)
    return float(-(a * np.log(a + (a <= 0))).sum() / math.log(2.0))


def _safe_log(a: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(a, _TINY))


def _sxy_for(source: JointSource, y_axis: int | None) -> np.ndarray:
    if y_axis == 1:
        return source.xy1_marginal()
    if y_axis == 2:
        return source.xy2_marginal()
    return source.x_marginal()[:, None]   # dummy one-symbol side axis


def _term_value_grad(source: JointSource, q: np.ndarray, term: MITerm,
                     ) -> tuple[float, np.ndarray]:
    """Value and gradient of I(X; B | Y, D) at channel q = p(a, b | x)."""
    sxy = _sxy_for(source, term.y_axis)
    px = source.x_marginal()
    t = np.einsum("xy,xab->xyab", sxy, q)      # p(x, y, a, b)
    m1 = q.sum(axis=2)                          # p(a | x)
    m2 = q.sum(axis=1)                          # p(b | x)

    b, d = set(term.b_axes), set(term.cond_axes)
    # tensor axis ids in t: x=0, y=1, a=2, b=3
    ax = {1: 2, 2: 3}
    bd_axes = tuple(sorted({1} | {ax[i] for i in b | d}))
    d_axes = tuple(sorted({1} | {ax[i] for i in d}))
    h_y = _entropy_bits_marg(t, bd_axes) - _entropy_bits_marg(t, d_axes)

    px_q = (px[:, None, None] * q)[:, None, :, :]  # axes (x, dummy-y, a, b)
    bdx = tuple(sorted({0} | {ax[i] for i in b | d}))
    dx = tuple(sorted({0} | {ax[i] for i in d}))
    h_x = _entropy_bits_marg(px_q, bdx) - _entropy_bits_marg(px_q, dx)
    value = max(0.0, h_y - h_x)

    # gradient pieces (natural log; converted to bits at the end)
    num = t.sum(axis=0)                        # p(y, a, b)
    if b == {1} and not d:
        den = num.sum(axis=(1, 2))
        c = num.sum(axis=2) / np.maximum(den[:, None], _TINY)      # p(a|y)
        g = -np.einsum("xy,ya->xa", sxy, _safe_log(c))[:, :, None]
        g = g + (px[:, None] * _safe_log(m1))[:, :, None]
    elif b == {2} and not d:
        den = num.sum(axis=(1, 2))
        c = num.sum(axis=1) / np.maximum(den[:, None], _TINY)      # p(b|y)
        g = -np.einsum("xy,yb->xb", sxy, _safe_log(c))[:, None, :]
        g = g + (px[:, None] * _safe_log(m2))[:, None, :]
    elif b == {2} and d == {1}:
        den = num.sum(axis=2, keepdims=True)
        c = num / np.maximum(den, _TINY)                           # p(b|y,a)
        g = -np.einsum("xy,yab->xab", sxy, _safe_log(c))
        g = g + px[:, None, None] * _safe_log(q / np.maximum(m1[:, :, None], _TINY))
    elif b == {1} and d == {2}:
        den = num.sum(axis=1, keepdims=True)
        c = num / np.maximum(den, _TINY)                           # p(a|y,b)
        g = -np.einsum("xy,yab->xab", sxy, _safe_log(c))
        g = g + px[:, None, None] * _safe_log(q / np.maximum(m2[:, None, :], _TINY))
    elif b == {1, 2} and not d:
        den = num.sum(axis=(1, 2), keepdims=True)
        c = num / np.maximum(den, _TINY)                           # p(a,b|y)
        g = -np.einsum("xy,yab->xab", sxy, _safe_log(c))
        g = g + px[:, None, None] * _safe_log(q)
    else:
        raise InvalidSpecError(f"unsupported term combination {term}")
    g = np.broadcast_to(g, q.shape)
    return value, np.array(g) / math.log(2.0)


def _entropy_bits_marg(t: np.ndarray, keep: tuple[int, ...]) -> float:
    drop = tuple(i for i in range(t.ndim) if i not in keep)
    m = t.sum(axis=drop) if drop else t
    return _entropy_bits(m)


class _Feasible:
    """Support-flattened feasible set with simplex and budget projections."""

    def __init__(self, source: JointSource, metric1: DistortionMetric,
                 metric2: DistortionMetric, pair: DistortionPair):
        nx = source.nx
        m1, m2 = metric1.n_outputs, metric2.n_outputs
        self.shape = (nx, m1, m2)
        px = source.x_marginal()
        allowed = (np.isfinite(metric1.matrix)[:, :, None]
                   & np.isfinite(metric2.matrix)[:, None, :])
        self.support = [np.flatnonzero(allowed[x].reshape(-1)) for x in range(nx)]
        self.offsets = np.cumsum([0] + [s.size for s in self.support])
        self.dim = int(self.offsets[-1])
        d1 = np.where(np.isfinite(metric1.matrix), metric1.matrix, 0.0)
        d2 = np.where(np.isfinite(metric2.matrix), metric2.matrix, 0.0)
        w1 = np.concatenate([
            px[x] * np.repeat(d1[x], m2)[self.support[x]] for x in range(nx)])
        w2 = np.concatenate([
            px[x] * np.tile(d2[x], m1)[self.support[x]] for x in range(nx)])
        self.halfspaces = [(w1, pair.d1), (w2, pair.d2)]

    def flatten(self, q: np.ndarray) -> np.ndarray:
        return np.concatenate([
            q[x].reshape(-1)[self.support[x]] for x in range(self.shape[0])])

    def unflatten(self, z: np.ndarray) -> np.ndarray:
        q = np.zeros(self.shape)
        for x in range(self.shape[0]):
            flat = np.zeros(self.shape[1] * self.shape[2])
            flat[self.support[x]] = z[self.offsets[x]:self.offsets[x + 1]]
            q[x] = flat.reshape(self.shape[1], self.shape[2])
        return q

    def project_simplices(self, z: np.ndarray) -> np.ndarray:
        out = np.empty_like(z)
        for x in range(self.shape[0]):
            seg = z[self.offsets[x]:self.offsets[x + 1]]
            out[self.offsets[x]:self.offsets[x + 1]] = _project_simplex(seg)
        return out

    def _violation(self, z: np.ndarray) -> float:
        return max((float(w @ z) - b for (w, b) in self.halfspaces), default=0.0)

    def project(self, z: np.ndarray, max_cycles: int = 2000) -> np.ndarray:
        """Dykstra projection onto simplices intersect budget half-spaces.

        Stops only when the iterate both settles (1e-10 cycle movement)
        and satisfies the budgets; a plain alternating-projection sweep
        acts as fallback for far-away inputs where Dykstra's correction
        increments make progress slow, so the output is always feasible.
        The simplex projector runs last, giving exact slice sums and no
        negative entries.
        """
        sets = [_halfspace_projector(w, b) for (w, b) in self.halfspaces]
        sets.append(self.project_simplices)
        incr = [np.zeros_like(z) for _ in sets]
        x = z.copy()
        for _ in range(max_cycles):
            x_prev = x.copy()
            for i, proj in enumerate(sets):
                y = proj(x + incr[i])
                incr[i] = x + incr[i] - y
                x = y
            if (np.max(np.abs(x - x_prev)) < _DYKSTRA_TOL
                    and self._violation(x) < 1e-9):
                return x
        for _ in range(max_cycles):
            for proj in sets:
                x = proj(x)
            if self._violation(x) < 1e-9:
                break
        return self.project_simplices(x)

    def feasible_start(self) -> np.ndarray:
        """LP pre-solve: a feasible point, or InfeasibleBudgetError."""
        nx = self.shape[0]
        a_eq = np.zeros((nx, self.dim))
        for x in range(nx):
            a_eq[x, self.offsets[x]:self.offsets[x + 1]] = 1.0
        a_ub = np.stack([w for (w, _) in self.halfspaces])
        b_ub = np.array([b for (_, b) in self.halfspaces])
        res = linprog(np.zeros(self.dim), A_ub=a_ub, b_ub=b_ub,
                      A_eq=a_eq, b_eq=np.ones(nx),
                      bounds=[(0.0, 1.0)] * self.dim, method="highs")
        if not res.success:
            raise InfeasibleBudgetError(
                "no channel meets the distortion budgets (LP pre-solve)")
        return np.asarray(res.x)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of v onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, v.size + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _halfspace_projector(w: np.ndarray, b: float):
    nrm2 = float(w @ w)

    def proj(z: np.ndarray) -> np.ndarray:
        viol = float(w @ z) - b
        if viol <= 0 or nrm2 == 0:
            return z
        return z - (viol / nrm2) * w

    return proj


@dataclass(frozen=True)
class DescentResult:
    rate: float
    witness: TestChannel
    restarts: int
    best_start: int   # index of the start that won (0 = init/LP start)


def _objective(source: JointSource, q: np.ndarray,
               terms: tuple[MITerm, ...], weights: np.ndarray,
               ) -> tuple[float, np.ndarray]:
    val = 0.0
    grad = np.zeros_like(q)
    for term, w in zip(terms, weights):
        if w == 0:
            continue
        v, g = _term_value_grad(source, q, term)
        val += w * v
        grad += w * g
    return val, grad


def descent_weighted(source: JointSource, metric1: DistortionMetric,
                     metric2: DistortionMetric, pair: DistortionPair,
                     terms: tuple[MITerm, ...], weights,
                     restarts: int = 8, tol: float = 1e-6, seed: int = 0,
                     init: TestChannel | None = None, max_iter: int = 300,
                     ) -> DescentResult:
    """Projected-gradient minimization of sum_i w_i I(X; B_i | Y_i, D_i).

    Deterministic for a fixed seed.  Starts from `init` (when given), the
    LP feasible point, and `restarts` random projected channels; returns
    the best local minimum with its witness.
    """
    weights = np.asarray(weights, dtype=float)
    feas = _Feasible(source, metric1, metric2, pair)
    rng = np.random.default_rng(seed)

    starts: list[np.ndarray] = []
    if init is not None:
        z = feas.flatten(init.cond)
        starts.append(feas.project(z))
    starts.append(feas.project(feas.feasible_start()))
    for _ in range(restarts):
        z = np.concatenate([
            rng.dirichlet(np.ones(s.size)) for s in feas.support])
        starts.append(feas.project(z))

    best_val = math.inf
    best_z = starts[0]
    best_start = 0
    for si, z0 in enumerate(starts):
        z = z0
        val, grad = _objective(source, feas.unflatten(z), terms, weights)
        step = 0.5
        for _ in range(max_iter):
            gz = feas.flatten(grad)
            # normalized direction keeps line-search probes near the
            # feasible set despite the clipped logs at zero-mass cells
            gz = gz / max(1.0, float(np.max(np.abs(gz))))
            improved = False
            t = step
            for _ in range(25):
                z_new = feas.project(z - t * gz)
                v_new, g_new = _objective(source, feas.unflatten(z_new),
                                          terms, weights)
                if v_new < val - 1e-15:
                    improved = True
                    break
                t *= 0.5
            if not improved:
                break
            rel = (val - v_new) / max(abs(val), 1e-12)
            z, val, grad = z_new, v_new, g_new
            step = min(max(t * 2.0, 1e-6), 1.0)
            if rel < tol:
                break
        if val < best_val - 1e-15:
            best_val, best_z, best_start = val, z, si
    witness = TestChannel(feas.unflatten(best_z))
    return DescentResult(rate=max(0.0, best_val), witness=witness,
                         restarts=restarts, best_start=best_start)


def feasible_channel(source: JointSource, metric1: DistortionMetric,
                     metric2: DistortionMetric, pair: DistortionPair,
                     ) -> TestChannel:
    """Any channel meeting the budgets, via the LP pre-solve."""
    feas = _Feasible(source, metric1, metric2, pair)
    return TestChannel(feas.unflatten(feas.project(feas.feasible_start())))


def descent_hb_cr(source: JointSource, metric1: DistortionMetric,
                  metric2: DistortionMetric, pair: DistortionPair,
                  restarts: int = 20, tol: float = 1e-6, seed: int = 0,
                  init: TestChannel | None = None) -> DescentResult:
    """Multistart descent on the broadcast CR objective."""
    return descent_weighted(source, metric1, metric2, pair,
                            HB_CR_TERMS, (1.0, 1.0), restarts=restarts,
                            tol=tol, seed=seed, init=init)
