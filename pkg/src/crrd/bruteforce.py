"""Brute-force upper bounds for the relaxed (auxiliary-variable) problems.

These solvers minimize the same conditional-mutual-information objectives
as the common-reconstruction oracles, but over auxiliary channels
p(u | x) or p(u1, u2 | x) combined with deterministic decoder maps
xhat(u, y), and, for constrained reconstruction, encoder maps
xhat_e(u, x).  They are meant for tiny instances: the channel is swept
over a simplex grid and the maps are optimized per channel.

For the plain relaxations the decoder maps enter only through the
distortion budgets, and each budget involves one map alone, so the best
map is found cell by cell: for every (u, y) pick the reconstruction
minimizing the posterior-weighted distortion.  That pointwise choice is
exact, which collapses the map enumeration entirely.  Under constrained
reconstruction the encoder-side budget couples a decoder map's cells
across y, so decoder maps are enumerated exhaustively up to `map_budget`
combinations per decoder (the encoder map is again pointwise-exact given
the decoder map); beyond the budget a reduced candidate set is used and
the result is flagged heuristic.

Because every grid channel of the matching common-reconstruction oracle
reappears here (take u = xhat and identity maps), these values never
exceed the CR oracle at the same step, which the test suite checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channels import ConRConstraint
from .closed_form import DistortionPair
from .errors import GuardExceededError, InfeasibleBudgetError, InvalidSpecError, \
    ShapeMismatchError
from .gridsearch import POINT_GUARD_DEFAULT, _enumerate_feasible, _HbObjective, \
    _PointObjective, _Slice, _neg_plogp_rows, _step_units, simplex_grid
from .prob import DistortionMetric, FinitePmf, JointSource

__all__ = [
    "ConRResult",
    "brute_force_wz",
    "brute_force_hb_nocr",
    "brute_force_conr",
]

_SLACK = 1e-12


def _u_slices(nx: int, n_cells: int, k: int, guard: int) -> list[_Slice]:
    count = math.comb(k + n_cells - 1, n_cells - 1)
    if count ** nx > guard:
        raise GuardExceededError(
            f"auxiliary grid has {count ** nx} channels, guard is {guard}",
            count ** nx, guard)
    rows = simplex_grid(k, n_cells).astype(np.float64) / k
    s = _Slice(cells=np.arange(n_cells), rows=rows, padded=rows,
               costs=np.zeros((0, rows.shape[0])), h_row=_neg_plogp_rows(rows))
    return [s] * nx


def _map_free_distortion(p_xy: np.ndarray, metric: DistortionMetric) -> float:
    """Best E[d] when the decoder sees only y (no message at all)."""
    fin = np.isfinite(metric.matrix)
    d0 = np.where(fin, metric.matrix, 0.0)
    total = 0.0
    for y in range(p_xy.shape[1]):
        w = p_xy[:, y]
        if w.sum() <= 0:
            continue
        cost = w @ d0
        bad = (w @ (~fin).astype(float)) > 1e-15
        cost = np.where(bad, np.inf, cost)
        total += cost.min()
    return float(total)


def _min_decoder_distortion(p_xy: np.ndarray, m_u: list[np.ndarray],
                            idx: tuple[np.ndarray, ...],
                            metric: DistortionMetric) -> np.ndarray:
    """Vector over the batch of min_map E[d(X, xhat(U,Y))].

    m_u[x] is the (N, |U|) marginal of the auxiliary for slice x; the best
    map picks, for each (u, y), the reconstruction minimizing the
    posterior-weighted distortion, which is exact because the budget is a
    sum of independent (u, y) cells.
    """
    nx, ny = p_xy.shape
    nu = m_u[0].shape[1]
    fin = np.isfinite(metric.matrix)
    d0 = np.where(fin, metric.matrix, 0.0)
    bad = (~fin).astype(float)
    out = np.zeros(idx[0].size)
    for u in range(nu):
        for y in range(ny):
            cost = None
            badw = None
            for x in range(nx):
                if p_xy[x, y] <= 0:
                    continue
                w = p_xy[x, y] * m_u[x][idx[x], u]   # (B,)
                c = w[:, None] * d0[x][None, :]
                b = w[:, None] * bad[x][None, :]
                cost = c if cost is None else cost + c
                badw = b if badw is None else badw + b
            if cost is None:
                continue
            cost = np.where(badw > 1e-15, np.inf, cost)
            out += cost.min(axis=1)
    return out


def brute_force_wz(pair_pmf: FinitePmf, metric: DistortionMetric, d: float,
                   u_cap: int, step: float,
                   guard: int = POINT_GUARD_DEFAULT) -> float:
    """Grid upper bound on min I(X;U|Y) with a decoder map xhat(u, y).

    Tiny instances only; `u_cap` bounds the auxiliary alphabet.
    """
    if pair_pmf.ndim != 2:
        raise InvalidSpecError("need a 2-axis joint p(x,y)")
    if u_cap < 1:
        raise InvalidSpecError("u_cap must be >= 1")
    p_xy = pair_pmf.mass
    nx = p_xy.shape[0]
    if metric.n_inputs != nx:
        raise ShapeMismatchError("metric rows must equal |X|")
    if _map_free_distortion(p_xy, metric) <= d + _SLACK:
        return 0.0
    k = _step_units(step)
    slices = _u_slices(nx, u_cap, k, guard)
    rows = [s.padded for s in slices]
    objective = _PointObjective(p_xy, slices)
    best = math.inf

    def visit(idx: tuple[np.ndarray, ...]) -> None:
        nonlocal best
        ed = _min_decoder_distortion(p_xy, rows, idx, metric)
        ok = np.flatnonzero(ed <= d + _SLACK + _SLACK * abs(d))
        if ok.size == 0:
            return
        sub = tuple(col[ok] for col in idx)
        best = min(best, float(objective.eval(sub).min()))

    _enumerate_feasible(slices, np.zeros(0), visit)
    if not math.isfinite(best):
        raise InfeasibleBudgetError(f"no auxiliary grid channel meets E[d] <= {d}")
    return max(0.0, best)


def brute_force_hb_nocr(source: JointSource, metric1: DistortionMetric,
                        metric2: DistortionMetric, pair: DistortionPair,
                        u_caps: tuple[int, int] = (2, 2), step: float = 0.1,
                        guard: int = POINT_GUARD_DEFAULT) -> float:
    """Grid upper bound on the two-decoder rate without the CR constraint.

    Minimizes I(X;U1|Y1) + I(X;U2|Y2,U1) over grid channels p(u1,u2|x)
    with decoder maps xhat_j(u_j, y_j) chosen optimally per channel.
    """
    nu1, nu2 = u_caps
    if nu1 < 1 or nu2 < 1:
        raise InvalidSpecError("auxiliary caps must be >= 1")
    p_xy1 = source.xy1_marginal()
    p_xy2 = source.xy2_marginal()
    if (_map_free_distortion(p_xy1, metric1) <= pair.d1 + _SLACK
            and _map_free_distortion(p_xy2, metric2) <= pair.d2 + _SLACK):
        return 0.0
    k = _step_units(step)
    slices = _u_slices(source.nx, nu1 * nu2, k, guard)
    m1_rows = [s.padded.reshape(s.n, nu1, nu2).sum(axis=2) for s in slices]
    m2_rows = [s.padded.reshape(s.n, nu1, nu2).sum(axis=1) for s in slices]
    objective = _HbObjective(source, slices, nu1, nu2)
    best = math.inf

    def visit(idx: tuple[np.ndarray, ...]) -> None:
        nonlocal best
        ed1 = _min_decoder_distortion(p_xy1, m1_rows, idx, metric1)
        ok = ed1 <= pair.d1 + _SLACK + _SLACK * abs(pair.d1)
        if not ok.any():
            return
        sub = tuple(col[ok] for col in idx)
        ed2 = _min_decoder_distortion(p_xy2, m2_rows, sub, metric2)
        ok2 = ed2 <= pair.d2 + _SLACK + _SLACK * abs(pair.d2)
        if not ok2.any():
            return
        sub = tuple(col[ok2] for col in sub)
        best = min(best, float(objective.eval(sub).min()))

    _enumerate_feasible(slices, np.zeros(0), visit)
    if not math.isfinite(best):
        raise InfeasibleBudgetError(f"no auxiliary grid channel meets budgets {pair}")
    return max(0.0, best)


@dataclass(frozen=True)
class ConRResult:
    """Rate bound plus honesty metadata for the ConR solver."""

    rate: float
    heuristic: bool
    u_caps: tuple[int, int]
    map_counts: tuple[int, int]


def _decoder_maps(nu: int, ny: int, m: int, budget: int) -> tuple[np.ndarray, bool]:
    """All maps (u, y) -> xhat as an (M, nu, ny) int array, or a reduced
    candidate set (maps constant in y, plus maps constant in u) when the
    full count exceeds `budget`."""
    full = m ** (nu * ny)
    if full <= budget:
        maps = np.array(list(itertools.product(range(m), repeat=nu * ny)),
                        dtype=np.int64).reshape(full, nu, ny)
        return maps, False
    cands = set()
    for combo in itertools.product(range(m), repeat=nu):
        cands.add(tuple(np.repeat(combo, ny)))
    for combo in itertools.product(range(m), repeat=ny):
        cands.add(tuple(np.tile(combo, nu)))
    maps = np.array(sorted(cands), dtype=np.int64).reshape(-1, nu, ny)
    return maps, True


def _conr_cost_tables(maps: np.ndarray, p_xy: np.ndarray, px: np.ndarray,
                      metric: DistortionMetric, metric_e: DistortionMetric,
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Per-map budget tables.

    Returns (cd, ce), both (M, nu, nx): cd[m,u,x] is the decoder-distortion
    contribution sum_y p(x,y) d(x, map[m,u,y]); ce[m,u,x] is the best
    encoder-side contribution p(x) min_v sum_y p(y|x) d_e(map[m,u,y], v).
    Entries are +inf where a forbidden pair is hit with positive weight.
    """
    n_maps, nu, ny = maps.shape
    nx = p_xy.shape[0]
    p_y_given_x = p_xy / np.where(px[:, None] > 0, px[:, None], 1.0)
    big = 1e30  # finite sentinel for forbidden hits; keeps 0-mass cells exact

    fin_d = np.isfinite(metric.matrix)
    d0 = np.where(fin_d, metric.matrix, 0.0)
    cd = np.zeros((n_maps, nu, nx))
    bad = np.zeros((n_maps, nu, nx))
    for y in range(ny):
        sel = maps[:, :, y]                      # (M, nu)
        for x in range(nx):
            if p_xy[x, y] <= 0:
                continue
            cd[:, :, x] += p_xy[x, y] * d0[x][sel]
            bad[:, :, x] += p_xy[x, y] * (~fin_d)[x][sel]
    cd = np.where(bad > 1e-15, big, cd)

    fin_e = np.isfinite(metric_e.matrix)
    e0 = np.where(fin_e, metric_e.matrix, 0.0)
    n_out = metric_e.n_outputs
    ce = np.zeros((n_maps, nu, nx))
    for x in range(nx):
        acc = np.zeros((n_maps, nu, n_out))
        badv = np.zeros((n_maps, nu, n_out))
        for y in range(ny):
            w = p_y_given_x[x, y]
            if w <= 0:
                continue
            sel = maps[:, :, y]
            acc += w * e0[sel]                   # (M, nu, n_out)
            badv += w * (~fin_e)[sel]
        acc = np.where(badv > 1e-15, big, acc)
        ce[:, :, x] = px[x] * acc.min(axis=2)
    return cd, ce


def brute_force_conr(source: JointSource, metric1: DistortionMetric,
                     metric2: DistortionMetric, pair: DistortionPair,
                     conr: ConRConstraint, u_caps: tuple[int, int] = (2, 2),
                     step: float = 0.05, map_budget: int = 1_000_000,
                     guard: int = POINT_GUARD_DEFAULT) -> ConRResult:
    """Grid upper bound on the two-decoder rate with constrained
    reconstruction at the encoder.

    Same objective and channel grid as `brute_force_hb_nocr`, but a
    channel is feasible only if some decoder map meets the decoder budget
    while also allowing an encoder map within the encoder-side budget.
    `u_caps` below the exactness cardinalities makes this an upper bound
    whose tightness is the caller's responsibility to document.
    """
    nu1, nu2 = u_caps
    if nu1 < 1 or nu2 < 1:
        raise InvalidSpecError("auxiliary caps must be >= 1")
    if conr.metric_e1.n_inputs != metric1.n_outputs:
        raise ShapeMismatchError("metric_e1 must act on the first reconstruction alphabet")
    if conr.metric_e2.n_inputs != metric2.n_outputs:
        raise ShapeMismatchError("metric_e2 must act on the second reconstruction alphabet")
    k = _step_units(step)
    px = source.x_marginal()
    p_xy1 = source.xy1_marginal()
    p_xy2 = source.xy2_marginal()
    slices = _u_slices(source.nx, nu1 * nu2, k, guard)
    m1_rows = [s.padded.reshape(s.n, nu1, nu2).sum(axis=2) for s in slices]
    m2_rows = [s.padded.reshape(s.n, nu1, nu2).sum(axis=1) for s in slices]

    maps1, heur1 = _decoder_maps(nu1, source.ny1, metric1.n_outputs, map_budget)
    maps2, heur2 = _decoder_maps(nu2, source.ny2, metric2.n_outputs, map_budget)
    cd1, ce1 = _conr_cost_tables(maps1, p_xy1, px, metric1, conr.metric_e1)
    cd2, ce2 = _conr_cost_tables(maps2, p_xy2, px, metric2, conr.metric_e2)

    objective = _HbObjective(source, slices, nu1, nu2)
    best = math.inf

    def side_feasible(m_rows: list[np.ndarray], idx, cd, ce, d_budget, e_budget):
        """(B,) bool: some decoder map meets both budgets."""
        b = idx[0].size
        mu = np.stack([m_rows[x][idx[x]] for x in range(source.nx)], axis=2)  # (B, nu, nx)
        # pointwise-over-maps relaxation prunes before the exact scan
        lb_d = np.einsum("bux,ux->b", mu, cd.min(axis=0))
        lb_e = np.einsum("bux,ux->b", mu, ce.min(axis=0))
        cand = (lb_d <= d_budget + _SLACK) & (lb_e <= e_budget + _SLACK)
        out = np.zeros(b, dtype=bool)
        live = np.flatnonzero(cand)
        if live.size == 0:
            return out
        mu_live = mu[live]
        undecided = np.ones(live.size, dtype=bool)
        for m in range(cd.shape[0]):
            if not undecided.any():
                break
            ed = np.einsum("bux,ux->b", mu_live, cd[m])
            ee = np.einsum("bux,ux->b", mu_live, ce[m])
            hit = undecided & (ed <= d_budget + _SLACK) & (ee <= e_budget + _SLACK)
            out[live[hit]] = True
            undecided &= ~hit
        return out

    def visit(idx: tuple[np.ndarray, ...]) -> None:
        nonlocal best
        ok1 = side_feasible(m1_rows, idx, cd1, ce1, pair.d1, conr.de1)
        if not ok1.any():
            return
        sub = tuple(col[ok1] for col in idx)
        ok2 = side_feasible(m2_rows, sub, cd2, ce2, pair.d2, conr.de2)
        if not ok2.any():
            return
        sub = tuple(col[ok2] for col in sub)
        best = min(best, float(objective.eval(sub).min()))

    _enumerate_feasible(slices, np.zeros(0), visit)
    if not math.isfinite(best):
        raise InfeasibleBudgetError("no auxiliary grid channel meets the ConR budgets")
    return ConRResult(rate=max(0.0, best), heuristic=heur1 or heur2,
                      u_caps=u_caps, map_counts=(maps1.shape[0], maps2.shape[0]))
