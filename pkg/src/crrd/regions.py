"""Rate-region samplers for the cooperative and cascade settings.

Each region is characterized by per-channel rate bounds; the samplers
sweep a set of feasible test channels (an exhaustive coarse grid, or
scalarized descent runs over a weight ladder), map every channel to its
rate point, and keep the dominance-filtered lower boundary.  The sampled
region is an inner approximation of the true union by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import TestChannel
from .closed_form import DistortionPair
from .descent import HB_CR_TERMS, MITerm, descent_weighted, descent_hb_cr
from .errors import InvalidSpecError
from .gridsearch import HB_GUARD_DEFAULT, feasible_hb_channel_batches, \
    grid_oracle_hb_cr, grid_oracle_point_cr
from .prob import DistortionMetric, FinitePmf, JointSource, check_markov_chain

__all__ = [
    "RatePoint",
    "RateRegion",
    "SamplerConfig",
    "CascadeBounds",
    "dominance_filter",
    "coop_region_xy1y2",
    "coop_region_xy2y1",
    "cascade_region_xy1y2",
    "cascade_bounds_xy2y1",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float
    provenance: str = ""


@dataclass(frozen=True)
class RateRegion:
    """Sampled lower boundary: points sorted by r1, no point dominating
    another.  `unbounded` names axes along which the region extends as a
    half-line (e.g. "r2" when any r2 >= 0 is achievable at the corner)."""

    points: tuple[RatePoint, ...]
    dominance_closed: bool = True
    unbounded: tuple[str, ...] = ()


def dominance_filter(points: Iterable[RatePoint]) -> tuple[RatePoint, ...]:
    """Boundary antichain: drop any point weakly dominated by another.

    Idempotent; result sorted by (r1, r2).
    """
    pts = sorted(points, key=lambda p: (p.r1, p.r2))
    out: list[RatePoint] = []
    best_r2 = math.inf
    for p in pts:
        if p.r2 < best_r2 - 1e-15:
            out.append(p)
            best_r2 = p.r2
    return tuple(out)


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the region samplers.

    method "grid" enumerates feasible channels at `step`; "scalarize"
    minimizes lambda-weighted combinations of the two bounds by descent
    with `n_weights` evenly spaced weights and `restarts` random starts
    per weight.  `corner_slack` is the r1 tolerance used when reading the
    inner boundary at the outer corner.  `guard` bounds the channel sweep;
    `oracle_guard` bounds the scalar corner minimizations, which prune by
    budget feasibility and tolerate a much larger product grid.
    """

    method: str = "grid"
    step: float = 0.1
    n_weights: int = 21
    restarts: int = 4
    seed: int = 0
    guard: int = 10_000_000
    oracle_guard: int = HB_GUARD_DEFAULT
    corner_slack: float = 1e-6
    seed_channels: tuple[TestChannel, ...] = ()

    def __post_init__(self):
        if self.method not in ("grid", "scalarize"):
            raise InvalidSpecError("sampler method must be 'grid' or 'scalarize'")


def _batch_entropy(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(m.shape[0], -1)
    return -(flat * np.log(flat + (flat <= 0))).sum(axis=1) / _LN2


def _batch_cmi(joint: np.ndarray, a: tuple[int, ...], b: tuple[int, ...],
               c: tuple[int, ...] = ()) -> np.ndarray:
    """I(A;B|C) per batch entry; joint axes are (batch, x, y1, y2, a, b)."""

    def h(keep: tuple[int, ...]) -> np.ndarray:
        drop = tuple(i for i in range(1, 6) if i not in keep)
        return _batch_entropy(joint.sum(axis=drop) if drop else joint)

    ac = tuple(sorted(set(a) | set(c)))
    bc = tuple(sorted(set(b) | set(c)))
    abc = tuple(sorted(set(a) | set(b) | set(c)))
    out = h(ac) + h(bc) - h(abc) - (h(tuple(sorted(c))) if c else 0.0)
    return np.maximum(out, 0.0)


def _channel_sweep(source: JointSource, metric1: DistortionMetric,
                   metric2: DistortionMetric, pair: DistortionPair,
                   config: SamplerConfig,
                   weight_terms: Sequence[tuple[MITerm, ...]],
                   ) -> Iterable[tuple[np.ndarray, str]]:
    """Yield (channel-batch tensor, provenance) per sampler policy.

    `weight_terms` gives the two bound expressions as term tuples; the
    scalarized sweep minimizes lambda * bound_a + (1 - lambda) * bound_b.
    """
    for ch in config.seed_channels:
        yield ch.cond[None, :, :, :], "seed"
    if config.method == "grid":
        for batch in feasible_hb_channel_batches(
                source, metric1, metric2, pair, config.step, guard=config.guard):
            yield batch, f"grid(step={config.step})"
        return
    terms_a, terms_b = weight_terms
    all_terms = tuple(terms_a) + tuple(terms_b)
    for i in range(config.n_weights):
        lam = i / (config.n_weights - 1) if config.n_weights > 1 else 0.5
        weights = [lam] * len(terms_a) + [1.0 - lam] * len(terms_b)
        init = config.seed_channels[0] if config.seed_channels else None
        res = descent_weighted(source, metric1, metric2, pair, all_terms,
                               weights, restarts=config.restarts,
                               seed=config.seed + i, init=init)
        yield res.witness.cond[None, :, :, :], f"scalarize(lambda={lam:.2f})"


def _compose_batch(source: JointSource, batch: np.ndarray) -> np.ndarray:
    return source.mass[None, :, :, :, None, None] * batch[:, :, None, None, :, :]


_COOP12_A = (MITerm((1, 2), 1),)
_COOP12_B = (MITerm((2,), 2), MITerm((1,), 1, (2,)))


def coop_region_xy1y2(source: JointSource, metric1: DistortionMetric,
                      metric2: DistortionMetric, pair: DistortionPair,
                      config: SamplerConfig = SamplerConfig()) -> RateRegion:
    """Cooperative-decoder region when the chain X - Y1 - Y2 holds.

    Per channel the bounds are r_a = I(X;Xh1,Xh2|Y1) on the broadcast link
    and r_ab = I(X;Xh2|Y2) + I(X;Xh1|Y1,Xh2) on the sum rate; the sampled
    point is (r_a, max(0, r_ab - r_a)).
    """
    if not check_markov_chain(source, ("x", "y1", "y2")):
        raise InvalidSpecError("cooperative region in this direction needs X - Y1 - Y2")
    pts: list[RatePoint] = []
    for batch, prov in _channel_sweep(source, metric1, metric2, pair, config,
                                      (_COOP12_A, _COOP12_B)):
        joint = _compose_batch(source, batch)
        ra = _batch_cmi(joint, (1,), (4, 5), (2,))
        rb = _batch_cmi(joint, (1,), (5,), (3,)) + _batch_cmi(joint, (1,), (4,), (2, 5))
        for i in range(ra.size):
            pts.append(RatePoint(float(ra[i]), float(max(0.0, rb[i] - ra[i])), prov))
    return RateRegion(points=dominance_filter(pts))


def coop_region_xy2y1(source: JointSource, metric1: DistortionMetric,
                      metric2: DistortionMetric, pair: DistortionPair,
                      config: SamplerConfig = SamplerConfig()) -> RateRegion:
    """Cooperative-decoder region when the chain X - Y2 - Y1 holds.

    Cooperation is useless here: the region is the half-plane
    r1 >= broadcast CR rate, r2 >= 0, returned as the corner point plus an
    explicit unbounded-r2 marker.
    """
    if not check_markov_chain(source, ("x", "y2", "y1")):
        raise InvalidSpecError("cooperative region in this direction needs X - Y2 - Y1")
    if config.method == "grid":
        rho, _ = grid_oracle_hb_cr(source, metric1, metric2, pair, config.step,
                                   guard=config.oracle_guard)
    else:
        init = config.seed_channels[0] if config.seed_channels else None
        rho = descent_hb_cr(source, metric1, metric2, pair,
                            restarts=config.restarts, seed=config.seed,
                            init=init).rate
    return RateRegion(points=(RatePoint(rho, 0.0, "broadcast-min"),),
                      unbounded=("r2",))


_CASC12_A = (MITerm((1, 2), 1),)
_CASC12_B = (MITerm((2,), 2),)


def cascade_region_xy1y2(source: JointSource, metric1: DistortionMetric,
                         metric2: DistortionMetric, pair: DistortionPair,
                         config: SamplerConfig = SamplerConfig()) -> RateRegion:
    """Two-hop region when the chain X - Y1 - Y2 holds.

    Per channel: r1 = I(X;Xh1,Xh2|Y1), r2 = I(X;Xh2|Y2).
    """
    if not check_markov_chain(source, ("x", "y1", "y2")):
        raise InvalidSpecError("this cascade direction needs X - Y1 - Y2")
    pts: list[RatePoint] = []
    for batch, prov in _channel_sweep(source, metric1, metric2, pair, config,
                                      (_CASC12_A, _CASC12_B)):
        joint = _compose_batch(source, batch)
        r1 = _batch_cmi(joint, (1,), (4, 5), (2,))
        r2 = _batch_cmi(joint, (1,), (5,), (3,))
        for i in range(r1.size):
            pts.append(RatePoint(float(r1[i]), float(r2[i]), prov))
    return RateRegion(points=dominance_filter(pts))


@dataclass(frozen=True)
class CascadeBounds:
    outer: RateRegion
    inner: RateRegion
    gap: float


_CASC21_INNER_A = HB_CR_TERMS
_CASC21_INNER_B = (MITerm((1, 2), 2),)


def cascade_bounds_xy2y1(source: JointSource, metric1: DistortionMetric,
                         metric2: DistortionMetric, pair: DistortionPair,
                         config: SamplerConfig = SamplerConfig()) -> CascadeBounds:
    """Outer and inner bounds for the two-hop region under X - Y2 - Y1.

    The outer region is the quadrant above (broadcast CR minimum,
    point-to-point CR minimum toward the final decoder).  The inner region
    sweeps channels with r1 = I(X;Xh1|Y1) + I(X;Xh2|Y2,Xh1) and
    r2 = I(X;Xh1,Xh2|Y2).  The gap is the worst r2 shortfall of the inner
    boundary against the outer corner; 0 certifies coincidence at the
    sampled resolution, +inf means no sampled point reached the corner's
    r1 level.
    """
    if not check_markov_chain(source, ("x", "y2", "y1")):
        raise InvalidSpecError("cascade bounds in this direction need X - Y2 - Y1")
    if config.method == "grid":
        r1c, _ = grid_oracle_hb_cr(source, metric1, metric2, pair, config.step,
                                   guard=config.oracle_guard)
    else:
        init = config.seed_channels[0] if config.seed_channels else None
        r1c = descent_hb_cr(source, metric1, metric2, pair,
                            restarts=config.restarts, seed=config.seed,
                            init=init).rate
    pair_xy2 = FinitePmf(source.xy2_marginal())
    r2c = grid_oracle_point_cr(pair_xy2, metric2, pair.d2, config.step,
                               guard=config.oracle_guard)
    outer = RateRegion(points=(RatePoint(r1c, r2c, "outer-corner"),))

    pts: list[RatePoint] = []
    for batch, prov in _channel_sweep(source, metric1, metric2, pair, config,
                                      (_CASC21_INNER_A, _CASC21_INNER_B)):
        joint = _compose_batch(source, batch)
        g1 = _batch_cmi(joint, (1,), (4,), (2,)) + _batch_cmi(joint, (1,), (5,), (3, 4))
        g2 = _batch_cmi(joint, (1,), (4, 5), (3,))
        for i in range(g1.size):
            pts.append(RatePoint(float(g1[i]), float(g2[i]), prov))
    inner = RateRegion(points=dominance_filter(pts))

    near = [p.r2 for p in inner.points if p.r1 <= r1c + config.corner_slack]
    gap = math.inf if not near else max(0.0, min(near) - r2c)
    return CascadeBounds(outer=outer, inner=inner, gap=gap)
