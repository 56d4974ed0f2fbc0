"""Test channels, auxiliary-variable channels, and objective evaluators.

A test channel p(xhat1, xhat2 | x) is the optimization variable of the
common-reconstruction formulas; an auxiliary channel p(u1, u2 | x) plus
deterministic decoder (and, for constrained reconstruction, encoder)
maps is the variable of the relaxed problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError, ShapeMismatchError
from .prob import DistortionMetric, FinitePmf, JointSource, check_markov_chain, \
    conditional_mutual_information

__all__ = [
    "TestChannel",
    "AuxChannel",
    "ConRConstraint",
    "compose_joint",
    "eval_hb_cr_objective",
    "eval_hb_cr_alt_objective",
    "eval_distortions",
]

_SLICE_TOL = 1e-12


class TestChannel:
    """Conditional pmf p(xhat1, xhat2 | x) as a (|X|, m1, m2) tensor.

    Every x-slice must sum to 1 within 1e-12.  `validate_support` checks
    that no mass sits on reconstruction symbols a metric forbids.
    """

    __slots__ = ("cond",)
    __test__ = False  # domain type, despite the pytest-like name

    def __init__(self, cond):
        arr = np.ascontiguousarray(cond, dtype=np.float64)
        if arr.ndim != 3:
            raise InvalidSpecError("test channel tensor must have 3 axes (x, xhat1, xhat2)")
        if np.any(arr < -1e-15) or not np.all(np.isfinite(arr)):
            raise InvalidSpecError("channel entries must be finite and >= 0")
        arr = np.clip(arr, 0.0, None)
        sums = arr.sum(axis=(1, 2))
        if np.any(np.abs(sums - 1.0) > _SLICE_TOL):
            raise InvalidSpecError(f"each x-slice must sum to 1, got sums {sums}")
        arr.setflags(write=False)
        object.__setattr__(self, "cond", arr)

    @property
    def nx(self) -> int:
        return self.cond.shape[0]

    @property
    def m1(self) -> int:
        return self.cond.shape[1]

    @property
    def m2(self) -> int:
        return self.cond.shape[2]

    @classmethod
    def constant(cls, nx: int, m1: int, m2: int, a: int = 0, b: int = 0) -> "TestChannel":
        cond = np.zeros((nx, m1, m2))
        cond[:, a, b] = 1.0
        return cls(cond)

    def validate_support(self, metric1: DistortionMetric | None = None,
                         metric2: DistortionMetric | None = None) -> None:
        if metric1 is not None:
            bad = ~np.isfinite(metric1.matrix)  # (x, xhat1)
            if float((self.cond.sum(axis=2) * bad).sum()) > 0:
                raise InvalidSpecError("channel puts mass on a forbidden (x, xhat1) pair")
        if metric2 is not None:
            bad = ~np.isfinite(metric2.matrix)
            if float((self.cond.sum(axis=1) * bad).sum()) > 0:
                raise InvalidSpecError("channel puts mass on a forbidden (x, xhat2) pair")

    def __repr__(self) -> str:
        return f"TestChannel(|X|={self.nx}, {self.m1}x{self.m2})"


@dataclass(frozen=True)
class AuxChannel:
    """Auxiliary channel p(u1, u2 | x) with deterministic maps.

    dec1[u1, y1] and dec2[u2, y2] give the decoders' reconstructions;
    enc1[u1, x] and enc2[u2, x] (optional) give the encoder-side
    reproductions used by the constrained-reconstruction check.
    """

    cond: np.ndarray
    dec1: np.ndarray
    dec2: np.ndarray
    enc1: np.ndarray | None = None
    enc2: np.ndarray | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.cond, dtype=np.float64)
        if arr.ndim != 3:
            raise InvalidSpecError("aux channel tensor must have 3 axes (x, u1, u2)")
        sums = arr.sum(axis=(1, 2))
        if np.any(np.abs(sums - 1.0) > _SLICE_TOL) or np.any(arr < 0):
            raise InvalidSpecError("each x-slice of p(u1,u2|x) must be a pmf")
        arr.setflags(write=False)
        object.__setattr__(self, "cond", arr)
        for name in ("dec1", "dec2", "enc1", "enc2"):
            m = getattr(self, name)
            if m is None:
                continue
            m = np.ascontiguousarray(m, dtype=np.int64)
            if m.ndim != 2:
                raise InvalidSpecError(f"{name} must be a 2-d integer map")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def nu1(self) -> int:
        return self.cond.shape[1]

    @property
    def nu2(self) -> int:
        return self.cond.shape[2]


@dataclass(frozen=True)
class ConRConstraint:
    """Encoder-side reproduction budgets and their square metrics."""

    de1: float
    de2: float
    metric_e1: DistortionMetric
    metric_e2: DistortionMetric

    def __post_init__(self):
        if self.de1 < 0 or self.de2 < 0:
            raise InvalidSpecError("encoder-side budgets must be >= 0")
        for name in ("metric_e1", "metric_e2"):
            m = getattr(self, name)
            if m.n_inputs != m.n_outputs:
                raise InvalidSpecError(f"{name} must be square (reconstruction vs itself)")


def compose_joint(source: JointSource, ch: TestChannel) -> FinitePmf:
    """Joint pmf over (x, y1, y2, xhat1, xhat2) = p(x,y1,y2) p(xhat1,xhat2|x)."""
    if ch.nx != source.nx:
        raise ShapeMismatchError(
            f"channel has |X|={ch.nx} but source has |X|={source.nx}")
    joint = source.mass[:, :, :, None, None] * ch.cond[:, None, None, :, :]
    return FinitePmf(joint)


def eval_hb_cr_objective(source: JointSource, ch: TestChannel) -> float:
    """Broadcast CR rate objective I(X;Xh1|Y1) + I(X;Xh2|Y2,Xh1) in bits."""
    joint = compose_joint(source, ch)
    t1 = conditional_mutual_information(joint, (0,), (3,), (1,))
    t2 = conditional_mutual_information(joint, (0,), (4,), (2, 3))
    return t1 + t2


def eval_hb_cr_alt_objective(source: JointSource, ch: TestChannel) -> float:
    """Equivalent form I(X;Xh1,Xh2|Y2) + I(Xh1;Y2|Y1).

    Only valid when the worse observation is a physically degraded copy of
    the better one (chain X - Y2 - Y1); raises otherwise.
    """
    if not check_markov_chain(source, ("x", "y2", "y1")):
        raise InvalidSpecError("alternative objective requires the chain X - Y2 - Y1")
    joint = compose_joint(source, ch)
    t1 = conditional_mutual_information(joint, (0,), (3, 4), (2,))
    t2 = conditional_mutual_information(joint, (3,), (2,), (1,))
    return t1 + t2


def eval_distortions(source: JointSource, ch: TestChannel,
                     metric1: DistortionMetric, metric2: DistortionMetric,
                     ) -> tuple[float, float]:
    """Expected distortions (E[d1(X,Xh1)], E[d2(X,Xh2)]) under p(x) p(xh|x).

    Raises if the channel places mass on a forbidden pair.
    """
    if metric1.n_inputs != source.nx or metric2.n_inputs != source.nx:
        raise ShapeMismatchError("metric row count must equal |X|")
    if metric1.n_outputs != ch.m1 or metric2.n_outputs != ch.m2:
        raise ShapeMismatchError("metric column count must match channel alphabet")
    ch.validate_support(metric1, metric2)
    px = source.x_marginal()
    w1 = ch.cond.sum(axis=2) * px[:, None]   # p(x, xhat1)
    w2 = ch.cond.sum(axis=1) * px[:, None]
    d1m = np.where(np.isfinite(metric1.matrix), metric1.matrix, 0.0)
    d2m = np.where(np.isfinite(metric2.matrix), metric2.matrix, 0.0)
    return float((w1 * d1m).sum()), float((w2 * d2m).sum())
