"""Decreasing rearrangements and the norms built on them.

A measurable function is represented by :class:`WeightedSamples`, a list of
(value, cell measure) pairs, optionally with planar cell positions.  All
rearrangement-based quantities (the Zygmund norm ``int f* ln(|X|/t) dt``, the
modular ``int |f| max(0, ln|f|)``, the Hardy-Littlewood pairing bound) are
evaluated exactly on the resulting step functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WeightedSamples:
    """Cell values with positive cell measures; positions are planar chart
    coordinates (x, y) and are required only for support/ball queries."""

    values: np.ndarray
    measures: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        measures = np.asarray(self.measures, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "measures", measures)
        if values.size == 0:
            raise ValueError("empty domain")
        if values.shape != measures.shape:
            raise ValueError("values and measures must have the same length")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if not (np.all(np.isfinite(measures)) and np.all(measures > 0)):
            raise ValueError("measures must be positive and finite")
        if self.positions is not None:
            pos = np.asarray(self.positions, dtype=float)
            if pos.shape != (values.size, 2):
                raise ValueError("positions must have shape (n, 2)")
            object.__setattr__(self, "positions", pos)

    @property
    def total_measure(self) -> float:
        return float(self.measures.sum())

    @property
    def support_measure(self) -> float:
        return float(self.measures[self.values != 0.0].sum())

    def scaled(self, c: float) -> "WeightedSamples":
        return WeightedSamples(self.values * c, self.measures, self.positions)

    def abs(self) -> "WeightedSamples":
        return WeightedSamples(np.abs(self.values), self.measures, self.positions)


@dataclass(frozen=True)
class StepProfile:
    """Non-increasing rearrangement as a right-open step function: value
    ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``, zero beyond."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.values.size == 0:
            return np.zeros_like(t)
        idx = np.searchsorted(self.breakpoints[1:], t, side="right")
        return np.where(idx < self.values.size, self.values[np.minimum(idx, self.values.size - 1)], 0.0)

    @property
    def support_measure(self) -> float:
        return float(self.breakpoints[-1])


@dataclass(frozen=True)
class BmoEstimate:
    value: float
    ball_family: list


@dataclass(frozen=True)
class AtomVerdict:
    support_ok: bool
    mean: float
    size_bound: float
    ball: tuple
    min_radius: float


def rearrange(f: WeightedSamples) -> StepProfile:
    """Sort cells by |value| descending (ties by cell index) and accumulate
    measures.  Zero cells are dropped; the last breakpoint is the support
    measure of |f|."""
    absval = np.abs(f.values)
    keep = absval > 0.0
    absval = absval[keep]
    meas = f.measures[keep]
    if absval.size == 0:
        return StepProfile(np.array([0.0]), np.array([]))
    order = np.argsort(-absval, kind="stable")
    vals = absval[order]
    cum = np.concatenate([[0.0], np.cumsum(meas[order])])
    return StepProfile(cum, vals)


def zygmund_norm(f: WeightedSamples, domain_measure: float) -> float:
    """int_0^inf f*(t) ln(domain_measure / t) dt via the exact per-step
    antiderivative t ln(|X|/t) + t."""
    prof = rearrange(f)
    supp = prof.support_measure
    if domain_measure <= 0:
        raise ValueError("domain measure must be positive")
    if supp > domain_measure * (1 + 1e-12):
        raise ValueError("domain smaller than support")

    def anti(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = t[pos] * (np.log(domain_measure / t[pos]) + 1.0)
        return out

    ft = anti(prof.breakpoints)
    return float(np.sum(prof.values * np.diff(ft)))


def zygmund_modular(f: WeightedSamples) -> float:
    """int |f| max(0, ln|f|)."""
    absval = np.abs(f.values)
    with np.errstate(divide="ignore"):
        lg = np.where(absval > 0, np.log(np.maximum(absval, 1e-300)), 0.0)
    return float(np.sum(absval * np.maximum(lg, 0.0) * f.measures))


def _merged_step_integral(a: StepProfile, b: StepProfile) -> float:
    # integral of a*(t) b*(t) dt on the merged breakpoint grid
    end = min(a.support_measure, b.support_measure)
    if end == 0.0:
        return 0.0
    knots = np.union1d(a.breakpoints, b.breakpoints)
    knots = knots[knots <= end]
    if knots[-1] < end:
        knots = np.append(knots, end)
    mids = 0.5 * (knots[:-1] + knots[1:])
    return float(np.sum(a(mids) * b(mids) * np.diff(knots)))


def pairing_upper(f: WeightedSamples, h: WeightedSamples) -> float:
    """Hardy-Littlewood upper bound int f* h* for the pairing int |f h|."""
    if not np.isclose(f.total_measure, h.total_measure, rtol=1e-9, atol=0.0):
        raise ValueError("mismatched total measures")
    return _merged_step_integral(rearrange(f), rearrange(h))


def direct_pairing(f: WeightedSamples, h: WeightedSamples) -> float:
    """int |f h| for samples sharing the same cells."""
    if f.values.size != h.values.size or not np.allclose(f.measures, h.measures):
        raise ValueError("samples must share cells")
    return float(np.sum(np.abs(f.values * h.values) * f.measures))


def bmo_norm(f: WeightedSamples, ball_family) -> BmoEstimate:
    """Sup of mean oscillation over a finite ball family; a lower bound of the
    true BMO norm.  Needs cell positions."""
    if f.positions is None:
        raise ValueError("samples carry no positions")
    balls = list(ball_family)
    if not balls:
        raise ValueError("empty ball family")
    best = 0.0
    for center, radius in balls:
        center = np.asarray(center, dtype=float)
        d = np.hypot(f.positions[:, 0] - center[0], f.positions[:, 1] - center[1])
        mask = d <= radius
        if not np.any(mask):
            continue
        w = f.measures[mask]
        v = f.values[mask]
        vol = w.sum()
        mean = np.sum(v * w) / vol
        osc = float(np.sum(np.abs(v - mean) * w) / vol)
        best = max(best, osc)
    return BmoEstimate(best, balls)


def atom_check(f: WeightedSamples, ball) -> AtomVerdict:
    """Check the three atom properties against a candidate ball: support
    containment, zero mean, and sup|f| * |B| <= 1."""
    if f.positions is None:
        raise ValueError("samples carry no positions")
    center, radius = ball
    center = np.asarray(center, dtype=float)
    d = np.hypot(f.positions[:, 0] - center[0], f.positions[:, 1] - center[1])
    supp = f.values != 0.0
    min_radius = float(d[supp].max()) if np.any(supp) else 0.0
    support_ok = bool(min_radius <= radius)
    mean = float(np.sum(f.values * f.measures))
    size_bound = float(np.max(np.abs(f.values)) * np.pi * radius**2)
    return AtomVerdict(support_ok, mean, size_bound, (tuple(center), radius), min_radius)
