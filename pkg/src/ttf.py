"""
Travel-Time Functions
=====================
Periodic piecewise-linear travel-time functions (TTFs) and their algebra:
evaluation, chaining (link), lower envelope (minimum), undercut intervals,
FIFO checking and (1+eps) bounding approximations.

A TTF with breakpoints (t_0, v_0) ... (t_{n-1}, v_{n-1}), all t_i in
[0, period), is the continuous periodic interpolation of its points; the
wrap segment joins the last point to (t_0 + period, v_0). A single point is
a constant function.

TTFs are immutable. Every operation returns a new TTF with collinear
breakpoints merged.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

import config

# Candidate breakpoints closer than this (seconds) are the same breakpoint
TIME_RESOLUTION = 1e-9


class PeriodMismatchError(ValueError):
    """Two TTFs with different periods were combined."""


class TTF:
    """Periodic continuous piecewise-linear travel-time function."""

    __slots__ = ("times", "values", "period", "_t", "_v", "_min", "_max")

    def __init__(self, times: Sequence[float], values: Sequence[float],
                 period: float = config.PERIOD):
        times = np.array(times, dtype=np.float64).reshape(-1)
        values = np.array(values, dtype=np.float64).reshape(-1)
        period = float(period)

        if times.size == 0:
            raise ValueError("TTF needs at least one breakpoint")
        if times.shape != values.shape:
            raise ValueError(f"{times.size} times but {values.size} values")
        if not (math.isfinite(period) and period > 0):
            raise ValueError(f"Period must be positive and finite, got {period}")
        if not np.all(np.isfinite(times)) or times.min() < 0 or times.max() >= period:
            raise ValueError(f"Breakpoint times must lie in [0, {period})")
        if np.any(np.diff(times) <= 0):
            raise ValueError("Breakpoint times must be strictly increasing")
        if not np.all(np.isfinite(values)) or values.min() < 0:
            raise ValueError("Travel times must be finite and non-negative")

        self._init(times, values, period)

    def _init(self, times: np.ndarray, values: np.ndarray, period: float) -> None:
        times.setflags(write=False)
        values.setflags(write=False)
        self.times = times
        self.values = values
        self.period = period
        # python tuples for scalar evaluation; numpy scalars are slow to index
        self._t = tuple(times.tolist())
        self._v = tuple(values.tolist())
        self._min = min(self._v)
        self._max = max(self._v)

    @classmethod
    def _trusted(cls, times: np.ndarray, values: np.ndarray, period: float) -> "TTF":
        """Build from arrays already known to be valid (internal results)."""
        f = cls.__new__(cls)
        f._init(np.array(times, dtype=np.float64),
                np.maximum(np.array(values, dtype=np.float64), 0.0),
                float(period))
        return f

    @classmethod
    def constant(cls, value: float, period: float = config.PERIOD) -> "TTF":
        return cls([0.0], [value], period)

    @property
    def is_constant(self) -> bool:
        return len(self._t) == 1

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self._t, self._v))

    def __len__(self) -> int:
        return len(self._t)

    def __call__(self, tau: float) -> float:
        return evaluate(self, tau)

    def __repr__(self) -> str:
        if self.is_constant:
            return f"TTF(const {self._v[0]:g}, period={self.period:g})"
        return f"TTF({len(self)} points, period={self.period:g})"


@dataclass(frozen=True)
class TimeInterval:
    """Departure window [begin, end], read modulo the period."""
    begin: float
    end: float

    def __post_init__(self):
        if self.end < self.begin:
            raise ValueError(f"Interval end {self.end} before begin {self.begin}")

    @property
    def length(self) -> float:
        return self.end - self.begin


def interval_contains(interval: TimeInterval, tau: float, period: float) -> bool:
    if interval.length >= period:
        return True
    offset = (tau - interval.begin) % period
    return offset <= interval.length


@dataclass(frozen=True)
class BoundPair:
    """Lower and upper bound TTFs of one (unknown or expensive) exact TTF."""
    lower: TTF
    upper: TTF

    @classmethod
    def exact(cls, f: TTF) -> "BoundPair":
        return cls(f, f)

    @property
    def is_exact(self) -> bool:
        return self.lower is self.upper

    @property
    def point_count(self) -> int:
        if self.is_exact:
            return len(self.lower)
        return len(self.lower) + len(self.upper)


# =============================================================================
# EVALUATION
# =============================================================================

def evaluate(f: TTF, tau: float) -> float:
    """Value of f at departure time tau (any real), O(log n)."""
    t, v = f._t, f._v
    n = len(t)
    if n == 1:
        return v[0]
    period = f.period
    x = tau % period
    i = bisect_right(t, x) - 1
    if i < 0:
        x0, y0, x1, y1 = t[-1] - period, v[-1], t[0], v[0]
    elif i == n - 1:
        x0, y0, x1, y1 = t[-1], v[-1], t[0] + period, v[0]
    else:
        x0, y0, x1, y1 = t[i], v[i], t[i + 1], v[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def eval_many(f: TTF, taus) -> np.ndarray:
    """Vectorised evaluation at many departure times."""
    taus = np.asarray(taus, dtype=np.float64)
    if f.is_constant:
        return np.full(taus.shape, f._v[0])
    return np.interp(taus, f.times, f.values, period=f.period)


def arrival(f: TTF, tau: float) -> float:
    return tau + evaluate(f, tau)


def global_min(f: TTF) -> float:
    return f._min


def global_max(f: TTF) -> float:
    return f._max


def mean_value(f: TTF) -> float:
    """Exact average of f over one period."""
    if f.is_constant:
        return f._v[0]
    xs = np.append(f.times, f.times[0] + f.period)
    ys = np.append(f.values, f.values[0])
    area = np.sum((ys[:-1] + ys[1:]) * np.diff(xs)) / 2.0
    return float(area / f.period)


def min_over(f: TTF, begin: float, end: float) -> float:
    """Exact minimum of f over departures in [begin, end]."""
    return _extremum_over(f, begin, end, min)


def max_over(f: TTF, begin: float, end: float) -> float:
    """Exact maximum of f over departures in [begin, end]."""
    return _extremum_over(f, begin, end, max)


def _extremum_over(f: TTF, begin: float, end: float, pick) -> float:
    if end - begin >= f.period or f.is_constant:
        return pick(f._v)
    offsets = (f.times - begin) % f.period
    inside = f.values[offsets <= end - begin]
    best = pick(evaluate(f, begin), evaluate(f, end))
    if inside.size:
        best = pick(best, float(inside.min() if pick is min else inside.max()))
    return best


def is_fifo(f: TTF) -> bool:
    """True iff no segment (wrap included) has slope below -1."""
    arrivals = np.append(f.times + f.values, f.times[0] + f.period + f.values[0])
    return bool(np.all(np.diff(arrivals) >= -config.ABS_TOL))


# =============================================================================
# BREAKPOINT BOOKKEEPING
# =============================================================================

def _check_period(f: TTF, g: TTF) -> None:
    if f.period != g.period:
        raise PeriodMismatchError(f"Period mismatch: {f.period} vs {g.period}")


def _closed(f: TTF) -> np.ndarray:
    """Breakpoint times of f on the closed period [0, period], 0 and period included."""
    xs = f.times
    if xs[0] > 0:
        xs = np.concatenate(([0.0], xs))
    return np.append(xs, f.period)


def _collinear(x0, y0, x1, y1, x2, y2) -> bool:
    chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
    return abs(y1 - chord) <= config.COLLINEAR_TOL * max(1.0, abs(y1))


def _simplify(xs: Sequence[float], ys: Sequence[float], period: float):
    """Drop interior points that are collinear with their neighbours, wrap included."""
    kx: List[float] = []
    ky: List[float] = []
    for x, y in zip(xs, ys):
        while len(kx) >= 2 and _collinear(kx[-2], ky[-2], kx[-1], ky[-1], x, y):
            kx.pop()
            ky.pop()
        kx.append(x)
        ky.append(y)

    changed = True
    while changed and len(kx) >= 2:
        changed = False
        if _collinear(kx[-2], ky[-2], kx[-1], ky[-1], kx[0] + period, ky[0]):
            kx.pop()
            ky.pop()
            changed = True
        if len(kx) >= 2 and _collinear(kx[-1] - period, ky[-1], kx[0], ky[0], kx[1], ky[1]):
            kx.pop(0)
            ky.pop(0)
            changed = True
    return kx, ky


def _from_closed(xs: np.ndarray, ys: np.ndarray, period: float) -> TTF:
    """Build a TTF from sorted samples on [0, period] (last sample is the wrap copy)."""
    inside = xs <= period - TIME_RESOLUTION
    xs, ys = xs[inside], ys[inside]
    distinct = np.concatenate(([True], np.diff(xs) > TIME_RESOLUTION))
    kx, ky = _simplify(xs[distinct].tolist(), ys[distinct].tolist(), period)
    return TTF._trusted(np.array(kx), np.array(ky), period)


def _inverse_nondecreasing(arr: np.ndarray, xs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Preimages of targets under the piecewise-linear non-decreasing map xs -> arr.

    Every target must lie strictly inside (arr[0], arr[-1]).
    """
    idx = np.searchsorted(arr, targets, side="left")
    a0, a1 = arr[idx - 1], arr[idx]
    x0, x1 = xs[idx - 1], xs[idx]
    return x0 + (targets - a0) * (x1 - x0) / (a1 - a0)


# =============================================================================
# ALGEBRA
# =============================================================================

def link(f: TTF, g: TTF) -> TTF:
    """Chain f then g: tau -> f(tau) + g(tau + f(tau))."""
    _check_period(f, g)
    period = f.period

    fx = _closed(f)
    arr = fx + eval_many(f, fx)
    lo, hi = arr[0], arr[-1]

    # every copy of g's breakpoints hit by an arrival time within one period
    k0 = math.floor((lo - g.times[-1]) / period)
    k1 = math.ceil((hi - g.times[0]) / period)
    shifts = period * np.arange(k0, k1 + 1, dtype=np.float64)
    targets = (g.times[None, :] + shifts[:, None]).ravel()
    targets = targets[(targets > lo) & (targets < hi)]

    xs = np.union1d(fx, _inverse_nondecreasing(arr, fx, targets))
    fy = eval_many(f, xs)
    ys = fy + eval_many(g, xs + fy)
    return _from_closed(xs, ys, period)


def minimum(f: TTF, g: TTF) -> TTF:
    """Exact lower envelope of f and g."""
    _check_period(f, g)
    if f is g:
        return f
    xs = np.union1d(_closed(f), _closed(g))
    d = eval_many(f, xs) - eval_many(g, xs)
    if np.all(d <= 0):
        return f
    if np.all(d >= 0):
        return g

    i = np.nonzero(d[:-1] * d[1:] < 0)[0]
    crossings = xs[i] + (xs[i + 1] - xs[i]) * d[i] / (d[i] - d[i + 1])
    xs = np.union1d(xs, crossings)
    ys = np.minimum(eval_many(f, xs), eval_many(g, xs))
    return _from_closed(xs, ys, f.period)


def undercut_intervals(f: TTF, g: TTF, tolerance: float = 0.0) -> List[TimeInterval]:
    """Maximal departure windows where f(tau) < g(tau) - tolerance.

    A window wrapping around the period end is returned as one interval whose
    end exceeds the period.
    """
    _check_period(f, g)
    period = f.period
    xs = np.union1d(_closed(f), _closed(g))
    d = (eval_many(f, xs) - eval_many(g, xs) + tolerance).tolist()
    xs = xs.tolist()

    pieces: List[List[float]] = []
    for i in range(len(xs) - 1):
        d0, d1 = d[i], d[i + 1]
        x0, x1 = xs[i], xs[i + 1]
        if d0 < 0 and d1 < 0:
            a, b = x0, x1
        elif d0 < 0 <= d1:
            a, b = x0, x0 + (x1 - x0) * d0 / (d0 - d1)
        elif d1 < 0 <= d0:
            a, b = x0 + (x1 - x0) * d0 / (d0 - d1), x1
        else:
            continue
        if b <= a:
            continue
        if pieces and pieces[-1][1] == a:
            pieces[-1][1] = b
        else:
            pieces.append([a, b])

    if len(pieces) > 1 and pieces[0][0] == 0.0 and pieces[-1][1] == period:
        first = pieces.pop(0)
        pieces[-1][1] = first[1] + period
    return [TimeInterval(a, b) for a, b in pieces]


# =============================================================================
# APPROXIMATION
# =============================================================================

def _corridor(f: TTF, low_factor: float, high_factor: float) -> TTF:
    """Greedy chord simplification inside [low_factor * f, high_factor * f].

    Chords join breakpoints of f, so the result is FIFO whenever f is and
    never has more points than f. f is linear between its breakpoints, so
    checking the corridor at the skipped breakpoints covers every tau.
    """
    xs = np.append(f.times, f.times[0] + f.period).tolist()
    ys = np.append(f.values, f.values[0]).tolist()
    n = len(xs) - 1

    kept = [0]
    i = 0
    while i < n:
        smin, smax = -math.inf, math.inf
        j = i + 1
        while j < n:
            dx = xs[j] - xs[i]
            smin = max(smin, (low_factor * ys[j] - ys[i]) / dx)
            smax = min(smax, (high_factor * ys[j] - ys[i]) / dx)
            slope = (ys[j + 1] - ys[i]) / (xs[j + 1] - xs[i])
            if not smin <= slope <= smax:
                break
            j += 1
        kept.append(j)
        i = j

    idx = kept[:-1]
    kx, ky = _simplify([xs[k] for k in idx], [ys[k] for k in idx], f.period)
    return TTF._trusted(np.array(kx), np.array(ky), f.period)


def upper_bound(f: TTF, epsilon: float) -> TTF:
    """Simplified u with f <= u <= (1 + epsilon) f."""
    if epsilon == 0 or f.is_constant:
        return f
    return _corridor(f, 1.0, 1.0 + epsilon)


def lower_bound(f: TTF, epsilon: float) -> TTF:
    """Simplified l with f / (1 + epsilon) <= l <= f."""
    if epsilon == 0 or f.is_constant:
        return f
    return _corridor(f, 1.0 / (1.0 + epsilon), 1.0)


def approximate(f: TTF, epsilon: float) -> BoundPair:
    """Lower and upper bounds of f within a factor 1 + epsilon."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    if epsilon == 0 or f.is_constant:
        return BoundPair.exact(f)
    return BoundPair(lower_bound(f, epsilon), upper_bound(f, epsilon))


def link_bounds(a: BoundPair, b: BoundPair) -> BoundPair:
    """Bounds of the chained exact functions (link is monotone for FIFO inputs)."""
    if a.is_exact and b.is_exact:
        return BoundPair.exact(link(a.lower, b.lower))
    return BoundPair(link(a.lower, b.lower), link(a.upper, b.upper))


def minimum_bounds(a: BoundPair, b: BoundPair) -> BoundPair:
    if a.is_exact and b.is_exact:
        return BoundPair.exact(minimum(a.lower, b.lower))
    return BoundPair(minimum(a.lower, b.lower), minimum(a.upper, b.upper))
