"""
Step Function Operations
Exact algebra over piecewise-constant and continuous piecewise-linear functions.
Every quantity is a fractions.Fraction; nothing in this module rounds.
"""

import bisect
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Optional, Sequence

from utils.errors import DomainError, PieceArithmeticError
from utils.rationals import ONE, ZERO, format_rational, to_rational


def _check_unit_interval(lo: Fraction, hi: Fraction) -> None:
    if lo > hi:
        raise DomainError(f"Empty interval [{format_rational(lo)}, {format_rational(hi)}]")
    if lo < 0 or hi > 1:
        raise DomainError(
            f"Interval [{format_rational(lo)}, {format_rational(hi)}] is not contained in [0, 1]"
        )


# ── Piecewise-constant functions ──────────────────────────────────────────────

class StepFunction:
    """
    Piecewise-constant function on [0, 1].

    breakpoints b_0 = 0 < b_1 < ... < b_m = 1 and values v_0..v_{m-1}.
    Piece k is [b_k, b_{k+1}) except the last, which is closed.
    Values at the breakpoints themselves never affect integrals.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints: Sequence[Any], values: Sequence[Any]):
        bps = tuple(to_rational(b) for b in breakpoints)
        vals = tuple(to_rational(v) for v in values)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise DomainError("Breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise DomainError("Breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise DomainError(f"Expected {len(bps) - 1} piece values, got {len(vals)}")
        self.breakpoints = bps
        self.values = vals

    # construction helpers

    @classmethod
    def constant(cls, value: Any) -> "StepFunction":
        return cls((ZERO, ONE), (value,))

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[Any, Any]]) -> "StepFunction":
        """Build from (upto, value) pairs; the last upto must be 1."""
        bps = [ZERO]
        vals = []
        for upto, value in pieces:
            bps.append(to_rational(upto))
            vals.append(to_rational(value))
        return cls(bps, vals)

    @classmethod
    def indicator(cls, lo: Any, hi: Any) -> "StepFunction":
        """1 on [lo, hi], 0 elsewhere (up to measure zero)."""
        lo, hi = to_rational(lo), to_rational(hi)
        _check_unit_interval(lo, hi)
        if lo == hi:
            return cls.constant(ZERO)
        bps = [ZERO]
        vals = []
        if lo > 0:
            bps.append(lo)
            vals.append(ZERO)
        bps.append(hi)
        vals.append(ONE)
        if hi < 1:
            bps.append(ONE)
            vals.append(ZERO)
        return cls(bps, vals)

    # inspection

    def __repr__(self) -> str:
        pieces = ", ".join(
            f"[{format_rational(a)},{format_rational(b)}):{format_rational(v)}"
            for a, b, v in self.pieces()
        )
        return f"StepFunction({pieces})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.breakpoints == other.breakpoints and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.values))

    def pieces(self) -> Iterator[tuple[Fraction, Fraction, Fraction]]:
        """Yield (left, right, value) for every piece."""
        for k, value in enumerate(self.values):
            yield self.breakpoints[k], self.breakpoints[k + 1], value

    def piece_index(self, x: Any) -> int:
        x = to_rational(x)
        if x < 0 or x > 1:
            raise DomainError(f"Point {format_rational(x)} outside [0, 1]")
        return min(bisect.bisect_right(self.breakpoints, x) - 1, len(self.values) - 1)

    def value_at(self, x: Any) -> Fraction:
        return self.values[self.piece_index(x)]

    # algebra

    def integrate(self, lo: Any, hi: Any) -> Fraction:
        """Exact integral over [lo, hi] ⊆ [0, 1]."""
        lo, hi = to_rational(lo), to_rational(hi)
        _check_unit_interval(lo, hi)
        if lo == hi:
            return ZERO
        bps = self.breakpoints
        k = min(bisect.bisect_right(bps, lo) - 1, len(self.values) - 1)
        total = ZERO
        while k < len(self.values) and bps[k] < hi:
            overlap = min(hi, bps[k + 1]) - max(lo, bps[k])
            if overlap > 0:
                total += overlap * self.values[k]
            k += 1
        return total

    def total(self) -> Fraction:
        return sum(((b - a) * v for a, b, v in self.pieces()), ZERO)

    def normalize(self) -> "StepFunction":
        """Merge adjacent pieces with equal values."""
        bps = [self.breakpoints[0]]
        vals: list[Fraction] = []
        for a, b, v in self.pieces():
            if vals and vals[-1] == v:
                bps[-1] = b
            else:
                vals.append(v)
                bps.append(b)
        return StepFunction(bps, vals)

    def map_values(self, fn: Callable[[Fraction], Fraction]) -> "StepFunction":
        return StepFunction(self.breakpoints, [fn(v) for v in self.values])

    def scale(self, factor: Any) -> "StepFunction":
        factor = to_rational(factor)
        return self.map_values(lambda v: v * factor)

    def reflect(self) -> "StepFunction":
        """x ↦ g(1 - x)."""
        bps = [ONE - b for b in reversed(self.breakpoints)]
        return StepFunction(bps, list(reversed(self.values)))

    def cumulative(self) -> "PiecewiseLinear":
        """Antiderivative F(x) = ∫_0^x g as a PiecewiseLinear on [0, 1]."""
        ys = [ZERO]
        for a, b, v in self.pieces():
            ys.append(ys[-1] + (b - a) * v)
        return PiecewiseLinear.from_points(self.breakpoints, ys)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, lambda a, b: a + b)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, lambda a, b: a - b)

    def __mul__(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, lambda a, b: a * b)


def _merged_grid(*functions: StepFunction) -> list[Fraction]:
    grid: set[Fraction] = set()
    for fn in functions:
        grid.update(fn.breakpoints)
    return sorted(grid)


def combine(g: StepFunction, h: StepFunction, op: Callable[[Fraction, Fraction], Fraction]) -> StepFunction:
    """
    Pointwise op(g, h) on the merged breakpoint grid, normalized.

    Raises:
        PieceArithmeticError: If op is undefined on some piece (e.g. division by zero)
    """
    grid = _merged_grid(g, h)
    values = []
    kg = kh = 0
    for a, b in zip(grid, grid[1:]):
        while g.breakpoints[kg + 1] <= a:
            kg += 1
        while h.breakpoints[kh + 1] <= a:
            kh += 1
        try:
            values.append(to_rational(op(g.values[kg], h.values[kh])))
        except ZeroDivisionError as e:
            raise PieceArithmeticError(
                f"Operation undefined on piece [{format_rational(a)}, {format_rational(b)}): {e}",
                piece=(a, b),
            ) from e
    return StepFunction(grid, values).normalize()


def integrate(g: StepFunction, interval: tuple[Any, Any]) -> Fraction:
    lo, hi = interval
    return g.integrate(lo, hi)


# ── Continuous piecewise-linear functions ─────────────────────────────────────

class PiecewiseLinear:
    """
    Continuous piecewise-linear function on a closed interval [lo, hi].

    Piece k covers [x_k, x_{k+1}] with value slope_k * x + intercept_k.
    A single-point domain [a, a] is stored as breakpoints (a,) with one flat piece.
    """

    __slots__ = ("breakpoints", "slopes", "intercepts")

    def __init__(self, breakpoints: Sequence[Any], slopes: Sequence[Any], intercepts: Sequence[Any]):
        bps = tuple(to_rational(b) for b in breakpoints)
        sl = tuple(to_rational(s) for s in slopes)
        ic = tuple(to_rational(c) for c in intercepts)
        if not bps:
            raise DomainError("A piecewise-linear function needs at least one breakpoint")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise DomainError("Breakpoints must be strictly increasing")
        pieces = max(len(bps) - 1, 1)
        if len(sl) != pieces or len(ic) != pieces:
            raise DomainError(f"Expected {pieces} slopes and intercepts")
        if len(bps) == 1 and sl[0] != 0:
            raise DomainError("A single-point function must be flat")
        for k in range(len(bps) - 2):
            x = bps[k + 1]
            if sl[k] * x + ic[k] != sl[k + 1] * x + ic[k + 1]:
                raise DomainError(f"Discontinuity at {format_rational(x)}")
        self.breakpoints = bps
        self.slopes = sl
        self.intercepts = ic

    @classmethod
    def from_points(cls, xs: Sequence[Any], ys: Sequence[Any]) -> "PiecewiseLinear":
        """Linear interpolation through (x_k, y_k), xs strictly increasing."""
        xs = [to_rational(x) for x in xs]
        ys = [to_rational(y) for y in ys]
        if len(xs) != len(ys) or not xs:
            raise DomainError("Need matching, non-empty point lists")
        if len(xs) == 1:
            return cls(xs, [ZERO], ys)
        slopes = []
        intercepts = []
        for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
            if x1 <= x0:
                raise DomainError("Points must have strictly increasing x")
            s = (y1 - y0) / (x1 - x0)
            slopes.append(s)
            intercepts.append(y0 - s * x0)
        return cls(xs, slopes, intercepts)

    @classmethod
    def constant(cls, lo: Any, hi: Any, value: Any) -> "PiecewiseLinear":
        lo, hi = to_rational(lo), to_rational(hi)
        if lo == hi:
            return cls.from_points([lo], [value])
        return cls.from_points([lo, hi], [value, value])

    def __repr__(self) -> str:
        points = ", ".join(
            f"({format_rational(x)},{format_rational(y)})" for x, y in zip(self.breakpoints, self.values)
        )
        return f"PiecewiseLinear({points})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return (self.breakpoints, self.slopes, self.intercepts) == (
            other.breakpoints, other.slopes, other.intercepts
        )

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.slopes, self.intercepts))

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def values(self) -> tuple[Fraction, ...]:
        """Function values at the breakpoints."""
        if len(self.breakpoints) == 1:
            return (self.intercepts[0],)
        out = [s * x + c for x, s, c in zip(self.breakpoints, self.slopes, self.intercepts)]
        out.append(self.slopes[-1] * self.breakpoints[-1] + self.intercepts[-1])
        return tuple(out)

    def pieces(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Yield (left, right, slope, intercept)."""
        if len(self.breakpoints) == 1:
            x = self.breakpoints[0]
            yield x, x, self.slopes[0], self.intercepts[0]
            return
        for k in range(len(self.slopes)):
            yield self.breakpoints[k], self.breakpoints[k + 1], self.slopes[k], self.intercepts[k]

    def evaluate(self, x: Any) -> Fraction:
        x = to_rational(x)
        lo, hi = self.domain
        if x < lo or x > hi:
            raise DomainError(
                f"Point {format_rational(x)} outside [{format_rational(lo)}, {format_rational(hi)}]"
            )
        k = min(max(bisect.bisect_right(self.breakpoints, x) - 1, 0), len(self.slopes) - 1)
        return self.slopes[k] * x + self.intercepts[k]

    __call__ = evaluate

    # algebra

    def _pointwise(self, other: "PiecewiseLinear", op: Callable[[Fraction, Fraction], Fraction]) -> "PiecewiseLinear":
        if self.domain != other.domain:
            raise DomainError("Piecewise-linear operands must share a domain")
        xs = sorted(set(self.breakpoints) | set(other.breakpoints))
        return PiecewiseLinear.from_points(xs, [op(self(x), other(x)) for x in xs])

    def __add__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return self._pointwise(other, lambda a, b: a + b)

    def __sub__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return self._pointwise(other, lambda a, b: a - b)

    def __neg__(self) -> "PiecewiseLinear":
        return self.scale(-1)

    def scale(self, factor: Any) -> "PiecewiseLinear":
        factor = to_rational(factor)
        return PiecewiseLinear(
            self.breakpoints, [s * factor for s in self.slopes], [c * factor for c in self.intercepts]
        )

    def add_constant(self, value: Any) -> "PiecewiseLinear":
        value = to_rational(value)
        return PiecewiseLinear(self.breakpoints, self.slopes, [c + value for c in self.intercepts])

    def shift(self, delta: Any) -> "PiecewiseLinear":
        """x ↦ p(x - delta), on the shifted domain."""
        delta = to_rational(delta)
        return PiecewiseLinear(
            [b + delta for b in self.breakpoints],
            self.slopes,
            [c - s * delta for s, c in zip(self.slopes, self.intercepts)],
        )

    def mirrored(self) -> "PiecewiseLinear":
        """x ↦ p(-x), on [-hi, -lo]."""
        bps = [-b for b in reversed(self.breakpoints)]
        return PiecewiseLinear(bps, [-s for s in reversed(self.slopes)], list(reversed(self.intercepts)))

    def restrict(self, lo: Any, hi: Any) -> "PiecewiseLinear":
        lo, hi = to_rational(lo), to_rational(hi)
        dlo, dhi = self.domain
        if lo > hi or lo < dlo or hi > dhi:
            raise DomainError(
                f"[{format_rational(lo)}, {format_rational(hi)}] not inside "
                f"[{format_rational(dlo)}, {format_rational(dhi)}]"
            )
        if lo == hi:
            return PiecewiseLinear.from_points([lo], [self(lo)])
        xs = [lo] + [b for b in self.breakpoints if lo < b < hi] + [hi]
        return PiecewiseLinear.from_points(xs, [self(x) for x in xs])

    def simplified(self) -> "PiecewiseLinear":
        """Drop breakpoints between collinear pieces."""
        if len(self.breakpoints) <= 2:
            return self
        xs = [self.breakpoints[0]]
        ys = [self.values[0]]
        values = self.values
        for k in range(1, len(self.breakpoints) - 1):
            if self.slopes[k - 1] != self.slopes[k]:
                xs.append(self.breakpoints[k])
                ys.append(values[k])
        xs.append(self.breakpoints[-1])
        ys.append(values[-1])
        return PiecewiseLinear.from_points(xs, ys)

    def running_max(self) -> "PiecewiseLinear":
        """Prefix maximum x ↦ max_{lo ≤ z ≤ x} p(z)."""
        if len(self.breakpoints) == 1:
            return self
        xs = [self.breakpoints[0]]
        ys = [self.values[0]]
        best = ys[0]
        for a, b, s, c in self.pieces():
            vb = s * b + c
            if vb <= best:
                xs.append(b)
                ys.append(best)
                continue
            va = s * a + c
            if va < best:
                cross = (best - c) / s
                xs.append(cross)
                ys.append(best)
            xs.append(b)
            ys.append(vb)
            best = vb
        return PiecewiseLinear.from_points(xs, ys)

    def suffix_max(self) -> "PiecewiseLinear":
        """Suffix maximum x ↦ max_{x ≤ z ≤ hi} p(z)."""
        return self.mirrored().running_max().mirrored()


def window_objective(g: StepFunction, w: Any, feasible: tuple[Any, Any]) -> PiecewiseLinear:
    """
    W(x) = ∫_{x-w/2}^{x+w/2} g over the feasible interval [lo, hi].

    Breakpoints are exactly {b ± w/2 : b a breakpoint of g} inside [lo, hi], plus lo and hi.

    Raises:
        DomainError: If the feasible interval is empty or windows leave [0, 1]
    """
    w = to_rational(w)
    lo, hi = (to_rational(v) for v in feasible)
    if lo > hi:
        raise DomainError(f"Empty feasible interval [{format_rational(lo)}, {format_rational(hi)}]")
    if w <= 0 or w > 1:
        raise DomainError(f"Width {format_rational(w)} outside (0, 1]")
    half = w / 2
    if lo - half < 0 or hi + half > 1:
        raise DomainError(
            f"Windows of width {format_rational(w)} centred in "
            f"[{format_rational(lo)}, {format_rational(hi)}] leave [0, 1]"
        )
    candidates = {lo, hi}
    for b in g.breakpoints:
        for x in (b - half, b + half):
            if lo <= x <= hi:
                candidates.add(x)
    xs = sorted(candidates)
    cdf = g.cumulative()
    return PiecewiseLinear.from_points(xs, [cdf(x + half) - cdf(x - half) for x in xs])


def argmax(p: PiecewiseLinear) -> tuple[Fraction, Fraction]:
    """Leftmost maximizing point and the maximum."""
    values = p.values
    best = max(values)
    return p.breakpoints[values.index(best)], best


def argmax_rightmost(p: PiecewiseLinear) -> tuple[Fraction, Fraction]:
    values = p.values
    best = max(values)
    k = len(values) - 1 - values[::-1].index(best)
    return p.breakpoints[k], best


def level_set(p: PiecewiseLinear, value: Any) -> list[tuple[Fraction, Fraction]]:
    """Maximal closed intervals (possibly single points) where p == value, ascending."""
    value = to_rational(value)
    found: list[tuple[Fraction, Fraction]] = []
    for a, b, s, c in p.pieces():
        if s == 0:
            if c == value:
                found.append((a, b))
            continue
        x = (value - c) / s
        if a <= x <= b:
            found.append((x, x))
    found.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in found:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


class Crossings(NamedTuple):
    """Zeros of p - q; identical=True means p ≡ q and points is empty."""

    points: tuple[Fraction, ...]
    identical: bool


def crossings(p: PiecewiseLinear, q: PiecewiseLinear) -> Crossings:
    """Every point where p - q changes sign or touches zero."""
    diff = p - q
    if all(v == 0 for v in diff.values):
        return Crossings(points=(), identical=True)
    points: set[Fraction] = set()
    for lo, hi in level_set(diff, ZERO):
        points.add(lo)
        points.add(hi)
    return Crossings(points=tuple(sorted(points)), identical=False)


def upper_envelope(p: PiecewiseLinear, q: PiecewiseLinear) -> PiecewiseLinear:
    """Pointwise max of two functions on the same domain."""
    if p.domain != q.domain:
        raise DomainError("Envelope operands must share a domain")
    xs = set(p.breakpoints) | set(q.breakpoints)
    xs.update(crossings(p, q).points)
    grid = sorted(xs)
    return PiecewiseLinear.from_points(grid, [max(p(x), q(x)) for x in grid])


def first_point_at_or_after(intervals: Sequence[tuple[Fraction, Fraction]], floor: Fraction) -> Optional[Fraction]:
    """Smallest point of a sorted interval union that is ≥ floor, or None."""
    for lo, hi in intervals:
        if hi >= floor:
            return max(lo, floor)
    return None
