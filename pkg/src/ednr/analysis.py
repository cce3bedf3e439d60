"""Analytic lower bounds and approximation-ratio certificates.

Everything that feeds an inequality is exact: level sums are Fractions,
losses are ints.  The only floating-point quantity is the logarithmic
lower bound, which is reporting-only and never compared against anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BetaAbsent, CapExceeded, InvalidShape
from .instance import make_uniform_grid
from .minmin import beta, minmin_profile, minmin_tree
from .spanning_tree import SubtreeProfile, evaluate

Rational = int | Fraction


def level_size(rows: int, cols: int, k: int) -> int:
    """Number of grid vertices at distance k from the corner."""
    return min(k, rows - 1, cols - 1, rows + cols - 2 - k) + 1


def suffix_size(rows: int, cols: int, k: int) -> int:
    """Number of grid vertices at distance k or more from the corner."""
    return sum(level_size(rows, cols, j) for j in range(k, rows + cols - 1))


@dataclass(frozen=True)
class BoundReport:
    """Lower bounds on the optimal loss of the uniform corner-rooted grid.

    sum_bound is the exact per-level congestion bound; log_bound the
    closed-form (ln n - 2) n^2 m^2 simplification.  Both are strict:
    every spanning tree loses strictly more.
    """

    sum_bound: Fraction
    log_bound: float
    strict: bool = True


def lower_bound(rows: int, cols: int) -> BoundReport:
    """Congestion bound: levels 1..cols-1 each cost at least
    (vertices at or beyond the level)^2 / (level width)."""
    if rows < 2 or rows > cols:
        raise InvalidShape(f"need 2 <= rows <= cols, got ({rows}, {cols})")
    total = Fraction(0)
    suffix = rows * cols
    for k in range(1, cols):
        suffix -= level_size(rows, cols, k - 1)
        total += Fraction(suffix * suffix, level_size(rows, cols, k))
    return BoundReport(
        sum_bound=total,
        log_bound=(math.log(rows) - 2) * rows * rows * cols * cols,
    )


def bauer_bound(t: int, total: Rational) -> Fraction:
    """Largest possible sum of squares of t balanced non-negatives
    summing to `total`: 9 total^2 / (8 t)."""
    assert t >= 1 and total >= 0
    return Fraction(9) * total * total / (8 * t)


def relaxed_curve(t: int, total: Rational, k: Rational) -> Fraction:
    """Sum of squares when k coordinates sit at the low value and t - k at
    twice the low value, with the low value chosen to meet the sum."""
    return Fraction((4 * t - 3 * k) * total * total, (2 * t - k) ** 2)


@dataclass(frozen=True)
class BauerResult:
    """Extreme-point enumeration versus the closed-form bound."""

    t: int
    total: Fraction
    per_k: tuple[Fraction, ...]
    brute_max: Fraction
    closed_bound: Fraction

    def relaxed(self, k: Rational) -> Fraction:
        return relaxed_curve(self.t, self.total, k)


def bauer_bruteforce(t: int, total: Rational, cap: int = 12) -> BauerResult:
    """Enumerate the two-value extreme points (k low coordinates, t - k
    doubled ones) and verify the maximum stays within the closed bound."""
    if t > cap:
        raise CapExceeded(f"t = {t} exceeds cap {cap}")
    assert t >= 1 and total >= 0
    total = Fraction(total)
    per_k = tuple(relaxed_curve(t, total, k) for k in range(t + 1))
    brute_max = max(per_k)
    closed = bauer_bound(t, total)
    assert brute_max <= closed
    return BauerResult(
        t=t, total=total, per_k=per_k, brute_max=brute_max, closed_bound=closed
    )


@dataclass(frozen=True)
class TailBound:
    """Exact loss beyond the split level versus its 4 n^2 m^2 cap."""

    tail_sum: int
    bound: int


def right_part_bound(
    rows: int, cols: int, profile: SubtreeProfile, split: int | None
) -> TailBound:
    """Loss of levels deeper than the split index, capped by 4 n^2 m^2."""
    if split is None:
        raise BetaAbsent("no split level: the whole grid is constant-size")
    tail = sum(
        a * a for k in range(split + 1, profile.depth + 1) for a in profile.sizes(k)
    )
    n, m = rows, cols
    assert tail <= 4 * n**3 * m <= 4 * n * n * m * m
    return TailBound(tail_sum=tail, bound=4 * n * n * m * m)


@dataclass(frozen=True)
class HeadBound:
    """Exact loss up to the split level versus its balancedness cap."""

    head_sum: int
    bound: Fraction


def left_part_bound(
    rows: int, cols: int, profile: SubtreeProfile, split: int | None
) -> HeadBound:
    """Loss of levels 1..split, capped by 9/8 of the congestion sum."""
    if split is None:
        raise BetaAbsent("no split level: the whole grid is constant-size")
    head = sum(a * a for k in range(1, split + 1) for a in profile.sizes(k))
    cap = Fraction(9, 8) * sum(
        Fraction(suffix_size(rows, cols, k) ** 2, level_size(rows, cols, k))
        for k in range(1, split + 1)
    )
    assert head <= cap
    return HeadBound(head_sum=head, bound=cap)


@dataclass(frozen=True)
class RatioCertificate:
    """Finite-size approximation-ratio certificate.

    The heuristic loss divided by the strict lower bound upper-bounds the
    true approximation ratio at this grid size; split losses show how much
    of the heuristic loss sits below and beyond the split level.
    """

    rows: int
    cols: int
    minmin_loss: int
    lower_bound: Fraction
    ratio_upper: Fraction
    split: int | None
    head_loss: int
    tail_loss: int

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "minmin_loss": self.minmin_loss,
            "lower_bound": str(self.lower_bound),
            "ratio_upper": str(self.ratio_upper),
            "ratio_upper_float": float(self.ratio_upper),
            "split_level": self.split,
            "head_loss": self.head_loss,
            "tail_loss": self.tail_loss,
        }


def ratio_certificate(rows: int, cols: int) -> RatioCertificate:
    """Certified ratio: heuristic loss over the strict congestion bound."""
    if rows < 2 or rows > cols:
        raise InvalidShape(f"need 2 <= rows <= cols, got ({rows}, {cols})")
    tree = minmin_tree(rows, cols)
    loss = evaluate(make_uniform_grid(rows, cols), tree).total
    bound = lower_bound(rows, cols).sum_bound
    profile = minmin_profile(rows, cols)
    split = beta(profile)
    head = sum(
        a * a
        for k in range(1, (split or 0) + 1)
        for a in profile.sizes(k)
    )
    return RatioCertificate(
        rows=rows,
        cols=cols,
        minmin_loss=loss,
        lower_bound=bound,
        ratio_upper=Fraction(loss) / bound,
        split=split,
        head_loss=head,
        tail_loss=profile.loss() - head,
    )
