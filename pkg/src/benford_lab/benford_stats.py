"""Leading-digit histograms, the logarithmic reference law, chi-square and
z-statistic reports, and exact discrepancy computations for point sets mod 1.

Discrepancies use the half-open convention: points live in [0, 1) and
interval masses are counted over [a, b).  Both discrepancy evaluators are
exact maxima over the finite critical set of the sorted sample, O(N log N).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sstats

from .core_numeric import DomainError, leading_digit

__all__ = [
    "benford_probability",
    "benford_probabilities",
    "DigitHistogram",
    "TestReport",
    "DiscrepancyReport",
    "chi_square",
    "z_statistics",
    "star_discrepancy",
    "extreme_discrepancy",
    "erdos_turan_bound",
    "discrepancy_report",
    "ERDOS_TURAN_C",
]

# classical explicit constant making the bound valid for every point set
ERDOS_TURAN_C = 3.0


def benford_probability(d: int, base: int = 10) -> float:
    """P(leading digit = d) = log_base(1 + 1/d)."""
    if not 1 <= d <= base - 1:
        raise DomainError(f"digit must lie in [1, {base - 1}], got {d}")
    return math.log1p(1.0 / d) / math.log(base)


def benford_probabilities(base: int = 10) -> np.ndarray:
    d = np.arange(1, base)
    return np.log1p(1.0 / d) / math.log(base)


@dataclass
class DigitHistogram:
    """Counts of leading digits 1..base-1; merge is associative/commutative."""

    base: int
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.base < 2 or self.counts.shape != (self.base - 1,):
            raise DomainError("counts must have length base - 1")

    @classmethod
    def empty(cls, base: int) -> "DigitHistogram":
        return cls(base, np.zeros(base - 1, dtype=np.int64))

    @classmethod
    def from_digits(cls, digits, base: int) -> "DigitHistogram":
        counts = np.bincount(np.asarray(digits, dtype=np.int64),
                             minlength=base)[1:base]
        return cls(base, counts)

    @classmethod
    def from_values(cls, values, base: int = 10) -> "DigitHistogram":
        return cls.from_digits([leading_digit(v, base) for v in values], base)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise DomainError("empty histogram")
        return self.counts / self.total

    def add_digit(self, d: int, count: int = 1) -> None:
        self.counts[d - 1] += count

    def __add__(self, other: "DigitHistogram") -> "DigitHistogram":
        if other.base != self.base:
            raise DomainError("cannot merge histograms with different bases")
        return DigitHistogram(self.base, self.counts + other.counts)


@dataclass
class TestReport:
    """Per-digit comparison against the logarithmic law plus a chi-square."""

    base: int
    total: int
    per_digit: list  # rows (digit, observed_freq, benford_prob, z_stat)
    chi_square: float
    dof: int
    verdict_alpha05: bool

    def to_json(self) -> str:
        return json.dumps({
            "base": self.base,
            "total": self.total,
            "per_digit": [
                {"digit": d, "observed": o, "benford": p, "z": z}
                for d, o, p, z in self.per_digit
            ],
            "chi_square": self.chi_square,
            "dof": self.dof,
            "verdict_alpha05": self.verdict_alpha05,
        })

    def to_text_table(self) -> str:
        lines = [f"{'First Digit':>11} {'Observed':>10} {'Benford':>10} "
                 f"{'z-statistic':>12}"]
        for d, o, p, z in self.per_digit:
            lines.append(f"{d:>11d} {o:>10.4f} {p:>10.4f} {z:>12.2f}")
        lines.append(f"chi-square = {self.chi_square:.2f} on {self.dof} dof "
                     f"(alpha=.05 {'accept' if self.verdict_alpha05 else 'reject'})")
        return "\n".join(lines)


def chi_square(hist: DigitHistogram) -> tuple[float, int]:
    """Pearson statistic against Benford expectations; dof = base - 2."""
    n = hist.total
    if n == 0:
        raise DomainError("chi_square needs a nonempty histogram")
    expected = n * benford_probabilities(hist.base)
    stat = float(((hist.counts - expected) ** 2 / expected).sum())
    return stat, hist.base - 2


def z_statistics(hist: DigitHistogram) -> TestReport:
    n = hist.total
    if n == 0:
        raise DomainError("z_statistics needs a nonempty histogram")
    obs = hist.frequencies()
    probs = benford_probabilities(hist.base)
    z = (obs - probs) / np.sqrt(probs * (1.0 - probs) / n)
    stat, dof = chi_square(hist)
    crit = float(_sstats.chi2.ppf(0.95, dof))
    rows = [(int(d + 1), float(obs[d]), float(probs[d]), float(z[d]))
            for d in range(hist.base - 1)]
    return TestReport(hist.base, n, rows, stat, dof, stat < crit)


def _sorted_unit_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 1 or pts.size == 0:
        raise DomainError("points must be a nonempty 1-D sequence")
    pts = pts - np.floor(pts)  # reduce mod 1 defensively
    return np.sort(pts)


def star_discrepancy(points) -> float:
    """Exact D*_N over anchored intervals [0, a)."""
    y = _sorted_unit_points(points)
    n = y.size
    i = np.arange(1, n + 1)
    return float(np.maximum(i / n - y, y - (i - 1) / n).max())


def extreme_discrepancy(points) -> float:
    """Exact two-sided discrepancy sup |mass[a,b) - (b-a)| over subintervals.

    With A_k = k/N - y_(k), the overfull side is 1/N + max_{i<=j}(A_j - A_i)
    (intervals clamped to a run of points) and the underfull side is
    1/N + max_{i<j}(A_i - A_j) over the sentinel-extended sequence
    (open gaps, including the two boundary gaps).  Two prefix scans.
    """
    y = _sorted_unit_points(points)
    n = y.size
    a = np.arange(1, n + 1) / n - y
    d_plus = 1.0 / n + float((a - np.minimum.accumulate(a)).max())
    ext = np.concatenate(([0.0], a, [1.0 / n]))
    d_minus = 1.0 / n + float(
        (np.maximum.accumulate(ext)[:-1] - ext[1:]).max())
    return max(d_plus, d_minus, 0.0)


def erdos_turan_bound(points, m: int) -> float:
    """C * (1/m + sum_{h<=m} |S_h| / (h N)) with C = 3 and S_h the
    exponential sum of the points at frequency h."""
    if m < 1:
        raise DomainError("m must be >= 1")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 1 or pts.size == 0:
        raise DomainError("points must be a nonempty 1-D sequence")
    n = pts.size
    z = np.exp(2j * np.pi * pts)
    p = z.copy()
    acc = 0.0
    for h in range(1, m + 1):
        acc += abs(p.sum()) / (h * n)
        if h < m:
            p *= z
    return ERDOS_TURAN_C * (1.0 / m + acc)


@dataclass
class DiscrepancyReport:
    n_points: int
    star: float
    extreme: float
    erdos_turan: float
    m_used: int
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "n_points": self.n_points, "star": self.star,
            "extreme": self.extreme, "erdos_turan": self.erdos_turan,
            "m_used": self.m_used, **self.meta,
        })

    def to_text_table(self) -> str:
        return (f"{'N':>10} {'D*_N':>14} {'D_N':>14} {'ET bound':>14} {'m':>6}\n"
                f"{self.n_points:>10d} {self.star:>14.6e} "
                f"{self.extreme:>14.6e} {self.erdos_turan:>14.6e} "
                f"{self.m_used:>6d}")


def discrepancy_report(points, m: int = 100) -> DiscrepancyReport:
    pts = np.asarray(points, dtype=np.float64)
    return DiscrepancyReport(
        n_points=pts.size,
        star=star_discrepancy(pts),
        extreme=extreme_discrepancy(pts),
        erdos_turan=erdos_turan_bound(pts, m),
        m_used=m,
    )
