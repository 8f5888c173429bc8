"""Iteration engine for (d,g,h)-maps, with the 3x+1 map as the flagship case.

One application of the map sends x to (g*x + h(g*x)) / d**k, where h is a
period-d table forcing divisibility and k is the exact multiplicity of d in
the numerator.  The module provides exact stepping and path recording, the
inverse-path structure check (every multiplicity tuple is realised by exactly
two full arithmetic progressions), pooled multiplicity statistics, the ratio
of an iterate to its drift-predicted size as a mod-1 statistic with exact
leading-digit extraction, the matching geometric-sum sampler, and
leading-digit censuses over whole trajectories of enormous seeds.

Seed censuses run vectorised in int64 whenever a conservative overflow bound
allows it and fall back to exact big-integer loops otherwise; digit decisions
are never made from a float that could sit on a digit boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Integral

import mpmath
import numpy as np

from .benford_stats import DigitHistogram, benford_probabilities
from .core_numeric import BigNat, DomainError, leading_digit, log_mantissa, \
    shift_out_factor

__all__ = [
    "DghMap",
    "dgh_map",
    "THREE_X_PLUS_1",
    "THREE_X_MINUS_1",
    "FIVE_X_PLUS_1",
    "PathRecord",
    "StructurePrediction",
    "IterationDomainError",
    "StructureError",
    "step",
    "path",
    "structure_predict",
    "inverse_path_bruteforce",
    "path_probability_check",
    "census_1mod6",
    "kvalue_histogram",
    "KValueStats",
    "ratio_statistic",
    "geometric_model_sample",
    "geometric_model_points",
    "drift",
    "ratio_digit_experiment",
    "model_digit_experiment",
    "RatioDigitResult",
    "iterate_digit_experiment",
    "IterateDigitResult",
    "ks_distance",
]

_LN2 = math.log(2.0)


class IterationDomainError(DomainError):
    """Domain violation in the middle of a path; carries the failing index."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class StructureError(RuntimeError):
    """The inverse-path match set is not two full arithmetic progressions."""


@dataclass(frozen=True)
class DghMap:
    """Map x -> (g*x + h(g*x)) / d**k with h given as a residue table mod d.

    Entry ``h[r]`` applies when g*x = r (mod d); residue 0 cannot occur for
    x in the domain (d does not divide g*x), so ``h[0]`` may be None.
    """

    d: int
    g: int
    h: tuple

    def __post_init__(self):
        if self.d < 2 or self.g <= self.d:
            raise DomainError("need g > d >= 2")
        if math.gcd(self.d, self.g) != 1:
            raise DomainError("d and g must be coprime")
        if len(self.h) != self.d:
            raise DomainError("h must be a table of d residue values")
        for r in range(1, self.d):
            hv = self.h[r]
            if hv is None or not 0 < abs(hv) < self.g:
                raise DomainError(f"h({r}) must satisfy 0 < |h| < g")
            if (r + hv) % self.d != 0:
                raise DomainError(f"h({r}) must make r + h(r) divisible by d")

    def in_domain(self, x) -> bool:
        return x >= 1 and x % self.d != 0 and x % self.g != 0

    def h_at(self, u) -> int:
        return self.h[u % self.d]


def dgh_map(d: int, g: int, h) -> DghMap:
    """Build a DghMap from a residue->value mapping or a length-d sequence."""
    if isinstance(h, dict):
        table = tuple(h.get(r) for r in range(d))
    else:
        table = tuple(h)
    return DghMap(d, g, table)


THREE_X_PLUS_1 = DghMap(2, 3, (None, 1))
THREE_X_MINUS_1 = DghMap(2, 3, (None, -1))
FIVE_X_PLUS_1 = DghMap(2, 5, (None, 1))


@dataclass(frozen=True)
class PathRecord:
    """A seed with its multiplicity tuple (k_1..k_m), optionally the iterates."""

    seed: BigNat
    m: int
    kvalues: tuple
    iterates: tuple | None = None

    def to_json(self) -> str:
        doc = {"seed": str(self.seed), "m": self.m,
               "kvalues": list(self.kvalues)}
        if self.iterates is not None:
            doc["iterates"] = [str(x) for x in self.iterates]
        return json.dumps(doc)


@dataclass(frozen=True)
class StructurePrediction:
    """Modulus (and, once found, the two base residues) of an inverse path."""

    modulus: BigNat
    residues: tuple | None = None


def step(dmap: DghMap, x: BigNat) -> tuple[BigNat, int]:
    """One exact application: returns (y, k) with g*x + h = y * d**k."""
    if not dmap.in_domain(x):
        raise DomainError(f"{x} is divisible by d or g (or < 1)")
    u = dmap.g * x
    u += dmap.h_at(u)
    y, k = shift_out_factor(u, dmap.d)
    return y, k


def path(dmap: DghMap, x0: BigNat, m: int, record_iterates: bool = True
         ) -> PathRecord:
    """Apply the map m times, recording every multiplicity."""
    if m < 1:
        raise DomainError("m must be >= 1")
    x = int(x0)
    ks = []
    iterates = [] if record_iterates else None
    for i in range(m):
        try:
            y, k = step(dmap, x)
        except DomainError as exc:
            raise IterationDomainError(
                f"domain violation at step {i}: {exc}", index=i) from exc
        # exact reconstruction guard: g*x + h == y * d**k
        assert dmap.g * x + dmap.h_at(dmap.g * x) == y * dmap.d ** k
        x = y
        ks.append(k)
        if iterates is not None:
            iterates.append(y)
    return PathRecord(int(x0), m, tuple(ks),
                      tuple(iterates) if iterates is not None else None)


# ------------------------------------------------------- structure checks --

def structure_predict(ktuple) -> StructurePrediction:
    ks = tuple(int(k) for k in ktuple)
    if not ks or any(k < 1 for k in ks):
        raise DomainError("every multiplicity must be >= 1")
    return StructurePrediction(6 * 2 ** sum(ks))


def _domain_int64(limit: int) -> np.ndarray:
    ones = np.arange(1, limit + 1, 6, dtype=np.int64)
    fives = np.arange(5, limit + 1, 6, dtype=np.int64)
    return np.concatenate([ones, fives])


def _match_ktuple_3x1(ktuple, limit: int) -> np.ndarray:
    """Seeds x <= limit in the 3x+1 domain whose path starts with ktuple."""
    if limit * 3 ** len(ktuple) * 2 > 2 ** 62:
        raise DomainError("limit too large for the vectorised scan")
    xs = _domain_int64(limit)
    cur = xs.copy()
    ok = np.ones(xs.shape, dtype=bool)
    for target in ktuple:
        u = 3 * cur + 1
        low = u & -u
        k = np.log2(low.astype(np.float64)).astype(np.int64)
        ok &= k == target
        cur = u >> k
    return np.sort(xs[ok])


def inverse_path_bruteforce(ktuple, limit: int) -> StructurePrediction:
    """Exhaustively find every 3x+1 seed below ``limit`` with the given
    multiplicity tuple and verify the match set is exactly two full
    arithmetic progressions of modulus 6*2^(sum k), one in each residue
    class of {1, 5} mod 6.  Raises StructureError otherwise."""
    pred = structure_predict(ktuple)
    a = pred.modulus
    if limit < 2 * a:
        raise DomainError(f"limit must be at least two periods (2*{a})")
    matches = _match_ktuple_3x1(tuple(int(k) for k in ktuple), limit)
    residues = np.unique(matches % a) if matches.size else np.array([])
    if residues.size != 2:
        raise StructureError(
            f"expected exactly 2 residues mod {a}, found {residues.size}")
    b1, b2 = (int(r) for r in residues)
    if sorted((b1 % 6, b2 % 6)) != [1, 5]:
        raise StructureError(
            f"residues {b1}, {b2} do not fall in classes {{1, 5}} mod 6")
    expected = np.sort(np.concatenate([
        np.arange(b1, limit + 1, a, dtype=np.int64),
        np.arange(b2, limit + 1, a, dtype=np.int64)]))
    if not np.array_equal(matches, expected):
        raise StructureError("match set is not two full progressions")
    return StructurePrediction(a, (b1, b2))


def path_probability_check(ktuple, limit: int) -> tuple[float, float]:
    """Empirical density of seeds realising ktuple vs 2^(-sum k)."""
    ks = tuple(int(k) for k in ktuple)
    matches = _match_ktuple_3x1(ks, limit)
    n_domain = _domain_int64(limit).size
    return matches.size / n_domain, 2.0 ** -sum(ks)


# ------------------------------------------------------------ seed census --

def census_1mod6(start: int, count: int):
    """``count`` consecutive integers congruent to 1 mod 6 from ``start``."""
    if start % 6 != 1:
        raise DomainError("start must be congruent to 1 mod 6")
    if count < 1:
        raise DomainError("count must be >= 1")
    top = start + 6 * (count - 1)
    if top < 2 ** 62:
        return start + 6 * np.arange(count, dtype=np.int64)
    return [start + 6 * i for i in range(count)]


_K_SLOTS = 64  # pooled multiplicity counts are binned up to this value


def _paths_int64(seeds: np.ndarray, m: int, dmap: DghMap):
    x = np.array(seeds, dtype=np.int64)
    if (x % dmap.d == 0).any() or (x % dmap.g == 0).any():
        raise DomainError("every seed must avoid the factors d and g")
    s_tot = np.zeros(x.shape, dtype=np.int64)
    khist = np.zeros(_K_SLOTS, dtype=np.int64)
    cap = (2 ** 62) // dmap.g
    fast = dmap.d == 2
    htab = np.array([v if v is not None else 0 for v in dmap.h],
                    dtype=np.int64)
    for _ in range(m):
        if x.max() > cap:
            raise OverflowError("census values exceed the int64 budget")
        u = dmap.g * x
        u += htab[u % dmap.d]
        if fast:
            low = u & -u
            k = np.log2(low.astype(np.float64)).astype(np.int64)
            x = u >> k
        else:
            k = np.zeros(x.shape, dtype=np.int64)
            while True:
                q, r = np.divmod(u, dmap.d)
                mask = r == 0
                if not mask.any():
                    break
                u = np.where(mask, q, u)
                k += mask
            x = u
        s_tot += k
        khist += np.bincount(np.minimum(k, _K_SLOTS - 1),
                             minlength=_K_SLOTS)
    return x, s_tot, khist


def _paths_python(seeds, m: int, dmap: DghMap):
    xm, s_tot = [], []
    khist = np.zeros(_K_SLOTS, dtype=np.int64)
    for x0 in seeds:
        x = int(x0)
        s = 0
        for _ in range(m):
            x, k = step(dmap, x)
            s += k
            khist[min(k, _K_SLOTS - 1)] += 1
        xm.append(x)
        s_tot.append(s)
    return xm, np.array(s_tot, dtype=np.int64), khist


def _census_paths(seeds, m: int, dmap: DghMap):
    arr = np.asarray(seeds) if not isinstance(seeds, list) else None
    if arr is None:
        try:
            arr = np.asarray(seeds, dtype=np.int64)
        except (OverflowError, TypeError, ValueError):
            arr = None
    if arr is not None and arr.dtype != object and \
            np.issubdtype(arr.dtype, np.integer):
        # conservative worst-case growth: one multiply by g per step
        if int(arr.max()).bit_length() + m * math.log2(dmap.g) < 61:
            try:
                return _paths_int64(arr, m, dmap)
            except OverflowError:
                pass
    return _paths_python(list(seeds), m, dmap)


@dataclass
class KValueStats:
    """Pooled multiplicity histogram over a census, vs the geometric law."""

    d: int
    counts: np.ndarray
    total: int

    def empirical(self, n: int) -> float:
        return self.counts[n] / self.total if n < len(self.counts) else 0.0

    def reference(self, n: int) -> float:
        return (self.d - 1) / self.d ** n

    @property
    def mean(self) -> float:
        n = np.arange(len(self.counts))
        return float((n * self.counts).sum() / self.total)

    @property
    def variance(self) -> float:
        n = np.arange(len(self.counts))
        mu = self.mean
        return float((self.counts * (n - mu) ** 2).sum() / self.total)


def kvalue_histogram(dmap: DghMap, seeds, m: int) -> KValueStats:
    """Histogram of all m * len(seeds) multiplicities along the census."""
    if len(seeds) == 0:
        raise DomainError("need a nonempty census")
    _, _, khist = _census_paths(seeds, m, dmap)
    return KValueStats(dmap.d, khist, int(khist.sum()))


# ---------------------------------------------------------- ratio statistic --

def _frac_mul_log(mult: int, x, base) -> float:
    """frac(mult * log_base(x)) at enough precision for any integer mult."""
    with mpmath.workdps(30 + len(str(abs(mult) + 1))):
        return float(mpmath.frac(mult * mpmath.log(x) / mpmath.log(base))) % 1.0


def ratio_statistic(x0: BigNat, m: int, base) -> float:
    """log_base( x_m / ((3/4)^m x_0) ) mod 1 for the 3x+1 map.

    Works purely in log space with exact integer exponents, so m in the
    millions cannot overflow and no float power of 3/4 is ever formed.
    """
    if m == 0:
        return 0.0
    if m < 0:
        raise DomainError("m must be >= 0")
    x = int(x0)
    if not THREE_X_PLUS_1.in_domain(x):
        raise DomainError(f"{x0} is not in the 3x+1 domain")
    for i in range(m):
        try:
            x, _ = step(THREE_X_PLUS_1, x)
        except DomainError as exc:  # pragma: no cover - domain is closed
            raise IterationDomainError(str(exc), index=i) from exc
    v = (log_mantissa(x, base) - log_mantissa(x0, base)
         - _frac_mul_log(m, 3, base) + _frac_mul_log(2 * m, 2, base))
    return v % 1.0


def geometric_model_sample(m: int, base, rng: np.random.Generator) -> float:
    """(sum of m iid geometric(1/2) draws - 2m) * log_base(2), mod 1."""
    if m < 1:
        raise DomainError("m must be >= 1")
    s = int(rng.geometric(0.5, size=m).sum())
    return _model_frac(np.array([s]), m, base)[0]


def geometric_model_points(m: int, base, n: int,
                           rng: np.random.Generator) -> np.ndarray:
    """n independent copies of the model statistic (negative-binomial form
    of the geometric sum; identical law, no n*m scratch array)."""
    if m < 1 or n < 1:
        raise DomainError("m and n must be >= 1")
    s = m + rng.negative_binomial(m, 0.5, size=n).astype(np.int64)
    return _model_frac(s, m, base)


def _model_frac(s: np.ndarray, m: int, base) -> np.ndarray:
    n_pow = _exact_log2(base)
    j = s - 2 * m
    if n_pow is not None:
        return np.mod(j, n_pow) / float(n_pow)
    c = _LN2 / math.log(base)
    return np.mod(j * c, 1.0)


def _exact_log2(base) -> int | None:
    """n when base == 2**n for integer n >= 1, else None."""
    if isinstance(base, Integral):
        b = int(base)
        if b >= 2 and b & (b - 1) == 0:
            return b.bit_length() - 1
    return None


def drift(dmap: DghMap) -> float:
    """log g - (d/(d-1)) log d; negative drift means contracting paths."""
    return math.log(dmap.g) - dmap.d / (dmap.d - 1) * math.log(dmap.d)


# ------------------------------------------------- exact ratio digit census --

def _leading_digit_ratio(num: int, den: int, base: int) -> int:
    """Exact leading base-`base` digit of the positive rational num/den."""
    e = int(math.floor((num.bit_length() - den.bit_length())
                       * _LN2 / math.log(base))) - 1
    while num >= den * base ** (e + 1):
        e += 1
    while num < den * base ** e:
        e -= 1
    if e >= 0:
        return num // (den * base ** e)
    return (num * base ** (-e)) // den


@lru_cache(maxsize=4096)
def _pow2_digit(j: int, base: int) -> int:
    """Exact leading digit of 2**j (j of either sign) in ``base``."""
    return _leading_digit_ratio(1 << max(j, 0), 1 << max(-j, 0), base)


def _ratio_digit_exact(x0: int, xm: int, m: int, base: int) -> int:
    return _leading_digit_ratio(int(xm) << (2 * m), 3 ** m * int(x0), base)


@dataclass
class RatioDigitResult:
    base: int
    m: int
    n_seeds: int
    histogram: DigitHistogram
    predicted: np.ndarray
    model_histogram: DigitHistogram | None = None
    ks_vs_model: float | None = None

    def observed_freq(self) -> np.ndarray:
        return self.histogram.frequencies()

    def to_text_table(self) -> str:
        header = f"{'First Digit':>11} {'Observed':>12} {'Predicted':>12}"
        lines = [header]
        freq = self.observed_freq()
        for d in range(1, self.base):
            lines.append(f"{d:>11d} {100 * freq[d - 1]:>11.1f}% "
                         f"{100 * self.predicted[d - 1]:>11.1f}%")
        return "\n".join(lines)


def limit_law_digit_probabilities(base: int) -> np.ndarray:
    """Limiting digit law of the ratio statistic: uniform on the powers of
    two below a power-of-two base, the logarithmic law otherwise."""
    n_pow = _exact_log2(base)
    if n_pow is None:
        return benford_probabilities(base)
    probs = np.zeros(base - 1)
    for j in range(n_pow):
        probs[2 ** j - 1] = 1.0 / n_pow
    return probs


def ratio_digit_experiment(seeds, m: int, base: int) -> RatioDigitResult:
    """Leading digit of x_m / ((3/4)^m x_0) over a census, exactly.

    The digit comes from exact integer data: with S the total multiplicity,
    the ratio is 2^(2m-S) * u where u = prod(1 + 1/(3 x_i)) >= 1.  When u is
    certifiably too small to push the mantissa over the next digit boundary
    the digit is a table lookup on 2m-S; otherwise (tiny iterates, unusual
    bases) it is recomputed from the full integer ratio.
    """
    base = int(base)
    if base < 2:
        raise DomainError("base must be >= 2")
    xm, s_tot, _ = _census_paths(seeds, m, THREE_X_PLUS_1)
    n_pow = _exact_log2(base)
    if isinstance(xm, list):
        digits = [_ratio_digit_exact(int(s0), xi, m, base)
                  for s0, xi in zip(list(seeds), xm)]
        hist = DigitHistogram.from_digits(digits, base)
        return RatioDigitResult(base, m, len(xm), hist,
                                limit_law_digit_probabilities(base))
    seeds_arr = np.asarray(seeds, dtype=np.int64)
    j = 2 * m - s_tot
    # log2 of the correction u; exact arithmetic decides flagged seeds
    ulog2 = (np.log2(xm.astype(np.float64)) + s_tot
             - m * math.log2(3.0) - np.log2(seeds_arr.astype(np.float64)))
    safe = _u_safety_threshold(base)
    if n_pow is not None:
        flagged = np.nonzero(ulog2 > safe)[0]
        digits = (np.int64(1) << np.mod(j, n_pow)).astype(np.int64)
    elif base == 10:
        # the table gap bound is certified for |j| <= 128
        flagged = np.nonzero((ulog2 > safe) | (np.abs(j) > 128))[0]
        lut_off = int(j.min())
        lut = np.array([_pow2_digit(int(v), 10)
                        for v in range(lut_off, int(j.max()) + 1)],
                       dtype=np.int64)
        digits = lut[j - lut_off]
    else:
        flagged = np.arange(len(j))
        digits = np.ones(len(j), dtype=np.int64)
    for i in flagged:
        digits[i] = _ratio_digit_exact(int(seeds_arr[i]), int(xm[i]), m, base)
    hist = DigitHistogram.from_digits(digits, base)
    return RatioDigitResult(base, m, len(xm), hist,
                            limit_law_digit_probabilities(base))


def _u_safety_threshold(base: int) -> float:
    """Largest log2(u) that certifiably cannot move a lattice digit."""
    n_pow = _exact_log2(base)
    if n_pow is not None:
        if n_pow == 1:
            return math.inf  # base 2: the digit is 1 regardless of u
        return 0.5 * math.log2(1.0 + 2.0 ** -(n_pow - 1))
    if base == 10:
        # min gap between the mantissa of 2^j and the next digit boundary
        # over |j| <= 128 is log10(10/9.9035) ~ 4.2e-3 (at j = 93)
        return 0.5 * 4.2e-3 / math.log10(2.0)
    return -1.0  # unknown base: everything goes through the exact path


def model_digit_experiment(m: int, base: int, n: int,
                           rng: np.random.Generator) -> DigitHistogram:
    """Digit histogram of the geometric-sum model, via exact lattice digits."""
    base = int(base)
    s = m + rng.negative_binomial(m, 0.5, size=n).astype(np.int64)
    j = s - 2 * m
    lut_off = int(j.min())
    lut = np.array([_pow2_digit(int(v), base)
                    for v in range(lut_off, int(j.max()) + 1)], dtype=np.int64)
    return DigitHistogram.from_digits(lut[j - lut_off], base)


def _log2_int(x: int) -> float:
    return (int(x).bit_length() - 1) + log_mantissa(int(x), 2)


def ratio_fracs(seeds, m: int, base) -> np.ndarray:
    """Float values of the ratio statistic over a census (for distribution
    plots and KS comparisons; digit decisions use the exact path instead)."""
    xm, s_tot, _ = _census_paths(seeds, m, THREE_X_PLUS_1)
    c = _LN2 / math.log(base)
    if isinstance(xm, list):
        # log2 of the correction u = x_m 2^S / (3^m x_0), built from exact
        # exponent bookkeeping so huge seeds cancel without loss
        ulog2 = np.array([
            _log2_int(x) - _log2_int(int(s0)) + float(s) - m * math.log2(3.0)
            for s0, x, s in zip(list(seeds), xm, s_tot)])
    else:
        ulog2 = (np.log2(xm.astype(np.float64)) + s_tot
                 - m * math.log2(3.0)
                 - np.log2(np.asarray(seeds, np.float64)))
    j = np.asarray(2 * m - s_tot, dtype=np.float64)
    return np.mod(j * c + ulog2 * c, 1.0)


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov sup distance."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


# --------------------------------------------------- trajectory digit census --

MODES = ("remove_all_twos", "single_step")


@dataclass
class IterateDigitResult:
    mode: str
    base: int
    histogram: DigitHistogram
    n_recorded: int
    reached_one: bool


def iterate_digit_experiment(x0: BigNat, mode: str, base: int = 10,
                             max_iters: int = 10 ** 7) -> IterateDigitResult:
    """Record the leading digit of every iterate of a 3x+1 trajectory.

    ``remove_all_twos`` applies x -> (3x+1)/2^k (an even seed is first
    reduced to its odd part, which counts as one recorded value);
    ``single_step`` applies 3x+1 to odd x and x/2 to even x.  Iteration
    stops at 1 or after ``max_iters`` recorded values.  Digit extraction is
    exact at every size.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    x = int(x0)
    if x < 2:
        raise DomainError("x0 must be >= 2")
    base = int(base)
    counts = np.zeros(base - 1, dtype=np.int64)
    counts[leading_digit(x, base) - 1] += 1
    n_rec = 1
    if mode == "remove_all_twos" and x % 2 == 0:
        x >>= (x & -x).bit_length() - 1
        counts[leading_digit(x, base) - 1] += 1
        n_rec += 1
    single = mode == "single_step"
    while x != 1 and n_rec < max_iters:
        if single:
            x = 3 * x + 1 if x & 1 else x >> 1
        else:
            u = 3 * x + 1
            x = u >> ((u & -u).bit_length() - 1)
        counts[leading_digit(x, base) - 1] += 1
        n_rec += 1
    return IterateDigitResult(mode, base, DigitHistogram(base, counts),
                              n_rec, x == 1)
