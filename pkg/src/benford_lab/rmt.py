"""Haar-random unitary matrices and the distribution of the log-magnitude of
their characteristic polynomial, log|det(I - U e^(-i theta))|.

Sampling uses the standard recipe: a complex Ginibre matrix is QR-factored
and the columns are rephased so the triangular factor has a real positive
diagonal, which makes the distribution exactly Haar.  The log-magnitude of
the determinant comes from row-pivoted elimination (LAPACK slogdet), summing
the log-magnitudes of the triangular diagonal, so no eigen-decomposition is
needed and values remain finite for every nonsingular sample up to N = 512.

Monte Carlo runs are sharded into fixed-size chunks with generator streams
spawned up front, so results are reproducible and independent of the worker
count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .benford_stats import DigitHistogram
from .core_numeric import DomainError

__all__ = [
    "EULER_GAMMA",
    "SingularMatrixError",
    "UnitarySample",
    "LogZSample",
    "MomentsReport",
    "CueResult",
    "haar_unitary",
    "unitarity_residual",
    "log_abs_charpoly",
    "q2_variance",
    "cue_experiment",
]

EULER_GAMMA = 0.5772156649015329

_MAX_DIM = 512
_LOG_FLOOR = -690.0  # |Z| below e^-690 (~1e-300) is treated as singular


class SingularMatrixError(RuntimeError):
    """theta coincided with an eigenangle to machine precision."""


@dataclass(frozen=True)
class UnitarySample:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_dim(n: int) -> None:
    if not 1 <= n <= _MAX_DIM:
        raise DomainError(f"dimension must lie in [1, {_MAX_DIM}]")


def _haar_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((count, n, n))
         + 1j * rng.standard_normal((count, n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary(n: int, rng: np.random.Generator) -> UnitarySample:
    """One n x n unitary matrix distributed with Haar measure."""
    _check_dim(n)
    return UnitarySample(_haar_batch(n, 1, rng)[0])


def unitarity_residual(u: np.ndarray) -> float:
    """max-norm of U*U - I."""
    n = u.shape[0]
    return float(np.abs(u.conj().T @ u - np.eye(n)).max())


def log_abs_charpoly(u, theta: float) -> float:
    """log|det(I - U e^(-i theta))| by row-pivoted elimination."""
    mat = u.matrix if isinstance(u, UnitarySample) else np.asarray(u)
    n = mat.shape[0]
    a = np.eye(n) - mat * complex(math.cos(theta), -math.sin(theta))
    _, log_abs = np.linalg.slogdet(a)
    if not np.isfinite(log_abs) or log_abs < _LOG_FLOOR:
        raise SingularMatrixError(
            "theta lies on an eigenangle; resample theta")
    return float(log_abs)


def q2_variance(n: int) -> float:
    """Variance of log|Z|: log(N)/2 + (gamma+1)/2 + 1/(24 N^2)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return math.log(n) / 2.0 + (EULER_GAMMA + 1.0) / 2.0 + 1.0 / (24.0 * n * n)


@dataclass(frozen=True)
class LogZSample:
    dim: int
    theta: float
    log_abs: float
    standardized: float


@dataclass
class MomentsReport:
    n: int
    mean: float
    variance: float
    q2_reference: float
    skewness: float
    kurtosis: float

    def to_json(self) -> str:
        return json.dumps({
            "n_samples": self.n, "mean": self.mean,
            "variance": self.variance, "q2_reference": self.q2_reference,
            "skewness": self.skewness, "kurtosis": self.kurtosis,
        })


@dataclass
class CueResult:
    dim: int
    base: int
    thetas: np.ndarray
    log_abs: np.ndarray
    histogram: DigitHistogram
    moments: MomentsReport
    resampled: int = 0
    max_unitarity_residual: float | None = None

    CSV_COLUMNS = ("dim", "theta", "log_abs", "standardized")

    def iter_samples(self):
        scale = math.sqrt(q2_variance(self.dim))
        for th, la in zip(self.thetas, self.log_abs):
            yield LogZSample(self.dim, float(th), float(la),
                             float(la) / scale)

    def csv_rows(self):
        scale = math.sqrt(q2_variance(self.dim))
        for th, la in zip(self.thetas, self.log_abs):
            yield [str(self.dim), f"{th:.12f}", f"{la:.12e}",
                   f"{la / scale:.12e}"]


def _digits_from_logs(log_abs: np.ndarray, base: int) -> np.ndarray:
    lb = math.log(base)
    f = np.mod(log_abs / lb, 1.0)
    bounds = np.log(np.arange(1, base + 1)) / lb
    return np.clip(np.searchsorted(bounds, f, side="right"), 1, base - 1)


def _cue_chunk(n, count, base, gen, check_unitarity):
    us = _haar_batch(n, count, gen)
    resid = None
    if check_unitarity:
        eye = np.eye(n)
        resid = max(float(np.abs(u.conj().T @ u - eye).max()) for u in us)
    thetas = gen.uniform(0.0, 2.0 * math.pi, size=count)
    resampled = 0
    while True:
        rot = np.exp(-1j * thetas)[:, None, None]
        _, log_abs = np.linalg.slogdet(np.eye(n) - us * rot)
        bad = ~np.isfinite(log_abs) | (log_abs < _LOG_FLOOR)
        if not bad.any():
            break
        resampled += int(bad.sum())
        thetas[bad] = gen.uniform(0.0, 2.0 * math.pi, size=int(bad.sum()))
    counts = np.bincount(_digits_from_logs(log_abs, base),
                         minlength=base)[1:base]
    return thetas, log_abs, counts, resampled, resid


def cue_experiment(n: int, n_samples: int, base: int,
                   rng: np.random.Generator, *, chunk_size: int = 1024,
                   workers: int = 1,
                   check_unitarity: bool = False) -> CueResult:
    """Sample (U, theta) pairs, emit log|Z| with its digit histogram and a
    moments report against the reference variance q2_variance(n).

    Chunk streams are spawned before any work is dispatched, so the result
    is a pure function of (rng state, n, n_samples, base, chunk_size) and in
    particular does not depend on the worker count.
    """
    _check_dim(n)
    if n < 2:
        raise DomainError("the digit experiment needs n >= 2")
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    sizes = [chunk_size] * (n_samples // chunk_size)
    if n_samples % chunk_size:
        sizes.append(n_samples % chunk_size)
    streams = rng.spawn(len(sizes))

    def work(args):
        gen, count = args
        return _cue_chunk(n, count, base, gen, check_unitarity)

    tasks = list(zip(streams, sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    thetas = np.concatenate([r[0] for r in results])
    log_abs = np.concatenate([r[1] for r in results])
    counts = np.sum([r[2] for r in results], axis=0)
    resampled = sum(r[3] for r in results)
    resid = max((r[4] for r in results if r[4] is not None), default=None)
    if check_unitarity and resid is not None and resid > 1e-10:
        raise RuntimeError(f"unitarity residual {resid:.2e} exceeds 1e-10")

    mean = float(log_abs.mean())
    var = float(log_abs.var(ddof=1))
    centered = log_abs - mean
    m2 = float((centered ** 2).mean())
    skew = float((centered ** 3).mean() / m2 ** 1.5)
    kurt = float((centered ** 4).mean() / m2 ** 2)
    moments = MomentsReport(len(log_abs), mean, var, q2_variance(n),
                            skew, kurt)
    return CueResult(n, base, thetas, log_abs,
                     DigitHistogram(base, counts.astype(np.int64)), moments,
                     resampled, resid)
