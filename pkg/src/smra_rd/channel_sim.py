"""Monte Carlo check of the Gaussian test channel and its linear estimator.

Source model, for one predecessor ``j`` of the requested source ``k``::

    X_j ~ N(0, Sigma_j)
    X_k = X_j + W,        W   ~ N(0, Sigma)        (Sigma = conditional covariance)
    U   = X_k + Psi,      Psi ~ N(0, delta I)
    Xhat = A U + B X_j,   A = Sigma (delta I + Sigma)^-1,  B = I - A

``B = I - A`` makes ``Xhat`` the conditional mean of ``X_k`` given
``(U, X_j)``; its error covariance is ``(I/delta + Sigma^-1)^-1`` and the
average distortion is ``(1/n) sum_i lambda_i delta / (lambda_i + delta)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .covariance import ToeplitzMatrix, build_covariance, Memoryless
from .errors import InvalidParameter, InvalidSampleCount, SingularSystem

__all__ = [
    "TestChannel",
    "SimResult",
    "build_estimator",
    "printed_b_matrix",
    "analytic_distortion",
    "analytic_rate",
    "expected_distortion",
    "simulate",
    "max_workers",
]

MIN_SAMPLES = 100
MAX_DIM = 4096
_BATCH = 4096


def max_workers() -> int:
    """Parallelism cap from ``SMRA_RD_THREADS`` (default: CPU count)."""
    raw = os.environ.get("SMRA_RD_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class TestChannel:
    """Test channel for one (requested source, predecessor) pair."""

    __test__ = False

    cond: ToeplitzMatrix
    marginal: np.ndarray
    delta: float
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.cond.n

    @property
    def sigma(self) -> np.ndarray:
        return self.cond.dense

    def error_covariance(self) -> np.ndarray:
        """``(I/delta + Sigma^-1)^-1``, the error covariance of the conditional-mean estimator."""
        n = self.n
        return np.linalg.inv(np.eye(n) / self.delta + np.linalg.inv(self.sigma))


def printed_b_matrix(sigma: np.ndarray, delta: float, marginal: np.ndarray) -> np.ndarray:
    """``(I + delta Sigma)^-1 Sigma Sigma_j^-1``, kept for comparison only."""
    n = sigma.shape[0]
    left = scipy.linalg.solve(np.eye(n) + delta * sigma, sigma)
    return scipy.linalg.solve(marginal.T, left.T).T


def build_estimator(cond: ToeplitzMatrix, delta: float, marginal=None, printed_b: bool = False) -> TestChannel:
    """Assemble the estimator matrices for noise variance ``delta``.

    Parameters
    ----------
    cond : ToeplitzMatrix
        Conditional covariance of the requested source given the predecessor.
    marginal : ToeplitzMatrix or array_like, optional
        Covariance of the predecessor; identity by default.
    printed_b : bool
        Use ``(I + delta Sigma)^-1 Sigma Sigma_j^-1`` for ``B`` instead of
        ``I - A``.  That form does not reach the Eq.-style average distortion;
        see :func:`expected_distortion` to measure the gap.
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise InvalidParameter(f"delta must be positive and finite, got {delta!r}")
    n = cond.n
    if n > MAX_DIM:
        raise InvalidParameter(f"dimension {n} exceeds the simulation limit {MAX_DIM}")
    if marginal is None:
        marg = build_covariance(Memoryless(1.0), n).dense
    else:
        marg = np.asarray(marginal.dense if isinstance(marginal, ToeplitzMatrix) else marginal, dtype=float)
        if marg.shape != (n, n):
            raise InvalidParameter(f"marginal covariance has shape {marg.shape}, expected {(n, n)}")
    sigma = cond.dense
    try:
        # sigma and (delta I + sigma) commute, so this is sigma (delta I + sigma)^-1
        A = scipy.linalg.solve(delta * np.eye(n) + sigma, sigma, assume_a="pos")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem(str(exc)) from None
    A = 0.5 * (A + A.T)
    B = printed_b_matrix(sigma, delta, marg) if printed_b else np.eye(n) - A
    A.flags.writeable = False
    B.flags.writeable = False
    return TestChannel(cond, marg, float(delta), A, B)


def analytic_distortion(chan: TestChannel) -> float:
    """Average of the diagonal of ``(I/delta + Sigma^-1)^-1``."""
    return float(np.trace(chan.error_covariance()) / chan.n)


def analytic_rate(chan: TestChannel) -> float:
    """``log2(det(Sigma + delta I) / det(delta I)) / (2n)`` in bits per symbol."""
    n = chan.n
    sign, logdet = np.linalg.slogdet(chan.sigma + chan.delta * np.eye(n))
    if sign <= 0:
        raise SingularSystem("Sigma + delta I is not positive-definite")
    return float((logdet - n * math.log(chan.delta)) / (2 * n * math.log(2)))


def expected_distortion(chan: TestChannel, A=None, B=None) -> float:
    """Exact mean squared error of ``Xhat = A U + B X_j`` for arbitrary gains.

    The error is ``(I - A - B) X_j + (I - A) W - A Psi``, so its average
    variance is a sum of three traces.
    """
    A = chan.A if A is None else np.asarray(A)
    B = chan.B if B is None else np.asarray(B)
    eye = np.eye(chan.n)
    C = eye - A - B
    E = eye - A
    total = np.trace(C @ chan.marginal @ C.T) + np.trace(E @ chan.sigma @ E.T) + chan.delta * np.sum(A * A)
    return float(total / chan.n)


@dataclass(frozen=True)
class SimResult:
    samples: int
    empirical: float
    std_error: float
    analytic_distortion: float
    analytic_rate: float
    seed: int

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.empirical == self.analytic_distortion else math.inf
        return (self.empirical - self.analytic_distortion) / self.std_error

    def passed(self, k: float = 3.0) -> bool:
        """``|empirical - analytic| <= k * std_error``, with a round-off allowance."""
        slack = 1e-12 * max(1.0, abs(self.analytic_distortion))
        return abs(self.empirical - self.analytic_distortion) <= k * self.std_error + slack

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed()
        return d


def _factor(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise SingularSystem("covariance factorization failed") from None


def _run_shard(chan: TestChannel, samples: int, rng: np.random.Generator, chol_w, chol_j):
    """Sum and sum of squares of per-sample distortion over ``samples`` draws."""
    n = chan.n
    root_delta = math.sqrt(chan.delta)
    A, B = chan.A, chan.B
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(_BATCH, samples - done)
        xj = rng.standard_normal((m, n)) @ chol_j.T
        xk = xj + rng.standard_normal((m, n)) @ chol_w.T
        u = xk + root_delta * rng.standard_normal((m, n))
        xhat = u @ A.T + xj @ B.T
        per = np.mean((xk - xhat) ** 2, axis=1)
        total += float(per.sum())
        total_sq += float(per @ per)
        done += m
    return total, total_sq


def simulate(chan: TestChannel, samples: int = 100_000, seed: int = 0, shards: int = 1) -> SimResult:
    """Empirical average distortion of the estimator over ``samples`` draws.

    With ``shards == 1`` a single ``numpy`` PCG64 stream seeded with ``seed``
    is used and the result is bit-reproducible.  With more shards, shard
    ``s`` draws from the stream seeded by ``(seed, s)``; shards run on up to
    :func:`max_workers` threads and are merged in shard order.
    """
    if int(samples) != samples or samples < MIN_SAMPLES:
        raise InvalidSampleCount(f"need at least {MIN_SAMPLES} samples, got {samples!r}")
    if shards < 1:
        raise InvalidParameter("shards must be >= 1")
    samples = int(samples)
    seed = int(seed)
    chol_w = _factor(chan.sigma)
    chol_j = _factor(chan.marginal)
    if shards == 1:
        parts = [_run_shard(chan, samples, np.random.default_rng(seed), chol_w, chol_j)]
    else:
        sizes = [samples // shards + (s < samples % shards) for s in range(shards)]
        rngs = [np.random.default_rng([seed, s]) for s in range(shards)]
        with ThreadPoolExecutor(max_workers=min(shards, max_workers())) as pool:
            parts = list(pool.map(lambda a: _run_shard(chan, a[0], a[1], chol_w, chol_j), zip(sizes, rngs)))
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    return SimResult(
        samples=samples,
        empirical=mean,
        std_error=math.sqrt(var / samples),
        analytic_distortion=analytic_distortion(chan),
        analytic_rate=analytic_rate(chan),
        seed=seed,
    )


def with_gains(chan: TestChannel, A=None, B=None) -> TestChannel:
    """Copy of ``chan`` with replaced estimator gains (for perturbation studies)."""
    return replace(
        chan,
        A=chan.A if A is None else np.asarray(A, dtype=float),
        B=chan.B if B is None else np.asarray(B, dtype=float),
    )
