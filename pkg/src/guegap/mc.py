"""Monte Carlo cross-validation of the determinant route to gap probabilities.

Spectra are drawn from the n x n Gaussian unitary ensemble with matrix
density proportional to e^(-tr X^2).  Matching e^(-tr X^2) =
e^(-sum_i X_ii^2 - 2 sum_{i<j} |X_ij|^2) fixes the entry scales: diagonal
entries are real N(0, 1/2), off-diagonal real and imaginary parts are
N(0, 1/4) each.  The induced joint eigenvalue density is then proportional
to prod_{i<j} (x_i - x_j)^2 prod_l e^(-x_l^2), so the fraction of spectra
avoiding (-a, a) (or contained in it) estimates the same probability that
the Hankel-determinant ratio D_n(a)/C_n computes exactly.

Sampling uses numpy Philox-family generators spawned from a single seed;
trials are partitioned into fixed per-worker chunks with independent
spawned streams, so results are bit-reproducible for a given
(seed, workers) regardless of scheduling.  Double precision suffices here:
the statistical error dominates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import hp
from .hp import HPReal
from .moments import WeightParams, build_table
from .ortho import build_recurrence


class GapCase(str, Enum):
    """Which spectral event is being estimated."""

    #: no eigenvalue in (-a, a); weight configuration (A, B) = (0, 1)
    COMPLEMENT = "complement"
    #: all eigenvalues inside (-a, a); weight configuration (A, B) = (1, -1)
    BULK = "bulk"


@dataclass(frozen=True)
class NormalizationC:
    """C_n = (2 pi)^(n/2) 2^(-n^2/2) G(n+1), the partition-function constant."""

    n: int
    C_n: HPReal


@dataclass(frozen=True)
class GapEstimate:
    n: int
    a: float
    case: GapCase
    trials: int
    p_hat: float
    std_err: float
    seed: int
    workers: int


def normalization(n: int, prec: int = 128) -> NormalizationC:
    """The normalisation C_n via the Barnes-G recursion (intended n <= 16)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    two_pi = 2 * hp.pi(prec)
    # (2 pi)^(n/2) 2^(-n^2/2) = sqrt((2 pi)^n / 2^(n^2))
    value = hp.sqrt(two_pi ** n / HPReal(1 << (n * n), prec), prec)
    return NormalizationC(n=n, C_n=value * hp.barnes_g(n + 1, prec))


def _sample_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues of ``count`` GUE draws, shape (count, n), ascending."""
    diag = rng.normal(0.0, math.sqrt(0.5), size=(count, n))
    iu = np.triu_indices(n, 1)
    H = np.zeros((count, n, n), dtype=np.complex128)
    if n > 1:
        m = len(iu[0])
        re = rng.normal(0.0, 0.5, size=(count, m))
        im = rng.normal(0.0, 0.5, size=(count, m))
        H[:, iu[0], iu[1]] = re + 1j * im
        H += np.conj(np.swapaxes(H, 1, 2))
    H[:, np.arange(n), np.arange(n)] = diag
    return np.linalg.eigvalsh(H)


def sample_spectrum(n: int, rng: np.random.Generator) -> np.ndarray:
    """One GUE spectrum (ascending eigenvalues)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _sample_batch(n, 1, rng)[0]


def _count_hits(n, a, case, trials, stream, chunk):
    rng = np.random.default_rng(stream)
    hits = 0
    left = trials
    while left > 0:
        c = min(chunk, left)
        w = _sample_batch(n, c, rng)
        if case is GapCase.COMPLEMENT:
            hits += int(np.sum(np.all(np.abs(w) >= a, axis=1)))
        else:
            hits += int(np.sum(np.all(np.abs(w) < a, axis=1)))
        left -= c
    return hits


def gap_estimate(n: int, a: float, case: GapCase | str, trials: int, seed: int,
                 workers: int = 1, chunk: int = 100_000) -> GapEstimate:
    """Estimate the gap probability by direct spectrum sampling.

    The result is bit-reproducible for fixed (seed, workers): worker w
    processes a fixed share of the trials with the w-th spawned child
    stream, and the hit counts are summed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if trials < 1:
        raise ValueError("trials must be positive")
    if workers < 1:
        raise ValueError("workers must be positive")
    case = GapCase(case)
    a = float(a)
    streams = np.random.SeedSequence(seed).spawn(workers)
    share = trials // workers
    counts = [share + (1 if w < trials % workers else 0) for w in range(workers)]
    if workers == 1:
        hits = _count_hits(n, a, case, trials, streams[0], chunk)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_count_hits, n, a, case, cnt, s, chunk)
                       for cnt, s in zip(counts, streams)]
            hits = sum(f.result() for f in futures)
    p_hat = hits / trials
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return GapEstimate(n=n, a=a, case=case, trials=trials, p_hat=p_hat,
                       std_err=std_err, seed=seed, workers=workers)


def case_params(case: GapCase | str, a, prec: int = 256) -> WeightParams:
    """The weight configuration whose Hankel determinant matches a case."""
    case = GapCase(case)
    if case is GapCase.COMPLEMENT:
        return WeightParams(A=0, B=1, a=a, prec=prec)
    return WeightParams(A=1, B=-1, a=a, prec=prec)


def determinant_probability(n: int, a, case: GapCase | str,
                            prec: int = 256) -> HPReal:
    """The exact route: D_n(a) / C_n for the case's weight configuration."""
    if n < 1:
        raise ValueError("n must be at least 1")
    params = case_params(case, a, prec)
    table = build_recurrence(build_table(params, n), n)
    log_cn = hp.log(normalization(n, prec).C_n, prec)
    return hp.exp(table.logD[n] - log_cn, prec)


def compare(n: int, a, case: GapCase | str, trials: int, seed: int,
            workers: int = 1, prec: int = 256) -> dict:
    """Sampled estimate vs determinant value, with the z-score between them."""
    est = gap_estimate(n, float(a), case, trials, seed, workers=workers)
    det = determinant_probability(n, a, case, prec)
    z = (est.p_hat - float(det)) / est.std_err if est.std_err > 0 else math.inf
    return {"estimate": est, "determinant": det, "z_score": z}
