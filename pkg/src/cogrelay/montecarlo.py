"""Seeded Monte-Carlo estimators for outage, bit error rate, and capacity.

Trials are processed in fixed-size blocks of 65536; block i always draws
from the substream (seed, i) regardless of how blocks are grouped into
chunks, and block partials are reduced in block order.  Estimates are
therefore bit-identical for any chunk count, which is what makes the
chunking safe to parallelize later without changing results.

The BER estimator is semi-analytic: it averages the instantaneous AWGN
BER over channel draws rather than simulating bits, which is the same
expectation with strictly less variance.  The capacity estimator
averages log2(1 + min hop SNR)/K, i.e. it validates the weakest-hop
approximation, not exact regenerative-relaying capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ber import instantaneous_ber, qam_constants
from .channel import sample_exponential, substream
from .scenario import Scenario, derive_hop_statistics

BLOCK_TRIALS = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    trials: int
    seed: int


def mc_outage(
    scenario: Scenario, trials: int, seed: int, chunks: int = 1
) -> McEstimate:
    """Fraction of trials whose weakest hop SNR falls below gamma_th."""
    gamma_th = scenario.gamma_th

    def kernel(snr: np.ndarray) -> np.ndarray:
        return (snr.min(axis=1) < gamma_th).astype(float)

    return _run(scenario, trials, seed, chunks, kernel)


def mc_ber(
    scenario: Scenario, trials: int, seed: int, chunks: int = 1
) -> McEstimate:
    """Semi-analytic end-to-end BER estimate.

    Per trial: instantaneous BER of every hop from its SNR draw, chained
    by the odd-number-of-errors recursion, then averaged.
    """
    constants = qam_constants(scenario.qam_order)

    def kernel(snr: np.ndarray) -> np.ndarray:
        hop = instantaneous_ber(snr, constants)
        acc = np.zeros(snr.shape[0])
        for p in range(snr.shape[1] - 1, -1, -1):
            acc = hop[:, p] + (1.0 - 2.0 * hop[:, p]) * acc
        return acc

    return _run(scenario, trials, seed, chunks, kernel)


def mc_capacity(
    scenario: Scenario, trials: int, seed: int, chunks: int = 1
) -> McEstimate:
    """Average of log2(1 + min hop SNR) / K."""
    k = scenario.hop_count

    def kernel(snr: np.ndarray) -> np.ndarray:
        return np.log2(1.0 + snr.min(axis=1)) / k

    return _run(scenario, trials, seed, chunks, kernel)


def _run(scenario, trials, seed, chunks, kernel) -> McEstimate:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if chunks < 1:
        raise ValueError("chunks must be >= 1")
    stats = derive_hop_statistics(scenario)
    lam_d = np.array([h.lambda_d for h in stats])
    lam_i = np.array([h.lambda_i for h in stats])
    ip = scenario.ip_over_n0

    n_blocks = (trials + BLOCK_TRIALS - 1) // BLOCK_TRIALS
    per_chunk = (n_blocks + chunks - 1) // chunks
    partials: list[tuple[float, float]] = [None] * n_blocks  # type: ignore

    for chunk in range(chunks):
        for block in range(chunk * per_chunk, min((chunk + 1) * per_chunk, n_blocks)):
            n = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
            rng = substream(seed, block)
            x = sample_exponential(rng, 1.0, (n, lam_d.size)) * lam_d
            y = np.maximum(sample_exponential(rng, 1.0, (n, lam_i.size)) * lam_i, 1e-300)
            values = kernel(ip * x / y)
            partials[block] = (float(values.sum()), float((values * values).sum()))

    total = 0.0
    total_sq = 0.0
    for s, sq in partials:  # fixed block order: reduction order never varies
        total += s
        total_sq += sq
    mean = total / trials
    if trials > 1:
        var = max(total_sq - trials * mean * mean, 0.0) / (trials - 1)
    else:
        var = 0.0
    return McEstimate(
        value=mean,
        std_error=math.sqrt(var / trials),
        trials=trials,
        seed=seed,
    )
