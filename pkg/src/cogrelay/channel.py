"""Per-hop SNR law under the interference-power cap.

With the transmitter always using the largest power the primary
receiver tolerates, the hop SNR is gamma = (I_p/N_0) * X/Y with X, Y
independent exponentials, giving the heavy-tailed density
alpha/(gamma+alpha)^2.  The distribution has no finite mean.
"""

from __future__ import annotations

import numpy as np

_TINY = 1e-300  # guard against a zero interference-channel draw


def snr_pdf(gamma, alpha: float):
    """Density alpha/(gamma+alpha)^2 of the per-hop SNR."""
    _check(gamma, alpha)
    g = np.asarray(gamma, dtype=float)
    out = alpha / (g + alpha) ** 2
    return float(out) if np.isscalar(gamma) else out


def snr_cdf(gamma, alpha: float):
    """Distribution function gamma/(gamma+alpha), in [0, 1)."""
    _check(gamma, alpha)
    g = np.asarray(gamma, dtype=float)
    out = g / (g + alpha)
    return float(out) if np.isscalar(gamma) else out


def _check(gamma, alpha):
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be non-negative")


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 generator for stream `index` of a seeded run.

    The (seed, index) pair is mixed through numpy's SeedSequence
    entropy/spawn-key hash, so any two indices give statistically
    independent streams and the mapping is stable across processes.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    )


def sample_exponential(rng: np.random.Generator, mean: float, size=None):
    """Inverse-CDF exponential draws -mean*ln(U) with U uniform on (0, 1]."""
    u = rng.random(size)
    # rng.random() is uniform on [0, 1); 1-u is uniform on (0, 1].
    return -mean * np.log1p(-u)


def sample_hop_snr(
    rng: np.random.Generator,
    lambda_d: float,
    lambda_i: float,
    ip_over_n0: float,
    size=None,
):
    """Draw per-hop SNR values (I_p/N_0) * X/Y, X~Exp(lambda_d), Y~Exp(lambda_i)."""
    if lambda_d <= 0 or lambda_i <= 0 or ip_over_n0 <= 0:
        raise ValueError("parameters must be positive")
    x = sample_exponential(rng, lambda_d, size)
    y = np.maximum(sample_exponential(rng, lambda_i, size), _TINY)
    return ip_over_n0 * x / y
