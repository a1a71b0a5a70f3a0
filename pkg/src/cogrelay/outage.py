"""End-to-end outage probability: exact, high-SNR asymptote, and gains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Pair = tuple[float, float]


@dataclass(frozen=True)
class OutageResult:
    op_exact: float
    op_asymptotic: float
    diversity_order: float
    coding_gain: float


def outage_exact(alphas: Sequence[float], gamma_th: float) -> float:
    """P(min hop SNR < gamma_th) = 1 - prod_k alpha_k/(gamma_th+alpha_k)."""
    alphas = list(alphas)
    if not alphas:
        raise ValueError("need at least one hop")
    if any(a <= 0 for a in alphas):
        raise ValueError("alphas must be positive")
    if gamma_th < 0:
        raise ValueError("gamma_th must be non-negative")
    if gamma_th == 0:
        return 0.0
    if len(alphas) > 16:
        # deep multihop: the plain product can underflow
        log_p = sum(math.log(a) - math.log(gamma_th + a) for a in alphas)
        return 1.0 - math.exp(log_p)
    p = 1.0
    for a in alphas:
        p *= a / (gamma_th + a)
    return 1.0 - p


def outage_asymptotic(
    lambda_pairs: Sequence[Pair], ip_over_n0: float, gamma_th: float
) -> float:
    """High-SNR approximation (gamma_th/(I_p/N_0)) * sum_k lambda_i/lambda_d."""
    _check_pairs(lambda_pairs)
    if ip_over_n0 <= 0:
        raise ValueError("ip_over_n0 must be positive")
    if gamma_th < 0:
        raise ValueError("gamma_th must be non-negative")
    return (gamma_th / ip_over_n0) * sum(li / ld for ld, li in lambda_pairs)


def diversity_coding_gain(
    lambda_pairs: Sequence[Pair], gamma_th: float
) -> tuple[float, float]:
    """(G_d, G_c) of the high-SNR law OP -> (G_c * I_p/N_0)^(-G_d).

    The diversity order is 1 for any number of hops; only the coding
    gain improves with more hops.
    """
    _check_pairs(lambda_pairs)
    if gamma_th <= 0:
        raise ValueError("gamma_th must be positive for a finite coding gain")
    ratio_sum = sum(li / ld for ld, li in lambda_pairs)
    return 1.0, 1.0 / (gamma_th * ratio_sum)


def outage_report(
    lambda_pairs: Sequence[Pair], ip_over_n0: float, gamma_th: float
) -> OutageResult:
    """All outage metrics for one parameter point."""
    alphas = [(ld / li) * ip_over_n0 for ld, li in lambda_pairs]
    gd, gc = diversity_coding_gain(lambda_pairs, gamma_th)
    return OutageResult(
        op_exact=outage_exact(alphas, gamma_th),
        op_asymptotic=outage_asymptotic(lambda_pairs, ip_over_n0, gamma_th),
        diversity_order=gd,
        coding_gain=gc,
    )


def _check_pairs(lambda_pairs) -> None:
    if not lambda_pairs:
        raise ValueError("need at least one hop")
    if any(ld <= 0 or li <= 0 for ld, li in lambda_pairs):
        raise ValueError("lambda pairs must be positive")
