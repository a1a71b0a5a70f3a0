"""Relay placement on the linear network.

solve_equal_ratio implements the balanced-ratio optimality condition:
all hops share the same data-to-interference distance ratio, with hop
lengths found by a damped Newton iteration started from the uniform
layout.  direct_search minimizes the underlying objective
sum_k (d_data_k / d_interf_k)^eta over the simplex directly; it is a
diagnostic, because the balanced-ratio point is a stationary point of
an arithmetic-geometric mean bound whose product term itself varies
with placement, so the direct optimum can be (slightly) better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .ber import QamConstants
from .errors import ConfigError, ConvergenceError, InfeasibleError, NumericError
from .numerics import NewtonOptions, NewtonResult, newton_system

_D_MIN = 1e-6  # feasibility floor for hop lengths during iteration


@dataclass(frozen=True)
class PlacementResult:
    """Solved relay layout.

    d_data sums to one; ratio is the common d_data/d_interference value;
    residual_norm is the sup-norm of the solved (scaled) system.  op_min
    and ber_min are filled in by the corresponding evaluators.
    """

    d_data: tuple[float, ...]
    d_interference: tuple[float, ...]
    ratio: float
    residual_norm: float
    iterations: int
    op_min: Optional[float] = None
    ber_min: Optional[float] = None

    @property
    def hop_count(self) -> int:
        return len(self.d_data)

    def ratio_product(self) -> float:
        return math.prod(
            d / di for d, di in zip(self.d_data, self.d_interference)
        )


def _check_pu(pu_coord) -> tuple[float, float]:
    px, py = float(pu_coord[0]), float(pu_coord[1])
    if py == 0.0 and 0.0 <= px <= 1.0:
        raise ConfigError(
            "primary receiver on the source-destination segment makes "
            "interference distances degenerate"
        )
    return px, py


def interference_distances(d_data, pu_coord) -> list[float]:
    """Transmitter-to-primary distances for the hop lengths d_data."""
    px, py = pu_coord
    out = []
    pos = 0.0
    for d in d_data:
        out.append(math.hypot(px - pos, py))
        pos += d
    return out


def placement_objective(d_data, pu_coord, eta: float) -> float:
    """sum_k (d_data_k / d_interf_k)^eta, the quantity both outage and
    BER asymptotes scale with."""
    dists = interference_distances(d_data, pu_coord)
    return sum((d / di) ** eta for d, di in zip(d_data, dists))


def solve_equal_ratio(
    hop_count: int,
    pu_coord,
    options: Optional[NewtonOptions] = None,
) -> PlacementResult:
    """Hop lengths making every d_data/d_interference ratio equal.

    Solves, for k = 2..K and with the sum-to-one constraint eliminated
    by substitution, the system

        (x_p - sum_{p<k} d_p)^2 + y_p^2 = (x_p^2 + y_p^2) (d_k/d_1)^2,

    by Newton from the uniform layout d_k = 1/K.  Each equation is
    normalized by x_p^2 + y_p^2 so the residual tolerance is meaningful
    for arbitrarily distant primary receivers.  On non-convergence the
    start point is perturbed (up to 5 restarts).
    """
    if hop_count < 1:
        raise ConfigError("hop_count must be >= 1")
    px, py = _check_pu(pu_coord)
    opts = options or NewtonOptions()
    if hop_count == 1:
        d_i = math.hypot(px, py)
        return PlacementResult(
            d_data=(1.0,),
            d_interference=(d_i,),
            ratio=1.0 / d_i,
            residual_norm=0.0,
            iterations=0,
        )

    rho2 = px * px + py * py
    k = hop_count

    def assemble(u: np.ndarray) -> np.ndarray:
        return np.concatenate([u, [1.0 - u.sum()]])

    def residuals(u: np.ndarray) -> np.ndarray:
        d = assemble(u)
        prefix = np.concatenate([[0.0], np.cumsum(d)[:-1]])
        return ((px - prefix[1:]) ** 2 + py * py) / rho2 - (d[1:] / d[0]) ** 2

    def project(u: np.ndarray) -> np.ndarray:
        u = np.clip(u, _D_MIN, 1.0 - _D_MIN)
        total = u.sum()
        if 1.0 - total < _D_MIN:
            u *= (1.0 - _D_MIN) / total
        return u

    uniform = np.full(k - 1, 1.0 / k)
    last_exc: Exception | None = None
    for attempt in range(6):
        if attempt == 0:
            start = uniform
        else:
            rng = np.random.default_rng(attempt)
            start = project(uniform * (1.0 + 0.2 * rng.uniform(-1, 1, k - 1)))
        try:
            result = newton_system(
                residuals, start, options=opts, project=project
            )
        except (ConvergenceError, NumericError) as exc:
            last_exc = exc
            continue
        d = assemble(result.x)
        if np.any(d <= 2.0 * _D_MIN):
            last_exc = InfeasibleError(
                f"hop length collapsed to the feasibility floor: {d}"
            )
            continue
        return _finish(d, (px, py), result)
    raise last_exc if last_exc is not None else ConvergenceError("no attempt ran")


def _finish(d: np.ndarray, pu, newton: NewtonResult) -> PlacementResult:
    dists = interference_distances(d, pu)
    ratios = [dd / di for dd, di in zip(d, dists)]
    return PlacementResult(
        d_data=tuple(float(v) for v in d),
        d_interference=tuple(float(v) for v in dists),
        ratio=float(ratios[0]),
        residual_norm=newton.residual_norm,
        iterations=newton.iterations,
    )


def op_min(
    placement: PlacementResult, gamma_th: float, ip_over_n0: float, eta: float
) -> float:
    """Outage probability at the balanced-ratio layout:
    (gamma_th/(I_p/N_0)) * K * (prod_k d_k/d_I_k)^(eta/K)."""
    if gamma_th < 0 or ip_over_n0 <= 0 or eta < 2:
        raise ValueError("invalid gamma_th, ip_over_n0 or eta")
    k = placement.hop_count
    return (gamma_th / ip_over_n0) * k * placement.ratio_product() ** (eta / k)


def ber_min(
    placement: PlacementResult, constants: QamConstants, eta: float
) -> float:
    """High-SNR bit error rate at the balanced-ratio layout:
    (a/2b) * K * (prod_k d_k/d_I_k)^(eta/K)."""
    if eta < 2:
        raise ValueError("eta must be >= 2")
    k = placement.hop_count
    pref = constants.a / (2.0 * constants.b)
    return pref * k * placement.ratio_product() ** (eta / k)


def with_performance(
    placement: PlacementResult,
    gamma_th: float,
    ip_over_n0: float,
    eta: float,
    constants: QamConstants,
) -> PlacementResult:
    """Placement with op_min/ber_min fields populated."""
    return replace(
        placement,
        op_min=op_min(placement, gamma_th, ip_over_n0, eta),
        ber_min=ber_min(placement, constants, eta),
    )


def direct_search(
    hop_count: int,
    pu_coord,
    eta: float,
    grid_resolution: int = 200,
) -> tuple[tuple[float, ...], float]:
    """Minimize the placement objective over the simplex directly.

    Exhaustive grid over the free hop lengths (capped near 2e6 cells for
    3 and 4 hops) followed by per-coordinate bounded refinement.  Ties
    break toward lexicographically smallest hop lengths.  Diagnostic
    oracle; not restricted to the balanced-ratio family.
    """
    if not 1 <= hop_count <= 4:
        raise ConfigError("direct search supports 1 to 4 hops")
    px, py = _check_pu(pu_coord)
    if eta < 2:
        raise ValueError("eta must be >= 2")
    if hop_count == 1:
        return (1.0,), placement_objective([1.0], (px, py), eta)

    k = hop_count
    res = grid_resolution
    if k > 2:
        res = min(res, int(2e6 ** (1.0 / (k - 1))))
    axis = np.linspace(0.0, 1.0, res + 2)[1:-1]
    grids = np.meshgrid(*([axis] * (k - 1)), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)
    last = 1.0 - u.sum(axis=1)
    feasible = last > _D_MIN
    u = u[feasible]
    d = np.column_stack([u, last[feasible]])
    prefix = np.concatenate(
        [np.zeros((d.shape[0], 1)), np.cumsum(d, axis=1)[:, :-1]], axis=1
    )
    d_i = np.hypot(px - prefix, py)
    objs = ((d / d_i) ** eta).sum(axis=1)
    best = int(np.argmin(objs))
    u_best = u[best].copy()

    def obj_of(u_vec: np.ndarray) -> float:
        d_vec = np.concatenate([u_vec, [1.0 - u_vec.sum()]])
        if np.any(d_vec <= 0):
            return np.inf
        return placement_objective(d_vec, (px, py), eta)

    current = obj_of(u_best)
    for _ in range(200):
        improved = False
        for j in range(k - 1):
            others = u_best.sum() - u_best[j]
            lo, hi = _D_MIN, 1.0 - others - _D_MIN
            if hi <= lo:
                continue

            def line(t, j=j):
                trial = u_best.copy()
                trial[j] = t
                return obj_of(trial)

            sol = optimize.minimize_scalar(
                line, bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-14},
            )
            if sol.fun < current - 1e-16:
                u_best[j] = sol.x
                current = sol.fun
                improved = True
        if not improved:
            break
    d_best = np.concatenate([u_best, [1.0 - u_best.sum()]])
    return tuple(float(v) for v in d_best), float(current)
