import math

import pytest

from cogrelay import (
    ConfigError,
    NewtonOptions,
    Scenario,
    ber_min,
    derive_hop_statistics,
    direct_search,
    op_min,
    outage_asymptotic,
    placement_objective,
    qam_constants,
    solve_equal_ratio,
)

PU = (0.35, 0.35)


def _bisect_two_hop_root(px, py):
    rho2 = px * px + py * py

    def g(t):
        return (px - t) ** 2 + py * py - rho2 * ((1.0 - t) / t) ** 2

    lo, hi = 1e-3, 1.0 - 1e-3
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(lo) * g(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_single_hop_trivial():
    p = solve_equal_ratio(1, PU)
    assert p.d_data == (1.0,)
    assert p.d_interference[0] == pytest.approx(math.sqrt(0.245), rel=1e-14)
    assert p.residual_norm == 0.0


def test_two_hop_root_matches_bisection():
    p = solve_equal_ratio(2, PU)
    root = _bisect_two_hop_root(*PU)
    assert p.d_data[0] == pytest.approx(root, abs=1e-8)
    assert p.d_data[0] == pytest.approx(0.5509, abs=5e-4)
    assert sum(p.d_data) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8])
def test_invariants_at_solution(k):
    p = solve_equal_ratio(k, PU)
    assert p.residual_norm <= 1e-10
    assert abs(sum(p.d_data) - 1.0) <= 1e-10
    assert all(d > 0 for d in p.d_data)
    ratios = [d / di for d, di in zip(p.d_data, p.d_interference)]
    assert max(abs(r - p.ratio) for r in ratios) <= 1e-8


def test_far_primary_gives_uniform_spacing():
    p = solve_equal_ratio(3, (0.5, 1e6))
    for d in p.d_data:
        assert d == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_tight_tolerance_respected():
    opts = NewtonOptions(tol=1e-13, max_iter=200)
    p = solve_equal_ratio(4, PU, options=opts)
    assert p.residual_norm <= 1e-13


def test_degenerate_primary_position_rejected():
    with pytest.raises(ConfigError):
        solve_equal_ratio(2, (0.5, 0.0))


def test_positions_are_eta_free_but_performance_is_not():
    # the solved system never involves the path loss exponent; only the
    # performance evaluated on top of the positions changes with it
    p = solve_equal_ratio(3, PU)
    values = [op_min(p, 1.0, 100.0, eta) for eta in (2.0, 4.0, 6.0)]
    assert len(set(values)) == 3


def test_op_min_formula_and_example():
    p = solve_equal_ratio(2, PU)
    r = p.ratio
    expected = 0.02 * r ** 4
    assert op_min(p, 1.0, 100.0, 4.0) == pytest.approx(expected, rel=1e-12)
    assert op_min(p, 1.0, 100.0, 4.0) == pytest.approx(0.0307, abs=2e-4)


def test_op_min_equals_asymptote_at_optimal_geometry():
    for k in (2, 3, 4):
        p = solve_equal_ratio(k, PU)
        scn = Scenario(hop_count=k, ip_over_n0=100.0).with_hop_distances(p.d_data)
        pairs = [(h.lambda_d, h.lambda_i) for h in derive_hop_statistics(scn)]
        assert op_min(p, 1.0, 100.0, 4.0) == pytest.approx(
            outage_asymptotic(pairs, 100.0, 1.0), rel=1e-10
        )


def test_ber_min_formula():
    c4 = qam_constants(4)
    p1 = solve_equal_ratio(1, PU)
    r = 1.0 / math.sqrt(0.245)
    assert ber_min(p1, c4, 4.0) == pytest.approx(0.25 * r ** 4, rel=1e-12)
    p2 = solve_equal_ratio(2, PU)
    assert ber_min(p2, c4, 4.0) == pytest.approx(
        0.25 * 2 * p2.ratio_product() ** 2, rel=1e-12
    )


def test_direct_search_two_hops():
    d, obj = direct_search(2, PU, 4.0, grid_resolution=400)
    assert d[0] == pytest.approx(0.5878, abs=1e-3)
    assert obj == pytest.approx(2.8893, abs=1e-3)
    balanced = solve_equal_ratio(2, PU)
    balanced_obj = placement_objective(balanced.d_data, PU, 4.0)
    assert balanced_obj == pytest.approx(3.0684, abs=1e-3)
    assert obj <= balanced_obj + 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_direct_search_never_worse_than_balanced(k):
    d, obj = direct_search(k, PU, 4.0)
    balanced = solve_equal_ratio(k, PU)
    assert obj <= placement_objective(balanced.d_data, PU, 4.0) + 1e-9
    assert sum(d) == pytest.approx(1.0, abs=1e-9)


def test_direct_search_far_primary_agrees_with_balanced():
    d, _ = direct_search(3, (0.5, 1e6), 4.0)
    balanced = solve_equal_ratio(3, (0.5, 1e6))
    assert list(d) == pytest.approx(list(balanced.d_data), abs=1e-6)


def test_direct_search_hop_limit():
    with pytest.raises(ConfigError):
        direct_search(5, PU, 4.0)
