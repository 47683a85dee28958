import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from smra_rd import (
    CLASSICAL,
    DimensionMismatch,
    InvalidParameter,
    Memoryless,
    NearestNeighbor,
    OperatingPoint,
    Predecessor,
    SourceNetwork,
    TargetUnreachable,
    distortion,
    evaluate_tuple,
    paper_example_network,
    solve_theta,
    storage_rate,
    sweep_curve,
    transmission_rate,
)
from smra_rd.theorem import channel_rate, network_spectra, solve_theta_worst


# -- oracles: plain loops, no numpy vectorisation ---------------------------

def rate_oracle(lam, theta):
    return sum(max(0.0, 0.5 * math.log2(x / theta)) for x in lam) / len(lam)


def storage_oracle(lams, theta):
    n = len(lams[0])
    return sum(max(0.0, max(0.5 * math.log2(l[i] / theta) for l in lams)) for i in range(n)) / n


def distortion_oracle(lam, delta, theta):
    caps = [x if math.isinf(delta) else x * delta / (x + delta) for x in lam]
    return sum(min(theta, c) for c in caps) / len(lam)


def bisect_theta(lam, delta, target, iters=200):
    lo, hi = 0.0, max(lam)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if distortion_oracle(lam, delta, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


# -- transmission rate -----------------------------------------------------

def test_rate_dyadic():
    assert transmission_rate([4, 1, 0.25], 1.0) == pytest.approx(1 / 3, rel=1e-15)


def test_rate_zero_above_max():
    assert transmission_rate([4, 1, 0.25], 4.0) == 0.0
    assert transmission_rate([4, 1, 0.25], 10.0) == 0.0


def test_rate_nearest_neighbor_n3():
    lam = [1 + math.cos(math.pi / 4), 1.0, 1 + math.cos(3 * math.pi / 4)]
    # (1/3)(log2(3.41421)/2 + log2(2)/2 + 0)
    expected = (0.5 * math.log2(lam[0] / 0.5) + 0.5) / 3
    assert expected == pytest.approx(0.46192555, abs=1e-8)
    net = SourceNetwork("k", (Predecessor("1", NearestNeighbor(1.0)),), 3)
    assert transmission_rate(network_spectra(net)["1"], 0.5) == pytest.approx(expected, rel=1e-12)


def test_rate_rejects_bad_theta():
    with pytest.raises(InvalidParameter):
        transmission_rate([1.0], 0.0)


# -- storage rate ----------------------------------------------------------

def test_storage_single_equals_transmission():
    lam = [3.0, 1.2, 0.4]
    assert storage_rate([lam], 0.5) == transmission_rate(lam, 0.5)


def test_storage_exceeds_max_rate():
    s = storage_rate([[4, 0.5], [2, 2]], 1.0)
    assert s == pytest.approx(0.75, rel=1e-15)
    assert max(transmission_rate([4, 0.5], 1.0), transmission_rate([2, 2], 1.0)) == pytest.approx(0.5)


def test_storage_uniform_argmax():
    assert storage_rate([[4, 0.5], [2, 1]], 1.0) == pytest.approx(0.5, rel=1e-15)
    assert storage_rate([[4, 0.5], [2, 1]], 1.0) == transmission_rate([4, 0.5], 1.0)


def test_storage_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        storage_rate([[1.0, 2.0], [1.0]], 0.5)


# -- distortion ------------------------------------------------------------

def test_distortion_examples():
    assert distortion([1.0], OperatingPoint(1.0, 1.0)) == 0.5
    assert distortion([1.0, 1.0], OperatingPoint(CLASSICAL, 0.25)) == 0.25
    assert distortion([1.5, 0.5], OperatingPoint(1.0, 1.0)) == pytest.approx((0.6 + 1 / 3) / 2, rel=1e-15)
    assert distortion([1.5, 0.5], OperatingPoint(1.0, 1.0)) == pytest.approx(0.4667, abs=1e-4)


def test_operating_point_validation():
    with pytest.raises(InvalidParameter):
        OperatingPoint(0.0, 1.0)
    with pytest.raises(InvalidParameter):
        OperatingPoint(1.0, -1.0)
    assert OperatingPoint(CLASSICAL, 1.0).classical


# -- solve_theta -----------------------------------------------------------

def test_solve_theta_examples():
    assert solve_theta([1, 1], CLASSICAL, 0.25) == pytest.approx(0.25, rel=1e-12)
    assert solve_theta([4, 1], CLASSICAL, 1.0) == pytest.approx(1.0, rel=1e-12)
    # exactly the saturated maximum (0.6 + 1/3) / 2: infimum is the largest cap 0.6
    assert solve_theta([1.5, 0.5], 1.0, 7 / 15) == pytest.approx(0.6, rel=1e-12)


def test_solve_theta_unreachable():
    with pytest.raises(TargetUnreachable):
        solve_theta([1.5, 0.5], 1.0, 0.4667)
    with pytest.raises(TargetUnreachable):
        solve_theta([1.0, 1.0], CLASSICAL, 1.5)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0.01, 20), min_size=1, max_size=30),
    st.one_of(st.just(math.inf), st.floats(0.01, 50)),
    st.floats(0.01, 0.999),
)
def test_solve_theta_against_bisection(lam, delta, frac):
    cap = distortion_oracle(lam, delta, math.inf)
    target = frac * cap
    theta = solve_theta(lam, delta, target)
    ref = bisect_theta(lam, delta, target)
    assert theta == pytest.approx(ref, rel=1e-9)
    assert distortion(lam, OperatingPoint(delta, theta)) == pytest.approx(target, rel=1e-9)


def test_solve_theta_worst_matches_worst_predecessor():
    specs = network_spectra(paper_example_network("nn", 64))
    lams = [specs[j] for j in "123"]
    theta = solve_theta_worst(lams, CLASSICAL, 0.5)
    assert max(distortion(l, OperatingPoint(CLASSICAL, theta)) for l in lams) == pytest.approx(0.5, rel=1e-10)


# -- tuples and sweeps -----------------------------------------------------

def test_memoryless_shannon_point():
    net = SourceNetwork("k", (Predecessor("1", Memoryless(1.0)),), 8)
    t = evaluate_tuple(net, OperatingPoint(CLASSICAL, 0.25))
    assert t.storage_rate == pytest.approx(1.0, rel=1e-15)
    assert t.transmission_rates["1"] == pytest.approx(1.0, rel=1e-15)
    assert t.distortions["1"] == pytest.approx(0.25, rel=1e-15)


def test_memoryless_sweep():
    net = SourceNetwork("k", (Predecessor("1", Memoryless(1.0)),), 4)
    c = sweep_curve(net, "classical", [1, 0.5, 0.25])
    np.testing.assert_allclose(c.rates("1"), [0, 0.5, 1], atol=1e-15)
    np.testing.assert_allclose(c.distortions("1"), [1, 0.5, 0.25], atol=1e-15)


def test_sweep_rejects_non_monotone_grid():
    net = SourceNetwork("k", (Predecessor("1", Memoryless(1.0)),), 4)
    with pytest.raises(InvalidParameter):
        sweep_curve(net, "classical", [1, 0.25, 0.5])
    with pytest.raises(InvalidParameter):
        sweep_curve(net, "classical", [])
    with pytest.raises(InvalidParameter):
        sweep_curve(net, "fixed_delta", [1.0])


def test_sweep_distortion_grid():
    net = paper_example_network("markov", 64)
    c = sweep_curve(net, "classical", [0.5, 0.2, 0.1], grid_kind="distortion")
    worst = [p.worst_distortion for p in c.points]
    np.testing.assert_allclose(worst, [0.5, 0.2, 0.1], rtol=1e-10)


@pytest.mark.parametrize("policy,delta", [("classical", None), ("theta_equals_delta", None),
                                          ("fixed_delta", 0.5), ("theta-eq-delta", None)])
def test_sweep_monotone(policy, delta):
    net = paper_example_network("nn", 64)
    c = sweep_curve(net, policy, delta=delta)
    assert len(c) == 60
    for j in net.ids:
        r, d = c.rates(j), c.distortions(j)
        assert np.all(np.diff(r) >= -1e-15)
        assert np.all(np.diff(d) <= 1e-15)
    assert np.all(c.storage() >= np.max([c.rates(j) for j in net.ids], axis=0))


def test_storage_superimposed_nearest_neighbor():
    net = paper_example_network("nearest_neighbor", 200)
    c = sweep_curve(net)
    assert np.max(np.abs(c.storage() - c.rates("3"))) <= 1e-12


def test_memory_reduces_rate_markov():
    net = paper_example_network("first_order_markov", 200)
    specs = network_spectra(net)
    for j in net.ids:
        for d in np.linspace(0.05, 0.95, 19):
            r_mem = transmission_rate(specs[j], solve_theta(specs[j], CLASSICAL, d))
            assert r_mem <= 0.5 * math.log2(1.0 / d) + 1e-12


def test_classical_limit_consistency():
    net = paper_example_network("markov", 64)
    specs = network_spectra(net)
    lam_max = max(s.max for s in specs.values())
    big = sweep_curve(net, "fixed_delta", delta=1e9 * lam_max)
    ref = sweep_curve(net, "classical")
    for j in net.ids:
        np.testing.assert_allclose(big.distortions(j), ref.distortions(j), rtol=1e-6)
        np.testing.assert_allclose(big.rates(j), ref.rates(j), rtol=1e-6)


def test_rate_gap_diagnostics():
    net = SourceNetwork("k", (Predecessor("1", Memoryless(1.0)),), 4)
    # delta = 1: channel rate log2(2)/2 = 0.5; theta = 0.25 gives rate 1 -> no flag
    t = evaluate_tuple(net, OperatingPoint(1.0, 0.25))
    assert t.rate_gaps["1"] == pytest.approx(-0.5)
    assert t.flagged == []
    # theta = 1 gives rate 0 < 0.5 -> flagged
    t = evaluate_tuple(net, OperatingPoint(1.0, 1.0))
    assert t.flagged == ["1"]
    assert channel_rate([1.0], CLASSICAL) == 0.0


spectra_st = st.lists(st.floats(0.01, 10), min_size=1, max_size=25)


@settings(max_examples=80, deadline=None)
@given(spectra_st, st.floats(0.005, 12), st.floats(0.005, 12))
def test_rate_properties(lam, t1, t2):
    r1, r2 = transmission_rate(lam, t1), transmission_rate(lam, t2)
    assert r1 >= 0
    assert r1 == pytest.approx(rate_oracle(lam, t1), rel=1e-12, abs=1e-15)
    if t1 <= t2:
        assert r1 >= r2 - 1e-15
    if t1 >= max(lam):
        assert r1 == 0.0


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 20).flatmap(lambda n: st.lists(st.lists(st.floats(0.01, 10), min_size=n, max_size=n),
                                                   min_size=1, max_size=5)),
       st.floats(0.005, 12))
def test_storage_properties(lams, theta):
    s = storage_rate(lams, theta)
    assert s == pytest.approx(storage_oracle([sorted(l, reverse=True) for l in lams], theta), rel=1e-12, abs=1e-15)
    assert s >= max(transmission_rate(l, theta) for l in lams) - 1e-15


@settings(max_examples=80, deadline=None)
@given(spectra_st, st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
def test_distortion_monotone(lam, theta, d1, d2):
    lo, hi = sorted((d1, d2))
    a = distortion(lam, OperatingPoint(lo, theta))
    b = distortion(lam, OperatingPoint(hi, theta))
    assert a <= b + 1e-15
    assert b <= min(theta, np.mean(lam)) + 1e-12
    assert distortion(lam, OperatingPoint(lo, theta * 0.5)) <= a + 1e-15
    assert a == pytest.approx(distortion_oracle(lam, lo, theta), rel=1e-12)
