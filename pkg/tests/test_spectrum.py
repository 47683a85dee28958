import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smra_rd import (
    CustomToeplitz,
    FirstOrderMarkov,
    Memoryless,
    NearestNeighbor,
    NotPositiveDefinite,
    Spectrum,
    build_covariance,
    density_range,
    eigenvalues,
    rate_function,
    spectral_density,
    szego_average,
    tridiagonal_closed_form,
)
from smra_rd.covariance import ToeplitzMatrix


def test_identity_spectrum():
    np.testing.assert_array_equal(eigenvalues(build_covariance(Memoryless(1.0), 4)).eigenvalues, [1, 1, 1, 1])


def test_two_by_two_markov():
    spec = eigenvalues(build_covariance(FirstOrderMarkov(1.0, 0.5), 2))
    np.testing.assert_allclose(spec.eigenvalues, [1.5, 0.5], rtol=1e-14)


def test_nearest_neighbor_n3():
    spec = eigenvalues(build_covariance(NearestNeighbor(1.0), 3))
    expected = [1 + math.cos(math.pi / 4), 1.0, 1 + math.cos(3 * math.pi / 4)]
    np.testing.assert_allclose(spec.eigenvalues, expected, rtol=1e-12)
    np.testing.assert_allclose(spec.eigenvalues, [1.70711, 1.0, 0.29289], atol=1e-5)


def test_closed_form_values():
    np.testing.assert_allclose(tridiagonal_closed_form(1, 1).eigenvalues, [1.0], rtol=1e-15)
    np.testing.assert_allclose(tridiagonal_closed_form(1, 3).eigenvalues, [1.70711, 1, 0.29289], atol=1e-5)
    np.testing.assert_allclose(tridiagonal_closed_form(4, 2).eigenvalues, [6.0, 2.0], rtol=1e-14)


def test_spectrum_invariants():
    m = build_covariance(FirstOrderMarkov(2.0, 0.7), 50)
    spec = eigenvalues(m)
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert spec.eigenvalues.sum() == pytest.approx(m.trace, rel=1e-9)
    assert not spec.eigenvalues.flags.writeable


def test_determinism():
    m = build_covariance(FirstOrderMarkov(1.0, 0.5), 300)
    a, b = eigenvalues(m).eigenvalues, eigenvalues(m).eigenvalues
    assert a.tobytes() == b.tobytes()


def test_negative_eigenvalue_rejected():
    # ToeplitzMatrix bypasses the Cholesky check in build_covariance
    bad = ToeplitzMatrix(np.array([1.0, 0.9, 0.9, -0.5]))
    with pytest.raises(NotPositiveDefinite):
        eigenvalues(bad)


def test_round_off_clipping_warns():
    dense = np.diag([1.0, 0.5, -1e-13])
    with pytest.warns(RuntimeWarning, match="clipping"):
        spec = eigenvalues(dense)
    assert spec.min == pytest.approx(1e-14)


def test_spectrum_rejects_non_positive():
    with pytest.raises(NotPositiveDefinite):
        Spectrum([1.0, 0.0])


def test_spectral_density_values():
    assert spectral_density(Memoryless(1.0), 1.234) == 1.0
    assert spectral_density(FirstOrderMarkov(1.0, 0.5), 0.0) == pytest.approx(3.0, rel=1e-14)
    assert spectral_density(FirstOrderMarkov(1.0, 0.5), math.pi) == pytest.approx(1 / 3, rel=1e-14)
    assert spectral_density(NearestNeighbor(1.0), math.pi) == pytest.approx(0.0, abs=1e-15)


def test_custom_density_matches_family():
    w = np.linspace(0, math.pi, 11)
    np.testing.assert_allclose(
        spectral_density(CustomToeplitz((2.0, 1.0)), w), spectral_density(NearestNeighbor(2.0), w), atol=1e-14
    )
    # truncated geometric series approaches the Markov density
    rho = tuple(0.5 ** np.arange(60))
    np.testing.assert_allclose(
        spectral_density(CustomToeplitz(rho), w), spectral_density(FirstOrderMarkov(1.0, 0.5), w), atol=1e-12
    )


def test_szego_identity_averages():
    assert szego_average(Memoryless(3.0), lambda x: x) == pytest.approx(3.0, abs=1e-8)
    assert szego_average(NearestNeighbor(1.0), lambda x: x) == pytest.approx(1.0, abs=1e-8)
    assert szego_average(FirstOrderMarkov(1.0, 0.5), lambda x: x) == pytest.approx(1.0, abs=1e-8)


def test_szego_kinked_integrand():
    # For NN(1), g = max(0, log2(f/theta)/2) with theta = 1 vanishes for w > pi/2.
    # Oracle: fine midpoint rule on the smooth part only.
    theta = 1.0
    w = (np.arange(200000) + 0.5) * (math.pi / 2) / 200000
    oracle = np.sum(0.5 * np.log2((1 + np.cos(w)) / theta)) * (math.pi / 2) / 200000 / math.pi
    assert szego_average(NearestNeighbor(1.0), rate_function(theta)) == pytest.approx(oracle, abs=1e-8)


def test_density_range_custom():
    lo, hi = density_range(CustomToeplitz((2.0, 1.0)))
    assert lo == pytest.approx(0.0, abs=1e-12)
    assert hi == pytest.approx(4.0, abs=1e-12)


def test_closed_form_matches_numeric_large_n():
    for s2 in (1.0, 4.0):
        num = eigenvalues(build_covariance(NearestNeighbor(s2), 1000)).eigenvalues
        cf = tridiagonal_closed_form(s2, 1000).eigenvalues
        np.testing.assert_allclose(num, cf, rtol=1e-9)


models = st.one_of(
    st.builds(NearestNeighbor, st.floats(0.2, 5)),
    st.builds(FirstOrderMarkov, st.floats(0.2, 5), st.floats(-0.9, 0.9)),
    st.builds(Memoryless, st.floats(0.2, 5)),
)


@settings(max_examples=40, deadline=None)
@given(models, st.integers(1, 120))
def test_spectral_inclusion(model, n):
    lam = eigenvalues(build_covariance(model, n)).eigenvalues
    lo, hi = density_range(model)
    scale = max(hi, 1.0)
    assert lam.min() >= lo - 1e-9 * scale
    assert lam.max() <= hi + 1e-9 * scale


@pytest.mark.parametrize("model", [NearestNeighbor(1.0), FirstOrderMarkov(1.0, 0.5), FirstOrderMarkov(1.0, 0.2)])
@pytest.mark.parametrize("theta", [None, 0.3])
def test_szego_gap_shrinks(model, theta):
    g = (lambda x: x) if theta is None else rate_function(theta)
    limit = szego_average(model, g)
    gaps = []
    for n in (50, 200, 1000):
        lam = eigenvalues(build_covariance(model, n)).eigenvalues
        gaps.append(abs(np.mean([g(x) for x in lam]) - limit))
    assert gaps[-1] < 1e-2
    if theta is not None:
        assert gaps[0] > gaps[1] > gaps[2]
    else:
        # identity average equals rho_1 exactly at every n
        assert max(gaps) < 1e-9
