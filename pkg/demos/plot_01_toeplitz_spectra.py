"""
Spectra of the conditional covariances
======================================

Each possible predecessor of the requested source comes with a Toeplitz
conditional covariance.  Its eigenvalues drive every rate and distortion.
Here we compute them and check them against the closed form (for the
nearest-neighbour family) and against the spectral density.
"""

import numpy as np

from smra_rd import (
    FirstOrderMarkov,
    NearestNeighbor,
    build_covariance,
    density_range,
    eigenvalues,
    rate_function,
    szego_average,
    tridiagonal_closed_form,
)

# A nearest-neighbour matrix is tridiagonal, so its eigenvalues are known exactly.
n = 1000
model = NearestNeighbor(sigma2=1.0)
lam = eigenvalues(build_covariance(model, n)).eigenvalues
closed = tridiagonal_closed_form(1.0, n).eigenvalues
print("nearest-neighbour, n=1000: max relative error", np.max(np.abs(lam - closed) / closed))

# The density vanishes at w = pi, which is why the smallest eigenvalues are tiny.
print("smallest eigenvalue", lam[-1], "density range", density_range(model))

# For a first-order Markov model every eigenvalue sits inside [f(pi), f(0)].
markov = FirstOrderMarkov(sigma2=1.0, gamma=0.5)
lo, hi = density_range(markov)
for n in (10, 100, 1000):
    lam = eigenvalues(build_covariance(markov, n)).eigenvalues
    print(f"markov n={n:4d}: eigenvalues in [{lam.min():.4f}, {lam.max():.4f}] within [{lo:.4f}, {hi:.4f}]")

# Averages of a function of the eigenvalues converge to the Szego integral.
g = rate_function(theta=0.3)
limit = szego_average(markov, g)
for n in (50, 200, 1000):
    lam = eigenvalues(build_covariance(markov, n)).eigenvalues
    print(f"n={n:4d}: (1/n) sum g(lambda) - limit = {np.mean([g(x) for x in lam]) - limit:+.2e}")
