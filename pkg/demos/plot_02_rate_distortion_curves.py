"""
Storage and transmission rates for the two example families
===========================================================

Three possible previous requests, block length 1000, classical sweep
(``delta -> inf``).  For nearest-neighbour correlation the storage rate sits
exactly on the worst transmission curve.  For the Markov family the three
memoryless baselines coincide, and memory lowers every transmission rate.

Pass ``--plot`` to draw the curves with matplotlib.
"""

import sys

import numpy as np

from smra_rd import CLASSICAL, paper_example_network, solve_theta, sweep_curve, transmission_rate
from smra_rd.theorem import network_spectra

nn = paper_example_network("nearest_neighbor", n=1000)
curve = sweep_curve(nn)
print("NN: max |S - R(sigma2=4)| =", np.max(np.abs(curve.storage() - curve.rates("3"))))

# Memoryless baselines at the same water levels show how much memory buys.
base = sweep_curve(nn.baseline_network(), grid=curve.thetas())
k = len(curve) // 2
print(f"NN at theta={curve.thetas()[k]:.3f}: R with memory {curve.rates('1')[k]:.4f}, "
      f"memoryless {base.rates('1')[k]:.4f}")

markov = paper_example_network("first_order_markov", n=1000)
mcurve = sweep_curve(markov)
mbase = sweep_curve(markov.baseline_network(), grid=mcurve.thetas())
print("Markov baselines identical:",
      all(np.array_equal(mbase.rates("1"), mbase.rates(j)) for j in markov.ids))

# Compare at equal distortion rather than equal water level.
specs = network_spectra(markov)
for d in (0.5, 0.2, 0.05):
    rates = [transmission_rate(specs[j], solve_theta(specs[j], CLASSICAL, d)) for j in markov.ids]
    print(f"D={d}: with memory", np.round(rates, 4), f"memoryless {0.5 * np.log2(1 / d):.4f}")

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for ax, c, b, title in ((axes[0], curve, base, "nearest neighbour"), (axes[1], mcurve, mbase, "first-order Markov")):
        for j in c.points[0].transmission_rates:
            ax.plot(c.distortions(j), c.rates(j), label=f"R | {j}")
            ax.plot(b.distortions(j), b.rates(j), "--", label=f"R | {j} memoryless")
        ax.plot(c.distortions("3"), c.storage(), "k:", lw=2, label="S")
        ax.set_xlabel("distortion")
        ax.set_ylabel("bits / source symbol")
        ax.set_title(title)
        ax.legend(fontsize=7)
    plt.tight_layout()
    plt.show()
