"""Gaussian states and the closed-form Uhlmann fidelity.

Builds a few single-mode Gaussian states, evaluates the fidelity and Bures
distance, and verifies two textbook values along the way.
"""

import numpy as np

from gaussnm import bures_distance, fidelity, make_gaussian, rotate_state

vacuum = make_gaussian()
thermal = make_gaussian(n=1.0)
coherent = make_gaussian(beta=1.0 + 0.5j)
squeezed = make_gaussian(r=0.8, phi=0.6)

print("vacuum covariance:\n", vacuum.cov)
print("squeezed covariance (det stays 1/4):\n", squeezed.cov,
      "\ndet =", squeezed.det_cov)

# vacuum vs thermal with one quantum: F = 1/sqrt(2)
print("\nF(vacuum, thermal n=1) =", fidelity(vacuum, thermal),
      " (1/sqrt(2) =", 1 / np.sqrt(2), ")")

# two coherent states: F = exp(-|b1 - b2|^2 / 2)
b1, b2 = 1.0 + 0.5j, 0.2 - 0.3j
f = fidelity(make_gaussian(beta=b1), make_gaussian(beta=b2))
print("F(coherent pair)      =", f,
      " (closed form:", np.exp(-abs(b1 - b2) ** 2 / 2), ")")

print("Bures distance        =", bures_distance(coherent, squeezed))

# the fidelity only sees relative geometry: rotating both states together
# changes nothing
theta = 0.9
print("rotation invariance   =",
      fidelity(rotate_state(coherent, theta), rotate_state(squeezed, theta))
      - fidelity(coherent, squeezed))
