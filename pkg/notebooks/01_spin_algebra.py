# %% [markdown]
# # Spin algebra at the coefficient level
#
# A qubit observable is written as a real 3-vector against the Pauli
# matrices. Commutators of such observables reduce to the skew map
# `theta_map`, so the Heisenberg dynamics can be carried out on real
# coefficient vectors.

# %%
import numpy as np

from qobsnet import PlantSpec, pauli_matrices, plant_drift, theta_map
from qobsnet.spin import pauli_commutator_residual, theta_identities_residual, verify_zp_invariance

sx, sy, sz = pauli_matrices()
print("[sx, sy] == 2i sz:", np.array_equal(sx @ sy - sy @ sx, 2j * sz))
print("largest commutator residual over all pairs:", pauli_commutator_residual())

# %% [markdown]
# `theta_map(b)` is the matrix of `g -> b x g` up to sign. It is skew, it
# annihilates `b`, and its identities hold to round-off.

# %%
rng = np.random.default_rng(0)
b, g = rng.standard_normal((2, 3))
T = theta_map(b)
print(T)
print("skew:", np.array_equal(T, -T.T))
print("identity residual:", theta_identities_residual(b, g))

# %% [markdown]
# With a plant Hamiltonian `r_p . sigma` the plant drift is `-2 Theta(r_p)`.
# The coupling to the observers enters through `C_p Theta(C_p)`, which is
# always zero, so the measured plant output is a conserved quantity.

# %%
plant = PlantSpec(r_p=[0.0, 0.0, 1.0], C_p=[1.0, 0.0, 0.0])
print(plant_drift(plant))
for _ in range(3):
    spec = PlantSpec(C_p=rng.standard_normal(3))
    print(spec.C_p.round(3), verify_zp_invariance(spec))
