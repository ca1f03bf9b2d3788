# %% [markdown]
# # Building the observer network
#
# Five observers on a complete graph with unit weights, coupled to a plant
# whose output is `sigma_x`. Each observer's frequency is chosen so that the
# stacked vector `alpha1 / |alpha1|^2` is an equilibrium of the observer
# drift driven by a unit plant output.

# %%
import numpy as np

from qobsnet import (
    CouplingScheme,
    PlantSpec,
    assemble_augmented,
    build_realization,
    certify_positive_definite,
    complete_graph,
    consensus_target,
)

plant = PlantSpec(r_p=[0, 0, 0], C_p=[1, 0, 0])
real = build_realization(complete_graph(5, 1.0), CouplingScheme.for_plant(plant, [1.0, 0.0]))
print("omega:", real.omega)
print("coupling column b:", real.b)

# %%
cert = certify_positive_definite(real)
print(f"lambda(R_o) in [{cert.lambda_min:g}, {cert.lambda_max:g}]")

# %% [markdown]
# The augmented drift has the plant coefficient in the first slot and the
# ten observer quadrature coefficients after it. Its entries are integers.

# %%
aug = assemble_augmented(plant, real)
np.set_printoptions(linewidth=120)
print(aug.A_a.astype(int))
print("consensus target C_o u:", consensus_target(real))
