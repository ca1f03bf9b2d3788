# %% [markdown]
# # Observer graphs and positive definiteness
#
# Node 0 is the plant and nodes 1..N are observers. Removing the plant
# leaves a reduced graph whose Laplacian is singular, one zero eigenvalue
# per component. Adding each observer's plant-edge weight on the diagonal
# lifts every zero mode, because every component touches the plant.

# %%
import numpy as np

from qobsnet import (
    ObserverGraph,
    connected_components,
    plant_attachment_diag,
    reduce,
    validate_graph,
    weighted_laplacian,
)
from qobsnet.errors import DisconnectedGraphError
from qobsnet.graph import comparison_matrix, laplacian_nullity

g = ObserverGraph.from_edges(5, [(0, 1, 1.0), (0, 3, 0.5), (0, 5, 2.0),
                                 (1, 2, 1.0), (3, 4, 1.5)])
validate_graph(g)
rg = reduce(g, alpha1_norm_sq=1.0)
L = weighted_laplacian(rg)
comp = connected_components(rg)
print("components:", comp.groups)
print("Laplacian eigenvalues:", np.linalg.eigvalsh(L).round(4))
print("nullity:", laplacian_nullity(L))
print("L f_k:", np.abs(L @ comp.indicators.T).max())

# %%
D = plant_attachment_diag(rg)
print("plant attachment:", np.diag(D))
print("comparison matrix eigenvalues:", np.linalg.eigvalsh(comparison_matrix(rg)).round(4))

# %% [markdown]
# A graph with an observer that cannot reach the plant is rejected before
# any matrices are built.

# %%
try:
    validate_graph(ObserverGraph.from_edges(3, [(0, 1, 1.0), (2, 3, 1.0)]))
except DisconnectedGraphError as exc:
    print("rejected:", exc)
