"""
Transition matrices between layers and the gates they realize
=============================================================
"""
import numpy as np

from leibniz_multiway.engine import build_multiway, graph_from_layers
from leibniz_multiway.gates import recognize_gate
from leibniz_multiway.smatrix import (
    extend_for_unitarity,
    layer_system,
    smatrix_spec,
    solve_unitary_weights,
    unitarity_residual,
)

# two in-words, two out-words, fully connected: a rotation, here a Hadamard
g = build_multiway(["AABBDCABABDC", "ABABCDABABDC"], ["BA->AB", "DC->CD"], 1, canon_mode="rotation")
ls = layer_system(g, 0, 1)
w = solve_unitary_weights(ls.connected, lam=-2 ** -0.5)
u = smatrix_spec(ls, w).dense
print(np.round(u, 4))
print([(m.gate, m.col_perm) for m in recognize_gate(u)])

# a permutation pattern on four words is a CNOT
edges = [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
g = graph_from_layers([list("abcd"), list("efgh")], edges, [[8] * 4, [8] * 4])
ls = layer_system(g, 0, 1)
u = smatrix_spec(ls, solve_unitary_weights(ls.connected)).dense
print(recognize_gate(u)[0].gate)

# three in-words squeezed into two out-words cannot be unitary ...
g = graph_from_layers([list("abc"), list("de")], [((0, i), (1, j)) for i in range(3) for j in range(2)],
                      [[1] * 3, [1] * 2])
ls = layer_system(g, 0, 1)
sol = solve_unitary_weights(ls.connected)
print("feasible:", sol.feasible, "best residual", round(sol.residual, 3))

# ... until an auxiliary out-word is added
spec = smatrix_spec(ls, sol.best)
uc = extend_for_unitarity(spec, 1, pinned=np.zeros(ls.shape, dtype=bool))
print("extended residual", unitarity_residual(uc))
