"""
Multiway evolution of a string
==============================

All rule applications at all positions, one layer per step.
"""
from leibniz_multiway.engine import build_multiway, physical_subgraph
from leibniz_multiway.io import to_dot

# sorting by adjacent swaps terminates in a single normal form
g = build_multiway("BBBAAACC", ["BA->AB", "CB->BC"])
for d, layer in enumerate(g.layers):
    print(d, [n.label for n in layer])
print("terminated:", g.frontier_empty, "truncated:", g.truncated)

# two in-words evolving together; rotation canonicalization merges rotated copies
ins = ["AABBDCABABDC", "ABABCDABABDC"]
for canon in ("literal", "rotation"):
    g = build_multiway(ins, ["BA->AB", "DC->CD"], 1, canon_mode=canon)
    print(canon, [(n.label, n.variety) for n in g.layers[1] if n.leibnizian])

# the physical part keeps only Leibnizian nodes; the DOT export shades it
g = build_multiway("AABAABBABAB", ["BA->AB"], 3)
print(len(g.nodes), "nodes,", len(physical_subgraph(g).nodes), "physical")
print(to_dot(g).splitlines()[0])
