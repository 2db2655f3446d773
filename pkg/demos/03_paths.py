"""
Physical paths and maximal variety
==================================
"""
from leibniz_multiway.engine import build_multiway
from leibniz_multiway.paths import (
    action,
    enumerate_physical_paths,
    maximal_variety_paths,
    render_path,
    score,
)

g = build_multiway("AABAABBABAB", ["BA->AB"], 4)

# paths on which every string is Leibnizian
for p in enumerate_physical_paths(g, 0, 4):
    print(render_path(p, g), "action", action(p, g))

# the path maximizing the summed variety; ties would all be returned
for p in maximal_variety_paths(g, 4):
    print("maximal:", p, "score", score(p, g))
