#!/usr/bin/env python3
"""Census of narrative motifs on small grids.

Three nodes on a 3x3 grid admit exactly nine patterns once row order and
time offset are quotiented away. Larger grids grow fast; single-track grids
stay trivial. Deleting any node from a 3-node motif lands in a 2-node class.
"""

from ttng import MOTIF_NAMES, classify, enumerate_classes, motif_graph
from ttng.motifs import occupancy_of, reduce_matrix

print("class counts by grid:")
for m, n, k in [(1, 3, 3), (2, 2, 2), (3, 3, 2), (3, 3, 3), (3, 4, 4), (4, 4, 4)]:
    classes = enumerate_classes(m, n, k)
    print(f"  {m}x{n} grid, {k} nodes -> {len(classes)} classes")

print("\nthe nine 3-node motifs:")
for cls in enumerate_classes(3, 3, 3):
    cells = " ".join(f"({r},{c})" for r, c in cls.canonical.coords())
    print(f"  {cls.name.value:<12} {cls.name.category:<15} members={cls.members:<2} {cells}")

print("\nround trip and reductions:")
for name in MOTIF_NAMES:
    occupancy = occupancy_of(motif_graph(name), rows=3, cols=3)
    reductions = reduce_matrix(occupancy)
    assert classify(occupancy) == name
    print(f"  {name.value:<12} -> {len(reductions)} distinct reductions")
