#!/usr/bin/env python3
"""Regenerate the bundled triangulation complexes in src/graphtherm/data/complexes.

Each complex is derived from a trivalent fat graph: the theta graph carries
both the three-holed sphere and the one-holed torus (the two cyclic-order
choices at the second vertex), and the 4-cycle with two doubled opposite
edges carries the four-holed sphere and the two-holed torus.  For each
target signature the lexicographically first cyclic-order assignment that
produces the right number of boundary walks is kept, so the output is
deterministic.
"""

import itertools
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from graphtherm.hexagons import (  # noqa: E402
    FatGraph,
    complex_from_fat_graph,
    complex_to_dict,
    fat_graph_faces,
)

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "graphtherm", "data", "complexes")

THETA_EDGES = {"t1": (0, 1), "t2": (0, 1), "t3": (0, 1)}
FOUR_EDGES = {
    "p1": (0, 1),
    "p2": (0, 1),
    "q": (1, 2),
    "r1": (2, 3),
    "r2": (2, 3),
    "w": (3, 0),
}


def cyclic_options(names):
    first = names[0]
    rest = names[1:]
    return [(first,) + perm for perm in itertools.permutations(rest)]


def search(edges, vertices, genus, boundary_count):
    incident = {v: tuple(sorted(n for n, (a, b) in edges.items() if v in (a, b))) for v in vertices}
    for combo in itertools.product(*(cyclic_options(incident[v]) for v in vertices)):
        fat = FatGraph(cyclic={v: combo[i] for i, v in enumerate(vertices)}, edges=edges)
        if len(fat_graph_faces(fat)) == boundary_count:
            return complex_from_fat_graph(fat, genus, boundary_count, mark=True)
    raise SystemExit(f"no cyclic orders give signature ({genus},{boundary_count})")


def main():
    targets = {
        "pants": search(THETA_EDGES, [0, 1], 0, 3),
        "torus_1_1": search(THETA_EDGES, [0, 1], 1, 1),
        "surface_0_4": search(FOUR_EDGES, [0, 1, 2, 3], 0, 4),
        "surface_1_2": search(FOUR_EDGES, [0, 1, 2, 3], 1, 2),
    }
    os.makedirs(OUT, exist_ok=True)
    for name, cx in targets.items():
        path = os.path.join(OUT, name + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(complex_to_dict(cx), fh, indent=2)
            fh.write("\n")
        print(f"wrote {path}  (s={cx.s}, marked={sorted(cx.marked)})")


if __name__ == "__main__":
    main()
