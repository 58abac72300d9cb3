"""Narrative motifs over binary occupancy grids.

A pattern of nodes in (track, time) space is a binary m x n matrix. Two
matrices describe the same motif when one becomes the other by permuting
tracks (rows) or shifting the whole pattern along the time axis. Valid
patterns hold an exact node count, span at least two time columns, and are
left-packed (no empty column before a non-empty one).

With 3 nodes on a 3x3 grid exactly nine classes exist; the five that put
one node in each column are "sequential", the four with a branch or merge
column are "non-sequential".
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, permutations
from typing import Iterable

from .errors import InfeasibleParametersError, NotAMotifError
from .model import Announcement, AttributeSet, TtngGraph


class MotifName(str, Enum):
    LINEAR = "Linear"
    ARCH = "Arch"
    LADDER = "Ladder"
    EARLY_TURN = "EarlyTurn"
    LATE_TURN = "LateTurn"
    SHARP_BRANCH = "SharpBranch"
    WIDE_BRANCH = "WideBranch"
    SHARP_MERGE = "SharpMerge"
    WIDE_MERGE = "WideMerge"

    @property
    def category(self) -> str:
        return "sequential" if self in _SEQUENTIAL else "non-sequential"


_SEQUENTIAL = frozenset(
    {MotifName.LINEAR, MotifName.ARCH, MotifName.LADDER, MotifName.EARLY_TURN, MotifName.LATE_TURN}
)

MOTIF_NAMES: tuple[MotifName, ...] = tuple(MotifName)


@dataclass(frozen=True)
class OccupancyMatrix:
    """Binary track x time grid; cells[i][j] == 1 marks a node."""

    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(tuple(row) for row in self.cells))
        if not self.cells or not self.cells[0]:
            raise ValueError("occupancy matrix needs at least one row and one column")
        width = len(self.cells[0])
        for row in self.cells:
            if len(row) != width:
                raise ValueError("occupancy matrix rows must have equal length")
            for v in row:
                if v not in (0, 1):
                    raise ValueError(f"cells must be 0 or 1, got {v!r}")

    @classmethod
    def from_coords(
        cls, coords: Iterable[tuple[int, int]], rows: int | None = None, cols: int | None = None
    ) -> "OccupancyMatrix":
        coords = tuple(coords)
        m = rows if rows is not None else max(r for r, _ in coords) + 1
        n = cols if cols is not None else max(c for _, c in coords) + 1
        grid = [[0] * n for _ in range(m)]
        for r, c in coords:
            grid[r][c] = 1
        return cls(tuple(tuple(row) for row in grid))

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0])

    def coords(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (r, c) for r, row in enumerate(self.cells) for c, v in enumerate(row) if v
        )

    def node_count(self) -> int:
        return sum(sum(row) for row in self.cells)

    def column_counts(self) -> tuple[int, ...]:
        return tuple(sum(row[c] for row in self.cells) for c in range(self.cols))


@dataclass(frozen=True)
class MotifClass:
    """One equivalence class: canonical representative plus bookkeeping."""

    canonical: OccupancyMatrix
    name: MotifName | None
    members: int


def is_valid(matrix: OccupancyMatrix, node_count: int) -> bool:
    """True iff the matrix is a valid left-packed pattern of node_count nodes."""
    if matrix.node_count() != node_count:
        return False
    counts = matrix.column_counts()
    if sum(1 for c in counts if c > 0) < 2:
        return False
    seen_empty = False
    for c in counts:
        if c == 0:
            seen_empty = True
        elif seen_empty:
            return False
    return True


def left_pack(matrix: OccupancyMatrix) -> OccupancyMatrix:
    """Shift occupied columns left, preserving grid dimensions."""
    occupied = [c for c, count in enumerate(matrix.column_counts()) if count > 0]
    grid = [[0] * matrix.cols for _ in range(matrix.rows)]
    for new_c, old_c in enumerate(occupied):
        for r in range(matrix.rows):
            grid[r][new_c] = matrix.cells[r][old_c]
    return OccupancyMatrix(tuple(tuple(row) for row in grid))


def canonicalize(matrix: OccupancyMatrix) -> OccupancyMatrix:
    """Left-pack, then order rows to the lexicographically smallest tuple.

    Sorting the rows yields the minimum over all row permutations, so the
    result is constant on each track-permutation orbit and idempotent.
    """
    packed = left_pack(matrix)
    return OccupancyMatrix(tuple(sorted(packed.cells)))


def enumerate_classes(m: int, n: int, node_count: int) -> tuple[MotifClass, ...]:
    """All motif classes of node_count nodes on an m x n grid.

    Places every combination of cells, keeps valid patterns, and groups them
    by canonical form. Names are attached only to the 3-node/3x3 family.
    Exhaustive; intended for grids up to ~4x4.
    """
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be >= 1")
    if node_count < 2:
        raise ValueError("node_count must be >= 2")
    if node_count > m * n:
        raise InfeasibleParametersError(f"{node_count} nodes cannot fit a {m}x{n} grid")

    members: dict[OccupancyMatrix, int] = {}
    all_cells = [(r, c) for r in range(m) for c in range(n)]
    for chosen in combinations(all_cells, node_count):
        matrix = OccupancyMatrix.from_coords(chosen, rows=m, cols=n)
        if not is_valid(matrix, node_count):
            continue
        canon = canonicalize(matrix)
        members[canon] = members.get(canon, 0) + 1

    named = (m, n, node_count) == (3, 3, 3)
    classes = [
        MotifClass(canonical=canon, name=classify(canon) if named else None, members=count)
        for canon, count in members.items()
    ]
    classes.sort(key=lambda cls: cls.canonical.coords())
    return tuple(classes)


_SEQUENTIAL_PATTERNS = {
    "aaa": MotifName.LINEAR,
    "aba": MotifName.ARCH,
    "abc": MotifName.LADDER,
    "abb": MotifName.EARLY_TURN,
    "aab": MotifName.LATE_TURN,
}


def classify(matrix: OccupancyMatrix) -> MotifName:
    """Name the motif class of a 3-node occupancy pattern.

    Works from the canonical form's per-column profile: one node per column
    gives a sequential motif read off the track sequence; a two-node column
    is a branch or merge, sharp when a single-node neighbour shares a track
    with it, wide otherwise.
    """
    canon = canonicalize(matrix)
    if canon.node_count() != 3:
        raise NotAMotifError(f"motifs have exactly 3 nodes, got {canon.node_count()}")
    profile = tuple(c for c in canon.column_counts() if c > 0)
    columns = [
        tuple(r for r in range(canon.rows) if canon.cells[r][c])
        for c in range(len(profile))
    ]

    if profile == (1, 1, 1):
        sequence = [col[0] for col in columns]
        relabel: dict[int, str] = {}
        pattern = "".join(relabel.setdefault(r, "abc"[len(relabel)]) for r in sequence)
        return _SEQUENTIAL_PATTERNS[pattern]
    if profile == (1, 2):
        parent, children = columns[0][0], columns[1]
        return MotifName.SHARP_BRANCH if parent in children else MotifName.WIDE_BRANCH
    if profile == (2, 1):
        parents, child = columns[0], columns[1][0]
        return MotifName.SHARP_MERGE if child in parents else MotifName.WIDE_MERGE
    raise NotAMotifError(f"column profile {profile} is not a 3-node motif")


# (track, time) coordinates and edges for each named template. Ids follow the
# symbol-digit convention: letter = theme/track, digit = 1-based time column.
_TEMPLATES: dict[MotifName, tuple[tuple[tuple[str, int, int], ...], tuple[tuple[str, str], ...]]] = {
    MotifName.LINEAR: ((("A1", 0, 0), ("A2", 0, 1), ("A3", 0, 2)), (("A1", "A2"), ("A2", "A3"))),
    MotifName.ARCH: ((("A1", 0, 0), ("B2", 1, 1), ("A3", 0, 2)), (("A1", "B2"), ("B2", "A3"))),
    MotifName.LADDER: ((("A1", 0, 0), ("B2", 1, 1), ("C3", 2, 2)), (("A1", "B2"), ("B2", "C3"))),
    MotifName.EARLY_TURN: ((("A1", 0, 0), ("B2", 1, 1), ("B3", 1, 2)), (("A1", "B2"), ("B2", "B3"))),
    MotifName.LATE_TURN: ((("A1", 0, 0), ("A2", 0, 1), ("B3", 1, 2)), (("A1", "A2"), ("A2", "B3"))),
    MotifName.SHARP_BRANCH: ((("A1", 0, 0), ("A2", 0, 1), ("B2", 1, 1)), (("A1", "A2"), ("A1", "B2"))),
    MotifName.WIDE_BRANCH: ((("A1", 0, 0), ("B2", 1, 1), ("C2", 2, 1)), (("A1", "B2"), ("A1", "C2"))),
    MotifName.SHARP_MERGE: ((("A1", 0, 0), ("B1", 1, 0), ("A2", 0, 1)), (("A1", "A2"), ("B1", "A2"))),
    MotifName.WIDE_MERGE: ((("A1", 0, 0), ("C1", 2, 0), ("B2", 1, 1)), (("A1", "B2"), ("C1", "B2"))),
}


def motif_graph(name: MotifName | str) -> TtngGraph:
    """The canonical 3-node template graph for a motif name."""
    name = MotifName(name)
    node_specs, edges = _TEMPLATES[name]
    track_count = max(track for _, track, _ in node_specs) + 1
    tracks = tuple("ABC"[:track_count])
    nodes = tuple(
        Announcement(id=nid, order=col, attributes=AttributeSet(topics=(nid[0],)))
        for nid, _, col in node_specs
    )
    assignment = {nid: track for nid, track, _ in node_specs}
    return TtngGraph(nodes=nodes, tracks=tracks, assignment=assignment, edges=edges)


def occupancy_of(graph: TtngGraph, rows: int | None = None, cols: int | None = None) -> OccupancyMatrix:
    """Occupancy matrix of a graph's (track, order) placements."""
    coords = [(graph.assignment[n.id], n.order) for n in graph.nodes]
    return OccupancyMatrix.from_coords(coords, rows=rows, cols=cols)


def column_profile(name: MotifName | str) -> tuple[int, ...]:
    """Per-column node counts of a motif template, e.g. (1, 1, 1) or (2, 1)."""
    occ = occupancy_of(motif_graph(MotifName(name)))
    return tuple(c for c in occ.column_counts() if c > 0)


def reduce_matrix(matrix: OccupancyMatrix) -> frozenset[OccupancyMatrix]:
    """Canonical forms reachable by deleting one node and re-left-packing."""
    results = set()
    for r, c in matrix.coords():
        grid = [list(row) for row in matrix.cells]
        grid[r][c] = 0
        results.add(canonicalize(OccupancyMatrix(tuple(tuple(row) for row in grid))))
    return frozenset(results)


def row_permutation_orbit(matrix: OccupancyMatrix) -> frozenset[OccupancyMatrix]:
    """Every row permutation of a matrix (used by tests and demos)."""
    return frozenset(
        OccupancyMatrix(tuple(matrix.cells[i] for i in perm))
        for perm in permutations(range(matrix.rows))
    )


def catalog() -> list[dict]:
    """JSON-able export of the nine named motifs with canonical cells and templates."""
    entries = []
    for name in MOTIF_NAMES:
        graph = motif_graph(name)
        canon = canonicalize(occupancy_of(graph, rows=3, cols=3))
        entries.append(
            {
                "name": name.value,
                "category": name.category,
                "canonical_cells": [list(rc) for rc in canon.coords()],
                "nodes": [
                    {"id": n.id, "order": n.order, "track": graph.assignment[n.id]}
                    for n in graph.nodes
                ],
                "edges": [{"from": f, "to": t} for f, t in graph.edges],
            }
        )
    return entries
