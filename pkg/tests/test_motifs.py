from __future__ import annotations

import random
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from ttng.errors import InfeasibleParametersError, NotAMotifError
from ttng.motifs import (
    MOTIF_NAMES,
    MotifName,
    OccupancyMatrix,
    canonicalize,
    classify,
    column_profile,
    enumerate_classes,
    is_valid,
    left_pack,
    motif_graph,
    occupancy_of,
    reduce_matrix,
    row_permutation_orbit,
)

M = OccupancyMatrix.from_coords


class TestIsValid:
    def test_single_column_fails_min_span(self):
        assert not is_valid(M([(0, 0), (1, 0), (2, 0)], rows=3, cols=3), 3)

    def test_single_track_chain_is_valid(self):
        assert is_valid(M([(0, 0), (0, 1), (0, 2)], rows=1, cols=3), 3)

    def test_interior_empty_column_fails(self):
        assert not is_valid(M([(0, 0), (0, 2)], rows=1, cols=3), 2)

    def test_wrong_node_count_fails(self):
        assert not is_valid(M([(0, 0), (0, 1)], rows=1, cols=2), 3)


class TestCanonicalize:
    def test_row_permutation_symmetry(self):
        arch_high = M([(2, 0), (0, 1), (2, 2)], rows=3, cols=3)
        arch_low = M([(0, 0), (1, 1), (0, 2)], rows=3, cols=3)
        assert canonicalize(arch_high) == canonicalize(arch_low)

    def test_time_shift_left_packs(self):
        shifted = M([(0, 1), (0, 2)], rows=1, cols=3)
        assert canonicalize(shifted) == canonicalize(M([(0, 0), (0, 1)], rows=1, cols=3))
        assert left_pack(shifted).coords() == ((0, 0), (0, 1))

    def test_idempotent_on_1000_random_matrices(self):
        rng = random.Random(77)
        for _ in range(1000):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            cells = tuple(
                tuple(rng.randint(0, 1) for _ in range(cols)) for _ in range(rows)
            )
            m = OccupancyMatrix(cells)
            once = canonicalize(m)
            assert canonicalize(once) == once

    def test_constant_on_row_orbit(self):
        base = M([(0, 0), (1, 1), (0, 2)], rows=3, cols=3)
        assert len({canonicalize(m) for m in row_permutation_orbit(base)}) == 1


class TestEnumerate:
    def test_3x3x3_yields_nine_named_classes(self):
        classes = enumerate_classes(3, 3, 3)
        assert len(classes) == 9
        assert {c.name for c in classes} == set(MOTIF_NAMES)

    def test_2x2x2_yields_two_chains(self):
        classes = enumerate_classes(2, 2, 2)
        assert len(classes) == 2
        coord_sets = {c.canonical.coords() for c in classes}
        assert coord_sets == {((0, 1), (1, 0)), ((1, 0), (1, 1))}

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_single_track_always_one_class(self, n):
        assert len(enumerate_classes(1, n, n)) == 1

    def test_infeasible(self):
        with pytest.raises(InfeasibleParametersError):
            enumerate_classes(2, 2, 5)

    def test_member_counts_cover_all_valid_matrices(self):
        # 27 one-per-column patterns + 9 merges + 9 branches on the 3x3 grid.
        assert sum(c.members for c in enumerate_classes(3, 3, 3)) == 45

    def test_names_only_on_the_3x3x3_family(self):
        assert all(c.name is None for c in enumerate_classes(3, 3, 2))


class TestClassify:
    def test_arch(self):
        assert classify(M([(0, 0), (1, 1), (0, 2)], rows=3, cols=3)) == MotifName.ARCH

    def test_wide_merge(self):
        assert classify(M([(0, 0), (2, 0), (1, 1)], rows=3, cols=3)) == MotifName.WIDE_MERGE

    def test_sharp_branch(self):
        assert classify(M([(0, 0), (0, 1), (1, 1)], rows=3, cols=3)) == MotifName.SHARP_BRANCH

    def test_rejects_single_column(self):
        with pytest.raises(NotAMotifError):
            classify(M([(0, 0), (1, 0), (2, 0)], rows=3, cols=3))

    def test_rejects_wrong_node_count(self):
        with pytest.raises(NotAMotifError):
            classify(M([(0, 0), (0, 1)], rows=3, cols=3))

    @pytest.mark.parametrize("name", MOTIF_NAMES, ids=lambda n: n.value)
    def test_exhaustive_row_permutations_and_shifts(self, name):
        base = occupancy_of(motif_graph(name), rows=3, cols=3)
        width = max(c for _, c in base.coords()) + 1
        for perm in permutations(range(3)):
            for shift in range(3 - width + 1):
                coords = [(perm[r], c + shift) for r, c in base.coords()]
                assert classify(M(coords, rows=3, cols=3)) == name

    @given(
        name=st.sampled_from(MOTIF_NAMES),
        rows=st.integers(3, 5),
        cols=st.integers(3, 5),
        data=st.data(),
    )
    @settings(max_examples=600, deadline=None)
    def test_invariance_property(self, name, rows, cols, data):
        base = occupancy_of(motif_graph(name))
        width = max(c for _, c in base.coords()) + 1
        track_map = data.draw(
            st.permutations(range(rows)).map(lambda p: p[:3]), label="track placement"
        )
        shift = data.draw(st.integers(0, cols - width), label="time shift")
        coords = [(track_map[r], c + shift) for r, c in base.coords()]
        assert classify(M(coords, rows=rows, cols=cols)) == name


class TestTemplates:
    def test_linear_template(self):
        g = motif_graph(MotifName.LINEAR)
        assert [(n.id, n.order, g.assignment[n.id]) for n in g.nodes] == [
            ("A1", 0, 0), ("A2", 1, 0), ("A3", 2, 0)
        ]
        assert g.edges == (("A1", "A2"), ("A2", "A3"))

    def test_sharp_merge_template(self):
        g = motif_graph(MotifName.SHARP_MERGE)
        placements = {(g.assignment[n.id], n.order) for n in g.nodes}
        assert placements == {(0, 0), (1, 0), (0, 1)}
        assert set(g.edges) == {("A1", "A2"), ("B1", "A2")}

    @pytest.mark.parametrize("name", MOTIF_NAMES, ids=lambda n: n.value)
    def test_round_trip(self, name):
        assert classify(occupancy_of(motif_graph(name))) == name

    @pytest.mark.parametrize("name", MOTIF_NAMES, ids=lambda n: n.value)
    def test_category_matches_column_profile(self, name):
        profile = column_profile(name)
        if name.category == "sequential":
            assert profile == (1, 1, 1)
        else:
            assert profile in ((1, 2), (2, 1))


class TestReduce:
    def test_ladder_reduces_to_row_changing_chain(self):
        ladder = occupancy_of(motif_graph(MotifName.LADDER), rows=3, cols=3)
        chain = canonicalize(M([(0, 0), (1, 1)], rows=3, cols=3))
        assert chain in reduce_matrix(ladder)

    def test_branch_reduces_to_two_node_chain(self):
        branch = occupancy_of(motif_graph(MotifName.SHARP_BRANCH), rows=3, cols=3)
        results = reduce_matrix(branch)
        chains = {c.canonical for c in enumerate_classes(3, 3, 2)}
        assert results & chains

    def test_every_motif_reduces_into_the_two_node_classes(self):
        two_node = {c.canonical for c in enumerate_classes(3, 3, 2)}
        for cls in enumerate_classes(3, 3, 3):
            reachable = reduce_matrix(cls.canonical)
            spanning = {m for m in reachable if len({c for _, c in m.coords()}) >= 2}
            assert spanning, f"{cls.name} lost all span-preserving reductions"
            assert spanning <= two_node
