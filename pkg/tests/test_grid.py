"""Grid-module tests.

The combinatorial fixtures are checked against tiny brute-force oracles
written independently in this file: blocks by scanning all subsets, walk
cores by explicit path search.  The cubic fixture values frozen here were
computed with exact rational arithmetic (see notes on the cell self-arrows
near the slow fixed points).
"""

import itertools

import pytest

from morselat import (
    CellGrid,
    CellMap,
    ImageOutOfDomain,
    NotARepellingBlock,
    NotASublattice,
    TooLarge,
    ingest_interval_map,
)
from morselat.grid import (
    attracting_blocks,
    block_lattices,
    comb_att_lattice,
    comb_inv,
    comb_inv_plus,
    comb_rep_lattice,
    grid_attractor_lift,
    grid_lift_problem,
    is_attracting_block,
    is_repelling_block,
    shrink_repelling_block,
)
from morselat.lifting import lift


def fs(*items):
    return frozenset(items)


# -- independent oracles -------------------------------------------------------


def oracle_blocks(cmap):
    n = cmap.n
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        cells = {i for i in range(n) if bits[i]}
        if all(cmap.arrows[c] <= cells for c in cells):
            out.append(frozenset(cells))
    return out


def oracle_walk_core(cells, cmap, forward_only=False):
    """Cells on an infinite (bi-infinite unless forward_only) walk, by
    iterative pruning: drop cells with no successor (or no predecessor)."""
    cur = set(cells)
    while True:
        nxt = {c for c in cur if cmap.arrows[c] & cur}
        if not forward_only:
            nxt = {c for c in nxt if any(c in cmap.arrows[d] for d in nxt)}
            # re-run until both conditions stabilize together
        if nxt == cur:
            return frozenset(cur)
        cur = nxt


class TestIngest:
    def test_cubic_fixture_arrows(self, g1):
        # endpoints are sampled, the map is monotone, so arrows are exact;
        # extreme cells map within themselves plus inward neighbors
        assert sorted(g1.arrows[0]) == [0, 1]
        assert sorted(g1.arrows[15]) == [14, 15]
        # boundary-sharing at 0 with the declared padding
        assert sorted(g1.arrows[7]) == [7, 8]
        assert sorted(g1.arrows[8]) == [7, 8]
        # the slow cells next to the fixed points carry genuine self-arrows:
        # f(0.25) = 0.1328125 stays inside [0.125, 0.25]
        assert 9 in g1.arrows[9]
        assert 14 in g1.arrows[14]

    def test_piecewise_fixture_parses_and_maps(self, g2):
        # everything left of 0 maps to the cells containing 0
        assert g2.arrows[0] <= fs(7, 8)
        assert all(g2.arrows[c] for c in range(16))

    def test_identity_contains_self_arrows(self):
        grid = CellGrid(-1.0, 1.0, 8)
        cmap = ingest_interval_map("x", grid)
        for c in range(8):
            assert c in cmap.arrows[c]

    def test_image_out_of_domain(self):
        grid = CellGrid(-1.0, 1.0, 4)
        with pytest.raises(ImageOutOfDomain) as err:
            ingest_interval_map("2*x", grid)
        assert err.value.cell in (0, 3)

    def test_samples_floor(self):
        grid = CellGrid(-1.0, 1.0, 4)
        with pytest.raises(ValueError):
            ingest_interval_map("x", grid, samples_per_cell=1)


class TestBlocks:
    def test_full_grid_is_both(self, g1):
        full = g1.all_cells()
        assert is_attracting_block(full, g1)
        assert is_repelling_block(full, g1)

    def test_central_band_attracts(self, g1):
        # cells covering [-0.25, 0.25]
        assert is_attracting_block(fs(6, 7, 8, 9), g1)

    def test_complement_law_exhaustive(self, g1):
        full = g1.all_cells()
        for n in oracle_blocks(g1):
            assert is_repelling_block(full - n, g1)
        # and on a thinned sample of non-blocks
        for m in range(0, 1 << 16, 257):
            cells = frozenset(i for i in range(16) if m >> i & 1)
            assert is_attracting_block(cells, g1) == is_repelling_block(full - cells, g1)

    def test_block_enumeration_matches_oracle(self, g1):
        assert sorted(map(sorted, attracting_blocks(g1))) == sorted(
            map(sorted, oracle_blocks(g1))
        )

    def test_enumeration_bound(self, g1):
        with pytest.raises(TooLarge):
            attracting_blocks(g1, bound=8)


class TestCombInv:
    def test_empty(self, g1):
        assert comb_inv(fs(), g1) == fs()

    def test_full_grid_walk_core(self, g1):
        # with self-arrows at c1, c6, c9, c14 every cell sits on a bi-infinite
        # walk, so the walk core of the full grid is everything
        assert comb_inv(g1.all_cells(), g1) == g1.all_cells()
        assert comb_inv(g1.all_cells(), g1) == oracle_walk_core(range(16), g1)

    def test_acyclic_chain_has_no_core(self):
        grid = CellGrid(0.0, 3.0, 3)
        cmap = CellMap(grid, (fs(1), fs(2), fs(2)))
        assert comb_inv(fs(0, 1, 2), cmap) == fs(2)
        nochain = CellMap(grid, (fs(1), fs(2), fs(0)))
        assert comb_inv(fs(0, 1), nochain) == fs()
        assert comb_inv_plus(fs(0, 1), nochain) == fs()

    def test_matches_oracle_on_blocks(self, g1):
        for n in oracle_blocks(g1):
            assert comb_inv(n, g1) == oracle_walk_core(n, g1)

    def test_inv_plus_semantics(self, g1):
        # the left half is not forward-closed but every cell of it can reach
        # the cycle at the left fixed point or the center
        left = fs(*range(8))
        assert comb_inv_plus(left, g1) == left
        assert comb_inv_plus(fs(2, 3), g1) == fs()

    def test_monotone_and_idempotent(self, g1):
        sets = [fs(*range(k)) for k in range(17)] + [fs(3, 4, 5), fs(7, 8, 9)]
        for a in sets:
            for b in sets:
                if a <= b:
                    assert comb_inv(a, g1) <= comb_inv(b, g1)
                    assert comb_inv_plus(a, g1) <= comb_inv_plus(b, g1)
        for a in sets:
            assert comb_inv(comb_inv(a, g1), g1) == comb_inv(a, g1)
            assert comb_inv_plus(comb_inv_plus(a, g1), g1) == comb_inv_plus(a, g1)


class TestLattices:
    def test_g1_att_lattice_exhaustive_count(self, g1):
        # frozen from the exact-arithmetic oracle: seventeen combinatorial
        # attractors at sixteen cells; the slow cells force blocks such as
        # {7,8,9} beyond the five one would naively expect from the three
        # fixed points (see project notes)
        lat = comb_att_lattice(g1)
        assert len(lat) == 17
        assert fs(7, 8) in lat and fs(7, 8, 9) in lat and fs(6, 7, 8) in lat

    def test_g1_distinguished_five_element_sublattice(self, g1):
        lat = comb_att_lattice(g1)
        a0, am, ap = fs(7, 8), fs(*range(9)), fs(*range(7, 16))
        full = g1.all_cells()
        fam = {fs(), a0, am, ap, full}
        assert fam <= set(lat.elements)
        assert lat.meet(am, ap) == a0
        assert lat.join(am, ap) == full

    def test_identity_map_blocks(self):
        # sampled identity arrows spill into boundary-sharing neighbors, so
        # blocks are the neighbor-closed cell sets; all of them are their own
        # walk cores
        grid = CellGrid(0.0, 4.0, 4)
        cmap = ingest_interval_map("x", grid, padding=0.0)
        att, rep = block_lattices(cmap)
        assert fs() in att and cmap.all_cells() in att
        for n in att.elements:
            assert comb_inv(n, cmap) == n

    def test_g2_contains_attractor_over_zero(self, g2):
        lat = comb_att_lattice(g2)
        assert any(7 in e or 8 in e for e in lat.elements if e)

    def test_seeded_mode(self, g1):
        att, rep = block_lattices(g1, bound=8, seeds=[fs(*range(9)), fs(*range(7, 16))])
        assert fs(*range(9)) in att
        assert g1.all_cells() in att and fs() in att
        for n in att.elements:
            assert is_attracting_block(n, g1)

    def test_rep_lattice_dual(self, g1):
        rep = comb_rep_lattice(g1)
        att = comb_att_lattice(g1)
        assert len(rep) == len(att)


class TestShrink:
    def test_shrink_to_fixed_point_is_walk_core(self, g1):
        full = g1.all_cells()
        assert shrink_repelling_block(full, g1) == comb_inv_plus(full, g1)

    def test_already_minimal(self, g1):
        r = comb_inv_plus(fs(*range(9, 16)), g1)
        w = shrink_repelling_block(r, g1)
        assert w == r

    def test_right_half_isolates_the_endpoint_cells(self, g1):
        right = fs(*range(9, 16))
        assert is_repelling_block(right, g1)
        w = shrink_repelling_block(right, g1)
        assert w == comb_inv_plus(right, g1)
        assert 15 in w

    def test_rejects_non_block(self, g1):
        with pytest.raises(NotARepellingBlock):
            shrink_repelling_block(fs(3), g1)

    def test_each_iterate_is_a_block(self, g1):
        w = g1.all_cells()
        for depth in range(4):
            shrunk = shrink_repelling_block(w, g1, max_depth=depth)
            assert is_repelling_block(shrunk, g1)


class TestGridLift:
    def five_family(self, g1):
        return [fs(), fs(7, 8), fs(*range(9)), fs(*range(7, 16)), g1.all_cells()]

    def test_repeller_lift_of_dual_family(self, g1):
        fam = self.five_family(g1)
        full = g1.all_cells()
        rep_images = sorted(
            {comb_inv_plus(full - e, g1) for e in fam}, key=lambda e: (len(e), sorted(e))
        )
        cert = lift(grid_lift_problem(g1, rep_images))
        cert.verify()
        assert cert.top_preserved

    def test_trivial_family(self, g1):
        cert = lift(grid_lift_problem(g1, [fs(), g1.all_cells()]))
        assert cert.table[frozenset(cert.problem.poset.carrier)] == g1.all_cells()

    def test_full_repeller_lattice(self, g1):
        rep = comb_rep_lattice(g1)
        cert = lift(grid_lift_problem(g1, rep.elements))
        cert.verify()

    def test_not_a_sublattice(self, g1):
        # missing the join of the two branch attractors
        fam = [fs(), fs(7, 8), fs(*range(9)), fs(*range(7, 16))]
        with pytest.raises(NotASublattice):
            grid_attractor_lift(g1, fam)

    def test_plain_intersection_of_repellers_can_fail(self):
        # the three-cell counterexample: two repelling blocks whose plain
        # intersection has no infinite forward walk
        grid = CellGrid(0.0, 3.0, 3)
        cmap = CellMap(grid, (fs(1, 2), fs(1), fs(2)))
        n1, n2 = fs(0, 1), fs(0, 2)
        assert is_repelling_block(n1, cmap) and is_repelling_block(n2, cmap)
        assert comb_inv_plus(n1, cmap) == n1
        assert comb_inv_plus(n2, cmap) == n2
        assert comb_inv_plus(n1 & n2, cmap) == fs()  # plain cap is not a repeller

    def test_attractor_transport_five_family(self, g1):
        cert = grid_attractor_lift(g1, self.five_family(g1))
        cert.verify()
        for d, v in cert.table.items():
            assert comb_inv(v, g1) == cert.problem.s[d]

    def test_direct_route_succeeds_on_interval_fixture(self, g1):
        # an interval map cannot produce the branched-graph overlap, so the
        # direct attractor route goes through even when pinned minimal
        cert = grid_attractor_lift(
            g1, self.five_family(g1), direct=True, pinned={fs(7, 8): fs(7, 8)}
        )
        cert.verify()

    def test_direct_route_full_lattice(self, g1):
        lat = comb_att_lattice(g1)
        cert = grid_attractor_lift(g1, lat.elements, direct=True)
        cert.verify()


class TestRefinement:
    @pytest.mark.parametrize("cells", [16, 32, 64])
    def test_distinguished_family_exists_at_every_resolution(self, cells):
        cmap = ingest_interval_map("(x + x^3)/2", CellGrid(-1.0, 1.0, cells))
        h = cells // 2
        a0 = fs(h - 1, h)
        am = comb_inv(frozenset(range(h + 1)), cmap)
        ap = comb_inv(frozenset(range(h - 1, cells)), cmap)
        for e in (a0, am, ap):
            blk = e
            assert is_attracting_block(blk, cmap)
            assert comb_inv(blk, cmap) == e

    @pytest.mark.parametrize("fine_cells", [32, 64])
    def test_refinement_never_loses_an_attractor(self, fine_cells):
        # each coarse combinatorial attractor contains a fine one: forward
        # closure of the fine cells under the coarse support stays inside it
        from morselat.grid import _forward_closure

        coarse_map = ingest_interval_map("(x + x^3)/2", CellGrid(-1.0, 1.0, 16))
        coarse = comb_att_lattice(coarse_map)
        fine_map = ingest_interval_map("(x + x^3)/2", CellGrid(-1.0, 1.0, fine_cells))
        for e in coarse.elements:
            sup = coarse_map.grid.support(e)
            inside = frozenset(
                c
                for c in range(fine_cells)
                if any(
                    fa >= ca - 1e-9 and fb <= cb + 1e-9
                    for (ca, cb) in sup
                    for (fa, fb) in [fine_map.grid.cell_bounds(c)]
                )
            )
            block = _forward_closure(inside, fine_map)
            fine_attractor = comb_inv(block, fine_map)
            assert bool(fine_attractor) == bool(e)
            for fa, fb in fine_map.grid.support(fine_attractor):
                assert any(fa >= ca - 1e-9 and fb <= cb + 1e-9 for (ca, cb) in sup)
