import itertools

import pytest

from dendron import forests as FO
from dendron import omega as OM
from dendron import trees as TR
from dendron.errors import (
    IndexOutOfRange,
    LabelMismatch,
    MapNotTotal,
    NotInjective,
    PullbackFails,
)

SMALL = FO.enumerate_forests(2, 2, max_edges=3)


def test_edge_and_corolla_counts():
    assert (FO.EDGE_FOREST.n_edges, FO.EDGE_FOREST.n_vertices) == (1, 0)
    c3 = FO.corolla_forest(3)
    assert (c3.n_edges, c3.n_vertices) == (4, 1)
    f = FO.validate_forest((3, 2), ((0, 0, 1),))
    assert (f.n_edges, f.n_vertices) == (5, 2)


def test_validate_forest_rejects_partial_map():
    with pytest.raises(MapNotTotal):
        FO.validate_forest((2, 1), ((0,),))
    with pytest.raises(MapNotTotal):
        FO.validate_forest((1, 1), ((3,),))


def test_morphism_rejects_non_injective_level():
    c2 = FO.corolla_forest(2)
    with pytest.raises(NotInjective):
        FO.validate_forest_morphism(c2, c2, (0, 1), ((0, 0), (0,)))


def test_morphism_rejects_pullback_failure():
    # include only part of a fiber: the square cannot be a pullback
    big = FO.validate_forest((2, 1), ((0, 0),))
    c1 = FO.corolla_forest(1)
    with pytest.raises(PullbackFails):
        FO.validate_forest_morphism(c1, big, (0, 1), ((0,), (0,)))


def test_degeneracy_style_composite_map_accepted():
    target = FO.validate_forest((2, 2, 1), ((0, 1), (0, 0)))
    ms = FO.enumerate_forest_morphisms(FO.corolla_forest(2), target)
    assert len(ms) == 4
    assert {m.alpha for m in ms} == {(0, 2), (1, 2)}
    for m in ms:
        FO.validate_forest_morphism(m.source, m.target, m.alpha, m.phis)


def test_identity_and_composition_laws():
    for s in SMALL[:8]:
        ident = FO.identity_forest_morphism(s)
        for t in SMALL[:8]:
            for f in FO.enumerate_forest_morphisms(s, t):
                assert FO.compose_forest_morphisms(f, ident) == f
                assert FO.compose_forest_morphisms(
                    FO.identity_forest_morphism(t), f) == f


def test_factorization_recompose_and_classes():
    for s in SMALL:
        for t in SMALL:
            for f in FO.enumerate_forest_morphisms(s, t):
                a, i = FO.factorize_forest(f)
                assert FO.is_active_forest(a) and FO.is_inert_forest(i)
                assert FO.compose_forest_morphisms(i, a) == f


def test_cor_forest_values():
    assert FO.cor_forest(FO.EDGE_FOREST) == 0
    assert FO.cor_forest(FO.validate_forest((3, 2), ((0, 0, 1),))) == 2


def test_cor_forest_preserves_classes():
    for s in SMALL:
        for t in SMALL:
            for f in FO.enumerate_forest_morphisms(s, t):
                a, i = FO.factorize_forest(f)
                assert FO.cor_forest_morphism(i).is_inert()
                assert FO.cor_forest_morphism(a).is_active()


def test_cor_forest_functorial():
    from dendron import pointed
    pool = SMALL[:7]
    for s in pool:
        for t in pool:
            for u in pool:
                for f in FO.enumerate_forest_morphisms(s, t):
                    for g in FO.enumerate_forest_morphisms(t, u):
                        lhs = FO.cor_forest_morphism(
                            FO.compose_forest_morphisms(g, f))
                        rhs = pointed.compose(FO.cor_forest_morphism(f),
                                              FO.cor_forest_morphism(g))
                        assert lhs == rhs


def test_restrict_fiber_split():
    c3 = FO.corolla_forest(3)
    assert FO.restrict(c3, 0, 1) == c3
    f32 = FO.validate_forest((3, 2), ((0, 0, 1),))
    assert FO.fiber(f32, 0) == FO.corolla_forest(2)
    assert FO.fiber(f32, 1) == FO.corolla_forest(1)
    empty_chain = FO.validate_forest((0, 0), ((),))
    assert FO.split(FO.validate_forest((2,), ())) == \
        [FO.EDGE_FOREST, FO.EDGE_FOREST]
    assert FO.split(FO.validate_forest((0,), ())) == []
    assert empty_chain.n_edges == 0 and FO.split(empty_chain) == []
    with pytest.raises(IndexOutOfRange):
        FO.fiber(f32, 5)


def test_split_components_are_trees_and_partition():
    for f in FO.enumerate_forests(3, 3, max_edges=4):
        parts = FO.split(f)
        assert all(FO.is_tree_object(p) for p in parts)
        assert sum(p.n_edges for p in parts) == f.n_edges
        assert sum(p.n_vertices for p in parts) == f.n_vertices


def test_underlying_tree_examples():
    assert FO.underlying_tree(FO.EDGE_FOREST) == TR.make_edge()
    for n in range(4):
        assert TR.is_isomorphic(FO.underlying_tree(FO.corolla_forest(n)),
                                TR.make_corolla(n)) is not None
    f = FO.validate_forest((2, 1, 1), ((0, 0), (0,)))
    t = FO.underlying_tree(f)
    assert (t.n_edges, t.n_vertices) == (4, 2)
    arities = sorted(t.arity(v) for v in t.vertices())
    assert arities == [1, 2]


def test_tau_on_inert_is_embedding():
    target = FO.validate_forest((2, 1, 1), ((0, 0), (0,)))
    for src in [FO.corolla_forest(2), FO.corolla_forest(1), FO.EDGE_FOREST]:
        for f in FO.enumerate_forest_morphisms(src, target):
            if not FO.is_inert_forest(f):
                continue
            emb = FO.tau_on_inert(f)
            assert OM.is_inert(emb)


def test_tau_functorial_on_tree_objects():
    pool = [f for f in FO.enumerate_forests(3, 2, max_edges=4)
            if FO.is_tree_object(f)]
    for a in pool:
        for b in pool:
            for f in FO.enumerate_forest_morphisms(a, b):
                for c in pool:
                    for g in FO.enumerate_forest_morphisms(b, c):
                        lhs = FO.tau_morphism(
                            FO.compose_forest_morphisms(g, f))
                        rhs = OM.compose(FO.tau_morphism(g),
                                         FO.tau_morphism(f))
                        assert lhs == rhs


def test_elementary_cover_shapes():
    cover = FO.elementary_cover(FO.EDGE_FOREST)
    assert len(cover["edges"]) == 1 and not cover["vertices"]
    for n in range(4):
        cover = FO.elementary_cover(FO.corolla_forest(n))
        assert len(cover["edges"]) == n + 1
        assert len(cover["vertices"]) == 1
    for f in FO.enumerate_forests(2, 3, max_edges=4):
        cover = FO.elementary_cover(f)
        assert len(cover["vertices"]) == f.n_vertices
        assert len(cover["edges"]) == f.n_edges


def _z2_monoid():
    return FO.validate_monoid(("1", "a"), "1", ((0, 1), (1, 0)))


def test_monoid_validation_rejects_bad_table():
    # unit row broken: a * 1 = 1
    with pytest.raises(LabelMismatch):
        FO.validate_monoid(("1", "a"), "1", ((0, 1), (0, 0)))
    # non-commutative table
    with pytest.raises(LabelMismatch):
        FO.validate_monoid(("1", "a"), "1", ((0, 1), (0, 1)))
    # the idempotent table is a genuine commutative monoid
    FO.validate_monoid(("1", "a"), "1", ((0, 1), (1, 1)))


def test_labelled_morphism_unit_labels_always_accepted():
    M = _z2_monoid()
    target = FO.validate_forest((2, 2, 1), ((0, 1), (0, 0)))
    src = FO.corolla_forest(2)
    lab_t = FO.LabelledForest(target, M, ("1",) * target.n_vertices)
    lab_s = FO.LabelledForest(src, M, ("1",))
    for f in FO.enumerate_forest_morphisms(src, target):
        assert FO.validate_labelled_morphism(f, lab_s, lab_t)


def test_labelled_active_morphism_products_commute():
    M = _z2_monoid()
    target = FO.validate_forest((2, 2, 1), ((0, 1), (0, 0)))
    lab_t = FO.LabelledForest(target, M, ("a", "1", "a"))
    src = FO.corolla_forest(2)
    active = [f for f in FO.enumerate_forest_morphisms(src, target)
              if FO.is_active_forest(f)]
    assert active
    # product over all three vertices is a * 1 * a = 1
    lab_s = FO.LabelledForest(src, M, ("1",))
    for f in active:
        assert FO.validate_labelled_morphism(f, lab_s, lab_t)
    bad = FO.LabelledForest(src, M, ("a",))
    with pytest.raises(LabelMismatch):
        FO.validate_labelled_morphism(active[0], bad, lab_t)


def test_cartesian_lift_restricts_labels():
    M = _z2_monoid()
    target = FO.validate_forest((2, 2, 1), ((0, 1), (0, 0)))
    lab_t = FO.LabelledForest(target, M, ("a", "1", "a"))
    cover = FO.elementary_cover(target)
    for (key, incl) in cover["vertices"]:
        lift = FO.cartesian_lift(incl, lab_t)
        assert FO.validate_labelled_morphism(incl, lift, lab_t)
        (i, x) = key
        assert lift.labels == (lab_t.label_of(i, x),)


def test_enumerate_forests_small_counts():
    assert [f.levels for f in FO.enumerate_forests(0, 1)] == [(0,), (1,)]
    assert len(FO.enumerate_forests(0, 2)) == 3
    got = FO.enumerate_forests(1, 4, max_edges=5)
    for n in range(4):
        assert any(f == FO.corolla_forest(n) for f in got)


def _forest_iso_oracle(a, b):
    """Brute force: per-level bijections commuting with the maps."""
    if a.levels != b.levels:
        return False
    perms = [itertools.permutations(range(n)) for n in a.levels]
    for combo in itertools.product(*perms):
        ok = True
        for i in range(a.length):
            for x in range(a.levels[i]):
                if combo[i + 1][a.maps[i][x]] != b.maps[i][combo[i][x]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def test_enumeration_matches_pairwise_oracle():
    raw = []
    for levels, maps in FO._raw_chains(2, 2, 3):
        f = FO.Forest(levels, maps)
        if f.n_edges <= 3:
            raw.append(f)
    reps = []
    for f in raw:
        if not any(_forest_iso_oracle(f, r) for r in reps):
            reps.append(f)
    assert len(reps) == len(SMALL)


def test_canonical_form_is_iso_invariant():
    for f in SMALL:
        # permute a level and re-canonicalize
        if f.n_edges and f.levels[0] >= 2:
            perm = tuple(reversed(range(f.levels[0])))
            maps = list(f.maps)
            if f.length >= 1:
                maps[0] = tuple(f.maps[0][perm[x]]
                                for x in range(f.levels[0]))
            g = FO.Forest(f.levels, tuple(maps))
            assert FO.canonical_forest(g) == FO.canonical_forest(f)
            assert FO.forest_descriptor(g) == FO.forest_descriptor(f)


def test_forest_json_round_trip():
    for f in SMALL:
        assert FO.forest_from_json(FO.forest_to_json(f)) == f
    M = _z2_monoid()
    lf = FO.LabelledForest(FO.corolla_forest(2), M, ("a",))
    assert FO.forest_from_json(FO.forest_to_json(lf)) == lf
    cf = FO.EdgeColoredForest(FO.corolla_forest(2), (0, 1, 0))
    assert FO.forest_from_json(FO.forest_to_json(cf)) == cf


def test_forest_dot_includes_labels():
    M = _z2_monoid()
    lf = FO.LabelledForest(FO.corolla_forest(2), M, ("a",))
    dot = FO.forest_to_dot(lf)
    assert 'data="a"' in dot and dot.count("->") == 3
