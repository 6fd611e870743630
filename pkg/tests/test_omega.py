import itertools

import pytest

from dendron import omega as OM
from dendron import trees as TR
from dendron.errors import ArityMismatch, MiddleSquareNotCartesian

POOL = TR.enumerate_trees(2, 2)
SMALL = TR.enumerate_trees(2, 2)


def test_sub_of_edge_and_corolla():
    assert len(OM.subtrees(TR.make_edge())) == 1
    assert len(OM.subtrees(TR.make_corolla(2))) == 4


def test_sub_counts_against_inert_image_oracle():
    # independent route: subtrees are exactly the images of inert morphisms
    target = TR.make_corolla(2)
    images = set()
    for src in TR.enumerate_trees(3, 3):
        for f in OM.enumerate_morphisms(src, target):
            if OM.is_inert(f):
                images.add(OM.image_subtree(f))
    assert images == set(OM.subtrees(target))


def test_marked_sub_count_with_oracle():
    target = TR.make_corolla(2)
    marked = OM.marked_subtrees(target)
    oracle = sum(len(OM.subtree_leaves(target, st))
                 for st in OM.subtrees(target))
    assert len(marked) == oracle == 5


def test_free_monad_structure_maps():
    t = TR.make_corolla(2)
    fm = OM.free_monad(t)
    assert len(fm.subtrees) == 4 and len(fm.marked) == 5
    for i in range(len(fm.marked)):
        st = fm.subtrees[fm.projection(i)]
        assert fm.marked_edge(i) in OM.subtree_leaves(t, st)
    for i, st in enumerate(fm.subtrees):
        assert fm.root_edge(i) == st.root


def test_validate_rejects_leaf_count_mismatch():
    c1, c2 = TR.make_corolla(1), TR.make_corolla(2)
    with pytest.raises(MiddleSquareNotCartesian):
        OM.validate_morphism(c1, c2, (0, 1), (OM.eta_subtree(0),))


def test_identity_is_unit():
    for s in SMALL:
        ident = OM.identity(s)
        for t in SMALL:
            for f in OM.enumerate_morphisms(s, t):
                assert OM.compose(f, ident) == f
                assert OM.compose(OM.identity(t), f) == f


def test_composition_associative_small():
    tiny = TR.enumerate_trees(1, 2)
    for a in tiny:
        for b in tiny:
            for c in tiny:
                for d in tiny:
                    for f in OM.enumerate_morphisms(a, b):
                        for g in OM.enumerate_morphisms(b, c):
                            for h in OM.enumerate_morphisms(c, d):
                                lhs = OM.compose(h, OM.compose(g, f))
                                rhs = OM.compose(OM.compose(h, g), f)
                                assert lhs == rhs


def test_hom_from_edge_counts_edges():
    for t in POOL:
        assert len(OM.enumerate_morphisms(TR.make_edge(), t)) == t.n_edges


def test_hom_c1_to_edge_is_the_degeneracy():
    ms = OM.enumerate_morphisms(TR.make_corolla(1), TR.make_edge())
    assert len(ms) == 1
    (f,) = ms
    assert f.f1[0] == OM.eta_subtree(0)
    assert not OM.is_inert(f) and OM.is_active(f)


def test_identity_in_every_hom():
    for t in POOL:
        assert OM.identity(t) in OM.enumerate_morphisms(t, t)


def test_linear_homs_match_simplex_counts():
    # the linear trees embed the simplex category fully faithfully
    import math
    for n in range(0, 3):
        for m in range(0, 3):
            count = len(OM.enumerate_morphisms(TR.linear_tree(n),
                                               TR.linear_tree(m)))
            assert count == math.comb(m + n + 1, n + 1)


def test_factorization_and_classes():
    for s in SMALL:
        for t in SMALL:
            for f in OM.enumerate_morphisms(s, t):
                a, i = OM.factorize(f)
                assert OM.is_active(a) and OM.is_inert(i)
                assert OM.compose(i, a) == f
                if OM.is_inert(f):
                    assert OM.is_isomorphism(a)
                if OM.is_active(f):
                    assert OM.is_isomorphism(i)


def test_class_closure_under_composition():
    for s in SMALL:
        for t in SMALL:
            for u in SMALL:
                for f in OM.enumerate_morphisms(s, t):
                    for g in OM.enumerate_morphisms(t, u):
                        gf = OM.compose(g, f)
                        if OM.is_inert(f) and OM.is_inert(g):
                            assert OM.is_inert(gf)
                        if OM.is_active(f) and OM.is_active(g):
                            assert OM.is_active(gf)


def test_graft_counts_and_unit():
    c2 = TR.make_corolla(2)
    g = OM.graft(c2, 0, c2)
    assert g.tree.n_edges == 3 and g.tree.n_vertices == 1
    assert TR.is_isomorphic(g.tree, c2) is not None
    for s in TR.enumerate_trees(2, 3):
        for v in s.vertices():
            unit = OM.graft(s, v, TR.make_corolla(s.arity(v)))
            assert TR.is_isomorphic(unit.tree, s) is not None
            assert OM.is_inert(unit.from_guest)
            assert OM.is_active(unit.from_host)


def test_graft_edge_collapses_unary_vertex():
    lin = TR.linear_tree(2)
    g = OM.graft(lin, 0, TR.make_edge())
    assert TR.is_isomorphic(g.tree, TR.linear_tree(1)) is not None
    assert OM.is_inert(g.from_guest)


def test_graft_counting_identity():
    for s in TR.enumerate_trees(2, 2):
        for v in s.vertices():
            for t in TR.enumerate_trees(2, 2):
                if len(TR.leaves(t)) != s.arity(v):
                    continue
                r = OM.graft(s, v, t).tree
                assert r.n_edges == s.n_edges + t.n_edges - s.arity(v) - 1
                assert r.n_vertices == s.n_vertices + t.n_vertices - 1
                assert len(TR.leaves(r)) == len(TR.leaves(s))


def test_graft_arity_mismatch():
    with pytest.raises(ArityMismatch):
        OM.graft(TR.make_corolla(2), 0, TR.make_corolla(1))


def _active_from_corolla(host, v, guest, boundary):
    cor = TR.make_corolla(host.arity(v))
    f0 = (guest.root,) + tuple(boundary)
    return OM.validate_morphism(cor, guest, f0, (OM.full_subtree(guest),))


def test_graft_pushout_universal_property():
    host = TR.make_corolla(2)
    guest = OM.leaf_graft(TR.make_corolla(2), 1, TR.make_corolla(1))
    assert len(TR.leaves(guest)) == 2
    v = 0
    boundary = tuple(sorted(TR.leaves(guest)))
    g = OM.graft(host, v, guest, boundary)
    cor_incl = OM.embedding_of(host, OM.corolla_subtree(host, v))
    active = _active_from_corolla(host, v, guest, boundary)
    # square commutes
    assert OM.compose(g.from_host, cor_incl) == \
        OM.compose(g.from_guest, active)
    # for every cocone into a small object there is exactly one mediator
    for x in TR.enumerate_trees(3, 3):
        for p in OM.enumerate_morphisms(host, x):
            for q in OM.enumerate_morphisms(guest, x):
                if OM.compose(p, cor_incl) != OM.compose(q, active):
                    continue
                mediators = [
                    m for m in OM.enumerate_morphisms(g.tree, x)
                    if OM.compose(m, g.from_host) == p
                    and OM.compose(m, g.from_guest) == q]
                assert len(mediators) == 1


def test_cor_object_sizes():
    assert OM.cor_omega(TR.make_edge()) == 0
    assert OM.cor_omega(TR.make_corolla(4)) == 1


def test_cor_functorial():
    from dendron import pointed
    for s in SMALL:
        for t in SMALL:
            for u in SMALL:
                for f in OM.enumerate_morphisms(s, t):
                    for g in OM.enumerate_morphisms(t, u):
                        lhs = OM.cor_omega_morphism(OM.compose(g, f))
                        rhs = pointed.compose(OM.cor_omega_morphism(f),
                                              OM.cor_omega_morphism(g))
                        assert lhs == rhs


def test_cor_preserves_classes():
    for s in SMALL:
        for t in SMALL:
            for f in OM.enumerate_morphisms(s, t):
                a, i = OM.factorize(f)
                assert OM.cor_omega_morphism(i).is_inert()
                assert OM.cor_omega_morphism(a).is_active()


def test_morphism_json_round_trip():
    c2 = TR.make_corolla(2)
    for f in OM.enumerate_morphisms(c2, c2):
        assert OM.morphism_from_json(OM.morphism_to_json(f)) == f
    lin = TR.linear_tree(2)
    for f in OM.enumerate_morphisms(lin, TR.make_edge()):
        assert OM.morphism_from_json(OM.morphism_to_json(f)) == f


def test_colored_morphisms_respect_colors():
    a = TR.ColoredTree(TR.make_edge(), ("x",))
    b = TR.ColoredTree(TR.make_corolla(2), ("x", "x", "y"))
    ms = OM.enumerate_colored_morphisms(a, b)
    assert {m.f0[0] for m in ms} == {0, 1}
