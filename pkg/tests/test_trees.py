import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dendron import omega
from dendron import trees as TR
from dendron.errors import (
    NonInjectiveS,
    NonInjectiveT,
    RootCountNotOne,
    SuccessorDiverges,
)


def test_validate_edge():
    t = TR.validate_tree(1, 0, [])
    assert t.n_edges == 1 and t.n_vertices == 0


def test_validate_rejects_two_roots():
    with pytest.raises(RootCountNotOne):
        TR.validate_tree(2, 0, [])


def test_validate_rejects_sigma_cycle():
    # two unary vertices feeding each other: 0 -> v0 -> 1 -> v1 -> 0
    with pytest.raises((SuccessorDiverges, RootCountNotOne)):
        TR.validate_tree(2, 0, [(0, (1,)), (1, (0,))])


def test_validate_rejects_cycle_with_root():
    # root 0 plus a 2-cycle between edges 1 and 2
    with pytest.raises(SuccessorDiverges):
        TR.validate_tree(3, 0, [(1, (2,)), (2, (1,))])


def test_validate_rejects_noninjective_s():
    with pytest.raises(NonInjectiveS):
        TR.validate_tree(3, 0, [(0, (1, 1)), (1, (2,))])


def test_validate_rejects_noninjective_t():
    with pytest.raises(NonInjectiveT):
        TR.validate_tree(3, 0, [(0, (1, 2)), (0, ())])


def test_corolla_counts():
    c0 = TR.make_corolla(0)
    assert (c0.n_edges, c0.n_vertices, len(TR.leaves(c0))) == (1, 1, 0)
    c2 = TR.make_corolla(2)
    assert (c2.n_edges, c2.n_vertices, len(TR.leaves(c2))) == (3, 1, 2)
    eta = TR.make_edge()
    assert (eta.n_edges, eta.n_vertices) == (1, 0)


def test_linear_tree():
    t = TR.linear_tree(3)
    assert (t.n_edges, t.n_vertices) == (4, 3)
    assert TR.leaves(t) == (3,)
    assert TR.linear_tree(0) == TR.make_edge()
    assert TR.is_isomorphic(TR.linear_tree(1), TR.make_corolla(1))


def test_leaves_inner_partition():
    eta = TR.make_edge()
    assert TR.leaves(eta) == (eta.root,)
    assert TR.inner_edges(eta) == ()
    c3 = TR.make_corolla(3)
    assert len(TR.leaves(c3)) == 3 and TR.inner_edges(c3) == ()
    # graft a corolla onto a leaf: 3 leaves, 1 inner edge
    two = omega.leaf_graft(TR.make_corolla(2), 1, TR.make_corolla(2))
    assert len(TR.leaves(two)) == 3
    assert len(TR.inner_edges(two)) == 1
    # the same tree arises from substituting it into a ternary corolla
    again = omega.graft(TR.make_corolla(3), 0, two).tree
    assert TR.is_isomorphic(two, again) is not None


@pytest.mark.parametrize("tree", TR.enumerate_trees(3, 3))
def test_counting_identities(tree):
    # every edge is the root or an incoming edge of exactly one vertex
    assert tree.n_edges == 1 + sum(tree.arity(v) for v in tree.vertices())
    # every edge is a leaf or an outgoing edge
    assert tree.n_edges == tree.n_vertices + len(TR.leaves(tree))
    if tree.n_vertices:
        lv, inner = set(TR.leaves(tree)), set(TR.inner_edges(tree))
        assert lv | inner | {tree.root} == set(tree.edges())
        assert not (lv & inner) and tree.root not in lv | inner


def test_isomorphism_witness_on_permuted_corolla():
    c2 = TR.make_corolla(2)
    permuted = TR.Tree(3, 1, (1,), ((2, 0),))
    res = TR.is_isomorphic(c2, permuted)
    assert res is not None
    emap, vmap = res
    assert emap[c2.root] == permuted.root
    assert vmap == {0: 0}


def test_isomorphism_distinguishes_arity():
    assert TR.is_isomorphic(TR.make_corolla(2), TR.make_corolla(3)) is None


def test_grafts_into_either_leaf_isomorphic():
    c2 = TR.make_corolla(2)
    a = omega.leaf_graft(c2, 1, c2)
    b = omega.leaf_graft(c2, 2, c2)
    assert TR.is_isomorphic(a, b) is not None


def _oracle_trees(max_vertices, max_edges):
    """Naive: generate all raw incidence tables, validate, dedup by search."""
    reps = []
    for n_edges in range(1, max_edges + 1):
        for n_vertices in range(0, max_vertices + 1):
            for outs in itertools.permutations(range(n_edges), n_vertices):
                rest = [e for e in range(n_edges)]
                for assignment in itertools.product(
                        range(n_vertices + 1), repeat=n_edges):
                    ins = [[] for _ in range(n_vertices)]
                    ok = True
                    for e, slot in enumerate(assignment):
                        if slot < n_vertices:
                            ins[slot].append(e)
                    try:
                        root_candidates = [
                            e for e, s in enumerate(assignment)
                            if s == n_vertices]
                        if len(root_candidates) != 1:
                            continue
                        t = TR.validate_tree(
                            n_edges, root_candidates[0],
                            list(zip(outs, map(tuple, ins))))
                    except Exception:
                        continue
                    if all(TR.is_isomorphic(t, r) is None for r in reps):
                        reps.append(t)
    return reps


def test_enumerate_against_bruteforce_oracle():
    got = TR.enumerate_trees(2, 2)
    oracle = [t for t in _oracle_trees(2, 5)
              if all(t.arity(v) <= 2 for v in t.vertices())]
    assert len(got) == len(oracle) == 10


def test_enumerate_zero_vertices():
    assert TR.enumerate_trees(0, 5) == [TR.make_edge()]
    assert len(TR.enumerate_trees(1, 2)) == 4


def test_enumerate_colored_counts():
    # eta with two colors: 2 classes; corollas up to arity 1: C_0 (2), C_1 (4)
    got = TR.enumerate_trees(1, 1, colors=("x", "y"))
    assert len(got) == 2 + 2 + 4


def test_descriptor_soundness_exhaustive():
    pool = TR.enumerate_trees(3, 2)
    for a in pool:
        for b in pool:
            same = TR.canonical_descriptor(a) == TR.canonical_descriptor(b)
            assert same == (TR.is_isomorphic(a, b) is not None)
            assert same == (a == b)  # representatives are canonical


@st.composite
def shapes(draw, depth=0):
    if depth >= 3 or draw(st.booleans()):
        return None
    k = draw(st.integers(min_value=0, max_value=3))
    return tuple(draw(shapes(depth=depth + 1)) for _ in range(k))


def _materialize(shape, order):
    outs, ins, counter = [], [], [0]

    def build(sh):
        e = counter[0]
        counter[0] += 1
        if sh is not None:
            v = len(outs)
            outs.append(e)
            ins.append(None)
            children = list(sh)
            if order:
                children = children[::-1]
            ins[v] = tuple(build(c) for c in children)
        return e

    build(shape)
    return TR.validate_tree(counter[0], 0, list(zip(outs, ins)))


@given(shapes())
@settings(max_examples=60, deadline=None)
def test_descriptor_invariant_under_child_order(shape):
    a = _materialize(shape, order=False)
    b = _materialize(shape, order=True)
    assert TR.canonical_descriptor(a) == TR.canonical_descriptor(b)
    assert TR.is_isomorphic(a, b) is not None


@pytest.mark.parametrize("tree", TR.enumerate_trees(2, 3))
def test_json_round_trip(tree):
    assert TR.from_json(TR.to_json(tree)) == tree


def test_colored_json_round_trip():
    for t in TR.enumerate_trees(2, 2, colors=(0, 1)):
        assert TR.from_json(TR.to_json(t)) == t


def test_dot_output_mentions_every_edge():
    t = TR.make_corolla(2)
    dot = TR.to_dot(t)
    assert "digraph" in dot and dot.count("->") == t.n_edges
