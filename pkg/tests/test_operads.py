import copy
import random

import pytest

from dendron import omega as OM
from dendron import operads as OP
from dendron import trees as TR
from dendron.errors import (
    AssociativityFails,
    EquivarianceFails,
    NotAMap,
    ProfileMismatch,
    UnitFails,
)


def test_comm_and_ass_validate():
    comm = OP.comm_operad(3)
    assert len(comm.ops()) == 4
    ass = OP.ass_operad(3)
    assert len(ass.ops_at(("*", "*"), "*")) == 2
    assert len(ass.ops_at(("*",) * 3, "*")) == 6


def test_corrupted_composition_rejected_with_witness():
    ass = OP.ass_operad(3)
    bad = OP.ColoredOperad(
        ass.colors, dict(ass.profiles), dict(ass.ops_by_profile),
        dict(ass.identities), dict(ass.action), dict(ass.comp),
        ass.max_arity, ass.truncated)
    # replace one ternary composite by a different word of the same profile
    key = ("w0.1", 0, "w0.1")
    assert bad.comp[key] == "w0.1.2"
    bad.comp = dict(bad.comp)
    bad.comp[key] = "w0.2.1"
    with pytest.raises((AssociativityFails, UnitFails, EquivarianceFails)) \
            as err:
        OP.validate_operad(bad, level="full")
    assert err.value.witness


def test_corrupted_action_rejected():
    ass = OP.ass_operad(2)
    bad = OP.ColoredOperad(
        ass.colors, dict(ass.profiles), dict(ass.ops_by_profile),
        dict(ass.identities), dict(ass.action), dict(ass.comp),
        ass.max_arity, ass.truncated)
    bad.action = dict(bad.action)
    bad.action[("w0.1", (1, 0))] = "w0.1"
    with pytest.raises(EquivarianceFails):
        OP.validate_operad(bad, level="full")


def test_ops_compose_on_corolla_is_the_label():
    ass = OP.ass_operad(3)
    c3 = TR.make_corolla(3)
    for op in ass.ops_at(("*",) * 3, "*"):
        assert OP.ops_compose(ass, c3, ("*",) * 4, (op,)) == op


def test_ops_compose_identities_chain():
    ass = OP.ass_operad(3)
    lin = TR.linear_tree(3)
    ops = tuple(ass.identity_at("*") for _ in range(3))
    assert OP.ops_compose(ass, lin, ("*",) * 4, ops) == ass.identity_at("*")


def test_ops_compose_profile_mismatch():
    ass = OP.ass_operad(3)
    c2 = TR.make_corolla(2)
    with pytest.raises(ProfileMismatch):
        OP.ops_compose(ass, c2, ("*",) * 3, ("w0",))


def test_ops_compose_order_independent_random_operads():
    rng = random.Random(11)
    for trial in range(3):
        operad = OP.random_free_operad(rng, n_colors=1, n_generators=2,
                                       max_gen_arity=2, max_vertices=3)
        for tree in TR.enumerate_trees(3, 2):
            for labeling in _some_labelings(operad, tree, rng, cap=4):
                colors, ops = labeling
                try:
                    a = OP.ops_compose(operad, tree, colors, ops)
                    b = OP.ops_compose(operad, tree, colors, ops,
                                       _ascending=True)
                except OP.BoundExceeded:
                    continue
                assert a == b


def _some_labelings(operad, tree, rng, cap):
    out = []
    for colors_choice in range(cap):
        colors = tuple(rng.choice(operad.colors)
                       for _ in range(tree.n_edges))
        pools = []
        dead = False
        for v in tree.vertices():
            ops = operad.ops_at(
                tuple(colors[e] for e in tree.in_edges[v]),
                colors[tree.out_edges[v]])
            if not ops:
                dead = True
                break
            pools.append(ops)
        if dead:
            continue
        out.append((colors, tuple(rng.choice(p) for p in pools)))
    return out


def test_free_operad_one_binary_generator():
    fo = OP.free_operad({"m": (("*", "*"), "*")}, ("*",), 2)
    ops = fo.ops()
    by_arity = {}
    for op in ops:
        by_arity.setdefault(fo.arity(op), []).append(op)
    assert len(by_arity[1]) == 1          # the identity
    assert len(by_arity[2]) == 1          # the generator
    assert len(by_arity[3]) == 3          # bracketings up to symmetry
    assert fo.truncated


def test_free_operad_no_generators():
    fo = OP.free_operad({}, ("x", "y"), 2)
    assert sorted(fo.ops()) == sorted(fo.identities.values())


def test_free_differs_from_comm():
    fo = OP.free_operad({f"e{n}": (("*",) * n, "*") for n in (0, 1, 2)},
                        ("*",), 2)
    comm = OP.comm_operad(2)
    assert len(fo.ops_at(("*", "*"), "*")) > \
        len(comm.ops_at(("*", "*"), "*"))


def _e1():
    return OP.unary_operad(
        ("a", "b"), {"f": ("a", "b"), "g": ("b", "a")},
        {("f", "g"): "1b", ("g", "f"): "1a"}, name="E1")


def _walking_arrow():
    return OP.unary_operad(("a", "b"), {"f": ("a", "b")}, {}, name="arrow")


def test_identity_map_is_dk():
    ass = OP.ass_operad(2)
    assert OP.is_dk(OP.identity_operad_map(ass))


def test_full_suboperad_inclusion_is_dk():
    e1 = _e1()
    point = OP.unary_operad(("a",), {}, {}, name="pt")
    maps = OP.enumerate_operad_maps(point, e1)
    incl = [m for m in maps if m.color_map == ("a",)]
    assert incl and all(OP.is_dk(m) for m in incl)
    assert OP.is_essentially_surjective(incl[0])


def test_color_collapse_not_fully_faithful():
    arrow = _walking_arrow()
    point = OP.unary_operad(("a",), {}, {}, name="pt")
    collapses = OP.enumerate_operad_maps(arrow, point)
    assert collapses
    for m in collapses:
        assert not OP.is_fully_faithful(m)


def test_gauntness():
    assert OP.is_gaunt(_walking_arrow())
    assert OP.is_gaunt(OP.ass_operad(2))
    assert not OP.is_gaunt(_e1())


def test_dk_between_gaunt_has_inverse():
    arrow = _walking_arrow()
    for m in OP.enumerate_operad_maps(arrow, arrow):
        if OP.is_dk(m):
            inv = OP.find_inverse(m)
            assert inv is not None


def test_two_of_three_on_pool():
    pool = [OP.unary_operad(("a",), {}, {}, name="pt"), _walking_arrow(),
            _e1(), OP.comm_operad(2)]
    maps = []
    for a in pool:
        for b in pool:
            maps.extend(OP.enumerate_operad_maps(a, b))
    assert len(maps) >= 10
    for f in maps:
        for g in maps:
            if g.source is not f.target:
                continue
            gf = OP.compose_operad_maps(g, f)
            flags = (OP.is_dk(f), OP.is_dk(g), OP.is_dk(gf))
            assert sum(flags) != 2


def test_validate_operad_map_rejects_profile_break():
    arrow = _walking_arrow()
    with pytest.raises(NotAMap):
        OP.validate_operad_map(arrow, arrow,
                               {"a": "a", "b": "a"},
                               {"1a": "1a", "1b": "1b", "f": "f"})


def test_operad_json_round_trip():
    for operad in (OP.comm_operad(3), OP.ass_operad(2), _e1(),
                   OP.free_operad({"m": (("*", "*"), "*")}, ("*",), 2)):
        back = OP.operad_from_json(OP.operad_to_json(operad))
        assert back == operad


def test_unary_operad_iso_pairs():
    e1 = _e1()
    pairs = set(OP.iso_pairs(e1))
    assert ("f", "g") in pairs and ("g", "f") in pairs
    assert ("1a", "1a") in pairs
