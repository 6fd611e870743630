import random

import pytest

from dendron import forests as FO
from dendron import nerves as NV
from dendron import operads as OP
from dendron import trees as TR
from dendron.errors import NotSegal


def test_nerve_of_comm_is_singleton(omega_site_22, comm4):
    F = NV.nerve(comm4, omega_site_22)
    assert all(len(v) == 1 for v in F.values)


def test_nerve_values_match_spec_counts(omega_site_22, ass4):
    F = NV.nerve(ass4, omega_site_22)
    site = omega_site_22
    by_desc = {TR.canonical_descriptor(o): i
               for i, o in enumerate(site.objects)}
    c2 = by_desc[TR.canonical_descriptor(TR.make_corolla(2))]
    assert len(F.values[c2]) == 2
    from dendron.omega import leaf_graft
    two = TR.enumerate_trees(2, 2)
    t2 = leaf_graft(TR.make_corolla(2), 1, TR.make_corolla(2))
    idx = by_desc[TR.canonical_descriptor(t2)]
    assert len(F.values[idx]) == 4


def test_presheaf_validation_and_mutation(omega_site_22, ass4):
    F = NV.nerve(ass4, omega_site_22)
    assert NV.validate_presheaf(F)
    # corrupt one non-identity action entry
    site = omega_site_22
    target = None
    for m in site.morphisms:
        if m.ident in site.identity_ids:
            continue
        table = F.action[m.ident]
        if len(set(table.values())) >= 2:
            target = m.ident
            break
    assert target is not None
    corrupted = dict(F.action)
    table = dict(corrupted[target])
    vals = list(table)
    a, b = vals[0], None
    for v in vals[1:]:
        if table[v] != table[a]:
            b = v
            break
    table[a], table[b] = table[b], table[a]
    corrupted[target] = table
    bad = NV.FinitePresheaf(F.site, F.values, corrupted)
    assert not NV.validate_presheaf(bad)


def test_nerve_segal_everywhere(omega_site_22, forest_site_3, ass4, comm4):
    for site in (omega_site_22, forest_site_3):
        for operad in (ass4, comm4):
            rep = NV.check_segal(NV.nerve(operad, site))
            assert rep.ok


def test_duplicated_element_fails_exactly_there(omega_site_22, ass4):
    F = NV.nerve(ass4, omega_site_22)
    site = omega_site_22
    # duplicate one value at a two-vertex object
    idx = max(range(site.n_objects()),
              key=lambda i: site.objects[i].n_vertices)
    assert site.objects[idx].n_vertices == 2
    dup = ("dup",) + F.values[idx][0][0:0]  # fresh token
    values = list(F.values)
    values[idx] = values[idx] + (dup,)
    action = {m: dict(t) for m, t in F.action.items()}
    orig = F.values[idx][0]
    for m in site.morphisms:
        if m.tgt == idx:
            action[m.ident][dup] = action[m.ident][orig] \
                if m.ident not in site.identity_ids else dup
    bad = NV.FinitePresheaf(site, tuple(values), action)
    rep = NV.check_segal(bad)
    failures = {v.obj for v in rep.failures()}
    assert failures == {idx}
    assert not rep.verdicts[idx].injective


def test_segal_variants_agree_on_nerve_and_randoms(forest_site_3, ass4):
    F = NV.nerve(ass4, forest_site_3)
    res = NV.check_segal_variants(F)
    assert res["agree"] and res["elementary"]
    rng = random.Random(5)
    for _ in range(10):
        G = NV.random_presheaf(forest_site_3, rng)
        assert NV.check_segal_variants(G)["agree"]


def _constant_presheaf(site, elements=(0, 1)):
    values = tuple(tuple(elements) for _ in range(site.n_objects()))
    action = {m.ident: {x: x for x in elements} for m in site.morphisms}
    return NV.FinitePresheaf(site, values, action)


def test_root_splitting_violation_fails_all_formulations(forest_site_3):
    # the constant two-element presheaf glues along connected covers but
    # cannot split over multiple roots
    G = _constant_presheaf(forest_site_3)
    assert NV.validate_presheaf(G)
    site = forest_site_3
    for i, obj in enumerate(site.objects):
        verdict = NV.check_segal_at(G, i).bijective
        connected_nonempty = obj.levels[-1] == 1
        assert verdict == connected_nonempty
    res = NV.check_segal_variants(G)
    assert not res["elementary"] and not res["spine"] \
        and not res["root_fibers"]
    assert res["agree"]


@pytest.fixture(scope="module")
def colored_site():
    base = NV.build_forest_site(2, 2, max_edges=3, mode="cover")
    return NV.build_colored_forest_site(base, (0, 1))


def test_monoid_condition_for_colored_nerve(colored_site):
    rng = random.Random(9)
    operad = OP.random_free_operad(rng, n_colors=2, n_generators=2,
                                   max_gen_arity=2, max_vertices=2)
    F = NV.nerve(operad, colored_site)
    assert NV.check_monoid(F).ok
    res = NV.monoid_matches_segal(F)
    assert res["ok"]


def test_monoid_single_color_degenerates_to_splitting():
    base = NV.build_forest_site(2, 2, max_edges=3, mode="cover")
    site1 = NV.build_colored_forest_site(base, ("*",))
    ass = OP.ass_operad(3)
    F = NV.nerve(ass, site1)
    mon = NV.check_monoid(F)
    assert mon.ok
    for i, (b, colors) in enumerate(site1.objects):
        entries = [e for e in site1.covers[i] if e.kind == "vertex"]
        expected = 1
        for e in entries:
            expected *= len(F.values[e.obj])
        assert len(F.values[i]) == expected


def test_monoid_two_colors_no_mixed_ops(colored_site):
    # generators stay within each color: mixed objects get empty value sets
    gens = {"m0": ((0, 0), 0), "m1": ((1, 1), 1)}
    operad = OP.free_operad(gens, (0, 1), 2)
    F = NV.nerve(operad, colored_site)
    assert NV.check_monoid(F).ok
    assert any(len(v) == 0 for v in F.values)
    assert NV.monoid_matches_segal(F)["ok"]


def test_monoid_segal_equivalence_with_corruption(colored_site):
    ass = OP.ass_operad(3, color=0)
    F = NV.nerve(ass, colored_site)
    site = colored_site
    idx = max((i for i in range(site.n_objects()) if F.values[i]),
              key=lambda i: site.base.objects[site.objects[i][0]].n_vertices)
    assert site.base.objects[site.objects[idx][0]].n_vertices >= 1
    values = list(F.values)
    dup = ("dup",)
    orig = values[idx][0]
    values[idx] = values[idx] + (dup,)
    action = {m: dict(t) for m, t in F.action.items()}
    for m in site.morphisms:
        if m.tgt == idx:
            action[m.ident][dup] = dup if m.ident in site.identity_ids \
                else action[m.ident][orig]
    bad = NV.FinitePresheaf(site, tuple(values), action)
    res = NV.monoid_matches_segal(bad)
    assert res["ok"]  # verdicts still agree object-wise
    assert not res["monoid"].verdicts[idx]


@pytest.fixture(scope="module")
def comparison_sites():
    osite = NV.build_omega_site(3, 2, mode="full")
    f1site = NV.build_forest_site(3, 2, max_edges=4, mode="full",
                                  tree_objects_only=True,
                                  max_tree_vertices=3)
    return osite, f1site


def test_tau_pullback_of_comm_constant(comparison_sites, comm4):
    osite, f1site = comparison_sites
    pulled = NV.tau_pullback(NV.nerve(comm4, osite), f1site)
    assert all(len(v) == 1 for v in pulled.values)
    assert NV.validate_presheaf(pulled)


def test_compare_models_ass_and_comm(comparison_sites, ass4, comm4):
    osite, f1site = comparison_sites
    assert NV.compare_models(ass4, osite, f1site)["ok"]
    assert NV.compare_models(comm4, osite, f1site)["ok"]


def test_elementary_bijection(comparison_sites):
    osite, f1site = comparison_sites
    assert NV._elementary_bijection_ok(osite, f1site)


def test_underlying_category_of_poset_nerve(omega_site_32):
    arrow = OP.unary_operad(("a", "b"), {"f": ("a", "b")}, {}, name="arrow")
    F = NV.nerve(arrow, omega_site_32)
    cat = NV.underlying_category(F)
    assert len(cat.objects) == 2 and len(cat.morphisms) == 3
    assert NV.check_complete(F)


def test_contractible_groupoid_not_complete(omega_site_32):
    e1 = OP.unary_operad(("a", "b"), {"f": ("a", "b"), "g": ("b", "a")},
                         {("f", "g"): "1b", ("g", "f"): "1a"}, name="E1")
    F = NV.nerve(e1, omega_site_32)
    assert NV.check_segal(F).ok
    assert len(NV.iota0(F)) == 2
    assert len(NV.iota1(F)) == 4
    assert not NV.check_complete(F)


def test_identity_only_operad_iota1_matches_iota0(omega_site_32):
    point = OP.unary_operad(("a", "b"), {}, {}, name="discrete")
    F = NV.nerve(point, omega_site_32)
    assert len(NV.iota1(F)) == len(NV.iota0(F))
    assert NV.check_complete(F)


def test_underlying_category_via_forest_site(ass4):
    f1site = NV.build_forest_site(3, 2, max_edges=4, mode="full",
                                  tree_objects_only=True,
                                  max_tree_vertices=3)
    F = NV.nerve(ass4, f1site)
    cat = NV.underlying_category(F)
    assert len(cat.objects) == 1 and len(cat.morphisms) == 1
    assert NV.check_complete(F)


def test_underlying_category_composition_is_associative(omega_site_32):
    e1 = OP.unary_operad(("a", "b"), {"f": ("a", "b"), "g": ("b", "a")},
                         {("f", "g"): "1b", ("g", "f"): "1a"}, name="E1")
    F = NV.nerve(e1, omega_site_32)
    cat = NV.underlying_category(F)
    for f in cat.morphisms:
        for g in cat.morphisms:
            if cat.source[g] != cat.target[f]:
                continue
            gf = cat.composition[(g, f)]
            for h in cat.morphisms:
                if cat.source[h] != cat.target[g]:
                    continue
                assert cat.composition[(h, gf)] == \
                    cat.composition[(cat.composition[(h, g)], f)]


def test_presheaf_serialization_round_trip(omega_site_22, ass4):
    F = NV.nerve(ass4, omega_site_22)
    d = NV.presheaf_to_dict(F)
    back = NV.presheaf_from_dict(d)
    assert NV.presheaf_to_dict(back) == d
    assert back.values == F.values
