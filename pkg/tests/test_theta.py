import itertools

import pytest

from dendron import omega as OM
from dendron import theta as TH
from dendron import trees as TR
from dendron.errors import ProfileMismatch

STAR = ("*",)


def _colored(tree):
    return TR.ColoredTree(tree, ("*",) * tree.n_edges)


def test_theta_object_shapes():
    assert TH.theta_object(_colored(TR.make_edge())) == ()
    objs = TH.theta_object(_colored(TR.make_corolla(3)))
    assert len(objs) == 1 and len(objs[0].inputs) == 3


def test_identity_multimorphism_is_unit():
    obj = TH.OpSObject(("*", "*"), "*")
    idm = TH.identity_multimorphism(obj)
    for mu in TH.enumerate_multimorphisms_to(STAR, obj, 2, 2):
        assert TH.compose_multi(idm, 0, mu) == mu
        for s in range(len(mu.inputs)):
            assert TH.compose_multi(
                mu, s, TH.identity_multimorphism(mu.inputs[s])) == mu


def test_compose_multi_profile_mismatch():
    b2 = TH.identity_multimorphism(TH.OpSObject(("*", "*"), "*"))
    b1 = TH.identity_multimorphism(TH.OpSObject(("*",), "*"))
    with pytest.raises(ProfileMismatch):
        TH.compose_multi(b2, 0, b1)


def test_compose_multi_witness_counts():
    # substituting a genuine two-vertex witness grows the tree
    obj2 = TH.OpSObject(("*", "*"), "*")
    two_vertex = [mu for mu in TH.enumerate_multimorphisms_to(STAR, obj2, 2, 2)
                  if mu.witness.tree.n_vertices == 2]
    assert two_vertex
    mu = two_vertex[0]
    idm = TH.identity_multimorphism(obj2)
    grown = TH.compose_multi(idm, 0, mu)
    assert grown.witness.tree.n_vertices == 2
    assert grown == mu  # unit on the other side


def test_op_s_associativity_small():
    obj2 = TH.OpSObject(("*", "*"), "*")
    mus = TH.enumerate_multimorphisms_to(STAR, obj2, 2, 2)[:6]
    for phi in mus:
        for s in range(len(phi.inputs)):
            for psi in TH.enumerate_multimorphisms_to(
                    STAR, phi.inputs[s], 1, 2):
                comp = TH.compose_multi(phi, s, psi)
                for j in range(len(psi.inputs)):
                    for chi in [m for m in TH.enumerate_multimorphisms_to(
                            STAR, psi.inputs[j], 1, 2)][:4]:
                        lhs = TH.compose_multi(comp, s + j, chi)
                        rhs = TH.compose_multi(
                            phi, s, TH.compose_multi(psi, j, chi))
                        assert lhs == rhs


def test_theta_functorial_exhaustive_small():
    pool = [_colored(t) for t in TR.enumerate_trees(2, 2)]
    for a in pool:
        for b in pool:
            for f in OM.enumerate_colored_morphisms(a, b):
                tf = TH.theta_of_colored(f, a, b)
                for c in pool:
                    for g in OM.enumerate_colored_morphisms(b, c):
                        tg = TH.theta_of_colored(g, b, c)
                        composite = OM.compose(g, f)
                        assert TH.theta_of_colored(composite, a, c) == \
                            TH.compose_operator(tf, tg)


def test_theta_sends_isos_to_isos():
    pool = [_colored(t) for t in TR.enumerate_trees(2, 2)]
    for a in pool:
        for f in OM.enumerate_colored_morphisms(a, a):
            if OM.is_isomorphism(f):
                th = TH.theta_of_colored(f, a, a)
                assert TH.is_inert_operator(th) and \
                    TH.is_active_operator(th)


def test_theta_image_classes():
    pool = [_colored(t) for t in TR.enumerate_trees(2, 2)]
    for a in pool:
        for b in pool:
            for f in OM.enumerate_colored_morphisms(a, b):
                th = TH.theta_of_colored(f, a, b)
                if OM.is_inert(f):
                    assert TH.is_inert_operator(th)
                if OM.is_active(f):
                    assert TH.is_active_operator(th)


def test_color_mismatch_filters_active_data():
    # two colors with no mixed generators: no witness matches a mixed output
    obj = TH.OpSObject((0, 1), 0)
    mus = TH.enumerate_multimorphisms_to((0,), obj, 2, 2)
    assert mus == []


def test_approximation_smoke():
    rep = TH.check_approximation(STAR, max_tree_vertices=1, max_arity=1,
                                 max_sub_vertices=1,
                                 max_competitor_vertices=1)
    assert rep.ok and rep.objects_checked == 3
