"""The operad of colored operads, built from labelled trees.

Objects are colored corollas; a multimorphism is an isomorphism class of a
witness tree covered by the input corollas (one per vertex) together with a
matching of the output corolla onto its leaves and root.  Composition grafts
witnesses.  The per-vertex-corolla functor from colored trees into this
structure is implemented together with a checker for its two approximation
conditions (inert locally-coCartesian lifts, Cartesian lifts of actives).

Multimorphisms are stored canonically: the slot decorations make witnesses
rigid, so a tag-guided DFS renumbering is a complete normal form and
dataclass equality decides isomorphism of the data.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from . import work
from .errors import ProfileMismatch, SourceTargetMismatch
from .omega import (
    OmegaMorphism,
    Subtree,
    compose as compose_omega,
    cor_omega_morphism,
    enumerate_colored_morphisms,
    extract,
    graft,
    identity as identity_omega,
    subtree_leaves,
    validate_morphism,
)
from .pointed import PointedMap, compose as compose_pointed
from .pointed import identity as identity_pointed
from .trees import ColoredTree, Tree, enumerate_trees, leaves, make_corolla


@dataclass(frozen=True)
class OpSObject:
    """A colored corolla: ordered input colors and an output color."""

    inputs: tuple
    output: object


def corolla_object(ct: ColoredTree, v: int) -> OpSObject:
    t = ct.tree
    return OpSObject(tuple(ct.colors[e] for e in t.in_edges[v]),
                     ct.colors[t.out_edges[v]])


def theta_object(ct: ColoredTree) -> tuple:
    """The per-vertex corolla sequence of a colored tree."""
    return tuple(corolla_object(ct, v) for v in ct.tree.vertices())


@dataclass(frozen=True)
class OpSMultimorphism:
    inputs: tuple          # OpSObjects
    output: OpSObject
    witness: ColoredTree   # canonical numbering
    cover_vertices: tuple  # per input, a witness vertex (all distinct, onto)
    cover_slots: tuple     # per input, per slot, a witness edge
    active_leaves: tuple   # per output slot, a witness leaf edge


def _check_multi(inputs, output, witness, cover_vertices, cover_slots,
                 active_leaves):
    t = witness.tree
    if sorted(cover_vertices) != list(t.vertices()):
        raise ProfileMismatch("cover must hit every vertex exactly once")
    for i, v in enumerate(cover_vertices):
        obj = inputs[i]
        if sorted(cover_slots[i]) != sorted(t.in_edges[v]):
            raise ProfileMismatch("slots must enumerate the incoming edges",
                                  input=i)
        for j, e in enumerate(cover_slots[i]):
            if witness.colors[e] != obj.inputs[j]:
                raise ProfileMismatch("slot color mismatch", input=i, slot=j)
        if witness.colors[t.out_edges[v]] != obj.output:
            raise ProfileMismatch("output color mismatch", input=i)
    lvs = leaves(t)
    if sorted(active_leaves) != sorted(lvs):
        raise ProfileMismatch("output slots must enumerate the leaves")
    for j, e in enumerate(active_leaves):
        if witness.colors[e] != output.inputs[j]:
            raise ProfileMismatch("leaf color mismatch", slot=j)
    if witness.colors[t.root] != output.output:
        raise ProfileMismatch("root color mismatch")


def build_multimorphism(inputs, output, witness, cover_vertices, cover_slots,
                        active_leaves) -> OpSMultimorphism:
    """Validate and canonically renumber the witness by its slot tags."""
    inputs = tuple(inputs)
    cover_vertices = tuple(cover_vertices)
    cover_slots = tuple(tuple(s) for s in cover_slots)
    active_leaves = tuple(active_leaves)
    _check_multi(inputs, output, witness, cover_vertices, cover_slots,
                 active_leaves)
    t = witness.tree
    tag = {}
    for i in range(len(inputs)):
        for j, e in enumerate(cover_slots[i]):
            tag[e] = (i, j)
    e_new, v_new = {}, {}

    def visit(e):
        e_new[e] = len(e_new)
        v = t.vertex_above(e)
        if v is None:
            return
        v_new[v] = len(v_new)
        for child in sorted(t.in_edges[v], key=lambda x: tag[x]):
            visit(child)

    visit(t.root)
    vs = sorted(v_new, key=lambda v: v_new[v])
    tree = Tree(t.n_edges, e_new[t.root],
                tuple(e_new[t.out_edges[v]] for v in vs),
                tuple(tuple(sorted(e_new[e] for e in t.in_edges[v]))
                      for v in vs))
    colors = [None] * t.n_edges
    for e in t.edges():
        colors[e_new[e]] = witness.colors[e]
    return OpSMultimorphism(
        inputs, output, ColoredTree(tree, tuple(colors)),
        tuple(v_new[v] for v in cover_vertices),
        tuple(tuple(e_new[e] for e in slots) for slots in cover_slots),
        tuple(e_new[e] for e in active_leaves))


def identity_multimorphism(obj: OpSObject) -> OpSMultimorphism:
    n = len(obj.inputs)
    witness = ColoredTree(make_corolla(n), (obj.output,) + tuple(obj.inputs))
    return build_multimorphism(
        (obj,), obj, witness, (0,), (tuple(range(1, n + 1)),),
        tuple(range(1, n + 1)))


def act_multi(mu: OpSMultimorphism, perm) -> OpSMultimorphism:
    """Reorder the inputs: new input i is old input perm[i]."""
    perm = tuple(perm)
    return build_multimorphism(
        tuple(mu.inputs[p] for p in perm), mu.output, mu.witness,
        tuple(mu.cover_vertices[p] for p in perm),
        tuple(mu.cover_slots[p] for p in perm), mu.active_leaves)


def compose_multi(phi: OpSMultimorphism, s: int,
                  psi: OpSMultimorphism) -> OpSMultimorphism:
    """Substitute psi into input slot s of phi, by grafting witnesses."""
    if phi.inputs[s] != psi.output:
        raise ProfileMismatch("input object does not match the output of psi",
                              slot=s)
    host, guest = phi.witness, psi.witness
    v = phi.cover_vertices[s]
    slot_of = {e: j for j, e in enumerate(phi.cover_slots[s])}
    boundary = tuple(psi.active_leaves[slot_of[e]]
                     for e in host.tree.in_edges[v])
    g = graft(host.tree, v, guest.tree, boundary)
    colors = [None] * g.tree.n_edges
    for e in host.tree.edges():
        colors[g.from_host.f0[e]] = host.colors[e]
    for e in guest.tree.edges():
        if colors[g.from_guest.f0[e]] is None:
            colors[g.from_guest.f0[e]] = guest.colors[e]
    result = ColoredTree(g.tree, tuple(colors))

    def host_vertex(w):
        (img,) = g.from_host.f1[w].vertices
        return img

    def guest_vertex(w):
        (img,) = g.from_guest.f1[w].vertices
        return img

    inputs, cov_v, cov_s = [], [], []
    for i in range(len(phi.inputs)):
        if i == s:
            for k in range(len(psi.inputs)):
                inputs.append(psi.inputs[k])
                cov_v.append(guest_vertex(psi.cover_vertices[k]))
                cov_s.append(tuple(g.from_guest.f0[e]
                                   for e in psi.cover_slots[k]))
        else:
            inputs.append(phi.inputs[i])
            cov_v.append(host_vertex(phi.cover_vertices[i]))
            cov_s.append(tuple(g.from_host.f0[e] for e in phi.cover_slots[i]))
    active = tuple(g.from_host.f0[e] for e in phi.active_leaves)
    return build_multimorphism(inputs, phi.output, result, cov_v, cov_s,
                               active)


# ---------------------------------------------------------------------------
# morphisms in the category of operators


@dataclass(frozen=True)
class OperatorMorphism:
    src: tuple         # OpSObjects
    dst: tuple         # OpSObjects
    pointed: PointedMap
    components: tuple  # per dst index, a multimorphism from the ascending fiber


def build_operator_morphism(src, dst, pointed, components) -> OperatorMorphism:
    src, dst = tuple(src), tuple(dst)
    components = tuple(components)
    if pointed.n_source != len(src) or pointed.n_target != len(dst):
        raise SourceTargetMismatch("pointed map does not match object lists")
    for j, mu in enumerate(components):
        want = tuple(src[i] for i in pointed.fiber(j))
        if mu.inputs != want or mu.output != dst[j]:
            raise ProfileMismatch("component does not match its fiber",
                                  index=j)
    return OperatorMorphism(src, dst, pointed, components)


def identity_operator(objs) -> OperatorMorphism:
    objs = tuple(objs)
    return build_operator_morphism(
        objs, objs, identity_pointed(len(objs)),
        tuple(identity_multimorphism(o) for o in objs))


def compose_operator(q: OperatorMorphism, p: OperatorMorphism
                     ) -> OperatorMorphism:
    """q after p."""
    if p.dst != q.src:
        raise SourceTargetMismatch("operator morphisms are not composable")
    pointed = compose_pointed(q.pointed, p.pointed)
    components = []
    for k in range(len(q.dst)):
        mu = q.components[k]
        mid = q.pointed.fiber(k)
        for slot in range(len(mid) - 1, -1, -1):
            mu = compose_multi(mu, slot, p.components[mid[slot]])
        current = [i for j in mid for i in p.pointed.fiber(j)]
        target = sorted(current)
        if current != target:
            perm = tuple(current.index(i) for i in target)
            mu = act_multi(mu, perm)
        components.append(mu)
    return build_operator_morphism(p.src, q.dst, pointed, tuple(components))


def is_inert_operator(m: OperatorMorphism) -> bool:
    return m.pointed.is_inert() and all(
        len(mu.inputs) == 1 and mu.witness.tree.n_vertices == 1
        for mu in m.components)


def is_active_operator(m: OperatorMorphism) -> bool:
    return m.pointed.is_active()


def theta_of(f: OmegaMorphism, src_colors, tgt_colors) -> OperatorMorphism:
    """Image of a colored tree map: from the target's corolla sequence to
    the source's, with the vertex subtrees as multimorphism witnesses."""
    A = ColoredTree(f.source, tuple(src_colors))
    B = ColoredTree(f.target, tuple(tgt_colors))
    pointed = cor_omega_morphism(f)
    components = []
    for x in f.source.vertices():
        st = f.f1[x]
        small, e_emb, v_emb = extract(f.target, st)
        back_e = {amb: i for i, amb in enumerate(e_emb)}
        back_v = {amb: i for i, amb in enumerate(v_emb)}
        wit = ColoredTree(small, tuple(tgt_colors[e] for e in e_emb))
        fiber = sorted(st.vertices)
        inputs = tuple(corolla_object(B, w) for w in fiber)
        cov_v = tuple(back_v[w] for w in fiber)
        cov_s = tuple(tuple(back_e[e] for e in f.target.in_edges[w])
                      for w in fiber)
        active = tuple(back_e[f.f0[e]] for e in f.source.in_edges[x])
        components.append(build_multimorphism(
            inputs, corolla_object(A, x), wit, cov_v, cov_s, active))
    return build_operator_morphism(theta_object(B), theta_object(A), pointed,
                                   tuple(components))


def theta_of_colored(f: OmegaMorphism, src: ColoredTree,
                     tgt: ColoredTree) -> OperatorMorphism:
    return theta_of(f, src.colors, tgt.colors)


# ---------------------------------------------------------------------------
# enumeration of multimorphisms and operator morphisms


_MULTI_CACHE: dict = {}


def enumerate_multimorphisms_to(palette, output: OpSObject,
                                max_witness_vertices: int,
                                max_arity: int) -> list:
    """All canonical multimorphisms with the given output object.

    The inputs are determined by the chosen witness and cover; every
    distinct canonical datum appears once.
    """
    key = (tuple(palette), output, max_witness_vertices, max_arity)
    if key in _MULTI_CACHE:
        return _MULTI_CACHE[key]
    found = {}
    for ct in enumerate_trees(max_witness_vertices, max_arity, palette):
        t = ct.tree
        lvs = leaves(t)
        if len(lvs) != len(output.inputs):
            continue
        if ct.colors[t.root] != output.output:
            continue
        for active in itertools.permutations(lvs):
            if tuple(ct.colors[e] for e in active) != tuple(output.inputs):
                continue
            work.tick()
            n = t.n_vertices
            for cover in itertools.permutations(range(n)):
                slot_choices = [
                    list(itertools.permutations(t.in_edges[v]))
                    for v in cover]
                for slots in itertools.product(*slot_choices):
                    inputs = tuple(
                        OpSObject(tuple(ct.colors[e] for e in slots[i]),
                                  ct.colors[t.out_edges[cover[i]]])
                        for i in range(n))
                    mu = build_multimorphism(inputs, output, ct, cover,
                                             slots, active)
                    found[(mu.inputs, mu.output, mu.witness,
                           mu.cover_vertices, mu.cover_slots,
                           mu.active_leaves)] = mu
    result = sorted(found.values(), key=repr)
    _MULTI_CACHE[key] = result
    return result


def enumerate_multimorphisms(palette, inputs, output: OpSObject,
                             max_witness_vertices: int,
                             max_arity: int) -> list:
    inputs = tuple(inputs)
    return [mu for mu in enumerate_multimorphisms_to(
                palette, output, max_witness_vertices, max_arity)
            if mu.inputs == inputs]


_OPERATOR_CACHE: dict = {}


def enumerate_operator_morphisms(palette, src, dst, max_witness_vertices,
                                 max_arity) -> list:
    """All operator morphisms src -> dst with bounded witnesses."""
    src, dst = tuple(src), tuple(dst)
    key = (tuple(palette), src, dst, max_witness_vertices, max_arity)
    if key in _OPERATOR_CACHE:
        return _OPERATOR_CACHE[key]
    out = []
    n, m = len(src), len(dst)
    for values in itertools.product([None] + list(range(m)), repeat=n):
        pointed = PointedMap(n, m, values)
        per_slot = []
        ok = True
        for j in range(m):
            fiber = pointed.fiber(j)
            want = tuple(src[i] for i in fiber)
            mus = enumerate_multimorphisms(palette, want, dst[j],
                                           max_witness_vertices, max_arity)
            if not mus:
                ok = False
                break
            per_slot.append(mus)
        if not ok:
            continue
        for combo in itertools.product(*per_slot):
            work.tick()
            out.append(build_operator_morphism(src, dst, pointed, combo))
    _OPERATOR_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# approximation checking


@dataclass
class ApproximationReport:
    colors: tuple
    bounds: dict
    objects_checked: int = 0
    inert_lifts_checked: int = 0
    cartesian_lifts_checked: int = 0
    mediator_cocones_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _corolla_inclusion(ct: ColoredTree, v: int):
    """Canonical inert corolla map at vertex v, with its colored source."""
    t = ct.tree
    n = t.arity(v)
    cor = make_corolla(n)
    colors = (ct.colors[t.out_edges[v]],) + tuple(ct.colors[e]
                                                  for e in t.in_edges[v])
    f0 = (t.out_edges[v],) + tuple(t.in_edges[v])
    from .omega import corolla_subtree
    f = validate_morphism(cor, t, f0, (corolla_subtree(t, v),))
    return ColoredTree(cor, colors), f


def check_inert_lifts(ct: ColoredTree, corollas, report) -> None:
    """Condition (1): each corolla inclusion is locally coCartesian over
    its vertex projection and has inert image."""
    t = ct.tree
    for v in t.vertices():
        c_src, psi = _corolla_inclusion(ct, v)
        th = theta_of_colored(psi, c_src, ct)
        if not is_inert_operator(th):
            report.failures.append(("inert-image", ct, v))
        for c2 in corollas:
            for b in enumerate_colored_morphisms(c2, ct):
                if b.f1[0].vertices != frozenset((v,)):
                    continue
                mediators = [
                    g for g in enumerate_colored_morphisms(c2, c_src)
                    if g.f1[0].vertices == frozenset((0,))
                    and compose_omega(psi, g) == b]
                if len(mediators) != 1:
                    report.failures.append(
                        ("local-cocartesian", ct, v, len(mediators)))
        report.inert_lifts_checked += 1


def assemble_lift(ct: ColoredTree, mus) -> tuple:
    """Substitute each vertex's witness into the tree.

    ``mus`` maps each vertex to its multimorphism (output = that vertex's
    corolla object).  Returns (lifted colored tree, assembly morphism,
    per-(vertex, input) lifted vertex).
    """
    current = ct
    asm = identity_omega(ct.tree)
    vmap = {v: v for v in ct.tree.vertices()}
    input_vertex = {}
    for v in sorted(mus):
        mu = mus[v]
        host, cur_v = current, vmap[v]
        g = graft(host.tree, cur_v, mu.witness.tree, mu.active_leaves)
        colors = [None] * g.tree.n_edges
        for e in host.tree.edges():
            colors[g.from_host.f0[e]] = host.colors[e]
        for e in mu.witness.tree.edges():
            if colors[g.from_guest.f0[e]] is None:
                colors[g.from_guest.f0[e]] = mu.witness.colors[e]
        current = ColoredTree(g.tree, tuple(colors))
        asm = compose_omega(g.from_host, asm)

        def moved(w):
            (img,) = g.from_host.f1[w].vertices
            return img

        for w in list(vmap):
            if w != v and vmap[w] is not None:
                vmap[w] = moved(vmap[w])
        for key in list(input_vertex):
            input_vertex[key] = moved(input_vertex[key])
        vmap[v] = None
        for i in range(len(mu.inputs)):
            (img,) = g.from_guest.f1[mu.cover_vertices[i]].vertices
            input_vertex[(v, i)] = img
    return current, asm, input_vertex


def check_cartesian_lifts(ct: ColoredTree, palette, bounds, competitors,
                          report) -> None:
    """Condition (2): every bounded active morphism into the corolla
    sequence admits a Cartesian lift, certified by mediator search."""
    t = ct.tree
    per_vertex = []
    for v in t.vertices():
        obj = corolla_object(ct, v)
        mus = enumerate_multimorphisms_to(
            palette, obj, bounds["max_sub_vertices"], bounds["max_arity"])
        per_vertex.append(mus)
    ghat_tables = []
    for d in competitors:
        table = [(g, theta_of_colored(g, ct, d))
                 for g in enumerate_colored_morphisms(ct, d)]
        ghat_tables.append(table)
    for combo in itertools.product(*per_vertex):
        mus = {v: combo[v] for v in t.vertices()}
        lifted, asm, input_vertex = assemble_lift(ct, mus)
        th_asm = theta_of_colored(asm, ct, lifted)
        # the lift straightens to the chosen active morphism
        for v in t.vertices():
            fiber = sorted(asm.f1[v].vertices)
            order = sorted(range(len(mus[v].inputs)),
                           key=lambda i: input_vertex[(v, i)])
            if [input_vertex[(v, i)] for i in order] != fiber:
                report.failures.append(("lift-fiber", ct, v))
                continue
            if act_multi(mus[v], tuple(order)) != th_asm.components[v]:
                report.failures.append(("lift-component", ct, v))
        report.cartesian_lifts_checked += 1
        if not bounds.get("certify_cartesian", True):
            continue
        theta_lifted = theta_object(lifted)
        for d, ghat_table in zip(competitors, ghat_tables):
            mediators = {}
            for b in enumerate_colored_morphisms(lifted, d):
                key = (compose_omega(b, asm), theta_of_colored(b, lifted, d))
                mediators.setdefault(key, []).append(b)
            betas = [
                (beta, compose_operator(th_asm, beta))
                for beta in enumerate_operator_morphisms(
                    palette, theta_object(d), theta_lifted,
                    bounds["max_sub_vertices"], bounds["max_arity"])]
            for ghat, th_ghat in ghat_table:
                for beta, straightened in betas:
                    work.tick()
                    if straightened != th_ghat:
                        continue
                    found = mediators.get((ghat, beta), [])
                    report.mediator_cocones_checked += 1
                    if len(found) != 1:
                        report.failures.append(
                            ("mediator-count", ct, len(found)))


def check_approximation(palette, max_tree_vertices: int, max_arity: int,
                        max_sub_vertices: int = 3,
                        max_competitor_vertices: int = 3,
                        certify_cartesian: bool = True,
                        check_inert: bool = True,
                        check_cartesian: bool = True,
                        base_objects=None) -> ApproximationReport:
    """Verify both approximation conditions over bounded colored trees.

    The two conditions can be toggled so a suite can run them at different
    bounds; ``certify_cartesian=False`` still assembles each lift and checks
    that it straightens to its active morphism, skipping the mediator search.
    """
    palette = tuple(palette)
    bounds = {
        "max_tree_vertices": max_tree_vertices,
        "max_arity": max_arity,
        "max_sub_vertices": max_sub_vertices,
        "max_competitor_vertices": max_competitor_vertices,
        "certify_cartesian": certify_cartesian,
    }
    report = ApproximationReport(palette, bounds)
    objects = base_objects if base_objects is not None else \
        enumerate_trees(max_tree_vertices, max_arity, palette)
    corollas = [c for c in enumerate_trees(1, max_arity, palette)
                if c.tree.n_vertices == 1]
    competitors = enumerate_trees(max_competitor_vertices, max_arity, palette)
    for ct in objects:
        report.objects_checked += 1
        if check_inert:
            check_inert_lifts(ct, corollas, report)
        if check_cartesian:
            check_cartesian_lifts(ct, palette, bounds, competitors, report)
    return report
