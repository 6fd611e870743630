"""Finite set-valued presheaves on truncations of the tree and forest sites.

A site truncation lists canonical objects together with either the complete
morphism enumeration ("full" mode, feasible at small bounds) or the
composition-closed elementary-cover fragment ("cover" mode: identities,
edge and corolla inclusions, and the edge-into-corolla maps), which is all
the Segal and monoid checkers consume.  Presheaves are explicit value and
action tables; all checkers are pure functions over them.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field

from . import work
from .errors import ColorSetMismatch, NotSegal, SerializationError, SiteMismatch
from .forests import (
    EDGE_FOREST,
    Forest,
    ForestMorphism,
    canonical_forest,
    compose_forest_morphisms,
    corolla_forest,
    edge_inclusion,
    enumerate_forest_morphisms,
    enumerate_forests,
    fiber,
    fiber_inclusion,
    forest_descriptor,
    identity_forest_morphism,
    is_forest_iso,
    is_tree_object,
    linear_forest,
    restrict,
    underlying_tree,
    tau_morphism,
    validate_forest_morphism,
    vertex_corolla_inclusion,
)
from .omega import (
    OmegaMorphism,
    compose as compose_omega,
    corolla_subtree,
    enumerate_morphisms,
    eta_subtree,
    full_subtree,
    identity as identity_omega,
    is_isomorphism,
    respects_colors,
    subtree_leaves,
    validate_morphism,
    extract,
)
from .operads import ColoredOperad, ops_compose
from .trees import (
    ColoredTree,
    Tree,
    canonical_descriptor,
    enumerate_trees,
    is_isomorphic,
    leaves,
    linear_tree,
    make_corolla,
    make_edge,
)


# ---------------------------------------------------------------------------
# site truncations


@dataclass
class SiteMorphism:
    ident: int
    src: int
    tgt: int
    payload: object  # OmegaMorphism or ForestMorphism


@dataclass
class CoverEntry:
    """One elementary piece of an object's inert cover."""

    kind: str          # "edge" | "vertex"
    key: object        # edge index / vertex index within the object
    obj: int           # site index of the elementary object
    mor: int           # site morphism id of the inclusion into the object
    root_edge: object = None   # vertex entries: the outgoing edge key
    root_mor: int = None       # morphism id of root edge -> corolla object
    slots: tuple = ()          # vertex entries: (slot edge key, slot mor id)


@dataclass
class SiteTruncation:
    kind: str          # "omega" | "delta_f" | "delta_f1" | "delta_f_x"
    mode: str          # "full" | "cover"
    objects: tuple
    bounds: dict
    palette: tuple = None
    morphisms: list = field(default_factory=list)
    hom: dict = field(default_factory=dict)
    identity_ids: tuple = ()
    covers: tuple = ()
    _index: dict = field(default_factory=dict)
    _compose_memo: dict = field(default_factory=dict)

    def n_objects(self) -> int:
        return len(self.objects)

    def add_morphism(self, src: int, tgt: int, payload) -> int:
        key = (src, tgt, payload)
        if key in self._index:
            return self._index[key]
        ident = len(self.morphisms)
        self.morphisms.append(SiteMorphism(ident, src, tgt, payload))
        self._index[key] = ident
        self.hom.setdefault((src, tgt), []).append(ident)
        return ident

    def find_morphism(self, src: int, tgt: int, payload) -> int:
        key = (src, tgt, payload)
        if key not in self._index:
            raise SiteMismatch("morphism is not in the truncation",
                               src=src, tgt=tgt)
        return self._index[key]

    def compose_ids(self, g: int, f: int) -> int:
        key = (g, f)
        if key in self._compose_memo:
            return self._compose_memo[key]
        mg, mf = self.morphisms[g], self.morphisms[f]
        if mf.tgt != mg.src:
            raise SiteMismatch("morphisms are not composable")
        if isinstance(mf.payload, OmegaMorphism):
            comp = compose_omega(mg.payload, mf.payload)
        else:
            comp = compose_forest_morphisms(mg.payload, mf.payload)
        ident = self.find_morphism(mf.src, mg.tgt, comp)
        self._compose_memo[key] = ident
        return ident

    def composable_pairs(self):
        for g in self.morphisms:
            for (src, tgt), ids in self.hom.items():
                if tgt != g.src:
                    continue
                for f in ids:
                    yield g.ident, f


def _tree_of(obj):
    return obj.tree if isinstance(obj, ColoredTree) else obj


def _locate(index: dict, descriptor: str) -> int:
    if descriptor not in index:
        raise SiteMismatch("object is not in the truncation")
    return index[descriptor]


def build_omega_site(max_vertices: int, max_arity: int, mode: str = "full",
                     palette=None) -> SiteTruncation:
    """Truncation of the tree site, optionally with a fixed edge palette."""
    objects = tuple(enumerate_trees(max_vertices, max_arity, palette))
    site = SiteTruncation(
        kind="omega" if palette is None else "omega_colored", mode=mode,
        objects=objects,
        bounds={"max_vertices": max_vertices, "max_arity": max_arity},
        palette=tuple(palette) if palette is not None else None)
    index = {canonical_descriptor(o): i for i, o in enumerate(objects)}
    site.identity_ids = tuple(
        site.add_morphism(i, i, identity_omega(_tree_of(o)))
        for i, o in enumerate(objects))
    covers = []
    for i, obj in enumerate(objects):
        t = _tree_of(obj)
        colors = obj.colors if palette is not None else None
        entries = []
        for e in t.edges():
            eta = make_edge() if palette is None else \
                ColoredTree(make_edge(), (colors[e],))
            e_idx = _locate(index, canonical_descriptor(eta))
            payload = OmegaMorphism(_tree_of(eta), t, (e,), ())
            entries.append(CoverEntry("edge", e, e_idx,
                                      site.add_morphism(e_idx, i, payload)))
        for v in t.vertices():
            n = t.arity(v)
            cor = make_corolla(n)
            if palette is None:
                cor_obj = cor
            else:
                cor_obj = ColoredTree(
                    cor, (colors[t.out_edges[v]],) + tuple(
                        colors[e] for e in t.in_edges[v]))
            c_idx = _locate(index, canonical_descriptor(cor_obj))
            rep = objects[c_idx]
            rep_t = _tree_of(rep)
            # map the canonical representative onto the vertex; slot j of the
            # representative's vertex lands on some incoming edge of v
            iso = _find_tree_iso(rep, cor_obj)
            cor_edges = (t.out_edges[v],) + tuple(t.in_edges[v])
            f0 = tuple(cor_edges[iso[e]] for e in range(rep_t.n_edges))
            payload = validate_morphism(rep_t, t, f0, (corolla_subtree(t, v),))
            mor = site.add_morphism(c_idx, i, payload)
            root_payload = OmegaMorphism(
                make_edge() if palette is None else _tree_of(objects[_locate(
                    index, canonical_descriptor(
                        ColoredTree(make_edge(),
                                    (colors[t.out_edges[v]],))))]),
                rep_t, (rep_t.root,), ())
            root_obj = _locate(index, canonical_descriptor(
                make_edge() if palette is None else ColoredTree(
                    make_edge(), (colors[t.out_edges[v]],))))
            root_mor = site.add_morphism(root_obj, c_idx, root_payload)
            slots = []
            for j in range(rep_t.arity(0)):
                slot_edge_local = rep_t.in_edges[0][j]
                slot_edge = f0[slot_edge_local]
                s_obj = _locate(index, canonical_descriptor(
                    make_edge() if palette is None else ColoredTree(
                        make_edge(), (colors[slot_edge],))))
                s_payload = OmegaMorphism(_tree_of(objects[s_obj]), rep_t,
                                          (slot_edge_local,), ())
                slots.append((slot_edge,
                              site.add_morphism(s_obj, c_idx, s_payload)))
            entries.append(CoverEntry("vertex", v, c_idx, mor,
                                      root_edge=t.out_edges[v],
                                      root_mor=root_mor,
                                      slots=tuple(slots)))
        covers.append(tuple(entries))
    site.covers = tuple(covers)
    if mode == "full":
        for a, src in enumerate(objects):
            for b, tgt in enumerate(objects):
                for f in enumerate_morphisms(_tree_of(src), _tree_of(tgt)):
                    if palette is not None and not respects_colors(
                            f, src.colors, tgt.colors):
                        continue
                    site.add_morphism(a, b, f)
    return site


def _find_tree_iso(a, b) -> dict:
    """Edge map of an isomorphism a -> b (trees or colored trees)."""
    res = is_isomorphic(a, b)
    if res is None:
        raise SiteMismatch("expected isomorphic objects")
    return res[0]


def build_forest_site(max_length: int, max_level_size: int, max_edges=None,
                      mode: str = "full", tree_objects_only: bool = False,
                      max_tree_vertices=None) -> SiteTruncation:
    """Truncation of the forest site (or its tree-object full subcategory).

    ``max_tree_vertices`` additionally filters by total vertex count, to
    align a tree-objects site with a tree-site truncation.
    """
    all_objects = enumerate_forests(max_length, max_level_size, max_edges)
    if tree_objects_only:
        all_objects = [f for f in all_objects if is_tree_object(f)]
    if max_tree_vertices is not None:
        all_objects = [f for f in all_objects
                       if f.n_vertices <= max_tree_vertices]
    objects = tuple(all_objects)
    site = SiteTruncation(
        kind="delta_f1" if tree_objects_only else "delta_f", mode=mode,
        objects=objects,
        bounds={"max_length": max_length, "max_level_size": max_level_size,
                "max_edges": max_edges,
                "max_tree_vertices": max_tree_vertices})
    index = {forest_descriptor(o): i for i, o in enumerate(objects)}
    site.identity_ids = tuple(
        site.add_morphism(i, i, identity_forest_morphism(o))
        for i, o in enumerate(objects))
    e_idx = _locate(index, forest_descriptor(EDGE_FOREST))
    covers = []
    for i, obj in enumerate(objects):
        entries = []
        for (lvl, x) in obj.edges():
            payload = edge_inclusion(obj, lvl, x)
            entries.append(CoverEntry("edge", obj.edge_index(lvl, x), e_idx,
                                      site.add_morphism(e_idx, i, payload)))
        for (lvl, x) in obj.vertices():
            payload = vertex_corolla_inclusion(obj, lvl, x)
            cor = payload.source
            c_idx = _locate(index, forest_descriptor(cor))
            if objects[c_idx] != cor:
                raise SiteMismatch("corolla representative mismatch")
            mor = site.add_morphism(c_idx, i, payload)
            root_mor = site.add_morphism(
                e_idx, c_idx, edge_inclusion(cor, 1, 0))
            slots = []
            fib = obj.fiber_at(lvl - 1, lvl, x)
            for j in range(len(fib)):
                slot_payload = edge_inclusion(cor, 0, j)
                slots.append((obj.edge_index(lvl - 1, fib[j]),
                              site.add_morphism(e_idx, c_idx, slot_payload)))
            entries.append(CoverEntry(
                "vertex", obj.vertex_index(lvl, x), c_idx, mor,
                root_edge=obj.edge_index(lvl, x), root_mor=root_mor,
                slots=tuple(slots)))
        covers.append(tuple(entries))
    site.covers = tuple(covers)
    if mode == "full":
        for a, src in enumerate(objects):
            for b, tgt in enumerate(objects):
                for f in enumerate_forest_morphisms(src, tgt):
                    site.add_morphism(a, b, f)
    return site


def build_colored_forest_site(base: SiteTruncation, palette
                              ) -> SiteTruncation:
    """Edge-colored forest site: one object per (object, coloring) pair."""
    palette = tuple(palette)
    objects = []
    obj_of = {}
    for b, obj in enumerate(base.objects):
        for colors in itertools.product(palette, repeat=obj.n_edges):
            obj_of[(b, colors)] = len(objects)
            objects.append((b, colors))
    site = SiteTruncation(
        kind="delta_f_x", mode="cover", objects=tuple(objects),
        bounds=dict(base.bounds), palette=palette)
    site.base = base
    ids = []
    for i, (b, colors) in enumerate(objects):
        ids.append(site.add_morphism(
            i, i, base.morphisms[base.identity_ids[b]].payload))
    site.identity_ids = tuple(ids)
    covers = []
    for i, (b, colors) in enumerate(objects):
        entries = []
        for entry in base.covers[b]:
            payload = base.morphisms[entry.mor].payload
            src_colors = _pullback_forest_colors(payload, colors)
            s_idx = obj_of[(base.morphisms[entry.mor].src, src_colors)]
            mor = site.add_morphism(s_idx, i, payload)
            if entry.kind == "edge":
                entries.append(CoverEntry("edge", entry.key, s_idx, mor))
            else:
                cor_b = base.morphisms[entry.mor].src
                root_payload = base.morphisms[entry.root_mor].payload
                r_colors = _pullback_forest_colors(root_payload, src_colors)
                r_idx = obj_of[(base.morphisms[entry.root_mor].src, r_colors)]
                root_mor = site.add_morphism(r_idx, s_idx, root_payload)
                slots = []
                for (edge_key, slot_mor) in entry.slots:
                    sp = base.morphisms[slot_mor].payload
                    sp_colors = _pullback_forest_colors(sp, src_colors)
                    sp_idx = obj_of[(base.morphisms[slot_mor].src, sp_colors)]
                    slots.append((edge_key,
                                  site.add_morphism(sp_idx, s_idx, sp)))
                entries.append(CoverEntry(
                    "vertex", entry.key, s_idx, mor,
                    root_edge=entry.root_edge, root_mor=root_mor,
                    slots=tuple(slots)))
        covers.append(tuple(entries))
    site.covers = tuple(covers)
    return site


def _pullback_forest_colors(payload: ForestMorphism, tgt_colors) -> tuple:
    src = payload.source
    out = []
    for k in range(src.length + 1):
        for x in range(src.levels[k]):
            e = payload.target.edge_index(payload.alpha[k], payload.phis[k][x])
            out.append(tgt_colors[e])
    return tuple(out)


# ---------------------------------------------------------------------------
# presheaves


@dataclass
class FinitePresheaf:
    site: SiteTruncation
    values: tuple      # per object, a tuple of hashable elements
    action: dict       # morphism id -> {element of F(tgt): element of F(src)}

    def at(self, obj_idx: int) -> tuple:
        return self.values[obj_idx]

    def apply(self, mor_id: int, element):
        return self.action[mor_id][element]


def validate_presheaf(F: FinitePresheaf, max_pairs: int = 200000) -> bool:
    """Identity and composition laws over the listed morphisms.

    Checks every composable pair when their number is below ``max_pairs``,
    otherwise the identity axioms plus cover-factorization pairs.
    """
    site = F.site
    for i in range(site.n_objects()):
        ide = site.identity_ids[i]
        for x in F.values[i]:
            if F.apply(ide, x) != x:
                return False
    for m in site.morphisms:
        table = F.action[m.ident]
        if sorted(map(repr, table.keys())) != \
                sorted(map(repr, F.values[m.tgt])):
            return False
        for x in F.values[m.tgt]:
            if table[x] not in set(F.values[m.src]):
                return False
    pairs = list(site.composable_pairs())
    if len(pairs) > max_pairs:
        pairs = [(g, f) for g, f in pairs
                 if site.morphisms[g].src == site.morphisms[f].tgt][:max_pairs]
    for g, f in pairs:
        try:
            gf = site.compose_ids(g, f)
        except SiteMismatch:
            if site.mode == "cover":
                continue
            raise
        for x in F.values[site.morphisms[g].tgt]:
            if F.apply(f, F.apply(g, x)) != F.apply(gf, x):
                return False
    return True


# ---------------------------------------------------------------------------
# nerves of operads


def _tree_labelings(operad: ColoredOperad, tree: Tree, fixed_colors=None):
    colorings = [tuple(fixed_colors)] if fixed_colors is not None else \
        itertools.product(operad.colors, repeat=tree.n_edges)
    out = []
    for colors in colorings:
        per_vertex = []
        dead = False
        for v in tree.vertices():
            ops = operad.ops_at(tuple(colors[e] for e in tree.in_edges[v]),
                                colors[tree.out_edges[v]])
            if not ops:
                dead = True
                break
            per_vertex.append(ops)
        if dead:
            continue
        for combo in itertools.product(*per_vertex):
            work.tick()
            out.append((tuple(colors), tuple(combo)))
    return tuple(out)


def _forest_labelings(operad: ColoredOperad, forest: Forest,
                      fixed_colors=None):
    colorings = [tuple(fixed_colors)] if fixed_colors is not None else \
        itertools.product(operad.colors, repeat=forest.n_edges)
    out = []
    for colors in colorings:
        per_vertex = []
        dead = False
        for (i, x) in forest.vertices():
            ins = tuple(colors[forest.edge_index(i - 1, z)]
                        for z in forest.fiber_at(i - 1, i, x))
            ops = operad.ops_at(ins, colors[forest.edge_index(i, x)])
            if not ops:
                dead = True
                break
            per_vertex.append(ops)
        if dead:
            continue
        for combo in itertools.product(*per_vertex):
            work.tick()
            out.append((tuple(colors), tuple(combo)))
    return tuple(out)


def _pull_tree_labeling(operad, f: OmegaMorphism, labeling):
    colors, ops = labeling
    src = f.source
    new_colors = tuple(colors[f.f0[e]] for e in src.edges())
    new_ops = []
    for v in src.vertices():
        st = f.f1[v]
        small, e_emb, v_emb = extract(f.target, st)
        sub_colors = tuple(colors[e] for e in e_emb)
        sub_ops = tuple(ops[w] for w in v_emb)
        back = {amb: k for k, amb in enumerate(e_emb)}
        order = tuple(back[f.f0[e]] for e in src.in_edges[v])
        new_ops.append(ops_compose(operad, small, sub_colors, sub_ops,
                                   leaf_order=order))
    return (new_colors, tuple(new_ops))


def _subbroom(forest: Forest, lo: int, hi: int, top: int):
    """The fiber tree between two levels over a top element.

    Returns (tree, edge list) with edge list mapping tree edges to forest
    edge indices.
    """
    members = []
    where = {}
    for lvl in range(lo, hi + 1):
        for e in range(forest.levels[lvl]):
            if forest.level_map(lvl, hi, e) == top:
                where[(lvl, e)] = len(members)
                members.append((lvl, e))
    outs, ins, vmap = [], [], {}
    for (lvl, e) in members:
        if lvl > lo:
            vmap[(lvl, e)] = len(outs)
            outs.append(where[(lvl, e)])
            ins.append(tuple(where[(lvl - 1, z)]
                             for z in forest.fiber_at(lvl - 1, lvl, e)))
    tree = Tree(len(members), where[(hi, top)], tuple(outs), tuple(ins))
    return tree, [forest.edge_index(lvl, e) for (lvl, e) in members], vmap


def _pull_forest_labeling(operad, f: ForestMorphism, labeling):
    colors, ops = labeling
    src, tgt = f.source, f.target
    new_colors = []
    for k in range(src.length + 1):
        for x in range(src.levels[k]):
            e = tgt.edge_index(f.alpha[k], f.phis[k][x])
            new_colors.append(colors[e])
    new_ops = []
    for (k, x) in src.vertices():
        lo, hi = f.alpha[k - 1], f.alpha[k]
        top = f.phis[k][x]
        tree, edge_list, vmap = _subbroom(tgt, lo, hi, top)
        sub_colors = tuple(colors[e] for e in edge_list)
        sub_ops = [None] * tree.n_vertices
        for (lvl, e), v_local in vmap.items():
            sub_ops[v_local] = ops[tgt.vertex_index(lvl, e)]
        fib = src.fiber_at(k - 1, k, x)
        back = {e: i for i, e in enumerate(edge_list)}
        order = tuple(
            back[tgt.edge_index(lo, f.phis[k - 1][z])] for z in fib)
        new_ops.append(ops_compose(operad, tree, sub_colors,
                                   tuple(sub_ops), leaf_order=order))
    return (tuple(new_colors), tuple(new_ops))


def nerve(operad: ColoredOperad, site: SiteTruncation) -> FinitePresheaf:
    """Labelings of every object by colors and matching operations."""
    values = []
    for obj in site.objects:
        if site.kind == "omega":
            values.append(_tree_labelings(operad, obj))
        elif site.kind == "omega_colored":
            if any(c not in operad.colors for c in obj.colors):
                raise ColorSetMismatch("site palette is not the operad colors")
            values.append(_tree_labelings(operad, obj.tree,
                                          fixed_colors=obj.colors))
        elif site.kind in ("delta_f", "delta_f1"):
            values.append(_forest_labelings(operad, obj))
        elif site.kind == "delta_f_x":
            b, colors = obj
            values.append(_forest_labelings(operad, site.base.objects[b],
                                            fixed_colors=colors))
        else:
            raise SiteMismatch("unsupported site kind", kind=site.kind)
    action = {}
    for m in site.morphisms:
        table = {}
        for lab in values[m.tgt]:
            if isinstance(m.payload, OmegaMorphism):
                table[lab] = _pull_tree_labeling(operad, m.payload, lab)
            else:
                if site.kind == "delta_f_x":
                    table[lab] = _pull_forest_labeling(operad, m.payload, lab)
                else:
                    table[lab] = _pull_forest_labeling(operad, m.payload, lab)
            if table[lab] not in set(values[m.src]):
                raise SiteMismatch("action left the value table", mor=m.ident)
        action[m.ident] = table
    return FinitePresheaf(site, tuple(values), action)


# ---------------------------------------------------------------------------
# Segal checking


@dataclass
class ObjectVerdict:
    obj: int
    n_values: int
    n_families: int
    injective: bool
    bijective: bool
    detail: str = ""


@dataclass
class SegalReport:
    verdicts: tuple

    @property
    def ok(self) -> bool:
        return all(v.bijective for v in self.verdicts)

    def failures(self):
        return [v for v in self.verdicts if not v.bijective]

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "objects": [
                    {"object": v.obj, "values": v.n_values,
                     "families": v.n_families, "injective": v.injective,
                     "bijective": v.bijective, "detail": v.detail}
                    for v in self.verdicts]}

    def to_text(self) -> str:
        lines = []
        for v in self.verdicts:
            status = "ok" if v.bijective else "FAIL"
            lines.append(f"object {v.obj}: {status} "
                         f"(values={v.n_values}, families={v.n_families}"
                         f"{', ' + v.detail if v.detail else ''})")
        lines.append(f"segal: {'ok' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def matching_families(F: FinitePresheaf, obj_idx: int) -> list:
    """Compatible tuples of elementary values over the inert cover."""
    site = F.site
    entries = site.covers[obj_idx]
    edge_entries = [e for e in entries if e.kind == "edge"]
    vertex_entries = [e for e in entries if e.kind == "vertex"]
    families = []

    def rec(k, edge_vals):
        if k == len(vertex_entries):
            free = [e for e in edge_entries if e.key not in edge_vals]
            for combo in itertools.product(*[F.values[e.obj] for e in free]):
                full = dict(edge_vals)
                for e, val in zip(free, combo):
                    full[e.key] = val
                families.append((tuple(sorted(full.items(),
                                              key=lambda kv: repr(kv[0]))),
                                 tuple(vals)))
            return
        entry = vertex_entries[k]
        for x in F.values[entry.obj]:
            work.tick()
            updates = {}
            ok = True
            pins = [(entry.root_edge, F.apply(entry.root_mor, x))]
            for (edge_key, slot_mor) in entry.slots:
                pins.append((edge_key, F.apply(slot_mor, x)))
            for edge_key, val in pins:
                have = edge_vals.get(edge_key, updates.get(edge_key))
                if have is None:
                    updates[edge_key] = val
                elif have != val:
                    ok = False
                    break
            if not ok:
                continue
            vals.append(x)
            merged = dict(edge_vals)
            merged.update(updates)
            rec(k + 1, merged)
            vals.pop()

    vals: list = []
    rec(0, {})
    return families


def canonical_family(F: FinitePresheaf, obj_idx: int, element):
    site = F.site
    entries = site.covers[obj_idx]
    edge_vals = {}
    vertex_vals = []
    for e in entries:
        if e.kind == "edge":
            edge_vals[e.key] = F.apply(e.mor, element)
        else:
            vertex_vals.append(F.apply(e.mor, element))
    return (tuple(sorted(edge_vals.items(), key=lambda kv: repr(kv[0]))),
            tuple(vertex_vals))


def check_segal_at(F: FinitePresheaf, obj_idx: int) -> ObjectVerdict:
    fams = matching_families(F, obj_idx)
    fam_set = set(fams)
    images = [canonical_family(F, obj_idx, x) for x in F.values[obj_idx]]
    injective = len(set(images)) == len(images)
    surjective = set(images) == fam_set
    detail = ""
    if not injective:
        detail = "two values restrict to the same family"
    elif not surjective:
        detail = "family not realized" if len(fam_set) > len(images) \
            else "image not a family"
    return ObjectVerdict(obj_idx, len(F.values[obj_idx]), len(fam_set),
                         injective, injective and surjective, detail)


def check_segal(F: FinitePresheaf) -> SegalReport:
    return SegalReport(tuple(check_segal_at(F, i)
                             for i in range(F.site.n_objects())))


# ---------------------------------------------------------------------------
# the equivalent forest formulations


def _bijective_into(F, obj_idx, mor_ids, product_objs):
    """Is x -> (F(m)(x))_m  a bijection onto the product set?"""
    tuples = [tuple(F.apply(m, x) for m in mor_ids)
              for x in F.values[obj_idx]]
    if len(set(tuples)) != len(tuples):
        return False
    full = set(itertools.product(*[F.values[o] for o in product_objs]))
    return set(tuples) == full


def _locate_with_iso_forest(site: SiteTruncation, forest: Forest):
    """Site index of the class of ``forest`` plus an iso payload rep -> forest."""
    cache = getattr(site, "_forest_locate_cache", None)
    if cache is None:
        cache = {}
        site._forest_locate_cache = cache
        site._forest_desc_index = {
            forest_descriptor(o): i for i, o in enumerate(site.objects)}
    if forest in cache:
        return cache[forest]
    d = forest_descriptor(forest)
    i = site._forest_desc_index.get(d)
    if i is None:
        raise SiteMismatch("forest class is not in the truncation")
    for f in enumerate_forest_morphisms(site.objects[i], forest):
        if is_forest_iso(f):
            cache[forest] = (i, f)
            return i, f
    raise SiteMismatch("forest class is not in the truncation")


def _formulation_data(site: SiteTruncation):
    """Per-object morphism ids for the spine and fiber formulations."""
    cached = getattr(site, "_formulations", None)
    if cached is not None:
        return cached
    data = []
    for i, obj in enumerate(site.objects):
        n = obj.length
        entry = {}
        if n == 0:
            e_idx, _ = _locate_with_iso_forest(site, EDGE_FOREST)
            mors = [site.find_morphism(e_idx, i, edge_inclusion(obj, 0, x))
                    for x in range(obj.levels[0])]
            entry["edge_split"] = (mors, [e_idx] * obj.levels[0])
        if n == 1:
            mors, objs = [], []
            for x in range(obj.levels[1]):
                inc = fiber_inclusion(obj, x)
                c_idx, iso = _locate_with_iso_forest(site, inc.source)
                payload = compose_forest_morphisms(inc, iso)
                mors.append(site.find_morphism(c_idx, i, payload))
                objs.append(c_idx)
            entry["level_split"] = (mors, objs)
        if n >= 2:
            window_data = []
            for k in range(n):
                win = restrict(obj, k, k + 1)
                w_idx, iso = _locate_with_iso_forest(site, win)
                incl = validate_forest_morphism(
                    win, obj, (k, k + 1),
                    (tuple(range(obj.levels[k])),
                     tuple(range(obj.levels[k + 1]))))
                payload = compose_forest_morphisms(incl, iso)
                window_data.append(
                    (w_idx, site.find_morphism(w_idx, i, payload), iso))
            overlap_mors = []
            for k in range(1, n):
                lvl = restrict(obj, k, k)
                l_idx, iso_l = _locate_with_iso_forest(site, lvl)
                left_incl = validate_forest_morphism(
                    lvl, restrict(obj, k - 1, k), (1,),
                    (tuple(range(obj.levels[k])),))
                right_incl = validate_forest_morphism(
                    lvl, restrict(obj, k, k + 1), (0,),
                    (tuple(range(obj.levels[k])),))
                w_left, w_right = window_data[k - 1], window_data[k]
                lp = compose_forest_morphisms(
                    _postcompose_into_rep(w_left[2], left_incl), iso_l)
                rp = compose_forest_morphisms(
                    _postcompose_into_rep(w_right[2], right_incl), iso_l)
                overlap_mors.append(
                    (site.find_morphism(l_idx, w_left[0], lp),
                     site.find_morphism(l_idx, w_right[0], rp)))
            entry["spine"] = ([(w, m) for w, m, _ in window_data],
                              overlap_mors)
        fmors, fobjs = [], []
        for k in range(obj.levels[-1]):
            inc = fiber_inclusion(obj, k)
            f_idx, iso = _locate_with_iso_forest(site, inc.source)
            payload = compose_forest_morphisms(inc, iso)
            fmors.append(site.find_morphism(f_idx, i, payload))
            fobjs.append(f_idx)
        entry["root_fibers"] = (fmors, fobjs)
        data.append(entry)
    site._formulations = data
    return data


def check_segal_formulation_spine(F: FinitePresheaf) -> bool:
    """Level spine + one-level corolla splitting + edge splitting."""
    site = F.site
    data = _formulation_data(site)
    for i, obj in enumerate(site.objects):
        entry = data[i]
        if "edge_split" in entry:
            mors, objs = entry["edge_split"]
            if not _bijective_into(F, i, mors, objs):
                return False
            continue
        if "level_split" in entry:
            mors, objs = entry["level_split"]
            if not _bijective_into(F, i, mors, objs):
                return False
            continue
        windows, overlap_mors = entry["spine"]
        tuples = {}
        for x in F.values[i]:
            tuples[x] = tuple(F.apply(m, x) for _, m in windows)
        if len(set(tuples.values())) != len(tuples):
            return False
        compatible = []
        per_window_vals = [F.values[w] for w, _ in windows]
        for combo in itertools.product(*per_window_vals):
            ok = True
            for k, (m_left, m_right) in enumerate(overlap_mors):
                if F.apply(m_left, combo[k]) != F.apply(m_right, combo[k + 1]):
                    ok = False
                    break
            if ok:
                compatible.append(combo)
        if set(tuples.values()) != set(compatible):
            return False
    return True


def _invert_iso(iso: ForestMorphism) -> ForestMorphism:
    phis = []
    for k in range(iso.source.length + 1):
        inv = [None] * iso.source.levels[k]
        for a, b in enumerate(iso.phis[k]):
            inv[b] = a
        phis.append(tuple(inv))
    return ForestMorphism(iso.target, iso.source, iso.alpha, tuple(phis))


def _postcompose_into_rep(iso: ForestMorphism, incl: ForestMorphism
                          ) -> ForestMorphism:
    """Turn x -> target into x -> rep along iso: rep -> target."""
    return compose_forest_morphisms(_invert_iso(iso), incl)


def check_segal_formulation_roots(F: FinitePresheaf) -> bool:
    """Tree-object matching families + root-fiber splitting."""
    site = F.site
    data = _formulation_data(site)
    for i, obj in enumerate(site.objects):
        if is_tree_object(obj):
            if not check_segal_at(F, i).bijective:
                return False
        mors, objs = data[i]["root_fibers"]
        if not _bijective_into(F, i, mors, objs):
            return False
    return True


def check_segal_variants(F: FinitePresheaf) -> dict:
    """Global verdicts of the equivalent Segal formulations."""
    if F.site.kind != "delta_f" or F.site.mode != "full":
        raise SiteMismatch("variant comparison needs a full forest site")
    v1 = check_segal(F).ok
    v3 = check_segal_formulation_spine(F)
    v4 = check_segal_formulation_roots(F)
    return {"elementary": v1, "spine": v3, "root_fibers": v4,
            "agree": v1 == v3 == v4}


# ---------------------------------------------------------------------------
# monoid condition on edge-colored forests


@dataclass
class MonoidReport:
    verdicts: tuple  # per colored object: bool
    segal_comparison: tuple = ()

    @property
    def ok(self):
        return all(self.verdicts)


def check_monoid_at(F: FinitePresheaf, obj_idx: int) -> bool:
    site = F.site
    entries = [e for e in site.covers[obj_idx] if e.kind == "vertex"]
    mors = [e.mor for e in entries]
    objs = [e.obj for e in entries]
    return _bijective_into(F, obj_idx, mors, objs)


def check_monoid(F: FinitePresheaf) -> MonoidReport:
    if F.site.kind != "delta_f_x":
        raise SiteMismatch("monoid condition lives on edge-colored forests")
    return MonoidReport(tuple(check_monoid_at(F, i)
                              for i in range(F.site.n_objects())))


def left_kan_to_forests(F: FinitePresheaf) -> FinitePresheaf:
    """Sum over colorings: the presheaf on the base forest site."""
    site = F.site
    base = site.base
    by_base = {}
    for i, (b, colors) in enumerate(site.objects):
        by_base.setdefault(b, []).append((i, colors))
    values = []
    for b in range(base.n_objects()):
        vals = []
        for i, colors in by_base[b]:
            vals.extend((i, x) for x in F.values[i])
        values.append(tuple(vals))
    action = {}
    for m in base.morphisms:
        table = {}
        for (i, x) in values[m.tgt]:
            b, colors = site.objects[i]
            src_colors = _pullback_forest_colors(m.payload, colors)
            s_idx = [j for j, (bb, cc) in enumerate(site.objects)
                     if bb == m.src and cc == src_colors][0]
            colored_mor = site._index.get((s_idx, i, m.payload))
            if colored_mor is None:
                raise SiteMismatch("colored lift missing from the site")
            table[(i, x)] = (s_idx, F.apply(colored_mor, x))
        action[m.ident] = table
    return FinitePresheaf(base, tuple(values), action)


def monoid_matches_segal(F: FinitePresheaf) -> dict:
    """Object-wise equivalence of the monoid and summed Segal conditions."""
    site = F.site
    base = site.base
    mon = check_monoid(F)
    pushed = left_kan_to_forests(F)
    seg = check_segal(pushed)
    results = []
    for b in range(base.n_objects()):
        colored = [i for i, (bb, _) in enumerate(site.objects) if bb == b]
        all_mon = all(mon.verdicts[i] for i in colored)
        results.append((b, all_mon, seg.verdicts[b].bijective,
                        all_mon == seg.verdicts[b].bijective))
    return {"ok": all(r[3] for r in results), "objects": results,
            "monoid": mon, "segal": seg}


# ---------------------------------------------------------------------------
# comparison along the level-forgetting functor


def _locate_with_iso_tree(site: SiteTruncation, tree: Tree):
    d = canonical_descriptor(tree)
    for i, obj in enumerate(site.objects):
        if canonical_descriptor(obj) == d:
            emap, vmap = is_isomorphic(obj, tree)
            f0 = tuple(emap[e] for e in range(obj.n_edges))
            f1 = tuple(corolla_subtree(tree, vmap[v])
                       for v in obj.vertices())
            return i, validate_morphism(obj, tree, f0, f1)
    raise SiteMismatch("tree class is not in the truncation")


def tau_pullback(F: FinitePresheaf, forest_site: SiteTruncation
                 ) -> FinitePresheaf:
    """Pull a tree-site presheaf back to the tree-objects forest site."""
    if forest_site.kind != "delta_f1":
        raise SiteMismatch("pullback lands on the tree-objects forest site")
    if F.site.kind != "omega" or F.site.mode != "full":
        raise SiteMismatch("pullback needs a full tree site")
    reps = {}
    for i, obj in enumerate(forest_site.objects):
        ut = underlying_tree(obj)
        reps[i] = _locate_with_iso_tree(F.site, ut)
    values = tuple(F.values[reps[i][0]]
                   for i in range(forest_site.n_objects()))
    action = {}
    for m in forest_site.morphisms:
        j, i = m.src, m.tgt
        rep_j, iso_j = reps[j]
        rep_i, iso_i = reps[i]
        tm = tau_morphism(m.payload)
        # conjugate into the representatives:  rep_j -> rep_i
        inv_i = _invert_omega_iso(iso_i)
        conj = compose_omega(inv_i, compose_omega(tm, iso_j))
        mor = F.site.find_morphism(rep_j, rep_i, conj)
        action[m.ident] = dict(F.action[mor])
    return FinitePresheaf(forest_site, values, action)


def _invert_omega_iso(iso: OmegaMorphism) -> OmegaMorphism:
    inv0 = [None] * iso.target.n_edges
    for e, img in enumerate(iso.f0):
        inv0[img] = e
    f1 = []
    for x in iso.target.vertices():
        for v, st in enumerate(iso.f1):
            if x in st.vertices:
                f1.append(corolla_subtree(iso.source, v))
                break
    return validate_morphism(iso.target, iso.source, tuple(inv0), tuple(f1))


def transport_labeling(iso: OmegaMorphism, labeling):
    """Relabel a (colors, ops) labeling along a tree isomorphism
    iso: A -> B, producing the labeling of A from one of B."""
    colors, ops = labeling
    new_colors = tuple(colors[iso.f0[e]] for e in iso.source.edges())
    owner = {}
    for v, st in enumerate(iso.f1):
        (w,) = st.vertices
        owner[v] = w
    new_ops = tuple(ops[owner[v]] for v in iso.source.vertices())
    return (new_colors, new_ops)


def compare_models(operad: ColoredOperad, omega_site: SiteTruncation,
                   forest_site: SiteTruncation) -> dict:
    """Value-wise equality of the pulled-back and direct nerves, with
    matching Segal verdicts."""
    n_omega = nerve(operad, omega_site)
    n_forest = nerve(operad, forest_site)
    pulled = tau_pullback(n_omega, forest_site)
    seg_pulled = check_segal(pulled)
    seg_direct = check_segal(n_forest)
    mismatches = []
    for i, obj in enumerate(forest_site.objects):
        rep_idx, iso = _locate_with_iso_tree(omega_site, underlying_tree(obj))
        back = _invert_omega_iso(iso)
        transported = {transport_labeling(back, lab)
                       for lab in pulled.values[i]}
        # direct labelings are indexed by the forest's level-major numbering,
        # which is the underlying tree's numbering
        direct = set(n_forest.values[i])
        if transported != direct:
            mismatches.append(("values", i))
        if seg_pulled.verdicts[i].bijective != \
                seg_direct.verdicts[i].bijective:
            mismatches.append(("segal", i))
    elementary_ok = _elementary_bijection_ok(omega_site, forest_site)
    return {"ok": not mismatches and elementary_ok,
            "mismatches": mismatches,
            "elementary_bijection": elementary_ok}


def _elementary_bijection_ok(omega_site, forest_site) -> bool:
    for i, obj in enumerate(forest_site.objects):
        if obj.n_edges == 1 and obj.n_vertices == 0:
            ut = underlying_tree(obj)
            if canonical_descriptor(ut) != canonical_descriptor(make_edge()):
                return False
        if obj.length == 1 and obj.levels[1] == 1:
            n = obj.levels[0]
            ut = underlying_tree(obj)
            if canonical_descriptor(ut) != \
                    canonical_descriptor(make_corolla(n)):
                return False
    return True


# ---------------------------------------------------------------------------
# underlying category, completeness, equivalences


@dataclass
class FiniteCategory:
    objects: tuple
    morphisms: tuple
    source: dict
    target: dict
    identity: dict
    composition: dict  # (g, f) -> g after f


def _structural_ids(F: FinitePresheaf):
    """Indices and payloads of the linear objects of the site."""
    site = F.site
    if site.kind == "omega":
        eta_i, _ = _locate_with_iso_tree(site, make_edge())
        c1_i, _ = _locate_with_iso_tree(site, make_corolla(1))
        l2 = linear_tree(2)
        l2_i, iso2 = _locate_with_iso_tree(site, l2)
        c1 = make_corolla(1)
        leaf = site.find_morphism(eta_i, c1_i, OmegaMorphism(
            make_edge(), c1, (1,), ()))
        root = site.find_morphism(eta_i, c1_i, OmegaMorphism(
            make_edge(), c1, (0,), ()))
        degen = site.find_morphism(c1_i, eta_i, validate_morphism(
            c1, make_edge(), (0, 0), (eta_subtree(0),)))
        bottom = validate_morphism(c1, l2, (0, 1),
                                   (corolla_subtree(l2, 0),))
        top = validate_morphism(c1, l2, (1, 2), (corolla_subtree(l2, 1),))
        act = validate_morphism(c1, l2, (0, 2), (full_subtree(l2),))
        inv = _invert_omega_iso(iso2)
        conj = lambda p: compose_omega(inv, p)
        bottom_m = site.find_morphism(c1_i, l2_i, conj(bottom))
        top_m = site.find_morphism(c1_i, l2_i, conj(top))
        act_m = site.find_morphism(c1_i, l2_i, conj(act))
        return eta_i, c1_i, l2_i, leaf, root, degen, bottom_m, top_m, act_m
    if site.kind == "delta_f1" or site.kind == "delta_f":
        eta_i, _ = _locate_with_iso_forest(site, EDGE_FOREST)
        c1 = corolla_forest(1)
        c1_i, _ = _locate_with_iso_forest(site, c1)
        l2 = linear_forest(2)
        l2_i, iso2 = _locate_with_iso_forest(site, l2)
        leaf = site.find_morphism(eta_i, c1_i,
                                  edge_inclusion(c1, 0, 0))
        root = site.find_morphism(eta_i, c1_i,
                                  edge_inclusion(c1, 1, 0))
        degen = site.find_morphism(c1_i, eta_i, validate_forest_morphism(
            c1, EDGE_FOREST, (0, 0), ((0,), (0,))))
        inv = _invert_iso(iso2)
        mk = lambda a: compose_forest_morphisms(
            inv, validate_forest_morphism(c1, l2, a, ((0,), (0,))))
        bottom_m = site.find_morphism(c1_i, l2_i, mk((0, 1)))
        top_m = site.find_morphism(c1_i, l2_i, mk((1, 2)))
        act_m = site.find_morphism(c1_i, l2_i, mk((0, 2)))
        return eta_i, c1_i, l2_i, leaf, root, degen, bottom_m, top_m, act_m
    raise SiteMismatch("underlying category needs a tree-shaped site")


def underlying_category(F: FinitePresheaf) -> FiniteCategory:
    """Objects and unary cells of a Segal presheaf, with Segal composition."""
    eta_i, c1_i, l2_i, leaf, root, degen, bottom_m, top_m, act_m = \
        _structural_ids(F)
    if not check_segal_at(F, l2_i).bijective:
        raise NotSegal("composition needs the two-step object to be Segal")
    objects = F.values[eta_i]
    morphisms = F.values[c1_i]
    source = {f: F.apply(leaf, f) for f in morphisms}
    target = {f: F.apply(root, f) for f in morphisms}
    identity = {x: F.apply(degen, x) for x in objects}
    composition = {}
    for w in F.values[l2_i]:
        f = F.apply(top_m, w)      # nearer the leaves: applied first
        g = F.apply(bottom_m, w)   # nearer the root: applied second
        composition[(g, f)] = F.apply(act_m, w)
    return FiniteCategory(objects, morphisms, source, target, identity,
                          composition)


def iota0(F: FinitePresheaf) -> tuple:
    eta_i = _structural_ids(F)[0]
    return F.values[eta_i]


def iota1(F: FinitePresheaf) -> tuple:
    """Strictly mutually inverse pairs of unary cells."""
    cat = underlying_category(F)
    pairs = []
    for f in cat.morphisms:
        for g in cat.morphisms:
            if cat.source[g] != cat.target[f] or \
                    cat.target[g] != cat.source[f]:
                continue
            if cat.composition.get((g, f)) == cat.identity[cat.source[f]] \
                    and cat.composition.get((f, g)) == \
                    cat.identity[cat.target[f]]:
                pairs.append((f, g))
    return tuple(pairs)


def check_complete(F: FinitePresheaf) -> bool:
    """Gauntness: projecting iso pairs to their source is a bijection."""
    cat = underlying_category(F)
    pairs = iota1(F)
    sources = [cat.source[f] for f, _ in pairs]
    return len(set(sources)) == len(sources) and \
        set(sources) == set(iota0(F))


# ---------------------------------------------------------------------------
# random presheaves (for the cross-validation suites)


def representable_presheaf(site: SiteTruncation, obj_idx: int,
                           tag=None) -> FinitePresheaf:
    """Maps into a fixed object; cached per site when untagged."""
    if site.mode != "full":
        raise SiteMismatch("representables need a full site")
    cache = getattr(site, "_representables", None)
    if cache is None:
        cache = {}
        site._representables = cache
    if obj_idx not in cache:
        values = tuple(tuple(site.hom.get((i, obj_idx), []))
                       for i in range(site.n_objects()))
        action = {}
        for m in site.morphisms:
            action[m.ident] = {
                h: site.compose_ids(h, m.ident)
                for h in site.hom.get((m.tgt, obj_idx), [])}
        cache[obj_idx] = FinitePresheaf(site, values, action)
    base = cache[obj_idx]
    if tag is None:
        return base
    values = tuple(tuple((tag, x) for x in vals) for vals in base.values)
    action = {m: {(tag, k): (tag, v) for k, v in table.items()}
              for m, table in base.action.items()}
    return FinitePresheaf(site, values, action)


def coproduct_presheaf(ps) -> FinitePresheaf:
    site = ps[0].site
    values = tuple(tuple(x for p in ps for x in p.values[i])
                   for i in range(site.n_objects()))
    action = {}
    for m in site.morphisms:
        table = {}
        for p in ps:
            table.update(p.action[m.ident])
        action[m.ident] = table
    return FinitePresheaf(site, values, action)


def coproduct_of_representables(site: SiteTruncation, obj_idxs
                                ) -> FinitePresheaf:
    """Tagged sum of cached representables, merged in one pass."""
    bases = [representable_presheaf(site, z) for z in obj_idxs]
    values = tuple(
        tuple((j, x) for j, p in enumerate(bases) for x in p.values[i])
        for i in range(site.n_objects()))
    action = {}
    for m in site.morphisms:
        table = {}
        for j, p in enumerate(bases):
            for k, v in p.action[m.ident].items():
                table[(j, k)] = (j, v)
        action[m.ident] = table
    return FinitePresheaf(site, values, action)


def quotient_presheaf(F: FinitePresheaf, seed_pairs) -> FinitePresheaf:
    """Quotient by the congruence generated by the given value pairs."""
    site = F.site
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            return True
        return False

    pending = [((i, a), (i, b)) for i, a, b in seed_pairs]
    for a, b in pending:
        union(a, b)
    changed = True
    while changed:
        changed = False
        for m in site.morphisms:
            groups = {}
            for x in F.values[m.tgt]:
                groups.setdefault(find((m.tgt, x)), []).append(x)
            for members in groups.values():
                first = members[0]
                for other in members[1:]:
                    if union((m.src, F.apply(m.ident, first)),
                             (m.src, F.apply(m.ident, other))):
                        changed = True
    reps = {}
    values = []
    for i in range(site.n_objects()):
        classes = {}
        for x in F.values[i]:
            classes.setdefault(find((i, x)), []).append(x)
        chosen = tuple(sorted((min(map(repr, v)), k) for k, v in
                              classes.items()))
        mapping = {}
        vals = []
        for tag, k in chosen:
            token = ("q", i, tag)
            vals.append(token)
            for x in classes[k]:
                mapping[x] = token
        reps[i] = mapping
        values.append(tuple(vals))
    action = {}
    for m in site.morphisms:
        action[m.ident] = {
            reps[m.tgt][x]: reps[m.src][F.apply(m.ident, x)]
            for x in F.values[m.tgt]}
    return FinitePresheaf(site, tuple(values), action)


def _representable_pool(site: SiteTruncation, budget: int = 60000) -> list:
    """Objects whose representable action tables stay affordable."""
    pool = getattr(site, "_rep_pool", None)
    if pool is not None:
        return pool
    in_mass = {}
    for m in site.morphisms:
        in_mass[m.tgt] = in_mass.get(m.tgt, 0) + 1
    pool = []
    for z in range(site.n_objects()):
        cost = sum(in_mass.get(b, 0) * len(site.hom.get((b, z), []))
                   for b in range(site.n_objects()))
        if cost <= budget:
            pool.append(z)
    site._rep_pool = pool
    return pool


def random_presheaf(site: SiteTruncation, rng) -> FinitePresheaf:
    """Seeded functorial presheaf: a quotient of a sum of representables."""
    pool = _representable_pool(site)
    k = rng.randint(1, 3)
    F = coproduct_of_representables(
        site, [pool[rng.randrange(len(pool))] for _ in range(k)])
    pairs = []
    for _ in range(rng.randint(0, 3)):
        i = rng.randrange(site.n_objects())
        vals = F.values[i]
        if len(vals) >= 2:
            a, b = rng.sample(range(len(vals)), 2)
            pairs.append((i, vals[a], vals[b]))
    if pairs:
        F = quotient_presheaf(F, pairs)
    return F


# ---------------------------------------------------------------------------
# serialization (schema presheaf.v1)


def _value_to_json(x):
    if isinstance(x, tuple):
        return ["t"] + [_value_to_json(v) for v in x]
    return ["s", x]


def _value_from_json(x):
    if x[0] == "t":
        return tuple(_value_from_json(v) for v in x[1:])
    return x[1]


def presheaf_to_dict(F: FinitePresheaf) -> dict:
    site = F.site
    return {
        "site": {"kind": site.kind, "mode": site.mode,
                 "bounds": site.bounds,
                 "palette": list(site.palette) if site.palette else None},
        "values": [[_value_to_json(x) for x in vals] for vals in F.values],
        "action": [
            {"morphism": m.ident,
             "table": [[_value_to_json(k), _value_to_json(v)]
                       for k, v in sorted(F.action[m.ident].items(),
                                          key=lambda kv: repr(kv[0]))]}
            for m in site.morphisms],
    }


def rebuild_site(spec: dict) -> SiteTruncation:
    kind, mode, bounds = spec["kind"], spec["mode"], spec["bounds"]
    if kind in ("omega", "omega_colored"):
        return build_omega_site(bounds["max_vertices"], bounds["max_arity"],
                                mode=mode, palette=spec.get("palette"))
    if kind in ("delta_f", "delta_f1"):
        return build_forest_site(bounds["max_length"],
                                 bounds["max_level_size"],
                                 bounds.get("max_edges"), mode=mode,
                                 tree_objects_only=(kind == "delta_f1"),
                                 max_tree_vertices=bounds.get(
                                     "max_tree_vertices"))
    if kind == "delta_f_x":
        base = build_forest_site(bounds["max_length"],
                                 bounds["max_level_size"],
                                 bounds.get("max_edges"), mode="cover")
        return build_colored_forest_site(base, spec["palette"])
    raise SerializationError("unknown site kind", kind=kind)


def presheaf_from_dict(d: dict) -> FinitePresheaf:
    try:
        site = rebuild_site(d["site"])
        values = tuple(tuple(_value_from_json(x) for x in vals)
                       for vals in d["values"])
        action = {}
        for row in d["action"]:
            action[row["morphism"]] = {
                _value_from_json(k): _value_from_json(v)
                for k, v in row["table"]}
        return FinitePresheaf(site, values, action)
    except KeyError as exc:
        raise SerializationError("missing presheaf.v1 field", field=str(exc))


def presheaf_to_json(F: FinitePresheaf, indent=None) -> str:
    return json.dumps(presheaf_to_dict(F), indent=indent, sort_keys=True)


def presheaf_from_json(text: str) -> FinitePresheaf:
    return presheaf_from_dict(json.loads(text))
