"""The dendroidal category: subtrees, the free monad, morphisms, grafting.

Morphisms T -> S are stored in Kleisli form: an edge map f0 together with a
map f1 sending each vertex of T to a subtree of S.  The polynomial-diagram
conditions reduce to, per vertex v:

  * f0 takes the outgoing edge of v to the root of f1(v),
  * f0 restricts to a bijection from the incoming edges of v onto the
    leaves of f1(v)   (this is the Cartesian middle square),

plus pairwise disjointness of the vertex sets of the f1(v).  The second
structural map into the marked subtrees is determined by these and is not
stored.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass

from . import work
from .errors import (
    ArityMismatch,
    MiddleSquareNotCartesian,
    OverlappingVertexImages,
    SerializationError,
    SourceTargetMismatch,
    SquareNotCommuting,
)
from .trees import ColoredTree, Tree, leaves, validate_tree
from .trees import from_dict as tree_from_dict
from .trees import to_dict as tree_to_dict
from .pointed import PointedMap


from .trees import _cached_hash


@dataclass(frozen=True)
class Subtree:
    """A subtree of a fixed ambient tree, identified by its image."""

    edges: frozenset
    vertices: frozenset
    root: int

    def __hash__(self):
        return _cached_hash(self, (self.edges, self.vertices, self.root))

    def is_corolla(self) -> bool:
        return len(self.vertices) == 1

    def is_edge(self) -> bool:
        return not self.vertices


def eta_subtree(e: int) -> Subtree:
    return Subtree(frozenset((e,)), frozenset(), e)


def corolla_subtree(tree: Tree, v: int) -> Subtree:
    edges = frozenset(tree.in_edges[v]) | {tree.out_edges[v]}
    return Subtree(edges, frozenset((v,)), tree.out_edges[v])


def full_subtree(tree: Tree) -> Subtree:
    return Subtree(frozenset(tree.edges()), frozenset(tree.vertices()), tree.root)


def subtree_ok(tree: Tree, st: Subtree) -> bool:
    if st.root not in st.edges:
        return False
    for v in st.vertices:
        if not (0 <= v < tree.n_vertices):
            return False
        if tree.out_edges[v] not in st.edges:
            return False
        if not set(tree.in_edges[v]) <= st.edges:
            return False
    for e in st.edges:
        if e == st.root:
            continue
        if tree.vertex_below(e) not in st.vertices:
            return False
    return True


def subtree_leaves(tree: Tree, st: Subtree) -> tuple:
    """Edges of the subtree that are not outgoing edges of its vertices."""
    outs = {tree.out_edges[v] for v in st.vertices}
    return tuple(sorted(st.edges - outs))


@functools.lru_cache(maxsize=None)
def subtrees(tree: Tree) -> tuple:
    """All subtrees, deduplicated by image, in a deterministic order."""

    @functools.lru_cache(maxsize=None)
    def grown(e):
        out = [(frozenset((e,)), frozenset())]
        v = tree.vertex_above(e)
        if v is not None:
            per_child = [grown(c) for c in tree.in_edges[v]]
            for combo in itertools.product(*per_child):
                work.tick()
                es = frozenset((e,)).union(*(c[0] for c in combo)) if combo \
                    else frozenset((e,))
                vs = frozenset((v,)).union(*(c[1] for c in combo)) if combo \
                    else frozenset((v,))
                out.append((es, vs))
        return tuple(out)

    all_subs = []
    for e in tree.edges():
        for es, vs in grown(e):
            all_subs.append(Subtree(es, vs, e))
    all_subs.sort(key=lambda s: (s.root, sorted(s.edges)))
    return tuple(all_subs)


def marked_subtrees(tree: Tree) -> tuple:
    """Pairs (subtree, marked leaf edge)."""
    out = []
    for st in subtrees(tree):
        for leaf in subtree_leaves(tree, st):
            out.append((st, leaf))
    return tuple(out)


@dataclass(frozen=True)
class FreeMonadTree:
    """The free-monad polynomial diagram built on a tree.

    Structure maps: marked_edge and projection out of the marked subtrees,
    root_edge out of the subtrees.
    """

    base: Tree
    subtrees: tuple
    marked: tuple  # (subtree index, leaf edge) pairs

    def marked_edge(self, i: int) -> int:
        return self.marked[i][1]

    def projection(self, i: int) -> int:
        return self.marked[i][0]

    def root_edge(self, i: int) -> int:
        return self.subtrees[i].root


def free_monad(tree: Tree) -> FreeMonadTree:
    subs = subtrees(tree)
    index = {s: i for i, s in enumerate(subs)}
    marked = tuple(
        (index[st], leaf) for st, leaf in marked_subtrees(tree)
    )
    return FreeMonadTree(tree, subs, marked)


def subtree_from_edges(tree: Tree, edges) -> Subtree:
    """Reconstruct the subtree with the given edge image, validating it."""
    es = frozenset(edges)
    if not es:
        raise SerializationError("subtree edge set is empty")

    def depth(e):
        d, cur = 0, e
        while cur != tree.root:
            cur = tree.successor(cur)
            d += 1
        return d

    root = min(es, key=lambda e: (depth(e), e))
    vs = frozenset(tree.vertex_below(e) for e in es if e != root)
    st = Subtree(es, vs, root)
    if None in vs or not subtree_ok(tree, st):
        raise SerializationError("edge set is not a subtree", edges=sorted(es))
    return st


def extract(tree: Tree, st: Subtree):
    """Realize a subtree as a tree of its own.

    Returns (tree, edge_map, vertex_map) where the maps send subtree indices
    to ambient indices (the embedding direction).
    """
    sub_edges = sorted(st.edges)
    sub_vertices = sorted(st.vertices)
    e_new = {e: i for i, e in enumerate(sub_edges)}
    out = tuple(e_new[tree.out_edges[v]] for v in sub_vertices)
    ins = tuple(tuple(e_new[e] for e in tree.in_edges[v]) for v in sub_vertices)
    small = Tree(len(sub_edges), e_new[st.root], out, ins)
    return small, tuple(sub_edges), tuple(sub_vertices)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class OmegaMorphism:
    source: Tree
    target: Tree
    f0: tuple       # per source edge, a target edge
    f1: tuple       # per source vertex, a Subtree of the target

    def __hash__(self):
        return _cached_hash(self, (self.source, self.target, self.f0,
                                   self.f1))

    def __repr__(self):
        return (f"OmegaMorphism({self.source.n_edges}e/{self.source.n_vertices}v"
                f" -> {self.target.n_edges}e/{self.target.n_vertices}v, "
                f"f0={list(self.f0)})")


def validate_morphism(source: Tree, target: Tree, f0, f1) -> OmegaMorphism:
    f0 = tuple(int(e) for e in f0)
    f1 = tuple(f1)
    if len(f0) != source.n_edges or len(f1) != source.n_vertices:
        raise SourceTargetMismatch("map data does not match the source tree",
                                   f0=len(f0), f1=len(f1))
    for e in f0:
        if not (0 <= e < target.n_edges):
            raise SourceTargetMismatch("edge image out of range", edge=e)
    for v, st in enumerate(f1):
        if not subtree_ok(target, st):
            raise SourceTargetMismatch("f1 value is not a subtree", vertex=v)
        if f0[source.out_edges[v]] != st.root:
            raise SquareNotCommuting(
                "outgoing edge does not map to the subtree root",
                vertex=v, edge_image=f0[source.out_edges[v]], subtree_root=st.root)
        lv = subtree_leaves(target, st)
        images = [f0[e] for e in source.in_edges[v]]
        if len(set(images)) != len(images) or set(images) != set(lv):
            raise MiddleSquareNotCartesian(
                "incoming edges do not biject onto subtree leaves",
                vertex=v, incoming=len(images), leaves=len(lv))
    claimed = set()
    for v, st in enumerate(f1):
        if claimed & st.vertices:
            raise OverlappingVertexImages(
                "two vertices map to subtrees with a common vertex",
                vertex=v, shared=sorted(claimed & st.vertices))
        claimed |= st.vertices
    return OmegaMorphism(source, target, f0, f1)


def identity(tree: Tree) -> OmegaMorphism:
    return OmegaMorphism(
        tree, tree, tuple(tree.edges()),
        tuple(corolla_subtree(tree, v) for v in tree.vertices()))


def _push_subtree(g: OmegaMorphism, st: Subtree) -> Subtree:
    """Image of a subtree of g's source under g, as a subtree of g's target."""
    edges = {g.f0[e] for e in st.edges}
    vertices = set()
    for w in st.vertices:
        edges |= g.f1[w].edges
        vertices |= g.f1[w].vertices
    return Subtree(frozenset(edges), frozenset(vertices), g.f0[st.root])


def compose(g: OmegaMorphism, f: OmegaMorphism) -> OmegaMorphism:
    """g after f, by substituting f's vertex subtrees through g."""
    if f.target != g.source:
        raise SourceTargetMismatch("codomain of f must be the domain of g")
    h0 = tuple(g.f0[e] for e in f.f0)
    h1 = tuple(_push_subtree(g, st) for st in f.f1)
    return validate_morphism(f.source, g.target, h0, h1)


def is_inert(f: OmegaMorphism) -> bool:
    """Embeddings: every vertex lands on a corolla and edges map injectively."""
    if len(set(f.f0)) != len(f.f0):
        return False
    return all(st.is_corolla() for st in f.f1)


def is_active(f: OmegaMorphism) -> bool:
    """Leaves map bijectively onto leaves and the root to the root."""
    if f.f0 and f.f0[f.source.root] != f.target.root:
        return False
    src = [f.f0[e] for e in leaves(f.source)]
    return len(set(src)) == len(src) and set(src) == set(leaves(f.target))


def is_isomorphism(f: OmegaMorphism) -> bool:
    return is_inert(f) and is_active(f)


def image_subtree(f: OmegaMorphism) -> Subtree:
    edges = set(f.f0)
    vertices = set()
    for st in f.f1:
        edges |= st.edges
        vertices |= st.vertices
    return Subtree(frozenset(edges), frozenset(vertices), f.f0[f.source.root])


def embedding_of(target: Tree, st: Subtree) -> OmegaMorphism:
    """The inert morphism realizing a subtree."""
    small, e_emb, v_emb = extract(target, st)
    f0 = e_emb
    f1 = tuple(corolla_subtree(target, v) for v in v_emb)
    return validate_morphism(small, target, f0, f1)


def factorize(f: OmegaMorphism):
    """Active-then-inert factorization through the image subtree.

    Returns (active, inert) with compose(inert, active) == f.
    """
    m = image_subtree(f)
    inert = embedding_of(f.target, m)
    small = inert.source
    e_back = {amb: i for i, amb in enumerate(inert.f0)}
    v_back = {}
    for i, st in enumerate(inert.f1):
        (amb,) = st.vertices
        v_back[amb] = i
    a0 = tuple(e_back[e] for e in f.f0)
    a1 = tuple(
        Subtree(frozenset(e_back[e] for e in st.edges),
                frozenset(v_back[w] for w in st.vertices),
                e_back[st.root])
        for st in f.f1)
    active = validate_morphism(f.source, small, a0, a1)
    return active, inert


# ---------------------------------------------------------------------------
# grafting (corolla substitution pushout)


@dataclass(frozen=True)
class Graft:
    """Pushout of an inert corolla and an active map out of it.

    ``from_host`` replaces the substituted vertex by the image of the guest;
    ``from_guest`` is the inert leg.
    """

    tree: Tree
    from_host: OmegaMorphism
    from_guest: OmegaMorphism


def graft(host: Tree, v: int, guest: Tree, boundary=None) -> Graft:
    """Substitute ``guest`` for the corolla at vertex ``v`` of ``host``.

    ``boundary`` lists, per incoming edge of v (in stored order), the guest
    leaf glued to it; by default the guest leaves in sorted order.  The guest
    must have exactly arity(v) leaves.
    """
    guest_leaves = leaves(guest)
    ins = host.in_edges[v]
    if boundary is None:
        boundary = tuple(sorted(guest_leaves))
    boundary = tuple(boundary)
    if len(boundary) != len(ins) or set(boundary) != set(guest_leaves):
        raise ArityMismatch("boundary must biject incoming edges with guest leaves",
                            arity=len(ins), leaves=len(guest_leaves))

    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    union(("g", guest.root), ("h", host.out_edges[v]))
    for i, e in enumerate(ins):
        union(("g", boundary[i]), ("h", e))

    order = [("h", e) for e in host.edges()] + [("g", e) for e in guest.edges()]
    cls: dict = {}
    for tok in order:
        rep = find(tok)
        if rep not in cls:
            cls[rep] = len(cls)
    idx = lambda tok: cls[find(tok)]

    outs, in_lists = [], []
    host_vmap, guest_vmap = {}, {}
    for w in host.vertices():
        if w == v:
            continue
        host_vmap[w] = len(outs)
        outs.append(idx(("h", host.out_edges[w])))
        in_lists.append(tuple(idx(("h", e)) for e in host.in_edges[w]))
    for u in guest.vertices():
        guest_vmap[u] = len(outs)
        outs.append(idx(("g", guest.out_edges[u])))
        in_lists.append(tuple(idx(("g", e)) for e in guest.in_edges[u]))
    result = validate_tree(len(cls), idx(("h", host.root)),
                           list(zip(outs, in_lists)))

    guest_image = Subtree(
        frozenset(idx(("g", e)) for e in guest.edges()),
        frozenset(guest_vmap.values()),
        idx(("g", guest.root)))

    h0 = tuple(idx(("h", e)) for e in host.edges())
    h1 = []
    for w in host.vertices():
        if w == v:
            h1.append(guest_image)
        else:
            h1.append(corolla_subtree(result, host_vmap[w]))
    from_host = validate_morphism(host, result, h0, tuple(h1))

    g0 = tuple(idx(("g", e)) for e in guest.edges())
    g1 = tuple(corolla_subtree(result, guest_vmap[u]) for u in guest.vertices())
    from_guest = validate_morphism(guest, result, g0, g1)
    return Graft(result, from_host, from_guest)


def leaf_graft(lower: Tree, leaf: int, upper: Tree) -> Tree:
    """Glue the root of ``upper`` onto a leaf of ``lower`` (free-operad glueing)."""
    if lower.vertex_above(leaf) is not None:
        raise ArityMismatch("gluing point must be a leaf", edge=leaf)
    shift = lower.n_edges

    def up(e):
        return leaf if e == upper.root else (shift + e - (1 if e > upper.root else 0))

    outs = list(lower.out_edges) + [up(e) for e in upper.out_edges]
    ins = [tuple(i) for i in lower.in_edges] + \
          [tuple(up(e) for e in i) for i in upper.in_edges]
    return validate_tree(shift + upper.n_edges - 1, lower.root,
                         list(zip(outs, ins)))


# ---------------------------------------------------------------------------
# corolla functor and morphism enumeration


def cor_omega(tree: Tree) -> int:
    """Size of the pointed set of vertices."""
    return tree.n_vertices


def cor_omega_morphism(f: OmegaMorphism) -> PointedMap:
    """Contravariant: sends a target vertex to the source vertex owning it."""
    owner = {}
    for v, st in enumerate(f.f1):
        for x in st.vertices:
            owner[x] = v
    return PointedMap(
        f.target.n_vertices, f.source.n_vertices,
        tuple(owner.get(x) for x in f.target.vertices()))


def _vertex_order(tree: Tree) -> list:
    """Vertices ordered so each one's outgoing edge is seen before its inputs."""
    order = []
    top = tree.vertex_above(tree.root)
    queue = [top] if top is not None else []
    while queue:
        v = queue.pop(0)
        order.append(v)
        for e in tree.in_edges[v]:
            w = tree.vertex_above(e)
            if w is not None:
                queue.append(w)
    return order


def enumerate_morphisms(source: Tree, target: Tree) -> list:
    """Complete duplicate-free list of morphisms source -> target."""
    return list(_enumerate_morphisms_cached(source, target))


@functools.lru_cache(maxsize=None)
def _enumerate_morphisms_cached(source: Tree, target: Tree) -> tuple:
    if source.n_vertices == 0:
        return tuple(OmegaMorphism(source, target, (e,), ())
                     for e in target.edges())
    subs = subtrees(target)
    by_leafcount: dict = {}
    for st in subs:
        by_leafcount.setdefault(len(subtree_leaves(target, st)), []).append(st)

    order = _vertex_order(source)
    found = []
    f0: dict = {}
    f1: dict = {}
    used_vertices: set = set()

    def assign(k):
        if k == len(order):
            full_f0 = tuple(f0[e] for e in source.edges())
            full_f1 = tuple(f1[v] for v in source.vertices())
            found.append(OmegaMorphism(source, target, full_f0, full_f1))
            return
        v = order[k]
        e_out = source.out_edges[v]
        pinned = f0.get(e_out)
        for st in by_leafcount.get(source.arity(v), ()):
            work.tick()
            if pinned is not None and st.root != pinned:
                continue
            if st.vertices & used_vertices:
                continue
            lv = subtree_leaves(target, st)
            used_vertices.update(st.vertices)
            f1[v] = st
            if pinned is None:
                f0[e_out] = st.root
            for perm in itertools.permutations(lv):
                for e, img in zip(source.in_edges[v], perm):
                    f0[e] = img
                assign(k + 1)
                for e in source.in_edges[v]:
                    del f0[e]
            if pinned is None:
                del f0[e_out]
            del f1[v]
            used_vertices.difference_update(st.vertices)

    assign(0)
    return tuple(found)


def respects_colors(f: OmegaMorphism, source_colors, target_colors) -> bool:
    return all(source_colors[e] == target_colors[f.f0[e]]
               for e in f.source.edges())


def enumerate_colored_morphisms(source: ColoredTree, target: ColoredTree) -> list:
    return [f for f in enumerate_morphisms(source.tree, target.tree)
            if respects_colors(f, source.colors, target.colors)]


def automorphisms(tree: Tree) -> list:
    return [f for f in enumerate_morphisms(tree, tree) if is_isomorphism(f)]


# ---------------------------------------------------------------------------
# serialization (schema omega_morphism.v1)


def morphism_to_dict(f: OmegaMorphism) -> dict:
    return {
        "source": tree_to_dict(f.source),
        "target": tree_to_dict(f.target),
        "f0": list(f.f0),
        "f1": [sorted(st.edges) for st in f.f1],
    }


def morphism_from_dict(d: dict) -> OmegaMorphism:
    try:
        source = tree_from_dict(d["source"])
        target = tree_from_dict(d["target"])
        f1 = tuple(subtree_from_edges(target, es) for es in d["f1"])
        return validate_morphism(source, target, tuple(d["f0"]), f1)
    except KeyError as exc:
        raise SerializationError("missing omega_morphism.v1 field", field=str(exc))


def morphism_to_json(f: OmegaMorphism, indent=None) -> str:
    return json.dumps(morphism_to_dict(f), indent=indent, sort_keys=True)


def morphism_from_json(text: str) -> OmegaMorphism:
    return morphism_from_dict(json.loads(text))
