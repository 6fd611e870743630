"""Finite rooted non-planar trees in the polynomial encoding.

A tree is a diagram of finite sets  E <- P -> V -> E  where E indexes edges,
V vertices, and P the (vertex, incoming edge) pairs.  We store, per vertex,
its outgoing edge and the list of incoming edges; the constraints are:

  * no edge is an incoming edge of two vertices (first projection injective),
  * distinct vertices have distinct outgoing edges,
  * exactly one edge (the root) is an incoming edge of no vertex,
  * walking from any edge toward the root terminates.

Edges point away from the root: the vertex *above* an edge is the one whose
outgoing edge it is, the vertex *below* it is the one it feeds into.
Incoming-edge lists are ordered for storage only; all comparisons treat them
as multisets (trees are non-planar).
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    ArityMismatch,
    NonInjectiveS,
    NonInjectiveT,
    RootCountNotOne,
    SerializationError,
    SuccessorDiverges,
)
from . import work


def _cached_hash(obj, fields):
    try:
        return object.__getattribute__(obj, "_hash")
    except AttributeError:
        h = hash(fields)
        object.__setattr__(obj, "_hash", h)
        return h


@dataclass(frozen=True)
class Tree:
    n_edges: int
    root: int
    out_edges: tuple  # per vertex, its outgoing edge
    in_edges: tuple   # per vertex, tuple of incoming edges

    def __hash__(self):
        return _cached_hash(self, (self.n_edges, self.root, self.out_edges,
                                   self.in_edges))

    @property
    def n_vertices(self) -> int:
        return len(self.out_edges)

    def edges(self) -> range:
        return range(self.n_edges)

    def vertices(self) -> range:
        return range(self.n_vertices)

    def arity(self, v: int) -> int:
        return len(self.in_edges[v])

    def vertex_above(self, e: int):
        """Vertex whose outgoing edge is e, or None (then e is a leaf)."""
        return _above_map(self).get(e)

    def vertex_below(self, e: int):
        """Vertex having e among its incoming edges, or None (then e is the root)."""
        return _below_map(self).get(e)

    def successor(self, e: int) -> int:
        v = self.vertex_below(e)
        return self.root if v is None else self.out_edges[v]

    def leaves(self) -> tuple:
        return leaves(self)

    def __repr__(self):
        return (f"Tree(n_edges={self.n_edges}, root={self.root}, "
                f"out={list(self.out_edges)}, in={[list(i) for i in self.in_edges]})")


@dataclass(frozen=True)
class ColoredTree:
    """A tree with a total edge coloring."""

    tree: Tree
    colors: tuple  # per edge, a hashable color

    def __hash__(self):
        return _cached_hash(self, (self.tree, self.colors))

    def __post_init__(self):
        if len(self.colors) != self.tree.n_edges:
            raise ValueError("coloring must be total on edges")

    @property
    def n_edges(self):
        return self.tree.n_edges


@functools.lru_cache(maxsize=None)
def _above_map(tree: Tree) -> dict:
    return {e: v for v, e in enumerate(tree.out_edges)}


@functools.lru_cache(maxsize=None)
def _below_map(tree: Tree) -> dict:
    m = {}
    for v, ins in enumerate(tree.in_edges):
        for e in ins:
            m[e] = v
    return m


def validate_tree(n_edges: int, root: int, vertices: Sequence) -> Tree:
    """Check the four tree conditions on raw incidence data.

    ``vertices`` is a sequence of (out_edge, incoming_edges) pairs.  Returns
    the validated Tree or raises the error naming the first violated
    invariant.
    """
    outs = tuple(int(o) for o, _ in vertices)
    ins = tuple(tuple(int(e) for e in i) for _, i in vertices)
    for e in outs + tuple(x for i in ins for x in i) + (root,):
        if not (0 <= e < n_edges):
            raise RootCountNotOne("edge index out of range", edge=e)
    if len(set(outs)) != len(outs):
        seen: dict = {}
        for v, e in enumerate(outs):
            if e in seen:
                raise NonInjectiveT("two vertices share an outgoing edge",
                                    edge=e, vertices=(seen[e], v))
            seen[e] = v
    incoming = [e for i in ins for e in i]
    if len(set(incoming)) != len(incoming):
        seen = {}
        for v, i in enumerate(ins):
            for e in i:
                if e in seen:
                    raise NonInjectiveS("edge is incoming twice", edge=e)
                seen[e] = v
    non_incoming = set(range(n_edges)) - set(incoming)
    if len(non_incoming) != 1:
        raise RootCountNotOne("root must be the unique non-incoming edge",
                              candidates=sorted(non_incoming))
    (true_root,) = non_incoming
    if true_root != root:
        raise RootCountNotOne("declared root is an incoming edge",
                              declared=root, actual=true_root)
    tree = Tree(n_edges, root, outs, ins)
    for e in range(n_edges):
        cur, steps = e, 0
        while cur != root:
            cur = tree.successor(cur)
            steps += 1
            if steps > n_edges:
                raise SuccessorDiverges("successor walk does not reach the root",
                                        edge=e)
    return tree


def make_edge() -> Tree:
    """The trivial tree: one edge, no vertices."""
    return Tree(1, 0, (), ())


def make_corolla(n: int) -> Tree:
    """One vertex of arity n; root edge 0, leaves 1..n."""
    if n < 0:
        raise ArityMismatch("corolla arity must be >= 0", arity=n)
    return Tree(n + 1, 0, (0,), (tuple(range(1, n + 1)),))


def linear_tree(n: int) -> Tree:
    """A chain of n unary vertices; n+1 edges, root 0."""
    return Tree(n + 1, 0, tuple(range(n)), tuple((i + 1,) for i in range(n)))


def leaves(tree: Tree) -> tuple:
    """Edges that are no vertex's outgoing edge."""
    above = _above_map(tree)
    return tuple(e for e in tree.edges() if e not in above)


def inner_edges(tree: Tree) -> tuple:
    """Edges in the image of the outgoing-edge map, other than the root."""
    above = _above_map(tree)
    return tuple(e for e in tree.edges() if e in above and e != tree.root)


# ---------------------------------------------------------------------------
# canonical descriptors and isomorphism


def _edge_key(tree: Tree, e: int, colors) -> str:
    tok = "" if colors is None else repr(colors[e])
    v = tree.vertex_above(e)
    if v is None:
        return f"l<{tok}>"
    childs = sorted(_edge_key(tree, c, colors) for c in tree.in_edges[v])
    return f"v<{tok}>({','.join(childs)})"


def canonical_descriptor(t) -> str:
    """Total-order-comparable key, equal iff trees are isomorphic.

    Accepts a Tree or a ColoredTree; colors are folded into the edge tokens.
    """
    if isinstance(t, ColoredTree):
        return _edge_key(t.tree, t.tree.root, t.colors)
    return _edge_key(t, t.root, None)


def is_isomorphic(a, b):
    """Backtracking isomorphism search, independent of descriptors.

    Returns (edge_map, vertex_map) from a to b, or None.  Colors must match
    when ColoredTrees are given.
    """
    ca = a.colors if isinstance(a, ColoredTree) else None
    cb = b.colors if isinstance(b, ColoredTree) else None
    ta = a.tree if isinstance(a, ColoredTree) else a
    tb = b.tree if isinstance(b, ColoredTree) else b
    if (ca is None) != (cb is None):
        raise ValueError("cannot compare colored with uncolored tree")
    if ta.n_edges != tb.n_edges or ta.n_vertices != tb.n_vertices:
        return None
    emap: dict = {}
    vmap: dict = {}

    def match_edge(e1, e2):
        if ca is not None and ca[e1] != cb[e2]:
            return False
        v1, v2 = ta.vertex_above(e1), tb.vertex_above(e2)
        if (v1 is None) != (v2 is None):
            return False
        emap[e1] = e2
        if v1 is None:
            return True
        if ta.arity(v1) != tb.arity(v2):
            del emap[e1]
            return False
        vmap[v1] = v2
        ins1, ins2 = ta.in_edges[v1], tb.in_edges[v2]
        if match_children(ins1, list(ins2), 0):
            return True
        del vmap[v1]
        del emap[e1]
        return False

    def match_children(ins1, remaining, k):
        if k == len(ins1):
            return True
        for idx, cand in enumerate(remaining):
            work.tick()
            if match_edge(ins1[k], cand):
                rest = remaining[:idx] + remaining[idx + 1:]
                if match_children(ins1, rest, k + 1):
                    return True
                # undo the whole subtree match below ins1[k]
                _unmatch(ins1[k])
        return False

    def _unmatch(e1):
        stack = [e1]
        while stack:
            e = stack.pop()
            emap.pop(e, None)
            v = ta.vertex_above(e)
            if v is not None and v in vmap:
                del vmap[v]
                stack.extend(ta.in_edges[v])

    if match_edge(ta.root, tb.root):
        return dict(emap), dict(vmap)
    return None


# ---------------------------------------------------------------------------
# enumeration

def _color_list(colors):
    if colors is None:
        return None
    return sorted(colors, key=repr)


@functools.lru_cache(maxsize=None)
def _shapes(max_vertices: int, max_arity: int, palette) -> tuple:
    """All shapes with <= max_vertices vertices, as nested structures.

    A shape is ('leaf', color) or ('v', color, children tuple); children are
    in canonical (sorted) order.  ``palette`` is a tuple of colors or None.
    Returned sorted by (vertex count, repr) for determinism.
    """
    colors = palette if palette is not None else (None,)
    shapes = [("leaf", c) for c in colors]
    if max_vertices >= 1:
        by_budget = {0: tuple(shapes)}
        for budget in range(1, max_vertices + 1):
            cur = list(by_budget[budget - 1])
            smaller = _shapes(budget - 1, max_arity, palette)
            for k in range(0, max_arity + 1):
                for combo in _combos(smaller, k, budget - 1):
                    for c in colors:
                        work.tick()
                        cur.append(("v", c, combo))
            # dedupe (combos are canonical, so duplicates only via re-adding)
            by_budget[budget] = tuple(dict.fromkeys(cur))
        shapes = list(by_budget[max_vertices])
    return tuple(sorted(set(shapes), key=lambda s: (_shape_vertices(s), repr(s))))


def _shape_vertices(shape) -> int:
    if shape[0] == "leaf":
        return 0
    return 1 + sum(_shape_vertices(c) for c in shape[2])


def _combos(shapes: tuple, k: int, budget: int):
    """Non-decreasing k-tuples of shapes with total vertex count <= budget."""
    def rec(start, k_left, budget_left):
        if k_left == 0:
            yield ()
            return
        for i in range(start, len(shapes)):
            nv = _shape_vertices(shapes[i])
            if nv > budget_left:
                continue
            for rest in rec(i, k_left - 1, budget_left - nv):
                yield (shapes[i],) + rest
    return rec(0, k, budget)


def _build_from_shape(shape):
    """Materialize a shape as a (Tree, colors or None) with DFS numbering."""
    outs, ins, cols = [], [], []

    def build(sh):
        e = len(cols)
        cols.append(sh[1])
        if sh[0] == "v":
            v = len(outs)
            outs.append(e)
            ins.append(None)
            ins[v] = tuple(build(c) for c in sh[2])
        return e

    build(shape)
    tree = Tree(len(cols), 0, tuple(outs), tuple(ins))
    colors = None if cols and cols[0] is None else tuple(cols)
    return tree, colors


def enumerate_trees(max_vertices: int, max_arity: int, colors=None) -> list:
    """One canonical representative per isomorphism class within bounds.

    Returns Trees, or ColoredTrees when a color set is given; deterministic
    order by descriptor.
    """
    if max_vertices < 0 or max_arity < 0:
        raise ValueError("bounds must be >= 0")
    palette = None if colors is None else tuple(_color_list(colors))
    out = []
    seen = set()
    for shape in _shapes(max_vertices, max_arity, palette):
        tree, cols = _build_from_shape(shape)
        t = tree if cols is None else ColoredTree(tree, cols)
        d = canonical_descriptor(t)
        if d in seen:
            continue
        seen.add(d)
        out.append((d, t))
    out.sort(key=lambda p: p[0])
    return [t for _, t in out]


# ---------------------------------------------------------------------------
# serialization (schema tree.v1) and DOT

def to_json(t, indent=None) -> str:
    return json.dumps(to_dict(t), indent=indent, sort_keys=True)


def to_dict(t) -> dict:
    colors = None
    tree = t
    if isinstance(t, ColoredTree):
        tree, colors = t.tree, t.colors
    d = {
        "edges": tree.n_edges,
        "root": tree.root,
        "vertices": [
            {"out": tree.out_edges[v], "in": list(tree.in_edges[v])}
            for v in tree.vertices()
        ],
    }
    if colors is not None:
        d["colors"] = list(colors)
    return d


def from_dict(d: dict):
    try:
        tree = validate_tree(
            d["edges"], d["root"], [(v["out"], v["in"]) for v in d["vertices"]],
        )
    except KeyError as exc:
        raise SerializationError("missing tree.v1 field", field=str(exc))
    if "colors" in d and d["colors"] is not None:
        return ColoredTree(tree, tuple(d["colors"]))
    return tree


def from_json(text: str):
    return from_dict(json.loads(text))


def to_dot(t, name="tree") -> str:
    colors = None
    tree = t
    if isinstance(t, ColoredTree):
        tree, colors = t.tree, t.colors
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for v in tree.vertices():
        lines.append(f'  v{v} [shape=circle, label="{v}"];')
    lines.append('  root_anchor [shape=point, label=""];')
    stubs = []
    for e in tree.edges():
        above = tree.vertex_above(e)
        below = tree.vertex_below(e)
        label = f"e{e}" if colors is None else f"e{e}:{colors[e]}"
        src = f"v{above}" if above is not None else f"leaf{e}"
        dst = f"v{below}" if below is not None else "root_anchor"
        if above is None:
            stubs.append(f'  leaf{e} [shape=point, label=""];')
        lines.append(f'  {src} -> {dst} [label="{label}"];')
    lines.extend(stubs)
    lines.append("}")
    return "\n".join(lines)
