"""The category of level forests.

An object is a chain of finite-set maps f(0) -> f(1) -> ... -> f(m); edges
are the disjoint union of all levels, vertices the levels above 0.  A
morphism ([n],g) -> ([m],f) is a monotone map alpha together with per-level
injections whose squares over every pair of levels are pullbacks.

Inert morphisms lie over subinterval inclusions; active ones preserve the
boundary and have bijective level components.  Factorization is computed by
lifting the underlying monotone factorization: the intermediate object is
the iterated preimage of the top-level image.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass

from . import work
from .errors import (
    IndexOutOfRange,
    LabelMismatch,
    MapNotTotal,
    NaturalityFails,
    NotATree,
    NotInjective,
    PullbackFails,
    SerializationError,
    SourceTargetMismatch,
)
from .omega import OmegaMorphism, Subtree, compose as compose_omega
from .omega import corolla_subtree, validate_morphism as validate_omega
from .pointed import PointedMap
from .trees import Tree


from .trees import _cached_hash


@dataclass(frozen=True)
class Forest:
    levels: tuple  # sizes |f(0)|, ..., |f(m)|
    maps: tuple    # maps[i][x] = image of x in level i+1

    def __hash__(self):
        return _cached_hash(self, (self.levels, self.maps))

    @property
    def length(self) -> int:
        return len(self.levels) - 1

    @property
    def n_edges(self) -> int:
        return sum(self.levels)

    @property
    def n_vertices(self) -> int:
        return sum(self.levels[1:])

    def edges(self):
        """Edges as (level, position) pairs, level-major."""
        return [(i, x) for i in range(self.length + 1)
                for x in range(self.levels[i])]

    def vertices(self):
        return [(i, x) for i in range(1, self.length + 1)
                for x in range(self.levels[i])]

    def edge_index(self, i, x) -> int:
        return sum(self.levels[:i]) + x

    def vertex_index(self, i, x) -> int:
        return sum(self.levels[1:i]) + x

    def level_map(self, i: int, j: int, x: int) -> int:
        """Image of x in f(i) under the composite to f(j)."""
        for k in range(i, j):
            x = self.maps[k][x]
        return x

    def fiber_at(self, i: int, j: int, y: int) -> tuple:
        """Elements of f(i) mapping to y in f(j)."""
        return tuple(x for x in range(self.levels[i])
                     if self.level_map(i, j, x) == y)

    def in_edges_of_vertex(self, i: int, x: int) -> tuple:
        return tuple((i - 1, z) for z in self.fiber_at(i - 1, i, x))


def validate_forest(levels, maps) -> Forest:
    levels = tuple(int(n) for n in levels)
    maps = tuple(tuple(int(v) for v in mp) for mp in maps)
    if any(n < 0 for n in levels) or len(maps) != len(levels) - 1:
        raise MapNotTotal("levels and maps do not form a chain",
                          levels=levels, n_maps=len(maps))
    for i, mp in enumerate(maps):
        if len(mp) != levels[i]:
            raise MapNotTotal("map is not total on its level", level=i)
        for x, v in enumerate(mp):
            if not (0 <= v < levels[i + 1]):
                raise MapNotTotal("map value out of range", level=i, element=x)
    return Forest(levels, maps)


EDGE_FOREST = Forest((1,), ())


def corolla_forest(n: int) -> Forest:
    return Forest((n, 1), (tuple(0 for _ in range(n)),))


def linear_forest(n: int) -> Forest:
    """Image of [n]: the chain of singletons."""
    return Forest(tuple(1 for _ in range(n + 1)),
                  tuple((0,) for _ in range(n)))


@dataclass(frozen=True)
class ForestMorphism:
    source: Forest
    target: Forest
    alpha: tuple  # monotone map on levels
    phis: tuple   # per source level, tuple of image positions

    def __hash__(self):
        return _cached_hash(self, (self.source, self.target, self.alpha,
                                   self.phis))

    def phi(self, k: int, x: int) -> int:
        return self.phis[k][x]


def validate_forest_morphism(source: Forest, target: Forest, alpha, phis
                             ) -> ForestMorphism:
    alpha = tuple(int(a) for a in alpha)
    phis = tuple(tuple(int(v) for v in p) for p in phis)
    n, m = source.length, target.length
    if len(alpha) != n + 1 or len(phis) != n + 1:
        raise SourceTargetMismatch("alpha/phi length must match source length")
    if any(not (0 <= a <= m) for a in alpha) or \
       any(alpha[i] > alpha[i + 1] for i in range(n)):
        raise IndexOutOfRange("alpha must be monotone into the target levels",
                              alpha=alpha)
    for k in range(n + 1):
        if len(phis[k]) != source.levels[k]:
            raise MapNotTotal("phi is not total", level=k)
        for v in phis[k]:
            if not (0 <= v < target.levels[alpha[k]]):
                raise IndexOutOfRange("phi value out of range", level=k)
        if len(set(phis[k])) != len(phis[k]):
            raise NotInjective("level component is not injective", level=k)
    for k in range(n):
        for x in range(source.levels[k]):
            lhs = phis[k + 1][source.maps[k][x]]
            rhs = target.level_map(alpha[k], alpha[k + 1], phis[k][x])
            if lhs != rhs:
                raise NaturalityFails("square does not commute",
                                      levels=(k, k + 1), element=x)
    for k in range(n + 1):
        for l in range(k + 1, n + 1):
            # surjectivity of g(k) onto the fibered product over (k, l)
            hit = {(source.level_map(k, l, x), phis[k][x])
                   for x in range(source.levels[k])}
            for y in range(source.levels[l]):
                target_y = phis[l][y]
                for z in range(target.levels[alpha[k]]):
                    if target.level_map(alpha[k], alpha[l], z) != target_y:
                        continue
                    if (y, z) not in hit:
                        raise PullbackFails("square is not a pullback",
                                            levels=(k, l), pair=(y, z))
    return ForestMorphism(source, target, alpha, phis)


def identity_forest_morphism(forest: Forest) -> ForestMorphism:
    return ForestMorphism(
        forest, forest, tuple(range(forest.length + 1)),
        tuple(tuple(range(n)) for n in forest.levels))


def compose_forest_morphisms(g: ForestMorphism, f: ForestMorphism
                             ) -> ForestMorphism:
    if f.target != g.source:
        raise SourceTargetMismatch("codomain of f must be the domain of g")
    alpha = tuple(g.alpha[a] for a in f.alpha)
    phis = tuple(
        tuple(g.phis[f.alpha[k]][v] for v in f.phis[k])
        for k in range(f.source.length + 1))
    return ForestMorphism(f.source, g.target, alpha, phis)


def is_inert_forest(f: ForestMorphism) -> bool:
    return all(f.alpha[i] == f.alpha[0] + i for i in range(len(f.alpha)))


def is_active_forest(f: ForestMorphism) -> bool:
    if f.alpha[0] != 0 or f.alpha[-1] != f.target.length:
        return False
    return all(len(f.phis[k]) == f.target.levels[f.alpha[k]]
               for k in range(f.source.length + 1))


def is_forest_iso(f: ForestMorphism) -> bool:
    return f.source.length == f.target.length and \
        f.alpha == tuple(range(f.source.length + 1)) and \
        is_active_forest(f)


def factorize_forest(f: ForestMorphism):
    """Active-then-inert factorization; returns (active, inert)."""
    src, tgt = f.source, f.target
    n = src.length
    lo, hi = f.alpha[0], f.alpha[-1]
    width = hi - lo
    subsets = [None] * (width + 1)
    subsets[width] = sorted(f.phis[n])
    for i in range(width - 1, -1, -1):
        keep = set(subsets[i + 1])
        subsets[i] = [z for z in range(tgt.levels[lo + i])
                      if tgt.maps[lo + i][z] in keep]
    pos = [
        {z: p for p, z in enumerate(sub)} for sub in subsets
    ]
    mid_levels = tuple(len(sub) for sub in subsets)
    mid_maps = tuple(
        tuple(pos[i + 1][tgt.maps[lo + i][z]] for z in subsets[i])
        for i in range(width))
    mid = Forest(mid_levels, mid_maps)
    inert = validate_forest_morphism(
        mid, tgt, tuple(lo + i for i in range(width + 1)),
        tuple(tuple(sub) for sub in subsets))
    active = validate_forest_morphism(
        src, mid, tuple(f.alpha[k] - lo for k in range(n + 1)),
        tuple(tuple(pos[f.alpha[k] - lo][v] for v in f.phis[k])
              for k in range(n + 1)))
    return active, inert


# ---------------------------------------------------------------------------
# corolla functor


def cor_forest(forest: Forest) -> int:
    return forest.n_vertices


def cor_forest_morphism(f: ForestMorphism) -> PointedMap:
    """Contravariant: target vertices to source vertices (or basepoint)."""
    src, tgt = f.source, f.target
    values = []
    for i, x in tgt.vertices():
        val = None
        for j in range(1, src.length + 1):
            if f.alpha[j - 1] < i <= f.alpha[j]:
                img = tgt.level_map(i, f.alpha[j], x)
                for y in range(src.levels[j]):
                    if f.phis[j][y] == img:
                        val = src.vertex_index(j, y)
                        break
                break
        values.append(val)
    return PointedMap(tgt.n_vertices, src.n_vertices, tuple(values))


# ---------------------------------------------------------------------------
# restriction, fibers, trees


def restrict(forest: Forest, i: int, j: int) -> Forest:
    """The subchain of levels i..j."""
    if not (0 <= i <= j <= forest.length):
        raise IndexOutOfRange("restriction window out of range", window=(i, j))
    return Forest(forest.levels[i:j + 1], forest.maps[i:j])


def fiber(forest: Forest, k: int) -> Forest:
    """The tree of everything mapping to root k, as a forest with one root."""
    if not (0 <= k < forest.levels[-1]):
        raise IndexOutOfRange("no such root", root=k)
    m = forest.length
    subsets = [forest.fiber_at(i, m, k) for i in range(m + 1)]
    pos = [{z: p for p, z in enumerate(sub)} for sub in subsets]
    return Forest(
        tuple(len(sub) for sub in subsets),
        tuple(tuple(pos[i + 1][forest.maps[i][z]] for z in subsets[i])
              for i in range(m)))


def split(forest: Forest) -> list:
    return [fiber(forest, k) for k in range(forest.levels[-1])]


def fiber_inclusion(forest: Forest, k: int) -> ForestMorphism:
    m = forest.length
    subsets = [forest.fiber_at(i, m, k) for i in range(m + 1)]
    return validate_forest_morphism(
        fiber(forest, k), forest, tuple(range(m + 1)),
        tuple(tuple(sub) for sub in subsets))


def is_tree_object(forest: Forest) -> bool:
    return forest.levels[-1] == 1


def underlying_tree(forest: Forest) -> Tree:
    """Forget levels: edges are all elements, each vertex eats its fiber."""
    if not is_tree_object(forest):
        raise NotATree("top level must be a single root",
                       top=forest.levels[-1])
    outs, ins = [], []
    for i, x in forest.vertices():
        outs.append(forest.edge_index(i, x))
        ins.append(tuple(forest.edge_index(i - 1, z)
                         for z in forest.fiber_at(i - 1, i, x)))
    return Tree(forest.n_edges, forest.edge_index(forest.length, 0),
                tuple(outs), tuple(ins))


def _tau_active(f: ForestMorphism) -> OmegaMorphism:
    """The assembled tree map of an active morphism between tree objects."""
    src, tgt = f.source, f.target
    ts, tt = underlying_tree(src), underlying_tree(tgt)
    f0 = [None] * ts.n_edges
    for k in range(src.length + 1):
        for x in range(src.levels[k]):
            f0[src.edge_index(k, x)] = tgt.edge_index(f.alpha[k], f.phis[k][x])
    f1 = []
    for k, x in src.vertices():
        lo, hi = f.alpha[k - 1], f.alpha[k]
        top = f.phis[k][x]
        edges, vertices = set(), set()
        for lvl in range(lo, hi + 1):
            for e in range(tgt.levels[lvl]):
                if tgt.level_map(lvl, hi, e) == top:
                    edges.add(tgt.edge_index(lvl, e))
                    if lvl > lo:
                        vertices.add(tt.vertex_above(tgt.edge_index(lvl, e)))
        f1.append(Subtree(frozenset(edges), frozenset(vertices),
                          tgt.edge_index(hi, top)))
    return validate_omega(ts, tt, tuple(f0), tuple(f1))


def tau_on_inert(f: ForestMorphism) -> OmegaMorphism:
    """The embedding of underlying trees induced by an inert morphism."""
    if not is_inert_forest(f):
        raise SourceTargetMismatch("morphism is not inert")
    src, tgt = f.source, f.target
    ts, tt = underlying_tree(src), underlying_tree(tgt)
    f0 = [None] * ts.n_edges
    for k in range(src.length + 1):
        for x in range(src.levels[k]):
            f0[src.edge_index(k, x)] = tgt.edge_index(f.alpha[k], f.phis[k][x])
    f1 = []
    for k, x in src.vertices():
        v_img = tt.vertex_above(tgt.edge_index(f.alpha[k], f.phis[k][x]))
        f1.append(corolla_subtree(tt, v_img))
    return validate_omega(ts, tt, tuple(f0), tuple(f1))


def tau_morphism(f: ForestMorphism) -> OmegaMorphism:
    """Tree map of any morphism between tree objects.

    Routed through the active-then-inert factorization: the active part is
    the grafting-assembled map, the inert part an embedding.
    """
    active, inert = factorize_forest(f)
    return compose_omega(tau_on_inert(inert), _tau_active(active))


# ---------------------------------------------------------------------------
# elementary cover


def edge_inclusion(forest: Forest, i: int, x: int) -> ForestMorphism:
    return validate_forest_morphism(EDGE_FOREST, forest, (i,), ((x,),))


def vertex_corolla_inclusion(forest: Forest, i: int, x: int) -> ForestMorphism:
    """Canonical inert corolla map picking vertex (i, x)."""
    fib = forest.fiber_at(i - 1, i, x)
    return validate_forest_morphism(
        corolla_forest(len(fib)), forest, (i - 1, i), (tuple(fib), (x,)))


def elementary_cover(forest: Forest) -> dict:
    """Inert maps from the edge and from one corolla per vertex.

    Returns {"edges": [((i, x), morphism), ...],
             "vertices": [((i, x), morphism), ...]}.
    """
    return {
        "edges": [((i, x), edge_inclusion(forest, i, x))
                  for i, x in forest.edges()],
        "vertices": [((i, x), vertex_corolla_inclusion(forest, i, x))
                     for i, x in forest.vertices()],
    }


# ---------------------------------------------------------------------------
# labels and edge colors


@dataclass(frozen=True)
class CommutativeMonoid:
    elements: tuple
    unit: object
    table: tuple  # table[i][j] = index product of elements i and j

    def index(self, a) -> int:
        return self.elements.index(a)

    def multiply(self, a, b):
        return self.elements[self.table[self.index(a)][self.index(b)]]

    def product(self, items):
        acc = self.unit
        for it in items:
            acc = self.multiply(acc, it)
        return acc


def validate_monoid(elements, unit, table) -> CommutativeMonoid:
    elements = tuple(elements)
    table = tuple(tuple(int(v) for v in row) for row in table)
    n = len(elements)
    if unit not in elements:
        raise LabelMismatch("unit must be an element", unit=unit)
    if len(table) != n or any(len(r) != n for r in table):
        raise LabelMismatch("multiplication table must be square", size=n)
    m = CommutativeMonoid(elements, unit, table)
    u = elements.index(unit)
    for i in range(n):
        if table[i][u] != i or table[u][i] != i:
            raise LabelMismatch("unit law fails", element=elements[i])
        for j in range(n):
            if table[i][j] != table[j][i]:
                raise LabelMismatch("monoid is not commutative",
                                    pair=(elements[i], elements[j]))
            for k in range(n):
                if table[table[i][j]][k] != table[i][table[j][k]]:
                    raise LabelMismatch("monoid is not associative",
                                        triple=(elements[i], elements[j],
                                                elements[k]))
    return m


@dataclass(frozen=True)
class LabelledForest:
    forest: Forest
    monoid: CommutativeMonoid
    labels: tuple  # per vertex, level-major

    def label_of(self, i, x):
        return self.labels[self.forest.vertex_index(i, x)]


@dataclass(frozen=True)
class EdgeColoredForest:
    forest: Forest
    colors: tuple  # per edge, level-major

    def color_of(self, i, x):
        return self.colors[self.forest.edge_index(i, x)]


def validate_labelled_morphism(f: ForestMorphism, source: LabelledForest,
                               target: LabelledForest) -> bool:
    """Source labels must be the products of the target labels they absorb."""
    if source.forest != f.source or target.forest != f.target:
        raise SourceTargetMismatch("labelled forests do not match the morphism")
    monoid = source.monoid
    cor = cor_forest_morphism(f)
    for d in range(f.source.n_vertices):
        absorbed = [target.labels[c] for c in cor.fiber(d)]
        prod = monoid.product(absorbed)
        if prod != source.labels[d]:
            raise LabelMismatch("label is not the product over the fiber",
                                vertex=d, expected=prod,
                                found=source.labels[d])
    return True


def cartesian_lift(f: ForestMorphism, target: LabelledForest) -> LabelledForest:
    """Restrict labels along an inert morphism."""
    if not is_inert_forest(f):
        raise SourceTargetMismatch("cartesian lifts are taken along inerts")
    cor = cor_forest_morphism(f)
    labels = []
    for d in range(f.source.n_vertices):
        (c,) = cor.fiber(d)
        labels.append(target.labels[c])
    return LabelledForest(f.source, target.monoid, tuple(labels))


# ---------------------------------------------------------------------------
# canonical forms and enumeration


def _forest_keys(forest: Forest) -> list:
    keys = [["0"] * forest.levels[0]]
    for i in range(1, forest.length + 1):
        row = []
        for x in range(forest.levels[i]):
            childs = sorted(keys[i - 1][z]
                            for z in forest.fiber_at(i - 1, i, x))
            row.append("(" + ",".join(childs) + ")")
        keys.append(row)
    return keys


def forest_descriptor(forest: Forest) -> str:
    keys = _forest_keys(forest)
    roots = sorted(keys[forest.length])
    return f"[{forest.length}]" + "|".join(roots)


def canonical_forest(forest: Forest) -> Forest:
    """Canonical representative under level-preserving isomorphism."""
    keys = _forest_keys(forest)
    m = forest.length
    order = [None] * (m + 1)
    order[m] = sorted(range(forest.levels[m]), key=lambda r: (keys[m][r], r))
    for i in range(m, 0, -1):
        row = []
        for x in order[i]:
            row.extend(sorted(forest.fiber_at(i - 1, i, x),
                              key=lambda z: (keys[i - 1][z], z)))
        order[i - 1] = row
    pos = [{z: p for p, z in enumerate(row)} for row in order]
    maps = tuple(
        tuple(pos[i + 1][forest.maps[i][order[i][p]]]
              for p in range(forest.levels[i]))
        for i in range(m))
    return Forest(forest.levels, maps)


def _raw_chains(max_length: int, max_level_size: int, max_edges):
    budget = max_edges if max_edges is not None else max_length * max_level_size + max_level_size

    def extend(levels, maps, remaining):
        yield levels, maps
        if len(levels) > max_length:
            return
        prev = levels[-1]
        for nxt in range(0, min(max_level_size, remaining) + 1):
            if prev > 0 and nxt == 0:
                continue
            for mp in itertools.product(range(nxt), repeat=prev):
                work.tick()
                yield from extend(levels + (nxt,), maps + (mp,),
                                  remaining - nxt)

    for n0 in range(0, min(max_level_size, budget) + 1):
        yield from extend((n0,), (), budget - n0)


def max_fiber_size(forest: Forest) -> int:
    out = 0
    for i in range(1, forest.length + 1):
        for x in range(forest.levels[i]):
            out = max(out, len(forest.fiber_at(i - 1, i, x)))
    return out


def enumerate_forests(max_length: int, max_level_size: int,
                      max_edges=None) -> list:
    """Canonical representatives of forest isomorphism classes within bounds."""
    if max_length < 0 or max_level_size < 0:
        raise ValueError("bounds must be >= 0")
    seen = {}
    for levels, maps in _raw_chains(max_length, max_level_size, max_edges):
        f = Forest(levels, maps)
        if max_edges is not None and f.n_edges > max_edges:
            continue
        d = forest_descriptor(f)
        if d not in seen:
            seen[d] = canonical_forest(f)
    return [seen[d] for d in sorted(seen)]


def enumerate_forest_morphisms(source: Forest, target: Forest) -> list:
    """All morphisms source -> target, by descending-level backtracking."""
    n, m = source.length, target.length
    out = []
    for alpha in itertools.combinations_with_replacement(range(m + 1), n + 1):
        if any(source.levels[k] > target.levels[alpha[k]] for k in range(n + 1)):
            continue
        top_src = source.levels[n]
        top_tgt = target.levels[alpha[n]]
        for top in itertools.permutations(range(top_tgt), top_src):
            phis = [None] * (n + 1)
            phis[n] = tuple(top)

            def descend(k):
                if k < 0:
                    out.append(ForestMorphism(source, target, alpha,
                                              tuple(phis)))
                    return
                work.tick()
                per_parent = []
                for y in range(source.levels[k + 1]):
                    src_fib = source.fiber_at(k, k + 1, y)
                    tgt_fib = [z for z in range(target.levels[alpha[k]])
                               if target.level_map(alpha[k], alpha[k + 1], z)
                               == phis[k + 1][y]]
                    if len(src_fib) != len(tgt_fib):
                        return
                    per_parent.append((src_fib, tgt_fib))
                assign = [None] * source.levels[k]

                def fill(idx):
                    if idx == len(per_parent):
                        phis[k] = tuple(assign)
                        descend(k - 1)
                        phis[k] = None
                        return
                    src_fib, tgt_fib = per_parent[idx]
                    for perm in itertools.permutations(tgt_fib):
                        for s_el, t_el in zip(src_fib, perm):
                            assign[s_el] = t_el
                        fill(idx + 1)

                fill(0)

            descend(n - 1)
    return out


def forest_automorphisms(forest: Forest) -> list:
    return [f for f in enumerate_forest_morphisms(forest, forest)
            if is_forest_iso(f)]


# ---------------------------------------------------------------------------
# serialization (schema forest.v1) and DOT


def forest_to_dict(obj) -> dict:
    labels = colors = None
    forest = obj
    if isinstance(obj, LabelledForest):
        forest = obj.forest
        labels = {
            "monoid": {
                "elements": list(obj.monoid.elements),
                "unit": obj.monoid.unit,
                "table": [list(r) for r in obj.monoid.table],
            },
            "values": list(obj.labels),
        }
    elif isinstance(obj, EdgeColoredForest):
        forest = obj.forest
        colors = list(obj.colors)
    d = {"levels": list(forest.levels),
         "maps": [list(mp) for mp in forest.maps]}
    if labels is not None:
        d["labels"] = labels
    if colors is not None:
        d["edge_colors"] = colors
    return d


def forest_from_dict(d: dict):
    try:
        forest = validate_forest(d["levels"], d["maps"])
    except KeyError as exc:
        raise SerializationError("missing forest.v1 field", field=str(exc))
    if d.get("labels") is not None:
        raw = d["labels"]
        monoid = validate_monoid(raw["monoid"]["elements"],
                                 raw["monoid"]["unit"],
                                 raw["monoid"]["table"])
        return LabelledForest(forest, monoid, tuple(raw["values"]))
    if d.get("edge_colors") is not None:
        return EdgeColoredForest(forest, tuple(d["edge_colors"]))
    return forest


def forest_to_json(obj, indent=None) -> str:
    return json.dumps(forest_to_dict(obj), indent=indent, sort_keys=True)


def forest_from_json(text: str):
    return forest_from_dict(json.loads(text))


def forest_to_dot(obj, name="forest") -> str:
    labels = colors = None
    forest = obj
    if isinstance(obj, LabelledForest):
        forest, labels = obj.forest, obj.labels
    elif isinstance(obj, EdgeColoredForest):
        forest, colors = obj.forest, obj.colors
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, x in forest.vertices():
        extra = ""
        if labels is not None:
            extra = f', data="{labels[forest.vertex_index(i, x)]}"'
        lines.append(f'  v_{i}_{x} [shape=circle, label="{i}.{x}"{extra}];')
    lines.append('  base [shape=point, label=""];')
    stubs = []
    for i, x in forest.edges():
        tag = f"e{i}.{x}"
        if colors is not None:
            tag += f":{colors[forest.edge_index(i, x)]}"
        src = f"v_{i}_{x}" if i >= 1 else f"stub_{i}_{x}"
        if i == 0:
            stubs.append(f'  stub_{i}_{x} [shape=point, label=""];')
        dst = f"v_{i + 1}_{forest.maps[i][x]}" if i < forest.length else "base"
        lines.append(f'  {src} -> {dst} [label="{tag}"];')
    lines.extend(stubs)
    lines.append("}")
    return "\n".join(lines)
