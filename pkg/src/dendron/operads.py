"""Finite colored operads in sets, as explicit tables.

Operations carry ordered input profiles; the symmetric groups act on the
right, with profile_in(f . sigma)[i] = profile_in(f)[sigma[i]].  Partial
composition f o_i g substitutes g into slot i (0-based), expanding the slot
into g's inputs.  All laws (unit, both associativities, equivariance) are
checked exhaustively at load; composition entries may be None in truncated
operads (free operads cut off at a vertex bound), and laws are then checked
wherever all participants exist.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field

from . import work
from .errors import (
    AssociativityFails,
    ColorMismatch,
    DendronError,
    EquivarianceFails,
    NotAMap,
    ProfileMismatch,
    SerializationError,
    UnitFails,
)
from .trees import ColoredTree, Tree, leaves, make_edge
from .omega import leaf_graft


class BoundExceeded(DendronError):
    """A composite fell outside a truncated operad's tables."""

    code = "BoundExceeded"


def compose_perms(sigma, tau):
    """Right-action composite: (f.sigma).tau = f.(sigma o tau)."""
    return tuple(sigma[t] for t in tau)


def insert_block(sigma, i, m):
    """Permutation making (f.sigma) o_i g = (f o_sigma[i] g) . result."""
    n = len(sigma)
    s = sigma[i]

    def fpos(j):
        return j if j < s else j + m - 1

    out = []
    for p in range(i):
        out.append(fpos(sigma[p]))
    for l in range(m):
        out.append(s + l)
    for p in range(i + m, n + m - 1):
        out.append(fpos(sigma[p - m + 1]))
    return tuple(out)


def pad_perm(i, tau, n):
    """Permutation making f o_i (g.tau) = (f o_i g) . result."""
    m = len(tau)
    out = list(range(n + m - 1))
    for l in range(m):
        out[i + l] = i + tau[l]
    return tuple(out)


@dataclass
class ColoredOperad:
    """Validated finite colored operad.  Treat as immutable."""

    colors: tuple
    profiles: dict            # op id -> (inputs tuple, output)
    ops_by_profile: dict      # profile -> tuple of op ids
    identities: dict          # color -> op id
    action: dict              # (op id, perm) -> op id
    comp: dict                # (op id, slot, op id) -> op id or None
    max_arity: int
    truncated: bool = False
    name: str = ""

    def ops(self):
        return sorted(self.profiles)

    def arity(self, op) -> int:
        return len(self.profiles[op][0])

    def inputs(self, op) -> tuple:
        return self.profiles[op][0]

    def output(self, op):
        return self.profiles[op][1]

    def ops_at(self, inputs, output) -> tuple:
        return self.ops_by_profile.get((tuple(inputs), output), ())

    def act(self, op, perm):
        if tuple(perm) == tuple(range(self.arity(op))):
            return op
        return self.action[(op, tuple(perm))]

    def compose_at(self, f, i, g):
        """f o_i g; raises on color mismatch, BoundExceeded past truncation."""
        if self.inputs(f)[i] != self.output(g):
            raise ProfileMismatch("slot color does not match argument output",
                                  slot=i, expected=self.inputs(f)[i],
                                  found=self.output(g))
        val = self.comp[(f, i, g)]
        if val is None:
            raise BoundExceeded("composite exceeds the truncation bound",
                                op=f, slot=i, arg=g)
        return val

    def identity_at(self, color):
        return self.identities[color]


def _expected_profile(op_inputs, i, arg_inputs, output):
    return (tuple(op_inputs[:i]) + tuple(arg_inputs) + tuple(op_inputs[i + 1:]),
            output)


def validate_operad(operad: ColoredOperad, level: str = "auto",
                    sample_seed: int = 20260809, samples: int = 20000
                    ) -> ColoredOperad:
    """Law checking; raises with a witnessing tuple on failure.

    ``level`` "full" checks every instance of every law; "sampled" checks
    totality, profiles, units and action functoriality exhaustively but
    draws seeded random triples for associativity and equivariance (the
    cubic laws); "auto" picks "full" below 48 operations.
    """
    if level == "auto":
        level = "full" if len(operad.profiles) <= 48 else "sampled"
    if level == "sampled":
        return _validate_sampled(operad, sample_seed, samples)
    O = operad
    for c in O.identities:
        e = O.identities[c]
        if O.profiles[e] != ((c,), c):
            raise UnitFails("identity has the wrong profile", color=c)
    for c in O.colors:
        if c not in O.identities:
            raise UnitFails("missing identity", color=c)
    for prof, ops in O.ops_by_profile.items():
        for op in ops:
            if O.profiles[op] != prof:
                raise ColorMismatch("profile index disagrees with profile",
                                    op=op)
    # action: totality, profile transport, functoriality
    for op in O.profiles:
        n = O.arity(op)
        for perm in itertools.permutations(range(n)):
            work.tick()
            if (op, perm) not in O.action:
                raise EquivarianceFails("missing action entry", op=op,
                                        perm=perm)
            img = O.action[(op, perm)]
            want_in = tuple(O.inputs(op)[perm[i]] for i in range(n))
            if O.profiles[img] != (want_in, O.output(op)):
                raise EquivarianceFails("action does not transport profile",
                                        op=op, perm=perm)
        if O.act(op, tuple(range(n))) != op:
            raise EquivarianceFails("action is not unital", op=op)
        for sigma in itertools.permutations(range(n)):
            for tau in itertools.permutations(range(n)):
                if O.act(O.act(op, sigma), tau) != \
                        O.act(op, compose_perms(sigma, tau)):
                    raise EquivarianceFails("action is not functorial",
                                            op=op, sigma=sigma, tau=tau)
    # composition: totality on color-matching triples, profile, units
    for f in O.profiles:
        for i in range(O.arity(f)):
            c = O.inputs(f)[i]
            for g in O.profiles:
                if O.output(g) != c:
                    continue
                work.tick()
                if (f, i, g) not in O.comp:
                    raise ColorMismatch("missing composition entry",
                                        op=f, slot=i, arg=g)
                h = O.comp[(f, i, g)]
                if h is None:
                    if not O.truncated:
                        raise ColorMismatch("None entry in untruncated operad",
                                            op=f, slot=i, arg=g)
                    continue
                want = _expected_profile(O.inputs(f), i, O.inputs(g),
                                         O.output(f))
                if O.profiles[h] != want:
                    raise ColorMismatch("composite has the wrong profile",
                                        op=f, slot=i, arg=g)
            e = O.identities[c]
            if O.comp[(f, i, e)] is not None and O.comp[(f, i, e)] != f:
                raise UnitFails("right unit law fails", op=f, slot=i)
        e_out = O.identities[O.output(f)]
        if O.comp[(e_out, 0, f)] is not None and O.comp[(e_out, 0, f)] != f:
            raise UnitFails("left unit law fails", op=f)
    # associativity, nested and disjoint
    for f in O.profiles:
        for i in range(O.arity(f)):
            for g in O.profiles:
                if O.output(g) != O.inputs(f)[i]:
                    continue
                fg = O.comp[(f, i, g)]
                m = O.arity(g)
                for j in range(m):
                    for h in O.profiles:
                        if O.output(h) != O.inputs(g)[j]:
                            continue
                        work.tick()
                        gh = O.comp[(g, j, h)]
                        lhs = O.comp[(fg, i + j, h)] if fg is not None else None
                        rhs = O.comp[(f, i, gh)] if gh is not None else None
                        if fg is None or gh is None or lhs is None or rhs is None:
                            continue
                        if lhs != rhs:
                            raise AssociativityFails(
                                "nested associativity fails",
                                triple=(f, g, h), slots=(i, j))
                for k in range(i + 1, O.arity(f)):
                    for h in O.profiles:
                        if O.output(h) != O.inputs(f)[k]:
                            continue
                        work.tick()
                        fh = O.comp[(f, k, h)]
                        lhs = O.comp[(fg, k + m - 1, h)] if fg is not None else None
                        rhs = O.comp[(fh, i, g)] if fh is not None else None
                        if fg is None or fh is None or lhs is None or rhs is None:
                            continue
                        if lhs != rhs:
                            raise AssociativityFails(
                                "disjoint associativity fails",
                                triple=(f, g, h), slots=(i, k))
    # equivariance
    for f in O.profiles:
        n = O.arity(f)
        for sigma in itertools.permutations(range(n)):
            fs = O.act(f, sigma)
            for i in range(n):
                for g in O.profiles:
                    if O.output(g) != O.inputs(fs)[i]:
                        continue
                    work.tick()
                    m = O.arity(g)
                    lhs = O.comp[(fs, i, g)]
                    base = O.comp[(f, sigma[i], g)]
                    if lhs is None or base is None:
                        continue
                    rhs = O.act(base, insert_block(sigma, i, m))
                    if lhs != rhs:
                        raise EquivarianceFails("slot equivariance fails",
                                                op=f, sigma=sigma, slot=i,
                                                arg=g)
        for i in range(n):
            for g in O.profiles:
                if O.output(g) != O.inputs(f)[i]:
                    continue
                m = O.arity(g)
                base = O.comp[(f, i, g)]
                if base is None:
                    continue
                for tau in itertools.permutations(range(m)):
                    work.tick()
                    lhs = O.comp[(f, i, O.act(g, tau))]
                    if lhs is None:
                        continue
                    if lhs != O.act(base, pad_perm(i, tau, n)):
                        raise EquivarianceFails("argument equivariance fails",
                                                op=f, slot=i, arg=g, tau=tau)
    return O


def _validate_sampled(O: ColoredOperad, seed: int, samples: int
                      ) -> ColoredOperad:
    rng = random.Random(seed)
    for c in O.colors:
        e = O.identities.get(c)
        if e is None or O.profiles[e] != ((c,), c):
            raise UnitFails("identity missing or malformed", color=c)
    ops = O.ops()
    for op in ops:
        n = O.arity(op)
        for perm in itertools.permutations(range(n)):
            img = O.action.get((op, perm))
            want_in = tuple(O.inputs(op)[perm[i]] for i in range(n))
            if img is None or O.profiles[img] != (want_in, O.output(op)):
                raise EquivarianceFails("action missing or mistyped", op=op,
                                        perm=perm)
    for f in ops:
        for i in range(O.arity(f)):
            c = O.inputs(f)[i]
            e = O.identities[c]
            for g in ops:
                if O.output(g) != c:
                    continue
                if (f, i, g) not in O.comp:
                    raise ColorMismatch("missing composition entry",
                                        op=f, slot=i, arg=g)
                h = O.comp[(f, i, g)]
                if h is None:
                    if not O.truncated:
                        raise ColorMismatch("None entry in untruncated operad",
                                            op=f, slot=i, arg=g)
                    continue
                want = _expected_profile(O.inputs(f), i, O.inputs(g),
                                         O.output(f))
                if O.profiles[h] != want:
                    raise ColorMismatch("composite has the wrong profile",
                                        op=f, slot=i, arg=g)
            if O.comp[(f, i, e)] is not None and O.comp[(f, i, e)] != f:
                raise UnitFails("right unit law fails", op=f, slot=i)
        e_out = O.identities[O.output(f)]
        if O.comp[(e_out, 0, f)] is not None and O.comp[(e_out, 0, f)] != f:
            raise UnitFails("left unit law fails", op=f)
    by_out = {}
    for g in ops:
        by_out.setdefault(O.output(g), []).append(g)
    for _ in range(samples):
        f = rng.choice(ops)
        n = O.arity(f)
        if n == 0:
            continue
        i = rng.randrange(n)
        gs = by_out.get(O.inputs(f)[i])
        if not gs:
            continue
        g = rng.choice(gs)
        m = O.arity(g)
        fg = O.comp[(f, i, g)]
        if m > 0:
            j = rng.randrange(m)
            hs = by_out.get(O.inputs(g)[j])
            if hs:
                h = rng.choice(hs)
                gh = O.comp[(g, j, h)]
                if fg is not None and gh is not None:
                    lhs = O.comp[(fg, i + j, h)]
                    rhs = O.comp[(f, i, gh)]
                    if lhs is not None and rhs is not None and lhs != rhs:
                        raise AssociativityFails("nested associativity fails",
                                                 triple=(f, g, h))
        if n > 1:
            k = rng.randrange(n)
            if k != i:
                lo, hi = min(i, k), max(i, k)
                g1 = rng.choice(by_out.get(O.inputs(f)[lo]) or [None])
                h1 = rng.choice(by_out.get(O.inputs(f)[hi]) or [None])
                if g1 and h1:
                    m1 = O.arity(g1)
                    fg1 = O.comp[(f, lo, g1)]
                    fh1 = O.comp[(f, hi, h1)]
                    if fg1 is not None and fh1 is not None:
                        lhs = O.comp[(fg1, hi + m1 - 1, h1)]
                        rhs = O.comp[(fh1, lo, g1)]
                        if lhs is not None and rhs is not None and lhs != rhs:
                            raise AssociativityFails(
                                "disjoint associativity fails",
                                triple=(f, g1, h1))
        sigma = tuple(rng.sample(range(n), n))
        fs = O.act(f, sigma)
        pos = sigma.index(i)
        base = O.comp[(f, i, g)]
        lhs = O.comp[(fs, pos, g)]
        if base is not None and lhs is not None:
            if lhs != O.act(base, insert_block(sigma, pos, m)):
                raise EquivarianceFails("slot equivariance fails",
                                        op=f, sigma=sigma)
        if m > 0 and fg is not None:
            tau = tuple(rng.sample(range(m), m))
            lhs2 = O.comp[(f, i, O.act(g, tau))]
            if lhs2 is not None and lhs2 != O.act(fg, pad_perm(i, tau, n)):
                raise EquivarianceFails("argument equivariance fails",
                                        op=f, tau=tau)
    return O


def _finish(colors, profiles, identities, action, comp, max_arity,
            truncated=False, name="") -> ColoredOperad:
    by_prof: dict = {}
    for op in sorted(profiles):
        by_prof.setdefault(profiles[op], []).append(op)
    operad = ColoredOperad(
        colors=tuple(colors), profiles=profiles,
        ops_by_profile={p: tuple(v) for p, v in by_prof.items()},
        identities=identities, action=action, comp=comp,
        max_arity=max_arity, truncated=truncated, name=name)
    return validate_operad(operad)


# ---------------------------------------------------------------------------
# stock operads


def comm_operad(max_arity: int, color="*") -> ColoredOperad:
    """One operation in every arity up to the bound."""
    profiles = {f"e{n}": ((color,) * n, color) for n in range(max_arity + 1)}
    identities = {color: "e1"}
    action = {}
    comp = {}
    for n in range(max_arity + 1):
        for perm in itertools.permutations(range(n)):
            action[(f"e{n}", perm)] = f"e{n}"
    truncated = False
    for n in range(max_arity + 1):
        for i in range(n):
            for m in range(max_arity + 1):
                tot = n + m - 1
                comp[(f"e{n}", i, f"e{m}")] = f"e{tot}" if tot <= max_arity \
                    else None
                if tot > max_arity:
                    truncated = True
    return _finish((color,), profiles, identities, action, comp, max_arity,
                   truncated, name=f"Comm<= {max_arity}")


def _word_id(word) -> str:
    return "w" + ".".join(str(x) for x in word)


def ass_operad(max_arity: int, color="*") -> ColoredOperad:
    """Operations in arity n are the n! orderings of the inputs."""
    words = {n: list(itertools.permutations(range(n)))
             for n in range(max_arity + 1)}
    profiles = {}
    for n, ws in words.items():
        for w in ws:
            profiles[_word_id(w)] = ((color,) * n, color)
    identities = {color: _word_id((0,))}
    action = {}
    for n, ws in words.items():
        for w in ws:
            for sigma in itertools.permutations(range(n)):
                inv = [0] * n
                for a, b in enumerate(sigma):
                    inv[b] = a
                action[(_word_id(w), tuple(sigma))] = \
                    _word_id(tuple(inv[x] for x in w))
    comp = {}
    truncated = False
    for n, ws in words.items():
        for w1 in ws:
            for i in range(n):
                for m, ws2 in words.items():
                    tot = n + m - 1
                    for w2 in ws2:
                        if tot > max_arity:
                            comp[(_word_id(w1), i, _word_id(w2))] = None
                            truncated = True
                            continue
                        out = []
                        for x in w1:
                            if x == i:
                                out.extend(i + l for l in w2)
                            else:
                                out.append(x if x < i else x + m - 1)
                        comp[(_word_id(w1), i, _word_id(w2))] = \
                            _word_id(tuple(out))
    return _finish((color,), profiles, identities, action, comp, max_arity,
                   truncated, name=f"Ass<={max_arity}")


def unary_operad(colors, arrows, compose_table, name="") -> ColoredOperad:
    """Operad with only unary operations: a finite category.

    ``arrows`` maps an arrow id to (source color, target color); identities
    must be present as id arrows "1<color>".  ``compose_table`` maps
    (g, f) -> g o f for composable arrows.
    """
    colors = tuple(colors)
    profiles = {}
    identities = {}
    for c in colors:
        aid = f"1{c}"
        profiles[aid] = ((c,), c)
        identities[c] = aid
    for aid, (x, y) in arrows.items():
        profiles[aid] = ((x,), y)
    action = {(op, (0,)): op for op in profiles}
    comp = {}
    for g in profiles:
        for f in profiles:
            if profiles[f][1] != profiles[g][0][0]:
                continue
            if g in identities.values():
                comp[(g, 0, f)] = f
            elif f in identities.values():
                comp[(g, 0, f)] = g
            else:
                comp[(g, 0, f)] = compose_table[(g, f)]
    return _finish(colors, profiles, identities, action, comp, 1, name=name)


# ---------------------------------------------------------------------------
# composition along trees


def ops_compose(operad: ColoredOperad, tree: Tree, colors, vertex_ops,
                leaf_order=None, _ascending=False):
    """Total composite of a tree of operations.

    ``colors`` colors every edge, ``vertex_ops`` labels every vertex with an
    operation whose profile matches (inputs = incoming edge colors in stored
    order, output = outgoing edge color).  The result's input slots follow
    ``leaf_order`` (default: leaves in index order).  The private flag picks
    the substitution order so tests can compare evaluation strategies.
    """
    for v in tree.vertices():
        op = vertex_ops[v]
        want = (tuple(colors[e] for e in tree.in_edges[v]),
                colors[tree.out_edges[v]])
        if operad.profiles[op] != want:
            raise ProfileMismatch("vertex label does not match edge colors",
                                  vertex=v, expected=want,
                                  found=operad.profiles[op])

    def evaluate(e):
        v = tree.vertex_above(e)
        if v is None:
            return operad.identity_at(colors[e]), [e]
        acc = vertex_ops[v]
        parts = [evaluate(c) for c in tree.in_edges[v]]
        if _ascending:
            offset = 0
            for k, (op_k, _) in enumerate(parts):
                acc = operad.compose_at(acc, k + offset, op_k)
                offset += operad.arity(op_k) - 1
        else:
            for k in range(len(parts) - 1, -1, -1):
                acc = operad.compose_at(acc, k, parts[k][0])
        lvs = [e2 for _, sub in parts for e2 in sub]
        return acc, lvs

    op, lvs = evaluate(tree.root)
    if leaf_order is not None:
        if sorted(leaf_order) != sorted(lvs):
            raise ProfileMismatch("leaf order must enumerate the leaves",
                                  expected=sorted(lvs))
        perm = tuple(lvs.index(l) for l in leaf_order)
        op = operad.act(op, perm)
    return op


# ---------------------------------------------------------------------------
# free operads on generator corollas


def _free_key(tree: Tree, colors, vlabels, slots, e) -> str:
    c = repr(colors[e])
    s = slots.get(e, "")
    v = tree.vertex_above(e)
    if v is None:
        return f"L<{c}|{s}>"
    childs = sorted(_free_key(tree, colors, vlabels, slots, x)
                    for x in tree.in_edges[v])
    return f"N<{c}|{s}|{vlabels[v]}>({','.join(childs)})"


@dataclass(frozen=True)
class FreeOp:
    """A generator-labelled colored tree with numbered leaf slots."""

    tree: Tree
    colors: tuple
    vlabels: tuple
    slots: tuple  # slot i -> leaf edge

    def token(self) -> str:
        sl = {e: i for i, e in enumerate(self.slots)}
        return "f|" + _free_key(self.tree, self.colors, self.vlabels, sl,
                                self.tree.root)


def free_operad(generators, colors, max_vertices: int,
                name="") -> ColoredOperad:
    """Free operad truncation on generator corollas.

    ``generators`` maps a generator name to (input colors, output color).
    Operations are isomorphism classes of labelled trees with at most
    ``max_vertices`` vertices; composites beyond the bound are flagged None.
    """
    colors = tuple(colors)

    def register(store, fo: FreeOp):
        tok = fo.token()
        if tok not in store:
            store[tok] = fo
        return tok

    store: dict = {}
    for c in colors:
        register(store, FreeOp(make_edge(), (c,), (), (0,)))

    # Build labelled trees recursively as nested shape tuples, then
    # materialize with DFS numbering.
    def materialize(shape):
        """shape = ('leaf', color) or (gen, gout, children tuple)."""
        outs, ins, cols, vl = [], [], [], []

        def build(sh):
            e = len(cols)
            if sh[0] == "leaf":
                cols.append(sh[1])
                return e
            gname, gout, children = sh
            cols.append(gout)
            v = len(outs)
            outs.append(e)
            ins.append(None)
            vl.append(gname)
            ins[v] = tuple(build(c) for c in children)
            return e

        build(shape)
        tree = Tree(len(cols), 0, tuple(outs), tuple(ins))
        return tree, tuple(cols), tuple(vl)

    def shapes_with(n, root_color):
        if n == 0:
            yield ("leaf", root_color)
            return
        for gname, (gin, gout) in sorted(generators.items()):
            if gout != root_color:
                continue
            k = len(gin)
            for split_sizes in _compositions(n - 1, k):
                pools = [list(shapes_with(split_sizes[i], gin[i]))
                         for i in range(k)]
                for combo in itertools.product(*pools):
                    work.tick()
                    yield (gname, gout, combo)

    for n in range(1, max_vertices + 1):
        for c in colors:
            for shape in shapes_with(n, c):
                if shape[0] == "leaf":
                    continue
                tree, cols, vl = materialize(shape)
                for order in itertools.permutations(leaves(tree)):
                    register(store, FreeOp(tree, cols, vl, tuple(order)))

    tokens = sorted(store)
    profiles = {}
    for tok in tokens:
        fo = store[tok]
        profiles[tok] = (tuple(fo.colors[e] for e in fo.slots),
                         fo.colors[fo.tree.root])
    identities = {c: FreeOp(make_edge(), (c,), (), (0,)).token()
                  for c in colors}
    action = {}
    for tok in tokens:
        fo = store[tok]
        n = len(fo.slots)
        for perm in itertools.permutations(range(n)):
            img = FreeOp(fo.tree, fo.colors, fo.vlabels,
                         tuple(fo.slots[perm[i]] for i in range(n)))
            action[(tok, perm)] = register(store, img)
    comp = {}
    truncated = False
    for tok1 in tokens:
        f1 = store[tok1]
        for i in range(len(f1.slots)):
            for tok2 in tokens:
                f2 = store[tok2]
                if profiles[tok2][1] != profiles[tok1][0][i]:
                    continue
                work.tick()
                if f1.tree.n_vertices + f2.tree.n_vertices > max_vertices:
                    comp[(tok1, i, tok2)] = None
                    truncated = True
                    continue
                comp[(tok1, i, tok2)] = _free_compose(store, f1, i, f2)
    # late registrations (actions of composites) need profiles too
    for tok, fo in store.items():
        if tok not in profiles:
            profiles[tok] = (tuple(fo.colors[e] for e in fo.slots),
                             fo.colors[fo.tree.root])
    return _finish(colors, profiles, identities, action, comp,
                   max(len(p[0]) for p in profiles.values()),
                   truncated, name=name or "Free")


def _compositions(total, k):
    """All k-tuples of nonnegative ints summing to <= total? No: to any split."""
    if k == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _free_compose(store, f1: FreeOp, i: int, f2: FreeOp) -> str:
    leaf = f1.slots[i]
    lower, upper = f1.tree, f2.tree

    glued = leaf_graft(lower, leaf, upper)

    def up(e):
        if e == upper.root:
            return leaf
        return lower.n_edges + e - (1 if e > upper.root else 0)

    cols = list(f1.colors) + [None] * (upper.n_edges - 1)
    for e in range(upper.n_edges):
        cols[up(e)] = f2.colors[e]
    vl = list(f1.vlabels) + list(f2.vlabels)
    new_slots = (tuple(f1.slots[:i]) + tuple(up(e) for e in f2.slots)
                 + tuple(f1.slots[i + 1:]))
    fo = FreeOp(glued, tuple(cols), vl and tuple(vl) or (), new_slots)
    tok = fo.token()
    if tok not in store:
        store[tok] = fo
    return tok


def random_free_operad(rng, n_colors=1, n_generators=2, max_gen_arity=3,
                       max_vertices=2) -> ColoredOperad:
    """Seeded free operad truncation for randomized suites."""
    colors = tuple(range(n_colors))
    gens = {}
    for k in range(n_generators):
        ar = rng.randint(0, max_gen_arity)
        gins = tuple(rng.choice(colors) for _ in range(ar))
        gout = rng.choice(colors)
        gens[f"g{k}"] = (gins, gout)
    return free_operad(gens, colors, max_vertices,
                       name=f"FreeRnd({n_generators}g/{n_colors}c)")


# ---------------------------------------------------------------------------
# the underlying category, operad maps, Dwyer-Kan calculus


def unary_arrows(operad: ColoredOperad):
    """Morphisms of the underlying category, as (op, src, tgt) triples."""
    out = []
    for op in operad.ops():
        if operad.arity(op) == 1:
            out.append((op, operad.inputs(op)[0], operad.output(op)))
    return out


def compose_unary(operad: ColoredOperad, g, f):
    return operad.compose_at(g, 0, f)


def iso_pairs(operad: ColoredOperad):
    """Pairs (f, g) of mutually inverse unary operations."""
    pairs = []
    for f, x, y in unary_arrows(operad):
        for g, x2, y2 in unary_arrows(operad):
            if x2 != y or y2 != x:
                continue
            if compose_unary(operad, g, f) == operad.identity_at(x) and \
               compose_unary(operad, f, g) == operad.identity_at(y):
                pairs.append((f, g))
    return pairs


def isomorphic_colors(operad: ColoredOperad, x, y) -> bool:
    if x == y:
        return True
    return any(operad.inputs(f)[0] == x and operad.output(f) == y
               for f, g in iso_pairs(operad))


def is_gaunt(operad: ColoredOperad) -> bool:
    """Every isomorphism of the underlying category is an identity."""
    idset = set(operad.identities.values())
    return all(f in idset and g in idset for f, g in iso_pairs(operad))


@dataclass(frozen=True)
class OperadMap:
    source: ColoredOperad
    target: ColoredOperad
    color_map: tuple   # aligned with source.colors
    op_map: tuple      # aligned with sorted(source.profiles)

    def on_color(self, c):
        return self.color_map[self.source.colors.index(c)]

    def on_op(self, op):
        return self.op_map[self.source.ops().index(op)]


def validate_operad_map(source: ColoredOperad, target: ColoredOperad,
                        color_map: dict, op_map: dict) -> OperadMap:
    """Check an operad homomorphism given as dictionaries."""
    for c in source.colors:
        if color_map.get(c) not in target.colors:
            raise NotAMap("color map is not total into target colors", color=c)
    for op in source.ops():
        img = op_map.get(op)
        if img not in target.profiles:
            raise NotAMap("operation map is not total", op=op)
        want = (tuple(color_map[c] for c in source.inputs(op)),
                color_map[source.output(op)])
        if target.profiles[img] != want:
            raise NotAMap("profile is not preserved", op=op)
    for c in source.colors:
        if op_map[source.identity_at(c)] != \
                target.identity_at(color_map[c]):
            raise NotAMap("identity is not preserved", color=c)
    for op in source.ops():
        n = source.arity(op)
        for perm in itertools.permutations(range(n)):
            if op_map[source.act(op, perm)] != \
                    target.act(op_map[op], perm):
                raise NotAMap("symmetric action is not preserved", op=op,
                              perm=perm)
    for (f, i, g), h in source.comp.items():
        if h is None:
            continue
        timg = target.comp[(op_map[f], i, op_map[g])]
        if timg is None:
            raise NotAMap("target composite is truncated", op=f, slot=i)
        if op_map[h] != timg:
            raise NotAMap("composition is not preserved", op=f, slot=i, arg=g)
    return OperadMap(source, target,
                     tuple(color_map[c] for c in source.colors),
                     tuple(op_map[op] for op in source.ops()))


def identity_operad_map(operad: ColoredOperad) -> OperadMap:
    return OperadMap(operad, operad, tuple(operad.colors),
                     tuple(operad.ops()))


def compose_operad_maps(g: OperadMap, f: OperadMap) -> OperadMap:
    if f.target is not g.source and f.target != g.source:
        raise NotAMap("maps are not composable")
    return OperadMap(
        f.source, g.target,
        tuple(g.on_color(c) for c in f.color_map),
        tuple(g.on_op(op) for op in f.op_map))


def enumerate_operad_maps(source: ColoredOperad, target: ColoredOperad,
                          limit=None) -> list:
    """All homomorphisms, by backtracking over color then operation images."""
    res = []
    ops = source.ops()

    def op_candidates(op, cmap):
        want = (tuple(cmap[c] for c in source.inputs(op)),
                cmap[source.output(op)])
        return target.ops_by_profile.get(want, ())

    for colors_img in itertools.product(target.colors,
                                        repeat=len(source.colors)):
        cmap = dict(zip(source.colors, colors_img))
        assign: dict = {}

        def consistent(op):
            n = source.arity(op)
            if op in source.identities.values():
                c = source.inputs(op)[0]
                if assign[op] != target.identity_at(cmap[c]):
                    return False
            for perm in itertools.permutations(range(n)):
                other = source.act(op, perm)
                if other in assign and \
                        assign[other] != target.act(assign[op], perm):
                    return False
            for (f, i, g), h in source.comp.items():
                if h is None:
                    continue
                if f in assign and g in assign and h in assign:
                    timg = target.comp[(assign[f], i, assign[g])]
                    if timg is None or timg != assign[h]:
                        return False
            return True

        def fill(k):
            if limit is not None and len(res) >= limit:
                return
            if k == len(ops):
                res.append(validate_operad_map(source, target, cmap,
                                               dict(assign)))
                return
            op = ops[k]
            if op in assign:
                fill(k + 1)
                return
            for cand in op_candidates(op, cmap):
                work.tick()
                assign[op] = cand
                if consistent(op):
                    fill(k + 1)
                del assign[op]

        fill(0)
    return res


def is_fully_faithful(phi: OperadMap) -> bool:
    """Bijection on multimorphism sets over every source color tuple."""
    src, tgt = phi.source, phi.target
    max_ar = max(src.max_arity, tgt.max_arity)
    for n in range(max_ar + 1):
        for ins in itertools.product(src.colors, repeat=n):
            for out in src.colors:
                work.tick()
                dom = src.ops_at(ins, out)
                cod = tgt.ops_at(tuple(phi.on_color(c) for c in ins),
                                 phi.on_color(out))
                images = [phi.on_op(op) for op in dom]
                if len(set(images)) != len(images):
                    return False
                if set(images) != set(cod):
                    return False
    return True


def is_essentially_surjective(phi: OperadMap) -> bool:
    image = set(phi.color_map)
    return all(any(isomorphic_colors(phi.target, x, y) for x in image)
               for y in phi.target.colors)


def is_dk(phi: OperadMap) -> bool:
    return is_fully_faithful(phi) and is_essentially_surjective(phi)


def find_inverse(phi: OperadMap):
    """Search for a strict two-sided inverse operad map."""
    for psi in enumerate_operad_maps(phi.target, phi.source):
        if compose_operad_maps(psi, phi) == identity_operad_map(phi.source) \
                and compose_operad_maps(phi, psi) == \
                identity_operad_map(phi.target):
            return psi
    return None


# ---------------------------------------------------------------------------
# serialization (schema operad.v1)


def operad_to_dict(o: ColoredOperad) -> dict:
    return {
        "colors": list(o.colors),
        "operations": [
            {"id": op, "inputs": list(o.inputs(op)), "output": o.output(op)}
            for op in o.ops()],
        "identities": [[c, o.identities[c]] for c in o.colors],
        "action": [
            {"op": op, "perm": list(perm), "result": res}
            for (op, perm), res in sorted(o.action.items())],
        "composition": [
            {"op": f, "slot": i, "arg": g, "result": h}
            for (f, i, g), h in sorted(o.comp.items())],
        "max_arity": o.max_arity,
        "truncated": o.truncated,
        "name": o.name,
    }


def operad_from_dict(d: dict) -> ColoredOperad:
    try:
        profiles = {row["id"]: (tuple(row["inputs"]), row["output"])
                    for row in d["operations"]}
        identities = {c: op for c, op in d["identities"]}
        action = {(row["op"], tuple(row["perm"])): row["result"]
                  for row in d["action"]}
        comp = {(row["op"], row["slot"], row["arg"]): row["result"]
                for row in d["composition"]}
        return _finish(tuple(d["colors"]), profiles, identities, action,
                       comp, d["max_arity"], d.get("truncated", False),
                       d.get("name", ""))
    except KeyError as exc:
        raise SerializationError("missing operad.v1 field", field=str(exc))


def operad_to_json(o: ColoredOperad, indent=None) -> str:
    return json.dumps(operad_to_dict(o), indent=indent, sort_keys=True)


def operad_from_json(text: str) -> ColoredOperad:
    return operad_from_dict(json.loads(text))
