"""Command-line surface.

Exit codes: 0 success, 1 property failure, 2 usage or parse error.
DENDRON_MAX_WORK caps enumeration effort (exit 2 when exhausted).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import work
from .errors import DendronError, OperadValidationError, WorkLimitExceeded
from . import forests as FO
from . import nerves as NV
from . import omega as OM
from . import operads as OP
from . import theta as TH
from . import trees as TR


@dataclass
class Config:
    max_vertices: int = 3
    max_arity: int = 3
    max_length: int = 3
    max_level: int = 3
    max_edges: int = None
    colors: int = 1
    seed: int = 0
    fmt: str = "text"

    def validate(self):
        for v in (self.max_vertices, self.max_arity, self.max_length,
                  self.max_level, self.colors):
            if v is not None and v < 0:
                raise ValueError("bounds must be non-negative")


def _config(args) -> Config:
    cfg = Config(
        max_vertices=getattr(args, "max_vertices", 3),
        max_arity=getattr(args, "max_arity", 3),
        max_length=getattr(args, "max_length", 3),
        max_level=getattr(args, "max_level", 3),
        max_edges=getattr(args, "max_edges", None),
        colors=getattr(args, "colors", 1),
        seed=getattr(args, "seed", 0),
        fmt=getattr(args, "format", "text"))
    cfg.validate()
    return cfg


def _emit(payload, fmt):
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        if isinstance(payload, dict):
            for k, v in payload.items():
                print(f"{k}: {v}")
        elif isinstance(payload, list):
            for row in payload:
                print(row)
        else:
            print(payload)


def _load_any(path: str):
    with open(path) as fh:
        data = json.load(fh)
    if "edges" in data and "vertices" in data:
        return TR.from_dict(data)
    if "levels" in data:
        return FO.forest_from_dict(data)
    if "f0" in data:
        return OM.morphism_from_dict(data)
    if "operations" in data:
        return OP.operad_from_dict(data)
    if "site" in data:
        return NV.presheaf_from_dict(data)
    raise DendronError("unrecognized input schema")


def cmd_enum(args) -> int:
    cfg = _config(args)
    if args.kind == "trees":
        palette = tuple(range(cfg.colors)) if cfg.colors > 1 else None
        items = TR.enumerate_trees(cfg.max_vertices, cfg.max_arity, palette)
        if cfg.fmt == "json":
            _emit([TR.to_dict(t) for t in items], "json")
        else:
            for t in items:
                print(TR.canonical_descriptor(t))
            print(f"count: {len(items)}")
    elif args.kind == "forests":
        items = FO.enumerate_forests(cfg.max_length, cfg.max_level,
                                     cfg.max_edges)
        if cfg.fmt == "json":
            _emit([FO.forest_to_dict(f) for f in items], "json")
        else:
            for f in items:
                print(FO.forest_descriptor(f))
            print(f"count: {len(items)}")
    else:  # morphisms
        src = _load_any(args.source)
        tgt = _load_any(args.target)
        if isinstance(src, TR.Tree):
            items = OM.enumerate_morphisms(src, tgt)
            payload = [OM.morphism_to_dict(m) for m in items]
        else:
            items = FO.enumerate_forest_morphisms(src, tgt)
            payload = [{"alpha": list(m.alpha),
                        "phis": [list(p) for p in m.phis]} for m in items]
        if cfg.fmt == "json":
            _emit(payload, "json")
        else:
            print(f"count: {len(items)}")
    return 0


def _verify_factorization(cfg) -> dict:
    from .omega import factorize, compose, is_active, is_inert
    trees_list = TR.enumerate_trees(cfg.max_vertices, cfg.max_arity)
    checked = 0
    for s in trees_list:
        for t in trees_list:
            for f in OM.enumerate_morphisms(s, t):
                a, i = factorize(f)
                assert is_active(a) and is_inert(i)
                assert compose(i, a) == f
                checked += 1
    return {"suite": "factorization", "morphisms": checked, "ok": True}


def _verify_cor(cfg) -> dict:
    trees_list = TR.enumerate_trees(cfg.max_vertices, cfg.max_arity)
    checked = 0
    for s in trees_list:
        for t in trees_list:
            for f in OM.enumerate_morphisms(s, t):
                a, i = OM.factorize(f)
                assert OM.cor_omega_morphism(i).is_inert()
                assert OM.cor_omega_morphism(a).is_active()
                checked += 1
    forests_list = FO.enumerate_forests(cfg.max_length, cfg.max_level,
                                        cfg.max_edges or 4)
    for s in forests_list:
        for t in forests_list:
            for f in FO.enumerate_forest_morphisms(s, t):
                a, i = FO.factorize_forest(f)
                assert FO.cor_forest_morphism(i).is_inert()
                assert FO.cor_forest_morphism(a).is_active()
                checked += 1
    return {"suite": "cor", "morphisms": checked, "ok": True}


def _verify_grafting(cfg) -> dict:
    pool = TR.enumerate_trees(cfg.max_vertices, cfg.max_arity)
    count = 0
    for s in pool:
        for v in s.vertices() if isinstance(s, TR.Tree) else []:
            for t in pool:
                if len(TR.leaves(t)) != s.arity(v):
                    continue
                g1 = OM.graft(s, v, t)
                for w in t.vertices():
                    for u in pool:
                        if len(TR.leaves(u)) != t.arity(w):
                            continue
                        inner = OM.graft(t, w, u)
                        lhs = OM.graft(
                            s, v, inner.tree,
                            tuple(inner.from_host.f0[l]
                                  for l in TR.leaves(t))).tree
                        (w_img,) = g1.from_guest.f1[w].vertices
                        rhs = OM.graft(g1.tree, w_img, u).tree
                        assert TR.is_isomorphic(lhs, rhs) is not None
                        count += 1
    return {"suite": "grafting", "triples": count, "ok": True}


def _verify_segal(cfg, operad_path=None) -> dict:
    if operad_path:
        operad = OP.operad_from_dict(json.load(open(operad_path)))
    else:
        operad = OP.ass_operad(max(4, cfg.max_arity))
    site = NV.build_omega_site(cfg.max_vertices, cfg.max_arity, mode="cover")
    F = NV.nerve(operad, site)
    rep = NV.check_segal(F)
    return {"suite": "segal", "operad": operad.name,
            "objects": site.n_objects(), "ok": rep.ok,
            "failures": [v.obj for v in rep.failures()]}


def _verify_approximation(cfg) -> dict:
    palette = tuple(range(cfg.colors))
    rep = TH.check_approximation(
        palette, max_tree_vertices=min(cfg.max_vertices, 2),
        max_arity=min(cfg.max_arity, 2), max_sub_vertices=2,
        max_competitor_vertices=2)
    return {"suite": "approximation", "colors": cfg.colors,
            "objects": rep.objects_checked,
            "cocones": rep.mediator_cocones_checked, "ok": rep.ok}


def _verify_dk(cfg) -> dict:
    rng = random.Random(cfg.seed)
    pool = _dk_pool()
    maps = []
    for a in pool:
        for b in pool:
            maps.extend(OP.enumerate_operad_maps(a, b))
    rng.shuffle(maps)
    maps = maps[:50]
    checked = 0
    for f in maps:
        for g in maps:
            if g.source is not f.target:
                continue
            gf = OP.compose_operad_maps(g, f)
            flags = (OP.is_dk(f), OP.is_dk(g), OP.is_dk(gf))
            assert sum(flags) != 2, (f, g)
            checked += 1
    return {"suite": "dk", "maps": len(maps), "pairs": checked, "ok": True}


def _dk_pool():
    walking = OP.unary_operad(
        ("a", "b"), {"f": ("a", "b")}, {}, name="arrow")
    e1 = OP.unary_operad(
        ("a", "b"), {"f": ("a", "b"), "g": ("b", "a")},
        {("f", "g"): "1b", ("g", "f"): "1a"}, name="E1")
    point = OP.unary_operad(("a",), {}, {}, name="point")
    return [point, walking, e1, OP.comm_operad(2)]


def _verify_compare(cfg) -> dict:
    osite = NV.build_omega_site(min(cfg.max_vertices, 3),
                                min(cfg.max_arity, 2), mode="full")
    f1site = NV.build_forest_site(
        min(cfg.max_length, 3), min(cfg.max_level, 2), max_edges=4,
        mode="full", tree_objects_only=True,
        max_tree_vertices=min(cfg.max_vertices, 3))
    res_a = NV.compare_models(OP.ass_operad(4), osite, f1site)
    res_c = NV.compare_models(OP.comm_operad(4), osite, f1site)
    return {"suite": "compare", "ass_ok": res_a["ok"], "comm_ok": res_c["ok"],
            "ok": res_a["ok"] and res_c["ok"]}


VERIFY_SUITES = {
    "factorization": _verify_factorization,
    "cor": _verify_cor,
    "grafting": _verify_grafting,
    "segal": _verify_segal,
    "approximation": _verify_approximation,
    "dk": _verify_dk,
    "compare": _verify_compare,
}


def cmd_verify(args) -> int:
    cfg = _config(args)
    suite = VERIFY_SUITES[args.suite]
    try:
        if args.suite == "segal":
            result = suite(cfg, getattr(args, "operad", None))
        else:
            result = suite(cfg)
    except AssertionError as exc:
        _emit({"suite": args.suite, "ok": False, "witness": str(exc)},
              cfg.fmt)
        return 1
    _emit(result, cfg.fmt)
    return 0 if result.get("ok") else 1


def cmd_export(args) -> int:
    obj = _load_any(args.input)
    if args.format == "dot":
        if isinstance(obj, (TR.Tree, TR.ColoredTree)):
            text = TR.to_dot(obj)
        elif isinstance(obj, (FO.Forest, FO.LabelledForest,
                              FO.EdgeColoredForest)):
            text = FO.forest_to_dot(obj)
        else:
            raise DendronError("no DOT form for this object")
    else:
        if isinstance(obj, (TR.Tree, TR.ColoredTree)):
            text = TR.to_json(obj, indent=2)
        elif isinstance(obj, (FO.Forest, FO.LabelledForest,
                              FO.EdgeColoredForest)):
            text = FO.forest_to_json(obj, indent=2)
        elif isinstance(obj, OM.OmegaMorphism):
            text = OM.morphism_to_json(obj, indent=2)
        elif isinstance(obj, OP.ColoredOperad):
            text = OP.operad_to_json(obj, indent=2)
        else:
            text = NV.presheaf_to_json(obj, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_nerve(args) -> int:
    cfg = _config(args)
    operad = OP.operad_from_dict(json.load(open(args.operad)))
    if args.site == "omega":
        site = NV.build_omega_site(cfg.max_vertices, cfg.max_arity,
                                   mode=args.mode)
    elif args.site == "delta-f":
        site = NV.build_forest_site(cfg.max_length, cfg.max_level,
                                    cfg.max_edges, mode=args.mode)
    else:
        site = NV.build_forest_site(cfg.max_length, cfg.max_level,
                                    cfg.max_edges, mode=args.mode,
                                    tree_objects_only=True)
    F = NV.nerve(operad, site)
    if args.check_segal:
        rep = NV.check_segal(F)
        _emit(rep.to_dict() if cfg.fmt == "json" else rep.to_text(), cfg.fmt)
        return 0 if rep.ok else 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(NV.presheaf_to_json(F, indent=2) + "\n")
    else:
        _emit({"objects": site.n_objects(),
               "values": [len(v) for v in F.values]}, cfg.fmt)
    return 0


def cmd_check_operad(args) -> int:
    cfg = _config(args)
    try:
        operad = OP.operad_from_dict(json.load(open(args.input)))
    except OperadValidationError as exc:
        _emit({"ok": False, "error": str(exc)}, cfg.fmt)
        return 1
    _emit({"ok": True, "colors": len(operad.colors),
           "operations": len(operad.ops()),
           "truncated": operad.truncated}, cfg.fmt)
    return 0


def cmd_check_approximation(args) -> int:
    cfg = _config(args)
    palette = tuple(range(cfg.colors))
    rep = TH.check_approximation(
        palette, max_tree_vertices=cfg.max_vertices,
        max_arity=cfg.max_arity, max_sub_vertices=args.max_sub_vertices,
        max_competitor_vertices=args.max_competitor_vertices,
        certify_cartesian=not args.no_certify)
    payload = {"ok": rep.ok, "objects": rep.objects_checked,
               "inert_lifts": rep.inert_lifts_checked,
               "cartesian_lifts": rep.cartesian_lifts_checked,
               "mediator_cocones": rep.mediator_cocones_checked,
               "failures": [repr(f) for f in rep.failures]}
    _emit(payload, cfg.fmt)
    return 0 if rep.ok else 1


def _add_bounds(p, vertices=True, forest=True):
    if vertices:
        p.add_argument("--max-vertices", type=int, default=3)
        p.add_argument("--max-arity", type=int, default=3)
    if forest:
        p.add_argument("--max-length", type=int, default=3)
        p.add_argument("--max-level", type=int, default=3)
        p.add_argument("--max-edges", type=int, default=None)
    p.add_argument("--colors", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dendron",
        description="Trees, forests, operads: enumeration and verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enum", help="enumerate canonical objects")
    p.add_argument("kind", choices=("trees", "forests", "morphisms"))
    p.add_argument("--from", dest="source", help="source object file")
    p.add_argument("--to", dest="target", help="target object file")
    _add_bounds(p)
    p.set_defaults(func=cmd_enum)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(VERIFY_SUITES))
    p.add_argument("--operad", help="operad file for the segal suite")
    _add_bounds(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="re-emit an object as JSON or DOT")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("nerve", help="nerve of an operad over a site")
    p.add_argument("--operad", required=True)
    p.add_argument("--site", choices=("omega", "delta-f", "delta-f1"),
                   default="omega")
    p.add_argument("--mode", choices=("full", "cover"), default="cover")
    p.add_argument("--check-segal", action="store_true")
    p.add_argument("--out")
    _add_bounds(p)
    p.set_defaults(func=cmd_nerve)

    p = sub.add_parser("check-operad", help="validate an operad file")
    p.add_argument("input")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_operad)

    p = sub.add_parser("check-approximation",
                       help="verify the two lifting conditions")
    p.add_argument("--max-sub-vertices", type=int, default=2)
    p.add_argument("--max-competitor-vertices", type=int, default=2)
    p.add_argument("--no-certify", action="store_true")
    _add_bounds(p, forest=False)
    p.set_defaults(func=cmd_check_approximation)
    return ap


def main(argv=None) -> int:
    work.reset()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except WorkLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DendronError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
