"""Command-line front end.

cyclic-stab build  <example> --out DIR
cyclic-stab check  <kind> --presentation P [--charge C] [--stability S]
cyclic-stab plot   --charge C [--path PATH] --out FILE.svg
cyclic-stab monodromy --presentation P --stability S --loops L

Exit codes: 0 pass, 1 check failed, 2 document/usage error.  Reports are
dual-format: human-readable lines first, then machine-readable key=value
lines (no spaces around '=') that scripts can parse.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from . import builders, docs, stab
from .charge import liftable_triple, maslov_table, validate_triple
from .config import Config, config_from_env
from .lift import InvalidTriple, MaslovObstruction, build_z_lift, check_bridgeland
from .polymat import fraction_to_str


def _machine(kv: Dict[str, str]) -> List[str]:
    return [f"{k}={v}" for k, v in sorted(kv.items())]


def _display_names(c) -> Dict[str, str]:
    if c.backend is None:
        return {}
    return {o: c.backend.display_name(o) for o in c.objects}


def _load_config(args) -> Config:
    cfg = config_from_env()
    if getattr(args, "config", None):
        cfg = docs.config_from_doc(docs.load(args.config), cfg)
    return cfg


def cmd_build(args) -> int:
    cfg = _load_config(args)
    out = args.out
    os.makedirs(out, exist_ok=True)
    example = args.example
    an = re.fullmatch(r"an-zd:(\d+),(\d+)", example)
    if example in ("a2-z3-walcher", "a2-z3-mirror"):
        c = builders.an_presentation(2, 3, cfg)
        docs.save(docs.presentation_to_doc(
            c, {"kind": "an-zd", "n": 2, "d": 3}), f"{out}/presentation.json")
        if example == "a2-z3-walcher":
            triple = builders.walcher_triple(cfg)
            s = builders.walcher_stability(cfg)
        else:
            triple = builders.mirror_triple(cfg)
            s = builders.mirror_stability_candidate(cfg)
        docs.save(docs.triple_to_doc(triple), f"{out}/charge.json")
        docs.save(docs.stability_to_doc(s), f"{out}/stability.json")
        if example == "a2-z3-walcher":
            docs.save(docs.path_to_doc(builders.figure_deformation_path()),
                      f"{out}/figure-path.json")
            docs.save(docs.loops_to_doc(builders.generator_loops()),
                      f"{out}/generator-loops.json")
            docs.save(docs.loops_to_doc([builders.contractible_loop()]),
                      f"{out}/contractible-loop.json")
        print(f"wrote {example} documents to {out}")
        for line in _machine({"result": "ok", "example": example}):
            print(line)
        return 0
    if an:
        n, d = int(an.group(1)), int(an.group(2))
        try:
            c = builders.an_presentation(n, d, cfg)
        except ValueError as exc:
            print(f"cannot build {example}: {exc}")
            print("result=error")
            return 2
        docs.save(docs.presentation_to_doc(
            c, {"kind": "an-zd", "n": n, "d": d}), f"{out}/presentation.json")
        print(f"wrote presentation with {len(c.objects)} objects to {out}")
        for line in _machine({"result": "ok", "example": example,
                              "objects": str(len(c.objects))}):
            print(line)
        return 0
    print(f"unknown example {example!r}; expected a2-z3-walcher, a2-z3-mirror "
          f"or an-zd:<n>,<d>")
    print("result=error")
    return 2


def _load_presentation(args, cfg: Config):
    doc = docs.load(args.presentation)
    return docs.presentation_from_doc(doc, cfg)


def cmd_check(args) -> int:
    cfg = _load_config(args)
    try:
        c = _load_presentation(args, cfg)
        kind = args.kind
        if kind == "triple":
            r = docs.triple_from_doc(docs.load(args.charge))
            rep = validate_triple(r, c)
            for v in rep.violations:
                print(f"violation: {v}")
            print("all charge-triple conditions hold" if rep.passed
                  else "charge triple is invalid")
            kv = {f"condition.{k}": str(v).lower() for k, v in rep.conditions.items()}
            kv["result"] = "pass" if rep.passed else "fail"
            for line in _machine(kv):
                print(line)
            return 0 if rep.passed else 1
        if kind == "liftable":
            r = docs.triple_from_doc(docs.load(args.charge))
            ok, info = liftable_triple(r, c)
            if info["witness"]:
                arrow, idx = info["witness"]
                print(f"witness loop at {arrow} has Maslov index {idx}")
            print("liftable" if ok else "not liftable")
            kv = {"result": "pass" if ok else "fail"}
            for a, m in info["indices"].items():
                kv[f"maslov.{a}"] = fraction_to_str(m)
            for line in _machine(kv):
                print(line)
            return 0 if ok else 1
        if kind == "maslov":
            r = docs.triple_from_doc(docs.load(args.charge))
            table = maslov_table(r, c)
            zero = all(v == 0 for v in table.values())
            for a in sorted(table):
                print(f"basic loop at {a}: index {table[a]}")
            witnesses = [a for a in sorted(table) if table[a] != 0]
            if witnesses:
                print(f"nonzero indices at: {', '.join(witnesses)}")
            kv = {f"maslov.{a}": fraction_to_str(v) for a, v in table.items()}
            kv["result"] = "pass" if zero else "fail"
            for line in _machine(kv):
                print(line)
            return 0 if zero else 1
        if kind == "stability":
            s = docs.stability_from_doc(docs.load(args.stability))
            rep = stab.validate_stability(s, c)
            for v in rep.violations:
                print(f"violation: {v}")
            print("stability condition verified" if rep.passed
                  else "not a stability condition")
            kv = {f"condition.{k}": str(v).lower() for k, v in rep.conditions.items()}
            kv["result"] = "pass" if rep.passed else "fail"
            for line in _machine(kv):
                print(line)
            return 0 if rep.passed else 1
        if kind == "bridgeland":
            s = docs.stability_from_doc(docs.load(args.stability))
            try:
                lifted, slicing, hn = stab.lift_stability(s, c, cfg.window)
            except (MaslovObstruction, InvalidTriple) as exc:
                print(f"no lift: {exc}")
                print("result=fail")
                print("lift=obstructed")
                return 1
            rep = check_bridgeland(lifted, slicing, hn)
            for v in rep["violations"]:
                print(f"violation: {v}")
            print("Bridgeland axioms hold on the window" if rep["passed"]
                  else "Bridgeland axioms fail")
            kv = {f"clause.{k}": str(v).lower() for k, v in rep["checks"].items()}
            kv["result"] = "pass" if rep["passed"] else "fail"
            kv["window"] = str(rep["window"])
            for line in _machine(kv):
                print(line)
            return 0 if rep["passed"] else 1
        print(f"unknown check kind {args.kind!r}")
        print("result=error")
        return 2
    except (OSError, KeyError, ValueError) as exc:
        print(f"document error: {exc}")
        print("result=error")
        return 2


def cmd_plot(args) -> int:
    cfg = _load_config(args)
    try:
        triple = docs.triple_from_doc(docs.load(args.charge))
        names = {}
        if args.presentation:
            c = _load_presentation(args, cfg)
            names = _display_names(c)
        samples = None
        if args.path:
            samples = docs.path_from_doc(docs.load(args.path))
        content = __import__("cyclic_stab.svg", fromlist=["render_charges"]) \
            .render_charges(triple, names, samples)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(content)
        print(f"wrote {args.out}")
        print("result=ok")
        return 0
    except (OSError, KeyError, ValueError) as exc:
        print(f"document error: {exc}")
        print("result=error")
        return 2


def cmd_monodromy(args) -> int:
    cfg = _load_config(args)
    try:
        c = _load_presentation(args, cfg)
        s = docs.stability_from_doc(docs.load(args.stability))
        loops = docs.loops_from_doc(docs.load(args.loops))
    except (OSError, KeyError, ValueError) as exc:
        print(f"document error: {exc}")
        print("result=error")
        return 2
    try:
        report = stab.monodromy_word(s, loops, c)
    except stab.LoopNotClosed as exc:
        print(f"LoopNotClosed: {exc}")
        print("result=error")
        return 2
    for k, info in enumerate(report.per_loop):
        moved = {o: fraction_to_str(v) for o, v in info["offsets"].items() if v != 0}
        print(f"loop {k}: offsets {moved or 'none'}; "
              f"{'identity' if info['identity_on_base'] else 'non-identity'} on base")
        for ev in info["events"]:
            print(f"  event {ev}")
    print(f"composite: {'identity' if report.identity_on_base else 'non-identity'} "
          f"on the base")
    kv = {"result": "ok",
          "composite": "identity" if report.identity_on_base else "non-identity"}
    if report.lifted_offset is not None:
        print(f"lifted offset: {report.lifted_offset:+}")
        kv["lifted_offset"] = fraction_to_str(report.lifted_offset)
    else:
        print("lifted offset: non-uniform")
        kv["lifted_offset"] = "non-uniform"
    for o, v in report.composite_offsets.items():
        kv[f"offset.{o}"] = fraction_to_str(v)
    for line in _machine(kv):
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyclic-stab",
                                description="stability workbench for 2-periodic "
                                            "matrix-factorization categories")
    p.add_argument("--config", help="JSON config: bound, rcharge_scale, window")
    sub = p.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", help="write example documents")
    b.add_argument("example",
                   help="a2-z3-walcher | a2-z3-mirror | an-zd:<n>,<d>")
    b.add_argument("--out", required=True, help="output directory")
    b.set_defaults(func=cmd_build)
    ck = sub.add_parser("check", help="run a verification")
    ck.add_argument("kind", choices=["triple", "liftable", "maslov",
                                     "stability", "bridgeland"])
    ck.add_argument("--presentation", required=True)
    ck.add_argument("--charge")
    ck.add_argument("--stability")
    ck.set_defaults(func=cmd_check)
    pl = sub.add_parser("plot", help="render the charge plane to SVG")
    pl.add_argument("--charge", required=True)
    pl.add_argument("--presentation")
    pl.add_argument("--path")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    mo = sub.add_parser("monodromy", help="compose charge loops")
    mo.add_argument("--presentation", required=True)
    mo.add_argument("--stability", required=True)
    mo.add_argument("--loops", required=True)
    mo.set_defaults(func=cmd_monodromy)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
