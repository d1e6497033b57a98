"""Document schemas: UTF-8 JSON with canonical "p/q" rationals.

Every writer sorts keys and ends with one newline so documents and golden
files are byte-stable; every reader re-validates through the normal
constructors.  Rationals are emitted as "p/q" in lowest terms with q > 0
(the parser also accepts bare integers).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .catgraph import Arrow, CategoryPresentation
from .charge import ChargeTriple
from .config import Config, DEFAULT_CONFIG
from .mf import an_catalog
from .planar import Vec2
from .polymat import fraction_from_str, fraction_to_str
from .stab import Combo, HNCertificate, StabilityCondition, combo


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save(doc, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def load(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --- presentations -----------------------------------------------------------

def presentation_to_doc(c: CategoryPresentation,
                        builder: Optional[dict] = None) -> dict:
    doc = {
        "objects": list(c.objects),
        "shift": dict(c.shift),
        "arrows": [{"id": a.arrow_id, "src": a.src, "dst": a.dst,
                    "degree": fraction_to_str(a.degree), "label": a.label}
                   for a in c.arrows],
    }
    if builder:
        doc["builder"] = dict(builder)
    return doc


def presentation_from_doc(doc: dict,
                          config: Config = DEFAULT_CONFIG) -> CategoryPresentation:
    backend = None
    builder = doc.get("builder")
    if builder and builder.get("kind") == "an-zd":
        backend = an_catalog(int(builder["n"]), int(builder["d"]), config)
    arrows = tuple(Arrow(a["id"], a["src"], a["dst"],
                         fraction_from_str(a["degree"]), a.get("label", ""))
                   for a in doc["arrows"])
    return CategoryPresentation(tuple(doc["objects"]), dict(doc["shift"]),
                                arrows, backend=backend)


# --- charge documents --------------------------------------------------------

def _vec_to_doc(z: Vec2) -> List[str]:
    return [fraction_to_str(z[0]), fraction_to_str(z[1])]


def _vec_from_doc(doc: Sequence) -> Vec2:
    return (Fraction(fraction_from_str(str(doc[0]))),
            Fraction(fraction_from_str(str(doc[1]))))


def triple_to_doc(r: ChargeTriple) -> dict:
    return {
        "lattice_rank": r.lattice_rank,
        "v": {o: list(vec) for o, vec in r.v.items()},
        "Z": [_vec_to_doc(z) for z in r.Z],
        "phi": {o: fraction_to_str(p) for o, p in r.phi.items()},
        "q": {a: fraction_to_str(d) for a, d in r.q.items()},
    }


def triple_from_doc(doc: dict) -> ChargeTriple:
    return ChargeTriple(
        int(doc["lattice_rank"]),
        {o: tuple(int(x) for x in vec) for o, vec in doc["v"].items()},
        tuple(_vec_from_doc(z) for z in doc["Z"]),
        {o: fraction_from_str(p) for o, p in doc["phi"].items()},
        {a: fraction_from_str(d) for a, d in doc["q"].items()},
    )


# --- stability documents -----------------------------------------------------

def _combo_to_doc(c: Combo) -> Dict[str, str]:
    return {a: fraction_to_str(v) for a, v in c}


def _combo_from_doc(doc: Dict[str, str]) -> Combo:
    return combo({a: fraction_from_str(v) for a, v in doc.items()})


def certificate_to_doc(cert: HNCertificate) -> dict:
    return {
        "object": cert.obj,
        "factors": [list(f) for f in cert.factors],
        "middles": list(cert.middles),
        "phases": [fraction_to_str(p) for p in cert.phases],
        "gaps": [fraction_to_str(g) for g in cert.gaps],
        "f_maps": [_combo_to_doc(m) for m in cert.f_maps],
        "p_maps": [_combo_to_doc(m) for m in cert.p_maps],
        "t_maps": [_combo_to_doc(m) for m in cert.t_maps],
    }


def certificate_from_doc(doc: dict) -> HNCertificate:
    return HNCertificate(
        doc["object"],
        tuple(tuple(f) for f in doc["factors"]),
        tuple(doc["middles"]),
        tuple(fraction_from_str(p) for p in doc["phases"]),
        tuple(fraction_from_str(g) for g in doc["gaps"]),
        tuple(_combo_from_doc(m) for m in doc["f_maps"]),
        tuple(_combo_from_doc(m) for m in doc["p_maps"]),
        tuple(_combo_from_doc(m) for m in doc["t_maps"]),
    )


def stability_to_doc(s: StabilityCondition) -> dict:
    return {
        "triple": triple_to_doc(s.triple),
        "slicing": {o: fraction_to_str(p) for o, p in s.slicing.items()},
        "hn": {o: certificate_to_doc(cert) for o, cert in s.hn_table.items()},
    }


def stability_from_doc(doc: dict) -> StabilityCondition:
    return StabilityCondition(
        triple_from_doc(doc["triple"]),
        {o: fraction_from_str(p) for o, p in doc["slicing"].items()},
        {o: certificate_from_doc(cd) for o, cd in doc["hn"].items()},
    )


# --- paths and loops ---------------------------------------------------------

def path_to_doc(samples: Sequence[Sequence[Vec2]]) -> dict:
    return {"samples": [[_vec_to_doc(z) for z in sample] for sample in samples]}


def path_from_doc(doc: dict) -> List[Tuple[Vec2, ...]]:
    return [tuple(_vec_from_doc(z) for z in sample) for sample in doc["samples"]]


def loops_to_doc(loops: Sequence[Sequence[Sequence[Vec2]]]) -> dict:
    return {"loops": [path_to_doc(loop)["samples"] for loop in loops]}


def loops_from_doc(doc: dict) -> List[List[Tuple[Vec2, ...]]]:
    return [[tuple(_vec_from_doc(z) for z in sample) for sample in loop]
            for loop in doc["loops"]]


# --- config ------------------------------------------------------------------

def config_from_doc(doc: dict, base: Config = DEFAULT_CONFIG) -> Config:
    return Config(bound=int(doc.get("bound", base.bound)),
                  rcharge_scale=int(doc.get("rcharge_scale", base.rcharge_scale)),
                  window=int(doc.get("window", base.window)))
