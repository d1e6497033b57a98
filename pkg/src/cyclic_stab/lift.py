"""Integer-graded covers of a cyclic presentation.

The lift of a charge triple has objects (E, level) with level = phi(E) mod 2
and morphisms the arrows whose degree matches the level difference.  It is
materialised on a finite level window; every statement checked here is
window-relative and the window is part of the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .catgraph import CategoryPresentation
from .charge import ChargeTriple, deformation_equivalent, maslov_table, validate_triple

LiftedObject = Tuple[str, Fraction]  # (base object, level)


class MaslovObstruction(ValueError):
    """A basic loop has nonzero Maslov index: no integer lift exists."""


class InvalidTriple(ValueError):
    """The charge triple fails its own validation."""


class NotDeformationEquivalent(ValueError):
    """Connection equivalences exist only over one deformation class."""


@dataclass(frozen=True)
class LiftedCategory:
    base: CategoryPresentation
    triple: ChargeTriple
    window: int
    objects: Tuple[LiftedObject, ...]
    cone_table: Dict[str, dict] = field(default_factory=dict, compare=False)

    def has_object(self, lobj: LiftedObject) -> bool:
        return lobj in set(self.objects)

    def shift_object(self, lobj: LiftedObject) -> LiftedObject:
        obj, level = lobj
        return (self.base.shift[obj], level + 1)

    def hom(self, src: LiftedObject, dst: LiftedObject) -> List[str]:
        """Arrow ids realising Hom(src, dst); 'id' for equal objects."""
        (so, sl), (do_, dl) = src, dst
        out = []
        if so == do_ and sl == dl:
            out.append("id")
        for a in self.base.arrows_between(so, do_):
            if self.triple.q[a.arrow_id] == dl - sl:
                out.append(a.arrow_id)
        return out

    def hom_dim(self, src: LiftedObject, dst: LiftedObject) -> int:
        return len(self.hom(src, dst))

    def project(self, lobj: LiftedObject) -> str:
        return lobj[0]

    def report(self) -> dict:
        dims = {}
        for a in sorted(self.objects):
            for b in sorted(self.objects):
                d = self.hom_dim(a, b)
                if d:
                    dims[f"({a[0]},{a[1]})->({b[0]},{b[1]})"] = d
        return {"window": self.window,
                "objects": [[o, str(l)] for o, l in sorted(self.objects)],
                "hom_dims": dims}


def _combo_degree(combo: Dict[str, Fraction], q: Dict[str, Fraction]) -> Fraction:
    """Common degree of a homogeneous arrow combination."""
    degs = {q[a] for a in combo if a != "id"}
    if "id" in combo:
        degs.add(Fraction(0))
    if len(degs) != 1:
        raise ValueError(f"combination {combo} is not homogeneous")
    return degs.pop()


def build_z_lift(c: CategoryPresentation, r: ChargeTriple, window: int = 2) -> LiftedCategory:
    """Materialise the lift on levels within +-window of the base phases.

    Requires the triple to validate and every catalog basic loop to have
    Maslov index zero; lifted cone existence is certified for each in-window
    arrow instance by checking that the triangle closes at level +1.
    """
    rep = validate_triple(r, c)
    if not rep.passed:
        raise InvalidTriple("; ".join(rep.violations))
    table = maslov_table(r, c)
    for key in sorted(table):
        if table[key] != 0:
            raise MaslovObstruction(f"basic loop at {key} has index {table[key]}")
    ks = range(-(window // 2), window // 2 + 1)
    objects = tuple(sorted((o, r.phi[o] + 2 * k) for o in c.objects for k in ks))
    backend = c.backend
    cone_table: Dict[str, dict] = {}
    if backend is not None:
        for a in c.arrows:
            data = backend.cone_data(a.arrow_id)
            qf = r.q[a.arrow_id]
            qg = _combo_degree(data["g_arrows"], r.q)
            qh = _combo_degree(data["h_arrows"], r.q)
            if qf + qg + qh != 1:
                raise MaslovObstruction(
                    f"triangle over {a.arrow_id} does not close at level +1")
            cone_table[a.arrow_id] = {"cone": data["cone_name"], "qg": qg, "qh": qh}
    return LiftedCategory(c, r, window, objects, cone_table)


def lifted_hom_partition(lift: LiftedCategory, src: str, dst: str) -> Dict[Fraction, int]:
    """Base hom dimensions split by lifted level difference.

    Summing the values recovers the number of base arrows (plus identity),
    which is the window-relative form of the covering decomposition.
    """
    out: Dict[Fraction, int] = {}
    if src == dst:
        out[Fraction(0)] = out.get(Fraction(0), 0) + 1
    for a in lift.base.arrows_between(src, dst):
        d = lift.triple.q[a.arrow_id]
        out[d] = out.get(d, 0) + 1
    return out


def connection_equiv(l1: LiftedCategory, l2: LiftedCategory,
                     base_object: str) -> Dict[str, Fraction]:
    """Level relabeling (E, l) -> (E, l + offset(E)) between two lifts.

    Propagates from base_object along a spanning tree as the deformation
    class dictates; commutes with shift and covers the identity on the base.
    """
    if l1.base.objects != l2.base.objects:
        raise NotDeformationEquivalent("different base categories")
    ok, _ = deformation_equivalent(l1.triple, l2.triple, l1.base)
    if not ok:
        raise NotDeformationEquivalent("charge triples are not deformation equivalent")
    c = l1.base
    q1, q2 = l1.triple.q, l2.triple.q
    offset: Dict[str, Fraction] = {
        base_object: l2.triple.phi[base_object] - l1.triple.phi[base_object]}
    adj: Dict[str, List[Tuple[str, Fraction]]] = {o: [] for o in c.objects}
    for a in c.arrows:
        dq = q2[a.arrow_id] - q1[a.arrow_id]
        adj[a.src].append((a.dst, dq))
        adj[a.dst].append((a.src, -dq))
    stack = [base_object]
    while stack:
        cur = stack.pop()
        for nxt, dq in adj[cur]:
            if nxt not in offset:
                offset[nxt] = offset[cur] + dq
                stack.append(nxt)
    if len(offset) != len(c.objects):
        raise NotDeformationEquivalent("base category is not connective")
    for o in c.objects:
        if offset[c.shift[o]] != offset[o]:
            raise AssertionError("relabeling does not commute with shift")
    return offset


def check_bridgeland(lift: LiftedCategory, slicing: Dict[LiftedObject, Fraction],
                     hn: Optional[Dict[LiftedObject, dict]] = None) -> dict:
    """Bridgeland axioms on the window: (a) polar form, (b) slice shift,
    (c) no maps from higher to lower phase, (d) filtrations for everything.

    Report-based: returns per-clause pass/fail with witnesses.
    """
    from . import planar
    hn = hn or {}
    report = {"window": lift.window, "checks": {}, "violations": []}
    ok_a = True
    for (obj, level), phase in slicing.items():
        if phase != level:
            ok_a = False
            report["violations"].append(f"(a) {(obj, level)} sliced at {phase}")
            continue
        z = lift.triple.charge_of(obj)
        if planar.is_zero(z):
            ok_a = False
            report["violations"].append(f"(a) {(obj, level)} has zero charge")
        elif not planar.aligned_with_phase(z, planar.normalize_phase(level)):
            ok_a = False
            report["violations"].append(f"(a) {(obj, level)} misaligned")
    report["checks"]["a_polar_form"] = ok_a
    ok_b = True
    members = set(slicing)
    for (obj, level) in members:
        shifted = (lift.base.shift[obj], level + 1)
        if lift.has_object(shifted) and shifted not in members:
            ok_b = False
            report["violations"].append(f"(b) {(obj, level)}[1] missing from slicing")
    report["checks"]["b_slice_shift"] = ok_b
    ok_c = True
    for src in members:
        for dst in members:
            if slicing[src] > slicing[dst]:
                arrows = [a for a in lift.hom(src, dst) if a != "id"]
                if arrows:
                    ok_c = False
                    report["violations"].append(
                        f"(c) arrows {arrows} from phase {slicing[src]} "
                        f"to lower phase {slicing[dst]}")
    report["checks"]["c_no_downward_maps"] = ok_c
    ok_d = True
    for lobj in lift.objects:
        if lobj in members:
            continue
        cert = hn.get(lobj)
        if cert is None:
            ok_d = False
            report["violations"].append(f"(d) {lobj} has no filtration data")
            continue
        levels = [lvl for (_o, lvl) in cert["factors"]]
        if not all(levels[i] > levels[i + 1] for i in range(len(levels) - 1)):
            ok_d = False
            report["violations"].append(f"(d) {lobj} factors not strictly decreasing")
        for fobj in cert["factors"]:
            if tuple(fobj) not in members:
                ok_d = False
                report["violations"].append(f"(d) factor {fobj} of {lobj} not semistable")
    report["checks"]["d_filtrations"] = ok_d
    report["passed"] = all(report["checks"].values())
    return report
