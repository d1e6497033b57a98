"""Stability conditions, Harder-Narasimhan machinery, comparison maps and
charge-path monodromy.

A stability condition is a charge triple plus a circle slicing (declared
semistable objects with phases) and a filtration certificate for every
unstable object.  Certificates are verified against the matrix-factorization
backend: each filtration step must be an honest distinguished triangle (cone
matched by fingerprint plus explicit inverse pair), the filtration diagram
must be connective and liftable, and consecutive-factor connecting paths
must all carry one strictly negative degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import mf, planar
from .catgraph import (CategoryPresentation, Diagram, DiagramVertex,
                       diagram_connective, is_liftable, make_edge,
                       simple_paths_between_vertices)
from .charge import ChargeTriple, Report, validate_triple
from .lift import LiftedCategory, build_z_lift, check_bridgeland
from .planar import ChargeVanished, StepTooLarge, UnrepresentablePhase, Vec2

Combo = Tuple[Tuple[str, Fraction], ...]  # sorted (arrow id, coefficient)


class NoFiltration(ValueError):
    """Exhaustive search found no valid filtration."""


class InvalidBridgeland(ValueError):
    """Push-down requires data passing the Bridgeland checks."""


def combo(d: Dict[str, Fraction]) -> Combo:
    return tuple(sorted((k, Fraction(v)) for k, v in d.items() if v != 0))


def combo_dict(c: Combo) -> Dict[str, Fraction]:
    return {k: v for k, v in c}


def _combo_hom(backend, src: str, dst: str, c: Combo) -> mf.HomElement:
    total = None
    for aid, coeff in c:
        h = (mf.identity_hom(backend.objects[src]) if aid == "id"
             else backend.arrow(aid).hom)
        term = h.scale(coeff)
        total = term if total is None else total + term
    if total is None:
        total = mf.zero_hom(backend.objects[src], backend.objects[dst], 0)
    return total


def _combo_degree(c: Combo, q: Dict[str, Fraction]) -> Fraction:
    degs = {q[a] if a != "id" else Fraction(0) for a, _ in c}
    if len(degs) != 1:
        raise ValueError(f"combination {c} is not homogeneous")
    return degs.pop()


def _class_vector(backend, src: str, dst: str,
                  h: mf.HomElement) -> Optional[Tuple[Fraction, ...]]:
    basis = backend.hom_basis(src, dst, 0)
    if src == dst:
        basis = basis + [mf.identity_hom(backend.objects[src])]
    coeffs = mf.decompose_over_basis(h, basis)
    return None if coeffs is None else tuple(coeffs)


@dataclass(frozen=True)
class HNCertificate:
    """Filtration tower with explicit cone realisations.

    factors[i] is the multiset of the (i+1)-st semistable factor (search
    emits singletons); middles[i] is E_{i+1}; maps are arrow combinations.
    """

    obj: str
    factors: Tuple[Tuple[str, ...], ...]
    middles: Tuple[str, ...]
    phases: Tuple[Fraction, ...]
    gaps: Tuple[Fraction, ...]
    f_maps: Tuple[Combo, ...]
    p_maps: Tuple[Combo, ...]
    t_maps: Tuple[Combo, ...]

    @property
    def length(self) -> int:
        return len(self.factors)


def trivial_certificate(obj: str, phase: Fraction) -> HNCertificate:
    return HNCertificate(obj, ((obj,),), (obj,), (Fraction(phase),), (),
                         (), (combo({"id": Fraction(1)}),), ())


def hn_diagram(cert: HNCertificate, backend) -> Diagram:
    """Filtration diagram: middles row, factors row, connecting shifts."""
    vertices = []
    edges = []
    n = cert.length
    for i in range(n):
        vertices.append(DiagramVertex(f"E{i + 1}", (cert.middles[i],)))
        vertices.append(DiagramVertex(f"Q{i + 1}", cert.factors[i]))
    for i in range(1, n):
        s_obj = backend.shift_map[cert.middles[i - 1]]
        vertices.append(DiagramVertex(f"S{i}", (s_obj,)))
    for i in range(n):
        blocks = {(0, 0): _block_arrow(cert.p_maps[i])}
        edges.append(make_edge(f"p{i + 1}", f"E{i + 1}", f"Q{i + 1}", blocks))
    for i in range(2, n + 1):
        edges.append(make_edge(f"f{i}", f"E{i - 1}", f"E{i}",
                               {(0, 0): _block_arrow(cert.f_maps[i - 2])}))
        edges.append(make_edge(f"t{i}", f"Q{i}", f"S{i - 1}",
                               {(0, 0): _block_arrow(cert.t_maps[i - 2])}))
    return Diagram(tuple(vertices), tuple(edges))


def _block_arrow(c: Combo) -> str:
    """Representative arrow id of a homogeneous combination (degree data)."""
    if not c:
        raise ValueError("zero map cannot appear in a filtration diagram")
    return c[0][0]


def verify_certificate(cert: HNCertificate, triple: ChargeTriple,
                       slicing: Dict[str, Fraction],
                       c: CategoryPresentation) -> List[str]:
    """All certificate checks; returns a list of problems (empty = valid)."""
    backend = c.backend
    problems: List[str] = []
    n = cert.length
    if n == 0:
        return ["certificate has no factors"]
    if cert.middles[-1] != cert.obj:
        problems.append("last filtration step is not the object itself")
    for i, fac in enumerate(cert.factors):
        for q_obj in fac:
            if q_obj not in slicing:
                problems.append(f"factor {q_obj} is not declared semistable")
            elif slicing[q_obj] != cert.phases[i]:
                problems.append(f"factor {q_obj} phase differs from the slicing")
    if n == 1:
        if cert.obj not in slicing:
            problems.append("length-1 certificate for an object outside the slicing")
        return problems
    if len(cert.middles) != n or len(cert.phases) != n or len(cert.gaps) != n - 1 \
            or len(cert.f_maps) != n - 1 or len(cert.p_maps) != n \
            or len(cert.t_maps) != n - 1:
        return ["certificate table lengths are inconsistent"]
    if any(len(fac) != 1 for fac in cert.factors):
        problems.append("only singleton factors are certifiable at this scale")
        return problems
    if cert.middles[0] != cert.factors[0][0]:
        problems.append("first step must equal the first factor")
    # p_1 is an isomorphism E_1 -> Q_1
    p1 = _combo_hom(backend, cert.middles[0], cert.factors[0][0], cert.p_maps[0])
    v = _class_vector(backend, cert.middles[0], cert.factors[0][0], p1)
    if v is None or all(x == 0 for x in v):
        problems.append("p_1 is nullhomotopic")
    # triangles
    for i in range(2, n + 1):
        prev_mid, mid = cert.middles[i - 2], cert.middles[i - 1]
        q_obj = cert.factors[i - 1][0]
        f_hom = _combo_hom(backend, prev_mid, mid, cert.f_maps[i - 2])
        if not f_hom.is_closed():
            problems.append(f"f_{i} is not closed")
            continue
        cone_obj, g_can, h_can = mf.cone(f_hom)
        try:
            name, to_cat, from_cat = backend.identify(cone_obj)
        except ValueError:
            problems.append(f"cone of f_{i} is not a catalog class")
            continue
        if name != q_obj:
            problems.append(f"cone of f_{i} is {name}, certificate claims {q_obj}")
            continue
        p_can = mf.compose(to_cat, g_can)                     # E_i -> Q_i
        sigma = backend.shift_iso[prev_mid]                   # shift(E_{i-1}) -> cat
        t_can = mf.compose(sigma, mf.compose(h_can, from_cat))  # Q_i -> S_{i-1}
        p_decl = _combo_hom(backend, mid, q_obj, cert.p_maps[i - 1])
        t_decl = _combo_hom(backend, q_obj, backend.shift_map[prev_mid],
                            cert.t_maps[i - 2])
        vp_can = _class_vector(backend, mid, q_obj, p_can)
        vp_decl = _class_vector(backend, mid, q_obj, p_decl)
        vt_can = _class_vector(backend, q_obj, backend.shift_map[prev_mid], t_can)
        vt_decl = _class_vector(backend, q_obj, backend.shift_map[prev_mid], t_decl)
        if None in (vp_can, vp_decl, vt_can, vt_decl):
            problems.append(f"triangle {i}: maps do not decompose over the catalog")
            continue
        mu = _proportionality(vp_decl, vp_can)
        if mu is None or mu == 0:
            problems.append(f"triangle {i}: p_{i} is not the cone projection")
            continue
        if tuple(x * mu for x in vt_decl) != vt_can:
            problems.append(f"triangle {i}: t_{i} inconsistent with the cone maps")
    # composition nonvanishing for the interior filtration maps
    for i in range(2, n):
        total = _combo_hom(backend, cert.middles[i - 2], cert.middles[i - 1],
                           cert.f_maps[i - 2])
        for j in range(i + 1, n + 1):
            nxt = _combo_hom(backend, cert.middles[j - 2], cert.middles[j - 1],
                             cert.f_maps[j - 2])
            total = mf.compose(nxt, total)
            if mf.is_exact(total):
                problems.append(f"composite f_{j}..f_{i} vanishes")
                break
    # diagram checks
    diagram = hn_diagram(cert, backend)
    if not diagram_connective(diagram, c):
        problems.append("filtration diagram is not connective")
    ok, witness = is_liftable(diagram, c, dict(triple.q))
    if not ok:
        problems.append(f"filtration diagram not liftable: loop degree {witness[1]}")
    for i in range(2, n + 1):
        degs = set(simple_paths_between_vertices(
            diagram, c, f"Q{i - 1}", f"Q{i}", dict(triple.q)))
        if len(degs) != 1:
            problems.append(f"gap c_{i} is not path independent: {sorted(degs)}")
            continue
        ci = degs.pop()
        if ci != cert.gaps[i - 2]:
            problems.append(f"declared gap c_{i} differs from the diagram")
        if ci >= 0:
            problems.append(f"gap c_{i} = {ci} is not negative")
    return problems


def _proportionality(v1: Sequence[Fraction], v2: Sequence[Fraction]) -> Optional[Fraction]:
    """mu with v1 = mu * v2, or None."""
    mu = None
    for a, b in zip(v1, v2):
        if b == 0:
            if a != 0:
                return None
            continue
        r = a / b
        if mu is None:
            mu = r
        elif mu != r:
            return None
    return mu


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def _shift_combo(backend, c: Combo) -> Combo:
    out: Dict[str, Fraction] = {}
    for aid, coeff in c:
        for bid, c2 in backend.shift_arrow(aid).items():
            out[bid] = out.get(bid, Fraction(0)) + coeff * c2
    return combo(out)


def hn_search(obj: str, triple: ChargeTriple, slicing: Dict[str, Fraction],
              c: CategoryPresentation, max_len: int = 4,
              order: str = "asc") -> HNCertificate:
    """Brute-force filtration search peeling the lowest factor first.

    Deterministic: candidate factors sorted by (phase, id) ascending for
    order="asc", reversed for order="desc"; within a factor, arrows by id.
    Returns the first certificate that verifies; raises NoFiltration.
    """
    backend = c.backend
    if obj not in set(c.objects):
        raise ValueError(f"{obj} is not an indecomposable of the presentation")
    if obj in slicing:
        return trivial_certificate(obj, slicing[obj])

    def candidates():
        members = sorted(slicing, key=lambda o: (slicing[o], o))
        return members if order == "asc" else list(reversed(members))

    def peel(cur: str, budget: int) -> Optional[dict]:
        if cur in slicing:
            return {"factors": [(cur,)], "middles": [cur],
                    "phases": [slicing[cur]],
                    "f": [], "p": [combo({"id": Fraction(1)})], "t": []}
        if budget <= 1:
            return None
        for q_obj in candidates():
            for arrow in sorted(c.arrows_between(cur, q_obj),
                                key=lambda a: a.arrow_id):
                data = backend.cone_data(arrow.arrow_id)
                prev_mid = backend.shift_map[data["cone_name"]]
                sub = peel(prev_mid, budget - 1)
                if sub is None:
                    continue
                t_map = combo(data["g_arrows"])
                base_f = _shift_combo(backend, combo(data["h_arrows"]))
                for sign in (1, -1):
                    f_map = combo({a: sign * v for a, v in base_f})
                    cand = {
                        "factors": sub["factors"] + [(q_obj,)],
                        "middles": sub["middles"] + [cur],
                        "phases": sub["phases"] + [slicing[q_obj]],
                        "f": sub["f"] + [f_map],
                        "p": sub["p"] + [combo({arrow.arrow_id: Fraction(1)})],
                        "t": sub["t"] + [t_map],
                    }
                    cert = _assemble(obj, cand, triple)
                    if cert is not None and not verify_certificate(
                            cert, triple, slicing, c):
                        return cand
        return None

    result = peel(obj, max_len)
    if result is None:
        raise NoFiltration(f"no filtration of {obj} within length {max_len}")
    cert = _assemble(obj, result, triple)
    assert cert is not None
    return cert


def _assemble(obj: str, cand: dict, triple: ChargeTriple) -> Optional[HNCertificate]:
    """Certificate with gaps from the degree function; None if inhomogeneous."""
    try:
        gaps = []
        for i in range(1, len(cand["factors"])):
            q_f = _combo_degree(cand["f"][i - 1], triple.q)
            q_p = _combo_degree(cand["p"][i], triple.q)
            q_prev = _combo_degree(cand["p"][i - 1], triple.q)
            gaps.append(q_f + q_p - q_prev)
    except ValueError:
        return None
    return HNCertificate(obj, tuple(cand["factors"]), tuple(cand["middles"]),
                         tuple(cand["phases"]), tuple(gaps),
                         tuple(cand["f"]), tuple(cand["p"]), tuple(cand["t"]))


def hn_isomorphic(c1: HNCertificate, c2: HNCertificate, c: CategoryPresentation) -> bool:
    """Certificates present isomorphic filtrations of one object.

    Factor multisets, phases and gaps must match stepwise, and each pair of
    filtration maps must agree up to a degree-0 isomorphism of the middles,
    i.e. up to a nonzero scalar on homotopy classes.
    """
    if c1.obj != c2.obj or c1.length != c2.length:
        return False
    if c1.factors != c2.factors or c1.phases != c2.phases or c1.gaps != c2.gaps:
        return False
    if c1.middles != c2.middles:
        return False
    backend = c.backend
    for i in range(c1.length - 1):
        src, dst = c1.middles[i], c1.middles[i + 1]
        h1 = _combo_hom(backend, src, dst, c1.f_maps[i])
        h2 = _combo_hom(backend, src, dst, c2.f_maps[i])
        v1 = _class_vector(backend, src, dst, h1)
        v2 = _class_vector(backend, src, dst, h2)
        if v1 is None or v2 is None:
            return False
        mu = _proportionality(v1, v2)
        if mu is None or mu == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# stability conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityCondition:
    triple: ChargeTriple
    slicing: Dict[str, Fraction]
    hn_table: Dict[str, HNCertificate] = field(default_factory=dict)

    def is_semistable(self, obj: str) -> bool:
        return obj in self.slicing


def validate_stability(s: StabilityCondition, c: CategoryPresentation) -> Report:
    """All seven compatibility conditions; report-based."""
    rep = validate_triple(s.triple, c)
    rep.conditions = {f"c123_{k}": v for k, v in rep.conditions.items()}
    for o, phase in s.slicing.items():
        shifted = c.shift[o]
        target = planar.normalize_phase(phase + 1)
        if shifted not in s.slicing or s.slicing[shifted] != target:
            rep.fail("c4_slice_shift",
                     f"slicing of {o}[1] = {shifted} is not at phase {target}")
    rep.ok("c4_slice_shift")
    for o, phase in s.slicing.items():
        z = s.triple.charge_of(o)
        if planar.is_zero(z):
            rep.fail("c5_slice_mass", f"semistable {o} has zero charge")
        if s.triple.phi[o] != phase:
            rep.fail("c5_slice_mass", f"phi({o}) differs from its slice phase")
    rep.ok("c5_slice_mass")
    for a in c.arrows:
        if a.src in s.slicing and a.dst in s.slicing:
            if s.triple.q[a.arrow_id] < 0:
                rep.fail("c6_semistable_degrees",
                         f"arrow {a.arrow_id} between semistables has "
                         f"q = {s.triple.q[a.arrow_id]} < 0")
    rep.ok("c6_semistable_degrees")
    for o in c.objects:
        if o in s.slicing:
            continue
        cert = s.hn_table.get(o)
        if cert is None:
            rep.fail("c7_filtrations", f"unstable {o} has no certificate")
            continue
        if cert.length < 2:
            rep.fail("c7_filtrations", f"certificate of {o} is trivial")
            continue
        for problem in verify_certificate(cert, s.triple, s.slicing, c):
            rep.fail("c7_filtrations", f"{o}: {problem}")
    rep.ok("c7_filtrations")
    return rep


def stab_equivalent(s1: StabilityCondition, s2: StabilityCondition,
                    c: CategoryPresentation):
    """Equality of slicings/charges, same arrows, isomorphic filtrations and
    equal degrees on semistable-to-semistable connecting paths.

    Returns (flag, failing clause or None).
    """
    if s1.slicing != s2.slicing:
        return False, "clause1_slicing"
    for o in c.objects:
        if s1.triple.charge_of(o) != s2.triple.charge_of(o):
            return False, "clause1_charge"
    if set(s1.triple.q) != set(s2.triple.q):
        return False, "clause2_arrows"
    for o in c.objects:
        if o in s1.slicing:
            continue
        c1, c2 = s1.hn_table.get(o), s2.hn_table.get(o)
        if c1 is None or c2 is None or not hn_isomorphic(c1, c2, c):
            return False, "clause3_filtrations"
    # clause 4: q1 - q2 vanishes on every semistable-to-semistable path
    diff = {a: s1.triple.q[a] - s2.triple.q[a] for a in s1.triple.q}
    from .charge import presentation_diagram
    from .catgraph import cycle_basis
    diagram = presentation_diagram(c)
    for loop in cycle_basis(diagram, c):
        if loop.degree(diagram, c, diff) != 0:
            return False, "clause4_semistable_paths"
    # potential of diff must be constant on semistables per component
    pot: Dict[str, Fraction] = {}
    adj: Dict[str, List[Tuple[str, Fraction]]] = {o: [] for o in c.objects}
    for a in c.arrows:
        adj[a.src].append((a.dst, diff[a.arrow_id]))
        adj[a.dst].append((a.src, -diff[a.arrow_id]))
    for root in c.objects:
        if root in pot:
            continue
        pot[root] = Fraction(0)
        stack = [root]
        component = [root]
        while stack:
            cur = stack.pop()
            for nxt, dv in adj[cur]:
                if nxt not in pot:
                    pot[nxt] = pot[cur] + dv
                    component.append(nxt)
                    stack.append(nxt)
        values = {pot[o] for o in component if o in s1.slicing}
        if len(values) > 1:
            return False, "clause4_semistable_paths"
    return True, None


# ---------------------------------------------------------------------------
# slicing derivation (used by deformation endpoints)
# ---------------------------------------------------------------------------

def derive_slicing(triple: ChargeTriple, c: CategoryPresentation) -> StabilityCondition:
    """Semistable set and filtrations determined by the degree function.

    Iteratively removes any object that splits through a catalog triangle
    with strictly negative connecting degree into currently-semistable
    factors (smallest object first per sweep), then certifies every removed
    object by hn_search and validates the result.
    """
    backend = c.backend
    middles = backend.triangle_middles()
    semis = set(c.objects)
    for o in c.objects:
        if planar.is_zero(triple.charge_of(o)):
            raise ChargeVanished(f"{o} has zero charge: not a strong point")
    while True:
        removed = None
        for o in sorted(semis):
            for t in middles[o]:
                if t["sub"] in semis and t["quot"] in semis:
                    gap = triple.q[t["g_arrow"]] + triple.q[t["f_arrow"]]
                    if gap < 0:
                        removed = o
                        break
            if removed:
                break
        if removed is None:
            break
        semis.discard(removed)
    slicing = {o: triple.phi[o] for o in sorted(semis)}
    hn_table = {}
    for o in sorted(set(c.objects) - semis):
        hn_table[o] = hn_search(o, triple, slicing, c)
    s = StabilityCondition(triple, slicing, hn_table)
    rep = validate_stability(s, c)
    if not rep.passed:
        raise NoFiltration("derived data is not a stability condition: "
                           + "; ".join(rep.violations))
    return s


# ---------------------------------------------------------------------------
# lifting and push-down
# ---------------------------------------------------------------------------

def lift_stability(s: StabilityCondition, c: CategoryPresentation,
                   window: int = 2):
    """(lift, lifted slicing, lifted filtrations) for a stability condition."""
    lifted = build_z_lift(c, s.triple, window)
    slicing: Dict[Tuple[str, Fraction], Fraction] = {}
    for (o, level) in lifted.objects:
        if o in s.slicing:
            slicing[(o, level)] = level
    hn: Dict[Tuple[str, Fraction], dict] = {}
    for (o, level) in lifted.objects:
        if o in s.slicing:
            continue
        cert = s.hn_table[o]
        q_p = _combo_degree(cert.p_maps[-1], s.triple.q)
        factor_levels = [level + q_p]
        for gap in reversed(cert.gaps):
            factor_levels.append(factor_levels[-1] - gap)
        factor_levels.reverse()
        hn[(o, level)] = {
            "factors": [(cert.factors[i][0], factor_levels[i])
                        for i in range(cert.length)],
            "base": cert,
        }
    return lifted, slicing, hn


def push_down(lifted: LiftedCategory, slicing: Dict[Tuple[str, Fraction], Fraction],
              hn: Optional[Dict[Tuple[str, Fraction], dict]] = None,
              max_len: int = 4) -> StabilityCondition:
    """Stability condition induced on the base by Bridgeland data on a lift.

    Slices project along the covering functor; degrees are assigned through
    the last filtration factors of the canonical unstable representatives.
    """
    hn = hn or {}
    c = lifted.base
    report = check_bridgeland(lifted, slicing, hn)
    if not report["passed"]:
        raise InvalidBridgeland("; ".join(report["violations"]))
    base_slicing: Dict[str, Fraction] = {}
    for (o, level), phase in slicing.items():
        reduced = planar.normalize_phase(phase)
        if base_slicing.setdefault(o, reduced) != reduced:
            raise InvalidBridgeland(f"slices of {o} differ mod 2")
    phi: Dict[str, Fraction] = dict(base_slicing)
    canonical: Dict[str, Tuple[str, Fraction]] = {}
    for (o, level) in hn:
        if 0 < level <= 2:
            canonical[o] = (o, level)
            phi[o] = level
    for o in c.objects:
        if o not in phi:
            raise InvalidBridgeland(f"no lifted data determines phi({o})")
    # degree assignment through last filtration factors
    q0 = lifted.triple.q
    q_new: Dict[str, Fraction] = {}
    for a in c.arrows:
        src_sem, dst_sem = a.src in base_slicing, a.dst in base_slicing
        if src_sem and dst_sem:
            q_new[a.arrow_id] = (phi[a.src] + q0[a.arrow_id]) - phi[a.src]
        elif src_sem and not dst_sem:
            k = phi[a.src] + q0[a.arrow_id] - phi[a.dst]
            q_new[a.arrow_id] = k + phi[a.dst] - phi[a.src]
        elif not src_sem and dst_sem:
            k = phi[a.src] + q0[a.arrow_id] - phi[a.dst]
            q_new[a.arrow_id] = phi[a.dst] + k - phi[a.src]
        else:
            k2_minus_k1 = q0[a.arrow_id] - (phi[a.dst] - phi[a.src])
            q_new[a.arrow_id] = k2_minus_k1 + phi[a.dst] - phi[a.src]
    triple = ChargeTriple(lifted.triple.lattice_rank, dict(lifted.triple.v),
                          lifted.triple.Z, phi, q_new)
    hn_table = {}
    for o in c.objects:
        if o not in base_slicing:
            hn_table[o] = hn_search(o, triple, base_slicing, c, max_len)
    s = StabilityCondition(triple, base_slicing, hn_table)
    rep = validate_stability(s, c)
    if not rep.passed:
        raise InvalidBridgeland("push-down failed validation: "
                                + "; ".join(rep.violations))
    return s


# ---------------------------------------------------------------------------
# deformation along charge paths
# ---------------------------------------------------------------------------

@dataclass
class DeformationResult:
    condition: StabilityCondition
    events: List[str]
    offsets: Dict[str, Fraction]  # even level offsets accumulated per object


def _instant_semis(trackers: Dict[str, planar.AngleTracker],
                   shifts: Dict[str, Dict[str, Tuple[Fraction, Fraction]]],
                   middles: Dict[str, List[dict]],
                   objects: Sequence[str]):
    """Instantaneously semistable objects plus factor data for the rest."""
    semis = set(objects)
    details: Dict[str, Tuple[str, str]] = {}
    while True:
        removed = None
        for o in sorted(semis):
            for idx, t in enumerate(middles[o]):
                if t["sub"] not in semis or t["quot"] not in semis:
                    continue
                a1, a2 = shifts[o][f"{idx}"]
                sign = planar.compare_tracked_levels(
                    trackers[t["sub"]], a1, trackers[t["quot"]], a2)
                if sign < 0:
                    removed = o
                    details[o] = (t["sub"], t["quot"])
                    break
            if removed:
                break
        if removed is None:
            return semis, details
        semis.discard(removed)


def deform_along_path(s: StabilityCondition, samples: Sequence[Sequence[Vec2]],
                      c: CategoryPresentation) -> DeformationResult:
    """Continuous phase tracking along sampled central charges.

    Preconditions per step: every tracked charge stays nonzero and turns by
    less than pi/2.  Wall crossings (semistability changes) are logged with
    right-continuity; the endpoint condition is re-derived and validated.
    """
    backend = c.backend
    if backend is None:
        raise ValueError("deformation needs an mf backend on the presentation")
    samples = [tuple((Fraction(z[0]), Fraction(z[1])) for z in sample)
               for sample in samples]
    if not samples:
        raise ValueError("empty sample path")
    if tuple(samples[0]) != tuple(s.triple.Z):
        raise ValueError("path must start at the condition's central charge")

    def charge_at(o: str, z: Sequence[Vec2]) -> Vec2:
        total = planar.ZERO2
        for coeff, zi in zip(s.triple.v[o], z):
            if coeff:
                total = planar.vec_add(total, planar.vec_scale(zi, coeff))
        return total

    trackers = {o: planar.AngleTracker(charge_at(o, samples[0]), s.triple.phi[o])
                for o in c.objects}
    middles = backend.triangle_middles()
    # even shifts relating slot levels to tracked arguments, fixed at start
    shifts: Dict[str, Dict[str, Tuple[Fraction, Fraction]]] = {}
    for o in c.objects:
        shifts[o] = {}
        for idx, t in enumerate(middles[o]):
            a1 = s.triple.phi[o] - s.triple.phi[t["sub"]] - s.triple.q[t["f_arrow"]]
            a2 = s.triple.phi[o] + s.triple.q[t["g_arrow"]] - s.triple.phi[t["quot"]]
            assert a1 % 2 == 0 and a2 % 2 == 0, "degree-phase parity broken"
            shifts[o][f"{idx}"] = (a1, a2)
    events: List[str] = []
    prev_semis, prev_details = _instant_semis(trackers, shifts, middles, c.objects)
    for idx in range(1, len(samples)):
        for o in c.objects:
            trackers[o].step(charge_at(o, samples[idx]))
        semis, details = _instant_semis(trackers, shifts, middles, c.objects)
        for o in sorted(prev_semis - semis):
            q1, q2 = details[o]
            events.append(f"{idx},{o},unstable:{q1}+{q2}")
        for o in sorted(semis - prev_semis):
            events.append(f"{idx},{o},semistable")
        for o in sorted(set(prev_details) & set(details)):
            if prev_details[o] != details[o] and o not in (prev_semis - semis):
                events.append(f"{idx},{o},refactored:{details[o][0]}+{details[o][1]}")
        prev_semis, prev_details = semis, details
    phi_end: Dict[str, Fraction] = {}
    offsets: Dict[str, Fraction] = {}
    for o in c.objects:
        raw = trackers[o].phase()
        reduced = planar.normalize_phase(raw)
        phi_end[o] = reduced
        offsets[o] = raw - reduced
    q_end = {}
    for a in c.arrows:
        dphi = (trackers[a.dst].phase() - s.triple.phi[a.dst]) \
             - (trackers[a.src].phase() - s.triple.phi[a.src])
        q_end[a.arrow_id] = s.triple.q[a.arrow_id] + dphi
    triple_end = ChargeTriple(s.triple.lattice_rank, dict(s.triple.v),
                              tuple(samples[-1]), phi_end, q_end)
    rep = validate_triple(triple_end, c)
    if not rep.passed:
        raise AssertionError("tracked endpoint fails validation: "
                             + "; ".join(rep.violations))
    condition = derive_slicing(triple_end, c)
    return DeformationResult(condition, events, offsets)


@dataclass
class MonodromyReport:
    per_loop: List[dict]
    composite_offsets: Dict[str, Fraction]
    identity_on_base: bool
    lifted_offset: Optional[Fraction]


class LoopNotClosed(ValueError):
    """Monodromy requires loops based at the condition's central charge."""


def monodromy_word(s: StabilityCondition, loops: Sequence[Sequence[Sequence[Vec2]]],
                   c: CategoryPresentation) -> MonodromyReport:
    """Compose charge-loop deformations and report the induced relabeling."""
    current = s
    per_loop = []
    total: Dict[str, Fraction] = {o: Fraction(0) for o in c.objects}
    for k, loop in enumerate(loops):
        loop = [tuple((Fraction(z[0]), Fraction(z[1])) for z in sample)
                for sample in loop]
        if loop[0] != tuple(s.triple.Z) or loop[-1] != tuple(s.triple.Z):
            raise LoopNotClosed(f"loop {k} does not start and end at the base charge")
        result = deform_along_path(current, loop, c)
        eq, clause = stab_equivalent(result.condition, current, c)
        per_loop.append({
            "offsets": dict(result.offsets),
            "events": list(result.events),
            "identity_on_base": eq and all(v == 0 for v in result.offsets.values()),
            "fixes_condition": eq,
        })
        for o, v in result.offsets.items():
            total[o] += v
        current = result.condition
    eq, clause = stab_equivalent(current, s, c)
    values = set(total.values())
    uniform = values.pop() if len(values) == 1 else None
    return MonodromyReport(per_loop, total, eq, uniform)
