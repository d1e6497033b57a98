"""Charge triples and pairs on a cyclic presentation.

A charge triple (Z, phi, q) factors the central charge through a finite
lattice, assigns each object a phase in (0,2] and each arrow a rational
degree.  Conditions checked here:

  (1) phi(E[1]) = phi(E) + 1 (mod 2)
  (2) Z(E) = m(E) exp(i*pi*phi(E)) with m(E) > 0 whenever Z(E) != 0
  (3) q(f) = phi(target) - phi(source) (mod 2)

Charges are exact rational pairs, so (2) is decidable outright: a nonzero
rational vector aligns with a rational phase iff the phase is a quarter
multiple (planar.aligned_with_phase).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import planar
from .catgraph import (Arrow, CategoryPresentation, ConnectingPath, Diagram,
                       DiagramVertex, cycle_basis, is_locally_liftable,
                       make_edge, path_degree)
from .planar import Vec2


class TrivialCharge(ValueError):
    """Central charge vanishes identically: phases are not determined."""


class Inconsistent(ValueError):
    """Charge data contradicts itself during reconstruction."""


class NotLocallyLiftable(ValueError):
    """Basic-loop hexagon fails local liftability under the given degrees."""


@dataclass(frozen=True)
class ChargeTriple:
    lattice_rank: int
    v: Dict[str, Tuple[int, ...]]
    Z: Tuple[Vec2, ...]                  # value on each lattice basis vector
    phi: Dict[str, Fraction]
    q: Dict[str, Fraction]

    def __post_init__(self):
        if len(self.Z) != self.lattice_rank:
            raise ValueError("Z must assign one value per lattice basis vector")
        for o, vec in self.v.items():
            if len(vec) != self.lattice_rank:
                raise ValueError(f"class vector of {o} has wrong rank")

    def charge_of(self, obj: str) -> Vec2:
        vec = self.v[obj]
        total = planar.ZERO2
        for coeff, z in zip(vec, self.Z):
            if coeff:
                total = planar.vec_add(total, planar.vec_scale(z, coeff))
        return total

    def mass_squared(self, obj: str) -> Fraction:
        z = self.charge_of(obj)
        return z[0] * z[0] + z[1] * z[1]

    def with_q(self, q: Dict[str, Fraction]) -> "ChargeTriple":
        return ChargeTriple(self.lattice_rank, dict(self.v), self.Z,
                            dict(self.phi), dict(q))


@dataclass(frozen=True)
class ChargePair:
    lattice_rank: int
    v: Dict[str, Tuple[int, ...]]
    Z: Tuple[Vec2, ...]
    q: Dict[str, Fraction]

    def charge_of(self, obj: str) -> Vec2:
        vec = self.v[obj]
        total = planar.ZERO2
        for coeff, z in zip(vec, self.Z):
            if coeff:
                total = planar.vec_add(total, planar.vec_scale(z, coeff))
        return total


def pair_of(triple: ChargeTriple) -> ChargePair:
    return ChargePair(triple.lattice_rank, dict(triple.v), triple.Z, dict(triple.q))


@dataclass
class Report:
    """Per-condition results with human-readable violations."""

    conditions: Dict[str, bool] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def fail(self, cond: str, message: str) -> None:
        self.conditions[cond] = False
        self.violations.append(f"{cond}: {message}")

    def ok(self, cond: str) -> None:
        self.conditions.setdefault(cond, True)


def presentation_diagram(c: CategoryPresentation) -> Diagram:
    """The whole presentation as a diagram (one slot per object)."""
    vertices = tuple(DiagramVertex(o, (o,)) for o in c.objects)
    edges = tuple(make_edge(a.arrow_id, a.src, a.dst, {(0, 0): a.arrow_id})
                  for a in c.arrows)
    return Diagram(vertices, edges)


def validate_triple(r: ChargeTriple, c: CategoryPresentation) -> Report:
    """Conditions (1)-(3) with the violating object or arrow named."""
    rep = Report()
    missing = [o for o in c.objects if o not in r.phi or o not in r.v]
    extra = [o for o in r.phi if o not in c.objects]
    if missing or extra:
        raise KeyError(f"object tables do not match presentation: "
                       f"missing {missing}, extra {extra}")
    arrow_ids = {a.arrow_id for a in c.arrows}
    if set(r.q) != arrow_ids:
        raise KeyError("degree table does not match the arrow set")
    for o in c.objects:
        if not (0 < r.phi[o] <= 2):
            rep.fail("phases_in_range", f"phi({o}) = {r.phi[o]} outside (0,2]")
    rep.ok("phases_in_range")
    for o in c.objects:
        if (r.phi[c.shift[o]] - r.phi[o] - 1) % 2 != 0:
            rep.fail("shift_phase", f"phi({c.shift[o]}) != phi({o}) + 1 (mod 2)")
    rep.ok("shift_phase")
    for o in c.objects:
        z = r.charge_of(o)
        if planar.is_zero(z):
            continue
        if not planar.aligned_with_phase(z, r.phi[o]):
            rep.fail("polar_form", f"Z({o}) = {z} is not m*exp(i*pi*{r.phi[o]})")
    rep.ok("polar_form")
    for a in c.arrows:
        if (r.q[a.arrow_id] - (r.phi[a.dst] - r.phi[a.src])) % 2 != 0:
            rep.fail("degree_phase",
                     f"q({a.arrow_id}) = {r.q[a.arrow_id]} is not "
                     f"phi({a.dst}) - phi({a.src}) mod 2")
    rep.ok("degree_phase")
    return rep


def pair_to_triple(p: ChargePair, c: CategoryPresentation) -> ChargeTriple:
    """Reconstruct phases from a charge pair by propagating along arrows.

    Raises TrivialCharge when Z vanishes identically (the circle fiber) and
    Inconsistent when propagation contradicts the polar-form condition.
    """
    seeds = [o for o in c.objects if not planar.is_zero(p.charge_of(o))]
    if not seeds:
        raise TrivialCharge("central charge vanishes on every object")
    seed = sorted(seeds)[0]
    seed_phase = planar.phase_of(p.charge_of(seed))
    if seed_phase is None:
        raise Inconsistent(f"charge of {seed} is not at a representable angle")
    phi: Dict[str, Fraction] = {seed: seed_phase}
    adj: Dict[str, List[Tuple[str, Fraction]]] = {o: [] for o in c.objects}
    for a in c.arrows:
        adj[a.src].append((a.dst, p.q[a.arrow_id]))
        adj[a.dst].append((a.src, -p.q[a.arrow_id]))
    stack = [seed]
    while stack:
        cur = stack.pop()
        for nxt, dq in adj[cur]:
            if nxt not in phi:
                phi[nxt] = planar.normalize_phase(phi[cur] + dq)
                stack.append(nxt)
    if len(phi) != len(c.objects):
        raise Inconsistent("presentation is not connective: phases undetermined")
    candidate = ChargeTriple(p.lattice_rank, dict(p.v), p.Z, phi, dict(p.q))
    rep = validate_triple(candidate, c)
    if not rep.passed:
        raise Inconsistent("; ".join(rep.violations))
    return candidate


def tau(r: ChargeTriple) -> ChargeTriple:
    """Chirality involution: (Z, phi, q) -> (-conj Z, 1 - phi, -q)."""
    z = tuple(planar.vec_neg_conj(zi) for zi in r.Z)
    phi = {o: planar.normalize_phase(1 - p) for o, p in r.phi.items()}
    q = {a: -d for a, d in r.q.items()}
    return ChargeTriple(r.lattice_rank, dict(r.v), z, phi, q)


# ---------------------------------------------------------------------------
# basic loops and Maslov indices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasicLoop:
    """Loop around a distinguished-triangle hexagon, based at base_object.

    The witness path traverses the triangle arrows f, g, h from the base
    object to its shift; the remaining half of the hexagon is the shifted
    copy closed up by the (strict) Bott identification.
    """

    base_object: str
    f_arrow: str
    g_arrow: str
    h_arrow: str
    hexagon: Diagram

    def witness_path(self) -> ConnectingPath:
        return ConnectingPath(((self.f_arrow, 1), (self.g_arrow, 1), (self.h_arrow, 1)))

    def objects_involved(self) -> Tuple[str, ...]:
        return tuple(sorted({s for v in self.hexagon.vertices for s in v.summands}))


def _single_arrow(combo: Dict[str, Fraction], what: str) -> str:
    items = [k for k in combo if k != "id"]
    if len(combo) != 1 or not items:
        raise ValueError(f"{what} does not reduce to a single catalog arrow: {combo}")
    return items[0]


def basic_loops(c: CategoryPresentation) -> List[BasicLoop]:
    """Basic-loop catalog from cones of all single-arrow closed morphisms."""
    backend = c.backend
    if backend is None:
        raise ValueError("basic loops need an mf backend on the presentation")
    loops = []
    for a in c.arrows:
        data = backend.cone_data(a.arrow_id)
        g_id = _single_arrow(data["g_arrows"], f"cone inclusion of {a.arrow_id}")
        h_id = _single_arrow(data["h_arrows"], f"cone projection of {a.arrow_id}")
        cone_name = data["cone_name"]
        x, y = a.src, a.dst
        x1 = backend.shift_map[x]
        y1 = backend.shift_map[y]
        c1 = backend.shift_map[cone_name]
        f1 = _single_arrow(backend.shift_arrow(a.arrow_id), "shifted arrow")
        g1 = _single_arrow(backend.shift_arrow(g_id), "shifted arrow")
        h1 = _single_arrow(backend.shift_arrow(h_id), "shifted arrow")
        names = [x, y, cone_name, x1, y1, c1]
        vertices = tuple(DiagramVertex(f"v{i}:{n}", (n,)) for i, n in enumerate(names))
        vid = {i: f"v{i}:{n}" for i, n in enumerate(names)}
        edges = (
            make_edge("e_f", vid[0], vid[1], {(0, 0): a.arrow_id}),
            make_edge("e_g", vid[1], vid[2], {(0, 0): g_id}),
            make_edge("e_h", vid[2], vid[3], {(0, 0): h_id}),
            make_edge("e_f1", vid[3], vid[4], {(0, 0): f1}),
            make_edge("e_g1", vid[4], vid[5], {(0, 0): g1}),
            make_edge("e_h1", vid[5], vid[0], {(0, 0): h1}),
        )
        loops.append(BasicLoop(x, a.arrow_id, g_id, h_id, Diagram(vertices, edges)))
    return loops


def maslov_index(loop: BasicLoop, r: ChargeTriple, c: CategoryPresentation) -> Fraction:
    """(q(path to the shift) - 1) / 2 for a locally liftable hexagon."""
    degrees = dict(r.q)
    ok, _witness = is_locally_liftable(loop.hexagon, c, degrees)
    if not ok:
        raise NotLocallyLiftable(f"hexagon of {loop.f_arrow} under the given degrees")
    deg = path_degree(loop.witness_path(), c, degrees)
    return (deg - 1) / 2


def maslov_table(r: ChargeTriple, c: CategoryPresentation) -> Dict[str, Fraction]:
    """Maslov index per basic loop, keyed by the triangle's first arrow."""
    return {loop.f_arrow: maslov_index(loop, r, c) for loop in basic_loops(c)}


def liftable_triple(r: ChargeTriple, c: CategoryPresentation):
    """Triple-level liftability: valid triple and all Maslov indices zero.

    Returns (flag, report dict with the index table and any witness loop).
    """
    rep = validate_triple(r, c)
    if not rep.passed:
        return False, {"triple": rep, "indices": {}, "witness": None}
    table = maslov_table(r, c)
    witness = None
    for key in sorted(table):
        if table[key] != 0:
            witness = (key, table[key])
            break
    return witness is None, {"triple": rep, "indices": table, "witness": witness}


# ---------------------------------------------------------------------------
# deformation equivalence and chirality
# ---------------------------------------------------------------------------

def deformation_equivalent(r1: ChargeTriple, r2: ChargeTriple,
                           c: CategoryPresentation):
    """Same homogeneous arrows and q1 - q2 a potential difference.

    Equivalently q1 - q2 vanishes on every connecting loop; checked on a
    fundamental cycle basis.  Returns (flag, witness loop or None).
    """
    if set(r1.q) != set(r2.q):
        raise KeyError("charge triples declare different arrow sets")
    diff = {a: r1.q[a] - r2.q[a] for a in r1.q}
    diagram = presentation_diagram(c)
    for loop in cycle_basis(diagram, c):
        deg = loop.degree(diagram, c, diff)
        if deg != 0:
            return False, (loop, deg)
    return True, None


def chirality(r: ChargeTriple, c: CategoryPresentation) -> dict:
    """Sign classification of arrows (by q) and objects (by Maslov indices)."""
    arrows = {}
    for a in c.arrows:
        d = r.q[a.arrow_id]
        arrows[a.arrow_id] = "left" if d > 0 else ("right" if d < 0 else "zero")
    objects = {}
    loops = basic_loops(c)
    for o in c.objects:
        indices = [maslov_index(l, r, c) for l in loops if o in l.objects_involved()]
        if not indices:
            objects[o] = "undefined"
        elif all(m >= 0 for m in indices):
            objects[o] = "left"
        elif all(m < 0 for m in indices):
            objects[o] = "right"
        else:
            objects[o] = "mixed"
    return {"arrows": arrows, "objects": objects}
