"""Degree-weighted morphism graphs for finite cyclic categories.

A presentation is a finite object set with a shift permutation squaring to
the identity and a list of homogeneous arrows with rational degrees.
Diagrams are finite sub-multigraphs whose vertices may be direct sums; all
path and loop computations happen on (vertex, summand) slots, which is what
makes degree matrices well defined for block morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class BrokenChain(ValueError):
    """Connecting-path steps do not chain up."""


class NotLiftable(ValueError):
    """Operation requires a liftable diagram."""


class NotConnective(ValueError):
    """Operation requires a connective edge or diagram."""


class NotSubdiagram(ValueError):
    """Gluing requires the common diagram to embed in both sides."""


@dataclass(frozen=True)
class Arrow:
    arrow_id: str
    src: str
    dst: str
    degree: Fraction
    label: str = ""


@dataclass(frozen=True)
class CategoryPresentation:
    """Objects, shift permutation with shift^2 = id, homogeneous arrows.

    backend, when present, is an mf-level catalog providing composition and
    cones; it never takes part in equality or serialisation.
    """

    objects: Tuple[str, ...]
    shift: Dict[str, str]
    arrows: Tuple[Arrow, ...]
    backend: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        objs = set(self.objects)
        if set(self.shift) != objs or set(self.shift.values()) != objs:
            raise ValueError("shift must permute the object set")
        for o in self.objects:
            if self.shift[self.shift[o]] != o:
                raise ValueError(f"shift^2 moves {o}: not a cyclic presentation")
        for a in self.arrows:
            if a.src not in objs or a.dst not in objs:
                raise ValueError(f"arrow {a.arrow_id} references unknown objects")
        ids = [a.arrow_id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate arrow ids")

    def arrow(self, arrow_id: str) -> Arrow:
        for a in self.arrows:
            if a.arrow_id == arrow_id:
                return a
        raise KeyError(arrow_id)

    def arrows_from(self, src: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == src]

    def arrows_between(self, src: str, dst: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == src and a.dst == dst]

    def with_degrees(self, degrees: Dict[str, Fraction]) -> "CategoryPresentation":
        """Same arrows with a different degree function (same morphism set)."""
        if set(degrees) != {a.arrow_id for a in self.arrows}:
            raise ValueError("degree table must cover exactly the arrow set")
        new = tuple(Arrow(a.arrow_id, a.src, a.dst, Fraction(degrees[a.arrow_id]), a.label)
                    for a in self.arrows)
        return CategoryPresentation(self.objects, dict(self.shift), new, self.backend)


@dataclass(frozen=True)
class ConnectingPath:
    """Chain of arrows traversed forward (+1) or backward (-1)."""

    steps: Tuple[Tuple[str, int], ...]

    def reverse(self) -> "ConnectingPath":
        return ConnectingPath(tuple((a, -d) for a, d in reversed(self.steps)))


def path_endpoints(p: ConnectingPath, c: CategoryPresentation) -> Tuple[str, str]:
    """(start, end) of a valid chain; raises BrokenChain otherwise."""
    if not p.steps:
        raise BrokenChain("empty path")
    cur = None
    start = None
    for aid, direction in p.steps:
        a = c.arrow(aid)
        s, t = (a.src, a.dst) if direction == 1 else (a.dst, a.src)
        if cur is None:
            start, cur = s, t
        else:
            if s != cur:
                raise BrokenChain(f"step {aid} starts at {s}, expected {cur}")
            cur = t
    return start, cur


def path_degree(p: ConnectingPath, c: CategoryPresentation,
                degrees: Optional[Dict[str, Fraction]] = None) -> Fraction:
    """Signed sum of step degrees; reversal negates it."""
    path_endpoints(p, c)
    total = Fraction(0)
    for aid, direction in p.steps:
        d = degrees[aid] if degrees is not None else c.arrow(aid).degree
        total += direction * Fraction(d)
    return total


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagramVertex:
    vertex_id: str
    summands: Tuple[str, ...]  # catalog object per slot


@dataclass(frozen=True)
class DiagramEdge:
    """Quasi-homogeneous block morphism between diagram vertices.

    blocks maps (target slot index, source slot index) to an arrow id of the
    presentation ("id" is allowed for identity blocks between equal objects).
    Absent pairs are zero blocks.
    """

    edge_id: str
    src: str
    dst: str
    blocks: Tuple[Tuple[Tuple[int, int], str], ...]

    def block_map(self) -> Dict[Tuple[int, int], str]:
        return dict(self.blocks)


def make_edge(edge_id: str, src: str, dst: str,
              blocks: Dict[Tuple[int, int], str]) -> DiagramEdge:
    return DiagramEdge(edge_id, src, dst, tuple(sorted(blocks.items())))


@dataclass(frozen=True)
class Diagram:
    vertices: Tuple[DiagramVertex, ...]
    edges: Tuple[DiagramEdge, ...]

    def vertex(self, vid: str) -> DiagramVertex:
        for v in self.vertices:
            if v.vertex_id == vid:
                return v
        raise KeyError(vid)

    def validate(self, c: CategoryPresentation) -> None:
        vmap = {v.vertex_id: v for v in self.vertices}
        if len(vmap) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        for e in self.edges:
            if e.src not in vmap or e.dst not in vmap:
                raise ValueError(f"edge {e.edge_id} references unknown vertices")
            src_v, dst_v = vmap[e.src], vmap[e.dst]
            for (ti, si), aid in e.blocks:
                if not (0 <= si < len(src_v.summands) and 0 <= ti < len(dst_v.summands)):
                    raise ValueError(f"edge {e.edge_id} block ({ti},{si}) out of range")
                if aid == "id":
                    if src_v.summands[si] != dst_v.summands[ti]:
                        raise ValueError("identity block between distinct objects")
                    continue
                a = c.arrow(aid)
                if a.src != src_v.summands[si] or a.dst != dst_v.summands[ti]:
                    raise ValueError(
                        f"edge {e.edge_id} block ({ti},{si}) is not an arrow "
                        f"between the declared summands")


Slot = Tuple[str, int]           # (vertex id, summand index)
SlotStep = Tuple[str, int, int, int, int]  # (edge, ti, si, direction, block#)


def _slot_graph(d: Diagram, c: CategoryPresentation):
    """Undirected multigraph on slots; each block of each edge is one edge."""
    d.validate(c)
    slots: List[Slot] = []
    for v in d.vertices:
        for k in range(len(v.summands)):
            slots.append((v.vertex_id, k))
    edges = []  # (slot_from, slot_to, edge_id, block key, arrow id)
    for e in d.edges:
        for (ti, si), aid in e.blocks:
            edges.append(((e.src, si), (e.dst, ti), e.edge_id, (ti, si), aid))
    return slots, edges


def _degree_of(aid: str, c: CategoryPresentation,
               degrees: Optional[Dict[str, Fraction]]) -> Fraction:
    if aid == "id":
        return Fraction(0)
    if degrees is not None:
        return Fraction(degrees[aid])
    return c.arrow(aid).degree


@dataclass(frozen=True)
class DiagramLoop:
    """Loop in the slot graph, stored as signed traversals of slot edges."""

    steps: Tuple[Tuple[str, Tuple[int, int], int], ...]  # (edge id, block, dir)

    def degree(self, d: Diagram, c: CategoryPresentation,
               degrees: Optional[Dict[str, Fraction]] = None) -> Fraction:
        blocks = {e.edge_id: e.block_map() for e in d.edges}
        total = Fraction(0)
        for eid, key, direction in self.steps:
            aid = blocks[eid][key]
            total += direction * _degree_of(aid, c, degrees)
        return total


def cycle_basis(d: Diagram, c: CategoryPresentation,
                order_seed: int = 0) -> List[DiagramLoop]:
    """Fundamental cycle basis from a spanning forest of the slot graph.

    order_seed permutes the edge insertion order; is_liftable must not
    depend on it (tested), only the basis presentation does.
    """
    slots, edges = _slot_graph(d, c)
    indexed = list(enumerate(edges))
    if order_seed:
        # deterministic pseudo-shuffle: rotate and interleave by the seed
        k = order_seed % max(len(indexed), 1)
        indexed = indexed[k:] + indexed[:k]
        indexed.sort(key=lambda t: ((t[0] * 2654435761 + order_seed) % 104729))
    parent: Dict[Slot, Slot] = {s: s for s in slots}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    tree: List[Tuple[int, Tuple]] = []
    chords: List[Tuple[int, Tuple]] = []
    for idx, e in indexed:
        a, b = find(e[0]), find(e[1])
        if a == b:
            chords.append((idx, e))
        else:
            parent[a] = b
            tree.append((idx, e))
    # adjacency of the forest for path reconstruction
    adj: Dict[Slot, List[Tuple[Slot, Tuple, int]]] = {s: [] for s in slots}
    for _, e in tree:
        frm, to, eid, key, _ = e
        adj[frm].append((to, e, 1))
        adj[to].append((frm, e, -1))

    def tree_path(a: Slot, b: Slot):
        prev: Dict[Slot, Tuple[Slot, Tuple, int]] = {}
        stack = [a]
        seen = {a}
        while stack:
            cur = stack.pop()
            if cur == b:
                break
            for nxt, e, direction in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    prev[nxt] = (cur, e, direction)
                    stack.append(nxt)
        path = []
        cur = b
        while cur != a:
            p, e, direction = prev[cur]
            path.append((e, direction))
            cur = p
        path.reverse()
        return path

    loops = []
    for _, chord in chords:
        frm, to, eid, key, _ = chord
        steps = [(eid, key, 1)]
        for e, direction in tree_path(to, frm):
            steps.append((e[2], e[3], direction))
        loops.append(DiagramLoop(tuple(steps)))
    return loops


def is_liftable(d: Diagram, c: CategoryPresentation,
                degrees: Optional[Dict[str, Fraction]] = None,
                order_seed: int = 0):
    """True iff every connecting loop of the diagram has degree zero.

    Checked on a fundamental cycle basis; returns (flag, witness loop or None).
    """
    for loop in cycle_basis(d, c, order_seed):
        deg = loop.degree(d, c, degrees)
        if deg != 0:
            return False, (loop, deg)
    return True, None


def is_locally_liftable(d: Diagram, c: CategoryPresentation,
                        degrees: Optional[Dict[str, Fraction]] = None):
    """Every slot loop whose vertex projection is null-homotopic has degree 0.

    Loops that genuinely wind through the vertex graph (e.g. around a whole
    shift period) are exempt; parallel-block inconsistencies are not.
    """
    vertex_edge_index: Dict[str, int] = {}
    for e in d.edges:
        vertex_edge_index[e.edge_id] = len(vertex_edge_index)
    nedges = len(vertex_edge_index)
    basis = cycle_basis(d, c)
    if not basis:
        return True, None
    # vertex-graph cycle vectors of the slot loops
    vecs = []
    for loop in basis:
        v = [Fraction(0)] * nedges
        for eid, _key, direction in loop.steps:
            v[vertex_edge_index[eid]] += direction
        vecs.append(v)
    from .polymat import RationalMatrix
    mat = RationalMatrix([[vecs[c_][r] for c_ in range(len(vecs))]
                          for r in range(nedges)], cols=len(vecs))
    for combo in mat.kernel_basis():
        deg = Fraction(0)
        for coeff, loop in zip(combo, basis):
            if coeff != 0:
                deg += coeff * loop.degree(d, c, degrees)
        if deg != 0:
            return False, combo
    return True, None


def degree_matrix(edge: DiagramEdge, d: Diagram, c: CategoryPresentation,
                  degrees: Optional[Dict[str, Fraction]] = None):
    """Matrix of connecting-path degrees source-slot -> target-slot.

    Entries are None when no path exists inside the diagram; requires the
    diagram to be liftable so entries are path independent.
    """
    ok, witness = is_liftable(d, c, degrees)
    if not ok:
        raise NotLiftable(f"diagram has a loop of degree {witness[1]}")
    slots, slot_edges = _slot_graph(d, c)
    # single-source degree propagation (liftability makes it path independent)
    adj: Dict[Slot, List[Tuple[Slot, Fraction]]] = {s: [] for s in slots}
    for frm, to, eid, key, aid in slot_edges:
        dv = _degree_of(aid, c, degrees)
        adj[frm].append((to, dv))
        adj[to].append((frm, -dv))
    src_v = d.vertex(edge.src)
    dst_v = d.vertex(edge.dst)
    out = []
    for ti in range(len(dst_v.summands)):
        row = []
        for si in range(len(src_v.summands)):
            start: Slot = (edge.src, si)
            goal: Slot = (edge.dst, ti)
            dist = {start: Fraction(0)}
            stack = [start]
            while stack:
                cur = stack.pop()
                for nxt, dv in adj[cur]:
                    if nxt not in dist:
                        dist[nxt] = dist[cur] + dv
                        stack.append(nxt)
            row.append(dist.get(goal))
        out.append(row)
    return out


@dataclass(frozen=True)
class RMatrix:
    """exp(2*pi*i*q) entrywise, stored by exponents mod 1 (None = undefined)."""

    exponents: Tuple[Tuple[Optional[Fraction], ...], ...]

    def rank_one(self) -> bool:
        """Additive rank-1 criterion: q_jk + q_j'k' = q_jk' + q_j'k (mod 1)."""
        rows = len(self.exponents)
        cols = len(self.exponents[0]) if rows else 0
        for j1 in range(rows):
            for j2 in range(rows):
                for k1 in range(cols):
                    for k2 in range(cols):
                        a = self.exponents[j1][k1]
                        b = self.exponents[j2][k2]
                        cc = self.exponents[j1][k2]
                        dd = self.exponents[j2][k1]
                        if None in (a, b, cc, dd):
                            raise NotConnective("undefined entry in R-matrix")
                        if (a + b - cc - dd) % 1 != 0:
                            return False
        return True

    def complex_entries(self) -> Tuple[Tuple[complex, ...], ...]:
        import cmath
        return tuple(tuple(cmath.exp(2j * cmath.pi * float(q)) for q in row)
                     for row in self.exponents)


def r_matrix(edge: DiagramEdge, d: Diagram, c: CategoryPresentation,
             degrees: Optional[Dict[str, Fraction]] = None) -> Tuple[RMatrix, int]:
    """R-matrix of a connective liftable edge with its rank (always 1)."""
    q = degree_matrix(edge, d, c, degrees)
    if any(entry is None for row in q for entry in row):
        raise NotConnective("edge is not connective in the diagram")
    rm = RMatrix(tuple(tuple(entry % 1 for entry in row) for row in q))
    return rm, 1 if rm.rank_one() else 2


def is_connective(c: CategoryPresentation) -> bool:
    """Connected underlying undirected graph on objects."""
    if not c.objects:
        return True
    seen = {c.objects[0]}
    stack = [c.objects[0]]
    adj: Dict[str, set] = {o: set() for o in c.objects}
    for a in c.arrows:
        adj[a.src].add(a.dst)
        adj[a.dst].add(a.src)
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(c.objects)


def diagram_connective(d: Diagram, c: CategoryPresentation) -> bool:
    """Connecting path between every pair of slots of the diagram."""
    slots, edges = _slot_graph(d, c)
    if not slots:
        return True
    adj: Dict[Slot, set] = {s: set() for s in slots}
    for frm, to, *_ in edges:
        adj[frm].add(to)
        adj[to].add(frm)
    seen = {slots[0]}
    stack = [slots[0]]
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(slots)


def _edge_key(e: DiagramEdge):
    return (e.edge_id, e.src, e.dst, e.blocks)


def glue(d1: Diagram, d2: Diagram, common: Diagram, c: CategoryPresentation):
    """Union along a shared sub-diagram.

    Returns (diagram, liftable flag, witness).  When both sides are liftable
    and the common part is connective the union is reported liftable, and
    that is re-verified rather than trusted.
    """
    for side in (d1, d2):
        side_v = {v.vertex_id: v for v in side.vertices}
        side_e = {_edge_key(e) for e in side.edges}
        for v in common.vertices:
            if side_v.get(v.vertex_id) != v:
                raise NotSubdiagram(f"vertex {v.vertex_id} not shared")
        for e in common.edges:
            if _edge_key(e) not in side_e:
                raise NotSubdiagram(f"edge {e.edge_id} not shared")
    vmap: Dict[str, DiagramVertex] = {}
    for v in list(d1.vertices) + list(d2.vertices):
        if v.vertex_id in vmap and vmap[v.vertex_id] != v:
            raise NotSubdiagram(f"vertex {v.vertex_id} inconsistent between sides")
        vmap[v.vertex_id] = v
    emap: Dict[str, DiagramEdge] = {}
    for e in list(d1.edges) + list(d2.edges):
        if e.edge_id in emap and _edge_key(emap[e.edge_id]) != _edge_key(e):
            raise NotSubdiagram(f"edge {e.edge_id} inconsistent between sides")
        emap[e.edge_id] = e
    union = Diagram(tuple(vmap.values()), tuple(emap.values()))
    ok1, _ = is_liftable(d1, c)
    ok2, _ = is_liftable(d2, c)
    predicted = ok1 and ok2 and diagram_connective(common, c)
    ok, witness = is_liftable(union, c)
    if predicted and not ok:
        raise AssertionError("gluing along a connective common part must lift")
    return union, ok, witness


def _simple_paths(d: Diagram, c: CategoryPresentation,
                  starts: List[Slot], goals: set,
                  degrees: Optional[Dict[str, Fraction]],
                  edge_simple: bool) -> List[Fraction]:
    slots, slot_edges = _slot_graph(d, c)
    adj: Dict[Slot, List[Tuple[Slot, Tuple, int]]] = {s: [] for s in slots}
    for k, (frm, to, eid, key, aid) in enumerate(slot_edges):
        adj[frm].append((to, (aid, k), 1))
        adj[to].append((frm, (aid, k), -1))
    out: List[Fraction] = []

    def walk(cur: Slot, used_slots: set, used_edges: set, acc: Fraction):
        if cur in goals and used_edges:
            out.append(acc)
        for nxt, tag, direction in adj[cur]:
            aid, k = tag
            if edge_simple:
                if k in used_edges:
                    continue
            else:
                if nxt in used_slots or k in used_edges:
                    continue
            step = direction * _degree_of(aid, c, degrees)
            walk(nxt, used_slots | {nxt}, used_edges | {k}, acc + step)

    for s in starts:
        walk(s, {s}, set(), Fraction(0))
    return out


def simple_paths_between(d: Diagram, c: CategoryPresentation,
                         start_obj: str, end_obj: str,
                         degrees: Optional[Dict[str, Fraction]] = None,
                         edge_simple: bool = False) -> List[Fraction]:
    """Degrees of simple connecting paths between summand objects.

    start/end pick every slot whose summand equals the given object;
    vertex-simple by default, edge_simple revisits vertices but not edges.
    """
    slots, _ = _slot_graph(d, c)
    vmap = {v.vertex_id: v for v in d.vertices}
    starts = [s for s in slots if vmap[s[0]].summands[s[1]] == start_obj]
    goals = {s for s in slots if vmap[s[0]].summands[s[1]] == end_obj}
    return _simple_paths(d, c, starts, goals, degrees, edge_simple)


def simple_paths_between_vertices(d: Diagram, c: CategoryPresentation,
                                  start_vertex: str, end_vertex: str,
                                  degrees: Optional[Dict[str, Fraction]] = None,
                                  edge_simple: bool = False) -> List[Fraction]:
    """Degrees of simple connecting paths between all slots of two vertices."""
    slots, _ = _slot_graph(d, c)
    starts = [s for s in slots if s[0] == start_vertex]
    goals = {s for s in slots if s[0] == end_vertex}
    return _simple_paths(d, c, starts, goals, degrees, edge_simple)
