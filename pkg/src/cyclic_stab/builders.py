"""Example builders: presentations and charge documents for the A_n catalogs.

The a2-z3 configuration ships with an exact-rational base point: the charge
lattice is Z^2 with the six objects on the classes
(1,0), (0,1), (-1,-1) and their negatives, the base charges are z1 = (1,0),
z2 = (0,1), and the phases sit at quarter turns so the polar-form condition
is decidable over Q.  Deformation paths and monodromy loops below stay on
rational samples and avoid the three charge-vanishing loci.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .catgraph import Arrow, CategoryPresentation
from .charge import ChargeTriple, tau
from .config import Config, DEFAULT_CONFIG
from .mf import AnCatalog, an_catalog
from .planar import Vec2
from .stab import StabilityCondition

F = Fraction


def presentation_for(catalog: AnCatalog) -> CategoryPresentation:
    arrows = tuple(Arrow(a.arrow_id, a.src, a.dst, a.degree, a.label)
                   for a in catalog.arrows)
    return CategoryPresentation(tuple(catalog.object_ids()),
                                dict(catalog.shift_map), arrows, backend=catalog)


def an_presentation(n: int, d: int = None,
                    config: Config = DEFAULT_CONFIG) -> CategoryPresentation:
    return presentation_for(an_catalog(n, d, config))


# --- the rational base point of the a2-z3 example ---------------------------

_V = {
    "M_1^0": (1, 0), "M_1^1": (0, 1), "M_1^2": (-1, -1),
    "M_2^0": (1, 1), "M_2^1": (-1, 0), "M_2^2": (0, -1),
}

_PHI = {
    "M_1^0": F(2), "M_2^0": F(1, 4), "M_1^1": F(1, 2),
    "M_2^1": F(1), "M_1^2": F(5, 4), "M_2^2": F(3, 2),
}

_Q = {
    "M_1^0->M_2^0#0": F(1, 4),
    "M_2^0->M_1^1#0": F(1, 4),
    "M_1^1->M_2^1#0": F(1, 2),
    "M_2^1->M_1^2#0": F(1, 4),
    "M_1^2->M_2^2#0": F(1, 4),
    "M_2^2->M_1^0#0": F(1, 2),
}

BASE_Z: Tuple[Vec2, Vec2] = ((F(1), F(0)), (F(0), F(1)))


def walcher_triple(config: Config = DEFAULT_CONFIG) -> ChargeTriple:
    return ChargeTriple(2, dict(_V), BASE_Z, dict(_PHI), dict(_Q))


def mirror_triple(config: Config = DEFAULT_CONFIG) -> ChargeTriple:
    return tau(walcher_triple(config))


def walcher_stability(config: Config = DEFAULT_CONFIG) -> StabilityCondition:
    triple = walcher_triple(config)
    return StabilityCondition(triple, dict(triple.phi), {})


def mirror_stability_candidate(config: Config = DEFAULT_CONFIG) -> StabilityCondition:
    """The tau-image with the same slicing; fails the stability checks."""
    triple = mirror_triple(config)
    return StabilityCondition(triple, dict(triple.phi), {})


# --- sampled charge paths ----------------------------------------------------

def _with_z2(points: List[Vec2], z2: Vec2) -> List[Tuple[Vec2, Vec2]]:
    return [(p, z2) for p in points]


def figure_deformation_path() -> List[Tuple[Vec2, Vec2]]:
    """Half turn of z1 with z2 held: destabilises two objects at the end."""
    pts = [(F(1), F(0)), (F(1, 2), F(1, 2)), (F(0), F(1)),
           (F(-1, 2), F(1, 2)), (F(-1), F(0))]
    return _with_z2(pts, (F(0), F(1)))


def _octagon(radius: Fraction) -> List[Vec2]:
    r = Fraction(radius)
    return [(r, F(0)), (r, r), (F(0), r), (-r, r), (-r, F(0)),
            (-r, -r), (F(0), -r), (r, -r), (r, F(0))]


def loop_z1() -> List[Tuple[Vec2, Vec2]]:
    """z1 once around the origin (radius 1/2), z2 fixed: pure first generator."""
    pts = [(F(1), F(0)), (F(1, 2), F(0))] + _octagon(F(1, 2))[1:] + [(F(1), F(0))]
    return _with_z2(pts, (F(0), F(1)))


def loop_z2() -> List[Tuple[Vec2, Vec2]]:
    """z2 once around the origin, z1 fixed: pure second generator."""
    oct_pts = _octagon(F(1, 2))
    start = (F(0), F(1))
    seq = [start, (F(0), F(1, 2))]
    k = oct_pts.index((F(0), F(1, 2)))
    seq += oct_pts[k + 1:] + oct_pts[1:k + 1]
    seq.append(start)
    return [((F(1), F(0)), p) for p in seq]


def loop_z1_plus_z2() -> List[Tuple[Vec2, Vec2]]:
    """z1 + z2 once around the origin with z1 fixed: third generator."""
    s_pts = [(F(1), F(1)), (F(1, 2), F(1, 2))] + _octagon(F(1, 2))[2:] \
        + [(F(1, 2), F(1, 2)), (F(1), F(1))]
    z1 = (F(1), F(0))
    return [(z1, (s[0] - 1, s[1])) for s in s_pts]


def generator_loops() -> List[List[Tuple[Vec2, Vec2]]]:
    return [loop_z1(), loop_z2(), loop_z1_plus_z2()]


def contractible_loop() -> List[Tuple[Vec2, Vec2]]:
    """Small square not enclosing the origin: trivial monodromy."""
    pts = [(F(1), F(0)), (F(3, 2), F(1, 2)), (F(2), F(0)),
           (F(3, 2), F(-1, 2)), (F(1), F(0))]
    return _with_z2(pts, (F(0), F(1)))


def reversed_path(path: List[Tuple[Vec2, Vec2]]) -> List[Tuple[Vec2, Vec2]]:
    return list(reversed(path))
