"""Arithmetic over Z2, Z3 and Z6: boundaries, supports, and the verifier.

A Solution stores one value in Z2 and one in Z3 per edge, interpreted with
respect to the graph's stored orientations. The boundary of a labeling at a
vertex is the sum of outgoing values minus incoming values in the group;
loops contribute nothing. The verifier recomputes everything from scratch and
shares no logic with the solver beyond boundary() itself.

Group values are always stored as least nonnegative residues so that
serialized solutions compare bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multigraph import Multigraph

BoundaryMap = tuple[int, ...]


@dataclass(frozen=True)
class Solution:
    """Per-edge pair of values in Z2 x Z3, indexed by edge id."""

    phi2: tuple[int, ...]
    phi3: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi2", tuple(int(x) for x in self.phi2))
        object.__setattr__(self, "phi3", tuple(int(x) for x in self.phi3))
        if len(self.phi2) != len(self.phi3):
            raise ValueError("phi2 and phi3 must have equal length")

    def pair(self, e: int) -> tuple[int, int]:
        return self.phi2[e], self.phi3[e]


@dataclass(frozen=True)
class Violation:
    """One failed verification condition; `where` is an edge or vertex index."""

    kind: str
    where: int
    detail: str


def boundary(g: Multigraph, values, modulus: int) -> BoundaryMap:
    """Per-vertex boundary (outgoing minus incoming) of an edge labeling."""
    if modulus not in (2, 3, 6):
        raise ValueError("modulus must be 2, 3 or 6")
    vals = list(values)
    if len(vals) != g.m:
        raise ValueError("value list length must equal the edge count")
    acc = [0] * g.n
    for (a, b), val in zip(g.edges, vals):
        acc[a] += val
        acc[b] -= val
    return tuple(x % modulus for x in acc)


def support(bmap) -> frozenset[int]:
    """Vertices where the map is nonzero."""
    return frozenset(v for v, val in enumerate(bmap) if val != 0)


def verify_solution(g: Multigraph, t_set, u_set, sol: Solution) -> list[Violation]:
    """Check the three solution conditions; an empty list means ok.

    Conditions: every edge carries a nonzero pair, the support of the mod-2
    boundary is exactly t_set, and the support of the mod-3 boundary is
    exactly u_set. Inputs are never trusted, so shape and range problems are
    reported as violations rather than raised.
    """
    t_set = frozenset(t_set)
    u_set = frozenset(u_set)
    out: list[Violation] = []
    if len(sol.phi2) != g.m or len(sol.phi3) != g.m:
        return [Violation("shape", -1, f"expected {g.m} edge values, got {len(sol.phi2)}")]
    for v in sorted(t_set | u_set):
        if not 0 <= v < g.n:
            out.append(Violation("prescription", v, "prescribed vertex out of range"))
    if out:
        return out
    for e in range(g.m):
        p2, p3 = sol.phi2[e], sol.phi3[e]
        if p2 not in (0, 1) or p3 not in (0, 1, 2):
            out.append(Violation("range", e, f"values ({p2}, {p3}) not in Z2 x Z3"))
        elif (p2, p3) == (0, 0):
            out.append(Violation("zero_pair", e, "edge carries the zero pair"))
    if any(v.kind == "range" for v in out):
        return out
    b2 = boundary(g, sol.phi2, 2)
    b3 = boundary(g, sol.phi3, 3)
    for v in range(g.n):
        in_t = v in t_set
        if (b2[v] != 0) != in_t:
            word = "missing from" if in_t else "outside"
            out.append(Violation("support2", v, f"mod-2 boundary support {word} prescription"))
        in_u = v in u_set
        if (b3[v] != 0) != in_u:
            word = "missing from" if in_u else "outside"
            out.append(Violation("support3", v, f"mod-3 boundary support {word} prescription"))
    return out


def negate_edge(sol: Solution, e: int) -> Solution:
    """Solution transported across reversing edge e's orientation.

    The Z2 value is its own inverse and stays; the Z3 value is negated. Pair
    with multigraph.reverse_edges so boundaries are preserved.
    """
    return negate_edges(sol, (e,))


def negate_edges(sol: Solution, edge_ids) -> Solution:
    flip = set(edge_ids)
    for e in flip:
        if not 0 <= e < len(sol.phi3):
            raise ValueError(f"edge id {e} out of range")
    phi3 = tuple(
        (-val) % 3 if idx in flip else val for idx, val in enumerate(sol.phi3)
    )
    return Solution(sol.phi2, phi3)


def crt_pair(sol: Solution) -> tuple[int, ...]:
    """Combine (phi2, phi3) into Z6 values via (a, b) -> 3a + 4b mod 6.

    The map is the standard residue pairing: the result is 0 exactly on the
    zero pair, and its mod-2 and mod-3 residues recover phi2 and phi3.
    """
    return tuple((3 * a + 4 * b) % 6 for a, b in zip(sol.phi2, sol.phi3))


def crt_split(z6_values) -> Solution:
    """Inverse of crt_pair."""
    vals = [int(x) for x in z6_values]
    for x in vals:
        if not 0 <= x < 6:
            raise ValueError(f"value {x} not a Z6 residue")
    return Solution(tuple(x % 2 for x in vals), tuple(x % 3 for x in vals))
