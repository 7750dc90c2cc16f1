"""Instance preconditions: when does the solver accept (graph, T, U)?

An instance is accepted when the graph is connected, T is contained in U with
|T| even and |U| != 1, and every nonempty proper vertex set avoiding U has at
least two boundary edges. For a connected graph the last condition reduces to
a bridge check: a violating set with boundary degree 0 would contradict
connectivity, one with degree 1 is exactly one side of a bridge, so it
suffices that every bridge has a vertex of U on both sides. For disconnected
graphs a whole U-free component is also a violation, and check_instance
reports it so that the polynomial check agrees with the exhaustive one on
arbitrary input.

cut_condition_bruteforce is the definitional oracle: it enumerates every
U-free vertex subset and counts boundary edges directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multigraph import Multigraph, bridges, components, delete_edges


@dataclass(frozen=True)
class Instance:
    """A multigraph plus the prescribed boundary supports.

    t_set prescribes where the mod-2 boundary is nonzero and u_set where the
    mod-3 boundary is nonzero (the file format calls them T and U). Nothing
    is validated here; check_instance reports problems instead.
    """

    graph: Multigraph
    t_set: frozenset[int] = frozenset()
    u_set: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "t_set", frozenset(self.t_set))
        object.__setattr__(self, "u_set", frozenset(self.u_set))


@dataclass(frozen=True)
class CutWitness:
    """A vertex set avoiding U with fewer than two boundary edges."""

    side: frozenset[int]
    bridge: int | None  # None when the witness is a whole component


@dataclass(frozen=True)
class FeasibilityReport:
    connected: bool
    containment_ok: bool
    parity_ok: bool
    u_size_ok: bool
    cut_ok: bool
    witness: CutWitness | None = None

    @property
    def valid(self) -> bool:
        return (
            self.connected
            and self.containment_ok
            and self.parity_ok
            and self.u_size_ok
            and self.cut_ok
        )

    def summary(self) -> str:
        if self.valid:
            return "instance accepted"
        bad = [
            name
            for name, ok in (
                ("connected", self.connected),
                ("containment", self.containment_ok),
                ("parity", self.parity_ok),
                ("u-size", self.u_size_ok),
                ("cut", self.cut_ok),
            )
            if not ok
        ]
        msg = "instance rejected: " + ", ".join(bad)
        if self.witness is not None:
            msg += f"; witness side {sorted(self.witness.side)}"
        return msg


def check_instance(inst: Instance) -> FeasibilityReport:
    """Evaluate every acceptance flag; never raises."""
    g = inst.graph
    comp = components(g)
    ncomp = max(comp) + 1 if comp else 0
    connected = ncomp == 1
    containment_ok = inst.t_set <= inst.u_set and all(
        0 <= v < g.n for v in inst.u_set
    )
    parity_ok = len(inst.t_set) % 2 == 0
    u_size_ok = len(inst.u_set) != 1

    cut_ok = True
    witness: CutWitness | None = None
    if ncomp > 1:
        for cid in range(ncomp):
            members = frozenset(v for v in range(g.n) if comp[v] == cid)
            if not members & inst.u_set:
                cut_ok = False
                witness = CutWitness(members, None)
                break
    if cut_ok:
        for eid in sorted(bridges(g)):
            a, b = g.edges[eid]
            sub = delete_edges(g, (eid,)).graph
            side_comp = components(sub)
            for end in (a, b):
                side = frozenset(v for v in range(g.n) if side_comp[v] == side_comp[end])
                if not side & inst.u_set:
                    cut_ok = False
                    witness = CutWitness(side, eid)
                    break
            if not cut_ok:
                break
    return FeasibilityReport(connected, containment_ok, parity_ok, u_size_ok, cut_ok, witness)


def cut_condition_bruteforce(
    g: Multigraph, u_set, max_vertices: int = 20
) -> tuple[bool, frozenset[int] | None]:
    """Enumerate every nonempty proper U-free vertex set; the definitional check.

    Returns (True, None) if all such sets have at least two boundary edges,
    else (False, witness) for the first failing set in ascending bitmask order
    over the non-U vertices.
    """
    if g.n > max_vertices:
        raise ValueError(f"brute-force cut check limited to {max_vertices} vertices")
    u_set = frozenset(u_set)
    candidates = [v for v in range(g.n) if v not in u_set]
    k = len(candidates)
    for mask in range(1, 1 << k):
        subset = frozenset(candidates[i] for i in range(k) if mask >> i & 1)
        if len(subset) == g.n:
            continue
        d = 0
        for a, b in g.edges:
            if (a in subset) != (b in subset):
                d += 1
                if d >= 2:
                    break
        if d < 2:
            return False, subset
    return True, None
