"""Multigraph with stable edge identities and structural primitives.

Vertices are dense integer indices 0..n-1 and an edge is a (tail, head) pair;
the position in the edge list is the edge id. Loops and parallel edges are
permitted. All values are immutable; operations that derive a new graph
(deletion, contraction, induced subgraphs) return a GraphMap carrying the
edge and vertex correspondences back to the parent so per-edge values can be
lifted through a recursion.

Tie-breaking is deterministic everywhere: adjacency lists are kept in edge-id
order and the lowest index wins whenever a choice is free.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .invariants import InternalInvariantError, require


@dataclass(frozen=True)
class Multigraph:
    """Directed multigraph on vertices 0..n-1 with an ordered edge list."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        norm = tuple((int(a), int(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", norm)
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for a, b in norm:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range for n={self.n}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        """Number of edge incidences at v; a loop counts twice."""
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return sum((a == v) + (b == v) for a, b in self.edges)

    def incidences(self, v: int) -> list[int]:
        """Edge ids incident to v in ascending order; loops listed twice."""
        out: list[int] = []
        for idx, (a, b) in enumerate(self.edges):
            if a == v:
                out.append(idx)
            if b == v:
                out.append(idx)
        return out

    def loop_ids(self) -> list[int]:
        return [idx for idx, (a, b) in enumerate(self.edges) if a == b]


@dataclass(frozen=True)
class GraphMap:
    """A derived graph plus correspondences back to its parent.

    edge_origin[i] is the parent edge id of the derived edge i and
    vertex_image[v] is the derived index of parent vertex v (-1 if dropped).
    Derived edges keep the parent orientation under vertex_image, so per-edge
    values lift without sign changes.
    """

    graph: Multigraph
    edge_origin: tuple[int, ...]
    vertex_image: tuple[int, ...]


@dataclass(frozen=True)
class Separation:
    """A proper 1-separation: an edge bipartition whose sides meet in one vertex."""

    side1: frozenset[int]
    side2: frozenset[int]
    cut_vertex: int


@dataclass(frozen=True)
class Path:
    """A simple path given as v0..vk plus the edge ids joining consecutive vertices."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("path must have one more vertex than edges")

    @property
    def ends(self) -> tuple[int, int]:
        return self.vertices[0], self.vertices[-1]

    @property
    def nontrivial(self) -> bool:
        return len(self.edges) >= 1


def path_is_valid(g: Multigraph, p: Path) -> bool:
    """Check the Path invariants against a concrete graph."""
    if len(set(p.vertices)) != len(p.vertices):
        return False
    for i, eid in enumerate(p.edges):
        if not 0 <= eid < g.m:
            return False
        a, b = g.edges[eid]
        if {a, b} != {p.vertices[i], p.vertices[i + 1]}:
            return False
    return True


def _adjacency(g: Multigraph) -> list[list[tuple[int, int]]]:
    """Per-vertex list of (neighbour, edge id) in edge-id order, loops skipped."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for idx, (a, b) in enumerate(g.edges):
        if a == b:
            continue
        adj[a].append((b, idx))
        adj[b].append((a, idx))
    return adj


def components(g: Multigraph) -> list[int]:
    """Component id per vertex; ids are assigned in order of the lowest member."""
    comp = [-1] * g.n
    adj = _adjacency(g)
    cid = 0
    for root in range(g.n):
        if comp[root] != -1:
            continue
        comp[root] = cid
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _ in adj[x]:
                if comp[y] == -1:
                    comp[y] = cid
                    queue.append(y)
        cid += 1
    return comp


def component_count(g: Multigraph) -> int:
    comp = components(g)
    return max(comp) + 1 if comp else 0


def is_connected(g: Multigraph) -> bool:
    return component_count(g) == 1


def bridges(g: Multigraph) -> frozenset[int]:
    """Edge ids whose deletion disconnects their component.

    Iterative depth-first search with low-link values. Only the entry edge id
    is skipped when scanning a vertex, so a parallel companion edge acts as a
    back edge and correctly prevents bridge status. Loops are never bridges.
    """
    adj = _adjacency(g)
    disc = [-1] * g.n
    low = [0] * g.n
    out: list[int] = []
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack: list[list[int]] = [[root, -1, 0]]
        while stack:
            frame = stack[-1]
            v, entry_edge, cursor = frame
            if cursor < len(adj[v]):
                frame[2] += 1
                w, eid = adj[v][cursor]
                if eid == entry_edge:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append([w, eid, 0])
                elif disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
                    if low[v] > disc[parent]:
                        out.append(entry_edge)
    return frozenset(out)


def cut_vertices(g: Multigraph) -> list[int]:
    """Articulation vertices in ascending order."""
    adj = _adjacency(g)
    disc = [-1] * g.n
    low = [0] * g.n
    is_cut = [False] * g.n
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack: list[list[int]] = [[root, -1, 0]]
        while stack:
            frame = stack[-1]
            v, entry_edge, cursor = frame
            if cursor < len(adj[v]):
                frame[2] += 1
                w, eid = adj[v][cursor]
                if eid == entry_edge:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append([w, eid, 0])
                elif disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
                    if parent == root:
                        root_children += 1
                    elif low[v] >= disc[parent]:
                        is_cut[parent] = True
        if root_children >= 2:
            is_cut[root] = True
    return [v for v in range(g.n) if is_cut[v]]


def proper_one_separation(g: Multigraph) -> Separation | None:
    """Split a connected graph at its lowest-index cut vertex, if one exists.

    side1 is the edge group (one component of g minus the cut vertex, plus its
    edges to the cut vertex) containing the lowest-index non-loop edge; loops
    at the cut vertex join side1. Returns None when the graph is 2-connected
    or too small to have a cut vertex.
    """
    cuts = cut_vertices(g)
    if not cuts:
        return None
    v = cuts[0]
    label = [-1] * g.n
    adj = _adjacency(g)
    cid = 0
    for root in range(g.n):
        if root == v or label[root] != -1:
            continue
        label[root] = cid
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _ in adj[x]:
                if y != v and label[y] == -1:
                    label[y] = cid
                    queue.append(y)
        cid += 1
    groups: dict[int, list[int]] = {}
    loops_at_v: list[int] = []
    for idx, (a, b) in enumerate(g.edges):
        if a == v and b == v:
            loops_at_v.append(idx)
            continue
        anchor = a if a != v else b
        groups.setdefault(label[anchor], []).append(idx)
    require(len(groups) >= 2, "cut vertex must split the graph into >= 2 edge groups")
    first_edge = min(min(ids) for ids in groups.values())
    side1_label = next(lab for lab, ids in groups.items() if first_edge in ids)
    side1 = set(groups[side1_label]) | set(loops_at_v)
    side2 = set(range(g.m)) - side1
    return Separation(frozenset(side1), frozenset(side2), v)


def separation_is_valid(g: Multigraph, sep: Separation) -> bool:
    """Check the proper 1-separation invariants directly."""
    if sep.side1 | sep.side2 != set(range(g.m)) or sep.side1 & sep.side2:
        return False

    def span(side: frozenset[int]) -> set[int]:
        verts: set[int] = set()
        for eid in side:
            a, b = g.edges[eid]
            verts.update((a, b))
        return verts

    v1, v2 = span(sep.side1), span(sep.side2)
    if v1 & v2 != {sep.cut_vertex}:
        return False
    return bool(v1 - v2) and bool(v2 - v1)


def delete_edges(g: Multigraph, edge_ids) -> GraphMap:
    """Remove the given edges; the vertex set is unchanged."""
    gone = set(edge_ids)
    kept = [idx for idx in range(g.m) if idx not in gone]
    new_edges = tuple(g.edges[idx] for idx in kept)
    return GraphMap(
        graph=Multigraph(g.n, new_edges),
        edge_origin=tuple(kept),
        vertex_image=tuple(range(g.n)),
    )


def contract_edge(g: Multigraph, e: int) -> GraphMap:
    """Contract a non-loop edge, merging its endpoints into the lower index.

    The contracted edge disappears, parallels of it become loops, and vertex
    indices above the removed endpoint shift down by one.
    """
    if not 0 <= e < g.m:
        raise ValueError(f"edge id {e} out of range")
    a, b = g.edges[e]
    if a == b:
        raise ValueError("cannot contract a loop")
    lo, hi = (a, b) if a < b else (b, a)
    image = []
    for v in range(g.n):
        if v == hi:
            image.append(lo)
        elif v > hi:
            image.append(v - 1)
        else:
            image.append(v)
    kept = [idx for idx in range(g.m) if idx != e]
    new_edges = tuple((image[g.edges[idx][0]], image[g.edges[idx][1]]) for idx in kept)
    return GraphMap(
        graph=Multigraph(g.n - 1, new_edges),
        edge_origin=tuple(kept),
        vertex_image=tuple(image),
    )


def induced_by_edges(g: Multigraph, edge_ids, extra_vertices=()) -> GraphMap:
    """Subgraph on the given edges plus any extra vertices, indices compacted."""
    kept = sorted(set(edge_ids))
    verts: set[int] = set(extra_vertices)
    for eid in kept:
        a, b = g.edges[eid]
        verts.update((a, b))
    ordered = sorted(verts)
    image = [-1] * g.n
    for new, old in enumerate(ordered):
        image[old] = new
    new_edges = tuple((image[g.edges[eid][0]], image[g.edges[eid][1]]) for eid in kept)
    return GraphMap(
        graph=Multigraph(len(ordered), new_edges),
        edge_origin=tuple(kept),
        vertex_image=tuple(image),
    )


def reverse_edges(g: Multigraph, edge_ids) -> Multigraph:
    """Flip the orientation of the given edges; ids are unchanged."""
    flip = set(edge_ids)
    new_edges = tuple(
        (b, a) if idx in flip else (a, b) for idx, (a, b) in enumerate(g.edges)
    )
    return Multigraph(g.n, new_edges)


class _UnitFlowNet:
    """Tiny unit-capacity max-flow network with paired residual arcs."""

    def __init__(self, node_count: int) -> None:
        self.adj: list[list[int]] = [[] for _ in range(node_count)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def arc(self, a: int, b: int, cap: int) -> int:
        idx = len(self.to)
        self.adj[a].append(idx)
        self.to.append(b)
        self.cap.append(cap)
        self.adj[b].append(idx + 1)
        self.to.append(a)
        self.cap.append(0)
        return idx

    def augment(self, source: int, sink: int) -> bool:
        """Push one unit along a shortest residual path; False if none exists."""
        prev = [-1] * len(self.adj)
        prev[source] = -2
        queue = deque([source])
        while queue:
            x = queue.popleft()
            if x == sink:
                break
            for ai in self.adj[x]:
                y = self.to[ai]
                if self.cap[ai] > 0 and prev[y] == -1:
                    prev[y] = ai
                    queue.append(y)
        if prev[sink] == -1:
            return False
        x = sink
        while x != source:
            ai = prev[x]
            self.cap[ai] -= 1
            self.cap[ai ^ 1] += 1
            x = self.to[ai ^ 1]
        return True


def _two_flow_paths(
    g: Multigraph, source: int, terminals: frozenset[int], per_terminal_cap: int
) -> tuple[Path, Path]:
    """Two unit flows from source to the terminal set, decoded as simple paths.

    Every non-terminal vertex other than the source is split with capacity 1,
    so the decoded paths share no internal vertex. Terminal vertices cannot be
    traversed, only ended on. Raises InternalInvariantError when two units do
    not fit, which signals a violated caller guarantee.
    """
    require(source not in terminals, "source must not be a terminal")
    sink = 2 * g.n
    net = _UnitFlowNet(2 * g.n + 1)
    for v in range(g.n):
        if v != source and v not in terminals:
            net.arc(2 * v, 2 * v + 1, 1)
    for w in sorted(terminals):
        net.arc(2 * w, sink, per_terminal_cap)
    edge_arcs: list[tuple[int, int] | None] = []
    for a, b in g.edges:
        if a == b:
            edge_arcs.append(None)
            continue
        fwd = net.arc(2 * a + 1, 2 * b, 1)
        bwd = net.arc(2 * b + 1, 2 * a, 1)
        edge_arcs.append((fwd, bwd))
    pushed = 0
    for _ in range(2):
        if net.augment(2 * source + 1, sink):
            pushed += 1
    require(pushed == 2, "expected two internally disjoint routes; found fewer")

    outgoing: list[deque[tuple[int, int]]] = [deque() for _ in range(g.n)]
    for idx, arcs in enumerate(edge_arcs):
        if arcs is None:
            continue
        fwd, bwd = arcs
        net_flow = (1 - net.cap[fwd]) - (1 - net.cap[bwd])
        a, b = g.edges[idx]
        if net_flow > 0:
            outgoing[a].append((idx, b))
        elif net_flow < 0:
            outgoing[b].append((idx, a))
    outgoing = [deque(sorted(q)) for q in outgoing]

    def walk() -> Path:
        x = source
        verts = [x]
        eids: list[int] = []
        while x not in terminals:
            require(bool(outgoing[x]), "flow decoding stalled off the terminal set")
            eid, y = outgoing[x].popleft()
            eids.append(eid)
            verts.append(y)
            x = y
        return Path(tuple(verts), tuple(eids))

    p1 = walk()
    p2 = walk()
    return p1, p2


def two_disjoint_paths(g: Multigraph, s: int, t: int) -> tuple[Path, Path]:
    """Two s-t paths sharing only s and t (Menger for a 2-connected graph)."""
    if s == t:
        raise ValueError("endpoints must differ")
    p1, p2 = _two_flow_paths(g, s, frozenset({t}), per_terminal_cap=2)
    require(path_is_valid(g, p1) and path_is_valid(g, p2), "flow decoding broke a path")
    require(
        set(p1.vertices) & set(p2.vertices) == {s, t},
        "paths must intersect exactly in their endpoints",
    )
    return p1, p2


def two_paths_to_set(g: Multigraph, u: int, targets) -> tuple[Path, Path]:
    """Two paths from u to distinct target vertices, disjoint except at u.

    Neither path visits a target internally. Raises InternalInvariantError if
    no such fan exists, which means a caller invariant was violated.
    """
    tset = frozenset(targets)
    require(u not in tset, "fan source must lie outside the target set")
    p1, p2 = _two_flow_paths(g, u, tset, per_terminal_cap=1)
    require(path_is_valid(g, p1) and path_is_valid(g, p2), "flow decoding broke a path")
    require(p1.vertices[-1] != p2.vertices[-1], "fan paths must end at distinct targets")
    require(set(p1.vertices) & set(p2.vertices) == {u}, "fan paths may share only the source")
    require(
        not (set(p1.vertices[1:-1]) | set(p2.vertices[1:-1])) & tset,
        "fan paths must not pass through the target set",
    )
    return p1, p2
