"""Recursive construction of nowhere-zero Z2 x Z3 labelings with prescribed
boundary supports.

solve() accepts an Instance whose preconditions hold (see feasibility) and
returns a Solution that the independent verifier accepts. The recursion
strictly shrinks the edge count at every step and dispatches in a fixed
order:

  1. strip loops (they get the pair (1, 1) and never touch a boundary);
  2. graphs on at most two vertices, solved by a closed-form table;
  3. a vertex of degree 2 outside U, removed by contracting one of its edges;
  4. a proper 1-separation, split at the cut vertex into two sub-instances;
  5. U empty: delete one edge, prescribe its endpoints, then cancel them;
  6. otherwise find an anchored path between two prescribed vertices and
     recurse on the components left after deleting it.

Every structural fact a step relies on is re-checked at runtime through
invariants.require, so a violated derivation fails loudly instead of
producing a wrong labeling. The final result is verified before it is
returned.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .feasibility import FeasibilityReport, Instance, check_instance
from .groupflow import Solution, boundary, verify_solution
from .invariants import require
from .multigraph import (
    GraphMap,
    Multigraph,
    Path,
    Separation,
    components,
    contract_edge,
    delete_edges,
    induced_by_edges,
    path_is_valid,
    proper_one_separation,
    two_disjoint_paths,
    two_paths_to_set,
)


class InvalidInstanceError(ValueError):
    """The instance fails the solver's preconditions; carries the report."""

    def __init__(self, report: FeasibilityReport) -> None:
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class PathWitness:
    """An anchored path plus the component hosting both of its ends.

    The path ends at two distinct prescribed vertices, no interior vertex is
    prescribed, deleting the path's edges leaves both ends in host_component,
    and every other component of the remainder avoids the prescription.
    """

    path: Path
    host_component: frozenset[int]


@dataclass
class TraceNode:
    """One recursion step: which rule fired and the sub-instance sizes."""

    rule: str
    vertices: int
    edges: int
    t_size: int
    u_size: int
    children: list["TraceNode"] = field(default_factory=list)


def format_trace(node: TraceNode, indent: int = 0) -> str:
    line = (
        f"{'  ' * indent}{node.rule} n={node.vertices} m={node.edges}"
        f" |T|={node.t_size} |U|={node.u_size}"
    )
    return "\n".join([line] + [format_trace(c, indent + 1) for c in node.children])


# Closed-form residual table for graphs on two vertices: maps the remaining
# (Z2, Z3) boundary target at vertex 0 to two nonzero pairs summing to it,
# with every edge read as oriented 0 -> 1.
_BASE_TABLE: dict[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]] = {
    (0, 0): ((1, 1), (1, 2)),
    (1, 0): ((1, 1), (0, 2)),
    (0, 1): ((0, 2), (0, 2)),
    (0, 2): ((0, 1), (0, 1)),
    (1, 1): ((1, 0), (0, 1)),
    (1, 2): ((1, 0), (0, 2)),
}


def solve(inst: Instance) -> Solution:
    """Solve an accepted instance; raises InvalidInstanceError otherwise."""
    sol, _ = _solve_entry(inst, traced=False)
    return sol


def solve_with_trace(inst: Instance) -> tuple[Solution, TraceNode]:
    """Like solve() but also returns the recursion trace tree."""
    sol, trace = _solve_entry(inst, traced=True)
    assert trace is not None
    return sol, trace


def _solve_entry(inst: Instance, traced: bool) -> tuple[Solution, TraceNode | None]:
    report = check_instance(inst)
    if not report.valid:
        raise InvalidInstanceError(report)
    limit = 4 * inst.graph.m + 1000
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    sink: list[TraceNode] | None = [] if traced else None
    p2, p3 = _solve(inst.graph, inst.t_set, inst.u_set, sink, inst.graph.m + 1)
    sol = Solution(tuple(p2), tuple(p3))
    problems = verify_solution(inst.graph, inst.t_set, inst.u_set, sol)
    require(not problems, f"solver output failed verification: {problems[:3]}")
    return sol, (sink[0] if traced else None)


def _solve(
    g: Multigraph,
    t: frozenset[int],
    u: frozenset[int],
    trace: list[TraceNode] | None,
    parent_edges: int,
) -> tuple[list[int], list[int]]:
    require(g.m < parent_edges, "recursion must strictly shrink the edge count")
    report = check_instance(Instance(g, t, u))
    require(report.valid, f"derived sub-instance rejected: {report.summary()}")

    node: TraceNode | None = None
    kids: list[TraceNode] | None = None
    if trace is not None:
        node = TraceNode("?", g.n, g.m, len(t), len(u))
        trace.append(node)
        kids = node.children

    loops = g.loop_ids()
    if loops:
        rule, p2, p3 = "loop", *_strip_loops(g, t, u, loops, kids)
    elif g.n <= 2:
        rule = "base"
        p2, p3 = _solve_base(g, t, u)
    elif (v := _degree_two_vertex(g, u)) is not None:
        rule = "deg2"
        p2, p3 = _reduce_degree_two(g, t, u, v, kids)
    elif (sep := proper_one_separation(g)) is not None:
        rule, p2, p3 = _split_at_cut_vertex(g, t, u, sep, kids)
    elif not u:
        rule = "empty-U"
        p2, p3 = _solve_empty_u(g, kids)
    else:
        rule = "path"
        p2, p3 = _solve_by_path(g, t, u, kids)

    if node is not None:
        node.rule = rule
    return p2, p3


def assign_loops(g: Multigraph) -> tuple[dict[int, tuple[int, int]], GraphMap]:
    """Give every loop the pair (1, 1) and return the loopless residual.

    Loops contribute nothing to any boundary, so any nonzero pair works; the
    fixed choice keeps output deterministic.
    """
    loops = g.loop_ids()
    return {e: (1, 1) for e in loops}, delete_edges(g, loops)


def _strip_loops(g, t, u, loops, kids):
    values, dm = assign_loops(g)
    require(dm.graph.m < g.m, "loop stripping must remove edges")
    s2, s3 = _solve(dm.graph, t, u, kids, g.m)
    p2, p3 = [1] * g.m, [1] * g.m
    for new_id, old_id in enumerate(dm.edge_origin):
        p2[old_id] = s2[new_id]
        p3[old_id] = s3[new_id]
    for e, (a, b) in values.items():
        p2[e], p3[e] = a, b
    return p2, p3


def solve_base(g: Multigraph, t_set, u_set) -> Solution:
    """Closed-form solution for loopless graphs on at most two vertices."""
    p2, p3 = _solve_base(g, frozenset(t_set), frozenset(u_set))
    return Solution(tuple(p2), tuple(p3))


def _solve_base(g, t, u):
    require(not g.loop_ids(), "base case expects loops to be stripped")
    if g.n <= 1:
        require(g.m == 0 and not t and not u, "single vertex admits nothing but loops")
        return [], []
    require(all({a, b} == {0, 1} for a, b in g.edges), "base case needs n = 2")
    m = g.m
    require(m >= 1, "a connected two-vertex graph has an edge")
    sigma2 = 1 if 0 in t else 0
    sigma3 = 1 if u else 0
    if m == 1:
        require(bool(u), "a single edge cannot carry a zero mod-3 boundary")
        conceptual = [(sigma2, 1)]
    else:
        conceptual = [(1, 1) if i % 2 == 0 else (1, 2) for i in range(m - 2)]
        pre2 = sum(a for a, _ in conceptual) % 2
        pre3 = sum(b for _, b in conceptual) % 3
        residual = ((sigma2 - pre2) % 2, (sigma3 - pre3) % 3)
        conceptual.extend(_BASE_TABLE[residual])
    p2, p3 = [0] * m, [0] * m
    for idx, (c2, c3) in enumerate(conceptual):
        a, _ = g.edges[idx]
        p2[idx] = c2
        p3[idx] = c3 if a == 0 else (-c3) % 3
    return p2, p3


def _degree_two_vertex(g, u):
    deg = [0] * g.n
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    for v in range(g.n):
        if deg[v] == 2 and v not in u:
            return v
    return None


def _reduce_degree_two(g, t, u, v, kids):
    """Contract one edge at a degree-2 unprescribed vertex and lift back.

    The surviving companion edge fixes the contracted edge's values: the pair
    that cancels both boundaries at v. It is nonzero because the companion's
    pair is.
    """
    inc = [idx for idx, (a, b) in enumerate(g.edges) if v in (a, b)]
    require(len(inc) == 2, "degree-2 reduction needs exactly two incidences")
    e, f = inc
    cm = contract_edge(g, e)
    vi = cm.vertex_image
    t_sub = frozenset(vi[x] for x in t)
    u_sub = frozenset(vi[x] for x in u)
    require(len(t_sub) == len(t) and len(u_sub) == len(u), "contraction merged prescribed vertices")
    s2, s3 = _solve(cm.graph, t_sub, u_sub, kids, g.m)
    p2, p3 = [0] * g.m, [0] * g.m
    for new_id, old_id in enumerate(cm.edge_origin):
        p2[old_id] = s2[new_id]
        p3[old_id] = s3[new_id]
    fa, _ = g.edges[f]
    b2 = p2[f]
    b3 = p3[f] if fa == v else (-p3[f]) % 3
    ea, _ = g.edges[e]
    p2[e] = b2
    p3[e] = (-b3) % 3 if ea == v else b3 % 3
    require(p2[e] != 0 or p3[e] != 0, "lifted pair must stay nonzero")
    return p2, p3


def _split_at_cut_vertex(g, t, u, sep: Separation, kids):
    """Recurse on the two sides of a proper 1-separation and combine.

    If U lives entirely on one side, the other side is solved as a plain flow
    and the union works as-is. Otherwise both sides adopt the cut vertex into
    their prescriptions, with its membership in each side's T chosen to keep
    the sizes even; the mod-3 values of side 2 are then globally negated or
    not, whichever makes the combined boundary at the cut vertex zero exactly
    when the vertex is unprescribed. Exactly one of the two signs works
    because the two side boundaries there are nonzero values of Z3.
    """
    v = sep.cut_vertex
    gm1 = induced_by_edges(g, sep.side1)
    gm2 = induced_by_edges(g, sep.side2)
    verts1 = frozenset(x for x in range(g.n) if gm1.vertex_image[x] != -1)
    verts2 = frozenset(x for x in range(g.n) if gm2.vertex_image[x] != -1)
    require(verts1 & verts2 == {v}, "separation sides must meet exactly in the cut vertex")
    u1p = (u & verts1) - {v}
    u2p = (u & verts2) - {v}

    p2, p3 = [0] * g.m, [0] * g.m

    def lift(gm: GraphMap, s2, s3) -> None:
        for new_id, old_id in enumerate(gm.edge_origin):
            p2[old_id] = s2[new_id]
            p3[old_id] = s3[new_id]

    if not u1p or not u2p:
        host, guest = (gm1, gm2) if not u2p else (gm2, gm1)
        host_verts = verts1 if not u2p else verts2
        require(u <= host_verts and t <= host_verts, "prescription must fit on the host side")
        hv = host.vertex_image
        s2, s3 = _solve(
            host.graph,
            frozenset(hv[x] for x in t),
            frozenset(hv[x] for x in u),
            kids,
            g.m,
        )
        lift(host, s2, s3)
        s2, s3 = _solve(guest.graph, frozenset(), frozenset(), kids, g.m)
        lift(guest, s2, s3)
        return "sep-a", p2, p3

    sides = []
    t_flags = []
    for gm, verts in ((gm1, verts1), (gm2, verts2)):
        u_side = (u & verts) | {v}
        t_core = t & (verts - {v})
        takes_v = len(t_core) % 2 == 1
        t_side = t_core | ({v} if takes_v else frozenset())
        require(len(t_side) % 2 == 0, "side prescription must have even size")
        t_flags.append(takes_v)
        sides.append((gm, t_side, u_side))
    require(
        (t_flags[0] + t_flags[1]) % 2 == ((v in t) % 2),
        "cut-vertex parity must match across the split",
    )
    for gm, t_side, u_side in sides:
        vi = gm.vertex_image
        s2, s3 = _solve(
            gm.graph,
            frozenset(vi[x] for x in t_side),
            frozenset(vi[x] for x in u_side),
            kids,
            g.m,
        )
        lift(gm, s2, s3)

    def boundary3_at(v_idx: int, edge_ids) -> int:
        acc = 0
        for eid in edge_ids:
            a, b = g.edges[eid]
            if a == v_idx:
                acc += p3[eid]
            if b == v_idx:
                acc -= p3[eid]
        return acc % 3

    d1 = boundary3_at(v, sep.side1)
    d2 = boundary3_at(v, sep.side2)
    require(d1 != 0 and d2 != 0, "both sides must charge the cut vertex")
    plus_zero = (d1 + d2) % 3 == 0
    minus_zero = (d1 - d2) % 3 == 0
    require(plus_zero != minus_zero, "exactly one sign choice cancels at the cut vertex")
    want_zero = v not in u
    if want_zero != plus_zero:
        for old_id in gm2.edge_origin:
            p3[old_id] = (-p3[old_id]) % 3
    return "sep-b", p2, p3


def _solve_empty_u(g, kids):
    """U empty: delete one edge, prescribe its ends, then cancel them.

    The sub-solution's mod-3 boundary is supported exactly on the deleted
    edge's endpoints with opposite values, so a unique nonzero value on that
    edge restores a flow; its mod-2 value is 0 and the pair stays nonzero.
    """
    e = next(idx for idx, (a, b) in enumerate(g.edges) if a != b)
    a, b = g.edges[e]
    dm = delete_edges(g, (e,))
    s2, s3 = _solve(dm.graph, frozenset(), frozenset({a, b}), kids, g.m)
    p2, p3 = [0] * g.m, [0] * g.m
    for new_id, old_id in enumerate(dm.edge_origin):
        p2[old_id] = s2[new_id]
        p3[old_id] = s3[new_id]
    acc_a = acc_b = 0
    for idx, (x, y) in enumerate(g.edges):
        if idx == e:
            continue
        if x == a:
            acc_a += p3[idx]
        if y == a:
            acc_a -= p3[idx]
        if x == b:
            acc_b += p3[idx]
        if y == b:
            acc_b -= p3[idx]
    require(acc_a % 3 != 0 and (acc_a + acc_b) % 3 == 0, "deleted edge's ends must carry opposite charge")
    p2[e] = 0
    p3[e] = (-acc_a) % 3
    require(p3[e] != 0, "restoring value must be nonzero")
    require((acc_a + p3[e]) % 3 == 0 and (acc_b - p3[e]) % 3 == 0, "flow restoration failed")
    return p2, p3


def witness_violations(g: Multigraph, u_set, pw: PathWitness) -> list[str]:
    """Check the four anchored-path invariants; empty list means all hold."""
    out: list[str] = []
    p = pw.path
    if not path_is_valid(g, p):
        return ["path is not a simple path of g"]
    if not p.nontrivial:
        out.append("path is trivial")
    e1, e2 = p.ends
    if e1 == e2 or e1 not in u_set or e2 not in u_set:
        out.append("path ends must be two distinct prescribed vertices")
    if any(x in u_set for x in p.vertices[1:-1]):
        out.append("path interior touches the prescribed set")
    comp = components(delete_edges(g, p.edges).graph)
    if comp[e1] != comp[e2]:
        out.append("path ends land in different components")
    else:
        actual = frozenset(x for x in range(g.n) if comp[x] == comp[e1])
        if actual != pw.host_component:
            out.append("host component does not match the remainder")
    host_ids = {comp[x] for x in pw.host_component}
    for x in range(g.n):
        if comp[x] not in host_ids and x in u_set:
            out.append(f"component of vertex {x} also touches the prescribed set")
            break
    return out


def find_anchored_path(g: Multigraph, u_set) -> PathWitness:
    """Find an anchored path by local improvement.

    Start from one of two internally disjoint paths between the two lowest
    prescribed vertices, so the other path keeps the ends together after
    deletion. Then repeat: truncate at the first prescribed interior vertex,
    or, when some other component of the remainder still holds a prescribed
    vertex, reroute the path through a two-path fan from that vertex to the
    current path. Every step strictly grows the edge count of the component
    hosting the ends, which bounds the loop.
    """
    u_sorted = sorted(u_set)
    require(len(u_sorted) >= 2, "anchored path needs two prescribed vertices")
    pa, pb = two_disjoint_paths(g, u_sorted[0], u_sorted[1])
    require(not set(pa.edges) & set(pb.edges), "disjoint paths must not share edges")
    path = pa
    prev_host_edges = -1
    for _ in range(g.m + 2):
        dm = delete_edges(g, path.edges)
        comp = components(dm.graph)
        end1, end2 = path.ends
        require(comp[end1] == comp[end2], "path ends must stay connected after deletion")
        host_id = comp[end1]
        host_edges = sum(1 for a, _b in dm.graph.edges if comp[a] == host_id)
        require(host_edges > prev_host_edges, "host component must strictly grow")
        prev_host_edges = host_edges

        interior = next((x for x in path.vertices[1:-1] if x in u_set), None)
        if interior is not None:
            path = _truncate_at(path, interior)
            continue

        ncomp = max(comp) + 1
        foreign = None
        for cid in range(ncomp):
            if cid == host_id:
                continue
            members = [x for x in range(g.n) if comp[x] == cid]
            if any(x in u_set for x in members):
                foreign = (cid, members)
                break
        if foreign is None:
            host = frozenset(x for x in range(g.n) if comp[x] == host_id)
            pw = PathWitness(path, host)
            problems = witness_violations(g, u_set, pw)
            require(not problems, f"anchored path invariants failed: {problems}")
            return pw
        path = _reroute(g, dm, comp, path, foreign, u_set)
    require(False, "anchored-path improvement failed to terminate")
    raise AssertionError("unreachable")


def _truncate_at(path: Path, w: int) -> Path:
    """Cut the path at interior vertex w, keeping the lower-indexed end."""
    i = path.vertices.index(w)
    if path.vertices[0] <= path.vertices[-1]:
        return Path(path.vertices[: i + 1], path.edges[:i])
    return Path(tuple(reversed(path.vertices[i:])), tuple(reversed(path.edges[i:])))


def _reroute(g, dm: GraphMap, comp, path: Path, foreign, u_set) -> Path:
    """Swing the path into a component that still holds a prescribed vertex.

    A two-path fan from that vertex to the current path gives terminals x1
    and x2; the new path follows the fan's first branch to x1 and continues
    along the old path away from x2, so the abandoned segment through x2 and
    the second branch both join the host component.
    """
    cid, members = foreign
    source = min(x for x in members if x in u_set)
    on_path = set(path.vertices)
    require(source not in on_path, "rerouting source must avoid the current path")
    attach = [x for x in members if x in on_path]
    require(len(attach) >= 2, "foreign component must attach to the path twice")
    comp_edges = [idx for idx, (a, _b) in enumerate(dm.graph.edges) if comp[a] == cid]
    sub = induced_by_edges(dm.graph, comp_edges, extra_vertices=members)
    vi = sub.vertex_image
    back = {vi[x]: x for x in members}
    q1, q2 = two_paths_to_set(sub.graph, vi[source], frozenset(vi[x] for x in attach))

    def to_parent(p: Path) -> Path:
        verts = tuple(back[x] for x in p.vertices)
        eids = tuple(dm.edge_origin[sub.edge_origin[eid]] for eid in p.edges)
        return Path(verts, eids)

    q1g, q2g = to_parent(q1), to_parent(q2)
    x1, x2 = q1g.vertices[-1], q2g.vertices[-1]
    i1 = path.vertices.index(x1)
    i2 = path.vertices.index(x2)
    require(0 < i1 < len(path.vertices) - 1, "fan terminal must be interior to the path")
    require(0 < i2 < len(path.vertices) - 1, "fan terminal must be interior to the path")
    require(i1 != i2, "fan terminals must be distinct on the path")
    if i1 < i2:
        tail_v = tuple(reversed(path.vertices[:i1]))
        tail_e = tuple(reversed(path.edges[:i1]))
    else:
        tail_v = path.vertices[i1 + 1 :]
        tail_e = path.edges[i1:]
    new_path = Path(q1g.vertices + tail_v, q1g.edges + tail_e)
    require(path_is_valid(g, new_path), "rerouted path must stay simple")
    return new_path


def _solve_by_path(g, t, u, kids):
    """Anchored-path recursion: solve the remainder, then label the path.

    The path's ends flip the mod-2 prescription and every path vertex joins
    the mod-3 prescription for the remainder. Path edges then carry 1 in Z2,
    restoring the original mod-2 supports, while the mod-3 values are chosen
    greedily along the path to cancel each interior vertex and finally
    shifted by the constant that leaves both end boundaries nonzero.
    """
    pw = find_anchored_path(g, u)
    path = pw.path
    end1, end2 = path.ends
    t_prime = t ^ {end1, end2}
    u_prime = u | set(path.vertices)
    require(t_prime <= pw.host_component, "flipped prescription must live in the host component")
    require(len(t_prime) % 2 == 0, "flipped prescription must stay even")

    dm = delete_edges(g, path.edges)
    comp = components(dm.graph)
    ncomp = max(comp) + 1
    host_id = comp[end1]
    require(comp[end2] == host_id, "anchored path ends must share a component")
    comp_vertices: list[list[int]] = [[] for _ in range(ncomp)]
    for x in range(g.n):
        comp_vertices[comp[x]].append(x)
    comp_edges: list[list[int]] = [[] for _ in range(ncomp)]
    for idx, (a, _b) in enumerate(dm.graph.edges):
        comp_edges[comp[a]].append(idx)

    p2, p3 = [0] * g.m, [0] * g.m
    path_vertexset = set(path.vertices)
    for cid in range(ncomp):
        verts = comp_vertices[cid]
        sub = induced_by_edges(dm.graph, comp_edges[cid], extra_vertices=verts)
        vi = sub.vertex_image
        t_c = frozenset(vi[x] for x in verts if x in t_prime)
        u_c = frozenset(vi[x] for x in verts if x in u_prime)
        if cid != host_id:
            require(not any(x in u for x in verts), "non-host component touches the prescription")
            require(
                sum(1 for x in verts if x in path_vertexset) >= 2,
                "non-host component must meet the path at least twice",
            )
            require(not t_c, "non-host component must carry no mod-2 prescription")
        s2, s3 = _solve(sub.graph, t_c, u_c, kids, g.m)
        for new_id, mid_id in enumerate(sub.edge_origin):
            old_id = dm.edge_origin[mid_id]
            p2[old_id] = s2[new_id]
            p3[old_id] = s3[new_id]

    bnd = [0] * g.n
    path_edgeset = set(path.edges)
    for idx, (a, b) in enumerate(g.edges):
        if idx in path_edgeset:
            continue
        bnd[a] += p3[idx]
        bnd[b] -= p3[idx]
    verts = path.vertices
    k = len(path.edges)
    conceptual = [0] * k
    for i in range(1, k):
        conceptual[i] = (conceptual[i - 1] - bnd[verts[i]]) % 3
    bad_start = sum(1 for s in (0, 1, 2) if (bnd[end1] + conceptual[0] + s) % 3 == 0)
    bad_finish = sum(1 for s in (0, 1, 2) if (bnd[end2] - conceptual[k - 1] - s) % 3 == 0)
    require(bad_start == 1 and bad_finish == 1, "each end forbids exactly one shift")
    good = [
        s
        for s in (0, 1, 2)
        if (bnd[end1] + conceptual[0] + s) % 3 != 0
        and (bnd[end2] - conceptual[k - 1] - s) % 3 != 0
    ]
    require(bool(good), "a boundary-fixing shift must exist")
    shift = good[0]
    for j, eid in enumerate(path.edges):
        val = (conceptual[j] + shift) % 3
        a, _b = g.edges[eid]
        p2[eid] = 1
        p3[eid] = val if a == verts[j] else (-val) % 3
    return p2, p3
