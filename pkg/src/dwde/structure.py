"""Finite-window combinatorics of the skew product.

Nodes are (cell, site) pairs over a site window; edges follow the
branch images and the site jumps of the environment.  Strong components
are certified only on nodes whose whole jump neighborhood stays inside
the window; anything touching the boundary is reported as truncated,
because reachability through sites outside the window cannot be ruled
in or out from a finite picture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .environments import TransitionFunction
from .interval_maps import MarkovIntervalMap

Node = tuple[int, int]  # (cell index, site)


@dataclass
class SkewGraph:
    window: int
    num_cells: int
    jump_bound: int
    nodes: list[Node]
    edges: list[tuple[Node, Node]]  # both endpoints inside the window
    external_edges: list[tuple[Node, Node]]  # target site outside


def build_skew_graph(m: MarkovIntervalMap, env, window: int) -> SkewGraph:
    """Materialize the reachability graph over cells x [-W, W].

    Node (j, i) points to (k, i + jump) for every cell k in the image of
    cell j, with jump the environment's value on cell j at site i.
    Edge lists are in canonical (node, successor) order.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    sites = range(-window, window + 1)
    nodes = [(j, i) for i in sites for j in range(m.num_cells)]
    edges = []
    external = []
    jump_bound = 1
    for i in sites:
        jumps = env.at(i).jumps
        for j in range(m.num_cells):
            jump = jumps[j]
            jump_bound = max(jump_bound, abs(jump))
            target_site = i + jump
            for k in m.image_sets[j]:
                edge = ((j, i), (k, target_site))
                if -window <= target_site <= window:
                    edges.append(edge)
                else:
                    external.append(edge)
    return SkewGraph(
        window=window,
        num_cells=m.num_cells,
        jump_bound=jump_bound,
        nodes=nodes,
        edges=edges,
        external_edges=external,
    )


@dataclass
class CommClass:
    nodes: tuple[Node, ...]
    certified: bool  # membership witnessed with full jump neighborhoods visible
    closed: bool | None  # None when the surrounding component is truncated


def communication_classes(graph: SkewGraph) -> list[CommClass]:
    """Window-certified communication structure.

    Components are the strong components of the window graph; witnesses
    may pass through boundary sites, but only interior nodes (those at
    least one jump bound away from the window edge, so their whole
    one-step structure is visible) are certified as class members.  A
    component's boundary remainder is reported separately with
    certified=False.  Closure is decidable only for fully interior
    components: True when no edge leaves the component, False when one
    does, None when the component touches the boundary.  Classes are
    listed by their smallest node.
    """
    order = {v: n for n, v in enumerate(graph.nodes)}
    succ: list[list[int]] = [[] for _ in graph.nodes]
    for a, b in graph.edges:
        succ[order[a]].append(order[b])
    comp = _tarjan_scc(succ)

    n_comps = max(comp) + 1 if comp else 0
    members: list[list[Node]] = [[] for _ in range(n_comps)]
    for v, c in zip(graph.nodes, comp):
        members[c].append(v)

    leaves: list[bool] = [False] * n_comps
    for a, b in graph.edges:
        if comp[order[a]] != comp[order[b]]:
            leaves[comp[order[a]]] = True
    external_from = {a for a, _ in graph.external_edges}

    interior = graph.window - graph.jump_bound
    out = []
    for c in range(n_comps):
        inside = tuple(sorted(v for v in members[c] if abs(v[1]) <= interior))
        boundary = tuple(sorted(v for v in members[c] if abs(v[1]) > interior))
        if inside:
            if boundary:
                closed = None  # truncated component: closure undecidable
            else:
                closed = not leaves[c] and not any(
                    v in external_from for v in members[c]
                )
            out.append(CommClass(nodes=inside, certified=True, closed=closed))
        if boundary:
            out.append(CommClass(nodes=boundary, certified=False, closed=None))
    out.sort(key=lambda cc: (cc.nodes[0], not cc.certified))
    return out


def _tarjan_scc(succ: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns a component id per vertex."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    counter = 0
    n_comps = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comps
                    if w == v:
                        break
                n_comps += 1
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp


@dataclass(frozen=True)
class LinkageResult:
    holds: bool
    witness: str


def check_linkage(
    m: MarkovIntervalMap, support: Sequence[TransitionFunction]
) -> LinkageResult:
    """Sufficient condition for uniformly large connecting cylinders.

    Verifies: at least two cells, full branches, and every support
    function attaining exactly the values {+1, -1}.  This certifies the
    linkage structure for the shipped model class; it is not a decision
    procedure for arbitrary environments.
    """
    if m.num_cells < 2:
        return LinkageResult(False, "need at least two partition cells")
    if not m.full_branch:
        return LinkageResult(False, "base map is not full-branch")
    for f in support:
        values = f.values
        if values != {1, -1}:
            return LinkageResult(
                False,
                f"function {f.jumps} attains {sorted(values)}, needs both +1 and -1 only",
            )
    return LinkageResult(
        True,
        "full-branch base with >= 2 cells and every function attaining exactly {+1, -1}",
    )


def edge_list_text(graph: SkewGraph) -> str:
    """Canonical one-edge-per-line export: 'j,i -> k,i2'."""
    lines = [f"{a[0]},{a[1]} -> {b[0]},{b[1]}" for a, b in graph.edges]
    lines += [f"{a[0]},{a[1]} -> {b[0]},{b[1]} (external)" for a, b in graph.external_edges]
    return "\n".join(lines) + "\n"
