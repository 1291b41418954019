"""Graph of reasons: the dual graph of an IIS with natural-language labels.

Constraints become nodes; two nodes are joined whenever their scopes share a
variable.  For a true IIS this graph is connected - a disconnected graph
would split the IIS into two independently feasible halves, contradicting
irreducibility - so connectivity doubles as a built-in bug detector for the
whole extraction pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DisconnectedGraphError, MissingTemplateError, ModelError
from .iis import Iis
from .model import MilpModel, Relation, TagKind, TaggedConstraint

VAR_PREFIX = "x"  # scheduling variables are named x_<activity>_<time>


@dataclass(frozen=True)
class Hypergraph:
    """Variables as vertices; each constraint's scope as a hyperedge."""

    vertices: frozenset[int]
    hyperedges: tuple[tuple[str, frozenset[int]], ...]


@dataclass(frozen=True)
class DualGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]  # canonical: each pair sorted, list sorted


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    components: int


@dataclass(frozen=True)
class ReasonNode:
    id: str
    kind: TagKind
    params: dict
    label: str
    is_query: bool
    is_minimality: bool


@dataclass(frozen=True)
class ReasonGraph:
    nodes: tuple[ReasonNode, ...]  # sorted by constraint id
    edges: tuple[tuple[str, str], ...]
    root: tuple[str, ...]  # query node ids


def hypergraph(iis: Iis, model: MilpModel) -> Hypergraph:
    edges = []
    for cid in iis.constraint_ids:
        scope = model.constraint(cid).scope
        if not scope:
            raise ModelError(f"constraint {cid!r} has an empty scope")
        edges.append((cid, scope))
    return Hypergraph(frozenset(v.id for v in model.variables), tuple(edges))


def dual_graph(iis: Iis, model: MilpModel) -> DualGraph:
    """Nodes are the IIS constraints; edge iff the two scopes intersect."""
    hg = hypergraph(iis, model)
    edges = []
    for i, (cid_a, scope_a) in enumerate(hg.hyperedges):
        for cid_b, scope_b in hg.hyperedges[i + 1 :]:
            if scope_a & scope_b:
                edges.append(tuple(sorted((cid_a, cid_b))))
    return DualGraph(iis.constraint_ids, tuple(sorted(edges)))


def assert_connected(graph: DualGraph) -> ConnectivityReport:
    """BFS component count.  For a verified IIS the contract is one single
    component; anything else is reported, never silently accepted."""
    if not graph.nodes:
        return ConnectivityReport(False, 0)
    adjacency: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for a, b in graph.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen: set[str] = set()
    components = 0
    for start in graph.nodes:
        if start in seen:
            continue
        components += 1
        frontier = [start]
        seen.add(start)
        while frontier:
            node = frontier.pop()
            for other in adjacency[node]:
                if other not in seen:
                    seen.add(other)
                    frontier.append(other)
    return ConnectivityReport(components == 1, components)


# ---------------------------------------------------------------------------
# Natural-language labels
# ---------------------------------------------------------------------------


def _activities_in_scope(constraint: TaggedConstraint, model: MilpModel) -> list[int]:
    """Activity ids appearing in the scope, recovered from the x_<j>_<t>
    naming convention of the scheduling builder."""
    acts: set[int] = set()
    for vid in sorted(constraint.scope):
        name = model.variables[vid].name
        parts = name.split("_")
        if len(parts) == 3 and parts[0] == VAR_PREFIX:
            try:
                acts.add(int(parts[1]))
            except ValueError:
                continue
    return sorted(acts)


def _fmt_value(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return f"{x:g}" if isinstance(x, float) else str(x)


def _pretty_constraint(constraint: TaggedConstraint, model: MilpModel) -> str:
    names = [v.name for v in model.variables]
    parts = []
    for vid, coeff in constraint.expr.terms:
        parts.append(f"{_fmt_value(coeff)}*{names[vid]}")
    body = " + ".join(parts) if parts else "0"
    if constraint.expr.constant:
        body += f" + {_fmt_value(constraint.expr.constant)}"
    rel = {Relation.LE: "<=", Relation.GE: ">=", Relation.EQ: "="}[constraint.relation]
    return f"{body} {rel} {_fmt_value(constraint.rhs)}"


def _label_query(params: dict) -> str:
    role = params.get("role", "")
    if role == "veto_at":
        return f"Act. {params['j']} not completed at time {params['t']}"
    if role == "enforce_at":
        return f"Act. {params['j']} completed at time {params['t']}"
    if role == "enforce_before":
        return f"Act. {params['j']} completed before time {params['t']}"
    if role == "enforce_after":
        return f"Act. {params['j']} completed after time {params['t']}"
    if role == "veto_group":
        return f"Acts. {_spread(params['js'])} not all completed at time {params['t']}"
    if role == "veto_group_all":
        return f"No one of Acts. {_spread(params['js'])} completed at time {params['t']}"
    if role == "enforce_group":
        return f"Acts. {_spread(params['js'])} all completed at time {params['t']}"
    if role == "veto_bid":
        return f"Bid {params['b']} not selected"
    if role == "enforce_bid":
        return f"Bid {params['b']} selected"
    if role == "veto_bid_group":
        return f"Bids {_spread(params['bs'])} not all selected"
    raise MissingTemplateError(f"no template for query role {role!r}")


def _spread(csv: object) -> str:
    return ", ".join(str(csv).split(","))


def label(constraint: TaggedConstraint, model: MilpModel) -> str:
    """Render the constraint's reason text from its tag, params, and scope."""
    kind = constraint.tag.kind
    params = constraint.tag.param_dict()
    if kind is TagKind.COMPLETION:
        return f"Activity {params['j']} must be completed"
    if kind is TagKind.PRECEDENCE:
        return f"Act. {params['h']} must be completed before Act. {params['j']} starts"
    if kind is TagKind.RESOURCE:
        acts = _activities_in_scope(constraint, model)
        listed = ", ".join(str(a) for a in acts)
        return f"Res. {params['r']} is scarce at time {params['t']} due to Acts. {listed}"
    if kind is TagKind.GOOD_ALLOCATION:
        return f"Good {params['g']} can be won by at most one bid"
    if kind is TagKind.MINIMALITY:
        return f"A solution at least as good as {_fmt_value(params['bound'])} is required"
    if kind is TagKind.QUERY:
        return _label_query(params)
    if kind is TagKind.GENERIC:
        return _pretty_constraint(constraint, model)
    raise MissingTemplateError(f"no template registered for tag kind {kind!r}")


def to_reason_graph(iis: Iis, model: MilpModel, check_connected: bool = True) -> ReasonGraph:
    """Dual graph + labels + query roots; connectivity asserted."""
    if not iis.constraint_ids:
        raise ModelError("cannot build a reason graph from an empty IIS")
    dg = dual_graph(iis, model)
    nodes = []
    for cid in sorted(iis.constraint_ids):
        c = model.constraint(cid)
        nodes.append(
            ReasonNode(
                id=cid,
                kind=c.tag.kind,
                params=c.tag.param_dict(),
                label=label(c, model),
                is_query=c.tag.kind is TagKind.QUERY,
                is_minimality=c.tag.kind is TagKind.MINIMALITY,
            )
        )
    root = tuple(n.id for n in nodes if n.is_query)
    graph = ReasonGraph(tuple(nodes), dg.edges, root)
    if check_connected:
        report = assert_connected(DualGraph(tuple(n.id for n in nodes), graph.edges))
        if not report.connected:
            raise DisconnectedGraphError(
                f"reason graph has {report.components} components; "
                "an IIS dual graph must be connected - extraction bug suspected"
            )
    return graph


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_DOT_STYLE = {
    TagKind.COMPLETION: ("olive", "lightyellow"),
    TagKind.PRECEDENCE: ("blue", "lightblue"),
    TagKind.RESOURCE: ("red", "mistyrose"),
    TagKind.QUERY: ("black", "white"),
    TagKind.MINIMALITY: ("gray", "whitesmoke"),
    TagKind.GOOD_ALLOCATION: ("purple", "lavender"),
    TagKind.GENERIC: ("gray", "lightgray"),
}


def graph_to_dict(graph: ReasonGraph) -> dict:
    return {
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "params": dict(sorted(n.params.items())),
                "label": n.label,
                "is_query": n.is_query,
                "is_minimality": n.is_minimality,
            }
            for n in graph.nodes
        ],
        "edges": [list(e) for e in graph.edges],
        "root": list(graph.root),
    }


def serialize(graph: ReasonGraph, fmt: str = "json") -> bytes:
    """Deterministic byte serialization (nodes sorted by constraint id).

    DOT renders tag kinds as colors; the minimality node is drawn as a
    detached double circle (its edges stay in the JSON form) so it cannot
    visually dominate the graph as a hub.
    """
    if fmt == "json":
        return (json.dumps(graph_to_dict(graph), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "dot":
        raise ValueError(f"unknown serialization format {fmt!r}")

    lines = ["graph reasons {", "  node [style=filled];"]
    minimality_ids = {n.id for n in graph.nodes if n.is_minimality}
    for n in graph.nodes:
        color, fill = _DOT_STYLE[n.kind]
        shape = ", shape=doublecircle" if n.is_minimality else ""
        root_mark = ", penwidth=2" if n.id in graph.root else ""
        text = n.label.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(
            f'  "{n.id}" [label="{text}", color={color}, fillcolor={fill}{shape}{root_mark}];'
        )
    for a, b in graph.edges:
        if a in minimality_ids or b in minimality_ids:
            continue
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()
