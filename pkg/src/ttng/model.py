"""Time-track narrative graph model.

A narrative is a directed graph over announcements: each node carries a
time-column index (``order``) and a set of grouping attributes (entities,
topics, events). An organising rule assigns nodes to horizontal tracks; a
linking rule decides which forward-in-time pairs receive edges. Hard
constraint: edges only run strictly forward in time (never within one
column). Soft preference: linked nodes should sit on adjacent tracks.

All functions here are pure; the data types are immutable and safe to share
across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DanglingEdgeError, EmptyInputError, NoMatchingTrackError

LEVELS = ("entity", "topic", "event")
FALLBACKS = ("reject", "append-new-track")
SCOPES = ("consecutive-columns-only", "any-forward")

Edge = tuple[str, str]


def _check_labels(labels: tuple[str, ...], kind: str) -> None:
    for label in labels:
        if not isinstance(label, str) or not label:
            raise ValueError(f"{kind} labels must be non-empty strings, got {label!r}")
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate {kind} labels: {labels}")


@dataclass(frozen=True)
class AttributeSet:
    """Grouping attributes of one announcement.

    Entity order is meaningful: the first entry is the default-primary
    entity, used when no explicit track priority applies.
    """

    entities: tuple[str, ...] = ()
    topics: tuple[str, ...] = ()
    events: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "topics", tuple(self.topics))
        object.__setattr__(self, "events", tuple(self.events))
        _check_labels(self.entities, "entity")
        _check_labels(self.topics, "topic")
        _check_labels(self.events, "event")

    def at_level(self, level: str) -> tuple[str, ...]:
        if level == "entity":
            return self.entities
        if level == "topic":
            return self.topics
        if level == "event":
            return self.events
        raise ValueError(f"unknown attribute level {level!r}")


@dataclass(frozen=True)
class Announcement:
    """One unit of narrative text pinned to a time column."""

    id: str
    order: int
    attributes: AttributeSet = AttributeSet()
    timestamp: str | None = None
    content: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("announcement id must be non-empty")
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")


@dataclass(frozen=True)
class TrackRule:
    """Organising rule: which attribute level forms tracks, in what priority."""

    level: str
    priority: tuple[str, ...] = ()
    fallback: str = "reject"

    def __post_init__(self) -> None:
        object.__setattr__(self, "priority", tuple(self.priority))
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}, got {self.fallback!r}")
        _check_labels(self.priority, "priority")


@dataclass(frozen=True)
class LinkRule:
    """Linking rule: draw an edge when a forward pair shares an attribute."""

    level: str
    scope: str = "any-forward"

    def __post_init__(self) -> None:
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")


@dataclass(frozen=True)
class TtngGraph:
    """Announcements, a band-ordered track list, assignment, and edges."""

    nodes: tuple[Announcement, ...]
    tracks: tuple[str, ...] = ()
    assignment: Mapping[str, int] = field(default_factory=dict)
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "tracks", tuple(self.tracks))
        object.__setattr__(self, "assignment", dict(self.assignment))
        object.__setattr__(self, "edges", tuple((f, t) for f, t in self.edges))
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids in graph")

    def node(self, node_id: str) -> Announcement:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def track_of(self, node_id: str) -> int | None:
        return self.assignment.get(node_id)

    @property
    def column_count(self) -> int:
        return max((n.order for n in self.nodes), default=-1) + 1


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of validating a graph against the hard and soft constraints."""

    temporal_violations: tuple[Edge, ...]
    exclusivity_violations: tuple[str, ...]
    adjacency_cost: int
    valid: bool

    def __str__(self) -> str:
        return (
            f"valid={self.valid} temporal={list(self.temporal_violations)} "
            f"exclusivity={list(self.exclusivity_violations)} adjacency_cost={self.adjacency_cost}"
        )


def assign_tracks(
    nodes: Iterable[Announcement], rule: TrackRule
) -> tuple[tuple[str, ...], dict[str, int]]:
    """Assign every node to exactly one track under the organising rule.

    A node matching several priority values goes to the highest-priority
    one. Nodes matching nothing either reject the whole assignment or, with
    fallback="append-new-track", open a new track named by their primary
    attribute; appended tracks sit below all priority tracks in
    first-encounter order. Only tracks that received a node are returned.
    """
    nodes = tuple(nodes)
    if not nodes:
        raise EmptyInputError("no nodes to assign")
    labels: dict[str, str] = {}
    used: set[str] = set()
    appended: list[str] = []
    for node in nodes:
        values = node.attributes.at_level(rule.level)
        label = next((p for p in rule.priority if p in values), None)
        if label is None:
            if not values or rule.fallback == "reject":
                raise NoMatchingTrackError(
                    f"node {node.id!r} matches no track at level {rule.level!r}"
                )
            label = values[0]
            if label not in appended:
                appended.append(label)
        labels[node.id] = label
        used.add(label)
    tracks = tuple([p for p in rule.priority if p in used] + appended)
    index = {t: i for i, t in enumerate(tracks)}
    return tracks, {nid: index[label] for nid, label in labels.items()}


def derive_edges(nodes: Iterable[Announcement], rule: LinkRule) -> tuple[Edge, ...]:
    """Link forward pairs sharing an attribute at the rule's level.

    Same-column pairs never link. Scope "consecutive-columns-only" further
    requires order(to) == order(from) + 1. Output is sorted and independent
    of input node order.
    """
    nodes = tuple(nodes)
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("derive_edges requires distinct node ids")
    edges: list[tuple[int, str, int, str]] = []
    for a in nodes:
        attrs_a = set(a.attributes.at_level(rule.level))
        if not attrs_a:
            continue
        for b in nodes:
            if b.order <= a.order:
                continue
            if rule.scope == "consecutive-columns-only" and b.order != a.order + 1:
                continue
            if attrs_a.intersection(b.attributes.at_level(rule.level)):
                edges.append((a.order, a.id, b.order, b.id))
    edges.sort()
    return tuple((f, t) for _, f, _, t in edges)


def build_graph(
    nodes: Iterable[Announcement], track_rule: TrackRule, link_rule: LinkRule | None = None
) -> TtngGraph:
    """Convenience constructor: assign tracks and (optionally) derive edges."""
    nodes = tuple(nodes)
    tracks, assignment = assign_tracks(nodes, track_rule)
    edges = derive_edges(nodes, link_rule) if link_rule is not None else ()
    return TtngGraph(nodes=nodes, tracks=tracks, assignment=assignment, edges=edges)


def validate(graph: TtngGraph) -> ConstraintReport:
    """Check the hard constraints and compute the adjacency preference cost.

    Temporal violations are edges not strictly forward in time (same-column
    edges included). Exclusivity violations are nodes without exactly one
    in-range track. adjacency_cost sums max(0, |track(from)-track(to)| - 1)
    over edges with both endpoints assigned. Edges naming unknown ids are a
    structural error, raised rather than reported.
    """
    order = {n.id: n.order for n in graph.nodes}
    for f, t in graph.edges:
        if f not in order or t not in order:
            raise DanglingEdgeError(f"edge ({f!r}, {t!r}) references unknown node id")

    temporal = tuple((f, t) for f, t in graph.edges if order[t] <= order[f])

    n_tracks = len(graph.tracks)
    exclusivity = tuple(
        n.id
        for n in graph.nodes
        if not isinstance(graph.assignment.get(n.id), int)
        or not (0 <= graph.assignment[n.id] < n_tracks)
    )

    cost = 0
    for f, t in graph.edges:
        tf, tt = graph.assignment.get(f), graph.assignment.get(t)
        if isinstance(tf, int) and isinstance(tt, int):
            cost += max(0, abs(tf - tt) - 1)

    return ConstraintReport(
        temporal_violations=temporal,
        exclusivity_violations=exclusivity,
        adjacency_cost=cost,
        valid=not temporal and not exclusivity,
    )


# --- JSON wire format -------------------------------------------------------
#
# {"nodes": [...], "edges": [{"from": ..., "to": ...}], "tracks": [...],
#  "assignment": {...}}. Node entries are either bare ids like "B2" (order and
# track inferred from the symbol-digit convention) or full records. Edges are
# accepted both as {"from","to"} objects and as two-element arrays.

_BARE_ID = re.compile(r"^(?P<symbol>[^\d]+)(?P<column>\d+)$")


def _node_from_json(entry: object) -> tuple[Announcement, str | None]:
    if isinstance(entry, str):
        m = _BARE_ID.match(entry)
        if not m:
            raise ValueError(
                f"bare node id {entry!r} has no trailing column digits; use a full node record"
            )
        column = int(m.group("column"))
        if column < 1:
            raise ValueError(f"bare node id {entry!r} must use 1-based columns")
        return Announcement(id=entry, order=column - 1), m.group("symbol")
    if isinstance(entry, dict):
        attrs = entry.get("attributes", {})
        ann = Announcement(
            id=entry["id"],
            order=int(entry["order"]),
            attributes=AttributeSet(
                entities=tuple(attrs.get("entities", ())),
                topics=tuple(attrs.get("topics", ())),
                events=tuple(attrs.get("events", ())),
            ),
            timestamp=entry.get("timestamp"),
            content=entry.get("content"),
        )
        return ann, entry.get("track")
    raise ValueError(f"node entry must be a string id or an object, got {type(entry).__name__}")


def _edge_from_json(entry: object) -> Edge:
    if isinstance(entry, dict):
        return (entry["from"], entry["to"])
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return (entry[0], entry[1])
    raise ValueError(f"edge entry must be a from/to object or a pair, got {entry!r}")


def graph_from_json(data: dict) -> TtngGraph:
    """Parse the graph wire format (see module comment)."""
    parsed = [_node_from_json(e) for e in data.get("nodes", ())]
    nodes = tuple(ann for ann, _ in parsed)
    edges = tuple(_edge_from_json(e) for e in data.get("edges", ()))

    if "tracks" in data:
        tracks = tuple(data["tracks"])
    else:
        tracks = tuple(dict.fromkeys(label for _, label in parsed if label is not None))

    if "assignment" in data:
        assignment = {k: int(v) for k, v in data["assignment"].items()}
    else:
        index = {t: i for i, t in enumerate(tracks)}
        assignment = {
            ann.id: index[label] for ann, label in parsed if label is not None and label in index
        }
    return TtngGraph(nodes=nodes, tracks=tracks, assignment=assignment, edges=edges)


def graph_to_json(graph: TtngGraph) -> dict:
    """Serialise a graph to the wire format with full node records."""
    nodes = []
    for n in graph.nodes:
        record: dict = {"id": n.id, "order": n.order}
        if n.timestamp is not None:
            record["timestamp"] = n.timestamp
        if n.content is not None:
            record["content"] = n.content
        record["attributes"] = {
            "entities": list(n.attributes.entities),
            "topics": list(n.attributes.topics),
            "events": list(n.attributes.events),
        }
        nodes.append(record)
    return {
        "nodes": nodes,
        "edges": [{"from": f, "to": t} for f, t in graph.edges],
        "tracks": list(graph.tracks),
        "assignment": dict(graph.assignment),
    }


def load_graph(path: str | Path) -> TtngGraph:
    return graph_from_json(json.loads(Path(path).read_text()))


def save_graph(graph: TtngGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(graph), indent=2) + "\n")
