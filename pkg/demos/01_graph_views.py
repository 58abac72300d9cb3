#!/usr/bin/env python3
"""One set of facts, two graph shapes.

The same nine fairy-tale statements are organised once by topic and once by
entity. Swapping the organising rule changes the track structure (and the
story's apparent shape) without touching temporal order or content.
"""

from ttng import Announcement, AttributeSet, LinkRule, TrackRule, build_graph, validate

STATEMENTS = [
    ("V1", ["Red"], "Journey", "Red leaves home with a basket of food for Grandma."),
    ("V2", ["Wolf"], "Journey", "The Wolf watches Red from the bushes and plans his hunt."),
    ("V3", ["Red", "Wolf"], "Journey", "Red stops to chat with the seemingly friendly Wolf."),
    ("V4", ["Wolf", "Red"], "Deception", "The Wolf talks Red into picking wildflowers."),
    ("V5", ["Wolf"], "Deception", "The Wolf swallows Grandma and dons her nightcap."),
    ("V6", ["Hunter", "Wolf"], "Rescue", "The Hunter starts tracking the Wolf."),
    ("V7", ["Wolf", "Red"], "Deception", "The Wolf lunges at Red in the bedroom."),
    ("V8", ["Red", "Wolf"], "Deception", "Red remarks on the Wolf's large ears."),
    ("V9", ["Hunter", "Red", "Wolf"], "Rescue", "The Hunter kills the Wolf and frees everyone."),
]

nodes = [
    Announcement(
        id=nid, order=i, content=text,
        attributes=AttributeSet(entities=tuple(ents), topics=(topic,)),
    )
    for i, (nid, ents, topic, text) in enumerate(STATEMENTS)
]


def show(graph, title):
    print(f"\n== {title} ==")
    for band, track in enumerate(graph.tracks):
        members = [n.id for n in graph.nodes if graph.assignment[n.id] == band]
        print(f"  band {band} [{track:<9}] {' '.join(members)}")
    report = validate(graph)
    print(f"  edges={len(graph.edges)} valid={report.valid} adjacency_cost={report.adjacency_cost}")


# Topic view: tracks follow the plot phases, edges follow shared characters.
topic_view = build_graph(
    nodes,
    TrackRule(level="topic", priority=("Journey", "Deception", "Rescue")),
    LinkRule(level="entity", scope="consecutive-columns-only"),
)
show(topic_view, "organised by topic")

# Entity view: tracks follow characters; priority resolves multi-entity nodes.
entity_view = build_graph(
    nodes,
    TrackRule(level="entity", priority=("Hunter", "Red", "Wolf")),
    LinkRule(level="topic", scope="consecutive-columns-only"),
)
show(entity_view, "organised by entity")
