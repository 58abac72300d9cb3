#!/usr/bin/env python3
"""The three pipeline stages, run one at a time with the offline provider.

Crafter enriches the Arch skeleton with themes and entities; Cartographer
deterministically assigns entities and disjoint time windows; Writer produces
one chapter per node, feeding parents' text back in as previous context.
"""

from ttng import GenerationConfig, MockCompletionProvider, craft_context, align_theme_entity
from ttng.pipeline import generate_story

provider = MockCompletionProvider()
config = GenerationConfig(seed=7, topic="tech boom")

context = craft_context("tech boom", "Arch", provider, seed=7, config=config)
print("== crafted context ==")
for theme in context.context:
    names = ", ".join(e.name for e in theme.entities)
    print(f"  {theme.symbol}: {theme.theme} ({theme.time[0]}..{theme.time[1]})")
    print(f"     entities: {names}")

alignment = align_theme_entity(context, seed=7)
print("\n== alignment ==")
for node_id, details in alignment.items():
    print(f"  {node_id}: {details.time[0]}..{details.time[1]} prev={list(details.prev)}")
    print(f"     entities: {', '.join(details.entities)}")
if alignment.diagnostics:
    print(f"  notes: {alignment.diagnostics}")

story = generate_story("tech boom", "Arch", 7, provider, config)
print("\n== story ==")
for chapter in story.chapters:
    words = len(chapter.content.split())
    print(f"\n-- {chapter.node_id} ({words} words) --")
    print(chapter.content)
print(f"\nverification flags: {list(story.flags) or 'none'}")
