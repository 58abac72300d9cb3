"""Graph-to-text pipeline: structure -> enriched context -> alignment -> story.

Three stages. The Crafter asks a completion provider to enrich a structure
skeleton with themes and entities (metadata must come back untouched). The
Cartographer is fully deterministic: it assigns each node a time window and
an entity sample, honouring parent-child entity overlap. The Writer prompts
the provider once per node in dependency order, feeding parents' chapters
back as previous context, then verifies the output.

All artefacts (context, alignment, story, dataset) are JSON-addressable so
any run can be replayed from files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from pathlib import Path

from .errors import (
    DatasetGenerationError,
    EmptyEntityPool,
    SchemaViolation,
    TtngError,
    UnsatisfiableParentOverlap,
)
from .motifs import MOTIF_NAMES, MotifName, motif_graph
from .providers import CompletionProvider, PromptRequest, stable_seed

import random

ENTITY_TYPES = ("people", "location", "organisation")


@dataclass(frozen=True)
class ThemeEntity:
    name: str
    type: str


@dataclass(frozen=True)
class ThemeContext:
    symbol: str
    theme: str
    description: str
    time: tuple[str, str]
    entities: tuple[ThemeEntity, ...]


@dataclass(frozen=True)
class NarrativeContext:
    """A structure skeleton plus (after crafting) its thematic context."""

    name: str
    description: str
    structure: str
    instructions: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    context: tuple[ThemeContext, ...] = ()

    def theme_for(self, symbol: str) -> ThemeContext:
        for entry in self.context:
            if entry.symbol == symbol:
                return entry
        raise KeyError(symbol)

    def metadata(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "structure": self.structure,
            "instructions": self.instructions,
            "nodes": list(self.nodes),
            "edges": [{"from": f, "to": t} for f, t in self.edges],
        }


def context_to_json(ctx: NarrativeContext) -> dict:
    data = ctx.metadata()
    data["context"] = [
        {
            "symbol": t.symbol,
            "theme": t.theme,
            "description": t.description,
            "time": list(t.time),
            "entities": [{"name": e.name, "type": e.type} for e in t.entities],
        }
        for t in ctx.context
    ]
    return data


def context_from_json(data: dict) -> NarrativeContext:
    edges = tuple(
        (e["from"], e["to"]) if isinstance(e, dict) else (e[0], e[1])
        for e in data.get("edges", ())
    )
    themes = tuple(
        ThemeContext(
            symbol=t["symbol"],
            theme=t.get("theme", ""),
            description=t.get("description", ""),
            time=tuple(t.get("time", ("", ""))),
            entities=tuple(
                ThemeEntity(name=e["name"], type=e["type"]) for e in t.get("entities", ())
            ),
        )
        for t in data.get("context", ())
    )
    return NarrativeContext(
        name=data["name"],
        description=data.get("description", ""),
        structure=data.get("structure", ""),
        instructions=data.get("instructions", ""),
        nodes=tuple(data.get("nodes", ())),
        edges=edges,
        context=themes,
    )


@dataclass(frozen=True)
class NodeAlignment:
    theme: str
    theme_description: str
    entities: tuple[str, ...]
    time: tuple[str, str]
    prev: tuple[str, ...]
    structure_instruction: str


class AlignmentMap(dict):
    """Ordered node-id -> NodeAlignment mapping with attached diagnostics."""

    def __init__(self, *args, diagnostics: tuple[str, ...] = (), **kwargs):
        super().__init__(*args, **kwargs)
        self.diagnostics = tuple(diagnostics)


# The alignment wire format keeps the historical field spelling
# "StuctureInstruction"; readers accept the corrected spelling too.
def alignment_to_json(alignment: AlignmentMap) -> dict:
    return {
        node_id: {
            "Theme": a.theme,
            "ThemeDescription": a.theme_description,
            "Entity": list(a.entities),
            "Time": list(a.time),
            "Prev": list(a.prev),
            "StuctureInstruction": a.structure_instruction,
        }
        for node_id, a in alignment.items()
    }


def alignment_from_json(data: dict, diagnostics: tuple[str, ...] = ()) -> AlignmentMap:
    entries = {}
    for node_id, a in data.items():
        instruction = a.get("StuctureInstruction", a.get("StructureInstruction", ""))
        entries[node_id] = NodeAlignment(
            theme=a["Theme"],
            theme_description=a.get("ThemeDescription", ""),
            entities=tuple(a["Entity"]),
            time=tuple(a["Time"]),
            prev=tuple(a.get("Prev", ())),
            structure_instruction=instruction,
        )
    return AlignmentMap(entries, diagnostics=diagnostics)


@dataclass(frozen=True)
class Chapter:
    node_id: str
    time: tuple[str, str]
    content: str
    entities: tuple[str, ...]


@dataclass(frozen=True)
class Story:
    """A generated story with full provenance for replay."""

    topic: str
    structure: str
    seed: int
    chapters: tuple[Chapter, ...]
    context: NarrativeContext
    alignment: AlignmentMap
    flags: tuple[str, ...] = ()


def story_to_json(story: Story) -> dict:
    return {
        "topic": story.topic,
        "structure": story.structure,
        "seed": story.seed,
        "chapters": [
            {
                "id": c.node_id,
                "time": list(c.time),
                "content": c.content,
                "entities": list(c.entities),
            }
            for c in story.chapters
        ],
        "context": context_to_json(story.context),
        "alignment": alignment_to_json(story.alignment),
        "alignment_notes": list(story.alignment.diagnostics),
        "flags": list(story.flags),
    }


def story_from_json(data: dict) -> Story:
    return Story(
        topic=data["topic"],
        structure=data["structure"],
        seed=data["seed"],
        chapters=tuple(
            Chapter(
                node_id=c["id"],
                time=tuple(c["time"]),
                content=c["content"],
                entities=tuple(c["entities"]),
            )
            for c in data["chapters"]
        ),
        context=context_from_json(data["context"]),
        alignment=alignment_from_json(
            data["alignment"], diagnostics=tuple(data.get("alignment_notes", ()))
        ),
        flags=tuple(data.get("flags", ())),
    )


@dataclass(frozen=True)
class GenerationConfig:
    seed: int = 0
    topic: str = "city affairs"
    structure: str = "Arch"
    word_target: int = 100
    max_retries: int = 3
    reading_level: str = "CEFR Level A1"

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.word_target <= 0:
            raise ValueError("word_target must be > 0")


# --- structure catalog --------------------------------------------------------

_DESCRIPTIONS = {
    MotifName.LINEAR: "The narrative stays on Theme A from start to finish.",
    MotifName.ARCH: "The narrative opens on Theme A, moves to Theme B, then returns to Theme A.",
    MotifName.LADDER: "The narrative steps from Theme A to Theme B and on to Theme C.",
    MotifName.EARLY_TURN: "The narrative leaves Theme A for Theme B early and stays there.",
    MotifName.LATE_TURN: "The narrative holds Theme A before a late move to Theme B.",
    MotifName.SHARP_BRANCH: "Theme A splits: one strand stays on Theme A while another opens on the adjacent Theme B.",
    MotifName.WIDE_BRANCH: "Theme A splits into two new strands on the distant Themes B and C.",
    MotifName.SHARP_MERGE: "Strands on the adjacent Themes A and B converge onto Theme A.",
    MotifName.WIDE_MERGE: "Strands on the distant Themes A and C converge onto Theme B.",
}

_INSTRUCTIONS = "Contains ONLY 3 nodes and 2 edges in total."


def _structure_string(edges: tuple[tuple[str, str], ...]) -> str:
    # Chains render as "A1 -> B2 -> A3"; branches/merges list each edge.
    heads = {f for f, _ in edges}
    tails = {t for _, t in edges}
    if len(heads) == len(edges) and len(tails) == len(edges):
        chain = [f for f, _ in edges if f not in tails]
        if len(chain) == 1:
            nxt = dict(edges)
            while chain[-1] in nxt:
                chain.append(nxt[chain[-1]])
            return " -> ".join(chain)
    return ", ".join(f"{f} -> {t}" for f, t in edges)


def structure_catalog() -> dict[str, NarrativeContext]:
    """Uncrafted skeletons for the nine motif structures, keyed by name."""
    entries = {}
    for name in MOTIF_NAMES:
        graph = motif_graph(name)
        entries[name.value] = NarrativeContext(
            name=name.value,
            description=_DESCRIPTIONS[name],
            structure=_structure_string(graph.edges),
            instructions=_INSTRUCTIONS,
            nodes=tuple(n.id for n in graph.nodes),
            edges=graph.edges,
        )
    return entries


def resolve_structure(structure: str | MotifName | NarrativeContext) -> NarrativeContext:
    if isinstance(structure, NarrativeContext):
        return structure
    key = structure.value if isinstance(structure, MotifName) else str(structure)
    cat = structure_catalog()
    if key not in cat:
        raise SchemaViolation([f"unknown structure {key!r}; known: {', '.join(cat)}"])
    return cat[key]


# --- Crafter ------------------------------------------------------------------

CRAFTER_SYSTEM = """\
You are Narrative Crafter, a writing assistant that turns a bare narrative \
structure into a rich narrative context. You keep the metadata fields \
('name', 'description', 'structure', 'instructions', 'nodes', 'edges') \
unchanged, byte for byte. You complete the 'context' section with one entry \
per theme: 'symbol', 'theme', 'description', 'time' and 'entities'. Each \
theme is represented by a single-letter symbol matching the node ids of the \
structure, and you avoid using the same theme symbol more than once. Entity \
names follow realistic naming conventions, and every entity carries a type: \
people, location or organisation. You respond with a single JSON object and \
nothing else."""

CRAFTER_USER_TEMPLATE = """\
Topic: {topic}

Complete the "context" array of the narrative structure template below: one
entry per theme symbol used by the node ids, each with "symbol", "theme",
"description", "time" ([start, end] ISO dates) and 3-5 "entities"
({{"name", "type"}} with type one of people/location/organisation). Keep every
other field exactly as given. Respond with the completed JSON object only.

{skeleton}"""


def _extract_json(text: str) -> dict:
    start, end = text.find("{"), text.rfind("}")
    if start < 0 or end <= start:
        raise ValueError("no JSON object in provider response")
    return json.loads(text[start : end + 1])


def _parse_date(value: str) -> date:
    return date.fromisoformat(value)


def validate_context(ctx: NarrativeContext, skeleton: NarrativeContext) -> list[str]:
    """Schema check for a crafted context against its skeleton. Empty = ok."""
    problems = []
    if ctx.metadata() != skeleton.metadata():
        problems.append("metadata fields were modified; they must match the template exactly")
    symbols = [t.symbol for t in ctx.context]
    if len(set(symbols)) != len(symbols):
        problems.append("theme symbols must be unique within the context")
    needed = list(dict.fromkeys(n[0] for n in skeleton.nodes))
    for symbol in needed:
        if symbol not in symbols:
            problems.append(f"missing context entry for symbol {symbol!r}")
    for symbol in symbols:
        if symbol not in needed:
            problems.append(f"context entry for unused symbol {symbol!r}")
    for t in ctx.context:
        if not t.theme:
            problems.append(f"theme {t.symbol!r} has an empty name")
        if not t.entities:
            problems.append(f"theme {t.symbol!r} has no entities")
        names = [e.name for e in t.entities]
        if len(set(names)) != len(names):
            problems.append(f"theme {t.symbol!r} repeats an entity name")
        for e in t.entities:
            if e.type not in ENTITY_TYPES:
                problems.append(f"entity {e.name!r} has invalid type {e.type!r}")
            if not e.name:
                problems.append(f"theme {t.symbol!r} has an entity with an empty name")
        try:
            start, end = _parse_date(t.time[0]), _parse_date(t.time[1])
            if start > end:
                problems.append(f"theme {t.symbol!r} time range is reversed")
        except (ValueError, IndexError):
            problems.append(f"theme {t.symbol!r} time must be [start, end] ISO dates")
    return problems


def craft_context(
    topic: str,
    structure: str | MotifName | NarrativeContext,
    provider: CompletionProvider,
    seed: int = 0,
    config: GenerationConfig = GenerationConfig(),
) -> NarrativeContext:
    """Stage 1: enrich a structure skeleton with themes, entities and dates.

    Invalid responses are re-requested with the validation problems appended,
    up to config.max_retries times.
    """
    skeleton = resolve_structure(structure)
    skeleton_json = json.dumps(context_to_json(skeleton), indent=2)
    user_text = CRAFTER_USER_TEMPLATE.format(topic=topic, skeleton=skeleton_json)

    problems: list[str] = []
    for _ in range(config.max_retries + 1):
        request = PromptRequest(system_text=CRAFTER_SYSTEM, user_text=user_text, seed=seed)
        raw = provider.complete(request)
        try:
            ctx = context_from_json(_extract_json(raw))
            problems = validate_context(ctx, skeleton)
        except (ValueError, KeyError, TypeError) as exc:
            problems = [f"response was not a valid context document: {exc}"]
        if not problems:
            return ctx
        user_text += "\n\nYour previous response was rejected:\n" + "\n".join(
            f"- {p}" for p in problems
        ) + "\nReturn a corrected JSON object."
    raise SchemaViolation(problems)


# --- Cartographer -------------------------------------------------------------

_TRAILING_DIGITS = re.compile(r"(\d+)$")


def _column_of(node_id: str) -> int:
    m = _TRAILING_DIGITS.search(node_id)
    if not m:
        raise ValueError(f"node id {node_id!r} lacks a trailing column number")
    return int(m.group(1)) - 1


def _topological_order(nodes: tuple[str, ...], edges: tuple[tuple[str, str], ...]) -> list[str]:
    parents = {n: {f for f, t in edges if t == n} for n in nodes}
    done: list[str] = []
    remaining = set(nodes)
    while remaining:
        ready = sorted(n for n in remaining if parents[n] <= set(done))
        if not ready:
            raise ValueError("structure edges contain a cycle")
        done.append(ready[0])
        remaining.discard(ready[0])
    return done


def _column_windows(ctx: NarrativeContext, columns: int) -> list[tuple[date, date]]:
    starts = [_parse_date(t.time[0]) for t in ctx.context]
    ends = [_parse_date(t.time[1]) for t in ctx.context]
    lo, hi = min(starts), max(ends)
    total = (hi - lo).days
    bounds = [lo + timedelta(days=round(total * c / columns)) for c in range(columns + 1)]
    return [(bounds[c], bounds[c + 1]) for c in range(columns)]


def _shrink(start: date, end: date) -> tuple[date, date]:
    # 10% gap on both ends (at least one day) keeps adjacent column windows
    # strictly disjoint.
    length = (end - start).days
    if length < 2:
        return start, end
    gap = min(max(1, round(0.1 * length)), length // 2)
    return start + timedelta(days=gap), end - timedelta(days=gap)


def _node_window(column_window: tuple[date, date], theme: ThemeContext) -> tuple[str, str]:
    t0, t1 = _parse_date(theme.time[0]), _parse_date(theme.time[1])
    start = max(column_window[0], t0)
    end = min(column_window[1], t1)
    if start > end:
        start, end = column_window
    start, end = _shrink(start, end)
    return start.isoformat(), end.isoformat()


def align_theme_entity(ctx: NarrativeContext, seed: int) -> AlignmentMap:
    """Stage 2: deterministic node -> (theme, entities, time window, parents) map.

    Nodes are processed in topological order (ties by id). Entities are
    sampled from the node's theme pool; every non-root node is guaranteed to
    share at least one entity with its parents — borrowed from outside the
    theme pool if the pools are disjoint, which is recorded as a diagnostic.
    """
    rng = random.Random(seed)
    order = _topological_order(ctx.nodes, ctx.edges)
    columns = max(_column_of(n) for n in ctx.nodes) + 1
    windows = _column_windows(ctx, columns)

    alignment = AlignmentMap()
    diagnostics: list[str] = []
    for position, node_id in enumerate(order, start=1):
        theme = ctx.theme_for(node_id[0])
        pool = [e.name for e in theme.entities]
        if not pool:
            raise EmptyEntityPool(f"theme {theme.symbol!r} has no entities")

        k = rng.randint(min(2, len(pool)), min(4, len(pool)))
        chosen = rng.sample(pool, k)

        prev = tuple(sorted(f for f, t in ctx.edges if t == node_id))
        if prev:
            parent_entities = list(
                dict.fromkeys(e for p in prev for e in alignment[p].entities)
            )
            if not parent_entities:
                raise UnsatisfiableParentOverlap(
                    f"parents of {node_id!r} contribute no entities"
                )
            if not set(chosen) & set(parent_entities):
                in_pool = [e for e in parent_entities if e in pool]
                borrowed = rng.choice(in_pool if in_pool else parent_entities)
                chosen.append(borrowed)
                if not in_pool:
                    diagnostics.append(
                        f"{node_id}: borrowed parent entity {borrowed!r} from outside "
                        f"theme {theme.symbol!r}"
                    )

        instruction = (
            f"The narrative structure is {ctx.name}, where {ctx.description} "
            f"(eg. {ctx.structure}). The current chapter node is {node_id}, "
            f"which is the {position}th chapter node in the narrative structure."
        )
        alignment[node_id] = NodeAlignment(
            theme=theme.theme,
            theme_description=theme.description,
            entities=tuple(chosen),
            time=_node_window(windows[_column_of(node_id)], theme),
            prev=prev,
            structure_instruction=instruction,
        )
    alignment.diagnostics = tuple(diagnostics)
    _check_window_order(ctx, alignment)
    return alignment


def _check_window_order(ctx: NarrativeContext, alignment: AlignmentMap) -> None:
    """Windows must be strictly ordered along every edge (monotone time)."""
    for f, t in ctx.edges:
        if alignment[f].time[1] >= alignment[t].time[0]:
            raise TtngError(
                f"time windows overlap along edge {f}->{t}: "
                f"{alignment[f].time} vs {alignment[t].time}"
            )


# --- Writer -------------------------------------------------------------------

WRITER_SYSTEM_TEMPLATE = """\
You are a senior reporter for The New York Times, your task is to write a fictional news report that continues from a previous one.
Your writing style is concise and clear, without rhetorical techniques, in plain english.
Avoid explicitly referencing the structure and themes; instead, integrate it subtly within the story.
The story should be written in a style suitable for {reading_level} and each chapter approximately take 1 minutes to read ({word_target} words).
The continuation chapter needs to be closely related to the previous one (intriguing and logically connected in narration).
The theme of the story must be strikingly prominent, you can not make up new themes except the only one given below.
All entities given below must be included in the story."""

WRITER_USER_TEMPLATE = """\
Chapter ID: {id}
Time Period: {time_period_str}
Themes: {theme}
Theme Context: {theme_context}
Entity: {entities}
Narrative Sturcture: {narrative_structure}
Previous context: {prev_content_str}"""


def generate_chapter(
    node_id: str,
    details: NodeAlignment,
    prev_content: str,
    provider: CompletionProvider,
    config: GenerationConfig,
    feedback: str = "",
) -> Chapter:
    """Stage 3, one node: fill the chapter prompt and take the output verbatim."""
    user_text = WRITER_USER_TEMPLATE.format(
        id=node_id,
        time_period_str=f"from {details.time[0]} to {details.time[1]}",
        theme=details.theme,
        theme_context=details.theme_description,
        entities=", ".join(details.entities),
        narrative_structure=details.structure_instruction,
        prev_content_str=prev_content,
    )
    if feedback:
        user_text += f"\n\nRevise: {feedback}"
    request = PromptRequest(
        system_text=WRITER_SYSTEM_TEMPLATE.format(
            reading_level=config.reading_level, word_target=config.word_target
        ),
        user_text=user_text,
        seed=config.seed,
    )
    content = provider.complete(request)
    return Chapter(node_id=node_id, time=details.time, content=content, entities=details.entities)


def verify_chapter(chapter: Chapter, details: NodeAlignment,
                   config: GenerationConfig = GenerationConfig()) -> list[str]:
    """Pure check: required entities present, word count within [0.5x, 2x] target."""
    violations = []
    lowered = chapter.content.lower()
    for entity in details.entities:
        if entity.lower() not in lowered:
            violations.append(f"missing entity: {entity}")
    words = len(chapter.content.split())
    lo, hi = config.word_target * 0.5, config.word_target * 2
    if not lo <= words <= hi:
        violations.append(f"word count {words} outside [{lo:g}, {hi:g}]")
    return violations


def generate_story(
    topic: str,
    structure: str | MotifName | NarrativeContext,
    seed: int,
    provider: CompletionProvider,
    config: GenerationConfig = GenerationConfig(),
) -> Story:
    """Full pipeline for one story; never returns a partial story.

    Chapters failing verification are regenerated (with the violations fed
    back) up to config.max_retries times, after which the story is flagged.
    """
    cfg = replace(config, topic=topic, seed=seed)
    ctx = craft_context(topic, structure, provider, seed=seed, config=cfg)
    alignment = align_theme_entity(ctx, seed)

    chapters: list[Chapter] = []
    flags: list[str] = []
    cache: dict[str, str] = {}
    for node_id, details in alignment.items():
        prev_content = "\n\n".join(cache[p] for p in details.prev)
        chapter = generate_chapter(node_id, details, prev_content, provider, cfg)
        violations = verify_chapter(chapter, details, cfg)
        attempt = 0
        while violations and attempt < cfg.max_retries:
            attempt += 1
            chapter = generate_chapter(
                node_id, details, prev_content, provider, cfg,
                feedback="; ".join(violations),
            )
            violations = verify_chapter(chapter, details, cfg)
        flags.extend(f"{node_id}: {v}" for v in violations)
        chapters.append(chapter)
        cache[node_id] = chapter.content

    return Story(
        topic=topic,
        structure=ctx.name,
        seed=seed,
        chapters=tuple(chapters),
        context=ctx,
        alignment=alignment,
        flags=tuple(flags),
    )


# --- study dataset ------------------------------------------------------------


@dataclass(frozen=True)
class DatasetStory:
    story_id: str
    motif: str
    set_id: int | None
    is_control: bool
    story: Story
    tracks: dict[str, int] = field(default_factory=dict)  # node id -> track index


@dataclass(frozen=True)
class StudyDataset:
    topic: str
    seed: int
    sets: int
    stories: tuple[DatasetStory, ...]

    def announcement_count(self) -> int:
        return sum(len(s.story.chapters) for s in self.stories)

    def stories_for_set(self, set_id: int) -> list[DatasetStory]:
        """The 9 motif stories of a set plus the shared control story."""
        return [s for s in self.stories if s.set_id == set_id or s.is_control]

    def by_id(self, story_id: str) -> DatasetStory:
        for s in self.stories:
            if s.story_id == story_id:
                return s
        raise KeyError(story_id)


def build_study_dataset(
    config: GenerationConfig, provider: CompletionProvider, sets: int = 3
) -> StudyDataset:
    """9 motif stories per set plus one shared Ladder control story.

    Story count is 9*sets + 1 and every story carries exactly three
    announcements. Generation failures abort with the completed story ids.
    """
    stories: list[DatasetStory] = []

    def track_map(name: MotifName) -> dict[str, int]:
        return dict(motif_graph(name).assignment)

    try:
        for set_id in range(sets):
            for name in MOTIF_NAMES:
                story_seed = stable_seed(config.seed, "story", set_id, name.value)
                story = generate_story(config.topic, name, story_seed, provider, config)
                stories.append(
                    DatasetStory(
                        story_id=f"story-{len(stories):02d}",
                        motif=name.value,
                        set_id=set_id,
                        is_control=False,
                        story=story,
                        tracks=track_map(name),
                    )
                )
        control_seed = stable_seed(config.seed, "control")
        control = generate_story(config.topic, MotifName.LADDER, control_seed, provider, config)
        stories.append(
            DatasetStory(
                story_id=f"story-{len(stories):02d}",
                motif=MotifName.LADDER.value,
                set_id=None,
                is_control=True,
                story=control,
                tracks=track_map(MotifName.LADDER),
            )
        )
    except TtngError as exc:
        raise DatasetGenerationError(
            f"dataset generation failed: {exc}", [s.story_id for s in stories]
        ) from exc

    return StudyDataset(topic=config.topic, seed=config.seed, sets=sets, stories=tuple(stories))


def save_dataset(dataset: StudyDataset, directory: str | Path) -> None:
    root = Path(directory)
    (root / "stories").mkdir(parents=True, exist_ok=True)
    manifest = {"topic": dataset.topic, "seed": dataset.seed, "sets": dataset.sets, "stories": []}
    for s in dataset.stories:
        rel = f"stories/{s.story_id}.json"
        (root / rel).write_text(json.dumps(story_to_json(s.story), indent=2) + "\n")
        manifest["stories"].append(
            {
                "story_id": s.story_id,
                "motif": s.motif,
                "set_id": s.set_id,
                "is_control": s.is_control,
                "seed": s.story.seed,
                "tracks": s.tracks,
                "file": rel,
            }
        )
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_dataset(directory: str | Path) -> StudyDataset:
    root = Path(directory)
    manifest = json.loads((root / "manifest.json").read_text())
    stories = tuple(
        DatasetStory(
            story_id=e["story_id"],
            motif=e["motif"],
            set_id=e["set_id"],
            is_control=e["is_control"],
            story=story_from_json(json.loads((root / e["file"]).read_text())),
            tracks={k: int(v) for k, v in e["tracks"].items()},
        )
        for e in manifest["stories"]
    )
    return StudyDataset(
        topic=manifest["topic"], seed=manifest["seed"], sets=manifest["sets"], stories=stories
    )
