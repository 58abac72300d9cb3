from __future__ import annotations

import json
from pathlib import Path

import pytest

from ttng.model import Announcement, AttributeSet, TrackRule
from ttng.motifs import MOTIF_NAMES
from ttng.pipeline import GenerationConfig, build_study_dataset
from ttng.providers import MockCompletionProvider
from ttng.study import Response

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

TOPIC_RULE = TrackRule(level="topic", priority=("Journey", "Deception", "Rescue"))


def load_little_red() -> tuple[Announcement, ...]:
    data = json.loads((FIXTURES / "little_red.json").read_text())
    return tuple(
        Announcement(
            id=n["id"],
            order=n["order"],
            timestamp=n.get("timestamp"),
            content=n.get("content"),
            attributes=AttributeSet(
                entities=tuple(n["attributes"]["entities"]),
                topics=tuple(n["attributes"]["topics"]),
                events=tuple(n["attributes"]["events"]),
            ),
        )
        for n in data["nodes"]
    )


@pytest.fixture(scope="session")
def little_red() -> tuple[Announcement, ...]:
    return load_little_red()


@pytest.fixture(scope="session")
def mock_provider() -> MockCompletionProvider:
    return MockCompletionProvider()


@pytest.fixture(scope="session")
def small_dataset(mock_provider):
    """One-set study dataset (10 stories, 30 announcements); reused read-only."""
    return build_study_dataset(
        GenerationConfig(seed=11, topic="harbor city affairs"), mock_provider, sets=1
    )


@pytest.fixture(scope="session")
def full_dataset(mock_provider):
    """Three-set study dataset (28 stories, 84 announcements); reused read-only."""
    return build_study_dataset(
        GenerationConfig(seed=42, topic="regional politics"), mock_provider, sets=3
    )


def synthetic_responses(offset_by_participant):
    """One response per (participant, motif); selection = truth shifted by offset."""
    names = [n.value for n in MOTIF_NAMES]
    responses = []
    truth = {}
    for p, offset in enumerate(offset_by_participant):
        for i, motif in enumerate(names):
            task_id = f"t-{motif}"
            truth[task_id] = motif
            responses.append(
                Response(
                    response_id=f"p{p:02d}-{i}",
                    session_id=f"s{p:02d}",
                    participant_id=f"p{p:02d}",
                    task_id=task_id,
                    selected=names[(i + offset) % 9],
                    confidence=3,
                    reasoning="pattern of the text",
                    elapsed_ms=1200,
                )
            )
    return responses, truth
