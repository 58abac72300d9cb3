"""Completion providers: a deterministic offline mock, a remote HTTP client,
and a record/replay journal wrapper.

The mock is a pure function of the request, so every pipeline built on it is
replayable byte-for-byte. The HTTP provider speaks the common chat-completion
wire format (model, messages, temperature, max_tokens) with bearer auth taken
from an environment variable, retrying transient failures with exponential
backoff.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol

import httpx

from .errors import (
    AuthFailure,
    MalformedResponse,
    ProviderError,
    ProviderTimeout,
    RateLimited,
    ReplayMiss,
)


def stable_seed(*parts: object) -> int:
    """Platform-independent 63-bit seed derived from the given parts."""
    blob = "|".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1


def stable_token(*parts: object) -> str:
    """Short stable hex token for embedding in generated text."""
    blob = "|".join(str(p) for p in parts).encode()
    return hashlib.sha256(blob).hexdigest()[:8]


@dataclass(frozen=True)
class PromptRequest:
    system_text: str
    user_text: str
    temperature: float = 0.7
    seed: int | None = None
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        if not self.system_text or not self.user_text:
            raise ValueError("system_text and user_text must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be > 0, got {self.max_tokens}")


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    auth_env: str = "TTNG_API_TOKEN"
    timeout: float = 30.0
    retries: int = 3
    backoff_base: float = 0.5
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class CompletionProvider(Protocol):
    def complete(self, request: PromptRequest) -> str: ...


# --- deterministic offline mock ----------------------------------------------

_THEME_ADJECTIVES = (
    "Industrial", "Civic", "Coastal", "Digital", "Agricultural",
    "Cultural", "Financial", "Environmental", "Medical", "Maritime",
)
_THEME_NOUNS = (
    "Expansion", "Reckoning", "Dispute", "Revival", "Inquiry",
    "Accord", "Shortage", "Breakthrough", "Backlash", "Transition",
)
_SURNAMES = (
    "Varga", "Okafor", "Lindqvist", "Marsh", "Iwata", "Deluca", "Haugen",
    "Pereira", "Kask", "Novak", "Reyes", "Aldana", "Brandt", "Kimura",
    "Sandoval", "Osei", "Petit", "Moreau", "Tanaka", "Bergström",
)
_PEOPLE_TITLES = ("Mayor", "Dr.", "Councillor", "Judge", "Professor", "Chief")
_PLACE_WORDS = (
    "Harbor", "Northgate", "Ridgeway", "Old Mill", "Crescent", "Lakeview",
    "Granite", "Willow", "Tannery", "Copper", "Beacon", "Fenwick",
)
_PLACE_KINDS = ("District", "Park", "Quarter", "Plaza")
_ORG_WORDS = (
    "Civic", "Transit", "Heritage", "Gateway", "Summit", "Meridian",
    "Anchor", "Unity", "Vector", "Keystone", "Compass", "Landmark",
)
_ORG_KINDS = ("Council", "Coalition", "Institute", "Bureau", "Tribune", "Works")

_FILLER_SENTENCES = (
    "Officials said the situation remained under close review.",
    "Residents followed the announcement with guarded interest.",
    "Early reactions were mixed across the affected neighbourhoods.",
    "A formal briefing is expected within the coming days.",
    "Independent observers called the development broadly consistent with expectations.",
    "Local records were updated to reflect the change the same afternoon.",
    "Several open questions remain about the longer-term effects.",
    "Plans for a follow-up assessment were confirmed by the office involved.",
    "The announcement drew measured commentary from nearby communities.",
    "Staff declined to speculate beyond the published figures.",
    "Documents released alongside the statement outline the next steps.",
    "Preparations for the next phase are already under way.",
)

_ENTITY_SENTENCES = (
    "{e} confirmed the development in a short statement.",
    "According to {e}, the situation is being handled step by step.",
    "{e} was named as a central figure in the unfolding account.",
    "Sources close to {e} described steady progress.",
    "{e} is expected to play a visible role in what follows.",
)


class MockCompletionProvider:
    """Offline provider: a pure, deterministic expansion of the request.

    Chapter prompts (detected by their "Chapter ID:" field) yield ~word_target
    words that mention every listed entity plus a stable (chapter id, seed)
    token, so distinct nodes never produce identical text. Any other prompt is
    treated as a context-enrichment request: the trailing JSON template in the
    prompt is returned with its "context" array filled in.
    """

    def __init__(self, word_target: int = 100):
        self.word_target = word_target

    def complete(self, request: PromptRequest) -> str:
        if "Chapter ID:" in request.user_text:
            return self._chapter(request)
        return self._context(request)

    # context enrichment

    def _context(self, request: PromptRequest) -> str:
        text = request.user_text
        # The template JSON is the last block starting with "{" at column 0;
        # raw_decode tolerates trailing text (e.g. appended retry feedback).
        skeleton = None
        for m in re.finditer(r"^\{", text, re.MULTILINE):
            try:
                candidate, _ = json.JSONDecoder().raw_decode(text[m.start():])
            except json.JSONDecodeError:
                continue
            if isinstance(candidate, dict):
                skeleton = candidate
        if skeleton is None:
            raise MalformedResponse("mock could not locate a JSON template in the prompt")
        topic_match = re.search(r"^Topic:\s*(.+)$", text, re.MULTILINE)
        topic = topic_match.group(1).strip() if topic_match else "general news"
        seed = request.seed if request.seed is not None else 0

        symbols = list(dict.fromkeys(str(n)[0] for n in skeleton.get("nodes", ())))
        rng = random.Random(stable_seed("mock-context", topic, seed))
        used_names: set[str] = set()
        used_themes: set[str] = set()
        context = []
        for symbol in symbols:
            theme = self._pick_theme(rng, used_themes)
            entities = [self._pick_entity(rng, kind, used_names)
                        for kind in self._entity_kinds(rng)]
            context.append(
                {
                    "symbol": symbol,
                    "theme": theme,
                    "description": (
                        f"The {theme.lower()} strand of the {topic} story, "
                        f"anchored by {entities[0]['name']} and {entities[1]['name']}."
                    ),
                    "time": ["2023-01-01", "2023-12-31"],
                    "entities": entities,
                }
            )
        filled = dict(skeleton)
        filled["context"] = context
        return json.dumps(filled, indent=2)

    @staticmethod
    def _entity_kinds(rng: random.Random) -> list[str]:
        kinds = ["people", "location", "organisation"]
        extra = rng.randint(1, 2)
        kinds += [rng.choice(["people", "organisation"]) for _ in range(extra)]
        return kinds

    @staticmethod
    def _pick_theme(rng: random.Random, used: set[str]) -> str:
        while True:
            theme = f"{rng.choice(_THEME_ADJECTIVES)} {rng.choice(_THEME_NOUNS)}"
            if theme not in used:
                used.add(theme)
                return theme

    @staticmethod
    def _pick_entity(rng: random.Random, kind: str, used: set[str]) -> dict:
        while True:
            if kind == "people":
                name = f"{rng.choice(_PEOPLE_TITLES)} {rng.choice(_SURNAMES)}"
            elif kind == "location":
                name = f"{rng.choice(_PLACE_WORDS)} {rng.choice(_PLACE_KINDS)}"
            else:
                name = f"{rng.choice(_ORG_WORDS)} {rng.choice(_ORG_KINDS)}"
            if name not in used:
                used.add(name)
                return {"name": name, "type": kind}

    # chapter writing

    def _chapter(self, request: PromptRequest) -> str:
        fields = _parse_fields(request.user_text)
        chapter_id = fields.get("Chapter ID", "?")
        theme = fields.get("Themes", "the main theme")
        period = fields.get("Time Period", "")
        entities = [e.strip() for e in fields.get("Entity", "").split(",") if e.strip()]
        has_prev = bool(fields.get("Previous context", "").strip())
        seed = request.seed if request.seed is not None else 0
        rng = random.Random(stable_seed("mock-chapter", chapter_id, seed))

        sentences = [f"The {theme} story advanced {period}.".replace("  ", " ")]
        if has_prev:
            sentences.append("The development followed directly from earlier reports.")
        for i, entity in enumerate(entities):
            template = _ENTITY_SENTENCES[(i + rng.randrange(len(_ENTITY_SENTENCES))) % len(_ENTITY_SENTENCES)]
            sentences.append(template.format(e=entity))
        sentences.append(f"Case reference {stable_token(chapter_id, seed)} was assigned to the file.")

        def word_count() -> int:
            return sum(len(s.split()) for s in sentences)

        while word_count() < self.word_target:
            sentences.append(_FILLER_SENTENCES[rng.randrange(len(_FILLER_SENTENCES))])
        return " ".join(sentences)


def _parse_fields(text: str) -> dict[str, str]:
    """Split "Label: value" lines; the final label keeps the remaining lines."""
    fields: dict[str, str] = {}
    current: str | None = None
    for line in text.splitlines():
        m = re.match(
            r"^(Chapter ID|Time Period|Themes|Theme Context|Entity|"
            r"Narrative Sturcture|Previous context):\s?(.*)$",
            line,
        )
        if m:
            current = m.group(1)
            fields[current] = m.group(2)
        elif current is not None:
            fields[current] += "\n" + line
    return fields


# --- remote HTTP provider -----------------------------------------------------

_TRANSIENT_STATUSES = {500, 502, 503, 504}

logger = logging.getLogger(__name__)


class HttpCompletionProvider:
    """Chat-completion client with bounded concurrency and backoff retries."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._gate = threading.BoundedSemaphore(config.max_in_flight)
        self._client = httpx.Client(timeout=config.timeout, transport=transport)

    def complete(self, request: PromptRequest) -> str:
        body = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.seed is not None:
            body["seed"] = request.seed
        headers = {}
        token = os.environ.get(self.config.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"

        attempts = self.config.retries + 1
        last_error: Exception | None = None
        with self._gate:
            for attempt in range(attempts):
                if attempt:
                    logger.warning(
                        "retrying completion request (attempt %d/%d): %s",
                        attempt + 1, attempts, last_error,
                    )
                    time.sleep(self.config.backoff_base * (2 ** (attempt - 1)))
                try:
                    resp = self._client.post(self.config.endpoint, json=body, headers=headers)
                except httpx.TimeoutException as exc:
                    last_error = ProviderTimeout(f"timed out after {self.config.timeout}s: {exc}")
                    continue
                except httpx.HTTPError as exc:
                    last_error = ProviderError(f"transport failure: {exc}")
                    continue
                if resp.status_code in (401, 403):
                    raise AuthFailure(f"provider rejected credentials ({resp.status_code})")
                if resp.status_code == 429:
                    last_error = RateLimited("provider rate limit (429)")
                    continue
                if resp.status_code in _TRANSIENT_STATUSES:
                    last_error = ProviderError(f"transient server error ({resp.status_code})")
                    continue
                if resp.status_code != 200:
                    raise ProviderError(f"unexpected status {resp.status_code}: {resp.text[:200]}")
                return _extract_content(resp)
        raise last_error if last_error is not None else ProviderError("no attempts made")


def _extract_content(resp: httpx.Response) -> str:
    try:
        data = resp.json()
        content = data["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse(f"unexpected completion payload: {exc}") from exc
    if not isinstance(content, str):
        raise MalformedResponse("completion content is not text")
    return content


# --- record / replay ----------------------------------------------------------


class RequestJournal:
    """Append-only JSONL store keyed by a canonical request hash."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, object] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if line.strip():
                    entry = json.loads(line)
                    self._entries[entry["key"]] = entry["response"]

    @staticmethod
    def key_of(payload: dict) -> str:
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def record(self, payload: dict, response: object) -> None:
        key = self.key_of(payload)
        line = json.dumps({"key": key, "request": payload, "response": response})
        with self._lock:
            self._entries[key] = response
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(line + "\n")

    def lookup(self, payload: dict) -> object:
        key = self.key_of(payload)
        with self._lock:
            if key not in self._entries:
                raise ReplayMiss(f"journal {self.path} has no entry for key {key[:12]}…")
            return self._entries[key]


class JournalingCompletionProvider:
    """Record mode wraps a live provider; replay mode needs no network at all."""

    def __init__(self, journal: RequestJournal, inner: CompletionProvider | None = None,
                 mode: str = "replay"):
        if mode not in ("record", "replay"):
            raise ValueError(f"mode must be record or replay, got {mode!r}")
        if mode == "record" and inner is None:
            raise ValueError("record mode requires an inner provider")
        self.journal = journal
        self.inner = inner
        self.mode = mode

    def complete(self, request: PromptRequest) -> str:
        payload = asdict(request)
        if self.mode == "record":
            text = self.inner.complete(request)
            self.journal.record(payload, text)
            return text
        text = self.journal.lookup(payload)
        if not isinstance(text, str):
            raise MalformedResponse("journal entry is not completion text")
        return text
