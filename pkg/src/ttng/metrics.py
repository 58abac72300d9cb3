"""Similarity metrics over announcement pairs and the track-separation test.

Three pairwise scores: entity-set Jaccard (on entities extracted from the
text, so it genuinely measures writer compliance), tf-idf cosine over the
dataset corpus, and embedding cosine from a pluggable embedding provider.
Scores are grouped by whether the pair shares a track under the generating
motif; a Welch two-sample t-test per metric quantifies the separation.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np
from pathlib import Path
from scipy import stats as scipy_stats

from .errors import (
    DimensionMismatch,
    EmptyCorpusError,
    InsufficientSample,
    MalformedResponse,
    TtngError,
)
from .pipeline import StudyDataset
from .providers import ProviderConfig, RequestJournal

import httpx

# Typical score ranges reported for a real-model dataset; exported purely as
# reporting annotations, never asserted.
REFERENCE_RANGES = {
    "jaccard": {"same-track": (0.4, 0.9), "different-track": (0.1, 0.4)},
    "tfidf": {"same-track": (0.5, 0.8), "different-track": (0.2, 0.45)},
    "embedding": {"same-track": (0.75, 0.95), "different-track": (0.4, 0.7)},
}

METRICS = ("jaccard", "tfidf", "embedding")
LABELS = ("same-track", "different-track")


# --- entity extraction & set similarity ----------------------------------------


def extract_entities(text: str, lexicon: Iterable[str]) -> frozenset[str]:
    """Case-insensitive whole-phrase scan; longest lexicon entry wins overlaps."""
    names = sorted({n for n in lexicon if n}, key=lambda n: (-len(n), n))
    if not names or not text:
        return frozenset()
    pattern = re.compile(
        r"(?<![A-Za-z0-9])(?:" + "|".join(re.escape(n) for n in names) + r")(?![A-Za-z0-9])",
        re.IGNORECASE,
    )
    canonical = {n.lower(): n for n in names}
    return frozenset(canonical[m.group(0).lower()] for m in pattern.finditer(text))


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """|a & b| / |a | b|; two empty sets count as identical (1.0)."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


# --- tf-idf cosine --------------------------------------------------------------

_TOKEN = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def tfidf_cosine(doc_i: str, doc_j: str, corpus: Sequence[str]) -> float:
    """Cosine of raw-tf * ln(N/df) vectors over the corpus vocabulary."""
    if len(corpus) < 2:
        raise EmptyCorpusError("tf-idf needs a corpus of at least two documents")
    n_docs = len(corpus)
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(_tokens(doc)))

    def vector(doc: str) -> dict[str, float]:
        tf = Counter(_tokens(doc))
        return {t: count * math.log(n_docs / max(df[t], 1)) for t, count in tf.items()}

    vi, vj = vector(doc_i), vector(doc_j)
    dot = sum(w * vj[t] for t, w in vi.items() if t in vj)
    ni = math.sqrt(sum(w * w for w in vi.values()))
    nj = math.sqrt(sum(w * w for w in vj.values()))
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return dot / (ni * nj)


# --- embeddings -----------------------------------------------------------------


class EmbeddingProvider(Protocol):
    def embed(self, text: str) -> tuple[float, ...]: ...


class HashedNgramEmbedder:
    """Deterministic character-trigram hashing into a fixed-size vector.

    Not semantic in any way; exists so the embedding path can be exercised
    offline. Use a real embedding endpoint for meaningful scores.
    """

    def __init__(self, dims: int = 256, n: int = 3):
        self.dims = dims
        self.n = n

    def embed(self, text: str) -> tuple[float, ...]:
        vec = [0.0] * self.dims
        padded = f"  {text.lower()}  "
        for i in range(len(padded) - self.n + 1):
            gram = padded[i : i + self.n]
            slot = int.from_bytes(hashlib.md5(gram.encode()).digest()[:4], "big") % self.dims
            vec[slot] += 1.0
        norm = math.sqrt(sum(v * v for v in vec))
        if norm == 0.0:
            return tuple(vec)
        return tuple(v / norm for v in vec)


class HttpEmbeddingProvider:
    """Remote embedding endpoint speaking {model, input} -> data[0].embedding."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout)

    def embed(self, text: str) -> tuple[float, ...]:
        import os

        headers = {}
        token = os.environ.get(self.config.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        resp = self._client.post(
            self.config.endpoint, json={"model": self.config.model, "input": text},
            headers=headers,
        )
        if resp.status_code != 200:
            raise MalformedResponse(f"embedding endpoint returned {resp.status_code}")
        try:
            vector = resp.json()["data"][0]["embedding"]
            return tuple(float(v) for v in vector)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected embedding payload: {exc}") from exc


class JournalingEmbeddingProvider:
    """Record/replay wrapper mirroring the completion journal."""

    def __init__(self, journal: RequestJournal, inner: EmbeddingProvider | None = None,
                 mode: str = "replay"):
        if mode not in ("record", "replay"):
            raise ValueError(f"mode must be record or replay, got {mode!r}")
        if mode == "record" and inner is None:
            raise ValueError("record mode requires an inner provider")
        self.journal = journal
        self.inner = inner
        self.mode = mode

    def embed(self, text: str) -> tuple[float, ...]:
        payload = {"kind": "embedding", "text": text}
        if self.mode == "record":
            vector = tuple(self.inner.embed(text))
            self.journal.record(payload, list(vector))
            return vector
        vector = self.journal.lookup(payload)
        return tuple(float(v) for v in vector)


def embed_cosine(doc_i: str, doc_j: str, provider: EmbeddingProvider) -> float:
    vi, vj = provider.embed(doc_i), provider.embed(doc_j)
    if len(vi) != len(vj):
        raise DimensionMismatch(f"embedding dims differ: {len(vi)} vs {len(vj)}")
    dot = sum(a * b for a, b in zip(vi, vj))
    ni = math.sqrt(sum(a * a for a in vi))
    nj = math.sqrt(sum(b * b for b in vj))
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (ni * nj)))


# --- Welch two-sample t-test -----------------------------------------------------


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Welch statistic with Welch-Satterthwaite df and two-sided p value."""
    n1, n2 = len(sample_a), len(sample_b)
    if n1 < 2 or n2 < 2:
        raise InsufficientSample("both samples need at least two observations")
    m1 = sum(sample_a) / n1
    m2 = sum(sample_b) / n2
    v1 = sum((x - m1) ** 2 for x in sample_a) / (n1 - 1)
    v2 = sum((x - m2) ** 2 for x in sample_b) / (n2 - 1)
    se2 = v1 / n1 + v2 / n2
    if se2 == 0.0:
        # Degenerate: no variance anywhere. Equal means are indistinguishable.
        if m1 == m2:
            return TTestResult(t=0.0, df=float(n1 + n2 - 2), p=1.0)
        return TTestResult(t=math.copysign(math.inf, m1 - m2), df=float(n1 + n2 - 2), p=0.0)
    t = (m1 - m2) / math.sqrt(se2)
    df = se2**2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1))
    p = 2.0 * float(scipy_stats.t.sf(abs(t), df))
    return TTestResult(t=t, df=df, p=p)


# --- pairwise dataset report ------------------------------------------------------


@dataclass(frozen=True)
class PairScore:
    story_id: str
    pair: tuple[str, str]
    label: str
    jaccard: float | None
    tfidf: float | None
    embedding: float | None
    declared_jaccard: float | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class BoxStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    count: int


def box_stats(values: Sequence[float]) -> BoxStats:
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(arr, [25, 50, 75])
    return BoxStats(
        minimum=float(arr.min()), q1=float(q1), median=float(med), q3=float(q3),
        maximum=float(arr.max()), count=int(arr.size),
    )


@dataclass(frozen=True)
class PairwiseReport:
    scores: tuple[PairScore, ...]
    summaries: dict[tuple[str, str], BoxStats]
    tests: dict[str, TTestResult]


def entity_lexicon(dataset: StudyDataset) -> frozenset[str]:
    """All entity names declared in the dataset's alignment maps."""
    names = set()
    for ds in dataset.stories:
        for a in ds.story.alignment.values():
            names.update(a.entities)
    return frozenset(names)


def pairwise_report(
    dataset: StudyDataset, embedder: EmbeddingProvider | None = None
) -> PairwiseReport:
    """Score every unordered within-story announcement pair.

    Labels come from the generating motif's track assignment. Metric errors
    annotate the affected pair instead of aborting the report.
    """
    embedder = embedder if embedder is not None else HashedNgramEmbedder()
    lexicon = entity_lexicon(dataset)
    corpus = [c.content for ds in dataset.stories for c in ds.story.chapters]

    scores: list[PairScore] = []
    for ds in dataset.stories:
        chapters = ds.story.chapters
        for i in range(len(chapters)):
            for j in range(i + 1, len(chapters)):
                ci, cj = chapters[i], chapters[j]
                same = ds.tracks[ci.node_id] == ds.tracks[cj.node_id]
                notes: list[str] = []
                extracted_i = extract_entities(ci.content, lexicon)
                extracted_j = extract_entities(cj.content, lexicon)
                jac: float | None = jaccard(extracted_i, extracted_j)
                declared = jaccard(ci.entities, cj.entities)
                tfv: float | None = None
                emv: float | None = None
                try:
                    tfv = tfidf_cosine(ci.content, cj.content, corpus)
                except TtngError as exc:
                    notes.append(f"tfidf: {exc}")
                try:
                    emv = embed_cosine(ci.content, cj.content, embedder)
                except TtngError as exc:
                    notes.append(f"embedding: {exc}")
                scores.append(
                    PairScore(
                        story_id=ds.story_id,
                        pair=(ci.node_id, cj.node_id),
                        label="same-track" if same else "different-track",
                        jaccard=jac,
                        tfidf=tfv,
                        embedding=emv,
                        declared_jaccard=declared,
                        notes=tuple(notes),
                    )
                )

    summaries: dict[tuple[str, str], BoxStats] = {}
    tests: dict[str, TTestResult] = {}
    for metric in METRICS:
        by_label = {}
        for label in LABELS:
            values = [
                getattr(s, metric) for s in scores
                if s.label == label and getattr(s, metric) is not None
            ]
            if values:
                summaries[(metric, label)] = box_stats(values)
            by_label[label] = values
        if len(by_label["same-track"]) >= 2 and len(by_label["different-track"]) >= 2:
            tests[metric] = welch_t_test(by_label["same-track"], by_label["different-track"])
    return PairwiseReport(scores=tuple(scores), summaries=summaries, tests=tests)


def report_to_json(report: PairwiseReport) -> dict:
    return {
        "pairs": [
            {
                "story_id": s.story_id,
                "pair": list(s.pair),
                "label": s.label,
                "jaccard": s.jaccard,
                "tfidf": s.tfidf,
                "embedding": s.embedding,
                "declared_jaccard": s.declared_jaccard,
                "notes": list(s.notes),
            }
            for s in report.scores
        ],
        "summaries": [
            {"metric": metric, "label": label, **asdict(stats_)}
            for (metric, label), stats_ in sorted(report.summaries.items())
        ],
        "tests": {metric: asdict(result) for metric, result in report.tests.items()},
        "reference_ranges": {
            metric: {label: list(rng) for label, rng in by_label.items()}
            for metric, by_label in REFERENCE_RANGES.items()
        },
    }


def report_to_csv(report: PairwiseReport) -> str:
    """Box-plot-ready summary rows, one per metric x label."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["metric", "label", "min", "q1", "median", "q3", "max", "count", "t", "df", "p"])
    for (metric, label), stats_ in sorted(report.summaries.items()):
        test = report.tests.get(metric)
        writer.writerow(
            [
                metric, label,
                f"{stats_.minimum:.6f}", f"{stats_.q1:.6f}", f"{stats_.median:.6f}",
                f"{stats_.q3:.6f}", f"{stats_.maximum:.6f}", stats_.count,
                f"{test.t:.6f}" if test else "", f"{test.df:.6f}" if test else "",
                f"{test.p:.6g}" if test else "",
            ]
        )
    return buf.getvalue()


def save_report(report: PairwiseReport, path: str | Path) -> None:
    p = Path(path)
    if p.suffix == ".csv":
        p.write_text(report_to_csv(report))
    else:
        p.write_text(json.dumps(report_to_json(report), indent=2) + "\n")
