#!/usr/bin/env python3
"""Build a one-set study dataset offline and validate its track structure.

Same-track announcement pairs should score higher than different-track pairs;
the Welch test quantifies the separation per metric. The offline embedder is
hashing, not semantics, so only jaccard/tf-idf are expected to separate here.
"""

from ttng import GenerationConfig, MockCompletionProvider, build_study_dataset
from ttng.metrics import pairwise_report

dataset = build_study_dataset(
    GenerationConfig(seed=11, topic="harbor city affairs"), MockCompletionProvider(), sets=1
)
print(f"stories: {len(dataset.stories)}  announcements: {dataset.announcement_count()}")

report = pairwise_report(dataset)
print(f"\npairs scored: {len(report.scores)}")
print(f"{'metric':<10} {'label':<16} {'min':>6} {'q1':>6} {'median':>6} {'q3':>6} {'max':>6}")
for (metric, label), stats in sorted(report.summaries.items()):
    print(
        f"{metric:<10} {label:<16} {stats.minimum:6.3f} {stats.q1:6.3f} "
        f"{stats.median:6.3f} {stats.q3:6.3f} {stats.maximum:6.3f}"
    )

print("\nWelch two-sample tests (same-track vs different-track):")
for metric, test in report.tests.items():
    print(f"  {metric:<10} t={test.t:8.3f}  df={test.df:6.1f}  p={test.p:.3g}")
