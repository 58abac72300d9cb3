"""Time-track narrative graph toolkit.

Model narratives as announcements on a time x track grid, enumerate and
classify the nine 3-node motifs, generate controlled synthetic news stories
from structure specifications, validate datasets with similarity metrics,
render graphs to SVG, and run a motif-matching study over HTTP.
"""

from .model import (
    Announcement,
    AttributeSet,
    ConstraintReport,
    LinkRule,
    TrackRule,
    TtngGraph,
    assign_tracks,
    build_graph,
    derive_edges,
    validate,
)
from .motifs import (
    MOTIF_NAMES,
    MotifClass,
    MotifName,
    OccupancyMatrix,
    canonicalize,
    classify,
    enumerate_classes,
    is_valid,
    motif_graph,
)
from .pipeline import (
    GenerationConfig,
    NarrativeContext,
    Story,
    StudyDataset,
    align_theme_entity,
    build_study_dataset,
    craft_context,
    generate_story,
    verify_chapter,
)
from .providers import MockCompletionProvider, PromptRequest, ProviderConfig
from .render import RenderOptions, render_motif_glyph, render_ttng_svg
from .study import Study, accuracy_stats, confusion_matrix

__version__ = "0.1.0"

__all__ = [
    "Announcement",
    "AttributeSet",
    "ConstraintReport",
    "GenerationConfig",
    "LinkRule",
    "MOTIF_NAMES",
    "MockCompletionProvider",
    "MotifClass",
    "MotifName",
    "NarrativeContext",
    "OccupancyMatrix",
    "PromptRequest",
    "ProviderConfig",
    "RenderOptions",
    "Story",
    "Study",
    "StudyDataset",
    "TrackRule",
    "TtngGraph",
    "accuracy_stats",
    "align_theme_entity",
    "assign_tracks",
    "build_graph",
    "build_study_dataset",
    "canonicalize",
    "classify",
    "confusion_matrix",
    "craft_context",
    "derive_edges",
    "enumerate_classes",
    "generate_story",
    "is_valid",
    "motif_graph",
    "render_motif_glyph",
    "render_ttng_svg",
    "validate",
    "verify_chapter",
]
