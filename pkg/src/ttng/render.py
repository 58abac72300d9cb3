"""Deterministic SVG rendering: time left-to-right, tracks as horizontal bands.

Output is plain SVG 1.1 text built with a fixed attribute order and 3-decimal
coordinates, so identical inputs produce byte-identical documents and golden
files stay stable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidGraphError
from .model import TtngGraph, validate
from .motifs import MotifName, motif_graph


@dataclass(frozen=True)
class RenderOptions:
    cell_width: float = 64.0
    cell_height: float = 48.0
    node_radius: float = 9.0
    band_palette: tuple[str, ...] = ("#eef3f8", "#e2ebf3", "#d6e3ee")
    show_track_labels: bool = True
    show_node_labels: bool = True
    margin: float = 24.0

    def __post_init__(self) -> None:
        if self.cell_width <= 0 or self.cell_height <= 0 or self.margin < 0:
            raise ValueError("cell dimensions must be positive and margin non-negative")
        if not (0 < self.node_radius < min(self.cell_width, self.cell_height) / 2):
            raise ValueError("node radius must fit inside a cell")
        if not self.band_palette:
            raise ValueError("band palette must not be empty")


GLYPH_OPTIONS = RenderOptions(
    cell_width=26.0,
    cell_height=20.0,
    node_radius=5.0,
    show_track_labels=False,
    show_node_labels=False,
    margin=6.0,
)


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def node_positions(
    graph: TtngGraph, options: RenderOptions = RenderOptions(), grid: tuple[int, int] | None = None
) -> dict[str, dict[str, float]]:
    """Node centre coordinates; sidecar data for hit-testing in clients."""
    positions = {}
    for n in graph.nodes:
        track = graph.assignment[n.id]
        positions[n.id] = {
            "x": round(options.margin + n.order * options.cell_width + options.cell_width / 2, 3),
            "y": round(options.margin + track * options.cell_height + options.cell_height / 2, 3),
        }
    return positions


def render_ttng_svg(
    graph: TtngGraph, options: RenderOptions = RenderOptions(), grid: tuple[int, int] | None = None
) -> str:
    """Render a validated graph to SVG text.

    grid=(rows, cols) forces the drawing area (used for fixed-size glyphs);
    by default the grid is exactly large enough for the graph. Invalid
    graphs are refused outright rather than partially drawn.
    """
    report = validate(graph)
    if not report.valid:
        raise InvalidGraphError(report)

    n_rows = len(graph.tracks)
    n_cols = graph.column_count
    if grid is not None:
        n_rows, n_cols = max(n_rows, grid[0]), max(n_cols, grid[1])

    opt = options
    width = 2 * opt.margin + n_cols * opt.cell_width
    height = 2 * opt.margin + n_rows * opt.cell_height
    pos = node_positions(graph, opt)

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="6" '
        'markerHeight="6" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#4a5a6a"/></marker>',
        "</defs>",
    ]

    for i in range(n_rows):
        fill = opt.band_palette[i % len(opt.band_palette)]
        y = opt.margin + i * opt.cell_height
        out.append(
            f'<rect x="{_fmt(opt.margin)}" y="{_fmt(y)}" '
            f'width="{_fmt(n_cols * opt.cell_width)}" height="{_fmt(opt.cell_height)}" '
            f'fill="{fill}"/>'
        )
        if opt.show_track_labels and i < len(graph.tracks):
            out.append(
                f'<text x="{_fmt(opt.margin - 6)}" y="{_fmt(y + opt.cell_height / 2)}" '
                'text-anchor="end" dominant-baseline="middle" font-family="sans-serif" '
                f'font-size="11" fill="#333333">{_escape(graph.tracks[i])}</text>'
            )

    # Edges before nodes so circles sit on top. Repeated (from, to) pairs
    # curve with increasing bow so multi-edges stay distinguishable.
    seen: dict[tuple[str, str], int] = {}
    for f, t in graph.edges:
        k = seen.get((f, t), 0)
        seen[(f, t)] = k + 1
        x1, y1 = pos[f]["x"], pos[f]["y"]
        x2, y2 = pos[t]["x"], pos[t]["y"]
        if k == 0:
            out.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                'stroke="#4a5a6a" stroke-width="1.5" marker-end="url(#arrow)"/>'
            )
        else:
            cx = (x1 + x2) / 2
            cy = (y1 + y2) / 2 - k * 0.35 * opt.cell_height
            out.append(
                f'<path d="M{_fmt(x1)},{_fmt(y1)} Q{_fmt(cx)},{_fmt(cy)} {_fmt(x2)},{_fmt(y2)}" '
                'fill="none" stroke="#4a5a6a" stroke-width="1.5" marker-end="url(#arrow)"/>'
            )

    for n in graph.nodes:
        p = pos[n.id]
        out.append(
            f'<circle cx="{_fmt(p["x"])}" cy="{_fmt(p["y"])}" r="{_fmt(opt.node_radius)}" '
            'fill="#ffffff" stroke="#2d3a45" stroke-width="1.5"/>'
        )
        if opt.show_node_labels:
            out.append(
                f'<text x="{_fmt(p["x"])}" y="{_fmt(p["y"] - opt.node_radius - 4)}" '
                'text-anchor="middle" font-family="sans-serif" font-size="10" '
                f'fill="#333333">{_escape(n.id)}</text>'
            )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_motif_glyph(name: MotifName | str, options: RenderOptions | None = None) -> str:
    """Compact fixed-size 3x3 glyph of a motif template."""
    opt = options if options is not None else GLYPH_OPTIONS
    return render_ttng_svg(motif_graph(MotifName(name)), opt, grid=(3, 3))


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
