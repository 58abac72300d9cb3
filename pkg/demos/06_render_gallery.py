#!/usr/bin/env python3
"""Write the nine motif glyphs and a full graph rendering to ./gallery/."""

from pathlib import Path

from ttng import MOTIF_NAMES, render_motif_glyph, render_ttng_svg
from ttng.model import LinkRule, TrackRule, build_graph
from ttng.motifs import motif_graph

out = Path(__file__).parent / "gallery"
out.mkdir(exist_ok=True)

for name in MOTIF_NAMES:
    (out / f"{name.value}.svg").write_text(render_motif_glyph(name))
print(f"wrote 9 glyphs to {out}")

# A full-size rendering of one template with labels and bands.
(out / "arch_full.svg").write_text(render_ttng_svg(motif_graph("Arch")))
print(f"wrote {out / 'arch_full.svg'}")
