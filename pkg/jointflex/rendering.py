"""SVG overlays of an initial and a flexed configuration."""
from pathlib import Path
from typing import Optional, Union

import numpy as np
import svgwrite

from jointflex.analyses.cross_beam import CrossBeamSuggestion
from jointflex.app_logging import get_logger
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)

INITIAL_STROKE = "#d11"
FINAL_FILL = "#999"
BEAM_STROKE = "#15c"


def _flipped(points: np.ndarray) -> list[tuple[float, float]]:
    """SVG y grows downward."""
    return [(float(x), float(-y)) for x, y in points]


def _viewbox(scenes: tuple[Scene, ...], pad: float) -> tuple[float, float, float, float]:
    points = np.vstack([b.world_vertices for s in scenes for b in s.bodies]) * (1.0, -1.0)
    minx, miny = points.min(axis=0)
    maxx, maxy = points.max(axis=0)
    return (
        float(minx - pad),
        float(miny - pad),
        float((maxx - minx) + 2.0 * pad),
        float((maxy - miny) + 2.0 * pad),
    )


def build_drawing(
    before: Scene, after: Scene, beam: Optional[CrossBeamSuggestion] = None
) -> svgwrite.Drawing:
    """Final configuration filled gray under the initial one outlined in red.

    Raises:
        ValueError: the scenes do not share a body list.
    """
    if len(before.bodies) != len(after.bodies):
        raise ValueError(
            f"scenes differ in body count ({len(before.bodies)} vs {len(after.bodies)})"
        )
    pad = 0.05 * max(before.diameter, after.diameter, 1e-9)
    viewbox = _viewbox((before, after), pad)
    stroke_width = f"{0.15 * pad:.6g}"

    dwg = svgwrite.Drawing(profile="tiny")
    dwg.attribs["viewBox"] = " ".join(f"{v:.6g}" for v in viewbox)

    final = dwg.g(id="final", fill=FINAL_FILL, stroke="none")
    for body in after.bodies:
        final.add(dwg.polygon(points=_flipped(body.world_vertices)))
    dwg.add(final)

    initial = dwg.g(id="initial", fill="none", stroke=INITIAL_STROKE, stroke_width=stroke_width)
    for body in before.bodies:
        initial.add(dwg.polygon(points=_flipped(body.world_vertices)))
    dwg.add(initial)

    if beam is not None:
        pair = beam.pair
        start, end = _flipped(
            np.array(
                [
                    before.bodies[pair.body_a].world_vertices[pair.vertex_a],
                    before.bodies[pair.body_b].world_vertices[pair.vertex_b],
                ]
            )
        )
        dwg.add(dwg.line(start=start, end=end, stroke=BEAM_STROKE, stroke_width=stroke_width, id="beam"))
    return dwg


def render_svg(
    before: Scene,
    after: Scene,
    path: Union[str, Path],
    beam: Optional[CrossBeamSuggestion] = None,
) -> None:
    """Write the overlay to ``path``; OSError propagates for unwritable paths."""
    build_drawing(before, after, beam).saveas(str(path))
    logger.info(f"Wrote SVG to {path}")
