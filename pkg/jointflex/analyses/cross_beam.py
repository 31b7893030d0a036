"""Cross-beam placement: the visible vertex pair that moved apart the most."""
from dataclasses import dataclass

import numpy as np

from jointflex.app_logging import get_logger
from jointflex.errors import EmptyVisibilityError
from jointflex.geometry.scene import Scene
from jointflex.geometry.visibility import VertexPair, mutually_visible_pairs

logger = get_logger(__name__)


@dataclass(frozen=True)
class CrossBeamSuggestion:
    pair: VertexPair
    initial_length: float
    flexed_length: float

    @property
    def change(self) -> float:
        return abs(self.flexed_length - self.initial_length)


def _lengths(scene: Scene, pairs: list[VertexPair]) -> np.ndarray:
    a = np.array([scene.bodies[p.body_a].world_vertices[p.vertex_a] for p in pairs])
    b = np.array([scene.bodies[p.body_b].world_vertices[p.vertex_b] for p in pairs])
    return np.hypot(*(a - b).T)


def suggest_cross_beam(initial: Scene, flexed: Scene) -> CrossBeamSuggestion:
    """Mutually visible pair (in ``initial``) with the largest absolute length change.

    Raises:
        ValueError: the scenes do not share a body list.
        EmptyVisibilityError: no cross-body vertex pair is visible.
    """
    if len(initial.bodies) != len(flexed.bodies):
        raise ValueError("initial and flexed scenes must have the same bodies")
    pairs = mutually_visible_pairs(initial)
    if not pairs:
        raise EmptyVisibilityError("no mutually visible vertex pairs")
    before = _lengths(initial, pairs)
    after = _lengths(flexed, pairs)
    best = int(np.argmax(np.abs(after - before)))
    suggestion = CrossBeamSuggestion(pairs[best], float(before[best]), float(after[best]))
    logger.info(
        f"Cross beam between {initial.names[suggestion.pair.body_a]}.v{suggestion.pair.vertex_a} "
        f"and {initial.names[suggestion.pair.body_b]}.v{suggestion.pair.vertex_b} "
        f"(change {suggestion.change:.4g})"
    )
    return suggestion
