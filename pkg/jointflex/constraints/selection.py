"""Constraint-pair selection at the current configuration."""
from typing import Optional

from jointflex.app_logging import get_logger
from jointflex.constraints.pairs import ConstraintPair, orient_pair
from jointflex.geometry.proximity import find_candidates
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)


def select_pairs(
    scene: Scene,
    epsilon: Optional[float] = None,
    penetration_tolerance: Optional[float] = None,
    corner_mode: Optional[str] = None,
) -> list[ConstraintPair]:
    """Proximity-gated, oriented and de-duplicated constraint pairs.

    Ordering is by the involved body indices, then edge body, edge and vertex.

    Raises:
        InitialPenetrationError: from the proximity search.
    """
    candidates = find_candidates(
        scene, epsilon=epsilon, penetration_tolerance=penetration_tolerance
    )
    unique: dict[tuple, ConstraintPair] = {}
    for candidate in candidates:
        pair = orient_pair(
            scene,
            candidate,
            corner_mode=corner_mode,
            penetration_tolerance=penetration_tolerance,
        )
        unique.setdefault(pair.key, pair)
    pairs = sorted(unique.values(), key=lambda p: p.sort_key)
    logger.debug(f"Selected {len(pairs)} pairs from {len(candidates)} candidates")
    return pairs
