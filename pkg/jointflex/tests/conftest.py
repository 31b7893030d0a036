"""Shared fixtures and hypothesis profiles."""
import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from jointflex import structures
from jointflex.geometry.scene import Body, BoxLimits, Pose, Scene

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=1000, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def unit_square():
    return structures.square(name="sq")


@pytest.fixture
def two_squares() -> Scene:
    return structures.two_squares(gap=0.05)


@pytest.fixture
def corner_scene() -> Scene:
    """Fixed square and a free square touching corner to corner across a small gap."""
    gap = 0.01
    return Scene(
        (
            Body(structures.square(name="A"), Pose(0.0, 0.0, 0.0), fixed=True, name="A"),
            Body(structures.square(name="B"), Pose(1.0 + gap, 1.0 + gap, 0.0), name="B"),
        ),
        epsilon=0.1,
    )


@pytest.fixture
def cavity_scene():
    def build(delta: float, rotation: float = 0.5) -> Scene:
        return structures.block_in_cavity(
            delta, bounds=BoxLimits(translation=1.0, rotation=rotation)
        )

    return build
