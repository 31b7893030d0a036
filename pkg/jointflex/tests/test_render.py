import xml.etree.ElementTree as ET

import pytest

from jointflex import structures
from jointflex.analyses import suggest_cross_beam
from jointflex.geometry.scene import Body, Scene
from jointflex.lp.flex import Displacement
from jointflex.rendering import FINAL_FILL, INITIAL_STROKE, build_drawing, render_svg
from jointflex.stepper import apply_displacement

SVG = "{http://www.w3.org/2000/svg}"


def _groups(path):
    root = ET.parse(path).getroot()
    return root, {g.get("id"): g for g in root.iter(f"{SVG}g")}


def test_overlay_has_red_initial_and_gray_final(tmp_path, two_squares):
    flexed = apply_displacement(two_squares, Displacement([0.05, 0.0, 0.0]), 1.0)
    path = tmp_path / "flex.svg"
    render_svg(two_squares, flexed, path)

    root, groups = _groups(path)
    assert root.get("viewBox")
    assert groups["final"].get("fill") == FINAL_FILL
    assert groups["initial"].get("stroke") == INITIAL_STROKE
    assert groups["initial"].get("fill") == "none"
    assert len(groups["final"].findall(f"{SVG}polygon")) == 2
    assert len(groups["initial"].findall(f"{SVG}polygon")) == 2
    # gray is drawn first so the red outlines stay on top
    assert [g.get("id") for g in root.findall(f"{SVG}g")] == ["final", "initial"]


def test_points_are_flipped_for_svg(two_squares):
    dwg = build_drawing(two_squares, two_squares)
    xml = dwg.tostring()
    assert "0,-1" in xml
    assert "beam" not in xml


def test_beam_line(tmp_path, two_squares):
    flexed = apply_displacement(two_squares, Displacement([0.05, 0.0, 0.0]), 1.0)
    beam = suggest_cross_beam(two_squares, flexed)
    path = tmp_path / "beam.svg"
    render_svg(two_squares, flexed, path, beam=beam)
    root, _ = _groups(path)
    lines = [el for el in root.iter(f"{SVG}line") if el.get("id") == "beam"]
    assert len(lines) == 1


def test_body_count_mismatch(two_squares):
    single = Scene((Body(structures.square()),))
    with pytest.raises(ValueError, match="body count"):
        build_drawing(two_squares, single)
