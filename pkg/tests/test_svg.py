import xml.etree.ElementTree as ET

import pytest

from tsrm_lab import svg


def parse(doc: str) -> ET.Element:
    root = ET.fromstring(doc)
    assert root.tag.endswith("svg")
    return root


def count_tags(root: ET.Element, suffix: str) -> int:
    return sum(1 for el in root.iter() if el.tag.endswith(suffix))


def test_polyline_is_wellformed_svg():
    doc = svg.polyline([0, 1, 2, 3], [0, 1, 0, -1], "walk", "step", "site")
    root = parse(doc)
    assert count_tags(root, "polyline") == 1
    line = next(el for el in root.iter() if el.tag.endswith("polyline"))
    assert len(line.get("points").split()) == 4
    texts = [el.text for el in root.iter() if el.tag.endswith("text")]
    assert "walk" in texts and "step" in texts and "site" in texts


def test_step_profile_draws_two_points_per_edge():
    doc = svg.step_profile([0.5, 1.5, 2.5], [1, 2, 1], "crossings")
    root = parse(doc)
    line = next(el for el in root.iter() if el.tag.endswith("polyline"))
    assert len(line.get("points").split()) == 6


def test_histogram_draws_one_rect_per_bin():
    rows = [[0.0, 0.5, 3], [0.5, 1.0, 7]]
    doc = svg.histogram(rows, "ranks", "u")
    root = parse(doc)
    # background, frame border, then one bar per bin
    assert count_tags(root, "rect") == 2 + len(rows)


def test_empty_input_is_rejected():
    with pytest.raises(ValueError):
        svg.polyline([], [], "t", "x", "y")
    with pytest.raises(ValueError):
        svg.step_profile([], [], "t")
    with pytest.raises(ValueError):
        svg.histogram([], "t", "x")


def test_mismatched_series_rejected():
    with pytest.raises(ValueError):
        svg.polyline([0, 1], [0], "t", "x", "y")
