import xml.etree.ElementTree as ET

import numpy as np

from edgematch.geometry.generator import load_bundled
from edgematch.lp.model import RelaxLPState
from edgematch.render.svg import (
    SVG_NS,
    render_lp_trace,
    render_puzzle,
    render_rotation_copies,
    render_sdp_trace,
    to_string,
    write_svg,
)
from edgematch.sdp.model import RelaxSDPState
from tests.factories import PuzzleTestDataFactory


def polygons(svg, css):
    return [p for p in svg.iter("polygon") if p.get("class") == css]


def test_solved_grid_draws_one_triangle_per_edge():
    # Given
    puzzle, planted = PuzzleTestDataFactory.distinct_grid()

    # When
    svg = render_puzzle(puzzle, planted)

    # Then
    assert svg.get("version") == "1.1"
    assert len(polygons(svg, "edge")) == 4 * puzzle.n_pieces
    assert len(polygons(svg, "frame")) == 1
    assert [g.get("class") for g in svg.findall("g")] == ["solved"]
    assert len(svg.find("g").findall("g")) == puzzle.n_pieces


def test_scrambled_layout_keeps_pieces_below_the_frame():
    # Given
    puzzle, _ = PuzzleTestDataFactory.pair()

    # When
    svg = render_puzzle(puzzle)

    # Then
    assert svg.find("g").get("class") == "scrambled"
    frame, = polygons(svg, "frame")
    frame_bottom = max(float(p.split(",")[1]) for p in frame.get("points").split())
    for triangle in polygons(svg, "edge"):
        assert min(float(p.split(",")[1]) for p in triangle.get("points").split()) > frame_bottom


def test_dissection_pieces_are_filled_outlines():
    puzzle, planted = load_bundled("rectangle-dissection")
    svg = render_puzzle(puzzle, planted)
    assert len(polygons(svg, "piece-fill")) == puzzle.n_pieces
    assert not polygons(svg, "edge")


def test_rotation_copies():
    # Given
    puzzle, planted = PuzzleTestDataFactory.single(origin=(1.0, 1.0))

    # When
    svg = render_rotation_copies(puzzle, planted, 4)

    # Then
    layers = svg.findall("g")
    assert [layer.get("data-copy") for layer in layers] == ["0", "1", "2", "3"]
    assert all(p.get("opacity") is None for p in layers[0].iter("polygon"))
    assert all(p.get("opacity") == "0.3" for p in layers[1].iter("polygon"))


def test_serialized_svg_is_well_formed(tmp_path):
    # Given
    puzzle, planted = PuzzleTestDataFactory.single()
    path = tmp_path / "figures" / "single.svg"

    # When
    write_svg(render_puzzle(puzzle, planted), path)

    # Then
    root = ET.parse(path).getroot()
    assert root.tag == f"{{{SVG_NS}}}svg"
    assert len(root.findall(f".//{{{SVG_NS}}}polygon")) == 5
    assert ET.fromstring(to_string(render_puzzle(puzzle))).tag == root.tag


def test_lp_trace_strip():
    # Given
    state = RelaxLPState(n_pieces=2)
    state.record(np.full((2, 2), 0.5), 0.0)
    state.record(np.eye(2), 2.0)

    # When
    svg = render_lp_trace(state)

    # Then
    panels = svg.findall("g")
    assert [panel.get("data-iteration") for panel in panels] == ["0", "1"]
    cells = panels[1].findall("rect")
    assert len(cells) == 5
    assert cells[0].get("fill") == "rgb(0,0,0)"
    assert cells[1].get("fill") == "rgb(255,255,255)"
    assert panels[0].findall("rect")[0].get("fill") == "rgb(128,128,128)"


def test_empty_traces_render_blank():
    puzzle, _ = PuzzleTestDataFactory.single()
    assert not render_lp_trace(RelaxLPState(n_pieces=1)).findall("g")
    assert not render_sdp_trace(puzzle, RelaxSDPState(n_pieces=1, K=1)).findall("g")


def test_sdp_trace_skips_failed_extractions():
    # Given
    puzzle, planted = PuzzleTestDataFactory.single()
    state = RelaxSDPState(n_pieces=1, K=1)
    state.placements = [[], list(planted.translations), list(planted.translations)]

    # When
    svg = render_sdp_trace(puzzle, state)

    # Then
    assert len(svg.findall("g")) == 2
    assert len(polygons(svg, "piece-fill")) == 2
    assert len(polygons(svg, "frame")) == 2
