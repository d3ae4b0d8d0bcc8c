import typing as t
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np

from edgematch.geometry.model import Placement, Puzzle, rotated_polygon
from edgematch.lp.model import RelaxLPState
from edgematch.sdp.model import RelaxSDPState
from edgematch.utils import ensure_parent, rotation_matrix

SVG_NS = "http://www.w3.org/2000/svg"
PALETTE = (
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
    "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8", "#800000", "#aaffc3",
)
FRAME_STROKE = "#222222"
COPY_OPACITY = 0.3


def edge_color(color: int) -> str:
    return PALETTE[color % len(PALETTE)]


def svg_root(width: float, height: float) -> ET.Element:
    return ET.Element("svg", xmlns=SVG_NS, version="1.1",
                      width=f"{width:.0f}px", height=f"{height:.0f}px",
                      viewBox=f"0 0 {width:.0f} {height:.0f}")


def to_string(svg: ET.Element) -> str:
    return ET.tostring(svg, encoding="unicode")


def write_svg(svg: ET.Element, path) -> None:
    ET.ElementTree(svg).write(ensure_parent(path), encoding="utf-8", xml_declaration=True)


class _Canvas:
    """World-to-pixel mapping with the y axis pointing up."""

    def __init__(self, low: np.ndarray, high: np.ndarray, scale: float, margin: float = 10.0,
                 origin: t.Tuple[float, float] = (0.0, 0.0)):
        self.low, self.high, self.scale, self.margin = low, high, scale, margin
        self.origin = origin

    @property
    def width(self) -> float:
        return float(self.high[0] - self.low[0]) * self.scale + 2 * self.margin

    @property
    def height(self) -> float:
        return float(self.high[1] - self.low[1]) * self.scale + 2 * self.margin

    def point(self, p) -> t.Tuple[float, float]:
        x = self.origin[0] + self.margin + (p[0] - self.low[0]) * self.scale
        y = self.origin[1] + self.margin + (self.high[1] - p[1]) * self.scale
        return x, y

    def polygon(self, parent: ET.Element, points, fill: str, css: str, opacity: float = 1.0,
                stroke: str = "#000000", width: float = 0.5) -> ET.Element:
        attrs = {
            "class": css,
            "points": " ".join("{:.3f},{:.3f}".format(*self.point(p)) for p in points),
            "fill": fill,
            "stroke": stroke,
            "stroke-width": f"{width}",
        }
        if opacity < 1.0:
            attrs["opacity"] = f"{opacity}"
        return ET.SubElement(parent, "polygon", attrs)


def _piece_points(puzzle: Puzzle, i: int, translation, turn: Fraction) -> np.ndarray:
    vertices = np.asarray(puzzle.pieces[i].vertices, dtype=float)
    return vertices @ rotation_matrix(turn).T + np.asarray(translation, dtype=float)


def _uses_triangles(puzzle: Puzzle) -> bool:
    return all(len(piece.edges) == 4 and len(piece.vertices) == 4 for piece in puzzle.pieces)


def _draw_piece(canvas: _Canvas, parent: ET.Element, puzzle: Puzzle, i: int, translation, turn: Fraction,
                triangles: bool, opacity: float = 1.0):
    group = ET.SubElement(parent, "g", {"class": "piece", "data-piece": str(puzzle.pieces[i].id)})
    spin = rotation_matrix(turn)
    centre = np.asarray(translation, dtype=float)
    if triangles:
        for edge in puzzle.pieces[i].edges:
            a, b = (centre + spin @ np.asarray(p) for p in edge.endpoints)
            canvas.polygon(group, [a, b, centre], edge_color(edge.color), "edge", opacity)
    else:
        fill = PALETTE[i % len(PALETTE)]
        canvas.polygon(group, _piece_points(puzzle, i, translation, turn), fill, "piece-fill", opacity)
    return group


def _draw_frame(canvas: _Canvas, parent: ET.Element, region, opacity: float = 1.0):
    canvas.polygon(parent, region, "none", "frame", opacity, stroke=FRAME_STROKE, width=2.0)


def _scrambled_layout(puzzle: Puzzle) -> t.List[t.Tuple[float, float]]:
    """Pieces in a row under the frame, in index order."""
    region = np.asarray(puzzle.frame.region, dtype=float)
    sizes = [float(np.ptp(np.asarray(p.vertices), axis=0).max()) for p in puzzle.pieces]
    step = (max(sizes) if sizes else 1.0) * 1.25
    columns = max(1, int(np.ceil(np.sqrt(puzzle.n_pieces))))
    left, bottom = region[:, 0].min(), region[:, 1].min() - step
    return [
        (left + step * (i % columns) + step / 2, bottom - step * (i // columns))
        for i in range(puzzle.n_pieces)
    ]


def render_puzzle(
        puzzle: Puzzle,
        placement: t.Optional[Placement] = None,
        scale: float = 60.0,
        style: str = "auto",
) -> ET.Element:
    """Frame outline plus every piece; without a placement the pieces are laid out below the frame."""
    triangles = _uses_triangles(puzzle) if style == "auto" else style == "triangles"
    if placement is None:
        translations = _scrambled_layout(puzzle)
        turns = [Fraction(0)] * puzzle.n_pieces
    else:
        translations, turns = list(placement.translations), list(placement.orientations)

    points = [np.asarray(puzzle.frame.region, dtype=float)]
    points += [_piece_points(puzzle, i, translations[i], turns[i]) for i in range(puzzle.n_pieces)]
    stacked = np.vstack(points)
    canvas = _Canvas(stacked.min(axis=0), stacked.max(axis=0), scale)
    svg = svg_root(canvas.width, canvas.height)
    layer = ET.SubElement(svg, "g", {"class": "solved" if placement is not None else "scrambled"})
    for i in range(puzzle.n_pieces):
        _draw_piece(canvas, layer, puzzle, i, translations[i], turns[i], triangles)
    _draw_frame(canvas, layer, puzzle.frame.region)
    return svg


def render_rotation_copies(puzzle: Puzzle, placement: Placement, r: int, scale: float = 40.0) -> ET.Element:
    """The solved puzzle plus its r - 1 rotated duplicates drawn transparent."""
    triangles = _uses_triangles(puzzle)
    copies = []
    for rho in range(r):
        turn = Fraction(rho, r)
        spin = rotation_matrix(turn)
        copies.append((
            turn,
            [spin @ np.asarray(t_, dtype=float) for t_ in placement.translations],
            np.asarray(rotated_polygon(puzzle.frame.region, turn).exterior.coords)[:-1],
        ))
    stacked = np.vstack([region for _, _, region in copies])
    canvas = _Canvas(stacked.min(axis=0), stacked.max(axis=0), scale)
    svg = svg_root(canvas.width, canvas.height)
    for rho, (turn, translations, region) in enumerate(copies):
        opacity = 1.0 if rho == 0 else COPY_OPACITY
        layer = ET.SubElement(svg, "g", {"class": "copy", "data-copy": str(rho)})
        for i in range(puzzle.n_pieces):
            _draw_piece(canvas, layer, puzzle, i, translations[i], placement.orientations[i] + turn,
                        triangles, opacity)
        _draw_frame(canvas, layer, region, opacity)
    return svg


def render_lp_trace(state: RelaxLPState, cell: float = 8.0, gap: float = 12.0) -> ET.Element:
    """One grayscale heatmap of P per iteration, left to right."""
    if not state.matrices:
        return svg_root(gap, gap)
    rows, cols = state.matrices[0].shape
    panel_w, panel_h = cols * cell, rows * cell
    svg = svg_root(gap + len(state.matrices) * (panel_w + gap), panel_h + 2 * gap)
    for k, P in enumerate(state.matrices):
        group = ET.SubElement(svg, "g", {"class": "iteration", "data-iteration": str(k)})
        left = gap + k * (panel_w + gap)
        for i in range(rows):
            for j in range(cols):
                level = int(round(255 * (1.0 - float(np.clip(P[i, j], 0.0, 1.0)))))
                ET.SubElement(group, "rect", {
                    "x": f"{left + j * cell:.2f}", "y": f"{gap + i * cell:.2f}",
                    "width": f"{cell:.2f}", "height": f"{cell:.2f}",
                    "fill": f"rgb({level},{level},{level})",
                })
        ET.SubElement(group, "rect", {
            "x": f"{left:.2f}", "y": f"{gap:.2f}", "width": f"{panel_w:.2f}", "height": f"{panel_h:.2f}",
            "fill": "none", "stroke": FRAME_STROKE, "stroke-width": "1",
        })
    return svg


def render_sdp_trace(puzzle: Puzzle, state: RelaxSDPState, scale: float = 30.0, gap: float = 10.0) -> ET.Element:
    """Extracted placement of every iteration as a strip of panels."""
    region = np.asarray(puzzle.frame.region, dtype=float)
    frames = [translations for translations in state.placements if len(translations) == puzzle.n_pieces]
    if not frames:
        return svg_root(gap, gap)
    pieces = [
        _piece_points(puzzle, i, translation, Fraction(0))
        for translations in frames
        for i, translation in enumerate(translations)
    ]
    stacked = np.vstack([region] + pieces)
    low, high = stacked.min(axis=0), stacked.max(axis=0)
    probe = _Canvas(low, high, scale, margin=gap)
    svg = svg_root(len(frames) * probe.width, probe.height)
    for k, translations in enumerate(frames):
        canvas = _Canvas(low, high, scale, margin=gap, origin=(k * probe.width, 0.0))
        group = ET.SubElement(svg, "g", {"class": "iteration", "data-iteration": str(k)})
        for i, translation in enumerate(translations):
            _draw_piece(canvas, group, puzzle, i, translation, Fraction(0), triangles=False, opacity=0.8)
        _draw_frame(canvas, group, puzzle.frame.region)
    return svg
