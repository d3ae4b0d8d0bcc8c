import math
import typing as t
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, model_validator
from shapely.geometry import LinearRing, Point, Polygon

from edgematch.utils import as_turn, rotate_vector, rotation_matrix

RESOLUTION = 360
CHAIN_TOL = 1e-9

Turn = t.Annotated[
    Fraction,
    PlainValidator(as_turn),
    PlainSerializer(lambda f: [f.numerator, f.denominator], return_type=list, when_used="json"),
]
Vector = t.Tuple[float, float]


class TypeKey(t.NamedTuple):
    color: int
    orientation: Fraction


class EdgeElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    endpoints: t.Tuple[Vector, Vector]
    color: int = Field(..., ge=0)
    orientation: Turn
    copy_index: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_normal(self):
        if RESOLUTION % self.orientation.denominator:
            raise ValueError(
                f"orientation {self.orientation} is not a multiple of 1/{RESOLUTION} turn"
            )
        dx, dy = self.direction
        length = math.hypot(dx, dy)
        if length <= CHAIN_TOL:
            raise ValueError("edge has zero length")
        angle = 2.0 * math.pi * float(self.orientation)
        if abs(math.cos(angle) * dx + math.sin(angle) * dy) > 1e-9 * max(1.0, length):
            raise ValueError(f"orientation {self.orientation} is not normal to the edge")
        return self

    @property
    def offset(self) -> Vector:
        (ax, ay), (bx, by) = self.endpoints
        return (ax + bx) / 2.0, (ay + by) / 2.0

    @property
    def direction(self) -> Vector:
        (ax, ay), (bx, by) = self.endpoints
        return bx - ax, by - ay

    @property
    def length(self) -> float:
        return math.hypot(*self.direction)

    @property
    def normal(self) -> Vector:
        angle = 2.0 * math.pi * float(self.orientation)
        return math.cos(angle), math.sin(angle)

    def rotated(self, turn: Fraction, copy_index: t.Optional[int] = None) -> "EdgeElement":
        a, b = self.endpoints
        return EdgeElement(
            endpoints=(rotate_vector(a, turn), rotate_vector(b, turn)),
            color=self.color,
            orientation=self.orientation + turn,
            copy_index=self.copy_index if copy_index is None else copy_index,
        )

    def scaled(self, scale: float, shift: Vector = (0.0, 0.0)) -> "EdgeElement":
        a, b = self.endpoints
        return self.model_copy(update={
            "endpoints": (
                (scale * a[0] + shift[0], scale * a[1] + shift[1]),
                (scale * b[0] + shift[0], scale * b[1] + shift[1]),
            )
        })


def _copy_groups(edges: t.Sequence[EdgeElement]) -> t.Dict[int, t.List[t.Tuple[int, EdgeElement]]]:
    groups: t.Dict[int, t.List[t.Tuple[int, EdgeElement]]] = {}
    for index, edge in enumerate(edges):
        groups.setdefault(edge.copy_index, []).append((index, edge))
    return groups


def _check_chain(owner: str, group: t.List[t.Tuple[int, EdgeElement]]):
    for position, (index, edge) in enumerate(group):
        _, following = group[(position + 1) % len(group)]
        end = np.asarray(edge.endpoints[1])
        start = np.asarray(following.endpoints[0])
        if np.linalg.norm(end - start) > CHAIN_TOL * max(1.0, float(np.abs(end).max())):
            raise ValueError(f"{owner}: edges do not chain after edge {index}")


def _check_on_boundary(owner: str, polygon: Polygon, group: t.List[t.Tuple[int, EdgeElement]]):
    boundary = polygon.exterior
    scale = max(1.0, math.sqrt(polygon.area))
    for index, edge in group:
        for point in edge.endpoints:
            if boundary.distance(Point(point)) > 1e-7 * scale:
                raise ValueError(f"{owner}: edge {index} leaves the polygon boundary")
    perimeter = sum(edge.length for _, edge in group)
    if abs(perimeter - boundary.length) > 1e-7 * max(1.0, boundary.length):
        raise ValueError(f"{owner}: edges do not cover the polygon boundary")


def _check_facing(owner: str, polygon: Polygon, group: t.List[t.Tuple[int, EdgeElement]], inward: bool):
    for index, edge in group:
        nx, ny = edge.normal
        mx, my = edge.offset
        probe = Point(mx + 1e-6 * edge.length * nx, my + 1e-6 * edge.length * ny)
        if polygon.contains(probe) != inward:
            side = "inward" if inward else "outward"
            raise ValueError(f"{owner}: edge {index} orientation is not the {side} normal")


def _check_polygon(owner: str, vertices: t.Sequence[Vector]) -> Polygon:
    if len(vertices) < 3:
        raise ValueError(f"{owner}: polygon needs at least 3 vertices")
    polygon = Polygon(vertices)
    if not polygon.is_valid:
        raise ValueError(f"{owner}: polygon is not simple")
    if not LinearRing(vertices).is_ccw:
        raise ValueError(f"{owner}: polygon is not counter-clockwise")
    return polygon


def rotated_polygon(vertices: t.Sequence[Vector], turn: Fraction) -> Polygon:
    return Polygon([rotate_vector(v, turn) for v in vertices])


class Piece(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=1)
    vertices: t.Tuple[Vector, ...]
    edges: t.Tuple[EdgeElement, ...]
    copies: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_boundary(self):
        owner = f"piece {self.id}"
        polygon = _check_polygon(owner, self.vertices)
        centroid = np.mean(np.asarray(self.vertices, dtype=float), axis=0)
        if np.abs(centroid).max() > 1e-9 * max(1.0, math.sqrt(polygon.area)):
            raise ValueError(f"{owner}: vertex centroid is not the origin")
        groups = _copy_groups(self.edges)
        if sorted(groups) != list(range(self.copies)):
            raise ValueError(f"{owner}: edges must cover copies 0..{self.copies - 1}")
        for copy_index, group in groups.items():
            _check_chain(owner, group)
            shape = rotated_polygon(self.vertices, Fraction(copy_index, self.copies))
            _check_on_boundary(owner, shape, group)
            _check_facing(owner, shape, group, inward=False)
        return self

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def area(self) -> float:
        return self.polygon.area

    def rotated(self, turn: Fraction) -> "Piece":
        return Piece(
            id=self.id,
            vertices=tuple(rotate_vector(v, turn) for v in self.vertices),
            edges=tuple(edge.rotated(turn) for edge in self.edges),
            copies=self.copies,
        )


class Frame(BaseModel):
    model_config = ConfigDict(frozen=True)

    region: t.Tuple[Vector, ...]
    edges: t.Tuple[EdgeElement, ...]
    copies: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_boundary(self):
        if len(self.region) < 3:
            raise ValueError("frame: region needs at least 3 vertices")
        if Polygon(self.region).area == 0.0:
            # rejected by normalize_coordinates with a dedicated error
            return self
        _check_polygon("frame", self.region)
        groups = _copy_groups(self.edges)
        if sorted(groups) != list(range(self.copies)):
            raise ValueError(f"frame: edges must cover copies 0..{self.copies - 1}")
        for copy_index, group in groups.items():
            _check_chain("frame", group)
            shape = rotated_polygon(self.region, Fraction(copy_index, self.copies))
            _check_on_boundary("frame", shape, group)
            _check_facing("frame", shape, group, inward=True)
        return self

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.region)

    def polygons(self) -> t.List[Polygon]:
        return [rotated_polygon(self.region, Fraction(rho, self.copies)) for rho in range(self.copies)]

    @property
    def area(self) -> float:
        return self.polygon.area * self.copies


class Puzzle(BaseModel):
    model_config = ConfigDict(frozen=True)

    frame: Frame
    pieces: t.Tuple[Piece, ...]
    rotation_order: int = Field(1, ge=1)
    preset_locations: t.Optional[t.Tuple[Vector, ...]] = None

    @model_validator(mode="after")
    def check_pieces(self):
        ids = [piece.id for piece in self.pieces]
        if len(set(ids)) != len(ids):
            raise ValueError("piece ids must be unique")
        if self.preset_locations is not None and len(self.preset_locations) != len(self.pieces):
            raise ValueError(
                f"preset_locations has {len(self.preset_locations)} entries for {len(self.pieces)} pieces"
            )
        for piece in self.pieces:
            if piece.copies != self.frame.copies:
                raise ValueError(f"piece {piece.id}: linked copies differ from the frame")
        return self

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    @property
    def copies(self) -> int:
        return self.frame.copies

    @property
    def is_linked(self) -> bool:
        return self.frame.copies > 1


class Placement(BaseModel):
    model_config = ConfigDict(frozen=True)

    translations: t.Tuple[Vector, ...]
    orientations: t.Tuple[Turn, ...] = ()
    assignment: t.Optional[t.Tuple[int, ...]] = None

    @model_validator(mode="before")
    @classmethod
    def fill_orientations(cls, data: t.Any) -> t.Any:
        if isinstance(data, dict) and not data.get("orientations"):
            data = dict(data)
            data["orientations"] = [0] * len(data.get("translations") or ())
        return data

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.orientations) != len(self.translations):
            raise ValueError("orientations and translations differ in length")
        if self.assignment is not None and len(self.assignment) != len(self.translations):
            raise ValueError("assignment and translations differ in length")
        return self

    def __len__(self) -> int:
        return len(self.translations)

    @property
    def has_rotations(self) -> bool:
        return any(turn != 0 for turn in self.orientations)


class UnmatchedEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    piece_id: int = Field(..., description="0 for the frame")
    edge_index: int
    reason: str


class ValidityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_valid: bool
    unmatched_edges: t.Tuple[UnmatchedEdge, ...] = ()
    max_position_error: float = 0.0
    tolerance: float


class AffineTransform(BaseModel):
    """p -> scale * p + shift. Only uniform scales are used, so rotations commute with the linear part."""
    model_config = ConfigDict(frozen=True)

    scale: float = Field(1.0, gt=0)
    shift: Vector = (0.0, 0.0)

    def apply(self, point: t.Sequence[float]) -> Vector:
        return self.scale * point[0] + self.shift[0], self.scale * point[1] + self.shift[1]

    def apply_vector(self, vector: t.Sequence[float]) -> Vector:
        return self.scale * vector[0], self.scale * vector[1]

    def apply_many(self, points: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(points, dtype=float) + np.asarray(self.shift)

    def inverse(self) -> "AffineTransform":
        return AffineTransform(
            scale=1.0 / self.scale,
            shift=(-self.shift[0] / self.scale, -self.shift[1] / self.scale),
        )

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and self.shift == (0.0, 0.0)


__all__ = [
    "RESOLUTION", "Turn", "Vector", "TypeKey", "EdgeElement", "Piece", "Frame", "Puzzle",
    "Placement", "UnmatchedEdge", "ValidityReport", "AffineTransform", "rotated_polygon",
    "rotation_matrix",
]
