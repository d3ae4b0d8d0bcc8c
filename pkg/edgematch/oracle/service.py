import itertools
import math
import typing as t
from fractions import Fraction

import numpy as np
from shapely.geometry import Polygon

from edgematch.exceptions import ContractViolationError, DegenerateWitnessError, SearchSpaceTooLargeError
from edgematch.geometry.model import Placement, Puzzle
from edgematch.geometry.service import validate_solution
from edgematch.log import get_logger
from edgematch.oracle.model import SearchMode, SolutionSet, WitnessReport
from edgematch.service import Service, ServiceBase
from edgematch.utils import rotation_matrix

logger = get_logger(__name__)

HALF_TURN = Fraction(1, 2)
REPEAT_TOL = 1e-8


class _Edges(t.NamedTuple):
    midpoints: np.ndarray
    colors: np.ndarray
    orientations: t.Tuple[Fraction, ...]
    lengths: np.ndarray


def _piece_edges(puzzle: Puzzle, i: int, turn: Fraction, translation: np.ndarray) -> _Edges:
    piece = puzzle.pieces[i]
    spin = rotation_matrix(turn)
    return _Edges(
        midpoints=np.array([translation + spin @ np.asarray(edge.offset) for edge in piece.edges]),
        colors=np.array([edge.color for edge in piece.edges]),
        orientations=tuple((edge.orientation + turn) % 1 for edge in piece.edges),
        lengths=np.array([edge.length for edge in piece.edges]),
    )


def _frame_edges(puzzle: Puzzle) -> _Edges:
    edges = puzzle.frame.edges
    return _Edges(
        midpoints=np.array([edge.offset for edge in edges], dtype=float).reshape(-1, 2),
        colors=np.array([edge.color for edge in edges]),
        orientations=tuple(edge.orientation for edge in edges),
        lengths=np.array([edge.length for edge in edges]),
    )


def _compatible(a: _Edges, p: int, b: _Edges, q: int, tol: float) -> bool:
    return (
        a.colors[p] == b.colors[q]
        and (a.orientations[p] - b.orientations[q]) % 1 == HALF_TURN
        and abs(a.lengths[p] - b.lengths[q]) <= tol
    )


def _conflict(a: _Edges, b: _Edges, tol: float) -> bool:
    """Two edge sets clash when coincident midpoints do not form matching pairs."""
    if not len(a.midpoints) or not len(b.midpoints):
        return False
    distance = np.linalg.norm(a.midpoints[:, None, :] - b.midpoints[None, :, :], axis=2)
    for p, q in zip(*np.nonzero(distance <= tol)):
        if not _compatible(a, p, b, q, tol):
            return True
    return False


def estimate_nodes(puzzle: Puzzle) -> float:
    return math.factorial(puzzle.n_pieces) * float(puzzle.rotation_order) ** puzzle.n_pieces


def brute_force_solve(
        puzzle: Puzzle,
        limit: int = 1000,
        max_nodes: float = 1e9,
        tol: float = 1e-6,
) -> SolutionSet:
    """Every solution up to `limit`, canonically ordered."""
    if puzzle.is_linked:
        raise ContractViolationError("oracle searches original puzzles, not linked copies", {})
    if limit < 1:
        raise ContractViolationError("limit must be positive", {"limit": limit})
    estimate = estimate_nodes(puzzle)
    if estimate > max_nodes:
        raise SearchSpaceTooLargeError(
            "search space is too large for exhaustive enumeration",
            {"estimate": estimate, "max_nodes": max_nodes, "pieces": puzzle.n_pieces}
        )
    if puzzle.preset_locations is not None:
        result = _PresetSearch(puzzle, limit, tol).run()
    else:
        result = _AnchoringSearch(puzzle, limit, tol).run()
    logger.debug("oracle %s: %d solutions, %d nodes", result.mode.value, len(result), result.nodes)
    return result


class _PresetSearch:

    def __init__(self, puzzle: Puzzle, limit: int, tol: float):
        self.puzzle, self.limit, self.tol = puzzle, limit, tol
        self.n, self.r = puzzle.n_pieces, puzzle.rotation_order
        self.cells = np.asarray(puzzle.preset_locations, dtype=float).reshape(-1, 2)
        self.frame = _frame_edges(puzzle)
        self._edges: t.Dict[t.Tuple[int, int, int], _Edges] = {}
        self._frame_ok: t.Dict[t.Tuple[int, int, int], bool] = {}
        self._pairs: t.Dict[t.Tuple[t.Tuple[int, int, int], t.Tuple[int, int, int]], bool] = {}
        self.nodes = 0
        self.found: t.List[Placement] = []
        self.exhausted = True

    def edges(self, key: t.Tuple[int, int, int]) -> _Edges:
        if key not in self._edges:
            i, c, k = key
            self._edges[key] = _piece_edges(self.puzzle, i, Fraction(k, self.r), self.cells[c])
        return self._edges[key]

    def fits_frame(self, key) -> bool:
        if key not in self._frame_ok:
            self._frame_ok[key] = not _conflict(self.edges(key), self.frame, self.tol)
        return self._frame_ok[key]

    def fits_pair(self, first, second) -> bool:
        pair = (first, second) if first < second else (second, first)
        if pair not in self._pairs:
            self._pairs[pair] = not _conflict(self.edges(pair[0]), self.edges(pair[1]), self.tol)
        return self._pairs[pair]

    def run(self) -> SolutionSet:
        self.search(0, [], set())
        placements = sorted(self.found, key=lambda p: (p.assignment, p.orientations))
        return SolutionSet(placements=tuple(placements), exhausted=self.exhausted, nodes=self.nodes,
                           mode=SearchMode.PRESET)

    def search(self, c: int, placed: t.List[t.Tuple[int, int, int]], used: t.Set[int]):
        if len(self.found) >= self.limit:
            self.exhausted = False
            return
        if c == self.n:
            self.record(placed)
            return
        for i in range(self.n):
            if i in used:
                continue
            for k in range(self.r):
                key = (i, c, k)
                self.nodes += 1
                if not self.fits_frame(key) or not all(self.fits_pair(key, other) for other in placed):
                    continue
                placed.append(key)
                used.add(i)
                self.search(c + 1, placed, used)
                placed.pop()
                used.discard(i)
                if not self.exhausted:
                    return

    def record(self, placed):
        by_piece = sorted(placed)
        placement = Placement(
            translations=tuple(tuple(float(x) for x in self.cells[c]) for _, c, _ in by_piece),
            orientations=tuple(Fraction(k, self.r) for _, _, k in by_piece),
            assignment=tuple(c for _, c, _ in by_piece),
        )
        if validate_solution(self.puzzle, placement, self.tol).is_valid:
            self.found.append(placement)


class _AnchoringSearch:
    """Fills the first open edge with a matching edge of an unplaced piece."""

    def __init__(self, puzzle: Puzzle, limit: int, tol: float):
        self.puzzle, self.limit, self.tol = puzzle, limit, tol
        self.n, self.r = puzzle.n_pieces, puzzle.rotation_order
        self.frame = _frame_edges(puzzle)
        self.region = puzzle.frame.polygon.buffer(tol)
        self.nodes = 0
        self.found: t.Dict[t.Tuple, Placement] = {}
        self.exhausted = True

    def polygon(self, i: int, turn: Fraction, translation: np.ndarray) -> Polygon:
        spin = rotation_matrix(turn)
        vertices = np.asarray(self.puzzle.pieces[i].vertices, dtype=float) @ spin.T + translation
        return Polygon(vertices)

    def open_edge(self, placed) -> t.Optional[t.Tuple[np.ndarray, int, Fraction, float]]:
        owners = [self.frame] + [edges for _, _, _, edges, _ in placed]
        for a, first in enumerate(owners):
            for p in range(len(first.midpoints)):
                paired = False
                for b, second in enumerate(owners):
                    if a == b or not len(second.midpoints):
                        continue
                    distance = np.linalg.norm(second.midpoints - first.midpoints[p], axis=1)
                    if any(distance[q] <= self.tol and _compatible(first, p, second, q, self.tol)
                           for q in range(len(distance))):
                        paired = True
                        break
                if not paired:
                    return first.midpoints[p], int(first.colors[p]), first.orientations[p], float(first.lengths[p])
        return None

    def run(self) -> SolutionSet:
        self.search([])
        keys = sorted(self.found)
        return SolutionSet(placements=tuple(self.found[key] for key in keys), exhausted=self.exhausted,
                           nodes=self.nodes, mode=SearchMode.ANCHORING)

    def search(self, placed):
        if len(self.found) >= self.limit:
            self.exhausted = False
            return
        if len(placed) == self.n:
            self.record(placed)
            return
        target = self.open_edge(placed)
        if target is None:
            return
        midpoint, color, orientation, length = target
        used = {i for i, _, _, _, _ in placed}
        for i in range(self.n):
            if i in used:
                continue
            piece = self.puzzle.pieces[i]
            for k in range(self.r):
                turn = Fraction(k, self.r)
                spin = rotation_matrix(turn)
                for edge in piece.edges:
                    if edge.color != color or (edge.orientation + turn - orientation) % 1 != HALF_TURN:
                        continue
                    if abs(edge.length - length) > self.tol:
                        continue
                    self.nodes += 1
                    translation = midpoint - spin @ np.asarray(edge.offset)
                    shape = self.polygon(i, turn, translation)
                    if not self.region.covers(shape):
                        continue
                    if any(shape.intersection(other).area > 1e-6 * shape.area for _, _, _, _, other in placed):
                        continue
                    edges = _piece_edges(self.puzzle, i, turn, translation)
                    if _conflict(edges, self.frame, self.tol):
                        continue
                    if any(_conflict(edges, other, self.tol) for _, _, _, other, _ in placed):
                        continue
                    placed.append((i, translation, k, edges, shape))
                    self.search(placed)
                    placed.pop()
                    if not self.exhausted:
                        return

    def record(self, placed):
        by_piece = sorted(placed, key=lambda item: item[0])
        placement = Placement(
            translations=tuple((float(t_[0]), float(t_[1])) for _, t_, _, _, _ in by_piece),
            orientations=tuple(Fraction(k, self.r) for _, _, k, _, _ in by_piece),
        )
        key = tuple(
            (round(x / self.tol), round(y / self.tol), k)
            for (x, y), k in zip(placement.translations, (k for _, _, k, _, _ in by_piece))
        )
        if key not in self.found and validate_solution(self.puzzle, placement, self.tol).is_valid:
            self.found[key] = placement


def power_sum_check(u: t.Sequence[complex], v: t.Sequence[complex], K: int) -> float:
    """max over k <= K of |sum u_i^k - sum v_i^k|."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ContractViolationError("power sums need vectors of equal length", {"u": len(u), "v": len(v)})
    if K < 1:
        raise ContractViolationError("K must be positive", {"K": K})
    powers = np.arange(1, K + 1)
    difference = (u[:, None] ** powers).sum(axis=0) - (v[:, None] ** powers).sum(axis=0)
    return float(np.abs(difference).max(initial=0.0))


def _is_permutation_of(w: np.ndarray, v: np.ndarray, tol: float) -> bool:
    return any(np.abs(w - np.asarray(p)).max() <= tol for p in itertools.permutations(v))


def lemma2_witness_test(
        v: t.Sequence[complex],
        trials: int = 1000,
        seed: int = 0,
        K: t.Optional[int] = None,
) -> WitnessReport:
    """Permutations of v satisfy every power sum up to K = N; random other vectors do not."""
    v = np.asarray(v, dtype=complex)
    n = len(v)
    if n == 0 or n > 4:
        raise ContractViolationError("witness test runs for 1 <= N <= 4", {"n": n})
    for a, b in itertools.combinations(range(n), 2):
        if abs(v[a] - v[b]) <= REPEAT_TOL:
            raise DegenerateWitnessError("witness vector has repeated entries", {"first": a, "second": b})
    K = n if K is None else K

    permutation_violation = max(power_sum_check(np.asarray(p), v, K) for p in itertools.permutations(v))

    rng = np.random.default_rng(seed)
    is_complex = bool(np.any(np.abs(v.imag) > 0))
    low = min(v.real.min(), v.imag.min() if is_complex else v.real.min()) - 1.0
    high = max(v.real.max(), v.imag.max() if is_complex else v.real.max()) + 1.0
    worst, resampled = np.inf, 0
    for _ in range(trials):
        while True:
            w = rng.uniform(low, high, size=n).astype(complex)
            if is_complex:
                w = w + 1j * rng.uniform(low, high, size=n)
            if not _is_permutation_of(w, v, REPEAT_TOL):
                break
            resampled += 1
        worst = min(worst, power_sum_check(w, v, K))

    return WitnessReport(
        n=n,
        K=K,
        permutations=math.factorial(n),
        permutation_violation=permutation_violation,
        trials=trials,
        min_witness_violation=float(worst),
        resampled=resampled,
        passed=bool(permutation_violation <= 1e-10 and (trials == 0 or worst > 1e-6)),
    )


def elementary_symmetric(values: t.Sequence[complex]) -> np.ndarray:
    """e_1..e_N from the monic polynomial with the given roots."""
    coefficients = np.poly(np.asarray(values, dtype=complex))
    signs = (-1.0) ** np.arange(len(coefficients))
    return (signs * coefficients)[1:]


def newton_elementary(power_sums: t.Sequence[complex]) -> np.ndarray:
    """e_1..e_N from p_1..p_N by Newton's identities."""
    p = np.asarray(power_sums, dtype=complex)
    e = np.zeros(len(p) + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, len(p) + 1):
        e[k] = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1)) / k
    return e[1:]


class OracleServiceBase(ServiceBase):
    config: t.Any

    async def configuration(self, config):
        self.config = config


class OracleService(OracleServiceBase):

    def solve(self, puzzle: Puzzle, limit: t.Optional[int] = None, tol: t.Optional[float] = None) -> SolutionSet:
        return brute_force_solve(
            puzzle,
            limit=int(limit or self.setting("oracle", "limit", 1000)),
            max_nodes=float(self.setting("oracle", "max_nodes", 1e9)),
            tol=float(tol or self.setting("geometry", "tolerance", 1e-6)),
        )


oracle_service = Service.add_service(OracleService)
