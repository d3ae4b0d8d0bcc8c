import typing as t
from fractions import Fraction

import numpy as np

from edgematch.algebra.model import MonomialFamily, PolySystem
from edgematch.algebra.rotation import augment_rotations, recover_orientation
from edgematch.algebra.service import assemble_system, copy_points, monomial_values, monomials_for
from edgematch.exceptions import (
    ContractViolationError,
    DuplicatePresetError,
    InfeasibleRepresentationError,
    SolverFailureError,
)
from edgematch.geometry.model import Placement, Puzzle
from edgematch.geometry.service import validate_solution
from edgematch.kernels import LinearProgram, SolveStatus, max_assignment, solve_lp
from edgematch.log import get_logger
from edgematch.lp.model import LPStatus, PresetOptions, PresetVandermonde, RelaxLPState
from edgematch.service import Service, ServiceBase
from edgematch.utils import rotate_vector

logger = get_logger(__name__)

DUPLICATE_TOL = 1e-12
ZERO_ROW_TOL = 1e-14


def build_vandermonde(
        presets: t.Any,
        K: int,
        family: MonomialFamily = MonomialFamily.COMPLEX,
        copies: int = 1,
) -> PresetVandermonde:
    """Rows are the monomials of degree 1..K at each normalized location, rotated copies after the originals."""
    presets = np.asarray(presets, dtype=float).reshape(-1, 2)
    if K < 1:
        raise ContractViolationError("degree must be positive", {"K": K})
    locations = copy_points(presets, copies).reshape(-1, 2)
    for a in range(len(locations)):
        distance = np.linalg.norm(locations[a + 1:] - locations[a], axis=1)
        if distance.size and distance.min() <= DUPLICATE_TOL:
            b = a + 1 + int(np.argmin(distance))
            raise DuplicatePresetError("preset locations coincide", {"first": a, "second": b})

    monomials = tuple(monomials_for(family, K))
    return PresetVandermonde(
        locations=locations,
        family=MonomialFamily(family),
        monomials=monomials,
        matrix=monomial_values(locations, monomials),
        copies=copies,
    )


def contribution_tensor(system: PolySystem, Y: PresetVandermonde) -> np.ndarray:
    """G[e, i, m]: equation e's term when piece i sits at candidate m = kappa * N + c."""
    r, cells = Y.copies, Y.n_cells
    if system.copies != r:
        raise ContractViolationError("system and Vandermonde disagree on copies", {"system": system.copies, "Y": r})
    G = np.zeros((len(system.equations), system.n_pieces, r * cells), dtype=complex)
    for e, equation in enumerate(system.equations):
        values = Y.matrix[:, Y.column(equation.monomial)].reshape(r, cells)
        # shifted[rho, kappa, c] = values[(kappa + rho) % r, c]
        shifted = np.stack([np.roll(values, -rho, axis=0) for rho in range(r)])
        G[e] = np.einsum("ip,pkc->ikc", equation.coeffs, shifted).reshape(system.n_pieces, -1)
    return G


def relaxation_constraints(system: PolySystem, Y: PresetVandermonde) -> t.Tuple[np.ndarray, np.ndarray]:
    """Selection constraints (every piece one candidate, every cell one piece) plus the puzzle rows."""
    n, r, cells = system.n_pieces, Y.copies, Y.n_cells
    if cells != n:
        raise ContractViolationError("need one preset location per piece", {"pieces": n, "locations": cells})
    width = r * cells
    pieces = np.kron(np.eye(n), np.ones((1, width)))
    cell_rows = np.tile(np.tile(np.eye(cells), (1, r)), (1, n))

    rows = [pieces, cell_rows]
    rhs = [np.ones(n), np.ones(cells)]
    G = contribution_tensor(system, Y).reshape(len(system.equations), -1)
    constants = system.constants()
    for part in (np.real, np.imag):
        block, target = part(G), -part(constants)
        scale = np.maximum(np.abs(block).max(axis=1, initial=0.0), np.abs(target))
        live = scale > ZERO_ROW_TOL
        rows.append(block[live] / scale[live, None])
        rhs.append(target[live] / scale[live])
    return np.vstack(rows), np.concatenate(rhs)


def lp_iterate(
        system: PolySystem,
        Y: PresetVandermonde,
        P_prev: np.ndarray,
        constraints: t.Optional[t.Tuple[np.ndarray, np.ndarray]] = None,
        **kernel_options,
) -> t.Tuple[np.ndarray, float]:
    """maximize <P_prev, P> over the relaxed selection polytope cut by the puzzle equations."""
    A, b = constraints if constraints is not None else relaxation_constraints(system, Y)
    shape = (system.n_pieces, Y.copies * Y.n_cells)
    P_prev = np.asarray(P_prev, dtype=float)
    if P_prev.shape != shape:
        raise ContractViolationError("previous iterate has the wrong shape", {"expected": list(shape)})

    report = solve_lp(LinearProgram(objective=-P_prev.reshape(-1), equality_matrix=A, equality_rhs=b),
                      **kernel_options)
    if report.status == SolveStatus.INFEASIBLE:
        raise InfeasibleRepresentationError(
            "representation excludes all placements",
            {"message": report.message, "degrees_capped": system.capped}
        )
    if not report.is_optimal:
        raise SolverFailureError("linear program did not reach optimality",
                                 {"status": report.status.value, "message": report.message})
    return report.primal.reshape(shape), -report.objective


def _snap(P: np.ndarray, tol: float) -> t.Optional[np.ndarray]:
    if np.all((np.abs(P) <= tol) | (np.abs(P - 1.0) <= tol)):
        selection = np.argmax(P, axis=1)
        if np.all(np.abs(P[np.arange(len(P)), selection] - 1.0) <= tol):
            return selection
    return None


def round_to_permutation(
        P: np.ndarray,
        tol: float = 1e-6,
        accept: t.Optional[t.Callable[[t.Tuple[int, ...]], bool]] = None,
        copies: int = 1,
) -> t.Optional[t.Tuple[int, ...]]:
    """Candidate column per piece; an assignment that is not exactly 0/1 is kept only if `accept` approves it."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    snapped = _snap(P, tol)
    if snapped is not None:
        cells = snapped % n
        if len(set(cells.tolist())) == n:
            return tuple(int(m) for m in snapped)

    by_copy = P.reshape(n, copies, -1)
    cells = max_assignment(by_copy.max(axis=1))
    kappas = np.argmax(by_copy[np.arange(n), :, cells], axis=1)
    selection = tuple(int(kappa * by_copy.shape[2] + c) for kappa, c in zip(kappas, cells))
    if accept is not None and accept(selection):
        return selection
    return None


def _selection_direction(n: int, copies: int, rng: np.random.Generator, samples: int = 4) -> np.ndarray:
    direction = np.zeros((n, copies * n))
    for _ in range(samples):
        cells = rng.permutation(n)
        kappas = rng.integers(0, copies, size=n)
        direction[np.arange(n), kappas * n + cells] += 1.0 / samples
    return direction


def _stalled(state: RelaxLPState, window: int, improvement: float) -> bool:
    segment = state.segments()[-1] if state.objective_history else []
    if len(segment) < window + 1:
        return False
    recent = segment[-(window + 1):]
    return all(later - earlier < improvement for earlier, later in zip(recent, recent[1:]))


def candidate_locations(puzzle: Puzzle) -> t.List[t.Tuple[float, float]]:
    """Puzzle-coordinate candidates: cell c under copy kappa at index kappa * N + c."""
    presets = list(puzzle.preset_locations)
    return [
        rotate_vector(s, Fraction(kappa, puzzle.copies)) if kappa else tuple(s)
        for kappa in range(puzzle.copies)
        for s in presets
    ]


def solve_preset(puzzle: Puzzle, opts: t.Optional[PresetOptions] = None) -> t.Tuple[t.Optional[Placement], RelaxLPState]:
    opts = opts or preset_solver.options()
    if puzzle.preset_locations is None:
        raise ContractViolationError("puzzle has no preset locations", {})
    n, copies = puzzle.n_pieces, puzzle.copies
    state = RelaxLPState(n_pieces=n, copies=copies)
    if n == 0:
        state.status = LPStatus.PERMUTATION_FOUND
        state.selection = ()
        return Placement(translations=(), assignment=()), state

    system = assemble_system(puzzle, family=opts.family, mode=opts.mode, degree_cap=opts.degree_cap)
    presets = system.normalization.apply_many(np.asarray(puzzle.preset_locations, dtype=float))
    Y = build_vandermonde(presets, max(system.max_degree, 1), opts.family, copies=copies)
    constraints = relaxation_constraints(system, Y)
    state.n_equations = len(system.equations)
    state.degree_capped = system.capped
    candidates = candidate_locations(puzzle)

    def decode(selection: t.Sequence[int]) -> Placement:
        return Placement(
            translations=tuple(candidates[m] for m in selection),
            assignment=tuple(m % n for m in selection),
        )

    def accept(selection: t.Sequence[int]) -> bool:
        return validate_solution(puzzle, decode(selection), opts.validation_tol).is_valid

    rng = np.random.default_rng(opts.seed)
    P_prev = np.zeros((n, copies * n))
    logger.info("preset LP: %d pieces, %d copies, %d constraint rows", n, copies, len(constraints[1]))
    for iteration in range(opts.max_iter):
        P, objective = lp_iterate(system, Y, P_prev, constraints=constraints, **opts.kernel_options())
        state.record(P, objective)
        logger.info("lp iteration %d: objective %.9g", iteration, objective)

        selection = round_to_permutation(P, opts.tol_round, accept=accept, copies=copies)
        if selection is not None and accept(selection):
            state.status = LPStatus.PERMUTATION_FOUND
            state.selection = selection
            return decode(selection), state

        if _stalled(state, opts.stall_window, opts.stall_improvement):
            if state.perturbations:
                state.status = LPStatus.STALLED
                logger.info("lp stalled after %d iterations", state.iteration)
                return None, state
            state.perturbations.append(iteration)
            logger.info("lp stalled at iteration %d, perturbing the objective", iteration)
            P_prev = P + opts.perturbation * _selection_direction(n, copies, rng)
            continue
        P_prev = P

    state.status = LPStatus.MAX_ITER
    return None, state


def solve_rotated(
        puzzle: Puzzle,
        r: t.Optional[int] = None,
        opts: t.Optional[PresetOptions] = None,
) -> t.Tuple[t.Optional[Placement], RelaxLPState]:
    """Preset solve over rotated frame copies, mapped back to translations and orientations."""
    r = puzzle.rotation_order if r is None else r
    if r == 1:
        return solve_preset(puzzle, opts)
    opts = opts or preset_solver.options()
    augmented = augment_rotations(puzzle, r)
    linked, state = solve_preset(augmented, opts)
    if linked is None:
        return None, state

    presets = puzzle.preset_locations
    translations, orientations = [], []
    for translation, cell in zip(linked.translations, linked.assignment):
        turn, point = recover_orientation(translation, puzzle.frame, r, tol=opts.validation_tol)
        snapped = presets[cell]
        if np.hypot(point[0] - snapped[0], point[1] - snapped[1]) <= opts.validation_tol:
            point = tuple(snapped)
        translations.append(point)
        orientations.append(turn)
    placement = Placement(translations=tuple(translations), orientations=tuple(orientations),
                          assignment=linked.assignment)
    report = validate_solution(puzzle, placement, opts.validation_tol)
    if not report.is_valid:
        logger.warning("recovered placement fails validation: %d unmatched edges", len(report.unmatched_edges))
        return None, state
    return placement, state


class PresetSolverServiceBase(ServiceBase):
    config: t.Any

    async def configuration(self, config):
        self.config = config


class PresetSolverService(PresetSolverServiceBase):

    def options(self, **overrides) -> PresetOptions:
        if self.config is None:
            return PresetOptions(**{key: value for key, value in overrides.items() if value is not None})
        return PresetOptions.from_config(self.config, **overrides)

    def solve(self, puzzle: Puzzle, rotations: t.Optional[int] = None,
              **overrides) -> t.Tuple[t.Optional[Placement], RelaxLPState]:
        return solve_rotated(puzzle, rotations, self.options(**overrides))


preset_solver = Service.add_service(PresetSolverService)
