import typing as t

import numpy as np

from edgematch.algebra.model import MonomialFamily, PolySystem
from edgematch.algebra.service import assemble_system, completeness_degrees
from edgematch.exceptions import ContractViolationError, ExtractionFailureError, SolverFailureError
from edgematch.geometry.model import AffineTransform, Placement, Puzzle
from edgematch.geometry.service import validate_solution
from edgematch.kernels import (
    BlockKind,
    BlockSDP,
    SDPBlock,
    SDPConstraint,
    SolveStatus,
    solve_block_sdp,
    sym_eig,
)
from edgematch.log import get_logger
from edgematch.sdp.model import MomentOptions, MomentStructure, RelaxSDPState, SDPStatus
from edgematch.service import Service, ServiceBase

logger = get_logger(__name__)

ZERO_TOL = 1e-14
SQUARE_MOMENT_TOL = 1e-6


def build_moment_structure(K: int, dimension: int = 2) -> MomentStructure:
    if K < 1:
        raise ContractViolationError("moment degree must be positive", {"K": K})
    if dimension not in (1, 2):
        raise ContractViolationError("moment structures exist for dimension 1 or 2", {"dimension": dimension})
    if dimension == 1:
        basis = [(k,) for k in range(K + 1)]
    else:
        basis = [(0, 0)] + [(k, 0) for k in range(1, K + 1)] + [(0, k) for k in range(1, K + 1)]

    n = len(basis)
    monomials: t.List[t.Tuple[int, ...]] = []
    positions: t.Dict[t.Tuple[int, ...], t.List[t.Tuple[int, int]]] = {}
    index_map = np.zeros((n, n), dtype=int)
    for a in range(n):
        for b in range(a, n):
            exponent = tuple(x + y for x, y in zip(basis[a], basis[b]))
            if exponent not in positions:
                monomials.append(exponent)
                positions[exponent] = []
            positions[exponent].append((a, b))
            index_map[a, b] = index_map[b, a] = monomials.index(exponent)
    groups = tuple(
        tuple(positions[m] + [(b, a) for a, b in positions[m] if a != b])
        for m in monomials
    )
    return MomentStructure(
        K=K, dimension=dimension, basis=tuple(basis), index_map=index_map,
        monomials=tuple(monomials), groups=groups,
    )


def _entry(n: int, position: t.Tuple[int, int]) -> np.ndarray:
    """Symmetric coefficient with <E, Z> = Z[a, b]."""
    a, b = position
    E = np.zeros((n, n))
    if a == b:
        E[a, a] = 1.0
    else:
        E[a, b] = E[b, a] = 0.5
    return E


def moment_constraints(system: PolySystem, structure: MomentStructure) -> t.Tuple[SDPConstraint, ...]:
    """Blocks 0..N-1 are the moment matrices, N..2N-1 the non-negative copies of their moments."""
    if system.family != MonomialFamily.REAL:
        raise ContractViolationError("moment pipeline needs the real monomial family", {"family": system.family.value})
    if system.copies != 1:
        raise ContractViolationError("moment pipeline does not take linked rotation copies", {"copies": system.copies})
    n, N = structure.size, system.n_pieces
    moments = [m for m in structure.monomials if any(m)]
    constraints: t.List[SDPConstraint] = []
    for i in range(N):
        constraints.append(SDPConstraint(coefficients={i: _entry(n, (0, 0))}, rhs=1.0))
        for first, other in structure.equalities():
            constraints.append(SDPConstraint(coefficients={i: _entry(n, other) - _entry(n, first)}, rhs=0.0))
        for j, exponent in enumerate(moments):
            link = np.zeros(len(moments))
            link[j] = 1.0
            constraints.append(SDPConstraint(
                coefficients={i: -_entry(n, structure.position(exponent)), N + i: link}, rhs=0.0
            ))

    for equation in system.equations:
        exponent = tuple(equation.monomial.degree)
        if exponent not in structure.monomials:
            raise ContractViolationError("equation degree exceeds the moment structure",
                                         {"monomial": equation.monomial.label(), "K": structure.K})
        E = _entry(n, structure.position(exponent))
        coefficients = {
            i: float(equation.coeffs[i, 0].real) * E
            for i in range(N)
            if abs(equation.coeffs[i, 0]) > ZERO_TOL
        }
        rhs = -float(equation.constant.real)
        if not coefficients and abs(rhs) <= ZERO_TOL:
            continue
        constraints.append(SDPConstraint(coefficients=coefficients, rhs=rhs))
    return tuple(constraints)


def sdp_iterate(
        system: PolySystem,
        structure: MomentStructure,
        W: t.Sequence[np.ndarray],
        constraints: t.Optional[t.Tuple[SDPConstraint, ...]] = None,
        **kernel_options,
) -> t.Tuple[t.List[np.ndarray], float]:
    """minimize sum_i <W_i, Z_i> over structured, non-negative moment matrices satisfying the puzzle equations."""
    if constraints is None:
        constraints = moment_constraints(system, structure)
    N, n = system.n_pieces, structure.size
    moments = sum(1 for m in structure.monomials if any(m))
    blocks = tuple(SDPBlock(kind=BlockKind.SEMIDEFINITE, dimension=n, cost=np.asarray(W_i, dtype=float))
                   for W_i in W)
    blocks += tuple(SDPBlock(kind=BlockKind.NONNEGATIVE, dimension=moments, cost=np.zeros(moments))
                    for _ in range(N))
    report = solve_block_sdp(BlockSDP(blocks=blocks, constraints=constraints), **kernel_options)
    if report.status == SolveStatus.MAX_ITER:
        logger.warning("moment SDP stopped at the iteration limit, residuals %s", report.residuals)
    elif not report.is_optimal:
        raise SolverFailureError("moment SDP failed",
                                 {"status": report.status.value, "message": report.message})
    Z = [(block + block.T) / 2.0 for block in report.primal[:N]]
    return Z, report.objective


def update_weights(Z: t.Sequence[np.ndarray]) -> t.List[np.ndarray]:
    """I - v v^T for the top eigenvector v of each block."""
    weights = []
    for Z_i in Z:
        _, V = sym_eig(Z_i)
        top = V[:, 0]
        weights.append(np.eye(len(Z_i)) - np.outer(top, top))
    return weights


def _first_moments(Z_i: np.ndarray, structure: MomentStructure) -> np.ndarray:
    units = [tuple(1 if d == axis else 0 for d in range(structure.dimension)) for axis in range(structure.dimension)]
    return np.array([Z_i[structure.position(u)] / Z_i[0, 0] for u in units])


def extract_locations(
        Z: t.Sequence[np.ndarray],
        structure: MomentStructure,
        normalization: AffineTransform = AffineTransform(),
        rank_gap: t.Optional[float] = 1e-4,
) -> Placement:
    """Reads T_i off the first-order moments and maps t_i = log T_i back to puzzle coordinates."""
    gaps = []
    for Z_i in Z:
        values, _ = sym_eig(Z_i)
        gaps.append(float(values[1] / values[0]) if values[0] > 0 else float("inf"))
    if rank_gap is not None and any(gap > rank_gap for gap in gaps):
        raise ExtractionFailureError("moment matrices are not rank one", {"rank_gaps": gaps, "threshold": rank_gap})

    inverse = normalization.inverse()
    translations = []
    for i, Z_i in enumerate(Z):
        if Z_i[0, 0] <= 0:
            raise ExtractionFailureError("moment matrix has a non-positive corner", {"block": i})
        T = _first_moments(Z_i, structure)
        if np.any(T <= 0):
            raise ExtractionFailureError("first-order moments are not positive", {"block": i, "T": T.tolist()})
        if structure.K >= 2:
            for axis, value in enumerate(T):
                square = tuple(2 if d == axis else 0 for d in range(structure.dimension))
                deviation = abs(Z_i[structure.position(square)] / Z_i[0, 0] - value ** 2) / value ** 2
                if deviation > SQUARE_MOMENT_TOL:
                    logger.warning("block %d: second moment departs from the squared first moment by %.2e",
                                   i, deviation)
        point = np.log(T)
        normalized = (float(point[0]), float(point[1]) if structure.dimension > 1 else 0.0)
        translations.append(inverse.apply(normalized))
    return Placement(translations=tuple(translations))


def solve_sdp_pipeline(
        puzzle: Puzzle,
        opts: t.Optional[MomentOptions] = None,
) -> t.Tuple[t.Optional[Placement], RelaxSDPState]:
    opts = opts or moment_solver.options()
    if puzzle.is_linked or puzzle.rotation_order > 1:
        raise ContractViolationError(
            "moment pipeline solves translation-only puzzles",
            {"copies": puzzle.copies, "rotation_order": puzzle.rotation_order}
        )
    N = puzzle.n_pieces
    state = RelaxSDPState(n_pieces=N, K=opts.degree)
    if N == 0:
        state.status = SDPStatus.CONVERGED
        return Placement(translations=()), state

    structure = build_moment_structure(opts.degree, 2)
    degrees = {key: opts.degree for key in completeness_degrees(puzzle)}
    system = assemble_system(puzzle, degrees, family=MonomialFamily.REAL, mode=opts.mode, degree_cap=opts.degree)
    constraints = moment_constraints(system, structure)
    epsilon = opts.epsilon_per_piece * N
    logger.info("moment SDP: %d pieces, K=%d, %d constraints", N, opts.degree, len(constraints))

    W = [np.zeros((structure.size, structure.size)) for _ in range(N)]
    Z: t.List[np.ndarray] = []
    for iteration in range(opts.max_iter):
        Z, sdp_objective = sdp_iterate(system, structure, W, constraints=constraints, **opts.kernel_options())
        W = update_weights(Z)
        objective = float(sum(np.sum(W_i * Z_i) for W_i, Z_i in zip(W, Z)))
        eigenvalues = [sym_eig(Z_i)[0] for Z_i in Z]
        try:
            snapshot = extract_locations(Z, structure, system.normalization, rank_gap=None).translations
        except ExtractionFailureError:
            snapshot = ()
        state.record(Z, W, objective, sdp_objective, eigenvalues, snapshot)
        logger.info("sdp iteration %d: rank objective %.6e", iteration, objective)
        if objective <= epsilon:
            break
    else:
        state.status = SDPStatus.MAX_ITER
        logger.info("moment SDP did not reach rank one, final gaps %s", state.rank_gaps)
        return None, state

    try:
        placement = extract_locations(Z, structure, system.normalization, opts.rank_gap)
    except ExtractionFailureError as e:
        state.status = SDPStatus.EXTRACTION_FAILED
        logger.warning("extraction failed: %s", e.message)
        return None, state

    report = validate_solution(puzzle, placement, opts.position_tolerance)
    if not report.is_valid:
        state.status = SDPStatus.INVALID
        logger.warning("extracted placement fails validation: %d unmatched edges", len(report.unmatched_edges))
        return None, state
    state.status = SDPStatus.CONVERGED
    return placement, state


class MomentSolverServiceBase(ServiceBase):
    config: t.Any

    async def configuration(self, config):
        self.config = config


class MomentSolverService(MomentSolverServiceBase):

    def options(self, **overrides) -> MomentOptions:
        if self.config is None:
            return MomentOptions(**{key: value for key, value in overrides.items() if value is not None})
        return MomentOptions.from_config(self.config, **overrides)

    def solve(self, puzzle: Puzzle, **overrides) -> t.Tuple[t.Optional[Placement], RelaxSDPState]:
        return solve_sdp_pipeline(puzzle, self.options(**overrides))


moment_solver = Service.add_service(MomentSolverService)
