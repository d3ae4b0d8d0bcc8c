import typing as t
from fractions import Fraction

import numpy as np
from scipy.special import exprel

from edgematch.algebra.model import (
    EvalMode,
    LinearEquation,
    Monomial,
    MonomialFamily,
    PolyEquation,
    PolySystem,
)
from edgematch.exceptions import ContractViolationError
from edgematch.geometry.model import AffineTransform, EdgeElement, Placement, Puzzle, TypeKey
from edgematch.geometry.service import (
    canonical_edge_type,
    check_solvable,
    edge_type_counts,
    normalize_coordinates,
)
from edgematch.log import get_logger
from edgematch.utils import rotation_matrix

logger = get_logger(__name__)

DEGREE_CAP = 12


def monomials_for(family: MonomialFamily, K: int) -> t.List[Monomial]:
    """Complex powers 1..K, or real multi-indices by total degree then descending k_x."""
    family = MonomialFamily(family)
    if family == MonomialFamily.COMPLEX:
        return [Monomial(family=family, degree=(k,)) for k in range(1, K + 1)]
    return [
        Monomial(family=family, degree=(kx, total - kx))
        for total in range(1, K + 1)
        for kx in range(total, -1, -1)
    ]


def _exponents(monomials: t.Sequence[Monomial]) -> np.ndarray:
    return np.array([m.degree for m in monomials], dtype=float).reshape(len(monomials), -1)


def monomial_values(points: t.Any, monomials: t.Sequence[Monomial]) -> np.ndarray:
    """(M, E) values of each monomial at T = e^p for every point p."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    values = np.empty((len(points), len(monomials)), dtype=complex)
    complex_cols = [e for e, m in enumerate(monomials) if m.family == MonomialFamily.COMPLEX]
    real_cols = [e for e, m in enumerate(monomials) if m.family == MonomialFamily.REAL]
    if complex_cols:
        ks = _exponents([monomials[e] for e in complex_cols])[:, 0]
        z = points[:, 0] + 1j * points[:, 1]
        values[:, complex_cols] = np.exp(np.outer(z, ks))
    if real_cols:
        degrees = _exponents([monomials[e] for e in real_cols])
        values[:, real_cols] = np.exp(points @ degrees.T)
    return values


def edge_coefficients(edge: EdgeElement, monomials: t.Sequence[Monomial], mode: EvalMode) -> np.ndarray:
    """Point value at the edge midpoint, or the arc-length integral of the monomial along the edge."""
    if EvalMode(mode) == EvalMode.POINT:
        return monomial_values([edge.offset], monomials)[0]

    a = np.asarray(edge.endpoints[0], dtype=float)
    d = np.asarray(edge.endpoints[1], dtype=float) - a
    length = float(np.hypot(*d))
    values = np.empty(len(monomials), dtype=complex)
    for e, monomial in enumerate(monomials):
        if monomial.family == MonomialFamily.COMPLEX:
            k = monomial.degree[0]
            w = k * complex(d[0], d[1])
            ratio = 1.0 if w == 0 else np.expm1(w) / w
            values[e] = length * np.exp(k * complex(a[0], a[1])) * ratio
        else:
            degree = np.asarray(monomial.degree, dtype=float)
            values[e] = length * np.exp(degree @ a) * exprel(degree @ d)
    return values


def edge_coefficient(edge: EdgeElement, monomial: Monomial, mode: EvalMode = EvalMode.POINT) -> complex:
    return complex(edge_coefficients(edge, [monomial], mode)[0])


def edge_coefficient_nd(offset: t.Sequence[float], k: t.Sequence[int]) -> float:
    """e^{k . b} for d-dimensional offsets; no solver consumes these."""
    if len(offset) != len(k):
        raise ContractViolationError("offset and multi-index differ in dimension", {"d": len(offset), "k": len(k)})
    return float(np.exp(np.dot(np.asarray(k, dtype=float), np.asarray(offset, dtype=float))))


def completeness_degrees(puzzle: Puzzle) -> t.Dict[TypeKey, int]:
    if not puzzle.pieces:
        return {}
    return {key: max(plus, minus) for key, (plus, minus) in edge_type_counts(puzzle).items()}


def assemble_system(
        puzzle: Puzzle,
        degrees: t.Optional[t.Dict[TypeKey, int]] = None,
        family: MonomialFamily = MonomialFamily.COMPLEX,
        mode: EvalMode = EvalMode.POINT,
        degree_cap: int = DEGREE_CAP,
) -> PolySystem:
    check_solvable(puzzle)
    family, mode = MonomialFamily(family), EvalMode(mode)
    work, transform = normalize_coordinates(puzzle) if puzzle.pieces else (puzzle, AffineTransform())
    if degrees is None:
        degrees = completeness_degrees(puzzle)
    if any(K < 1 for K in degrees.values()):
        raise ContractViolationError("degrees must be positive", {"degrees": {str(k): v for k, v in degrees.items()}})

    capped = {key: K for key, K in degrees.items() if K > degree_cap}
    if capped:
        logger.warning(
            "possibly incomplete representation: %d edge types capped at degree %d (max requested %d)",
            len(capped), degree_cap, max(capped.values())
        )
    degrees = {key: min(K, degree_cap) for key, K in sorted(degrees.items())}

    n, copies = work.n_pieces, work.copies
    # signed edges per type: (piece index or -1 for the frame, edge, sign)
    by_type: t.Dict[TypeKey, t.List[t.Tuple[int, EdgeElement, int]]] = {}
    for j, edge in enumerate(work.frame.edges):
        key, sign = canonical_edge_type(edge)
        by_type.setdefault(key, []).append((-1, edge, sign))
    for i, piece in enumerate(work.pieces):
        for edge in piece.edges:
            key, sign = canonical_edge_type(edge)
            by_type.setdefault(key, []).append((i, edge, sign))

    equations = []
    for key, K in degrees.items():
        monomials = monomials_for(family, K)
        coeffs = np.zeros((len(monomials), n, copies), dtype=complex)
        constant = np.zeros(len(monomials), dtype=complex)
        for owner, edge, sign in by_type.get(key, []):
            values = sign * edge_coefficients(edge, monomials, mode)
            if owner < 0:
                constant += values
            else:
                coeffs[:, owner, edge.copy_index] += values
        for e, monomial in enumerate(monomials):
            scale = max(float(np.abs(coeffs[e]).max(initial=0.0)), abs(constant[e]))
            if scale == 0.0:
                continue
            equations.append(PolyEquation(
                type_key=key,
                monomial=monomial,
                coeffs=coeffs[e] / scale,
                constant=complex(constant[e] / scale),
                scale=scale,
            ))

    logger.debug("assembled %d equations over %d edge types", len(equations), len(degrees))
    return PolySystem(
        equations=tuple(equations),
        normalization=transform,
        degrees=degrees,
        family=family,
        mode=mode,
        n_pieces=n,
        copies=copies,
        capped=bool(capped),
    )


def copy_points(points: np.ndarray, copies: int) -> np.ndarray:
    """(copies, N, 2): every point rotated by rho / copies."""
    return np.stack([points @ rotation_matrix(Fraction(rho, copies)).T for rho in range(copies)])


def residual(system: PolySystem, placement: Placement) -> float:
    """Worst relative equation violation; the placement is given in puzzle coordinates."""
    if len(placement) != system.n_pieces:
        raise ContractViolationError(
            "placement size does not match the system",
            {"pieces": system.n_pieces, "placement": len(placement)}
        )
    if placement.has_rotations:
        raise ContractViolationError("rotated placements need augment_rotations first", {})
    if not system.equations or system.n_pieces == 0:
        return 0.0

    points = system.normalization.apply_many(np.asarray(placement.translations, dtype=float))
    monomials = [equation.monomial for equation in system.equations]
    # values[rho, i, e]
    values = np.stack([monomial_values(p, monomials) for p in copy_points(points, system.copies)])
    terms = system.coefficient_tensor() * np.transpose(values, (2, 1, 0))
    totals = terms.sum(axis=(1, 2)) + system.constants()
    magnitudes = np.abs(terms).sum(axis=(1, 2))
    return float(np.max(np.abs(totals) / (1.0 + magnitudes)))


def linear_representation(puzzle: Puzzle) -> t.List[LinearEquation]:
    check_solvable(puzzle)
    n, copies = puzzle.n_pieces, puzzle.copies
    turns = [rotation_matrix(Fraction(rho, copies)) for rho in range(copies)]
    rows: t.Dict[TypeKey, t.List[np.ndarray]] = {}

    def row(key):
        if key not in rows:
            rows[key] = [np.zeros((n, 2, 2)), np.zeros(2)]
        return rows[key]

    for edge in puzzle.frame.edges:
        key, sign = canonical_edge_type(edge)
        row(key)[1] += sign * np.asarray(edge.offset)
    for i, piece in enumerate(puzzle.pieces):
        for edge in piece.edges:
            key, sign = canonical_edge_type(edge)
            coeffs, constant = row(key)
            coeffs[i] += sign * turns[edge.copy_index]
            constant += sign * np.asarray(edge.offset)
    return [
        LinearEquation(type_key=key, coeffs=coeffs, constant=constant)
        for key, (coeffs, constant) in sorted(rows.items())
    ]


def linear_matrix(equations: t.Sequence[LinearEquation]) -> t.Tuple[np.ndarray, np.ndarray]:
    """A, b with A @ [t1x, t1y, t2x, ...] = b."""
    if not equations:
        return np.zeros((0, 0)), np.zeros(0)
    blocks = [np.transpose(eq.coeffs, (1, 0, 2)).reshape(2, -1) for eq in equations]
    return np.vstack(blocks), -np.concatenate([eq.constant for eq in equations])


def export_system(system: PolySystem) -> str:
    lines = [
        f"# family={system.family.value} mode={system.mode.value} pieces={system.n_pieces} copies={system.copies}",
        "# color orientation degree re(a0) im(a0) re(a1) im(a1) ...",
    ]
    for equation in system.equations:
        key = equation.type_key
        numbers = [equation.constant] + list(equation.coeffs.reshape(-1))
        values = " ".join(f"{z.real:.17g} {z.imag:.17g}" for z in numbers)
        lines.append(
            f"{key.color} {key.orientation.numerator}/{key.orientation.denominator} "
            f"{equation.monomial.label()} {values}"
        )
    return "\n".join(lines) + "\n"
