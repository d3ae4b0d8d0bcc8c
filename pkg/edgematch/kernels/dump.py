import io

import numpy as np

from edgematch.kernels.model import BlockKind, BlockSDP, LinearProgram


def _number(value: float) -> str:
    return f"{value:>12.5e}"


def dump_lp(lp: LinearProgram, name: str = "EDGEMATCH") -> str:
    """Fixed-column MPS layout; bounds are the default x >= 0 and are not written."""
    out = io.StringIO()
    out.write(f"NAME          {name}\n")
    out.write("ROWS\n N  COST\n")
    for i in range(lp.n_constraints):
        out.write(f" E  R{i + 1}\n")
    out.write("COLUMNS\n")
    for j in range(lp.n_variables):
        column = f"X{j + 1}"
        if lp.objective[j] != 0.0:
            out.write(f"    {column:<8}  {'COST':<8}  {_number(lp.objective[j])}\n")
        for i in np.flatnonzero(lp.equality_matrix[:, j]):
            out.write(f"    {column:<8}  {'R' + str(i + 1):<8}  {_number(lp.equality_matrix[i, j])}\n")
    out.write("RHS\n")
    for i in np.flatnonzero(lp.equality_rhs):
        out.write(f"    {'RHS':<8}  {'R' + str(i + 1):<8}  {_number(lp.equality_rhs[i])}\n")
    out.write("ENDATA\n")
    return out.getvalue()


def dump_sdp(sdp: BlockSDP) -> str:
    """SDPA sparse layout: minimize <C, X> s.t. <A_k, X> = b_k becomes F0 = -C, F_k = A_k, c = b."""
    out = io.StringIO()
    out.write(f"{sdp.n_constraints} = mDIM\n")
    out.write(f"{len(sdp.blocks)} = nBLOCK\n")
    sizes = [block.dimension if block.kind == BlockKind.SEMIDEFINITE else -block.dimension for block in sdp.blocks]
    out.write(" ".join(str(size) for size in sizes) + " = bLOCKsTRUCT\n")
    out.write(" ".join(repr(float(constraint.rhs)) for constraint in sdp.constraints) + "\n")

    def entries(matno: int, blkno: int, kind: BlockKind, matrix: np.ndarray, sign: float):
        if kind == BlockKind.NONNEGATIVE:
            for i in np.flatnonzero(matrix):
                out.write(f"{matno} {blkno} {i + 1} {i + 1} {sign * float(matrix[i])!r}\n")
            return
        rows, cols = np.nonzero(np.triu(matrix))
        for i, j in zip(rows, cols):
            out.write(f"{matno} {blkno} {i + 1} {j + 1} {sign * float(matrix[i, j])!r}\n")

    for b, block in enumerate(sdp.blocks):
        entries(0, b + 1, block.kind, np.asarray(block.cost, dtype=float), -1.0)
    for k, constraint in enumerate(sdp.constraints):
        for b in sorted(constraint.coefficients):
            entries(k + 1, b + 1, sdp.blocks[b].kind, np.asarray(constraint.coefficients[b], dtype=float), 1.0)
    return out.getvalue()
