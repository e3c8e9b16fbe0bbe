"""Exact small dense linear algebra over the rationals.

Everything here is an equality decision, never a tolerance: rank, right
nullspace, and constrained solves of the overdetermined exponent systems the
rule catalog produces.  Infeasible systems come with a certificate, a left
null vector y of the matrix with y . r != 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def as_matrix(rows) -> Mat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def as_vector(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column list)."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(m: Mat) -> int:
    if not m or not m[0]:
        return 0
    rows = [list(row) for row in m]
    _, pivots = _rref(rows)
    return len(pivots)


def nullspace(m: Mat) -> list[Vec]:
    """Basis of the right nullspace, each vector scaled so its first nonzero
    component is 1."""
    if not m:
        return []
    ncols = len(m[0])
    rows = [list(row) for row in m]
    rows, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[Vec] = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(_normalize(tuple(v)))
    return basis


def _normalize(v: Vec) -> Vec:
    lead = next((x for x in v if x != 0), None)
    if lead is None or lead == 1:
        return v
    return tuple(x / lead for x in v)


@dataclass
class SolveOutcome:
    """Result of an exact constrained solve of m @ l = r."""

    status: str  # "unique" | "underdetermined" | "infeasible"
    solution: Optional[Vec] = None
    basis: list[Vec] = field(default_factory=list)
    certificate: Optional[Vec] = None  # y with y@m = 0 and y.r != 0


def solve_constrained(m: Mat, r) -> SolveOutcome:
    """Solve m @ l = r exactly.

    Consistent + full column rank -> unique solution; consistent but rank
    deficient -> particular solution plus nullspace basis; inconsistent ->
    infeasible with a left-null certificate extracted from the row operations.
    """
    rvec = as_vector(r)
    nrows = len(m)
    if len(rvec) != nrows:
        raise ValueError(f"rhs length {len(rvec)} != rows {nrows}")
    ncols = len(m[0]) if nrows else 0
    # Track row operations by augmenting with the identity: [m | r | I].
    rows = [
        list(m[i]) + [rvec[i]] + [Fraction(int(i == j)) for j in range(nrows)]
        for i in range(nrows)
    ]
    work = [row[:] for row in rows]
    # Eliminate on the first ncols columns only.
    nall = ncols + 1 + nrows
    pivots: list[int] = []
    rr = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(rr, nrows) if work[i][c] != 0), None)
        if pivot_row is None:
            continue
        work[rr], work[pivot_row] = work[pivot_row], work[rr]
        pv = work[rr][c]
        work[rr] = [x / pv for x in work[rr]]
        for i in range(nrows):
            if i != rr and work[i][c] != 0:
                factor = work[i][c]
                work[i] = [a - factor * b for a, b in zip(work[i], work[rr])]
        pivots.append(c)
        rr += 1
        if rr == nrows:
            break
    # Inconsistency: a zero row of the matrix part with nonzero rhs.
    for i in range(rr, nrows):
        if work[i][ncols] != 0:
            y = tuple(work[i][ncols + 1 : nall])
            return SolveOutcome(status="infeasible", certificate=_normalize(y))
    sol = [Fraction(0)] * ncols
    for k, pc in enumerate(pivots):
        sol[pc] = work[k][ncols]
    basis = nullspace(m) if len(pivots) < ncols else []
    status = "unique" if len(pivots) == ncols else "underdetermined"
    return SolveOutcome(status=status, solution=tuple(sol), basis=basis)


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def vec_dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))
