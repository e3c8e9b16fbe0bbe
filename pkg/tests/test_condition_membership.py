"""Exact implication check: the condition system derived from scratch by the
symbolic oracle, specialized to a rule's Ansatz parameters and constant-term
pattern, must lie in the rational-linear span of the rule's stored residuals.

This is checkable in closed form for rules whose parameters and exponents are
fixed rationals (the solve-based rules are covered operationally by the
on-manifold soundness suites instead).
"""

from fractions import Fraction

import pytest

from lvfi.linalg import as_matrix, solve_constrained
from lvfi.oracle import AnsatzSpec, derive_conditions
from lvfi.poly import SymPoly

F = Fraction
S = SymPoly.sym

A = {(i, j): S(f"a{i}{j}") for i in (1, 2, 3) for j in (1, 2, 3)}
B = {i: S(f"b{i}") for i in (1, 2, 3)}
E = {i: S(f"e{i}") for i in (1, 2, 3)}
TWO = SymPoly.const(2)

# rule -> (ansatz kind, (alpha, beta, gamma), (l1, l2, l3), zero e's,
#          stored residual polynomials)
CASES = {
    "L2-i": (
        "3d-t1",
        (1, 0, 0),
        (1, 1, 1),
        (),
        [B[1] + B[2], TWO * A[1, 1] + A[2, 1], TWO * A[2, 2] + A[1, 2], A[1, 3], A[2, 3]],
    ),
    "L3-1": (
        "3d-t2",
        (1, 0, 0),
        (1, 1, 0),
        (3,),
        [B[1] + B[2], TWO * A[1, 1] + A[2, 1], A[1, 2] + TWO * A[2, 2], A[1, 3], A[2, 3]],
    ),
    "L3-2": (
        "3d-t2",
        (1, 1, -1),
        (1, 1, 1),
        (3,),
        [
            B[1] + B[3],
            B[2] + B[3],
            A[1, 1] - A[2, 1],
            A[2, 1] + A[3, 1],
            A[1, 2] - A[2, 2],
            A[2, 2] + A[3, 2],
            A[1, 3] + A[2, 3] + TWO * A[3, 3],
        ],
    ),
    "L4-2": (
        "3d-t2",
        (1, 0, -1),
        (1, 0, 0),
        (2, 3),
        [
            B[2],
            A[2, 1],
            A[2, 2],
            B[1] + B[3],
            A[1, 1] + A[3, 1],
            A[1, 2] + A[3, 2],
            A[1, 3] + A[3, 3],
        ],
    ),
    "L4-5": (
        "3d-t2",
        (1, -1, -1),
        (1, 0, 0),
        (2, 3),
        [
            B[1] + B[2],
            B[1] + B[3],
            A[1, 1] + A[2, 1],
            A[1, 1] + A[3, 1],
            A[1, 2] + A[2, 2],
            A[1, 3] + A[3, 3],
        ],
    ),
    "L5-4": (
        "3d-t2",
        (1, -1, 1),
        (-1, 0, 0),
        (1, 2, 3),
        [B[1] - B[2], B[1] - B[3], A[1, 2] - A[2, 2], A[1, 3] - A[3, 3]],
    ),
}


def _in_linear_span(target: SymPoly, basis: list[SymPoly]) -> bool:
    monomials = sorted(
        {m for p in basis for m in p.terms} | set(target.terms)
    )
    cols = [[p.terms.get(m, F(0)) for m in monomials] for p in basis]
    rows = as_matrix(list(zip(*cols))) if cols else as_matrix([[F(0)]] * len(monomials))
    rhs = [target.terms.get(m, F(0)) for m in monomials]
    out = solve_constrained(rows, rhs)
    return out.status in ("unique", "underdetermined")


@pytest.mark.parametrize("rule_id", sorted(CASES))
def test_specialized_conditions_lie_in_residual_span(rule_id):
    kind, abg, l, zero_e, stored = CASES[rule_id]
    values = {
        "al": F(abg[0]),
        "be": F(abg[1]),
        "ga": F(abg[2]),
        "l1": F(l[0]),
        "l2": F(l[1]),
        "l3": F(l[2]),
    }
    for i in zero_e:
        values[f"e{i}"] = F(0)
    rows = derive_conditions(AnsatzSpec(kind))
    for row in rows:
        specialized = row.poly.subs_partial(values)
        if not specialized:
            continue
        assert _in_linear_span(specialized, stored), (
            rule_id,
            row.component,
            row.exponents,
            str(specialized),
        )
