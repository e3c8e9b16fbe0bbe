"""Core data model: Lotka-Volterra systems with constant terms.

A system is

    dx_i/dt = x_i * (b_i + sum_j a_ij x_j) + e_i,   i = 1..dim,  dim in {2, 3}

with coefficients either all exact rationals or all binary64 floats.  Exactness
matters: every detection decision downstream is an equality test on rationals,
so float systems are lifted to exact rationals (every float is one) before any
rule matching.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Coef = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"


class ModelError(ValueError):
    """Raised for malformed system descriptions."""


def _parse_entry(v) -> tuple[str, Coef]:
    """Classify and convert one JSON value.

    Integers and "p/q" strings are exact rationals; JSON floats and decimal
    strings are binary64.  Returns (kind, value) where kind is "int" for the
    kind-neutral integer case.
    """
    if isinstance(v, bool):
        raise ModelError(f"boolean is not a number: {v!r}")
    if isinstance(v, int):
        return "int", Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ModelError(f"non-finite value: {v!r}")
        return FLOAT, v
    if isinstance(v, str):
        s = v.strip()
        if "/" in s:
            num, _, den = s.partition("/")
            try:
                f = Fraction(int(num), int(den))
            except (ValueError, ZeroDivisionError) as exc:
                raise ModelError(f"malformed rational {v!r}: {exc}") from None
            return RATIONAL, f
        try:
            return RATIONAL, Fraction(int(s))
        except ValueError:
            pass
        try:
            x = float(s)
        except ValueError:
            raise ModelError(f"malformed number {v!r}") from None
        if not math.isfinite(x):
            raise ModelError(f"non-finite value: {v!r}")
        return FLOAT, x
    raise ModelError(f"unsupported number {v!r}")


@dataclass(frozen=True)
class LVSystem:
    """Immutable LV system; b, e are tuples and A a tuple of row tuples."""

    dim: int
    b: tuple[Coef, ...]
    A: tuple[tuple[Coef, ...], ...]
    e: tuple[Coef, ...]
    kind: str

    def row(self, i: int) -> tuple[Coef, ...]:
        return self.A[i]

    def entries(self):
        yield from self.b
        for row in self.A:
            yield from row
        yield from self.e

    def is_rational(self) -> bool:
        return self.kind == RATIONAL


@dataclass(frozen=True)
class Permutation:
    """A bijection on coordinate indices 0..dim-1 stored as an image tuple."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ModelError(f"not a bijection: {self.sigma}")

    @property
    def dim(self) -> int:
        return len(self.sigma)

    def __call__(self, i: int) -> int:
        return self.sigma[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.dim
        for i, j in enumerate(self.sigma):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        return Permutation(tuple(self.sigma[other.sigma[i]] for i in range(self.dim)))

    @staticmethod
    def identity(dim: int) -> "Permutation":
        return Permutation(tuple(range(dim)))

    @staticmethod
    def all(dim: int) -> list["Permutation"]:
        return [Permutation(p) for p in itertools.permutations(range(dim))]


def make_system(b, A, e, kind=RATIONAL) -> LVSystem:
    """Build a validated LVSystem from sequences (no kind coercion)."""
    dim = len(b)
    if dim not in (2, 3):
        raise ModelError(f"dim must be 2 or 3, got {dim}")
    if len(A) != dim or any(len(row) != dim for row in A) or len(e) != dim:
        raise ModelError("dimension mismatch between b, A, e")
    if kind == RATIONAL:
        conv = Fraction
    else:

        def conv(x):
            v = float(x)
            if not math.isfinite(v):
                raise ModelError(f"non-finite value: {x!r}")
            return v

    return LVSystem(
        dim=dim,
        b=tuple(conv(x) for x in b),
        A=tuple(tuple(conv(x) for x in row) for row in A),
        e=tuple(conv(x) for x in e),
        kind=kind,
    )


def parse_system(text: str) -> LVSystem:
    """Parse the JSON description {dim, b, A, e}.

    Kind resolution: "p/q" strings force rational kind, floats force float
    kind, mixing both is an error; plain integers adapt to either.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelError("top-level JSON must be an object")
    for field in ("dim", "b", "A", "e"):
        if field not in doc:
            raise ModelError(f"missing field {field!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim not in (2, 3):
        raise ModelError(f"dim must be 2 or 3, got {dim!r}")
    b, A, e = doc["b"], doc["A"], doc["e"]
    if (
        not isinstance(b, list)
        or not isinstance(e, list)
        or not isinstance(A, list)
        or len(b) != dim
        or len(e) != dim
        or len(A) != dim
        or any(not isinstance(row, list) or len(row) != dim for row in A)
    ):
        raise ModelError("dimension mismatch between dim and b/A/e")

    flat = list(b) + [x for row in A for x in row] + list(e)
    parsed = [_parse_entry(v) for v in flat]
    kinds = {k for k, _ in parsed}
    if RATIONAL in kinds and FLOAT in kinds:
        raise ModelError("mixed rational and float entries are not allowed")
    kind = FLOAT if FLOAT in kinds else RATIONAL
    if kind == FLOAT:
        vals = [float(v) for _, v in parsed]
    else:
        vals = [v for _, v in parsed]
    n = dim
    return LVSystem(
        dim=dim,
        b=tuple(vals[:n]),
        A=tuple(tuple(vals[n + i * n : n + (i + 1) * n]) for i in range(n)),
        e=tuple(vals[n + n * n :]),
        kind=kind,
    )


def _emit(v: Coef):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        return f"{v.numerator}/{v.denominator}"
    return v


def serialize_system(s: LVSystem) -> str:
    """Inverse of parse_system; exact round trip for rational kind."""
    doc = {
        "dim": s.dim,
        "b": [_emit(v) for v in s.b],
        "A": [[_emit(v) for v in row] for row in s.A],
        "e": [_emit(v) for v in s.e],
    }
    return json.dumps(doc)


def permute_system(s: LVSystem, p: Permutation) -> LVSystem:
    """Relabel coordinates: new equation i is old equation sigma(i)."""
    if p.dim != s.dim:
        raise ModelError(f"permutation dim {p.dim} != system dim {s.dim}")
    sg = p.sigma
    return LVSystem(
        dim=s.dim,
        b=tuple(s.b[sg[i]] for i in range(s.dim)),
        A=tuple(tuple(s.A[sg[i]][sg[j]] for j in range(s.dim)) for i in range(s.dim)),
        e=tuple(s.e[sg[i]] for i in range(s.dim)),
        kind=s.kind,
    )


def lift_exact(s: LVSystem) -> LVSystem:
    """Lift a float system to exact rationals (exact: binary64 -> Fraction)."""
    if s.kind == RATIONAL:
        return s
    return LVSystem(
        dim=s.dim,
        b=tuple(Fraction(v) for v in s.b),
        A=tuple(tuple(Fraction(v) for v in row) for row in s.A),
        e=tuple(Fraction(v) for v in s.e),
        kind=RATIONAL,
    )


def to_float(s: LVSystem) -> tuple[LVSystem, bool]:
    """Float version of a system plus a flag marking lossy conversion."""
    lossy = False
    if s.kind == RATIONAL:
        for v in s.entries():
            if Fraction(float(v)) != v:
                lossy = True
                break
    return (
        LVSystem(
            dim=s.dim,
            b=tuple(float(v) for v in s.b),
            A=tuple(tuple(float(v) for v in row) for row in s.A),
            e=tuple(float(v) for v in s.e),
            kind=FLOAT,
        ),
        lossy,
    )


def rhs_floats(s: LVSystem):
    """Vector field as a fast float callable f(x) -> list[float]."""
    b = [float(v) for v in s.b]
    A = [[float(v) for v in row] for row in s.A]
    e = [float(v) for v in s.e]
    n = s.dim

    def f(x):
        return [
            x[i] * (b[i] + sum(A[i][j] * x[j] for j in range(n))) + e[i]
            for i in range(n)
        ]

    return f
