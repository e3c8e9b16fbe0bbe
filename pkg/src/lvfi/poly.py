"""Laurent polynomials with exchangeable coefficient rings.

The curl residual of an integrating-factor Ansatz is a Laurent polynomial in
the state variables.  For concrete systems its coefficients are Fractions; for
condition derivation they are SymPoly values, polynomials in named parameter
symbols (a11, b2, e3, al, l1, ...).  Laurent only needs +, *, unary -, and
truthiness (zero test) from its coefficient ring, so both plug in unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Mono = tuple[tuple[str, int], ...]  # sorted ((symbol, power), ...)


class SymPoly:
    """Multivariate polynomial in named symbols with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Mono, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @staticmethod
    def const(c) -> "SymPoly":
        c = Fraction(c)
        return SymPoly({(): c} if c else {})

    @staticmethod
    def sym(name: str, power: int = 1) -> "SymPoly":
        return SymPoly({((name, power),): Fraction(1)})

    def _coerce(self, other) -> "SymPoly":
        if isinstance(other, SymPoly):
            return other
        return SymPoly.const(other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymPoly.const(other)
        return isinstance(other, SymPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return SymPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return SymPoly(out)

    __rmul__ = __mul__

    def proportional(self, other: "SymPoly"):
        """Return q with self == q * other (q a nonzero Fraction), else None."""
        if not self.terms or not other.terms:
            return None
        if set(self.terms) != set(other.terms):
            return None
        m0 = next(iter(self.terms))
        q = self.terms[m0] / other.terms[m0]
        for m, c in self.terms.items():
            if other.terms[m] * q != c:
                return None
        return q

    def subs(self, values: dict[str, Fraction]):
        """Substitute Fractions for every symbol; returns a Fraction."""
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for name, p in m:
                v *= values[name] ** p
            total += v
        return total

    def subs_partial(self, values: dict[str, Fraction]) -> "SymPoly":
        """Substitute Fractions for a subset of symbols."""
        out = SymPoly()
        for m, c in self.terms.items():
            coef = c
            rest = []
            for name, p in m:
                if name in values:
                    coef *= Fraction(values[name]) ** p
                else:
                    rest.append((name, p))
            out = out + SymPoly({tuple(sorted(rest)): coef})
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = "*".join(
                name if p == 1 else f"{name}^{p}" for name, p in m
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    d = dict(m1)
    for name, p in m2:
        d[name] = d.get(name, 0) + p
        if d[name] == 0:
            del d[name]
    return tuple(sorted(d.items()))


Coeff = Union[Fraction, SymPoly]


class Laurent:
    """Laurent polynomial: map integer exponent multi-index -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], Coeff] | None = None):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @staticmethod
    def zero(nvars: int) -> "Laurent":
        return Laurent(nvars, {})

    @staticmethod
    def term(nvars: int, coeff, exps: tuple[int, ...]) -> "Laurent":
        return Laurent(nvars, {exps: coeff} if coeff else {})

    @staticmethod
    def var(nvars: int, i: int, one=Fraction(1)) -> "Laurent":
        e = tuple(int(j == i) for j in range(nvars))
        return Laurent(nvars, {e: one})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Laurent)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: "Laurent") -> "Laurent":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        return Laurent(self.nvars, out)

    def __neg__(self) -> "Laurent":
        return Laurent(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        out: dict[tuple[int, ...], Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = out.get(e)
                out[e] = c if s is None else s + c
        return Laurent(self.nvars, out)

    def scale(self, c) -> "Laurent":
        if not c:
            return Laurent.zero(self.nvars)
        return Laurent(self.nvars, {e: c * v for e, v in self.terms.items()})

    def diff(self, i: int) -> "Laurent":
        out: dict[tuple[int, ...], Coeff] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = tuple(p - int(j == i) for j, p in enumerate(e))
            v = c * e[i]
            s = out.get(e2)
            out[e2] = v if s is None else s + v
        return Laurent(self.nvars, out)

    def shift(self, i: int, k: int) -> "Laurent":
        """Multiply by x_i^k."""
        return Laurent(
            self.nvars,
            {
                tuple(p + k * int(j == i) for j, p in enumerate(e)): c
                for e, c in self.terms.items()
            },
        )

    def coeff(self, exps: tuple[int, ...]):
        return self.terms.get(exps)

    def items_sorted(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items_sorted():
            mono = "*".join(
                f"x{i+1}^{p}" if p != 1 else f"x{i+1}"
                for i, p in enumerate(e)
                if p != 0
            )
            cs = str(c)
            if "+" in cs or ("-" in cs[1:] if cs else False):
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    __repr__ = __str__
