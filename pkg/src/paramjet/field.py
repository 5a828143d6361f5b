"""Exact arithmetic in multivariate rational function fields Q(v1, ..., vN).

Elements are kept in a canonical form at all times: polynomials store no
zero coefficients and are compared term-by-term under the graded
lexicographic order induced by the variable order of the ``FieldSpec``;
rational functions store coprime numerator/denominator with a monic
denominator.  Equality of values is therefore structural equality, and the
text rendering is a bit-exact interchange form.

All values are immutable; operations are pure functions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DenominatorVanishes, DivisionByZero, ParseError, UnknownVariable

Exponents = tuple[int, ...]


def _grlex(e: Exponents):
    return (sum(e), e)


class FieldSpec:
    """An ordered list of variable names; fixes indexing for the session."""

    __slots__ = ("variables", "_index")

    def __init__(self, variables: Iterable[str]):
        names = tuple(variables)
        if any(not v for v in names):
            raise ValueError("variable names must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        self.variables = names
        self._index = {v: i for i, v in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def __len__(self) -> int:
        return len(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __repr__(self) -> str:
        return f"FieldSpec({', '.join(self.variables)})"


class MultiPoly:
    """Sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("spec", "terms", "_hash")

    def __init__(self, spec: FieldSpec, terms: dict):
        self.spec = spec
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, spec: FieldSpec, items) -> "MultiPoly":
        terms = {}
        for exps, coeff in items:
            c = Fraction(coeff)
            if c:
                e = tuple(exps)
                acc = terms.get(e)
                if acc is None:
                    terms[e] = c
                else:
                    acc += c
                    if acc:
                        terms[e] = acc
                    else:
                        del terms[e]
        return cls(spec, terms)

    @classmethod
    def zero(cls, spec: FieldSpec) -> "MultiPoly":
        return cls(spec, {})

    @classmethod
    def const(cls, spec: FieldSpec, value) -> "MultiPoly":
        c = Fraction(value)
        if not c:
            return cls(spec, {})
        return cls(spec, {(0,) * len(spec): c})

    @classmethod
    def one(cls, spec: FieldSpec) -> "MultiPoly":
        return cls.const(spec, 1)

    @classmethod
    def variable(cls, spec: FieldSpec, name: str) -> "MultiPoly":
        i = spec.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(spec)))
        return cls(spec, {e: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def const_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return next(iter(self.terms.values()))

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * len(self.spec)) == 1

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading(self) -> tuple[Exponents, Fraction]:
        e = max(self.terms, key=_grlex)
        return e, self.terms[e]

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        terms = dict(self.terms)
        for e, c in other.terms.items():
            acc = terms.get(e)
            if acc is None:
                terms[e] = c
            else:
                acc += c
                if acc:
                    terms[e] = acc
                else:
                    del terms[e]
        return MultiPoly(self.spec, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.spec, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        if not self.terms or not other.terms:
            return MultiPoly(self.spec, {})
        if self.is_one():
            return other
        if other.is_one():
            return self
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                acc = terms.get(e)
                if acc is None:
                    terms[e] = c
                else:
                    acc += c
                    if acc:
                        terms[e] = acc
                    else:
                        del terms[e]
        return MultiPoly(self.spec, terms)

    def scale(self, value) -> "MultiPoly":
        c = Fraction(value)
        if not c:
            return MultiPoly(self.spec, {})
        if c == 1:
            return self
        return MultiPoly(self.spec, {e: k * c for e, k in self.terms.items()})

    def pow(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.one(self.spec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self, var_index: int) -> "MultiPoly":
        terms = {}
        for e, c in self.terms.items():
            k = e[var_index]
            if k:
                e2 = e[:var_index] + (k - 1,) + e[var_index + 1:]
                acc = terms.get(e2)
                nc = c * k
                terms[e2] = acc + nc if acc is not None else nc
                if not terms[e2]:
                    del terms[e2]
        return MultiPoly(self.spec, terms)

    def variables_used(self) -> set[int]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return used

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.spec == other.spec
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.spec, tuple(sorted(self.terms.items()))))
        return self._hash

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_grlex, reverse=True):
            c = self.terms[e]
            factors = []
            for name, k in zip(self.spec.variables, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self.render()})"


# --- gcd machinery ----------------------------------------------------------
#
# The gcd over Q[v1..vN] is computed by a content/primitive-part recursion:
# the main variable is always the last variable occurring in either operand,
# so the elimination order is fixed by the FieldSpec order.  The result is
# normalized to integer coefficients with content 1 and positive leading
# (graded lex) coefficient.


def _rat_normalize(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    num_gcd = 0
    den_lcm = 1
    for c in p.terms.values():
        num_gcd = math.gcd(num_gcd, abs(c.numerator))
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    factor = Fraction(den_lcm, num_gcd)
    q = p.scale(factor)
    if q.leading()[1] < 0:
        q = q.scale(-1)
    return q


def _main_variable(f: MultiPoly, g: MultiPoly) -> int | None:
    used = f.variables_used() | g.variables_used()
    return max(used) if used else None


def _as_coeffs(p: MultiPoly, v: int) -> dict[int, MultiPoly]:
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        k = e[v]
        e2 = e[:v] + (0,) + e[v + 1:]
        out.setdefault(k, {})[e2] = c
    return {k: MultiPoly(p.spec, t) for k, t in out.items()}


def _from_coeffs(spec: FieldSpec, coeffs: dict[int, MultiPoly], v: int) -> MultiPoly:
    terms = {}
    for k, poly in coeffs.items():
        for e, c in poly.terms.items():
            terms[e[:v] + (k,) + e[v + 1:]] = c
    return MultiPoly(spec, terms)


def _coeff_content(coeffs: dict[int, MultiPoly]) -> MultiPoly:
    it = iter(coeffs.values())
    g = next(it)
    for c in it:
        g = poly_gcd(g, c)
        if g.is_const():
            break
    return g


def _coeffs_divexact(coeffs, divisor: MultiPoly):
    if divisor.is_one():
        return coeffs
    return {k: poly_divexact(c, divisor) for k, c in coeffs.items()}


def _prem(F: dict, G: dict, spec: FieldSpec) -> dict:
    """Pseudo-remainder of F by G, both as coefficient dicts in one variable."""
    dG = max(G)
    lG = G[dG]
    R = dict(F)
    while R and max(R) >= dG:
        dR = max(R)
        lR = R[dR]
        shift = dR - dG
        new: dict[int, MultiPoly] = {}
        for k, c in R.items():
            new[k] = c * lG
        for k, c in G.items():
            acc = new.get(k + shift, MultiPoly.zero(spec)) - c * lR
            if acc.is_zero():
                new.pop(k + shift, None)
            else:
                new[k + shift] = acc
        R = {k: c for k, c in new.items() if not c.is_zero()}
    return R


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Primitive gcd of two polynomials (up to the stated normalization)."""
    if f.is_zero():
        return _rat_normalize(g)
    if g.is_zero():
        return _rat_normalize(f)
    if f.is_const() or g.is_const():
        return MultiPoly.one(f.spec)
    if len(f.terms) == 1 or len(g.terms) == 1:
        mono = None
        for p in (f, g):
            m = None
            for e in p.terms:
                m = e if m is None else tuple(min(a, b) for a, b in zip(m, e))
            mono = m if mono is None else tuple(min(a, b) for a, b in zip(mono, m))
        return MultiPoly(f.spec, {mono: Fraction(1)})
    if f.terms == g.terms:
        return _rat_normalize(f)
    v = _main_variable(f, g)
    F = _as_coeffs(f, v)
    G = _as_coeffs(g, v)
    if len(F) == 1 and 0 in F:
        return _rat_normalize(poly_gcd(f, _coeff_content(G)))
    if len(G) == 1 and 0 in G:
        return _rat_normalize(poly_gcd(_coeff_content(F), g))
    cf = _coeff_content(F)
    cg = _coeff_content(G)
    c = poly_gcd(cf, cg)
    Fp = _coeffs_divexact(F, cf)
    Gp = _coeffs_divexact(G, cg)
    if max(Fp) < max(Gp):
        Fp, Gp = Gp, Fp
    while Gp:
        R = _prem(Fp, Gp, f.spec)
        Fp = Gp
        if not R:
            Gp = {}
        else:
            cont = _coeff_content(R)
            Gp = _coeffs_divexact(R, cont)
    if max(Fp) == 0:
        h = MultiPoly.one(f.spec)
    else:
        h = _from_coeffs(f.spec, Fp, v)
        hc = _coeff_content(_as_coeffs(h, v))
        h = poly_divexact(h, hc)
    return _rat_normalize(c * h)


def poly_divexact(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Exact division f/g; raises ArithmeticError if the division is inexact."""
    if g.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if f.is_zero():
        return f
    if g.is_one():
        return f
    if g.is_const():
        return f.scale(1 / g.const_value())
    eg, cg = g.leading()
    out = {}
    r = f
    while not r.is_zero():
        er, cr = r.leading()
        e = tuple(a - b for a, b in zip(er, eg))
        if any(k < 0 for k in e):
            raise ArithmeticError("inexact polynomial division")
        c = cr / cg
        out[e] = c
        r = r - MultiPoly(f.spec, {e: c}) * g
    return MultiPoly(f.spec, out)


class RatFun:
    """A rational function in canonical form: gcd(num, den) = 1, den monic."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly):
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            num = MultiPoly.zero(num.spec)
            den = MultiPoly.one(num.spec)
        elif den.is_const():
            num = num.scale(1 / den.const_value())
            den = MultiPoly.one(num.spec)
        else:
            g = poly_gcd(num, den)
            if not g.is_one():
                num = poly_divexact(num, g)
                den = poly_divexact(den, g)
            lc = den.leading()[1]
            if lc != 1:
                num = num.scale(1 / lc)
                den = den.scale(1 / lc)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def spec(self) -> FieldSpec:
        return self.num.spec

    @classmethod
    def const(cls, spec: FieldSpec, value) -> "RatFun":
        return cls(MultiPoly.const(spec, value), MultiPoly.one(spec))

    @classmethod
    def zero(cls, spec: FieldSpec) -> "RatFun":
        return cls.const(spec, 0)

    @classmethod
    def one(cls, spec: FieldSpec) -> "RatFun":
        return cls.const(spec, 1)

    @classmethod
    def variable(cls, spec: FieldSpec, name: str) -> "RatFun":
        return cls(MultiPoly.variable(spec, name), MultiPoly.one(spec))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFun":
        return cls(p, MultiPoly.one(p.spec))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_one()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant")
        return self.num.const_value()

    def __add__(self, other: "RatFun") -> "RatFun":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFun":
        out = RatFun.__new__(RatFun)
        out.num = -self.num
        out.den = self.den
        out._hash = None
        return out

    def __sub__(self, other: "RatFun") -> "RatFun":
        return self + (-other)

    def __mul__(self, other: "RatFun") -> "RatFun":
        if self.is_zero() or other.is_zero():
            return RatFun.zero(self.spec)
        if self.is_one():
            return other
        if other.is_one():
            return self
        return RatFun(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFun") -> "RatFun":
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        if other.is_one():
            return self
        return RatFun(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RatFun":
        return RatFun.one(self.spec) / self

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatFun)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __str__(self) -> str:
        return f"({self.num.render()})/({self.den.render()})"

    def __repr__(self) -> str:
        return f"RatFun({self})"


# --- spec-level operations ---------------------------------------------------


def ratfun_arith(op: str, x: RatFun, y: RatFun) -> RatFun:
    """Field arithmetic dispatcher; ``op`` is one of add/sub/mul/div."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(x: RatFun, v: str | int) -> RatFun:
    """Coordinate partial derivative, by the quotient rule."""
    i = x.spec.index(v) if isinstance(v, str) else v
    if not (0 <= i < len(x.spec)):
        raise UnknownVariable(f"variable index {i} out of range")
    dn = x.num.derivative(i)
    dd = x.den.derivative(i)
    if dd.is_zero():
        return RatFun(dn, x.den)
    return RatFun(dn * x.den - x.num * dd, x.den * x.den)


def _eval_poly(p: MultiPoly, images: Sequence[RatFun], target: FieldSpec) -> RatFun:
    powers: list[list[RatFun]] = [[RatFun.one(target)] for _ in images]
    out = RatFun.zero(target)
    for e, c in sorted(p.terms.items(), key=lambda t: _grlex(t[0])):
        term = RatFun.const(target, c)
        for i, k in enumerate(e):
            if k:
                cache = powers[i]
                while len(cache) <= k:
                    cache.append(cache[-1] * images[i])
                term = term * cache[k]
        out = out + term
    return out


def substitute(x: RatFun, assignment: Mapping[str, RatFun], target: FieldSpec) -> RatFun:
    """Image of ``x`` under the ring homomorphism sending each variable to
    its assigned value; partial on poles of the denominator."""
    spec = x.spec
    images: list[RatFun] = []
    needed = x.num.variables_used() | x.den.variables_used()
    for i, name in enumerate(spec.variables):
        if name in assignment:
            img = assignment[name]
            if img.spec != target:
                raise ValueError(f"image of {name!r} lives in the wrong field")
            images.append(img)
        elif i in needed:
            raise UnknownVariable(f"no image assigned for variable {name!r}")
        else:
            images.append(RatFun.zero(target))
    den_val = _eval_poly(x.den, images, target)
    if den_val.is_zero():
        raise DenominatorVanishes(f"denominator of {x} vanishes under substitution")
    return _eval_poly(x.num, images, target) / den_val


# --- parsing ------------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.items.append(("int", text[i:j], i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("name", text[i:j], i))
                i = j
            elif ch in "+-*/^()":
                self.items.append((ch, ch, i))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", position=i)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression", position=len(self.text))
        self.pos += 1
        return tok


def parse_ratfun(spec: FieldSpec, text: str) -> RatFun:
    """Parse an expression in +, -, *, /, ^, parentheses, integers and
    variable names into a canonical rational function."""
    toks = _Tokens(text)

    def expr() -> RatFun:
        out = term()
        while True:
            tok = toks.peek()
            if tok and tok[0] in "+-":
                toks.next()
                rhs = term()
                out = out + rhs if tok[0] == "+" else out - rhs
            else:
                return out

    def term() -> RatFun:
        out = factor()
        while True:
            tok = toks.peek()
            if tok and tok[0] in "*/":
                toks.next()
                rhs = factor()
                out = out * rhs if tok[0] == "*" else out / rhs
            else:
                return out

    def factor() -> RatFun:
        sign = 1
        tok = toks.peek()
        while tok and tok[0] == "-":
            toks.next()
            sign = -sign
            tok = toks.peek()
        base = atom()
        tok = toks.peek()
        if tok and tok[0] == "^":
            toks.next()
            kind, value, pos = toks.next()
            if kind != "int":
                raise ParseError("exponent must be an integer", position=pos)
            power = int(value)
            out = RatFun.one(spec)
            for _ in range(power):
                out = out * base
            base = out
        return base if sign == 1 else -base

    def atom() -> RatFun:
        kind, value, pos = toks.next()
        if kind == "int":
            return RatFun.const(spec, int(value))
        if kind == "name":
            if value not in spec._index:
                raise ParseError(f"unknown variable {value!r}", position=pos)
            return RatFun.variable(spec, value)
        if kind == "(":
            out = expr()
            kind2, _, pos2 = toks.next()
            if kind2 != ")":
                raise ParseError("expected ')'", position=pos2)
            return out
        raise ParseError(f"unexpected token {value!r}", position=pos)

    out = expr()
    tok = toks.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok[1]!r}", position=tok[2])
    return out
