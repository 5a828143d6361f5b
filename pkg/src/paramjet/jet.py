"""First and second jet rings of a differential structure.

The 1-jet ring is the square-zero extension R ⊕ Ω; the 2-jet ring is the
subset of (P1 ⊗ P1) of elements a⊗1 + 1⊗ω + ω⊗1 − η whose η has
antisymmetric part dω.  Elements of P1 ⊗ P1 are kept in a canonical
left-coefficient form: every scalar is pulled to the outer left through
the bimodule relation 1⊗(c·γ) = c(1⊗γ) + dc⊗γ, so an element is a tuple
of coefficients over the basis {1⊗1, ωi⊗1, 1⊗ωj, ωi⊗ωj} and equality is
componentwise.  The rewrite terminates and is confluent because each
application strictly lowers the slot a scalar sits in (rightmost to left)
while the ωi⊗ωj block only ever accumulates, so a normal form is reached
after one pass per slot and does not depend on the order of pulls.  The
stored η of a ``Jet2Element`` is the literal tensor of the defining
expression, not the canonical-form coefficient block; the two differ by
the derivative matrix of ω and the conversions below translate between
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diffstruct import DiffStructure, OmegaElement, TwoForm, deRham_d0, deRham_d1, omega_zero
from .errors import MembershipViolated, NotInAugmentationIdeal
from .field import RatFun

Matrix = tuple  # d x d tuple of tuples of RatFun


def _zero_matrix(s: DiffStructure) -> Matrix:
    z = RatFun.zero(s.base)
    return tuple(tuple(z for _ in range(s.dim)) for _ in range(s.dim))


def _mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_scale(c: RatFun, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def _outer(u: OmegaElement, v: OmegaElement) -> Matrix:
    return tuple(tuple(x * y for y in v.coeffs) for x in u.coeffs)


def _deriv_matrix(omega: OmegaElement, s: DiffStructure) -> Matrix:
    """Matrix with entry (i, j) = δi(ωj-coefficient)."""
    return tuple(
        tuple(s.basis[i].apply(omega.coeffs[j]) for j in range(s.dim))
        for i in range(s.dim)
    )


# --- level 1 -------------------------------------------------------------------


@dataclass(frozen=True)
class Jet1Element:
    a: RatFun
    omega: OmegaElement

    def add(self, other: "Jet1Element") -> "Jet1Element":
        return Jet1Element(self.a + other.a, self.omega.add(other.omega))

    def __str__(self) -> str:
        return f"({self.a}; {self.omega})"


def jet1_mul(x: Jet1Element, y: Jet1Element) -> Jet1Element:
    """(a + ω)(b + η) = ab + aη + bω; the form-by-form product vanishes."""
    return Jet1Element(x.a * y.a, y.omega.scale(x.a).add(x.omega.scale(y.a)))


def jet1_l(a: RatFun, s: DiffStructure) -> Jet1Element:
    return Jet1Element(a, omega_zero(s.base, s.dim))


def jet1_r(a: RatFun, s: DiffStructure) -> Jet1Element:
    return Jet1Element(a, deRham_d0(a, s))


def jet1_e(x: Jet1Element) -> RatFun:
    return x.a


def jet1_antipode(x: Jet1Element) -> Jet1Element:
    return Jet1Element(x.a, x.omega.scale(-RatFun.one(x.a.spec)))


# --- level 2 -------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2Element:
    """The element a⊗1 + 1⊗ω + ω⊗1 − η with η = sum η[i][j]·ωi⊗ωj."""

    a: RatFun
    omega: OmegaElement
    eta: Matrix

    def add(self, other: "Jet2Element") -> "Jet2Element":
        return Jet2Element(self.a + other.a, self.omega.add(other.omega), _mat_add(self.eta, other.eta))

    def sub(self, other: "Jet2Element") -> "Jet2Element":
        return Jet2Element(self.a - other.a, self.omega.sub(other.omega), _mat_sub(self.eta, other.eta))

    def __str__(self) -> str:
        eta = "[" + "; ".join(", ".join(str(c) for c in row) for row in self.eta) + "]"
        return f"({self.a}; {self.omega}; {eta})"


def jet2_zero(s: DiffStructure) -> Jet2Element:
    return Jet2Element(RatFun.zero(s.base), omega_zero(s.base, s.dim), _zero_matrix(s))


def jet2_l(a: RatFun, s: DiffStructure) -> Jet2Element:
    return Jet2Element(a, omega_zero(s.base, s.dim), _zero_matrix(s))


def jet2_r(a: RatFun, s: DiffStructure) -> Jet2Element:
    return Jet2Element(a, deRham_d0(a, s), _zero_matrix(s))


def jet2_e(x: Jet2Element) -> RatFun:
    return x.a


def jet2_proj1(x: Jet2Element) -> Jet1Element:
    """The quotient map to the 1-jet ring; its kernel is the symmetric-η,
    a = ω = 0 part (second symmetric power of Ω)."""
    return Jet1Element(x.a, x.omega)


def jet2_membership_defect(x: Jet2Element, s: DiffStructure) -> TwoForm:
    """Antisymmetric part of η minus dω; zero exactly on members."""
    dw = deRham_d1(x.omega, s)
    out = []
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            out.append(x.eta[i][j] - x.eta[j][i] - dw.at(i, j))
    return TwoForm(s.dim, tuple(out))


def jet2_is_member(x: Jet2Element, s: DiffStructure) -> bool:
    return jet2_membership_defect(x, s).is_zero()


def jet2_canonical_lift(omega: OmegaElement, s: DiffStructure) -> Jet2Element:
    """The member 1⊗ω + ω⊗1 − lift(dω), lifting dω antisymmetrically
    (possible since 2 is invertible)."""
    dw = deRham_d1(omega, s)
    half = RatFun.const(s.base, Fraction(1, 2))
    eta = [[RatFun.zero(s.base) for _ in range(s.dim)] for _ in range(s.dim)]
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            v = half * dw.at(i, j)
            eta[i][j] = v
            eta[j][i] = -v
    return Jet2Element(RatFun.zero(s.base), omega, tuple(tuple(r) for r in eta))


def jet2_mul(x: Jet2Element, y: Jet2Element, s: DiffStructure) -> Jet2Element:
    """Product in the 2-jet ring, computed in the canonical form of
    P1 ⊗ P1 and read back."""
    if not jet2_is_member(x, s) or not jet2_is_member(y, s):
        raise MembershipViolated("operand is not a 2-jet element")
    prod = jet11_mul(jet2_Delta(x, s), jet2_Delta(y, s))
    return jet11_to_jet2(prod, s)


def jet2_gamma(x: Jet2Element, s: DiffStructure) -> Matrix:
    """Divided power on the augmentation ideal: γ(1⊗ω + ω⊗1 − η) = ω⊗ω."""
    if not x.a.is_zero():
        raise NotInAugmentationIdeal("γ is defined on elements with zero scalar part")
    return _outer(x.omega, x.omega)


def jet2_sym_value(x: Jet2Element) -> Matrix:
    """The element of Ω⊗Ω represented by a Jet2Element with a = ω = 0
    (it equals −η)."""
    if not x.a.is_zero() or not x.omega.is_zero():
        raise ValueError("element is not in the symmetric-square part")
    return tuple(tuple(-c for c in row) for row in x.eta)


# --- the ambient tensor square ---------------------------------------------------


@dataclass(frozen=True)
class Jet11Element:
    """An element of P1 ⊗ P1 in canonical left-coefficient form:

    a(1⊗1) + Σ ωL[i](ωi⊗1) + Σ ωR[j](1⊗ωj) + Σ eta[i][j](ωi⊗ωj).
    """

    a: RatFun
    omega_left: OmegaElement
    omega_right: OmegaElement
    eta: Matrix

    def add(self, other: "Jet11Element") -> "Jet11Element":
        return Jet11Element(
            self.a + other.a,
            self.omega_left.add(other.omega_left),
            self.omega_right.add(other.omega_right),
            _mat_add(self.eta, other.eta),
        )

    def __str__(self) -> str:
        eta = "[" + "; ".join(", ".join(str(c) for c in row) for row in self.eta) + "]"
        return f"({self.a}; L{self.omega_left}; R{self.omega_right}; {eta})"


def jet11_zero(s: DiffStructure) -> Jet11Element:
    z = omega_zero(s.base, s.dim)
    return Jet11Element(RatFun.zero(s.base), z, z, _zero_matrix(s))


def jet11_mul(x: Jet11Element, y: Jet11Element) -> Jet11Element:
    """Componentwise product; both mixed slots multiply into the ω⊗ω block."""
    a = x.a * y.a
    omega_left = y.omega_left.scale(x.a).add(x.omega_left.scale(y.a))
    omega_right = y.omega_right.scale(x.a).add(x.omega_right.scale(y.a))
    eta = _mat_add(_mat_scale(x.a, y.eta), _mat_scale(y.a, x.eta))
    eta = _mat_add(eta, _outer(x.omega_left, y.omega_right))
    eta = _mat_add(eta, _outer(y.omega_left, x.omega_right))
    return Jet11Element(a, omega_left, omega_right, eta)


def jet2_Delta(x: Jet2Element, s: DiffStructure) -> Jet11Element:
    """The embedding of the 2-jet ring into P1 ⊗ P1 in canonical form.

    Writing ω = Σ cj ωj, the literal tensor 1⊗ω contributes δi(cj) to the
    (i, j) slot when the scalars are pulled left.
    """
    return Jet11Element(
        x.a, x.omega, x.omega, _mat_sub(_deriv_matrix(x.omega, s), x.eta)
    )


def jet11_to_jet2(x: Jet11Element, s: DiffStructure) -> Jet2Element:
    """Read a canonical-form element back as a 2-jet element; raises
    MembershipViolated when it is not one."""
    if not x.omega_left.sub(x.omega_right).is_zero():
        raise MembershipViolated("left and right form slots differ")
    eta = _mat_sub(_deriv_matrix(x.omega_left, s), x.eta)
    candidate = Jet2Element(x.a, x.omega_left, eta)
    if not jet2_is_member(candidate, s):
        raise MembershipViolated("antisymmetric part does not match dω")
    return candidate


def jet11_membership_defect(x: Jet11Element, s: DiffStructure) -> TwoForm | None:
    """Membership defect of a canonical-form element, or None when the two
    form slots already disagree."""
    if not x.omega_left.sub(x.omega_right).is_zero():
        return None
    eta = _mat_sub(_deriv_matrix(x.omega_left, s), x.eta)
    return jet2_membership_defect(Jet2Element(x.a, x.omega_left, eta), s)


def jet11_scale_right(x: Jet11Element, c: RatFun, s: DiffStructure) -> Jet11Element:
    """Multiplication by r(c), i.e. by the scalar c acting through the
    rightmost slot; used to pull module coefficients into the jet factor."""
    return jet11_mul(x, jet2_Delta(jet2_r(c, s), s))


def jet11_unit(s: DiffStructure) -> Jet11Element:
    z = omega_zero(s.base, s.dim)
    return Jet11Element(RatFun.one(s.base), z, z, _zero_matrix(s))


def jet11_omega_left(i: int, s: DiffStructure) -> Jet11Element:
    z = omega_zero(s.base, s.dim)
    coeffs = tuple(
        RatFun.one(s.base) if j == i else RatFun.zero(s.base) for j in range(s.dim)
    )
    return Jet11Element(RatFun.zero(s.base), OmegaElement(coeffs), z, _zero_matrix(s))


def jet11_omega_right(j: int, s: DiffStructure) -> Jet11Element:
    z = omega_zero(s.base, s.dim)
    coeffs = tuple(
        RatFun.one(s.base) if i == j else RatFun.zero(s.base) for i in range(s.dim)
    )
    return Jet11Element(RatFun.zero(s.base), z, OmegaElement(coeffs), _zero_matrix(s))


def jet11_omega_pair(i: int, j: int, s: DiffStructure) -> Jet11Element:
    z = omega_zero(s.base, s.dim)
    zero = RatFun.zero(s.base)
    eta = tuple(
        tuple(RatFun.one(s.base) if (r, c) == (i, j) else zero for c in range(s.dim))
        for r in range(s.dim)
    )
    return Jet11Element(zero, z, z, eta)
