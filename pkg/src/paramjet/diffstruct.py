"""Differential ring structures on a rational function field.

A structure is a basis of derivations together with the structure constants
of its Lie bracket; on top of it live the dual module of 1-forms with the
de Rham differential, Lie derivatives, morphisms with their integrability
condition, and the parameterized (principal/parameter split) structures
used by the module and prolongation layers.

Derivations are represented extrinsically by their coefficient vectors
over the coordinate partials, so the action on the field determines the
derivation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .errors import (
    ConstantsMismatch,
    MorphismInvalid,
    NotClosed,
    NotCommuting,
    NotIndependent,
    PrincipalMovesConstants,
)
from .field import FieldSpec, RatFun, partial_derivative, substitute


@dataclass(frozen=True)
class Derivation:
    """A derivation sum_i coeffs[i] * d/dv_i of the field."""

    spec: FieldSpec
    coeffs: tuple[RatFun, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.spec):
            raise ValueError("coefficient vector length mismatch")

    def apply(self, a: RatFun) -> RatFun:
        out = RatFun.zero(self.spec)
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                out = out + c * partial_derivative(a, i)
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def add(self, other: "Derivation") -> "Derivation":
        return Derivation(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c: RatFun) -> "Derivation":
        return Derivation(self.spec, tuple(c * a for a in self.coeffs))

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def coordinate_derivation(spec: FieldSpec, name: str) -> Derivation:
    i = spec.index(name)
    return Derivation(
        spec,
        tuple(RatFun.one(spec) if j == i else RatFun.zero(spec) for j in range(len(spec))),
    )


def bracket(a: Derivation, b: Derivation) -> Derivation:
    """Lie bracket [a, b] = a∘b - b∘a, in coefficient form."""
    if a.spec != b.spec:
        raise ValueError("derivations over different fields")
    return Derivation(
        a.spec,
        tuple(a.apply(cb) - b.apply(ca) for ca, cb in zip(a.coeffs, b.coeffs)),
    )


@dataclass(frozen=True)
class OmegaElement:
    """A 1-form as a coefficient vector over the dual basis of a structure."""

    coeffs: tuple[RatFun, ...]

    def pair(self, basis_coeffs: tuple[RatFun, ...]) -> RatFun:
        spec = self.coeffs[0].spec
        out = RatFun.zero(spec)
        for c, b in zip(self.coeffs, basis_coeffs):
            out = out + c * b
        return out

    def add(self, other: "OmegaElement") -> "OmegaElement":
        return OmegaElement(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def sub(self, other: "OmegaElement") -> "OmegaElement":
        return OmegaElement(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c: RatFun) -> "OmegaElement":
        return OmegaElement(tuple(c * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def omega_zero(spec: FieldSpec, d: int) -> OmegaElement:
    return OmegaElement(tuple(RatFun.zero(spec) for _ in range(d)))


def omega_unit(spec: FieldSpec, d: int, i: int) -> OmegaElement:
    return OmegaElement(
        tuple(RatFun.one(spec) if j == i else RatFun.zero(spec) for j in range(d))
    )


@dataclass(frozen=True)
class TwoForm:
    """An alternating 2-form; coefficients indexed by pairs i < j."""

    dim: int
    coeffs: tuple[RatFun, ...]  # lexicographic over (i, j), i < j

    @staticmethod
    def pair_index(dim: int, i: int, j: int) -> int:
        if not 0 <= i < j < dim:
            raise ValueError("need i < j")
        return i * (2 * dim - i - 1) // 2 + (j - i - 1)

    def at(self, i: int, j: int) -> RatFun:
        spec = self.coeffs[0].spec if self.coeffs else None
        if i == j:
            return RatFun.zero(spec)
        if i < j:
            return self.coeffs[self.pair_index(self.dim, i, j)]
        return -self.coeffs[self.pair_index(self.dim, j, i)]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def sub(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.dim, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def two_form_zero(spec: FieldSpec, d: int) -> TwoForm:
    return TwoForm(d, tuple(RatFun.zero(spec) for _ in range(d * (d - 1) // 2)))


class DiffStructure:
    """A derivation basis closed under bracket, with structure constants."""

    __slots__ = ("base", "basis", "structure_constants")

    def __init__(self, base, basis, structure_constants):
        self.base = base
        self.basis = basis
        self.structure_constants = structure_constants  # dict[(i,j) i<j] -> tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def constants(self, i: int, j: int) -> tuple[RatFun, ...]:
        """Coefficients of [δi, δj] in the basis, for any i, j."""
        if i == j:
            return tuple(RatFun.zero(self.base) for _ in range(self.dim))
        if i < j:
            return self.structure_constants[(i, j)]
        return tuple(-c for c in self.structure_constants[(j, i)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiffStructure)
            and self.base == other.base
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.base, self.basis))


def _expand_in_basis(basis: tuple[Derivation, ...], target: Derivation):
    """Solve sum_q c_q * basis_q = target; returns (coeffs, residual Derivation)."""
    spec = target.spec
    a = [[b.coeffs[n] for b in basis] for n in range(len(spec))]
    rhs = list(target.coeffs)
    coeffs, residual = linalg.solve_or_residual(a, rhs)
    return tuple(coeffs), Derivation(spec, tuple(residual))


def build_structure(base: FieldSpec, basis) -> DiffStructure:
    """Verify independence and bracket closure; compute structure constants."""
    basis = tuple(basis)
    if not basis:
        raise ValueError("empty derivation basis")
    for b in basis:
        if b.spec != base:
            raise ValueError("derivation over the wrong field")
    coeff_matrix = [list(b.coeffs) for b in basis]
    if linalg.rank(coeff_matrix) != len(basis):
        raise NotIndependent("derivation basis is linearly dependent over the field")
    constants = {}
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            br = bracket(basis[i], basis[j])
            coeffs, residual = _expand_in_basis(basis, br)
            if not residual.is_zero():
                raise NotClosed((i, j), residual)
            constants[(i, j)] = coeffs
    return DiffStructure(base, basis, constants)


def deRham_d0(a: RatFun, s: DiffStructure) -> OmegaElement:
    """The differential of a scalar: (d a)(δ) = δ(a), in dual-basis coordinates."""
    return OmegaElement(tuple(delta.apply(a) for delta in s.basis))


def deRham_d1(omega: OmegaElement, s: DiffStructure) -> TwoForm:
    """d of a 1-form, including the bracket correction term."""
    d = s.dim
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            term = s.basis[i].apply(omega.coeffs[j]) - s.basis[j].apply(omega.coeffs[i])
            bracket_part = omega.pair(s.constants(i, j))
            out.append(term - bracket_part)
    return TwoForm(d, tuple(out))


def lie_derivative(index: int, omega: OmegaElement, s: DiffStructure) -> OmegaElement:
    """Lie derivative along the basis derivation with the given index."""
    d_pair = deRham_d0(omega.coeffs[index], s)
    dw = deRham_d1(omega, s)
    contraction = OmegaElement(tuple(dw.at(index, j) for j in range(s.dim)))
    return d_pair.add(contraction)


def lie_derivative_general(deriv: Derivation, omega: OmegaElement, s: DiffStructure) -> OmegaElement:
    """Lie derivative along an arbitrary derivation in the span of the basis."""
    coeffs, residual = _expand_in_basis(s.basis, deriv)
    if not residual.is_zero():
        raise ValueError("derivation is not in the span of the basis")
    value = omega.pair(coeffs)
    d_pair = deRham_d0(value, s)
    dw = deRham_d1(omega, s)
    contraction = []
    for j in range(s.dim):
        acc = RatFun.zero(s.base)
        for i in range(s.dim):
            if not coeffs[i].is_zero():
                acc = acc + coeffs[i] * dw.at(i, j)
        contraction.append(acc)
    return d_pair.add(OmegaElement(tuple(contraction)))


# --- morphisms ----------------------------------------------------------------


@dataclass(frozen=True)
class DiffMorphism:
    """A ring homomorphism with a compatible map on 1-forms.

    ``gen_images`` sends each source variable to its image; ``omega_matrix``
    has shape (target dim) x (source dim) and gives the image of the i-th
    source dual basis element as its i-th column.
    """

    source: DiffStructure
    target: DiffStructure
    gen_images: dict
    omega_matrix: tuple

    def apply(self, a: RatFun) -> RatFun:
        return substitute(a, self.gen_images, self.target.base)

    def push_omega(self, omega: OmegaElement) -> OmegaElement:
        cols = len(self.source.basis)
        rows = len(self.target.basis)
        out = []
        for s in range(rows):
            acc = RatFun.zero(self.target.base)
            for i in range(cols):
                c = omega.coeffs[i]
                if not c.is_zero():
                    acc = acc + self.omega_matrix[s][i] * self.apply(c)
            out.append(acc)
        return OmegaElement(tuple(out))

    def push_two_form(self, t: TwoForm) -> TwoForm:
        rows = len(self.target.basis)
        out = two_form_zero(self.target.base, rows)
        coeffs = list(out.coeffs)
        src = self.source.dim
        for i in range(src):
            for j in range(i + 1, src):
                f = t.at(i, j)
                if f.is_zero():
                    continue
                pf = self.apply(f)
                for s in range(rows):
                    for u in range(s + 1, rows):
                        wedge = (
                            self.omega_matrix[s][i] * self.omega_matrix[u][j]
                            - self.omega_matrix[u][i] * self.omega_matrix[s][j]
                        )
                        if not wedge.is_zero():
                            k = TwoForm.pair_index(rows, s, u)
                            coeffs[k] = coeffs[k] + pf * wedge
        return TwoForm(rows, tuple(coeffs))


def identity_morphism(s: DiffStructure) -> DiffMorphism:
    images = {v: RatFun.variable(s.base, v) for v in s.base.variables}
    return DiffMorphism(s, s, images, tuple(tuple(r) for r in linalg.identity(s.base, s.dim)))


def compose_morphisms(first: DiffMorphism, second: DiffMorphism) -> DiffMorphism:
    """The composite sending a to second(first(a)); first.target must be
    second.source."""
    if first.target != second.source:
        raise MorphismInvalid("morphisms are not composable")
    images = {v: second.apply(img) for v, img in first.gen_images.items()}
    pushed = [[second.apply(x) for x in row] for row in first.omega_matrix]
    matrix = linalg.mat_mul([list(r) for r in second.omega_matrix], pushed)
    return DiffMorphism(first.source, second.target, images, tuple(tuple(r) for r in matrix))


@dataclass(frozen=True)
class MorphismVerdict:
    kind: str  # "ok" | "d_compat_fail" | "integrability_fail"
    variable: str | None = None
    dual_index: int | None = None
    witness_form: OmegaElement | None = None
    witness_two_form: TwoForm | None = None

    @property
    def ok(self) -> bool:
        return self.kind == "ok"


def check_morphism(m: DiffMorphism) -> MorphismVerdict:
    """Check d-compatibility on the source variables and the integrability
    condition on the source dual basis; sufficiency on generators follows
    from the Leibniz rule and linearity."""
    src = m.source
    for v in src.base.variables:
        lhs = deRham_d0(m.apply(RatFun.variable(src.base, v)), m.target)
        rhs = m.push_omega(deRham_d0(RatFun.variable(src.base, v), src))
        diff = lhs.sub(rhs)
        if not diff.is_zero():
            return MorphismVerdict("d_compat_fail", variable=v, witness_form=diff)
    for i in range(src.dim):
        omega_i = omega_unit(src.base, src.dim, i)
        lhs = deRham_d1(m.push_omega(omega_i), m.target)
        rhs = m.push_two_form(deRham_d1(omega_i, src))
        diff = lhs.sub(rhs)
        if not diff.is_zero():
            return MorphismVerdict("integrability_fail", dual_index=i, witness_two_form=diff)
    return MorphismVerdict("ok")


# --- parameterized structures ---------------------------------------------------


@dataclass(frozen=True)
class ParamStructure:
    """A commuting basis split into principal and parameter derivations.

    The first ``principal_count`` basis elements annihilate the constant
    variables and span the relative directions; the remaining
    ``parameter_count`` elements restrict to a basis of derivations of the
    constant subfield.
    """

    full: DiffStructure
    principal_count: int
    parameter_count: int
    constant_variables: tuple[str, ...]
    principal_structure: DiffStructure

    @property
    def base(self) -> FieldSpec:
        return self.full.base

    @property
    def principal(self) -> tuple[Derivation, ...]:
        return self.full.basis[: self.principal_count]

    @property
    def parameter(self) -> tuple[Derivation, ...]:
        return self.full.basis[self.principal_count:]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ParamStructure)
            and self.full == other.full
            and self.principal_count == other.principal_count
            and self.constant_variables == other.constant_variables
        )

    def __hash__(self) -> int:
        return hash((self.full, self.principal_count, self.constant_variables))


def build_param_structure(base, principal, parameter, constant_variables) -> ParamStructure:
    """Validate and assemble a parameterized structure.

    Only fully commuting bases are accepted; in that setting the stability
    of the principal directions under the parameter ones holds identically.
    Beyond the commuting and annihilation conditions this also checks that
    the principal span is exactly the span of the partials of the
    non-constant variables (so the declared constants are precisely the
    joint constants of the principal directions) and that the parameter
    restrictions to the constant subfield stay independent.
    """
    principal = tuple(principal)
    parameter = tuple(parameter)
    constant_variables = tuple(constant_variables)
    basis = principal + parameter
    for v in constant_variables:
        base.index(v)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            br = bracket(basis[i], basis[j])
            if not br.is_zero():
                raise NotCommuting((i, j), br)
    const_idx = {base.index(v) for v in constant_variables}
    for i, d in enumerate(principal):
        for v in constant_variables:
            val = d.apply(RatFun.variable(base, v))
            if not val.is_zero():
                raise PrincipalMovesConstants(i, v)
    nonconst = [n for n in range(len(base)) if n not in const_idx]
    principal_nonconst = [[d.coeffs[n] for n in nonconst] for d in principal]
    if principal and linalg.rank(principal_nonconst) != len(nonconst):
        raise ConstantsMismatch(
            "principal derivations do not span all non-constant directions"
        )
    if parameter:
        param_const = [[d.coeffs[n] for n in sorted(const_idx)] for d in parameter]
        if linalg.rank(param_const) != len(parameter):
            raise NotIndependent(
                "parameter derivations restrict to dependent derivations of the constants"
            )
    full = build_structure(base, basis)  # also checks independence
    principal_structure = (
        build_structure(base, principal) if principal else None
    )
    return ParamStructure(
        full=full,
        principal_count=len(principal),
        parameter_count=len(parameter),
        constant_variables=constant_variables,
        principal_structure=principal_structure,
    )
