"""The prolongation functor on modules and morphisms, its second-order
refinement via the slot-swap involution, Baer sums of block extensions,
tensor compatibility, and closure generation.

Block layout of a prolonged module of parent rank m with q parameters:
basis (horizontal-lift block of size m, then one block of size m per
parameter direction), so every principal connection matrix is block lower
triangular with 1 + q diagonal copies of the parent matrix and the
parameter-derivative blocks in the first block column.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .conn import (
    DiffModule,
    ModMorphism,
    check_integrability,
    direct_sum,
    dual,
    morphism_check,
    require_flat,
    tensor,
    trivial_module,
)
from .diffstruct import Derivation, ParamStructure, bracket
from .errors import MorphismInvalid, RestrictionFails, ShapeMismatch, StructureMismatch
from .field import RatFun

Matrix = list


@dataclass
class ProlongedModule:
    core: DiffModule
    parent: DiffModule
    parent_rank: int
    q: int
    incl: ModMorphism  # from the parameter-block sub (q copies of the parent)
    proj: ModMorphism  # onto the parent

    def block(self, i: int, j: int) -> Matrix:
        """The parameter-derivative block of the i-th principal matrix for
        the j-th parameter direction (block row 1 + j, block column 0)."""
        m = self.parent_rank
        a = self.core.conn[i]
        r0 = (1 + j) * m
        return [[a[r0 + r][c] for c in range(m)] for r in range(m)]


def _bracket_matrix(m: DiffModule, principal_index: int, parameter_index: int) -> Matrix:
    """The connection matrix attached to [∂, ∂t]; identically zero for the
    commuting structures this engine accepts, but computed faithfully."""
    ps = m.ps
    br = bracket(ps.principal[principal_index], ps.parameter[parameter_index])
    return _matrix_for_derivation(m, br)


def _matrix_for_derivation(m: DiffModule, deriv: Derivation) -> Matrix:
    """Expand a derivation in the principal basis and combine the module's
    matrices accordingly; the derivation must lie in the principal span."""
    spec = m.spec
    if deriv.is_zero():
        return linalg.zeros(spec, m.rank, m.rank)
    basis = m.ps.principal
    a = [[b.coeffs[n] for b in basis] for n in range(len(spec))]
    coeffs, residual = linalg.solve_or_residual(a, list(deriv.coeffs))
    if any(not r.is_zero() for r in residual):
        raise StructureMismatch("derivation escapes the principal span")
    out = linalg.zeros(spec, m.rank, m.rank)
    for q, c in enumerate(coeffs):
        if not c.is_zero():
            out = linalg.mat_add(out, linalg.mat_scale(c, m.conn[q]))
    return out


def prolong_block(a: Matrix, parameter_derivation: Derivation, bracket_term: Matrix) -> Matrix:
    """B = −∂t(A) − A_[∂,∂t], the first-column block of the prolonged
    connection."""
    return linalg.mat_sub(
        linalg.mat_neg(linalg.entrywise(parameter_derivation.apply, a)), bracket_term
    )


def prolong_module(m: DiffModule) -> ProlongedModule:
    """One prolongation step: adjoin the parameter-derivatives of
    solutions.  Refused on curved input, which is not a module over the
    principal directions in the first place."""
    require_flat(m)
    ps = m.ps
    q = ps.parameter_count
    spec = m.spec
    rank = m.rank
    conn = []
    for i, a in enumerate(m.conn):
        blocks = [
            [linalg.zeros(spec, rank, rank) for _ in range(1 + q)] for _ in range(1 + q)
        ]
        for d in range(1 + q):
            blocks[d][d] = a
        for j in range(q):
            blocks[1 + j][0] = prolong_block(a, ps.parameter[j], _bracket_matrix(m, i, j))
        conn.append(linalg.block(blocks))
    core = DiffModule(ps, rank * (1 + q), tuple(conn))
    if q == 0:
        sub = DiffModule(
            ps, 0, tuple(linalg.zeros(spec, 0, 0) for _ in range(ps.principal_count))
        )
    else:
        sub = m
        for _ in range(q - 1):
            sub = direct_sum(sub, m)
    zero = RatFun.zero(spec)
    one = RatFun.one(spec)
    # incl maps the sub into the core (core.rank x sub.rank), landing in the
    # parameter blocks; proj is the quotient onto the first block.
    incl_matrix = [
        [one if r == rank + c else zero for c in range(rank * q)]
        for r in range(rank * (1 + q))
    ]
    proj_matrix = [
        [one if r == c else zero for c in range(rank * (1 + q))] for r in range(rank)
    ]
    incl = ModMorphism(sub, core, tuple(tuple(r) for r in incl_matrix))
    proj = ModMorphism(core, m, tuple(tuple(r) for r in proj_matrix))
    return ProlongedModule(core, m, rank, q, incl, proj)


def prolong_morphism(t: ModMorphism) -> ModMorphism:
    """Prolong a module morphism: diagonal copies of T with −∂t(T) blocks
    in the first block column; functorial in T."""
    verdict = morphism_check([list(r) for r in t.matrix], t.src, t.dst)
    if not verdict.ok:
        raise MorphismInvalid("matrix does not intertwine the connections")
    ps = t.src.ps
    q = ps.parameter_count
    spec = t.src.spec
    n, m = t.dst.rank, t.src.rank
    tm = [list(r) for r in t.matrix]
    blocks = [[linalg.zeros(spec, n, m) for _ in range(1 + q)] for _ in range(1 + q)]
    for d in range(1 + q):
        blocks[d][d] = tm
    for j in range(q):
        blocks[1 + j][0] = linalg.mat_neg(linalg.entrywise(ps.parameter[j].apply, tm))
    big = linalg.block(blocks)
    src = prolong_module(t.src).core
    dst = prolong_module(t.dst).core
    return ModMorphism(src, dst, tuple(tuple(r) for r in big))


# --- second prolongation -----------------------------------------------------------


@dataclass
class SecondProlongation:
    """The swap-invariant part of the twice-prolonged module."""

    double: DiffModule
    invariant: DiffModule
    incl: ModMorphism
    pairs: list  # ordered unordered index pairs (a <= b) labelling blocks


def at2_module(m: DiffModule) -> SecondProlongation:
    """Restrict the double prolongation to the subspace invariant under
    swapping the two parameter-form slots.

    The flat index of the double prolongation is (outer block, inner
    block, module index); the swap exchanges the two block indices.  The
    restriction must close exactly; a failure is surfaced as
    RestrictionFails since it would indicate an implementation bug (in the
    commuting setting mixed second parameter derivatives agree).
    """
    require_flat(m)
    q = m.ps.parameter_count
    rank = m.rank
    first = prolong_module(m)
    second = prolong_module(first.core)
    double = second.core
    width = 1 + q

    def flat(outer: int, inner: int, l: int) -> int:
        return (outer * width + inner) * rank + l

    pairs = [(a, b) for a in range(width) for b in range(a, width)]
    spec = m.spec
    zero = RatFun.zero(spec)
    one = RatFun.one(spec)
    cols = []
    for (a, b) in pairs:
        for l in range(rank):
            col = [zero] * double.rank
            col[flat(a, b, l)] = one
            if a != b:
                col[flat(b, a, l)] = col[flat(b, a, l)] + one
            cols.append(col)
    sub_rank = len(cols)
    conn = []
    for i in range(m.ps.principal_count):
        a_big = double.conn[i]
        restricted = [[zero for _ in range(sub_rank)] for _ in range(sub_rank)]
        for cidx, col in enumerate(cols):
            w = linalg.mat_vec(a_big, col)
            # the image must itself be swap-symmetric
            for oa in range(width):
                for ob in range(oa + 1, width):
                    for l in range(rank):
                        if w[flat(oa, ob, l)] != w[flat(ob, oa, l)]:
                            raise RestrictionFails(
                                "double prolongation does not preserve the invariant subspace"
                            )
            for pidx, (pa, pb) in enumerate(pairs):
                for l in range(rank):
                    restricted[pidx * rank + l][cidx] = w[flat(pa, pb, l)]
        conn.append(restricted)
    invariant = DiffModule(m.ps, sub_rank, tuple(conn))
    incl = ModMorphism(invariant, double, tuple(tuple(c[r] for c in cols) for r in range(double.rank)))
    return SecondProlongation(double, invariant, incl, pairs)


# --- Baer sums of block extensions ---------------------------------------------------


@dataclass
class BlockExtension:
    """An extension of a quotient by a sub in split-compatible block shape:
    connection matrices [[A_quot, 0], [X, A_sub]]."""

    ps: ParamStructure
    quot: DiffModule
    sub: DiffModule
    off: tuple  # per principal index, sub.rank x quot.rank

    def to_module(self) -> DiffModule:
        conn = []
        for aq, asub, x in zip(self.quot.conn, self.sub.conn, self.off):
            z = linalg.zeros(self.ps.base, self.quot.rank, self.sub.rank)
            conn.append(linalg.block([[aq, z], [x, asub]]))
        return DiffModule(self.ps, self.quot.rank + self.sub.rank, tuple(conn))

    def negate(self) -> "BlockExtension":
        return BlockExtension(
            self.ps, self.quot, self.sub, tuple(linalg.mat_neg(x) for x in self.off)
        )


def trivial_extension(quot: DiffModule, sub: DiffModule) -> BlockExtension:
    off = tuple(
        linalg.zeros(quot.spec, sub.rank, quot.rank) for _ in range(quot.ps.principal_count)
    )
    return BlockExtension(quot.ps, quot, sub, off)


def extension_of_prolongation(p: ProlongedModule) -> BlockExtension:
    sub = p.incl.src
    off = []
    for i in range(p.parent.ps.principal_count):
        stacked = []
        for j in range(p.q):
            stacked.extend(p.block(i, j))
        off.append(stacked)
    return BlockExtension(p.parent.ps, p.parent, sub, tuple(off))


def baer_sum(e1: BlockExtension, e2: BlockExtension) -> BlockExtension:
    """Addition of extensions with the same sub and quotient blocks; for
    split-compatible presentations the general kernel/image construction
    reduces to adding the off-diagonal blocks."""
    if e1.ps != e2.ps:
        raise ShapeMismatch("extensions over different structures")
    if e1.quot.rank != e2.quot.rank or e1.sub.rank != e2.sub.rank:
        raise ShapeMismatch("extension block shapes differ")
    if e1.quot != e2.quot or e1.sub != e2.sub:
        raise ShapeMismatch("extensions do not share sub and quotient data")
    off = tuple(linalg.mat_add(x, y) for x, y in zip(e1.off, e2.off))
    return BlockExtension(e1.ps, e1.quot, e1.sub, off)


def check_tensor_compat(m: DiffModule, n: DiffModule) -> bool:
    """Matrix form of the Baer-sum compatibility of prolongation with
    tensor products: every parameter block of the prolonged tensor product
    is B_j(M)⊗I + I⊗B_j(N)."""
    if m.ps != n.ps:
        raise StructureMismatch("modules over different parameterized structures")
    require_flat(m)
    require_flat(n)
    pm = prolong_module(m)
    pn = prolong_module(n)
    pt = prolong_module(tensor(m, n))
    im = linalg.identity(m.spec, m.rank)
    i_n = linalg.identity(m.spec, n.rank)
    for i in range(m.ps.principal_count):
        for j in range(m.ps.parameter_count):
            expected = linalg.mat_add(
                linalg.kron(pm.block(i, j), i_n), linalg.kron(im, pn.block(i, j))
            )
            if not linalg.mat_eq(pt.block(i, j), expected):
                return False
    return True


# --- closure generation ---------------------------------------------------------------


@dataclass
class ClosureItem:
    label: str
    module: DiffModule
    prolong_depth: int


@dataclass
class ClosureResult:
    items: list
    truncated_by_rank: list
    truncated_by_items: bool


def generate_closure(
    m: DiffModule, depth: int, rank_cap: int, max_items: int = 32
) -> ClosureResult:
    """Breadth-first enumeration of modules reachable from the seed by
    duals, prolongations, tensor products and direct sums.

    ``depth`` caps the number of nested prolongations, ``rank_cap`` prunes
    large modules (recorded in ``truncated_by_rank``), and ``max_items``
    bounds the enumeration itself, since the reachable set is infinite in
    general; hitting it sets ``truncated_by_items``.  Duplicates are pruned
    by exact matrix equality, and the discovery order is deterministic.
    """
    require_flat(m)
    items: list[ClosureItem] = [ClosureItem("M", m, 0)]
    truncated_rank: list[str] = []
    truncated_items = False

    def try_add(label: str, module: DiffModule, pdepth: int) -> bool:
        nonlocal truncated_items
        if module.rank > rank_cap:
            truncated_rank.append(label)
            return False
        for it in items:
            if it.module == module:
                return False
        if len(items) >= max_items:
            truncated_items = True
            return False
        items.append(ClosureItem(label, module, pdepth))
        return True

    i = 0
    while i < len(items) and not truncated_items:
        it = items[i]
        candidates: list[tuple[str, DiffModule, int]] = [
            (f"dual({it.label})", dual(it.module), it.prolong_depth)
        ]
        if it.prolong_depth < depth:
            candidates.append(
                (
                    f"at1({it.label})",
                    prolong_module(it.module).core,
                    it.prolong_depth + 1,
                )
            )
        for other in items[: i + 1]:
            candidates.append(
                (
                    f"tensor({it.label},{other.label})",
                    tensor(it.module, other.module),
                    max(it.prolong_depth, other.prolong_depth),
                )
            )
            candidates.append(
                (
                    f"sum({it.label},{other.label})",
                    direct_sum(it.module, other.module),
                    max(it.prolong_depth, other.prolong_depth),
                )
            )
        for label, module, pdepth in candidates:
            if truncated_items:
                break
            try_add(label, module, pdepth)
        i += 1
    return ClosureResult(items, truncated_rank, truncated_items)
