"""Generator pairs: an involution x and an order-3 element y per (n, q, a).

The 9x9 seed matrices live in data/figures.json (symbolic [num, den,
a-power] entries, checksummed); everything else is permutation plumbing
around them. Construction re-verifies every structural invariant it can
and raises TranscriptionError on any mismatch, so a corrupted data file
cannot produce a silently wrong pair.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ._dims import CASE_A_DIMS, b_params, case_of, unsupported_message
from .fields import FieldCtx, FieldElem, elem_to_json, field_to_json, is_square, subfield_degree
from .forms import OrthoSpace, gram_matrix, in_omega, is_isometry
from .linalg import Matrix, charpoly, eigenspace, minpoly, poly_from_elems, restrict, unit_vector


class GenError(ValueError):
    pass


class Unsupported(GenError):
    def __init__(self, n):
        super().__init__(unsupported_message(n))
        self.n = n


class ZeroParameter(GenError):
    pass


class NoAdmissibleParameter(GenError):
    pass


class NotAdmissible(GenError):
    pass


class DivisionByZero(GenError):
    pass


class WrongCase(GenError):
    pass


class TranscriptionError(GenError):
    """A figure-derived invariant failed; the build must not continue."""


# ---------------------------------------------------------------------------
# case classification


@dataclass(frozen=True)
class CaseTag:
    case: str  # "A" | "B5" | "B6"
    m: int | None = None
    r: int | None = None


def classify(n: int) -> CaseTag:
    case = case_of(n)
    if case is None:
        raise Unsupported(n)
    if case == "A":
        return CaseTag("A")
    m, r = b_params(n)
    return CaseTag(case, m, r)


# ---------------------------------------------------------------------------
# figure data


@lru_cache(maxsize=1)
def _figures() -> dict:
    raw = resources.files("omega23").joinpath("data/figures.json").read_text()
    blob = json.loads(raw)
    canon = json.dumps(blob["figures"], sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canon.encode()).hexdigest()
    if digest != blob["sha256"]:
        raise TranscriptionError("figure data file failed its checksum")
    return blob["figures"]


def _instantiate(ctx: FieldCtx, name: str, a_vec) -> np.ndarray:
    """Evaluate a symbolic figure matrix at the parameter a."""
    sym = _figures()[name]
    rows = len(sym)
    cols = len(sym[0])
    out = np.zeros((rows, cols, ctx.f), dtype=np.int64)
    powers = {0: ctx.one.copy()}
    for i in range(rows):
        for j in range(cols):
            num, den, apow = sym[i][j]
            if num == 0:
                continue
            if apow not in powers:
                if apow < 0 and not np.asarray(a_vec).any():
                    raise DivisionByZero("a = 0 is not invertible in the figure entries")
                powers[apow] = ctx.pow(a_vec, apow)
            val = ctx.mul(ctx.coerce(num), powers[apow])
            if den != 1:
                val = ctx.mul(val, ctx.inv(ctx.coerce(den)))
            out[i, j] = val
    return out


def _perm_matrix(ctx: FieldCtx, n: int, cycles) -> Matrix:
    """Permutation matrix sending e_a -> e_b along each cycle (a, b, ...)."""
    sigma = list(range(n))
    for cyc in cycles:
        for k, src in enumerate(cyc):
            dst = cyc[(k + 1) % len(cyc)]
            sigma[src - 1] = dst - 1
    d = np.zeros((n, n, ctx.f), dtype=np.int64)
    for j, i in enumerate(sigma):
        d[i, j, 0] = 1
    return Matrix(ctx, d)


def _embed_tail(ctx: FieldCtx, n: int, block: np.ndarray) -> Matrix:
    """diag(I_{n-k}, block) for a (k, k, f) block."""
    k = block.shape[0]
    d = np.zeros((n, n, ctx.f), dtype=np.int64)
    for i in range(n - k):
        d[i, i, 0] = 1
    d[n - k :, n - k :] = block
    return Matrix(ctx, d)


# case-A permutation parts, 1-based cycles
_X1_CYCLES_A = {9: [], 11: [(1, 3), (2, 4)], 13: [(1, 2), (4, 5)], 17: [(1, 3), (2, 4), (5, 6), (8, 9)]}
_Y1_CYCLES_A = {9: [], 11: [], 13: [(2, 3, 4)], 17: [(3, 4, 5), (6, 7, 8)]}


def _nu1_cycles(r: int, n_even: bool):
    if r == 0:
        return [(1, 2)] if n_even else []
    if r == 1:
        return [(1, 2), (3, 6)] if n_even else [(1, 2)]
    return [(1, 3), (2, 4), (7, 10)] if n_even else [(1, 3), (2, 4)]


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibleResult:
    ok: bool
    reasons: tuple[str, ...]

    def __bool__(self):
        return self.ok


def _exclusion_value(ctx: FieldCtx, n: int, a_vec):
    """Case-A exclusion polynomial value at a, or None when there is none."""
    if n == 9:
        poly = poly_from_elems(ctx, [ctx.coerce(-1), ctx.coerce(-1), ctx.one])
    elif n == 11:
        lin = poly_from_elems(ctx, [ctx.coerce(-1), ctx.one])
        cub = poly_from_elems(ctx, [ctx.one, ctx.one, ctx.coerce(2), ctx.one])
        return ctx.mul(lin.eval_elem(a_vec), cub.eval_elem(a_vec))
    elif n == 13:
        return None
    elif n == 17:
        poly = poly_from_elems(ctx, [ctx.one, ctx.coerce(-1), ctx.one, ctx.zero, ctx.one])
    else:
        raise WrongCase(f"n={n} is not a case-A dimension")
    return poly.eval_elem(a_vec)


def admissible(n: int, ctx: FieldCtx, a) -> AdmissibleResult:
    """Parameter test for the given dimension; reasons name failed clauses."""
    tag = classify(n)
    a_vec = ctx.coerce(a)
    if not a_vec.any():
        raise ZeroParameter("a must be nonzero")
    reasons = []
    if tag.case == "A":
        if subfield_degree(ctx, a_vec) != ctx.f:
            reasons.append("a-generates-proper-subfield")
        if not is_square(ctx, ctx.neg(a_vec)):
            reasons.append("minus-a-not-a-square")
        excl = _exclusion_value(ctx, n, a_vec)
        if excl is not None and not excl.any():
            reasons.append("exclusion-polynomial-vanishes")
    elif tag.case == "B5":
        if subfield_degree(ctx, a_vec) != ctx.f:
            reasons.append("a-generates-proper-subfield")
    else:  # B6
        a2 = ctx.mul(a_vec, a_vec)
        if subfield_degree(ctx, a2) != ctx.f:
            reasons.append("a-squared-generates-proper-subfield")
        if np.array_equal(a2, ctx.coerce(2)) or np.array_equal(a2, ctx.coerce(3)):
            reasons.append("a-squared-in-excluded-set")
    return AdmissibleResult(not reasons, tuple(reasons))


@dataclass(frozen=True)
class SearchResult:
    values: tuple[FieldElem, ...]
    guaranteed: bool
    inequality: str
    lhs: int
    rhs: int


def _nongen_bound(p: int, f: int) -> int:
    # upper bound for the number of elements lying in a proper subfield
    return p * (p ** (f // 2) - 1) // (p - 1)


def search_a(n: int, ctx: FieldCtx, all: bool = False) -> SearchResult:
    """Admissible parameters in canonical element order (first only unless all)."""
    tag = classify(n)
    values = []
    for i in range(1, ctx.q):
        cand = ctx.from_index(i)
        if admissible(n, ctx, cand):
            values.append(ctx.elem(cand))
            if not all:
                break
    if not values:
        raise NoAdmissibleParameter(f"no admissible a for n={n}, q={ctx.q}")
    p, f, q = ctx.p, ctx.f, ctx.q
    bound = _nongen_bound(p, f)
    if tag.case == "A":
        if f == 1:
            ineq, lhs, rhs = "explicit-witness-minus-one", 1, 0
        else:
            # (q-1)/2 candidates with -a square, minus subfield losses, minus
            # at most 4 roots of the exclusion polynomial, must stay positive
            ineq, lhs, rhs = "case-A-margin", (q - 1) // 2 - bound, 4
    elif tag.case == "B5":
        ineq, lhs, rhs = "field-generator-count", q - 1, bound
    else:
        if f == 1:
            ineq, lhs, rhs = "explicit-witness-one", 1, 0
        else:
            ineq, lhs, rhs = "even-dim-margin", q - 2 * bound, 1
    return SearchResult(tuple(values), lhs > rhs, ineq, lhs, rhs)


def default_a(n: int, ctx: FieldCtx) -> FieldElem:
    """Deterministic default parameter per case."""
    tag = classify(n)
    if tag.case == "A":
        if ctx.f == 1:
            return ctx.elem(-1)
        if ctx.q == 9:
            return ctx.elem([0, 1])  # root of t^2 + 1
        return search_a(n, ctx).values[0]
    if tag.case == "B5":
        for i in range(1, ctx.q):
            cand = ctx.from_index(i)
            if subfield_degree(ctx, cand) == ctx.f:
                return ctx.elem(cand)
        raise NoAdmissibleParameter(f"no field generator in GF({ctx.q})")
    if ctx.f == 1:
        return ctx.elem(1)
    return search_a(n, ctx).values[0]


# ---------------------------------------------------------------------------
# pair construction


@dataclass(frozen=True)
class GenPair:
    n: int
    ctx: FieldCtx
    a: FieldElem
    tag: CaseTag
    x: Matrix
    y: Matrix
    space: OrthoSpace


def _require(cond: bool, what: str):
    if not cond:
        raise TranscriptionError(f"construction invariant failed: {what}")


def build_pair(n: int, ctx: FieldCtx, a=None, force: bool = False) -> GenPair:
    tag = classify(n)
    a_elem = default_a(n, ctx) if a is None else ctx.elem(a)
    a_vec = a_elem._arr()
    if not a_vec.any():
        if tag.case == "A":
            raise DivisionByZero("a = 0 is not invertible in the figure entries")
        raise ZeroParameter("a must be nonzero")
    if not force:
        res = admissible(n, ctx, a_vec)
        if not res:
            raise NotAdmissible(
                f"a={a_elem!r} fails admissibility for n={n}: {', '.join(res.reasons)}"
            )

    if tag.case == "A":
        x1 = _perm_matrix(ctx, n, _X1_CYCLES_A[n])
        y1 = _perm_matrix(ctx, n, _Y1_CYCLES_A[n])
        x2 = _embed_tail(ctx, n, _instantiate(ctx, "xbar", a_vec))
        y2 = _embed_tail(ctx, n, _instantiate(ctx, "ybar", a_vec))
        space = gram_matrix("A", n, ctx)
    else:
        m, r = tag.m, tag.r
        nu1 = _nu1_cycles(r, n % 2 == 0)
        nu2 = [(3 * j + r + 3, 3 * j + r + 4) for j in range(m)]
        n_transpositions = len(nu1) + len(nu2)
        _require(n_transpositions % 2 == 0, "transposition count N must be even")
        expected_n = {0: (1, 0), 1: (2, 1), 2: (3, 2)}[r][0 if n % 2 == 0 else 1] + m
        _require(n_transpositions == expected_n, "transposition count table")
        x1 = _perm_matrix(ctx, n, nu1 + nu2)
        y1 = _perm_matrix(ctx, n, [(3 * j + r + 1, 3 * j + r + 2, 3 * j + r + 3) for j in range(m)])
        xt = _instantiate(ctx, "xtilde", a_vec)
        _check_sl4_block(ctx, xt)
        x2 = _embed_tail(ctx, n, xt)
        y2 = _embed_tail(ctx, n, _instantiate(ctx, "ytilde", a_vec))
        space = gram_matrix("B", n, ctx)

    _require(x1 @ x2 == x2 @ x1, "x1 and x2 must commute")
    _require(y1 @ y2 == y2 @ y1, "y1 and y2 must commute")
    x = x1 @ x2
    y = y1 @ y2
    ident = Matrix.identity(ctx, n)
    _require(x @ x == ident, "x^2 = I")
    _require(y @ y @ y == ident, "y^3 = I")
    _require(y != ident, "y != I")
    _require(is_isometry(space, x), "x preserves the form")
    _require(is_isometry(space, y), "y preserves the form")
    _require(np.array_equal(x.det(), ctx.one), "det x = 1")
    _require(np.array_equal(y.det(), ctx.one), "det y = 1")
    _require(np.array_equal(y1.det(), ctx.one), "y1 is an even permutation")
    if tag.case == "A":
        _x3_decomposition_check(ctx, n, x, x1, a_vec)
    if not force:
        _require(in_omega(space, x).ok, "x has trivial spinor norm")
        _require(in_omega(space, y).ok, "y has trivial spinor norm")
    return GenPair(n=n, ctx=ctx, a=a_elem, tag=tag, x=x, y=y, space=space)


def _check_sl4_block(ctx: FieldCtx, xt: np.ndarray):
    """x-tilde must be diag(1, h, h^{-T}) with h in SL_4."""
    h = Matrix(ctx, xt[1:5, 1:5])
    hmt = Matrix(ctx, xt[5:9, 5:9])
    _require(np.array_equal(xt[0, 0], ctx.one) and not xt[0, 1:].any() and not xt[1:, 0].any(),
             "x-tilde corner block")
    _require(not xt[1:5, 5:9].any() and not xt[5:9, 1:5].any(), "x-tilde off blocks vanish")
    _require(np.array_equal(h.det(), ctx.one), "h in SL_4")
    _require(hmt == h.inverse().transpose(), "lower block is h^{-T}")


def _x3_decomposition_check(ctx: FieldCtx, n: int, x: Matrix, x1: Matrix, a_vec):
    """x = (even permutation) * diag(I_{n-3}, x3) with x3 the printed block."""
    xbar = _instantiate(ctx, "xbar", a_vec)
    x3 = xbar[6:, 6:]
    tail = _embed_tail(ctx, n, x3)
    perm_part = x @ tail.inverse()
    d = perm_part.data
    _require(
        bool(((d[:, :, 0] == 0) | (d[:, :, 0] == 1)).all()) and not d[:, :, 1:].any()
        and (d[:, :, 0].sum(axis=0) == 1).all() and (d[:, :, 0].sum(axis=1) == 1).all(),
        "x factors as permutation times diag(I, x3)",
    )
    _require(np.array_equal(perm_part.det(), ctx.one), "permutation part of x is even")


def x3_block(ctx: FieldCtx, a) -> Matrix:
    """The 3x3 tail block of x-bar (the only spinor-norm carrier in case A)."""
    a_vec = ctx.coerce(a)
    if not a_vec.any():
        raise DivisionByZero("a = 0 is not invertible in the figure entries")
    return Matrix(ctx, _instantiate(ctx, "xbar", a_vec)[6:, 6:])


# ---------------------------------------------------------------------------
# tau and the distinguished subspaces

# [u,v] evaluated as u^-1 v^-1 u v reproduces the printed 8x8 block; the
# reversed orientation yields its inverse-conjugate and is reported, not used.
COMMUTATOR_ORIENTATION = "inverse-first"


def commutator(u: Matrix, v: Matrix, orientation: str = COMMUTATOR_ORIENTATION) -> Matrix:
    if orientation == "inverse-first":
        return u.inverse() @ v.inverse() @ u @ v
    if orientation == "plain-first":
        return u @ v @ u.inverse() @ v.inverse()
    raise GenError(f"unknown commutator orientation {orientation!r}")


def theta_block(ctx: FieldCtx, a, corrected: bool) -> Matrix:
    """The printed 8x8 block of tau, with the even-dimension correction if asked."""
    base = _instantiate(ctx, "theta0", ctx.coerce(a))
    if corrected:
        base = (base + _instantiate(ctx, "theta_correction_even_dim", ctx.coerce(a))) % ctx.p
    return Matrix(ctx, base)


def tau(pair: GenPair) -> Matrix:
    """[x,y]^24, verified against the printed block structure."""
    if pair.tag.case == "A":
        raise WrongCase("tau is defined for the case-B pairs")
    ctx = pair.ctx
    n = pair.n
    t = commutator(pair.x, pair.y).pow(24)
    cp = charpoly(t)
    tm1 = poly_from_elems(ctx, [ctx.coerce(-1), ctx.one])
    expect = tm1
    for _ in range(n - 1):
        expect = expect * tm1
    _require(cp == expect, "charpoly(tau) = (T-1)^n")
    theta = theta_block(ctx, pair.a._arr(), corrected=pair.tag.case == "B6")
    _require(t == _embed_tail(ctx, n, theta.data), "tau = diag(I, printed block)")
    mp = minpoly(theta)
    _require(mp == tm1 * tm1 * tm1, "minpoly of the block is (T-1)^3")
    s9 = [unit_vector(ctx, n, i) for i in range(n - 9, n)]
    fix = eigenspace(restrict(t, s9), 1)
    a2 = ctx.mul(pair.a._arr(), pair.a._arr())
    expected_dim = 7 if pair.tag.case == "B6" and np.array_equal(a2, ctx.coerce(3)) else 5
    _require(fix.shape[0] == expected_dim, "fixed-space dimension of tau on S9")
    return t


@dataclass(frozen=True)
class SpecialSubspaces:
    n: int
    ctx: FieldCtx
    S9: tuple
    A_summands: tuple  # tuple of bases (each a tuple of vectors); empty at n=12
    B_summands: tuple
    C: tuple  # empty at n=12

    def E(self, ell: int) -> tuple:
        return tuple(unit_vector(self.ctx, self.n, i) for i in range(ell))

    def S(self, ell: int) -> tuple:
        return tuple(unit_vector(self.ctx, self.n, i) for i in range(self.n - ell, self.n))


_A_SPECIAL = {
    15: [[1, 3, 4]],
    16: [[1, 5], [2, 4]],
    19: [[1, 2, 4, 5], [3, 7, 8]],
    20: [[1, 2, 6, 8], [3, 4, 5, 9]],
    23: [[1, 2, 3, 4, 5, 6, 8, 9], [7, 11, 12]],
}
_A_GENERIC = {
    0: [[1, 2, 3, 4, 6, 7]],
    1: [[1, 2, 4, 5], [3, 6, 7, 8, 10, 11]],
    2: [[1, 2, 3, 4, 5, 6, 8, 9], [7, 10, 11, 12, 14, 15]],
}


def special_subspaces(pair: GenPair) -> SpecialSubspaces:
    if pair.tag.case == "A":
        raise WrongCase("the distinguished subspaces belong to the case-B pairs")
    ctx, n = pair.ctx, pair.n
    e = lambda i: unit_vector(ctx, n, i - 1)  # 1-based
    s9 = tuple(unit_vector(ctx, n, i) for i in range(n - 9, n))
    if n == 12:
        return SpecialSubspaces(n, ctx, s9, (), (), ())
    m, r = pair.tag.m, pair.tag.r
    a_lists = _A_SPECIAL.get(n, _A_GENERIC[r])
    a_summands = tuple(tuple(e(i) for i in lst) for lst in a_lists)
    b_summands = tuple(
        tuple(e(i) for i in (5 + 4 * r + 3 * j, 9 + 4 * r + 3 * j, 10 + 4 * r + 3 * j))
        for j in range(m - 3 - r)
    )
    c_basis = tuple(e(i) for i in [n - 13, n - 10, n - 9] + list(range(n - 8, n + 1)))
    dim_a = sum(len(b) for b in a_summands)
    dim_b = sum(len(b) for b in b_summands)
    _require(dim_a + dim_b + 12 == n, "dimension bookkeeping of the splitting")
    stacked = np.stack([v for grp in (*a_summands, *b_summands, (c_basis)) for v in grp])
    _require(
        Matrix(ctx, np.swapaxes(stacked, 0, 1)).rank() == n,
        "the splitting spans the whole space",
    )
    return SpecialSubspaces(n, ctx, s9, a_summands, b_summands, c_basis)


# ---------------------------------------------------------------------------
# JSON form


def pair_to_json(pair: GenPair) -> dict:
    out = field_to_json(pair.ctx)
    out.update(
        {
            "n": pair.n,
            "a": elem_to_json(pair.ctx, pair.a._arr()),
            "case": pair.tag.case,
            "x": pair.x.to_json(),
            "y": pair.y.to_json(),
            "J": pair.space.J.to_json(),
            "eps": pair.space.eps,
        }
    )
    return out


def pair_to_text(pair: GenPair) -> str:
    """Plain-text matrix dump for human diffing."""
    lines = [
        f"n = {pair.n}, q = {pair.ctx.q}, case = {pair.tag.case}, "
        f"a = {elem_to_json(pair.ctx, pair.a._arr())}, eps = {pair.space.eps}",
    ]
    for name, mat in (("x", pair.x), ("y", pair.y), ("J", pair.space.J)):
        lines.append(f"{name} =")
        for i in range(mat.rows):
            row = []
            for j in range(mat.cols):
                v = elem_to_json(pair.ctx, mat.data[i, j])
                row.append(str(v))
            lines.append("  [" + ", ".join(row) + "]")
    return "\n".join(lines) + "\n"
