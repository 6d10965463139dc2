"""Identity batteries and the order-claim table.

Every check is exact field arithmetic; a "pass" means equality of
canonical forms. Reports are plain data so the CLI can serialize them
byte-for-byte reproducibly (timing excluded).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
import sympy

from .fields import FieldCtx, elem_to_json, is_square, make_field
from .forms import in_omega, is_isometry
from .generators import (
    GenPair,
    WrongCase,
    build_pair,
    commutator,
    theta_block,
    special_subspaces,
    _instantiate,
)
from .linalg import (
    Matrix,
    OrderSearchExceeded,
    Poly,
    charpoly,
    eigenspace,
    element_order,
    evaluate_word,
    minpoly,
    parse_word,
    poly_from_elems,
    poly_one,
    restrict,
    unit_vector,
)


class VerifyError(ValueError):
    pass


class WrongExtensionDegree(VerifyError):
    pass


# ---------------------------------------------------------------------------
# report plumbing


@dataclass(frozen=True)
class CheckEntry:
    name: str
    status: str  # "pass" | "fail" | "skip"
    expected: str
    actual: str
    paper_ref: str

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
            "paper_ref": self.paper_ref,
        }


@dataclass(frozen=True)
class VerificationReport:
    params: dict
    checks: tuple
    timing_ms: float

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "checks": [c.to_json() for c in self.checks],
            "timing_ms": self.timing_ms,
        }


class _Recorder:
    """Collects check entries and runs the clock for one report."""

    def __init__(self, params: dict):
        self.params = params
        self.checks = []
        self._t0 = time.perf_counter()

    def add(self, name, ok, expected, actual, ref):
        status = "pass" if ok else "fail"
        self.checks.append(CheckEntry(name, status, str(expected), str(actual), ref))

    def skip(self, name, reason, ref, actual=""):
        self.checks.append(CheckEntry(name, "skip", reason, str(actual), ref))

    def report(self) -> VerificationReport:
        elapsed = (time.perf_counter() - self._t0) * 1000.0
        return VerificationReport(self.params, tuple(self.checks), elapsed)


def _pair_params(pair: GenPair, forced: bool = False) -> dict:
    return {
        "n": pair.n,
        "q": pair.ctx.q,
        "a": elem_to_json(pair.ctx, pair.a._arr()),
        "case": pair.tag.case,
        "eps": pair.space.eps,
        "forced": forced,
    }


def _fmt(ctx: FieldCtx, value) -> str:
    return json.dumps(elem_to_json(ctx, np.asarray(value)))


def _entrywise_frobenius(ctx: FieldCtx, arr: np.ndarray, k: int) -> np.ndarray:
    """p^k-th power applied to every element of an (..., f) array."""
    e = ctx.p**k
    out = np.zeros(arr.shape, dtype=np.int64)
    out[..., 0] = 1
    base = np.asarray(arr) % ctx.p
    while e:
        if e & 1:
            out = ctx.mul(out, base)
        base = ctx.mul(base, base)
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# structural battery


def verify_structural(pair: GenPair, forced: bool = False) -> VerificationReport:
    ctx, n = pair.ctx, pair.n
    rec = _Recorder(_pair_params(pair, forced))
    ident = Matrix.identity(ctx, n)
    xx = pair.x @ pair.x
    rec.add("x-squared-identity", xx == ident, "I", "I" if xx == ident else "not I",
            "generators/involution")
    ycube = pair.y @ pair.y @ pair.y
    rec.add("y-cubed-identity", ycube == ident, "I", "I" if ycube == ident else "not I",
            "generators/order-three")
    rec.add("y-nontrivial", pair.y != ident, "y != I",
            "y != I" if pair.y != ident else "y == I", "generators/order-three")
    for name, g in (("x", pair.x), ("y", pair.y)):
        iso = is_isometry(pair.space, g)
        rec.add(f"{name}-preserves-form", iso, "gram matrix preserved",
                "preserved" if iso else "violated", "generators/isometry")
        det_one = np.array_equal(g.det(), ctx.one)
        rec.add(f"{name}-determinant-one", det_one, "1", _fmt(ctx, g.det()),
                "generators/determinant")
        if name == "x" and pair.tag.case == "A":
            # covered below: x sits in the spinor kernel iff -a is a square,
            # so an unconditional row would misreport forced parameters
            continue
        verdict = in_omega(pair.space, g)
        rec.add(f"{name}-spinor-trivial", verdict.ok, "trivial spinor class",
                "trivial" if verdict.ok else ",".join(verdict.reasons),
                "generators/spinor-kernel")
    if pair.tag.case == "A":
        minus_a_square = is_square(ctx, ctx.neg(pair.a._arr()))
        member = in_omega(pair.space, pair.x).ok
        rec.add("tail-block-membership-criterion", member == minus_a_square,
                f"membership iff -a is a square (here {minus_a_square})",
                f"membership: {member}", "generators/tail-membership")
    return rec.report()


# ---------------------------------------------------------------------------
# case-A identity battery

_V1_WORDS = {9: "[x,y]", 11: "(xy^2)^3xy", 13: "(xy^2)^2xy", 17: "(xy^2)^6xy"}
_V1_TARGETS = {9: 1, 11: 3, 13: 2, 17: 6}
_SEED_IMAGES = {
    9: (("y", 1, 2), ("y", 2, 3), ("x", 3, 4), ("y", 4, 5)),
    11: (("x", 1, 3), ("y", 3, 4), ("y", 4, 5), ("x", 4, 2)),
    13: (("x", 1, 2), ("y", 2, 3), ("y", 3, 4), ("x", 4, 5)),
    17: (("x", 1, 3), ("y", 3, 4), ("y", 4, 5), ("x", 4, 2)),
}
_SIGMA = {9: 1, 11: 0, 13: 0, 17: 0}
_KAPPA = {9: 3, 11: 2, 13: 4, 17: 4}


def _poly_t_power_minus_one(ctx: FieldCtx, k: int) -> Poly:
    coeffs = np.zeros((k + 1, ctx.f), dtype=np.int64)
    coeffs[0] = ctx.coerce(-1)
    coeffs[k] = ctx.one
    return Poly(ctx, coeffs)


def _unit_index(ctx: FieldCtx, vec) -> int | None:
    """Index k when vec == e_k exactly (coefficient one), else None."""
    nz = np.nonzero(vec.any(axis=-1))[0]
    if len(nz) != 1:
        return None
    k = int(nz[0])
    return k if np.array_equal(vec[k], ctx.one) else None


def verify_caseA_identities(pair: GenPair, forced: bool = False) -> VerificationReport:
    if pair.tag.case != "A":
        raise WrongCase("the case-A battery needs a case-A pair")
    ctx, n = pair.ctx, pair.n
    rec = _Recorder(_pair_params(pair, forced))
    a = pair.a._arr()
    ainv = ctx.inv(a)
    one = ctx.one
    xy = pair.x @ pair.y

    # (1) characteristic polynomial and trace of xy
    expect_cp = (
        poly_from_elems(ctx, [a, one])
        * poly_from_elems(ctx, [ainv, one])
        * _poly_t_power_minus_one(ctx, n - 2)
    )
    actual_cp = charpoly(xy)
    rec.add("product-charpoly", actual_cp == expect_cp,
            "(T+a)(T+1/a)(T^(n-2)-1)", "match" if actual_cp == expect_cp else "mismatch",
            "caseA/charpoly")
    expect_tr = ctx.neg(ctx.add(a, ainv))
    rec.add("product-trace", np.array_equal(xy.trace(), expect_tr),
            _fmt(ctx, expect_tr), _fmt(ctx, xy.trace()), "caseA/trace")

    # (2) minimal polynomial of (xy)^(n-2), keyed on a geometric selector sum
    w = xy.pow(n - 2)
    selector = ctx.zero.copy()
    term = one.copy()
    minus_a = ctx.neg(a)
    for _ in range(2 * n - 4):
        selector = ctx.add(selector, term)
        term = ctx.mul(term, minus_a)
    a_pow = ctx.pow(a, n - 2)
    two_factor = poly_from_elems(ctx, [ctx.coerce(-1), one]) * poly_from_elems(ctx, [a_pow, one])
    if not selector.any():
        expect_mp = two_factor
        branch = "degenerate"
    else:
        expect_mp = two_factor * poly_from_elems(ctx, [ctx.inv(a_pow), one])
        branch = "generic"
    actual_mp = minpoly(w)
    rec.add("power-minpoly-two-case", actual_mp == expect_mp,
            f"{branch} branch", "match" if actual_mp == expect_mp else "mismatch",
            "caseA/minpoly")

    # (3) bireflection: fixed space of codimension 2
    fix_dim = eigenspace(w, 1).shape[0]
    rec.add("power-bireflection", fix_dim == n - 2, str(n - 2), str(fix_dim),
            "caseA/bireflection")

    # (4) transitivity: BFS along exact basis-vector images under x, y, y^2
    y2 = pair.y @ pair.y
    gens = {"x": pair.x, "y": pair.y, "y2": y2}
    units = [unit_vector(ctx, n, i) for i in range(n)]
    reached = {0}
    frontier = [0]
    while frontier:
        j = frontier.pop()
        for g in gens.values():
            k = _unit_index(ctx, g @ units[j])
            if k is not None and k not in reached:
                reached.add(k)
                frontier.append(k)
    wanted = set(range(n - 3))
    rec.add("transitivity-reachable", wanted <= reached,
            f"e_1..e_{n - 3} reachable from e_1",
            f"reached {len(reached & wanted)} of {n - 3}", "caseA/transitivity")
    seeds_ok = all(
        _unit_index(ctx, gens[g] @ units[src - 1]) == dst - 1
        for (g, src, dst) in _SEED_IMAGES[n]
    )
    rec.add("transitivity-seed-images", seeds_ok, "listed unit images",
            "match" if seeds_ok else "mismatch", "caseA/transitivity")

    # (5) the fixed line of the distinguishing element, plus tail actions of y
    g_word = evaluate_word(parse_word(_V1_WORDS[n]), pair.x, pair.y)
    v1 = eigenspace(g_word, 1)
    target = _V1_TARGETS[n] - 1
    line_ok = v1.shape[0] == 1 and _unit_index(ctx, v1[0]) == target
    rec.add("fixline-of-distinguishing-element", line_ok,
            f"<e_{target + 1}>", f"dim {v1.shape[0]}", "caseA/fixline")
    tails_ok = (
        np.array_equal(pair.y @ units[n - 4],
                       ctx.sub(ctx.scale(ctx.coerce(-2), units[n - 3]), units[n - 4]))
        and np.array_equal(y2 @ units[n - 6], units[n - 2])
        and np.array_equal(y2 @ units[n - 3],
                           ctx.scale(ctx.neg(ctx.inv(ctx.coerce(2))), units[n - 1]))
    )
    rec.add("y-tail-vector-images", tails_ok, "three listed tail images",
            "match" if tails_ok else "mismatch", "caseA/tail-images")

    # (6) commutator traces with the dimension-keyed constants
    h = commutator(pair.x, pair.y)
    base = ctx.add(ctx.add(one, ctx.mul(a, a)), ctx.mul(ainv, ainv))
    expect_t1 = ctx.add(base, ctx.coerce(_SIGMA[n]))
    rec.add("commutator-trace", np.array_equal(h.trace(), expect_t1),
            _fmt(ctx, expect_t1), _fmt(ctx, h.trace()), "caseA/commutator-trace")
    expect_t2 = ctx.sub(ctx.sub(ctx.mul(base, base), ctx.mul(ctx.coerce(4), a)),
                        ctx.coerce(_KAPPA[n]))
    h2 = h @ h
    rec.add("commutator-square-trace", np.array_equal(h2.trace(), expect_t2),
            _fmt(ctx, expect_t2), _fmt(ctx, h2.trace()), "caseA/commutator-trace")
    return rec.report()


# ---------------------------------------------------------------------------
# case-B identity battery

_CYCLES_SPECIAL = {
    15: [(3, 4)],
    16: [(1, 5), (2, 4)],
    19: [(1, 5, 4, 2), (3, 8, 7)],
    20: [(1, 6, 8, 2), (3, 4, 9, 5)],
    23: [(1, 6, 5, 3, 4, 9, 8, 2), (7, 12, 11)],
}
_CYCLES_GENERIC = {
    0: [(1, 4, 3, 2, 7, 6)],
    1: [(1, 5, 4, 2), (3, 8, 7), (6, 11, 10)],
    2: [(1, 6, 8, 2), (3, 4, 9, 5), (7, 12, 11, 10, 15, 14)],
    3: [(2, 7, 6), (3, 4)],
    4: [(1, 5), (2, 4), (3, 8, 7, 6, 11, 10)],
    5: [(1, 6, 5, 3, 4, 9, 8, 2), (7, 12, 11), (10, 15, 14)],
}

# closed forms as integer polynomials in a (ascending powers)
_B5_DET1 = [0] * 10 + [-(2**35) * 3, 0, -(2**35) * 4]
_B5_DET2 = [0] * 10 + [(2**35) * 3, 0, -(2**35) * 28]
_B6_DET1 = [0] * 6 + [(2**35) * 32, 0, -(2**35) * 42, 0, (2**35) * 21, 0, -(2**35) * 4]
_B6_DET2 = [0] * 6 + [-(2**35) * 32, 0, -(2**35) * 150, 0, (2**35) * 139, 0, -(2**35) * 28]
_B5_TR_YT = [0, 0, 128, 0, -2176]
_B5_TR_Y2T = [0, 0, 128, 0, 1920]
_B5_TR_LONG = [0, 0, 256, 0, 3840, 16384, -49152]
_B6_TR_YT = [-224, 0, 6784, 0, -2176]
_B6_TR_Y2T = [-288, 0, -5504, 0, 1920]


def _eval_int_poly(ctx: FieldCtx, coeffs, a) -> np.ndarray:
    acc = ctx.zero.copy()
    power = ctx.one.copy()
    for c in coeffs:
        if c:
            acc = ctx.add(acc, ctx.mul(ctx.coerce(c), power))
        power = ctx.mul(power, a)
    return acc


def _s9_restrictions(pair: GenPair):
    ctx, n = pair.ctx, pair.n
    s9 = [unit_vector(ctx, n, i) for i in range(n - 9, n)]
    tau_full = commutator(pair.x, pair.y).pow(24)
    y9 = restrict(pair.y, s9)
    t9 = restrict(tau_full, s9)
    return y9, t9, tau_full


def verify_caseB_identities(pair: GenPair, forced: bool = False) -> VerificationReport:
    if pair.tag.case == "A":
        raise WrongCase("the case-B battery needs a case-B pair")
    ctx, n = pair.ctx, pair.n
    rec = _Recorder(_pair_params(pair, forced))
    a = pair.a._arr()
    one = ctx.one
    is_even_family = pair.tag.case == "B6"
    a2 = ctx.mul(a, a)
    exceptional = is_even_family and np.array_equal(a2, ctx.coerce(3))

    y9, t9, tau_full = _s9_restrictions(pair)

    # (1) the 24th commutator power: unipotent with a printed tail block
    cp = charpoly(tau_full)
    tm1 = poly_from_elems(ctx, [ctx.coerce(-1), one])
    expect_cp = poly_one(ctx)
    for _ in range(n):
        expect_cp = expect_cp * tm1
    rec.add("tau-charpoly-unipotent", cp == expect_cp, "(T-1)^n",
            "match" if cp == expect_cp else "mismatch", "caseB/tau-charpoly")
    theta = theta_block(ctx, a, corrected=is_even_family)
    block_ok = np.array_equal(t9.data[1:, 1:], theta.data)
    ident_col = (np.array_equal(t9.data[:, 0], Matrix.identity(ctx, 9).data[:, 0])
                 and not t9.data[0, 1:].any())
    rec.add("tau-tail-entrywise", block_ok and ident_col,
            "diag(1, printed 8x8 block)",
            "match" if (block_ok and ident_col) else "mismatch", "caseB/tau-block")
    mp = minpoly(theta)
    cube = tm1 * tm1 * tm1
    rec.add("tau-block-minpoly", mp == cube, "(T-1)^3",
            "match" if mp == cube else "mismatch", "caseB/tau-minpoly")
    fix_dim = eigenspace(t9, 1).shape[0]
    expect_dim = 7 if exceptional else 5
    rec.add("tau-tail-fixdim", fix_dim == expect_dim, str(expect_dim), str(fix_dim),
            "caseB/tau-fixdim")
    ytilde = _instantiate(ctx, "ytilde", a)
    y_match = np.array_equal(y9.data, ytilde)
    rec.add("tail-restriction-matches-figure", y_match,
            "restriction equals the printed 9x9 matrix",
            "match" if y_match else "mismatch", "caseB/tail-figure")

    # (2) action on the invariant splitting (absent at n = 12)
    if n == 12:
        rec.skip("commutator-cycle-action", "no invariant splitting at n = 12",
                 "caseB/action")
    else:
        g = commutator(pair.x, pair.y)
        sub = special_subspaces(pair)
        cycles = list(_CYCLES_SPECIAL.get(n, _CYCLES_GENERIC[n % 6]))
        m, r = pair.tag.m, pair.tag.r
        for j in range(m - 3 - r):
            cycles.append((5 + 4 * r + 3 * j, 10 + 4 * r + 3 * j, 9 + 4 * r + 3 * j))
        units = [unit_vector(ctx, n, i) for i in range(n)]
        in_cycles = {i for cyc in cycles for i in cyc}
        all_indices = set()
        for grp in sub.A_summands + sub.B_summands:
            for v in grp:
                all_indices.add(int(np.nonzero(v.any(axis=-1))[0][0]) + 1)
        ok = True
        for cyc in cycles:
            for pos, src in enumerate(cyc):
                dst = cyc[(pos + 1) % len(cyc)]
                if _unit_index(ctx, g @ units[src - 1]) != dst - 1:
                    ok = False
        for i in sorted(all_indices - in_cycles):
            if not np.array_equal(g @ units[i - 1], units[i - 1]):
                ok = False
        rec.add("commutator-cycle-action", ok, "listed permutation action",
                "match" if ok else "mismatch", "caseB/action")
        ok24 = all(restrict(g, list(basis)).pow(24).is_identity()
                   for basis in sub.A_summands)
        rec.add("commutator-first-summand-order", ok24, "24th power is identity",
                "holds" if ok24 else "violated", "caseB/action-order")
        ok3 = all(restrict(g, list(basis)).pow(3).is_identity()
                  for basis in sub.B_summands)
        rec.add("commutator-second-summand-order", ok3, "cube is identity",
                "holds" if ok3 else "violated", "caseB/action-order")

    # (3) the distinguished eigenvector of [y, tau] on the tail
    s_vec = np.zeros((9, ctx.f), dtype=np.int64)
    s_vec[0] = one
    s_vec[1] = ctx.neg(one)
    if exceptional:
        rec.skip("commutator-fixline", "undefined when a^2 = 3 in the even family",
                 "caseB/eigenvector")
    else:
        c = commutator(y9, t9)
        v1 = eigenspace(c, 1)
        ok = v1.shape[0] == 1 and np.array_equal(v1[0], s_vec)
        rec.add("commutator-fixline", ok, "line spanned by e_(n-8) - e_(n-7)",
                f"dim {v1.shape[0]}", "caseB/eigenvector")
    c_alt = commutator(y9, t9, "plain-first")
    v1_alt = eigenspace(c_alt, 1)
    alt_matches = v1_alt.shape[0] == 1 and np.array_equal(v1_alt[0], s_vec)
    rec.skip("commutator-fixline-alternate-orientation",
             "informational: opposite bracket orientation recorded for the record",
             "caseB/eigenvector", actual=f"dim {v1_alt.shape[0]}, same line: {alt_matches}")

    # (4) determinants of the two spanning matrices
    y2 = y9 @ y9
    ty2 = t9 @ y2
    t2y2 = t9 @ t9 @ y2
    elements_m1 = [Matrix.identity(ctx, 9), y9, y2, ty2, t2y2,
                   y9 @ ty2, y2 @ ty2, y9 @ t2y2, y2 @ t2y2]
    elements_m2 = [Matrix.identity(ctx, 9), y9, y2, ty2, t2y2,
                   y9 @ ty2, y9 @ t2y2, ty2 @ ty2, ty2 @ t2y2]
    det_forms = (_B6_DET1, _B6_DET2) if is_even_family else (_B5_DET1, _B5_DET2)
    for label, elements, form in (("first", elements_m1, det_forms[0]),
                                  ("second", elements_m2, det_forms[1])):
        cols = np.stack([e @ s_vec for e in elements], axis=1)
        det = Matrix(ctx, cols).det()
        expect = _eval_int_poly(ctx, form, a)
        rec.add(f"spanning-det-{label}", np.array_equal(det, expect),
                _fmt(ctx, expect), _fmt(ctx, det), "caseB/spanning-dets")

    # (5) restricted traces
    yt = y9 @ t9
    y2t = y2 @ t9
    if is_even_family:
        trace_checks = [
            ("trace-yt-squared", (yt @ yt).trace(), _B6_TR_YT),
            ("trace-y2t-squared", (y2t @ y2t).trace(), _B6_TR_Y2T),
            ("trace-yt", yt.trace(), [-16]),
        ]
    else:
        long_product = y2 @ t9 @ t9 @ yt @ yt
        trace_checks = [
            ("trace-yt-squared", (yt @ yt).trace(), _B5_TR_YT),
            ("trace-y2t-squared", (y2t @ y2t).trace(), _B5_TR_Y2T),
            ("trace-long-product", long_product.trace(), _B5_TR_LONG),
        ]
    for name, actual, form in trace_checks:
        expect = _eval_int_poly(ctx, form, a)
        rec.add(name, np.array_equal(actual, expect), _fmt(ctx, expect),
                _fmt(ctx, actual), "caseB/restricted-traces")

    # cube charpoly identity, specific to characteristic 3
    if ctx.p == 3:
        cp3 = charpoly(yt @ yt @ yt)
        a6 = ctx.pow(a, 6)
        a12 = ctx.mul(a6, a6)
        if is_even_family:
            f_coeffs = [one, ctx.neg(one), ctx.neg(ctx.add(ctx.sub(a12, a6), one)),
                        ctx.neg(a12), ctx.sub(a6, one), ctx.neg(a12),
                        ctx.neg(ctx.add(ctx.sub(a12, a6), one)), ctx.neg(one), one]
        else:
            f_coeffs = [one, one, ctx.neg(ctx.sub(ctx.add(a12, a6), one)),
                        ctx.neg(ctx.sub(a12, one)), ctx.neg(ctx.sub(a6, one)),
                        ctx.neg(ctx.sub(a12, one)), ctx.neg(ctx.sub(ctx.add(a12, a6), one)),
                        one, one]
        f_poly = Poly(ctx, np.stack(f_coeffs))
        expect3 = poly_from_elems(ctx, [ctx.coerce(-1), one]) * f_poly
        rec.add("cube-charpoly", cp3 == expect3,
                "(T-1) times the printed degree-8 factor",
                "match" if cp3 == expect3 else "mismatch", "caseB/cube-charpoly")
    else:
        rec.skip("cube-charpoly", "requires characteristic 3", "caseB/cube-charpoly")
    return rec.report()


def verify_caseB_closed_forms_all_a(n: int, ctx: FieldCtx) -> VerificationReport:
    """Determinant and trace closed forms for every nonzero parameter."""
    rec = _Recorder({"n": n, "q": ctx.q, "battery": "closed-forms-all-a"})
    wanted = {"spanning-det-first", "spanning-det-second", "trace-yt-squared",
              "trace-y2t-squared", "trace-yt", "trace-long-product", "cube-charpoly"}
    for i in range(1, ctx.q):
        a = ctx.from_index(i)
        pair = build_pair(n, ctx, a, force=True)
        sub = verify_caseB_identities(pair, forced=True)
        for entry in sub.checks:
            if entry.name in wanted and entry.status != "skip":
                rec.checks.append(CheckEntry(
                    f"{entry.name}[a={elem_to_json(ctx, a)}]", entry.status,
                    entry.expected, entry.actual, entry.paper_ref))
    return rec.report()


# ---------------------------------------------------------------------------
# order claims


@dataclass(frozen=True)
class ExactOrder:
    k: int

    def check(self, order: int) -> bool:
        return order == self.k

    def describe(self) -> str:
        return f"order = {self.k}"

    def to_json(self) -> dict:
        return {"type": "ExactOrder", "k": self.k}


@dataclass(frozen=True)
class DivisibleBy:
    r: int

    def check(self, order: int) -> bool:
        return order % self.r == 0

    def describe(self) -> str:
        return f"order divisible by {self.r}"

    def to_json(self) -> dict:
        return {"type": "DivisibleBy", "r": self.r}


@dataclass(frozen=True)
class DivisibleByPrimeAtLeast:
    r: int

    def check(self, order: int) -> bool:
        return any(p >= self.r for p in sympy.factorint(order))

    def describe(self) -> str:
        return f"order divisible by a prime >= {self.r}"

    def to_json(self) -> dict:
        return {"type": "DivisibleByPrimeAtLeast", "r": self.r}


@dataclass(frozen=True)
class DivisibleByOneOf:
    options: tuple

    def check(self, order: int) -> bool:
        return any(order % r == 0 for r in self.options)

    def describe(self) -> str:
        return f"order divisible by one of {sorted(self.options)}"

    def to_json(self) -> dict:
        return {"type": "DivisibleByOneOf", "options": sorted(self.options)}


def expectation_from_json(blob: dict):
    kind = blob["type"]
    if kind == "ExactOrder":
        return ExactOrder(int(blob["k"]))
    if kind == "DivisibleBy":
        return DivisibleBy(int(blob["r"]))
    if kind == "DivisibleByPrimeAtLeast":
        return DivisibleByPrimeAtLeast(int(blob["r"]))
    if kind == "DivisibleByOneOf":
        return DivisibleByOneOf(tuple(int(r) for r in blob["options"]))
    raise VerifyError(f"unknown expectation type {kind!r}")


@dataclass(frozen=True)
class Claim:
    id: str
    n: int
    q: int
    a: object  # int | list | None (None = default parameter)
    force: bool
    word: str
    expectation: object
    paper_ref: str

    @classmethod
    def from_json(cls, blob: dict) -> "Claim":
        return cls(
            id=blob["id"],
            n=int(blob["n"]),
            q=int(blob["q"]),
            a=blob.get("a"),
            force=bool(blob.get("force", False)),
            word=blob["word"],
            expectation=expectation_from_json(blob["expectation"]),
            paper_ref=blob["paper_ref"],
        )

    def to_json(self) -> dict:
        out = {"id": self.id, "n": self.n, "q": self.q}
        if self.a is not None:
            out["a"] = self.a
        if self.force:
            out["force"] = True
        out["word"] = self.word
        out["expectation"] = self.expectation.to_json()
        out["paper_ref"] = self.paper_ref
        return out


def load_claims(path=None) -> tuple:
    if path is None:
        raw = resources.files("omega23").joinpath("data/claims.jsonl").read_text()
    else:
        with open(path) as fh:
            raw = fh.read()
    rows = []
    for line in raw.splitlines():
        line = line.strip()
        if line:
            rows.append(Claim.from_json(json.loads(line)))
    return tuple(rows)


def _pq(q: int):
    fac = sympy.factorint(q)
    if len(fac) != 1:
        raise VerifyError(f"{q} is not a prime power")
    [(p, f)] = fac.items()
    return int(p), int(f)


@lru_cache(maxsize=512)
def _cached_pair(n: int, q: int, a_key, force: bool) -> GenPair:
    ctx = make_field(*_pq(q))
    a = list(a_key) if isinstance(a_key, tuple) else a_key
    return build_pair(n, ctx, a, force=force)


def evaluate_claim_word(pair: GenPair, word: str) -> Matrix:
    """Evaluate the claim word; a "|S9" suffix restricts to the tail block."""
    restricted = word.endswith("|S9")
    core = word[: -len("|S9")] if restricted else word
    value = evaluate_word(parse_word(core), pair.x, pair.y)
    if restricted:
        ctx, n = pair.ctx, pair.n
        s9 = [unit_vector(ctx, n, i) for i in range(n - 9, n)]
        value = restrict(value, s9)
    return value


def verify_order_claims(claims, order_cap: int = 4096) -> VerificationReport:
    rec = _Recorder({"battery": "order-claims", "rows": len(claims)})
    for claim in sorted(claims, key=lambda c: c.id):
        try:
            a_key = tuple(claim.a) if isinstance(claim.a, list) else claim.a
            pair = _cached_pair(claim.n, claim.q, a_key, claim.force)
            value = evaluate_claim_word(pair, claim.word)
            result = element_order(value, cap=order_cap)
            ok = claim.expectation.check(result.order)
            rec.add(claim.id, ok, claim.expectation.describe(),
                    f"order = {result.order}", claim.paper_ref)
        except (OrderSearchExceeded, VerifyError, ValueError, ArithmeticError) as exc:
            rec.checks.append(CheckEntry(claim.id, "fail", claim.expectation.describe(),
                                         f"error: {exc}", claim.paper_ref))
    return rec.report()


# ---------------------------------------------------------------------------
# polynomial and hermitian representations


def sym_power_rep(ctx: FieldCtx, g: Matrix, d: int) -> Matrix:
    """Action on homogeneous degree-d forms in two variables.

    Basis is t1^d, t1^(d-1) t2, ..., t2^d; the variables transform by
    t_i -> sum_j g[j, i] t_j, so columns are images of basis monomials.
    """
    if d < 1:
        raise VerifyError("the degree must be at least 1")
    if g.rows != 2 or g.cols != 2:
        raise VerifyError("expected a 2x2 matrix")
    lin1 = (g.data[0, 0], g.data[1, 0])  # image of t1
    lin2 = (g.data[0, 1], g.data[1, 1])  # image of t2
    out = np.zeros((d + 1, d + 1, ctx.f), dtype=np.int64)
    for j in range(d + 1):
        # expand (image of t1)^(d-j) * (image of t2)^j; index = degree in t2
        coeffs = [ctx.one.copy()]
        for lin in [lin1] * (d - j) + [lin2] * j:
            nxt = [ctx.zero.copy() for _ in range(len(coeffs) + 1)]
            for i, c in enumerate(coeffs):
                nxt[i] = ctx.add(nxt[i], ctx.mul(c, lin[0]))
                nxt[i + 1] = ctx.add(nxt[i + 1], ctx.mul(c, lin[1]))
            coeffs = nxt
        for i in range(d + 1):
            out[i, j] = coeffs[i]
    return Matrix(ctx, out)


@lru_cache(maxsize=32)
def _subfield_data(p: int, f2: int):
    """Embedding of the index-2 subfield: a root of its modulus plus a solver."""
    ctx2 = make_field(p, f2)
    base = make_field(p, f2 // 2)
    rho = None
    for i in range(ctx2.q):
        cand = ctx2.from_index(i)
        acc = ctx2.zero.copy()
        power = ctx2.one.copy()
        for k in range(base.f + 1):
            coeff = int(base.modulus[k])
            if coeff:
                acc = ctx2.add(acc, ctx2.scale(ctx2.coerce(coeff), power))
            power = ctx2.mul(power, cand)
        if not acc.any():
            rho = cand
            break
    if rho is None:
        raise VerifyError("no root of the base modulus in the extension")
    powers = np.zeros((f2, base.f), dtype=np.int64)
    cur = ctx2.one.copy()
    for i in range(base.f):
        powers[:, i] = cur
        cur = ctx2.mul(cur, rho)
    # Gaussian elimination over the prime field: solver rows recover coordinates
    aug = np.concatenate([powers % p, np.eye(f2, dtype=np.int64)], axis=1) % p
    rowidx = 0
    for col in range(base.f):
        pivot = next(r for r in range(rowidx, f2) if aug[r, col] % p)
        aug[[rowidx, pivot]] = aug[[pivot, rowidx]]
        inv = pow(int(aug[rowidx, col]), p - 2, p)
        aug[rowidx] = (aug[rowidx] * inv) % p
        for r in range(f2):
            if r != rowidx and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[rowidx]) % p
        rowidx += 1
    solver = aug[:, base.f:]
    return base, rho, solver


def _pull_back(ctx2: FieldCtx, base: FieldCtx, solver: np.ndarray, value) -> np.ndarray:
    coeffs = (solver @ (np.asarray(value) % ctx2.p)) % ctx2.p
    if coeffs[base.f:].any():
        raise VerifyError("value does not lie in the index-2 subfield")
    return coeffs[: base.f]


def hermitian_rep(ctx_q2: FieldCtx, g: Matrix) -> Matrix:
    """Action on the 9-dimensional space of conjugate-symmetric 3x3 matrices.

    The space consists of A whose transpose equals the entrywise q-th power
    of A, an F_q-structure inside the quadratic extension. Fixed basis:
    E11, E22, E33, then for each index pair (1,2), (1,3), (2,3) the
    symmetric unit E_ij + E_ji followed by the twisted unit
    d*E_ij + d^q*E_ji, where d is the class of the field generator.
    The action is A -> (degree-2 image of g)^T A (same image)^sigma and the
    output matrix is written over the index-2 subfield.
    """
    if ctx_q2.f % 2 != 0:
        raise WrongExtensionDegree("the field must be a square-order extension")
    if g.rows != 2 or g.cols != 2:
        raise VerifyError("expected a 2x2 matrix")
    base, _rho, solver = _subfield_data(ctx_q2.p, ctx_q2.f)
    half = ctx_q2.f // 2
    psi = sym_power_rep(ctx_q2, g, 2)
    psi_sigma = Matrix(ctx_q2, _entrywise_frobenius(ctx_q2, psi.data, half))
    delta = ctx_q2.from_index(ctx_q2.p)  # the class of the generator
    delta_q = ctx_q2.frobenius(delta, half)

    basis = []
    for i in range(3):
        b = np.zeros((3, 3, ctx_q2.f), dtype=np.int64)
        b[i, i] = ctx_q2.one
        basis.append(b)
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        u = np.zeros((3, 3, ctx_q2.f), dtype=np.int64)
        u[i, j] = ctx_q2.one
        u[j, i] = ctx_q2.one
        basis.append(u)
        v = np.zeros((3, 3, ctx_q2.f), dtype=np.int64)
        v[i, j] = delta
        v[j, i] = delta_q
        basis.append(v)

    denom = ctx_q2.inv(ctx_q2.sub(delta, delta_q))
    out = np.zeros((9, 9, base.f), dtype=np.int64)
    for col, b in enumerate(basis):
        image = (psi.transpose() @ Matrix(ctx_q2, b) @ psi_sigma).data
        coords = [image[0, 0], image[1, 1], image[2, 2]]
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            cv = ctx_q2.mul(ctx_q2.sub(image[i, j], image[j, i]), denom)
            cu = ctx_q2.sub(image[i, j], ctx_q2.mul(cv, delta))
            coords.extend([cu, cv])
        for row, val in enumerate(coords):
            out[row, col] = _pull_back(ctx_q2, base, solver, val)
    return Matrix(base, out)
