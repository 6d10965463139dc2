"""Orthogonal geometry over odd finite fields.

Gram matrices for the two construction cases, quadratic values,
reflections, a constructive spinor norm (diagonalize first, then
Cartan-Dieudonne over the orthogonal basis), kernel-of-spinor-norm
membership, Witt type, and the classical group orders.

Spinor-norm convention: theta(r_v) is the square class of Q(v). Some
texts use the opposite sign convention; reports name this one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._dims import case_of, unsupported_message
from .fields import FieldCtx, SquareClass, is_square, square_class
from .linalg import Matrix


class FormsError(ValueError):
    pass


class UnsupportedDimension(FormsError):
    pass


class DimensionMismatch(FormsError):
    pass


class IsotropicCenter(FormsError):
    pass


class NotAnIsometry(FormsError):
    pass


class TooLarge(FormsError):
    pass


@dataclass(frozen=True)
class OrthoSpace:
    n: int
    ctx: FieldCtx
    J: Matrix
    eps: str  # "circ" | "plus" | "minus"

    def __post_init__(self):
        if self.J.rows != self.n or self.J.cols != self.n:
            raise DimensionMismatch("Gram matrix shape does not match n")
        if self.J != self.J.transpose():
            raise FormsError("Gram matrix must be symmetric")


def gram_matrix(case: str, n: int, ctx: FieldCtx) -> OrthoSpace:
    """The construction's Gram matrix for the given case and dimension."""
    if case == "A":
        if n not in (9, 11, 13, 17):
            raise UnsupportedDimension(
                f"case A covers n in (9, 11, 13, 17), got {n}"
            )
        d = np.zeros((n, n, ctx.f), dtype=np.int64)
        for i in range(n - 3):
            d[i, i, 0] = 1
        d[n - 3, n - 1, 0] = 1
        d[n - 2, n - 2, 0] = 1
        d[n - 1, n - 3, 0] = 1
        j = Matrix(ctx, d)
        eps = "circ"
        expected_det = ctx.coerce(-1)
    elif case == "B":
        if case_of(n) not in ("B5", "B6"):
            raise UnsupportedDimension(unsupported_message(n))
        d = np.zeros((n, n, ctx.f), dtype=np.int64)
        for i in range(n - 8):
            d[i, i, 0] = 1
        for i in range(4):
            d[n - 8 + i, n - 4 + i, 0] = 1
            d[n - 4 + i, n - 8 + i, 0] = 1
        j = Matrix(ctx, d)
        eps = "circ" if n % 2 else witt_type(n, ctx.q)
        expected_det = ctx.coerce(1)
    else:
        raise FormsError(f"unknown case {case!r}")
    assert np.array_equal(j.det(), expected_det)
    return OrthoSpace(n=n, ctx=ctx, J=j, eps=eps)


def _check_vec(space: OrthoSpace, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (space.n, space.ctx.f):
        raise DimensionMismatch(
            f"vector shape {v.shape} does not match n={space.n}, f={space.ctx.f}"
        )
    return v % space.ctx.p


def bilinear_value(space: OrthoSpace, v, w) -> np.ndarray:
    """v^T J w as a raw (f,) coefficient vector."""
    ctx = space.ctx
    v = _check_vec(space, v)
    w = _check_vec(space, w)
    jw = space.J @ w
    return np.einsum("iu,iv,uvw->w", v, jw, ctx.mul_table) % ctx.p


def quadratic_value(space: OrthoSpace, v):
    """Q(v) = (1/2) v^T J v, as a FieldElem."""
    ctx = space.ctx
    half = ctx.inv(ctx.coerce(2))
    return ctx.elem(ctx.mul(half, bilinear_value(space, v, v)))


def reflection(space: OrthoSpace, v) -> Matrix:
    """r_v : w -> w - Q(v)^{-1} (w^T J v) v; center must be non-isotropic."""
    ctx = space.ctx
    v = _check_vec(space, v)
    qv = quadratic_value(space, v)
    if not qv:
        raise IsotropicCenter("reflection center has Q(v) = 0")
    jv = space.J @ v  # (n, f)
    coeff = ctx.inv(qv._arr())
    # outer product v * (J v)^T scaled by Q(v)^{-1}
    outer = np.einsum("iu,jv,uvw->ijw", v, jv, ctx.mul_table) % ctx.p
    outer = ctx.scale(coeff, outer)
    r = (Matrix.identity(ctx, space.n).data - outer) % ctx.p
    out = Matrix(ctx, r)
    assert (out @ out).is_identity()
    assert np.array_equal(out.det(), ctx.coerce(-1))
    assert out.transpose() @ space.J @ out == space.J
    return out


def is_isometry(space: OrthoSpace, g: Matrix) -> bool:
    return g.transpose() @ space.J @ g == space.J


# ---------------------------------------------------------------------------
# congruent diagonalization and the constructive spinor norm


def congruent_diagonalization(space: OrthoSpace):
    """P with P^T J P diagonal (possible since q is odd); returns (P, diag).

    diag comes back as an (n, f) array of the diagonal entries.
    """
    ctx = space.ctx
    n = space.n
    s = space.J.data.copy()
    p_mat = Matrix.identity(ctx, n).data.copy()

    def add_col(dst, src, factor):
        # column op C_dst += factor * C_src, applied symmetrically to s, once to p
        s[:, dst] = (s[:, dst] + ctx.scale(factor, s[:, src])) % ctx.p
        s[dst, :] = (s[dst, :] + ctx.scale(factor, s[src, :])) % ctx.p
        p_mat[:, dst] = (p_mat[:, dst] + ctx.scale(factor, p_mat[:, src])) % ctx.p

    def swap_cols(i, j):
        s[:, [i, j]] = s[:, [j, i]]
        s[[i, j], :] = s[[j, i], :]
        p_mat[:, [i, j]] = p_mat[:, [j, i]]

    for k in range(n):
        if not s[k, k].any():
            # find a nonzero diagonal further down, or create one
            found = next((i for i in range(k + 1, n) if s[i, i].any()), None)
            if found is not None:
                swap_cols(k, found)
            else:
                pair = next(
                    (
                        (i, j)
                        for i in range(k, n)
                        for j in range(i + 1, n)
                        if s[i, j].any()
                    ),
                    None,
                )
                if pair is None:
                    raise FormsError("Gram matrix is singular")
                i, j = pair
                add_col(i, j, ctx.one)  # now s[i,i] = 2 s[i,j] != 0
                if i != k:
                    swap_cols(k, i)
        inv = ctx.inv(s[k, k])
        for j in range(k + 1, n):
            if s[k, j].any():
                add_col(j, k, ctx.neg(ctx.mul(s[k, j], inv)))
    return Matrix(ctx, p_mat), s[np.arange(n), np.arange(n)].copy()


def reflection_decomposition(space: OrthoSpace, g: Matrix):
    """Centers v_1..v_m (m <= 2n) with g = r_{v_1} ... r_{v_m} exactly."""
    ctx = space.ctx
    n = space.n
    if not is_isometry(space, g):
        raise NotAnIsometry("matrix does not preserve the form")
    p_mat, diag = congruent_diagonalization(space)
    p_inv = p_mat.inverse()
    h = p_inv @ g @ p_mat  # isometry of the diagonal form

    def q_diag(v):
        half = ctx.inv(ctx.coerce(2))
        acc = np.einsum("iu,iv,uvw->w", v, ctx.mul(diag, v), ctx.mul_table) % ctx.p
        return ctx.mul(half, acc)

    def refl_diag(v):
        qv = q_diag(v)
        jv = ctx.mul(diag, v)
        outer = np.einsum("iu,jv,uvw->ijw", v, jv, ctx.mul_table) % ctx.p
        outer = ctx.scale(ctx.inv(qv), outer)
        return Matrix(ctx, (Matrix.identity(ctx, n).data - outer) % ctx.p)

    centers_diag = []
    for i in range(n):
        e = np.zeros((n, ctx.f), dtype=np.int64)
        e[i] = ctx.one
        ge = h @ e
        if np.array_equal(ge, e):
            continue
        v = (ge - e) % ctx.p
        if q_diag(v).any():
            centers_diag.append(v)
            h = refl_diag(v) @ h
        else:
            # Q(ge - e) = 0 forces Q(ge + e) = 4 Q(e) != 0
            u = ge
            w = (ge + e) % ctx.p
            centers_diag.append(u)
            centers_diag.append(w)
            h = refl_diag(w) @ refl_diag(u) @ h
    assert h.is_identity()
    assert len(centers_diag) <= 2 * n
    centers = [p_mat @ v for v in centers_diag]
    recon = Matrix.identity(ctx, n)
    for v in centers:
        recon = recon @ reflection(space, v)
    assert recon == g
    return centers


def spinor_norm(space: OrthoSpace, g: Matrix) -> SquareClass:
    """theta(g): product of the square classes Q(center) over a decomposition."""
    ctx = space.ctx
    out = SquareClass(True)
    for v in reflection_decomposition(space, g):
        out = out * square_class(ctx, quadratic_value(space, v)._arr())
    return out


@dataclass(frozen=True)
class OmegaMembership:
    ok: bool
    reasons: tuple[str, ...]

    def __bool__(self):
        return self.ok


def in_omega(space: OrthoSpace, g: Matrix) -> OmegaMembership:
    """Isometry + det 1 + trivial spinor norm, with reason codes on failure."""
    reasons = []
    if not is_isometry(space, g):
        return OmegaMembership(False, ("not-an-isometry",))
    if not np.array_equal(g.det(), space.ctx.one):
        reasons.append("determinant-not-one")
    if not spinor_norm(space, g).square:
        reasons.append("spinor-norm-nontrivial")
    return OmegaMembership(not reasons, tuple(reasons))


# ---------------------------------------------------------------------------
# Witt type and counting


def witt_type(n: int, q: int) -> str:
    """Type of the det-1 even-dimensional form: parity of n(q-1)/4."""
    if n % 2:
        return "circ"
    k = (n * (q - 1)) // 4
    return "plus" if k % 2 == 0 else "minus"


def isotropic_count(space: OrthoSpace) -> int:
    """Number of nonzero isotropic vectors, by brute-force enumeration."""
    ctx = space.ctx
    n = space.n
    total = ctx.q**n
    if total > 10**8:
        raise TooLarge(f"q^n = {total} exceeds the enumeration cap 10^8")
    # count solutions of v^T J v = 0 in chunks; subtract the zero vector
    count = 0
    chunk = 1 << 14
    j = space.J.data
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((idx.size, n * ctx.f), dtype=np.int64)
        rest = idx.copy()
        for k in range(n * ctx.f):
            digits[:, k] = rest % ctx.p
            rest //= ctx.p
        vecs = digits.reshape(idx.size, n, ctx.f)
        jv = np.einsum("iju,bjv,uvw->biw", j, vecs, ctx.mul_table) % ctx.p
        qv = np.einsum("biu,biv,uvw->bw", vecs, jv, ctx.mul_table) % ctx.p
        count += int((~qv.any(axis=1)).sum())
    return count - 1


def omega_order(n: int, eps: str, q: int) -> int:
    """|Omega_n^eps(q)| by the classical order formulas, exact integers."""
    if n < 3:
        raise UnsupportedDimension(f"order formulas start at n = 3, got {n}")
    if n % 2:
        if eps != "circ":
            raise FormsError(f"odd dimension has type circ, got {eps!r}")
        k = (n - 1) // 2
        order = q ** (k * k)
        for i in range(1, k + 1):
            order *= q ** (2 * i) - 1
        return order // 2
    if eps not in ("plus", "minus"):
        raise FormsError(f"even dimension needs plus/minus, got {eps!r}")
    k = n // 2
    sign = 1 if eps == "plus" else -1
    order = q ** (k * (k - 1)) * (q**k - sign)
    for i in range(1, k):
        order *= q ** (2 * i) - 1
    return order // 2
