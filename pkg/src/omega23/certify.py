"""Exact group-order certification.

Randomized Schreier-Sims on the natural action on F_q^n, with two sound
exits: reaching a pre-verified target order (the product of orbit sizes
can never exceed the generated group's order), or a run of trivial sifts
followed by a full deterministic Schreier-generator verification. Budget
or table-size exhaustion yields Inconclusive, never a wrong order.

Vectors over F_{p^f} are flattened to F_p^{nf} through the regular
representation of the field, so the orbit kernels only ever do integer
matrix-vector products mod p.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

import numpy as np

from . import resolved_seed
from ._kernels import DENSE_CAP, ORBIT_CAP, orbit_bfs
from .fields import FieldCtx, elem_to_json
from .forms import OrthoSpace, in_omega, omega_order
from .generators import GenPair, WrongCase
from .linalg import Matrix, unit_vector
from .verify import _s9_restrictions


class CertifyError(Exception):
    pass


class DimensionMismatch(CertifyError):
    pass


class OrbitCapExceeded(CertifyError):
    pass


class StateSpaceTooLarge(CertifyError):
    pass


class BudgetExceeded(CertifyError):
    def __init__(self, message, partial_order=1, base_size=0, orbit_sizes=()):
        super().__init__(message)
        self.partial_order = partial_order
        self.base_size = base_size
        self.orbit_sizes = tuple(orbit_sizes)


TRIVIAL_SIFT_RUN = 64
_TRANSVERSAL_CACHE_LIMIT = 65536
_PRA_SLOTS = 10
_PRA_BURN_IN = 64


# ---------------------------------------------------------------------------
# flattening F_{p^f}^n -> F_p^{nf}


def _flatten_matrix(ctx: FieldCtx, m: Matrix) -> np.ndarray:
    """Block matrix over F_p acting on flattened coordinate vectors."""
    blocks = np.einsum("iju,uvw->iwjv", m.data, ctx.mul_table) % ctx.p
    nf = m.rows * ctx.f
    return np.ascontiguousarray(blocks.reshape(nf, nf))


def _encode(vec: np.ndarray, p: int, powers: np.ndarray) -> int:
    return int(np.asarray(vec, dtype=np.int64).reshape(-1) @ powers)


def _decode(pid: int, p: int, n: int, f: int) -> np.ndarray:
    digits = np.empty(n * f, dtype=np.int64)
    t = pid
    for k in range(n * f):
        digits[k] = t % p
        t //= p
    return digits.reshape(n, f)


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class Orbit:
    ctx: FieldCtx
    n: int
    gens: tuple
    ids: np.ndarray
    parent: np.ndarray
    genlab: np.ndarray
    visited: np.ndarray

    @property
    def size(self) -> int:
        return int(self.ids.shape[0])

    def position(self, pid: int) -> int:
        pos = int(self.visited[pid])
        return pos

    def vector(self, pos: int) -> np.ndarray:
        return _decode(int(self.ids[pos]), self.ctx.p, self.n, self.ctx.f)

    def word(self, pos: int) -> tuple:
        """Generator indices mapping the root to this orbit position."""
        labels = []
        while pos > 0:
            labels.append(int(self.genlab[pos]))
            pos = int(self.parent[pos])
        labels.reverse()
        return tuple(labels)

    def transversal(self, pos: int) -> Matrix:
        u = Matrix.identity(self.ctx, self.n)
        for lbl in self.word(pos):
            u = self.gens[lbl] @ u
        return u


def orbit(gens, v, cap: int = ORBIT_CAP, backend: str | None = None) -> Orbit:
    """Breadth-first closure of the vector v under the given matrices."""
    gens = tuple(gens)
    if not gens:
        raise CertifyError("orbit needs at least one generator")
    ctx = gens[0].ctx
    n = gens[0].rows
    for g in gens:
        if g.rows != n or g.cols != n or g.ctx is not ctx:
            raise DimensionMismatch("generators must be square, same size, same field")
    vec = np.asarray(v, dtype=np.int64) % ctx.p
    if vec.shape != (n, ctx.f):
        raise DimensionMismatch(f"vector shape {vec.shape} does not match ({n}, {ctx.f})")
    space = ctx.p ** (n * ctx.f)
    if space > DENSE_CAP:
        raise StateSpaceTooLarge(
            f"p^(n*f) = {space} exceeds the dense table cap {DENSE_CAP}")
    flat = np.stack([_flatten_matrix(ctx, g) for g in gens])
    status, ids, parent, genlab, visited = orbit_bfs(
        flat, vec.reshape(-1), ctx.p, space, cap=cap, backend=backend)
    if status:
        raise OrbitCapExceeded(f"orbit exceeded the cap of {cap} points")
    return Orbit(ctx=ctx, n=n, gens=gens, ids=ids, parent=parent,
                 genlab=genlab, visited=visited)


# ---------------------------------------------------------------------------
# stabilizer chain


class Level:
    """One link: a base vector, its generators, and the orbit machinery."""

    __slots__ = ("base_vec", "base_id", "gens", "orbit", "_u", "_u_inv")

    def __init__(self, base_vec, gens):
        self.base_vec = base_vec
        self.base_id = None
        self.gens = list(gens)
        self.orbit = None
        self._u = None
        self._u_inv = {}

    def recompute(self, cap, backend):
        self.orbit = orbit(self.gens, self.base_vec, cap=cap, backend=backend)
        self.base_id = int(self.orbit.ids[0])
        self._u_inv = {}
        if self.orbit.size <= _TRANSVERSAL_CACHE_LIMIT:
            ctx = self.orbit.ctx
            u = [Matrix.identity(ctx, self.orbit.n)]
            for pos in range(1, self.orbit.size):
                par = int(self.orbit.parent[pos])
                lbl = int(self.orbit.genlab[pos])
                u.append(self.gens[lbl] @ u[par])
            self._u = u
        else:
            self._u = None

    def u(self, pos: int) -> Matrix:
        if self._u is not None:
            return self._u[pos]
        return self.orbit.transversal(pos)

    def u_inv(self, pos: int) -> Matrix:
        got = self._u_inv.get(pos)
        if got is None:
            got = self.u(pos).inverse()
            self._u_inv[pos] = got
        return got


@dataclass(frozen=True)
class StabilizerChain:
    base: tuple
    levels: tuple
    order: int
    verified: bool
    seed: int

    @property
    def orbit_sizes(self) -> tuple:
        return tuple(lv.orbit.size for lv in self.levels)

    def sift(self, g: Matrix):
        """Residue after dividing out transversal elements; None if identity."""
        residue, _ = _sift_from(self.levels, g, 0)
        return residue


def _sift_from(levels, g: Matrix, start: int):
    """Sift through levels[start:]. Returns (residue or None, stuck level)."""
    ctx = g.ctx
    powers = None
    for i in range(start, len(levels)):
        lv = levels[i]
        img = g @ lv.base_vec
        if powers is None:
            powers = ctx.p ** np.arange(img.size, dtype=np.int64)
        pid = _encode(img, ctx.p, powers)
        pos = lv.orbit.position(pid)
        if pos < 0:
            return g, i
        g = lv.u_inv(pos) @ g
    return (None if g.is_identity() else g), len(levels)


class _RandomElements:
    """Product-replacement stream over the generating set."""

    def __init__(self, gens, seed):
        self.rng = random.Random(seed)
        slots = list(gens)
        while len(slots) < _PRA_SLOTS:
            slots.append(gens[len(slots) % len(gens)])
        self.slots = slots
        self.acc = Matrix.identity(gens[0].ctx, gens[0].rows)
        for _ in range(_PRA_BURN_IN):
            self._step()

    def _step(self):
        rng = self.rng
        i = rng.randrange(len(self.slots))
        j = rng.randrange(len(self.slots) - 1)
        if j >= i:
            j += 1
        other = self.slots[j]
        if rng.random() < 0.5:
            other = other.inverse()
        if rng.random() < 0.5:
            self.slots[i] = self.slots[i] @ other
        else:
            self.slots[i] = other @ self.slots[i]
        self.acc = self.acc @ self.slots[i]

    def __next__(self) -> Matrix:
        self._step()
        return self.acc


class _ChainBuilder:
    def __init__(self, gens, seed, cap, budget_seconds, backend):
        self.gens = tuple(gens)
        self.seed = seed
        self.cap = cap
        self.backend = backend
        self.levels = []
        self.deadline = (
            time.monotonic() + budget_seconds if budget_seconds else None)

    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= lv.orbit.size
        return out

    def _check_budget(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded(
                "time budget exhausted",
                partial_order=self.order(),
                base_size=len(self.levels),
                orbit_sizes=[lv.orbit.size for lv in self.levels],
            )

    def _new_base_vector(self, g: Matrix):
        ctx = g.ctx
        for j in range(g.cols):
            col = g.data[:, j]
            ej = unit_vector(ctx, g.rows, j)
            if not np.array_equal(col, ej):
                return ej
        raise CertifyError("identity residue cannot open a level")

    def feed(self, g: Matrix) -> bool:
        """Sift g; absorb a nontrivial residue. True if the chain grew."""
        residue, idx = _sift_from(self.levels, g, 0)
        if residue is None:
            return False
        self._check_budget()
        if idx == len(self.levels):
            lv = Level(self._new_base_vector(residue), [residue])
            self.levels.append(lv)
        else:
            lv = self.levels[idx]
            lv.gens.append(residue)
        lv.recompute(self.cap, self.backend)
        return True

    def verify_schreier(self) -> bool:
        """Deterministic closure test; absorbs the first bad residue."""
        powers = None
        for i in range(len(self.levels) - 1, -1, -1):
            lv = self.levels[i]
            ctx = lv.orbit.ctx
            if powers is None:
                powers = ctx.p ** np.arange(
                    lv.orbit.n * ctx.f, dtype=np.int64)
            for pos in range(lv.orbit.size):
                if pos % 1024 == 0:
                    self._check_budget()
                u_pt = lv.u(pos)
                for s in lv.gens:
                    w = s @ u_pt
                    pid = _encode(w @ lv.base_vec, ctx.p, powers)
                    pos2 = lv.orbit.position(pid)
                    schreier = lv.u_inv(pos2) @ w
                    if schreier.is_identity():
                        continue
                    residue, idx = _sift_from(self.levels, schreier, i + 1)
                    if residue is not None:
                        if idx == len(self.levels):
                            nlv = Level(self._new_base_vector(residue), [residue])
                            self.levels.append(nlv)
                        else:
                            nlv = self.levels[idx]
                            nlv.gens.append(residue)
                        nlv.recompute(self.cap, self.backend)
                        return False
        return True

    def build(self, target) -> StabilizerChain:
        for g in self.gens:
            if not g.det().any():
                raise CertifyError("generators must be invertible")
            self.feed(g)
        stream = _RandomElements(self.gens, self.seed)
        trivial_run = 0
        verified = False
        while True:
            self._check_budget()
            current = self.order()
            if target is not None:
                if current == target:
                    break
                if current > target:
                    raise CertifyError(
                        "chain order exceeds the target; containment "
                        "assumption violated")
            g = next(stream)
            if self.feed(g):
                trivial_run = 0
            else:
                trivial_run += 1
                if trivial_run >= TRIVIAL_SIFT_RUN:
                    if self.verify_schreier():
                        verified = True
                        break
                    trivial_run = 0
        for lv in self.levels:
            lv.gens = tuple(lv.gens)
        return StabilizerChain(
            base=tuple(lv.base_vec for lv in self.levels),
            levels=tuple(self.levels),
            order=self.order(),
            verified=verified,
            seed=self.seed,
        )


def stabilizer_chain(gens, target: int | None = None, seed: int | None = None,
                     cap: int = ORBIT_CAP, budget_seconds: float | None = None,
                     backend: str | None = None) -> StabilizerChain:
    """Randomized Schreier-Sims with sound termination.

    With a target (caller must have verified the generated group's order
    divides it, e.g. by containment in a known group), the build stops as
    soon as the chain order reaches the target: the product of orbit sizes
    never exceeds the generated order. Without a target, a run of 64
    trivial random sifts is always followed by the full deterministic
    Schreier-generator verification, so the returned order is exact.
    """
    gens = tuple(gens)
    seed = resolved_seed(seed)
    if not gens:
        return StabilizerChain(base=(), levels=(), order=1, verified=True, seed=seed)
    builder = _ChainBuilder(gens, seed, cap, budget_seconds, backend)
    return builder.build(target)


# ---------------------------------------------------------------------------
# certification front end


@dataclass(frozen=True)
class CertResult:
    n: int
    q: int
    a: object
    eps: str
    computed_order: int
    target_order: int
    verdict: str
    seed: int
    base_size: int
    orbit_sizes: tuple
    elapsed_ms: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "a": self.a,
            "eps": self.eps,
            "computed_order": str(self.computed_order),
            "target_order": str(self.target_order),
            "verdict": self.verdict,
            "seed": self.seed,
            "base_size": self.base_size,
            "orbit_sizes": list(self.orbit_sizes),
            "elapsed_ms": self.elapsed_ms,
        }


def _restricted_space(pair: GenPair) -> OrthoSpace:
    k = pair.n - 9
    j9 = Matrix(pair.ctx, pair.space.J.data[k:, k:])
    return OrthoSpace(n=9, ctx=pair.ctx, J=j9, eps="circ")


def certify_generation(pair: GenPair, restrict_to_s9: bool = False,
                       seed: int | None = None,
                       budget_seconds: float | None = None,
                       cap: int = ORBIT_CAP,
                       backend: str | None = None) -> CertResult:
    """Compare the order of the generated group against the closed formula.

    Full mode certifies <x, y> against the ambient group's order; restricted
    mode (even/odd tail families only) certifies the action of <y, tau> on
    the distinguished 9-dimensional subspace against the 9-dimensional
    target. Verdicts: Generates (orders equal), ProperSubgroup (computed
    order properly divides the target), Inconclusive (budget or table caps
    hit, or - without pre-verified containment - an order incompatible
    with the target; the certificate then carries the best exact or
    partial order known, never a wrong one).
    """
    t0 = time.perf_counter()
    seed = resolved_seed(seed)
    ctx = pair.ctx
    if restrict_to_s9:
        if pair.tag.case == "A":
            raise WrongCase("restricted certification needs an S9 tail family")
        y9, t9, _ = _s9_restrictions(pair)
        gens = (y9, t9)
        space = _restricted_space(pair)
        target = omega_order(9, "circ", ctx.q)
        eps = "circ"
    else:
        gens = (pair.x, pair.y)
        space = pair.space
        target = omega_order(pair.n, pair.space.eps, ctx.q)
        eps = pair.space.eps
    contained = all(in_omega(space, g).ok for g in gens)

    verdict = "Inconclusive"
    computed = 1
    base_size = 0
    orbit_sizes = ()
    try:
        chain = stabilizer_chain(
            gens,
            target=target if contained else None,
            seed=seed,
            cap=cap,
            budget_seconds=budget_seconds,
            backend=backend,
        )
        computed = chain.order
        base_size = len(chain.base)
        orbit_sizes = chain.orbit_sizes
        if contained and target % computed != 0:
            raise CertifyError(
                "computed order does not divide the target despite verified "
                "containment")
        if computed == target:
            verdict = "Generates"
        elif computed < target and target % computed == 0:
            verdict = "ProperSubgroup"
    except BudgetExceeded as stop:
        computed = stop.partial_order
        base_size = stop.base_size
        orbit_sizes = stop.orbit_sizes
    except (OrbitCapExceeded, StateSpaceTooLarge):
        pass

    return CertResult(
        n=space.n,
        q=ctx.q,
        a=elem_to_json(ctx, pair.a._arr()),
        eps=eps,
        computed_order=computed,
        target_order=target,
        verdict=verdict,
        seed=seed,
        base_size=base_size,
        orbit_sizes=orbit_sizes,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )
