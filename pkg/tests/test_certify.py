import itertools
import random

import numpy as np
import pytest

from omega23.fields import make_field
from omega23.forms import gram_matrix, in_omega, is_isometry, omega_order, quadratic_value
from omega23.generators import WrongCase, build_pair
from omega23.linalg import Matrix, unit_vector
from omega23.certify import (
    BudgetExceeded,
    CertifyError,
    DimensionMismatch,
    Orbit,
    OrbitCapExceeded,
    StateSpaceTooLarge,
    certify_generation,
    orbit,
    stabilizer_chain,
)


CTX3 = make_field(3, 1)


@pytest.fixture(scope="module")
def pair932():
    return build_pair(9, CTX3, 2)


@pytest.fixture(scope="module")
def chain932(pair932):
    return stabilizer_chain([pair932.x, pair932.y], target=None, seed=53251)


# --- orbits ------------------------------------------------------------------

def test_orbit_of_identity_generator():
    o = orbit([Matrix.identity(CTX3, 9)], unit_vector(CTX3, 9, 0))
    assert o.size == 1


def test_orbit_reaches_first_six_units(pair932):
    o = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0))
    assert o.size <= 3 ** 9 - 1
    powers = 3 ** np.arange(9, dtype=np.int64)
    for k in range(6):
        pid = int(unit_vector(CTX3, 9, k).reshape(-1) @ powers)
        assert o.position(pid) >= 0


def test_orbit_q_invariance(pair932):
    o = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0))
    base_q = quadratic_value(pair932.space, o.vector(0))
    step = max(1, o.size // 200)
    for pos in range(0, o.size, step):
        assert quadratic_value(pair932.space, o.vector(pos)) == base_q


def test_orbit_transversal_maps_root_to_point(pair932):
    o = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0))
    rng = random.Random(3)
    for pos in [0, 1, o.size - 1] + [rng.randrange(o.size) for _ in range(12)]:
        u = o.transversal(pos)
        assert np.array_equal(u @ unit_vector(CTX3, 9, 0), o.vector(pos))


def test_orbit_discovery_is_deterministic(pair932):
    a = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0))
    b = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0))
    assert np.array_equal(a.ids, b.ids)
    assert np.array_equal(a.parent, b.parent)


def test_orbit_backends_agree(pair932):
    nb = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0), backend="numba")
    np_ = orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0), backend="numpy")
    assert nb.size == np_.size
    assert np.array_equal(np.sort(nb.ids), np.sort(np_.ids))


def test_orbit_cap(pair932):
    with pytest.raises(OrbitCapExceeded):
        orbit([pair932.x, pair932.y], unit_vector(CTX3, 9, 0), cap=100)


def test_orbit_dimension_mismatch(pair932):
    with pytest.raises(DimensionMismatch):
        orbit([pair932.x], unit_vector(CTX3, 11, 0))
    with pytest.raises(DimensionMismatch):
        orbit([pair932.x, Matrix.identity(CTX3, 11)], unit_vector(CTX3, 9, 0))


def test_orbit_state_space_cap():
    pair = build_pair(25, CTX3, 1)
    with pytest.raises(StateSpaceTooLarge):
        orbit([pair.x], unit_vector(CTX3, 25, 0))


# --- stabilizer chains -------------------------------------------------------

def test_chain_trivial_group():
    ch = stabilizer_chain([Matrix.identity(CTX3, 3)], seed=1)
    assert ch.order == 1 and ch.verified


def test_chain_no_generators():
    assert stabilizer_chain([], seed=1).order == 1


def test_chain_cyclic_subgroup(pair932):
    ch = stabilizer_chain([pair932.y], seed=1)
    assert ch.order == 3 and ch.verified


def _omega3_elements():
    from omega23.forms import OrthoSpace

    space = OrthoSpace(n=3, ctx=CTX3, J=Matrix.identity(CTX3, 3), eps="circ")
    cols = list(itertools.product(range(3), repeat=3))
    out = []
    for c1 in cols:
        for c2 in cols:
            for c3 in cols:
                m = Matrix.from_rows(CTX3, [list(r) for r in zip(c1, c2, c3)])
                if not m.det().any():
                    continue
                if not is_isometry(space, m):
                    continue
                if not np.array_equal(m.det(), CTX3.one):
                    continue
                if in_omega(space, m).ok:
                    out.append(m)
    return out


def test_chain_enumerated_small_group():
    elems = _omega3_elements()
    assert len(elems) == omega_order(3, "circ", 3) == 12
    ch = stabilizer_chain(elems, seed=7)
    assert ch.order == 12


def test_chain_order_matches_formula(chain932):
    assert chain932.order == omega_order(9, "circ", 3)
    assert chain932.verified
    sizes = chain932.orbit_sizes
    prod = 1
    for s in sizes:
        prod *= s
    assert prod == chain932.order
    assert len(chain932.base) == len(chain932.levels)


def test_chain_reproducible(pair932, chain932):
    again = stabilizer_chain([pair932.x, pair932.y], target=None, seed=53251)
    assert again.order == chain932.order
    assert again.orbit_sizes == chain932.orbit_sizes
    assert len(again.base) == len(chain932.base)
    for u, v in zip(again.base, chain932.base):
        assert np.array_equal(u, v)


def test_chain_sifts_generator_products(pair932, chain932):
    rng = random.Random(11)
    gens = [pair932.x, pair932.y]
    for _ in range(100):
        g = gens[rng.randrange(2)]
        for _ in range(rng.randrange(1, 14)):
            g = g @ gens[rng.randrange(2)]
        assert chain932.sift(g) is None


def test_chain_rejects_outsider(chain932):
    # the forced parameter's involution has nontrivial spinor norm, so it
    # lies outside the certified kernel subgroup and cannot sift away
    outsider = build_pair(9, CTX3, 1, force=True).x
    assert not in_omega(gram_matrix("A", 9, CTX3), outsider).ok
    assert chain932.sift(outsider) is not None


def test_chain_budget_exhaustion(pair932):
    with pytest.raises(BudgetExceeded):
        stabilizer_chain([pair932.x, pair932.y], target=None, seed=1,
                         budget_seconds=1e-9)


def test_chain_transversals_sampled(chain932):
    rng = random.Random(23)
    for lv in chain932.levels:
        for pos in {0, lv.orbit.size - 1, rng.randrange(lv.orbit.size)}:
            u = lv.u(pos)
            assert np.array_equal(u @ lv.base_vec, lv.orbit.vector(pos))


# --- certification -----------------------------------------------------------

def test_certify_headline(pair932):
    res = certify_generation(pair932, seed=53251)
    assert res.verdict == "Generates"
    assert res.computed_order == res.target_order == omega_order(9, "circ", 3)
    blob = res.to_json()
    assert set(blob) == {"n", "q", "a", "eps", "computed_order", "target_order",
                         "verdict", "seed", "base_size", "orbit_sizes", "elapsed_ms"}
    assert blob["computed_order"] == "65784756654489600"
    assert blob["a"] == 2 and blob["eps"] == "circ"


def test_certify_restricted():
    res = certify_generation(build_pair(15, CTX3, 1), restrict_to_s9=True, seed=53251)
    assert res.verdict == "Generates"
    assert res.target_order == omega_order(9, "circ", 3)
    assert res.computed_order == res.target_order


def test_certify_restricted_needs_tail_family(pair932):
    with pytest.raises(WrongCase):
        certify_generation(pair932, restrict_to_s9=True)


def test_certify_forced_pair_documents_outcome():
    # non-admissible parameter: no containment, chain fully verified; the
    # outcome lands on the full special orthogonal group, twice the target
    res = certify_generation(build_pair(9, CTX3, 1, force=True), seed=53251)
    assert res.computed_order == 2 * res.target_order
    assert res.verdict == "Inconclusive"


def test_certify_budget_inconclusive(pair932):
    res = certify_generation(pair932, seed=53251, budget_seconds=1e-9)
    assert res.verdict == "Inconclusive"
    assert res.target_order == omega_order(9, "circ", 3)
    assert res.computed_order >= 1
