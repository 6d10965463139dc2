"""Exact-arithmetic toolkit for two-element generation of orthogonal groups.

Builds an involution/order-3 generator pair for the kernel-of-spinor-norm
subgroup of an orthogonal group over an odd finite field, verifies the
algebraic identities the construction relies on, and certifies generated
group orders with a randomized stabilizer chain.
"""

from __future__ import annotations

import os

DEFAULT_SEED = 53251


def resolved_seed(seed: int | None = None) -> int:
    """Explicit seed wins, then OMEGA23_SEED, then the package default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("OMEGA23_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


__all__ = ["DEFAULT_SEED", "resolved_seed"]
