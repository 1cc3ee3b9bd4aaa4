"""
Seeded random streams and the binary channels of the relay network.

Every random draw in a simulation comes from a Philox (counter-based, 64-bit)
generator keyed by ``SeedSequence(seed, spawn_key=(trial, phase, role))``, so
any single draw can be reproduced without replaying the others.
"""

from __future__ import annotations

import numpy as np

from ..gf2 import CodeError, as_word, pack_rows

RNG_NAME = "numpy-philox4x64-10/seedsequence(seed; trial, phase, role)"

# phase keys
PHASE_MSG = 0
PHASE_UL1 = 1
PHASE_UL2 = 2
PHASE_DL = 3
PHASE_SETUP = 7

# role keys
ROLE_RELAY = 0
ROLE_NODE1 = 1
ROLE_NODE2 = 2
ROLE_DL_CODEBOOK = 3
ROLE_HASH = 4


def stream(seed: int, trial: int, phase: int, role: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial), int(phase), int(role)))
    return np.random.Generator(np.random.Philox(ss))


def draw_flips(n: int, eps: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. Bernoulli(eps) bits."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"crossover probability out of range: {eps}")
    return (rng.random(n) < eps).astype(np.uint8)


def draw_flips_packed(n: int, eps: float, rng: np.random.Generator) -> np.uint64:
    """Same draw as :func:`draw_flips`, packed into an integer."""
    if n == 0:
        return np.uint64(0)
    return pack_rows(draw_flips(n, eps, rng)[None, :])[0]


def adder_uplink(x12, x21, eps_r: float, rng: np.random.Generator) -> np.ndarray:
    """yR = x12 xor x21 xor z with z ~ Bernoulli(eps_r)."""
    a, b = as_word(x12), as_word(x21)
    if a.shape != b.shape:
        raise CodeError(f"length mismatch: {a.size} vs {b.size}")
    return a ^ b ^ draw_flips(a.size, eps_r, rng)


def bsc_apply(x, eps: float, rng: np.random.Generator) -> np.ndarray:
    """y = x xor z with z ~ Bernoulli(eps)."""
    a = as_word(x)
    return a ^ draw_flips(a.size, eps, rng)
