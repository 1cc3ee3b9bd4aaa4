"""
Random binning at the relay and typicality list decoding at the nodes.

The hash is a seeded uniformly random permutation of all 2^n words followed
by a split of the permuted index into a fine part ``i`` and a coarse part
``j``. Every bin therefore holds exactly 2^n / (bins_fine * bins_coarse)
words, and the coarse bin ``j`` is the union of the fine bins (i, j).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..gf2 import LinearCode, as_word, pack_rows
from ..info import JointPmf, adder_kernel, joint_from, uniform
from ..regions import BinaryAdderParams
from .channels import PHASE_SETUP, ROLE_HASH, stream
from .df import RelayIndexPair

MAX_HASH_N = 24
TYP_TOL = 1e-12


class ListDecodingError(Exception):
    """Base class for list-decoding failures (counted as block errors)."""


class Erasure(ListDecodingError):
    pass


class Ambiguity(ListDecodingError):
    pass


def _is_pow2(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


@dataclass(frozen=True)
class HashConfig:
    n: int
    bins_coarse: int
    bins_fine: int
    hash_seed: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_HASH_N:
            raise ValueError(f"hash length must be in [1, {MAX_HASH_N}]")
        if not (_is_pow2(self.bins_coarse) and _is_pow2(self.bins_fine)):
            raise ValueError("bin counts must be powers of two")
        if self.bins_coarse * self.bins_fine > 1 << self.n:
            raise ValueError("more bins than words")

    @classmethod
    def from_bits(cls, n: int, b_fine_total: int, b_coarse: int, hash_seed: int) -> "HashConfig":
        """Bins for index budgets bR1 >= bR2 (bits): 2^bR2 coarse, 2^(bR1-bR2) fine."""
        if b_fine_total < b_coarse:
            raise ValueError("need bR1 >= bR2")
        return cls(n, 1 << b_coarse, 1 << (b_fine_total - b_coarse), hash_seed)

    @property
    def bins(self) -> int:
        return self.bins_coarse * self.bins_fine

    @property
    def bin_size(self) -> int:
        return (1 << self.n) // self.bins


@lru_cache(maxsize=16)
def _permutation(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = stream(seed, 0, PHASE_SETUP, ROLE_HASH)
    perm = rng.permutation(1 << n).astype(np.uint64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(1 << n, dtype=np.uint64)
    perm.setflags(write=False)
    inv.setflags(write=False)
    return perm, inv


def _as_packed(y, n: int) -> int:
    if isinstance(y, (int, np.integer)):
        return int(y)
    w = as_word(y)
    if w.size != n:
        raise ValueError(f"word length {w.size} does not match hash length {n}")
    return int(pack_rows(w[None, :])[0])


def hf_hash(y, h: HashConfig) -> RelayIndexPair:
    """Bin (i, j) of a relay observation (bits or packed integer)."""
    perm, _ = _permutation(h.n, h.hash_seed)
    q = int(perm[_as_packed(y, h.n)]) % h.bins
    return RelayIndexPair(q // h.bins_coarse, q % h.bins_coarse)


def bin_members(h: HashConfig, j: int, i=None) -> np.ndarray:
    """Packed words in bin (i, j), or in the whole coarse bin j when ``i`` is None."""
    _, inv = _permutation(h.n, h.hash_seed)
    if i is None:
        q = np.arange(j, 1 << h.n, h.bins_coarse, dtype=np.uint64)
    else:
        q = np.arange(i * h.bins_coarse + j, 1 << h.n, h.bins, dtype=np.uint64)
    return inv[q]


def adder_joint(eps_r: float) -> JointPmf:
    """p(x12, x21, yR) for uniform inputs on the binary adder uplink."""
    return joint_from(adder_kernel(eps_r), uniform(2), uniform(2))


def is_jointly_typical(words: Sequence, joint: JointPmf, eps_typ: float) -> bool:
    """Strong typicality: every empirical tuple frequency within eps_typ of the pmf."""
    ws = [as_word(w) if not isinstance(w, np.ndarray) else w for w in words]
    if len(ws) != joint.table.ndim:
        raise ValueError(f"{len(ws)} words for a {joint.table.ndim}-variable pmf")
    n = ws[0].size
    if any(w.size != n for w in ws):
        raise ValueError("words must have equal length")
    if n == 0:
        return True
    shape = joint.table.shape
    cells = np.ravel_multi_index(tuple(np.asarray(w, dtype=np.intp) for w in ws), shape)
    freq = np.bincount(cells, minlength=joint.table.size) / n
    return bool(np.all(np.abs(freq - joint.table.reshape(-1)) <= eps_typ + TYP_TOL))


def _typical_matrix(a, b, c, n: int, probs: np.ndarray, eps_typ: float) -> np.ndarray:
    """
    Binary triple typicality for packed words broadcast against each other.

    ``probs`` is the flattened 2x2x2 pmf over (a, b, c).
    """
    mask = np.uint64((1 << n) - 1)
    sides = [(a ^ mask, a), (b ^ mask, b), (c ^ mask, c)]
    ok = None
    for cell in range(8):
        ba, bb, bc = (cell >> 2) & 1, (cell >> 1) & 1, cell & 1
        cnt = np.bitwise_count(sides[0][ba] & sides[1][bb] & sides[2][bc])
        good = np.abs(cnt / n - probs[cell]) <= eps_typ + TYP_TOL
        ok = good if ok is None else ok & good
    return ok


def hf_list_decode(idx: RelayIndexPair, side_codeword, candidate_code: LinearCode,
                   uplink: BinaryAdderParams, eps_typ: float, h: HashConfig, role: str,
                   joint: JointPmf = None) -> int:
    """
    Recover the other node's message from the relay's bin index.

    ``role="node1"`` uses the fine bin (i, j) and the known x12 to search
    x21 in ``candidate_code``; ``role="node2"`` uses only the coarse bin j
    and the known x21 to search x12. Returns the unique message whose
    codeword is jointly typical with the side codeword and some list member;
    raises :class:`Erasure` or :class:`Ambiguity` otherwise.
    """
    if role not in ("node1", "node2"):
        raise ValueError(f"unknown role {role!r}")
    if candidate_code.n != h.n:
        raise ValueError("candidate code length differs from the hash length")
    side = np.uint64(_as_packed(side_codeword, h.n))
    members = bin_members(h, idx.j, idx.i if role == "node1" else None)
    joint = joint if joint is not None else adder_joint(uplink.eps_r)
    probs = joint.table.reshape(-1)
    cands = candidate_code.codebook[:, None]
    ys = members[None, :]
    if role == "node1":
        ok = _typical_matrix(side, cands, ys, h.n, probs, eps_typ)
    else:
        ok = _typical_matrix(cands, side, ys, h.n, probs, eps_typ)
    hits = np.flatnonzero(np.broadcast_to(ok, (cands.shape[0], ys.shape[1])).any(axis=1))
    if hits.size == 0:
        raise Erasure("no jointly typical candidate")
    if hits.size > 1:
        raise Ambiguity(f"{hits.size} jointly typical candidates")
    return int(hits[0])
