"""
Binary linear block codes with exhaustive maximum-likelihood decoding.

Words are ``uint8`` arrays of 0/1. Messages are also identified with integers:
bit 0 of a message vector is the most significant bit, so message ``1010``
is index 10. The same convention packs codewords into Python/numpy integers,
which is what the decoder works on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_EXHAUSTIVE_N = 24
_CHUNK = 1 << 22


class CodeError(ValueError):
    pass


# ------------------------------------------------------------------------------
# bit words

def as_word(bits) -> np.ndarray:
    """Coerce a string like ``"1010"`` or a 0/1 sequence into a word."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits.strip()]
    w = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if w.size and w.max() > 1:
        raise CodeError("words must contain only 0 and 1")
    return w


def word_str(w) -> str:
    return "".join(str(int(b)) for b in w)


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise CodeError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - t)) & 1 for t in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    v = 0
    for b in as_word(bits):
        v = (v << 1) | int(b)
    return v


def pack_rows(words: np.ndarray) -> np.ndarray:
    """Pack the rows of a (m, n) 0/1 array into uint64 integers (n <= 64)."""
    words = np.asarray(words, dtype=np.uint64)
    n = words.shape[-1]
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (words * weights).sum(axis=-1, dtype=np.uint64)


def unpack_rows(values, n: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((values[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)


def codeword_sum(a, b) -> np.ndarray:
    """Componentwise XOR of two words."""
    a, b = as_word(a), as_word(b)
    if a.shape != b.shape:
        raise CodeError(f"length mismatch: {a.size} vs {b.size}")
    return a ^ b


def gf2_rank(matrix) -> int:
    rows = [int(v) for v in pack_rows(np.atleast_2d(np.asarray(matrix, dtype=np.uint8)))] if np.size(matrix) else []
    rank = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        if pivot == 0:
            break
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


# ------------------------------------------------------------------------------
# codes

@dataclass(frozen=True)
class LinearCode:
    """An [n, k] binary linear code given by a full-rank k x n generator."""

    n: int
    k: int
    generator: np.ndarray

    def __post_init__(self):
        g = np.array(self.generator, dtype=np.uint8).reshape(self.k, self.n) if self.k else \
            np.zeros((0, self.n), dtype=np.uint8)
        if not 0 <= self.k <= self.n or self.n < 1:
            raise CodeError(f"need 0 <= k <= n and n >= 1, got n={self.n}, k={self.k}")
        if g.size and g.max() > 1:
            raise CodeError("generator must be binary")
        if self.n > 64:
            raise CodeError("codes longer than 64 bits are not supported")
        if gf2_rank(g) != self.k:
            raise CodeError("generator rows are not linearly independent")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)

    @property
    def size(self) -> int:
        return 1 << self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def codebook(self) -> np.ndarray:
        """Packed codewords indexed by message integer."""
        cb = np.zeros(1, dtype=np.uint64)
        # last generator row is the least significant message bit
        for row in pack_rows(self.generator)[::-1]:
            cb = np.concatenate([cb, cb ^ row])
        return cb

    def __hash__(self):
        return hash((self.n, self.k, self.generator.tobytes()))

    def __eq__(self, other):
        return (isinstance(other, LinearCode) and (self.n, self.k) == (other.n, other.k)
                and np.array_equal(self.generator, other.generator))

    def dumps(self) -> str:
        """``n,k`` header then one hex line per generator row (first bit is the MSB)."""
        width = (self.n + 3) // 4
        lines = [f"{self.n},{self.k}"]
        lines += [format(int(v), f"0{width}x") for v in pack_rows(self.generator)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "LinearCode":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        try:
            n, k = (int(v) for v in lines[0].split(","))
            rows = [int(h, 16) for h in lines[1:]]
        except (ValueError, IndexError) as exc:
            raise CodeError(f"malformed code text: {exc}") from None
        if len(rows) != k:
            raise CodeError(f"header says k={k} but {len(rows)} rows follow")
        return cls(n, k, unpack_rows(np.array(rows, dtype=np.uint64), n) if k else np.zeros((0, n)))


def random_linear_code(n: int, k: int, seed) -> LinearCode:
    """Uniformly random full-rank generator (rejection sampling), fixed by ``seed``."""
    if k > n:
        raise CodeError(f"k={k} exceeds n={n}")
    if k < 0 or n < 1:
        raise CodeError(f"invalid dimensions n={n}, k={k}")
    if n > MAX_EXHAUSTIVE_N:
        warnings.warn(f"n={n} exceeds the exhaustive decoding budget ({MAX_EXHAUSTIVE_N})",
                      RuntimeWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    while True:
        g = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if gf2_rank(g) == k:
            return LinearCode(n, k, g)


def encode(code: LinearCode, msg) -> np.ndarray:
    """Codeword msg . G over GF(2)."""
    m = as_word(msg)
    if m.size != code.k:
        raise CodeError(f"message has {m.size} bits, code expects {code.k}")
    return (m.astype(np.uint32) @ code.generator.astype(np.uint32) % 2).astype(np.uint8)


def encode_index(code: LinearCode, msg_index) -> np.ndarray:
    """Packed codeword(s) for integer message index(es)."""
    return code.codebook[msg_index]


def nearest_word(codebook, received) -> np.ndarray:
    """
    Index of the closest packed word in ``codebook`` for each received word.

    Ties go to the smallest index.
    """
    received = np.atleast_1d(np.asarray(received, dtype=np.uint64))
    codebook = np.asarray(codebook, dtype=np.uint64)
    out = np.empty(received.shape, dtype=np.int64)
    step = max(1, _CHUNK // max(codebook.size, 1))
    for lo in range(0, received.size, step):
        chunk = received[lo:lo + step]
        dist = np.bitwise_count(chunk[:, None] ^ codebook[None, :])
        out[lo:lo + step] = np.argmin(dist, axis=1)
    return out


def ml_decode_packed(code: LinearCode, received) -> np.ndarray:
    """Minimum-distance decoding of packed words to message indices (low index wins ties)."""
    return nearest_word(code.codebook, received)


def ml_decode_bsc(code: LinearCode, received) -> tuple[np.ndarray, np.ndarray]:
    """ML decoding for a BSC with crossover < 1/2: (message bits, codeword bits)."""
    r = as_word(received)
    if r.size != code.n:
        raise CodeError(f"received word has {r.size} bits, code length is {code.n}")
    m = int(ml_decode_packed(code, pack_rows(r[None, :]))[0])
    return int_to_bits(m, code.k), unpack_rows(code.codebook[m], code.n)
