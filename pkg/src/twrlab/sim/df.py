"""
Message-level network coding of the decode-and-forward relay.

The relay re-indexes a decoded pair (w12, w21) as a column/row pair
(i, j) = (w12 // M21, (w12 + w21) mod M21) of a downlink codebook with
M12 entries. Each node undoes the mixing with its own message as side
information. Messages are 0-based here.
"""

from __future__ import annotations

from dataclasses import dataclass


class SideInformationError(ValueError):
    """The decoded column disagrees with the node's own message."""


def _is_pow2(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


@dataclass(frozen=True)
class MessagePair:
    w12: int
    w21: int
    m12: int
    m21: int

    def __post_init__(self):
        if not (_is_pow2(self.m12) and _is_pow2(self.m21)):
            raise ValueError("message set sizes must be powers of two")
        if self.m12 < self.m21:
            raise ValueError("expects M12 >= M21; relabel the nodes first")
        if not 0 <= self.w12 < self.m12 or not 0 <= self.w21 < self.m21:
            raise ValueError(f"messages out of range: {self}")


@dataclass(frozen=True)
class RelayIndexPair:
    i: int
    j: int


def relay_df_transcode(w: MessagePair) -> RelayIndexPair:
    return RelayIndexPair(w.w12 // w.m21, (w.w12 + w.w21) % w.m21)


def node1_df_decode(idx: RelayIndexPair, w12_side: int, m21: int) -> int:
    """Node 1 knows w12, hence the column; returns w21."""
    if idx.i != w12_side // m21:
        raise SideInformationError(f"column {idx.i} does not match own message {w12_side}")
    return (idx.j - w12_side) % m21


def node2_df_decode(idx: RelayIndexPair, w21_side: int, m12: int, m21: int) -> int:
    """Node 2 knows w21; returns w12 = i * M21 + ((j - w21) mod M21)."""
    w12 = idx.i * m21 + (idx.j - w21_side) % m21
    if not 0 <= w12 < m12:
        raise ValueError(f"recovered w12={w12} outside [0, {m12})")
    return w12
