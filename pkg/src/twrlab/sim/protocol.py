"""
Monte Carlo models of complete relay rounds on the binary adder network.

Three schemes share one configuration type:

``pnc``
    Time-shared physical-layer network coding. Node 1 sends the high part of
    its message alone for (1 - alpha) n uplink uses with code C_12 (node 2
    idles at all-zero), then both nodes send from the same linear code C_c
    for alpha n uses and the relay decodes the XOR of the two codewords as
    one C_c codeword. The relay forwards (phase-1 message, XOR message) as
    column/row of a 2-D downlink codebook.
``df-index``
    Decode-and-forward with message-level network coding: the uplink is
    split in time (node 1 then node 2, node 2 getting ceil(alpha n) uses),
    the relay decodes both messages and forwards the
    (w12 // M21, (w12 + w21) mod M21) index pair.
``hf``
    Hash-and-forward: both nodes transmit simultaneously over all n uses,
    the relay bins its observation and forwards the bin index; nodes list
    decode by joint typicality.

Rates become integer bit budgets ``floor(n * rate)``. The first node in the
configuration must carry the larger budget for ``pnc`` and ``df-index``;
:func:`monte_carlo` relabels the nodes automatically when it does not.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .. import __version__
from ..gf2 import LinearCode, ml_decode_packed, nearest_word, random_linear_code
from ..info import binary_entropy
from ..regions import BinaryAdderParams, RatePoint, binary_adder_outer, hf_caps, regime_alpha
from .channels import (
    PHASE_DL,
    PHASE_MSG,
    PHASE_SETUP,
    PHASE_UL1,
    PHASE_UL2,
    RNG_NAME,
    ROLE_DL_CODEBOOK,
    ROLE_NODE1,
    ROLE_NODE2,
    ROLE_RELAY,
    draw_flips_packed,
    stream,
)
from .df import MessagePair, RelayIndexPair, node1_df_decode, node2_df_decode, relay_df_transcode
from .hf import HashConfig, ListDecodingError, hf_hash, hf_list_decode

SCHEMES = ("pnc", "df-index", "hf")
MAX_N = 24


class ConfigError(ValueError):
    """Inconsistent block length, time-sharing and rate settings."""


def budget(n: int, rate: float) -> int:
    """Bits carried by a block of n uses at the given rate."""
    return int(math.floor(n * rate + 1e-9))


def split(n: int, alpha: float) -> tuple[int, int]:
    """(first, second) part lengths with the second part ceil(alpha n) long."""
    second = int(math.ceil(alpha * n - 1e-9))
    return n - second, second


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    alpha: float
    rates: RatePoint
    channel: BinaryAdderParams
    seed: int = 0
    trials: int = 1000
    code_seed: Optional[int] = None
    eps_typ: float = 0.125
    # (R_R1, R_R2) index rates of the hash-and-forward downlink; None uses
    # the downlink capacities
    dl_rates: Optional[RatePoint] = None
    hf_dl_mode: str = "index"
    regime: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ConfigError(f"block length must be in [1, {MAX_N}], got {self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.trials < 1:
            raise ConfigError("need at least one trial")
        if self.hf_dl_mode not in ("index", "full"):
            raise ConfigError(f"unknown downlink mode {self.hf_dl_mode!r}")
        if not 0.0 <= self.eps_typ <= 1.0:
            raise ConfigError("eps_typ must be in [0, 1]")
        if self.seed < 0 or (self.code_seed is not None and self.code_seed < 0):
            raise ConfigError("seeds must be nonnegative")

    @property
    def b12(self) -> int:
        return budget(self.n, self.rates.r12)

    @property
    def b21(self) -> int:
        return budget(self.n, self.rates.r21)

    @property
    def setup_seed(self) -> int:
        return self.seed if self.code_seed is None else self.code_seed

    def relabeled(self) -> "ProtocolConfig":
        return replace(self, rates=self.rates.swapped(), channel=self.channel.relabeled())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rates"] = {"r12": self.rates.r12, "r21": self.rates.r21}
        d["dl_rates"] = None if self.dl_rates is None else {"rr1": self.dl_rates.r12, "rr2": self.dl_rates.r21}
        return d


class TrialOutcome(NamedTuple):
    relay_ok: bool
    node1_ok: bool
    node2_ok: bool


def _code(cfg: ProtocolConfig, n: int, k: int, role: int) -> LinearCode:
    return random_linear_code(n, k, np.random.SeedSequence(cfg.setup_seed, spawn_key=(PHASE_SETUP, role)))


def _dl_codebook(cfg: ProtocolConfig, bits: int, n: int) -> np.ndarray:
    """2^bits distinct, uniformly drawn downlink words of length n (packed)."""
    if bits > n:
        raise ConfigError(f"downlink needs {bits} bits in {n} uses")
    rng = stream(cfg.setup_seed, 0, PHASE_SETUP, ROLE_DL_CODEBOOK)
    return rng.choice(1 << n, size=1 << bits, replace=False).astype(np.uint64)


def _dl_observe(cfg: ProtocolConfig, word, trial: int, role: int, eps: float) -> np.uint64:
    return np.uint64(word) ^ draw_flips_packed(cfg.n, eps, stream(cfg.seed, trial, PHASE_DL, role))


# ------------------------------------------------------------------------------
# physical-layer network coding

@dataclass(frozen=True, eq=False)
class PncSetup:
    n1: int
    n2: int
    b12: int
    b21: int
    c12: LinearCode   # phase 1, node 1 alone: [n1, b12 - b21]
    cc: LinearCode    # phase 2, common code: [n2, b21]
    dl: np.ndarray    # 2^b12 packed downlink words, index = (column << b21) | row

    @property
    def bdiff(self) -> int:
        return self.b12 - self.b21


@lru_cache(maxsize=64)
def pnc_setup(cfg: ProtocolConfig) -> PncSetup:
    n1, n2 = split(cfg.n, cfg.alpha)
    b12, b21 = cfg.b12, cfg.b21
    if b12 < b21:
        raise ConfigError("pnc expects node 1 to carry the larger budget; relabel the nodes")
    if b21 > n2:
        raise ConfigError(f"common code needs {b21} bits in {n2} phase-2 uses")
    if b12 - b21 > n1:
        raise ConfigError(f"phase-1 code needs {b12 - b21} bits in {n1} phase-1 uses")
    c12 = _code(cfg, max(n1, 1), b12 - b21, 1)
    cc = _code(cfg, max(n2, 1), b21, 2)
    return PncSetup(n1, n2, b12, b21, c12, cc, _dl_codebook(cfg, b12, cfg.n))


def _pnc_messages(cfg: ProtocolConfig, s: PncSetup, trial: int) -> tuple[int, int, int]:
    """(node 1 phase-1 part, node 1 phase-2 part, node 2 message)."""
    rng = stream(cfg.seed, trial, PHASE_MSG, ROLE_RELAY)
    return (int(rng.integers(1 << s.bdiff)), int(rng.integers(1 << s.b21)),
            int(rng.integers(1 << s.b21)))


def relay_phase2(cfg: ProtocolConfig, trial: int) -> tuple[int, int, np.uint64]:
    """
    Phase-2 relay decoding of one trial.

    Returns (true XOR message, decoded message, received packed word).
    """
    s = pnc_setup(cfg)
    _, w2, w21 = _pnc_messages(cfg, s, trial)
    if s.n2 == 0:
        return w2 ^ w21, 0, np.uint64(0)
    noise = draw_flips_packed(s.n2, cfg.channel.eps_r, stream(cfg.seed, trial, PHASE_UL2, ROLE_RELAY))
    y = s.cc.codebook[w2] ^ s.cc.codebook[w21] ^ noise
    return w2 ^ w21, int(ml_decode_packed(s.cc, y)[0]), y


def pnc_round(cfg: ProtocolConfig, trial: int) -> TrialOutcome:
    s = pnc_setup(cfg)
    w1, w2, w21 = _pnc_messages(cfg, s, trial)
    if s.n1 > 0:
        noise = draw_flips_packed(s.n1, cfg.channel.eps_r, stream(cfg.seed, trial, PHASE_UL1, ROLE_RELAY))
        i_hat = int(ml_decode_packed(s.c12, s.c12.codebook[w1] ^ noise)[0])
    else:
        i_hat = 0
    _, j_hat, _ = relay_phase2(cfg, trial)
    relay_ok = i_hat == w1 and j_hat == w2 ^ w21

    word = s.dl[(i_hat << s.b21) | j_hat]
    m21 = 1 << s.b21
    # node 1 knows its column, searches 2^b21 rows
    y1 = _dl_observe(cfg, word, trial, ROLE_NODE1, cfg.channel.eps_1)
    row = int(nearest_word(s.dl[w1 * m21:(w1 + 1) * m21], y1)[0])
    node1_ok = (row ^ w2) == w21
    # node 2 searches the whole codebook
    y2 = _dl_observe(cfg, word, trial, ROLE_NODE2, cfg.channel.eps_2)
    q = int(nearest_word(s.dl, y2)[0])
    node2_ok = (q >> s.b21) == w1 and ((q & (m21 - 1)) ^ w21) == w2
    return TrialOutcome(relay_ok, node1_ok, node2_ok)


# ------------------------------------------------------------------------------
# decode-and-forward with index network coding

@dataclass(frozen=True, eq=False)
class DfSetup:
    n_a: int
    n_b: int
    b12: int
    b21: int
    ca: LinearCode
    cb: LinearCode
    dl: np.ndarray


@lru_cache(maxsize=64)
def df_setup(cfg: ProtocolConfig) -> DfSetup:
    n_a, n_b = split(cfg.n, cfg.alpha)
    b12, b21 = cfg.b12, cfg.b21
    if b12 < b21:
        raise ConfigError("df-index expects node 1 to carry the larger budget; relabel the nodes")
    if b12 > n_a or b21 > n_b:
        raise ConfigError(f"uplink slots ({n_a}, {n_b}) cannot carry ({b12}, {b21}) bits")
    ca = _code(cfg, max(n_a, 1), b12, 1)
    cb = _code(cfg, max(n_b, 1), b21, 2)
    return DfSetup(n_a, n_b, b12, b21, ca, cb, _dl_codebook(cfg, b12, cfg.n))


def df_round(cfg: ProtocolConfig, trial: int) -> TrialOutcome:
    s = df_setup(cfg)
    m12, m21 = 1 << s.b12, 1 << s.b21
    rng = stream(cfg.seed, trial, PHASE_MSG, ROLE_RELAY)
    w12, w21 = int(rng.integers(m12)), int(rng.integers(m21))
    er = cfg.channel.eps_r

    def uplink(code, n, msg, phase):
        if n == 0:
            return 0
        y = code.codebook[msg] ^ draw_flips_packed(n, er, stream(cfg.seed, trial, phase, ROLE_RELAY))
        return int(ml_decode_packed(code, y)[0])

    w12_hat = uplink(s.ca, s.n_a, w12, PHASE_UL1)
    w21_hat = uplink(s.cb, s.n_b, w21, PHASE_UL2)
    relay_ok = w12_hat == w12 and w21_hat == w21
    idx = relay_df_transcode(MessagePair(w12_hat, w21_hat, m12, m21))
    word = s.dl[idx.i * m21 + idx.j]

    col = w12 // m21
    y1 = _dl_observe(cfg, word, trial, ROLE_NODE1, cfg.channel.eps_1)
    row = int(nearest_word(s.dl[col * m21:(col + 1) * m21], y1)[0])
    node1_ok = node1_df_decode(RelayIndexPair(col, row), w12, m21) == w21
    y2 = _dl_observe(cfg, word, trial, ROLE_NODE2, cfg.channel.eps_2)
    q = int(nearest_word(s.dl, y2)[0])
    node2_ok = node2_df_decode(RelayIndexPair(q // m21, q % m21), w21, m12, m21) == w12
    return TrialOutcome(relay_ok, node1_ok, node2_ok)


# ------------------------------------------------------------------------------
# hash-and-forward

def hf_dl_rates(cfg: ProtocolConfig) -> RatePoint:
    """(R_R1, R_R2) with R_R1 >= R_R2; defaults to the downlink capacities."""
    if cfg.dl_rates is not None:
        rr1, rr2 = cfg.dl_rates.r12, cfg.dl_rates.r21
    else:
        rr1 = 1.0 - binary_entropy(cfg.channel.eps_1)
        rr2 = 1.0 - binary_entropy(cfg.channel.eps_2)
    return RatePoint(rr1, min(rr1, rr2))


@dataclass(frozen=True, eq=False)
class HfSetup:
    b12: int
    b21: int
    c12: LinearCode
    c21: LinearCode
    hash: HashConfig
    dl: Optional[np.ndarray]


@lru_cache(maxsize=64)
def hf_setup(cfg: ProtocolConfig) -> HfSetup:
    n = cfg.n
    if n > 16:
        raise ConfigError("hash-and-forward enumerates bins exhaustively; use n <= 16")
    b12, b21 = cfg.b12, cfg.b21
    if b12 > n or b21 > n:
        raise ConfigError(f"uplink codes cannot carry ({b12}, {b21}) bits in {n} uses")
    dl = hf_dl_rates(cfg)
    br1 = min(n, budget(n, dl.r12))
    br2 = min(br1, budget(n, dl.r21))
    h = HashConfig.from_bits(n, br1, br2, cfg.setup_seed)
    words = _dl_codebook(cfg, br1, n) if cfg.hf_dl_mode == "full" else None
    return HfSetup(b12, b21, _code(cfg, n, b12, 1), _code(cfg, n, b21, 2), h, words)


def hf_round(cfg: ProtocolConfig, trial: int) -> TrialOutcome:
    s = hf_setup(cfg)
    n, er = cfg.n, cfg.channel.eps_r
    rng = stream(cfg.seed, trial, PHASE_MSG, ROLE_RELAY)
    w12, w21 = int(rng.integers(1 << s.b12)), int(rng.integers(1 << s.b21))
    x12, x21 = s.c12.codebook[w12], s.c21.codebook[w21]
    y = x12 ^ x21 ^ draw_flips_packed(n, er, stream(cfg.seed, trial, PHASE_UL1, ROLE_RELAY))
    # relay-side encoder error event: observation not typical for p(yR) = uniform
    ones = int(np.bitwise_count(y))
    relay_ok = abs(ones / n - 0.5) <= cfg.eps_typ + 1e-12

    idx = hf_hash(y, s.hash)
    idx1 = idx2 = idx
    if s.dl is not None:
        nc = s.hash.bins_coarse
        word = s.dl[idx.i * nc + idx.j]
        q1 = int(nearest_word(s.dl, _dl_observe(cfg, word, trial, ROLE_NODE1, cfg.channel.eps_1))[0])
        q2 = int(nearest_word(s.dl, _dl_observe(cfg, word, trial, ROLE_NODE2, cfg.channel.eps_2))[0])
        idx1 = RelayIndexPair(q1 // nc, q1 % nc)
        idx2 = RelayIndexPair(q2 // nc, q2 % nc)

    def attempt(idx_, side, code, role, truth):
        try:
            return hf_list_decode(idx_, side, code, cfg.channel, cfg.eps_typ, s.hash, role) == truth
        except ListDecodingError:
            return False

    node1_ok = attempt(idx1, x12, s.c21, "node1", w21)
    node2_ok = attempt(idx2, x21, s.c12, "node2", w12)
    return TrialOutcome(relay_ok, node1_ok, node2_ok)


ROUNDS = {"pnc": pnc_round, "df-index": df_round, "hf": hf_round}
SETUPS = {"pnc": pnc_setup, "df-index": df_setup, "hf": hf_setup}


# ------------------------------------------------------------------------------
# operating points

def anchor_rates(channel: BinaryAdderParams, scheme: str, dl_rates: Optional[RatePoint] = None) -> RatePoint:
    """
    Reference rate pair that ``--rate-frac`` scales, for uniform inputs.

    pnc: the binary adder outer corner (equal to the relay-regime rates);
    df-index: the outer corner scaled onto the sum-rate line
    I(X12, X21; YR) = 1 - h(eps_r); hf: the hash-and-forward caps.
    """
    outer = binary_adder_outer(channel)
    cr = 1.0 - binary_entropy(channel.eps_r)
    if scheme == "pnc":
        return outer
    if scheme == "df-index":
        return outer.scaled(min(1.0, cr / outer.total)) if outer.total > 0 else outer
    if scheme == "hf":
        cfg = ProtocolConfig(1, 1.0, outer, channel, dl_rates=dl_rates)
        dl = hf_dl_rates(cfg)
        r12, r21 = hf_caps(cr, cr, binary_entropy(channel.eps_r), dl.r21, dl.r12 - dl.r21)
        return RatePoint(float(r12), float(r21))
    raise ConfigError(f"unknown scheme {scheme!r}")


def auto_regime_config(channel: BinaryAdderParams, n: int, rate_frac: float, **kw) -> ProtocolConfig:
    rp = regime_alpha(channel)
    return ProtocolConfig(n, rp.alpha, rp.rates.scaled(rate_frac), channel, regime=rp.regime, **kw)


# ------------------------------------------------------------------------------
# Monte Carlo driver

@dataclass
class SimReport:
    scheme: str
    n: int
    alpha: float
    r12_bits: int
    r21_bits: int
    eps_r: float
    eps_1: float
    eps_2: float
    seed: int
    trials: int
    errors_relay: int
    errors_node1: int
    errors_node2: int
    bler_node1: float
    bler_node2: float
    bler_relay: float
    regime: Optional[str]
    rng_name: str
    version: str
    config: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    def to_dict(self, elapsed: bool = True) -> dict:
        d = asdict(self)
        if not elapsed:
            d.pop("elapsed_s")
        return d

    def to_json(self, elapsed: bool = True) -> str:
        return json.dumps(self.to_dict(elapsed), indent=2) + "\n"

    def scalar_fields(self) -> dict:
        return {k: v for k, v in self.to_dict().items() if k != "config"}


def _count(cfg: ProtocolConfig, scheme: str, lo: int, hi: int) -> tuple[int, int, int]:
    fn = ROUNDS[scheme]
    er = e1 = e2 = 0
    for t in range(lo, hi):
        out = fn(cfg, t)
        er += not out.relay_ok
        e1 += not out.node1_ok
        e2 += not out.node2_ok
    return er, e1, e2


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get("TWRLAB_THREADS", "1"))
        except ValueError:
            workers = 1
    return max(1, workers)


def monte_carlo(cfg: ProtocolConfig, scheme: str = "pnc", workers: Optional[int] = None) -> SimReport:
    """
    Run ``cfg.trials`` independent rounds and aggregate error counts.

    Trial t draws only from streams keyed by (cfg.seed, t, ...), so the report
    (apart from ``elapsed_s``) is a pure function of the configuration and
    does not depend on ``workers``.
    """
    if scheme not in ROUNDS:
        raise ConfigError(f"unknown scheme {scheme!r}")
    start = time.perf_counter()
    swap = scheme in ("pnc", "df-index") and cfg.b21 > cfg.b12
    run_cfg = cfg.relabeled() if swap else cfg
    SETUPS[scheme](run_cfg)  # validate before spawning work

    nw = min(_workers(workers), cfg.trials)
    if nw == 1:
        er, e1, e2 = _count(run_cfg, scheme, 0, cfg.trials)
    else:
        edges = np.linspace(0, cfg.trials, nw + 1).astype(int)
        with ProcessPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(_count, [run_cfg] * nw, [scheme] * nw, edges[:-1], edges[1:]))
        er, e1, e2 = (sum(p[i] for p in parts) for i in range(3))
    if swap:
        e1, e2 = e2, e1

    t = cfg.trials
    return SimReport(
        scheme=scheme, n=cfg.n, alpha=cfg.alpha, r12_bits=cfg.b12, r21_bits=cfg.b21,
        eps_r=cfg.channel.eps_r, eps_1=cfg.channel.eps_1, eps_2=cfg.channel.eps_2,
        seed=cfg.seed, trials=t, errors_relay=er, errors_node1=e1, errors_node2=e2,
        bler_node1=e1 / t, bler_node2=e2 / t, bler_relay=er / t, regime=cfg.regime,
        rng_name=RNG_NAME, version=__version__, config=cfg.to_dict(),
        elapsed_s=round(time.perf_counter() - start, 6),
    )
