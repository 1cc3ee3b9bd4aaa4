"""Executable models of the relay network: channels, relay coding and Monte Carlo rounds."""

from .channels import RNG_NAME, adder_uplink, bsc_apply, stream
from .df import (
    MessagePair,
    RelayIndexPair,
    SideInformationError,
    node1_df_decode,
    node2_df_decode,
    relay_df_transcode,
)
from .hf import (
    Ambiguity,
    Erasure,
    HashConfig,
    ListDecodingError,
    bin_members,
    hf_hash,
    hf_list_decode,
    is_jointly_typical,
)
from .protocol import (
    ConfigError,
    ProtocolConfig,
    SimReport,
    TrialOutcome,
    anchor_rates,
    auto_regime_config,
    df_round,
    hf_round,
    monte_carlo,
    pnc_round,
    relay_phase2,
)
