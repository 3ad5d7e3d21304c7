"""Polar coding with receiver-driven symbol-index feedback.

The pieces, bottom up: a polar codec (`polar`), the binary-antipodal AWGN
channel and reproducible RNG streams (`channel`), per-symbol reliability
tracking with sensitivities (`reliability`), link-level session protocols
with CRC-gated stopping (`protocol`), and a Monte Carlo sweep harness with
CSV/SVG output (`harness`, `svgplot`).
"""

from .channel import ChannelModel, RngStream, awgn, ebn0_db, modulate
from .harness import (
    PointStats,
    SweepSpec,
    format_csv,
    run_point,
    run_sweep,
    wilson_interval,
    write_csv,
)
from .polar import (
    PolarCode,
    construct_code,
    encode,
    llr_f,
    llr_g,
    polar_transform,
    sc_decode,
    z_recursion,
)
from .protocol import (
    SessionConfig,
    SessionResult,
    Receiver,
    Transmitter,
    crc_check,
    crc_encode,
    run_conventional_baseline,
    run_fixed_length_session,
    run_variable_length_session,
)
from .reliability import (
    ObservationLedger,
    ReliabilityState,
    bsc_epsilon,
    channel_llr,
    leaf_z_factor,
    record_observation,
    refresh,
    select_next_symbol,
)
from .svgplot import render_sweep

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "ObservationLedger",
    "PointStats",
    "PolarCode",
    "Receiver",
    "ReliabilityState",
    "RngStream",
    "SessionConfig",
    "SessionResult",
    "SweepSpec",
    "Transmitter",
    "awgn",
    "bsc_epsilon",
    "channel_llr",
    "construct_code",
    "crc_check",
    "crc_encode",
    "ebn0_db",
    "encode",
    "format_csv",
    "leaf_z_factor",
    "llr_f",
    "llr_g",
    "modulate",
    "polar_transform",
    "record_observation",
    "refresh",
    "render_sweep",
    "run_conventional_baseline",
    "run_fixed_length_session",
    "run_point",
    "run_sweep",
    "run_variable_length_session",
    "sc_decode",
    "select_next_symbol",
    "wilson_interval",
    "write_csv",
    "z_recursion",
]
