"""Link-level sessions over a noiseless, zero-cost index feedback channel.

Three schemes share one shape: the transmitter holds a codeword and answers
symbol-index requests; the receiver accumulates observations and eventually
decodes.  The fixed-length scheme spends a fixed transmission budget, the
first part round robin and the rest on receiver-selected symbols.  The
variable-length scheme protects the message with a CRC and keeps requesting
batches until the check passes or a transmission cap is hit.  The
conventional baseline is round robin only and never uses feedback.
"""

from dataclasses import dataclass

import numpy as np

from .channel import awgn, modulate
from .polar import PolarCode, _as_bit_array, encode, sc_decode
from .reliability import (
    ObservationLedger,
    ReliabilityState,
    channel_llr,
    record_observation,
    select_next_symbol,
)

CRC16_POLY = 0x1021
CRC16_WIDTH = 16


def _crc_remainder(bits, poly, width):
    # MSB-first shift register seeded with all ones, no reflection, no
    # final xor (the CCITT-FALSE convention for the default polynomial).
    mask = (1 << width) - 1
    top = 1 << (width - 1)
    reg = mask
    for b in bits:
        high = (reg & top) != 0
        reg = (reg << 1) & mask
        if high != bool(b):
            reg ^= poly
    return reg


def crc_encode(info_bits, poly=CRC16_POLY, width=CRC16_WIDTH):
    """Append the CRC remainder of ``info_bits``, MSB first.

    Returns a payload of ``len(info_bits) + width`` bits.
    """
    info = _as_bit_array(info_bits, "info_bits")
    reg = _crc_remainder(info, poly, width)
    tail = [(reg >> (width - 1 - i)) & 1 for i in range(width)]
    return np.concatenate([info, np.asarray(tail, dtype=np.uint8)])


def crc_check(payload, poly=CRC16_POLY, width=CRC16_WIDTH):
    """True iff the trailing ``width`` bits match the CRC of the rest."""
    bits = _as_bit_array(payload, "payload")
    if bits.size < width:
        raise ValueError(f"payload must have at least {width} bits, got {bits.size}")
    reg = _crc_remainder(bits[: bits.size - width], poly, width)
    tail = [(reg >> (width - 1 - i)) & 1 for i in range(width)]
    return bool(np.array_equal(bits[bits.size - width :], tail))


@dataclass
class SessionConfig:
    """Everything a session needs besides the message and the noise stream.

    ``total_tx`` is the budget of the fixed-length and baseline schemes.
    ``t0`` transmissions are spent round robin first (default: one pass over
    the codeword).  The variable-length scheme rechecks after every ``batch``
    requested symbols and gives up at ``max_tx`` (default: eight passes).
    """

    code: PolarCode
    channel: object
    total_tx: int = None
    t0: int = None
    batch: int = 16
    max_tx: int = None
    crc_poly: int = CRC16_POLY
    crc_width: int = CRC16_WIDTH

    def __post_init__(self):
        if self.t0 is None:
            self.t0 = self.code.n
        if self.max_tx is None:
            self.max_tx = 8 * self.code.n
        if self.t0 < 0:
            raise ValueError(f"t0 must be nonnegative, got {self.t0}")
        if self.batch < 1:
            raise ValueError(f"batch must be at least 1, got {self.batch}")
        if self.crc_width < 1:
            raise ValueError(f"crc_width must be at least 1, got {self.crc_width}")
        if self.total_tx is not None and self.total_tx < self.t0:
            raise ValueError(
                f"total_tx ({self.total_tx}) must be at least t0 ({self.t0})"
            )
        if self.max_tx < self.t0:
            raise ValueError(f"max_tx ({self.max_tx}) must be at least t0 ({self.t0})")

    @property
    def info_len(self):
        """Message length of the variable-length scheme (CRC bits excluded)."""
        return self.code.k - self.crc_width


@dataclass
class SessionResult:
    decoded_info: np.ndarray
    tx_count: int
    bit_errors: int
    block_error: bool
    detected_failure: bool
    request_trace: np.ndarray


class Transmitter:
    """Holds the encoded block; stateless beyond it.  Answers index requests."""

    def __init__(self, code, input_bits):
        bits = _as_bit_array(input_bits, "input_bits")
        if bits.size != code.k:
            raise ValueError(f"input_bits length must be {code.k}, got {bits.size}")
        self.codeword = encode(code, bits)

    def send(self, j):
        return int(self.codeword[j - 1])


class Receiver:
    """Accumulates observations and drives selection and decoding."""

    def __init__(self, code, channel):
        self.code = code
        self.channel = channel
        self.ledger = ObservationLedger(code.n)
        self.state = ReliabilityState(code)

    def observe(self, j, y):
        record_observation(self.state, self.ledger, j, y, self.channel)

    def next_symbol(self):
        return select_next_symbol(self.state)

    def channel_llrs(self):
        return np.array(
            [
                channel_llr(self.ledger.observations(j), self.channel)
                for j in range(1, self.code.n + 1)
            ]
        )

    def decode(self):
        return sc_decode(self.code, self.channel_llrs())


def _transmit(transmitter, receiver, ch, rng, j):
    y = awgn(modulate(transmitter.send(j), ch), ch, rng)
    receiver.observe(j, y)


def run_fixed_length_session(config, message, rng):
    """Fixed transmission budget: round robin, then selector-driven requests.

    Parameters
    ----------
    config : SessionConfig
        ``total_tx`` must be set.
    message : array_like
        ``config.code.k`` bits.
    rng : RngStream
        Consumed one normal draw per transmission.
    """
    if config.total_tx is None:
        raise ValueError("fixed-length session requires config.total_tx")
    code, ch = config.code, config.channel
    msg = _as_bit_array(message, "message")
    if msg.size != code.k:
        raise ValueError(f"message length must be {code.k}, got {msg.size}")
    transmitter = Transmitter(code, msg)
    receiver = Receiver(code, ch)
    trace = []
    for i in range(config.total_tx):
        if i < config.t0:
            j = (i % code.n) + 1
        else:
            j = receiver.next_symbol()
            trace.append(j)
        _transmit(transmitter, receiver, ch, rng, j)
    decoded, _ = receiver.decode()
    bit_errors = int(np.count_nonzero(decoded != msg))
    return SessionResult(
        decoded_info=decoded,
        tx_count=config.total_tx,
        bit_errors=bit_errors,
        block_error=bit_errors > 0,
        detected_failure=False,
        request_trace=np.asarray(trace, dtype=np.int64),
    )


def run_conventional_baseline(config, message, rng):
    """Round robin over all symbols until the budget is spent; no feedback."""
    if config.total_tx is None:
        raise ValueError("baseline session requires config.total_tx")
    code, ch = config.code, config.channel
    msg = _as_bit_array(message, "message")
    if msg.size != code.k:
        raise ValueError(f"message length must be {code.k}, got {msg.size}")
    transmitter = Transmitter(code, msg)
    receiver = Receiver(code, ch)
    for i in range(config.total_tx):
        _transmit(transmitter, receiver, ch, rng, (i % code.n) + 1)
    decoded, _ = receiver.decode()
    bit_errors = int(np.count_nonzero(decoded != msg))
    return SessionResult(
        decoded_info=decoded,
        tx_count=config.total_tx,
        bit_errors=bit_errors,
        block_error=bit_errors > 0,
        detected_failure=False,
        request_trace=np.zeros(0, dtype=np.int64),
    )


def run_variable_length_session(config, message, rng):
    """CRC-gated stopping: decode after the round-robin stage, then request
    ``batch`` more symbols per failed check until the check passes or the
    ``max_tx`` cap is reached (a detected failure).

    ``message`` carries ``config.info_len`` bits; the CRC tail fills the
    code's remaining information positions.
    """
    code, ch = config.code, config.channel
    if config.crc_width >= code.k:
        raise ValueError(
            f"crc_width ({config.crc_width}) must be smaller than k ({code.k})"
        )
    msg = _as_bit_array(message, "message")
    if msg.size != config.info_len:
        raise ValueError(f"message length must be {config.info_len}, got {msg.size}")
    payload = crc_encode(msg, config.crc_poly, config.crc_width)
    transmitter = Transmitter(code, payload)
    receiver = Receiver(code, ch)
    trace = []
    tx = 0
    for i in range(config.t0):
        _transmit(transmitter, receiver, ch, rng, (i % code.n) + 1)
        tx += 1
    detected = False
    while True:
        payload_hat, _ = receiver.decode()
        if crc_check(payload_hat, config.crc_poly, config.crc_width):
            break
        if tx >= config.max_tx:
            detected = True
            break
        steps = min(config.batch, config.max_tx - tx)
        for _ in range(steps):
            j = receiver.next_symbol()
            trace.append(j)
            _transmit(transmitter, receiver, ch, rng, j)
            tx += 1
    decoded = payload_hat[: config.info_len]
    bit_errors = int(np.count_nonzero(decoded != msg))
    return SessionResult(
        decoded_info=decoded,
        tx_count=tx,
        bit_errors=bit_errors,
        block_error=detected or bit_errors > 0,
        detected_failure=detected,
        request_trace=np.asarray(trace, dtype=np.int64),
    )
