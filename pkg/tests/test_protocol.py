"""Session-level tests: all three schemes against the compiled trial
kernels, stopping-rule bookkeeping, and conservation invariants."""

import numpy as np
import pytest

import polarfeed._kernels as _kernels
from polarfeed import (
    ChannelModel,
    Receiver,
    RngStream,
    SessionConfig,
    Transmitter,
    construct_code,
    run_conventional_baseline,
    run_fixed_length_session,
    run_variable_length_session,
)

QUIET = ChannelModel(amplitude=1.0, noise_var=1e-4)
NOISY = ChannelModel(amplitude=0.5, noise_var=1.0)


def _code(n=16, k=8):
    return construct_code(n, k, 0.4)


def _kernel_workspaces(code):
    n, k, levels = code.n, code.k, code.levels
    return dict(
        msg_ws=np.empty(k, np.uint8),
        u_ws=np.empty(n, np.uint8),
        xstd_ws=np.empty(n, np.uint8),
        xpaper_ws=np.empty(n, np.uint8),
        leaf=np.empty(n, np.float64),
        llr_acc=np.empty(n, np.float64),
        tree=np.empty((levels + 1, n), np.float64),
        adj=np.empty((levels + 1, n), np.float64),
        llr_std_ws=np.empty(n, np.float64),
        u_hat=np.empty(n, np.uint8),
        llr_ws=np.empty(2 * n, np.float64),
        bit_ws=np.empty(2 * n, np.uint8),
        bit_cur=np.empty(n, np.uint8),
    )


def test_fixed_session_noiseless_recovers_message():
    code = _code()
    cfg = SessionConfig(code=code, channel=QUIET, total_tx=40)
    rng = RngStream.for_trial(1, 0, 0)
    msg = rng.bits(code.k)
    res = run_fixed_length_session(cfg, msg, rng)
    assert np.array_equal(res.decoded_info, msg)
    assert res.bit_errors == 0
    assert not res.block_error
    assert not res.detected_failure
    assert res.tx_count == 40


def test_baseline_session_noiseless_recovers_message():
    code = _code()
    cfg = SessionConfig(code=code, channel=QUIET, total_tx=32)
    rng = RngStream.for_trial(2, 0, 0)
    msg = rng.bits(code.k)
    res = run_conventional_baseline(cfg, msg, rng)
    assert np.array_equal(res.decoded_info, msg)
    assert res.request_trace.size == 0


def test_variable_session_noiseless_stops_at_first_check():
    code = construct_code(16, 12, 0.4)
    cfg = SessionConfig(code=code, channel=QUIET, crc_poly=0x07, crc_width=8)
    rng = RngStream.for_trial(3, 0, 0)
    msg = rng.bits(cfg.info_len)
    res = run_variable_length_session(cfg, msg, rng)
    assert np.array_equal(res.decoded_info, msg)
    assert res.tx_count == cfg.t0
    assert res.request_trace.size == 0
    assert not res.detected_failure


def test_fixed_trace_covers_interactive_stage_only():
    code = _code()
    cfg = SessionConfig(code=code, channel=NOISY, total_tx=50, t0=20)
    rng = RngStream.for_trial(4, 0, 0)
    res = run_fixed_length_session(cfg, rng.bits(code.k), rng)
    assert res.request_trace.size == 30
    assert np.all((res.request_trace >= 1) & (res.request_trace <= code.n))


def test_variable_session_requests_in_batch_multiples():
    code = construct_code(16, 12, 0.4)
    cfg = SessionConfig(
        code=code, channel=NOISY, t0=16, batch=5, max_tx=96, crc_poly=0x07,
        crc_width=8,
    )
    for trial in range(30):
        rng = RngStream.for_trial(5, 0, trial)
        msg = rng.bits(cfg.info_len)
        res = run_variable_length_session(cfg, msg, rng)
        extra = res.tx_count - cfg.t0
        assert res.request_trace.size == extra
        if res.tx_count < cfg.max_tx:
            assert extra % cfg.batch == 0
        assert res.tx_count <= cfg.max_tx
        if res.detected_failure:
            assert res.block_error
            assert res.tx_count == cfg.max_tx


def test_variable_session_detects_hopeless_runs():
    # Amplitude far below the noise floor and a tight cap: the check cannot
    # pass except by a 2^-8 fluke, so most runs end detected.
    code = construct_code(16, 12, 0.4)
    ch = ChannelModel(amplitude=0.05, noise_var=4.0)
    cfg = SessionConfig(
        code=code, channel=ch, t0=16, batch=4, max_tx=32, crc_poly=0x07,
        crc_width=8,
    )
    detected = 0
    for trial in range(20):
        rng = RngStream.for_trial(6, 0, trial)
        res = run_variable_length_session(cfg, rng.bits(cfg.info_len), rng)
        detected += int(res.detected_failure)
    assert detected >= 15


def test_feedback_free_fixed_equals_baseline():
    code = _code()
    for trial in range(10):
        rng_a = RngStream.for_trial(7, 0, trial)
        rng_b = RngStream.for_trial(7, 0, trial)
        msg_a = rng_a.bits(code.k)
        msg_b = rng_b.bits(code.k)
        cfg_a = SessionConfig(code=code, channel=NOISY, total_tx=48, t0=48)
        cfg_b = SessionConfig(code=code, channel=NOISY, total_tx=48)
        res_a = run_fixed_length_session(cfg_a, msg_a, rng_a)
        res_b = run_conventional_baseline(cfg_b, msg_b, rng_b)
        assert np.array_equal(res_a.decoded_info, res_b.decoded_info)
        assert res_a.bit_errors == res_b.bit_errors


def test_fixed_session_matches_compiled_trial():
    code = _code()
    cfg = SessionConfig(code=code, channel=NOISY, total_tx=48, t0=16)
    for trial in range(25):
        rng = RngStream.for_trial(9, 2, trial)
        msg = rng.bits(code.k)
        res = run_fixed_length_session(cfg, msg, rng)
        seed = np.uint64(_kernels.stream_seed(np.uint64(9), np.uint64(2),
                                              np.uint64(trial)))
        be, blk = _kernels.fixed_trial(
            seed, code._info_pos, code._info_mask, code._frozen, code._rev,
            code._offs, 16, 48, NOISY.amplitude, NOISY.noise_var,
            **_kernel_workspaces(code),
        )
        assert (res.bit_errors, int(res.block_error)) == (be, blk)


def test_variable_session_matches_compiled_trial():
    code = construct_code(16, 9, 0.4)
    cfg = SessionConfig(
        code=code, channel=NOISY, t0=16, batch=3, max_tx=40, crc_poly=0x03,
        crc_width=4,
    )
    for trial in range(40):
        rng = RngStream.for_trial(10, 1, trial)
        msg = rng.bits(cfg.info_len)
        res = run_variable_length_session(cfg, msg, rng)
        seed = np.uint64(_kernels.stream_seed(np.uint64(10), np.uint64(1),
                                              np.uint64(trial)))
        ws = _kernel_workspaces(code)
        ws["payload_hat"] = np.empty(code.k, np.uint8)
        be, blk, det, tx = _kernels.variable_trial(
            seed, code._info_pos, code._info_mask, code._frozen, code._rev,
            code._offs, cfg.info_len, 0x03, 4, 16, 3, 40,
            NOISY.amplitude, NOISY.noise_var, **ws,
        )
        assert (res.bit_errors, int(res.block_error),
                int(res.detected_failure), res.tx_count) == (be, blk, det, tx)


def test_receiver_ledger_conserves_observation_count():
    code = _code()
    tx = Transmitter(code, np.zeros(code.k, dtype=np.uint8))
    rx = Receiver(code, NOISY)
    rng = RngStream.for_trial(11, 0, 0)
    sent = 0
    for i in range(code.n):
        rx.observe((i % code.n) + 1, float(rng.normal()))
        sent += 1
    for _ in range(37):
        j = rx.next_symbol()
        rx.observe(j, float(rng.normal()))
        sent += 1
    assert rx.ledger.total == sent
    assert rx.ledger.counts().sum() == sent
    assert tx.send(1) in (0, 1)


def test_transmitter_answers_codeword_bits():
    code = construct_code(4, 2, 0.3)
    tx = Transmitter(code, [1, 0])
    assert [tx.send(j) for j in (1, 2, 3, 4)] == list(
        np.asarray(tx.codeword, dtype=int)
    )


def test_session_config_defaults_and_validation():
    code = _code()
    cfg = SessionConfig(code=code, channel=NOISY)
    assert cfg.t0 == code.n
    assert cfg.max_tx == 8 * code.n
    assert cfg.info_len == code.k - 16
    with pytest.raises(ValueError, match="total_tx"):
        SessionConfig(code=code, channel=NOISY, total_tx=8, t0=16)
    with pytest.raises(ValueError, match="batch"):
        SessionConfig(code=code, channel=NOISY, batch=0)
    with pytest.raises(ValueError, match="max_tx"):
        SessionConfig(code=code, channel=NOISY, t0=32, max_tx=20)
    with pytest.raises(ValueError, match="t0"):
        SessionConfig(code=code, channel=NOISY, t0=-1)


def test_session_argument_validation():
    code = _code()
    rng = RngStream.for_trial(0, 0, 0)
    with pytest.raises(ValueError, match="total_tx"):
        run_fixed_length_session(
            SessionConfig(code=code, channel=NOISY), np.zeros(8, np.uint8), rng
        )
    with pytest.raises(ValueError, match="total_tx"):
        run_conventional_baseline(
            SessionConfig(code=code, channel=NOISY), np.zeros(8, np.uint8), rng
        )
    cfg = SessionConfig(code=code, channel=NOISY, total_tx=32)
    with pytest.raises(ValueError, match="message length"):
        run_fixed_length_session(cfg, np.zeros(5, np.uint8), rng)
    with pytest.raises(ValueError, match="message length"):
        run_variable_length_session(
            SessionConfig(code=code, channel=NOISY, crc_poly=0x07, crc_width=4),
            np.zeros(2, np.uint8), rng,
        )


def test_variable_session_rejects_wide_crc():
    code = construct_code(16, 8, 0.4)
    cfg = SessionConfig(code=code, channel=NOISY, crc_width=8)
    rng = RngStream.for_trial(0, 0, 0)
    with pytest.raises(ValueError, match="crc_width"):
        run_variable_length_session(cfg, np.zeros(0, dtype=np.uint8), rng)
