"""Acceptance suite: one test per shipped guarantee, each ending in a single
PASS/FAIL verdict line.

Run with ``pytest -s tests/test_acceptance.py`` to see the verdict lines as
they happen; without ``-s`` they still appear in the captured output of any
failing test.  The waterfall comparison (criterion 7) simulates tens of
millions of interactive steps and dominates the runtime.
"""

import math
import time
from dataclasses import replace

import numpy as np

import polarfeed._kernels as _kernels
from polarfeed import (
    ChannelModel,
    ObservationLedger,
    PolarCode,
    ReliabilityState,
    SweepSpec,
    bsc_epsilon,
    construct_code,
    encode,
    format_csv,
    leaf_z_factor,
    record_observation,
    refresh,
    run_point,
    run_sweep,
    sc_decode,
    z_recursion,
)
from polarfeed.protocol import _crc_remainder, crc_check, crc_encode


def _verdict(num, ok, detail):
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def _bec_closed_form(j, levels, eps):
    z = eps
    for s in range(levels):
        if (j - 1 >> (levels - 1 - s)) & 1:
            z = z * z
        else:
            z = 2.0 * z - z * z
    return z


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_worked_block_exact():
    code = PolarCode(4, (3, 4))
    got = encode(code, [1, 0])
    best = min(
        _timed(lambda: encode(code, [1, 0]))[1] for _ in range(5)
    )
    ok = got.tolist() == [1, 1, 0, 0] and best < 1e-3
    _verdict(1, ok, f"codeword {got.tolist()}, encode time {best * 1e6:.0f} us")


def test_criterion_2_reliability_recursion_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 4, 8, 1024):
        levels = n.bit_length() - 1
        for eps in (0.1, 0.25, 0.5):
            got = z_recursion(np.full(n, eps))
            want = np.array(
                [_bec_closed_form(j, levels, eps) for j in range(1, n + 1)]
            )
            worst = max(worst, float(np.max(np.abs(got - want))))
    dt = time.perf_counter() - t0
    ok = worst < 1e-12 and dt < 1.0
    _verdict(2, ok, f"max deviation {worst:.2e}, runtime {dt:.2f} s")


def test_criterion_3_noiseless_roundtrip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    block_errors = 0
    pairs = 0
    for levels in range(1, 9):
        n = 1 << levels
        for _ in range(1000):
            k = int(rng.integers(1, n + 1))
            info = tuple(sorted(rng.choice(n, size=k, replace=False) + 1))
            code = PolarCode(n, info)
            msg = rng.integers(0, 2, k).astype(np.uint8)
            x = encode(code, msg)
            llrs = np.where(x == 0, 50.0, -50.0)
            decoded, _ = sc_decode(code, llrs)
            block_errors += int(not np.array_equal(decoded, msg))
            pairs += 1
    dt = time.perf_counter() - t0
    ok = block_errors == 0 and dt < 30.0
    _verdict(3, ok, f"{block_errors}/{pairs} block errors, runtime {dt:.1f} s")


def test_criterion_4_sensitivities_match_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    step = 1e-6
    worst = 0.0
    for _ in range(100):
        levels = int(rng.integers(1, 7))
        n = 1 << levels
        k = int(rng.integers(1, n + 1))
        info = tuple(sorted(rng.choice(n, size=k, replace=False) + 1))
        state = ReliabilityState(PolarCode(n, info))
        base = rng.uniform(0.05, 0.95, n)
        state.leaf_z[:] = base
        refresh(state)
        sens = state.sensitivities.copy()
        # Probe the most sensitive coordinates: a 1e-6 central difference
        # carries ~1e-9 of absolute roundoff, so near-zero derivatives have
        # no meaningful relative error to compare against.
        for i in np.argsort(sens)[-4:]:
            state.leaf_z[:] = base
            state.leaf_z[i] += step
            hi = refresh(state).total_z
            state.leaf_z[:] = base
            state.leaf_z[i] -= step
            lo = refresh(state).total_z
            fd = (hi - lo) / (2.0 * step)
            rel = abs(sens[i] - fd) / max(abs(fd), 1e-9)
            worst = max(worst, rel)
    dt = time.perf_counter() - t0
    ok = worst < 1e-5 and dt < 10.0
    _verdict(4, ok, f"worst relative error {worst:.2e}, runtime {dt:.1f} s")


def test_criterion_5_monotone_descent():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    ch = ChannelModel(amplitude=0.5, noise_var=1.0)
    events = 0
    violations = 0
    for _ in range(25):
        n = 64
        k = int(rng.integers(1, n + 1))
        info = tuple(sorted(rng.choice(n, size=k, replace=False) + 1))
        state = ReliabilityState(PolarCode(n, info))
        ledger = ObservationLedger(n)
        prev = state.total_z
        for _ in range(400):
            j = int(rng.integers(1, n + 1))
            y = float(rng.normal(0.0, math.sqrt(ch.noise_var)))
            record_observation(state, ledger, j, y, ch)
            if state.total_z > prev + 1e-12:
                violations += 1
            prev = state.total_z
            events += 1
    dt = time.perf_counter() - t0
    ok = violations == 0 and events == 10**4 and dt < 10.0
    _verdict(5, ok, f"{violations}/{events} increases, runtime {dt:.1f} s")


def test_criterion_6_virtual_channel_consistency():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10**4):
        y = float(rng.uniform(0.0, 50.0))
        ch = ChannelModel(
            amplitude=float(rng.uniform(0.05, 4.0)),
            noise_var=float(rng.uniform(0.05, 8.0)),
        )
        eps = bsc_epsilon(y, ch)
        worst = max(
            worst, abs(2.0 * math.sqrt(eps * (1.0 - eps)) - leaf_z_factor(y, ch))
        )
    ref = leaf_z_factor(1.0, ChannelModel(amplitude=1.0, noise_var=1.0))
    ok = worst < 1e-12 and abs(ref - 0.648054) < 1e-6
    _verdict(6, ok, f"max pairwise gap {worst:.2e}, sech(1) = {ref:.6f}")


def test_criterion_7_waterfall_comparison():
    t0 = time.perf_counter()
    spec = SweepSpec(
        code_n=1024,
        code_k=512,
        amplitude=0.5,
        noise_var=1.0,
        budgets=(2048, 3072, 4096),
        trials=2000,
        master_seed=20240817,
    )
    ch = ChannelModel(amplitude=spec.amplitude, noise_var=spec.noise_var)
    points = run_sweep(spec)
    print()
    print(format_csv(points, ch), end="")
    by = {(p.scheme, p.budget): p for p in points}
    problems = []
    for budget in spec.budgets:
        fx, bl = by[("fixed", budget)], by[("baseline", budget)]
        flo, fhi = fx.bler_ci95
        blo, bhi = bl.bler_ci95
        if not (fx.bler < bl.bler and fhi < blo):
            problems.append(
                f"budget {budget}: fixed {fx.bler:.3f} [{flo:.3f},{fhi:.3f}] vs "
                f"baseline {bl.bler:.3f} [{blo:.3f},{bhi:.3f}] not separated"
            )
    j_info = spec.code_k - spec.crc_width
    for i, budget in enumerate(spec.budgets):
        vl = by[("variable", budget)]
        t_match = round(vl.avg_tx * spec.code_k / j_info)
        matched = run_point(
            replace(spec, trials=1000), "fixed", t_match, 1000 + i
        )
        print(
            f"variable t0={budget}: bler {vl.bler:.4f} at avg {vl.avg_tx:.0f} tx "
            f"({vl.ebn0(ch):+.2f} dB) vs fixed bler {matched.bler:.3f} "
            f"at {t_match} tx ({matched.ebn0(ch):+.2f} dB)"
        )
        if vl.bler > matched.bler:
            problems.append(
                f"t0 {budget}: variable {vl.bler:.4f} above matched fixed "
                f"{matched.bler:.4f}"
            )
    dt = time.perf_counter() - t0
    if dt >= 900.0:
        problems.append(f"runtime {dt:.0f} s over the 15 minute bound")
    ok = not problems
    _verdict(
        7,
        ok,
        f"runtime {dt:.0f} s"
        + ("" if ok else "; " + "; ".join(problems)),
    )


def test_criterion_8_crc_check_value_and_flip_detection():
    bits = []
    for byte in b"123456789":
        bits.extend((byte >> (7 - i)) & 1 for i in range(8))
    arr = np.array(bits, dtype=np.uint8)
    register = _crc_remainder(arr, 0x1021, 16)

    # Independent oracle: remainder of (ones * x^L + M(x) * x^16) mod G.
    m_int = 0
    for b in bits:
        m_int = (m_int << 1) | b
    dividend = (0xFFFF << len(bits)) ^ (m_int << 16)
    g_full = (1 << 16) | 0x1021
    while dividend.bit_length() > 16:
        dividend ^= g_full << (dividend.bit_length() - 17)

    rng = np.random.default_rng(8)
    undetected = 0
    payloads = 0
    for _ in range(10**3):
        info = rng.integers(0, 2, int(rng.integers(1, 49))).astype(np.uint8)
        payload = crc_encode(info)
        payloads += 1
        for pos in range(payload.size):
            bad = payload.copy()
            bad[pos] ^= 1
            if crc_check(bad):
                undetected += 1
    ok = register == 0x29B1 and dividend == 0x29B1 and undetected == 0
    _verdict(
        8,
        ok,
        f"check value 0x{register:04X} (oracle 0x{dividend:04X}), "
        f"{undetected} undetected flips over {payloads} payloads",
    )


def test_criterion_9_parallel_serial_equivalence():
    base = dict(
        code_n=64,
        code_k=32,
        amplitude=0.5,
        noise_var=1.0,
        budgets=(128, 192),
        crc_width=8,
        crc_poly=0x07,
        max_tx=512,
        trials=400,
        master_seed=424242,
    )
    ch = ChannelModel(amplitude=0.5, noise_var=1.0)
    serial = format_csv(run_sweep(SweepSpec(workers=1, **base)), ch)
    parallel = format_csv(run_sweep(SweepSpec(workers=8, **base)), ch)
    ok = serial == parallel
    _verdict(9, ok, f"{len(serial)} CSV bytes, workers 1 vs 8 "
                    + ("identical" if ok else "differ"))
