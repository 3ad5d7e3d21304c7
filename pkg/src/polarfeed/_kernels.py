"""Compiled inner loops shared by the public API and the sweep harness.

Everything here is numba-jitted and operates on plain arrays.  The public
modules wrap these kernels with validation and friendlier types; the harness
calls the batch drivers directly.  Keep signatures stable: the cache files
keyed on them are what make repeated runs cheap on a cold interpreter.

Seed and counter arguments must be numpy uint64.  Python ints dispatch a
signed specialization whose mixed arithmetic promotes differently and yields
a different stream; the batch drivers re-cast defensively, the scalar
helpers do not.
"""

import math

import numpy as np
from numba import njit

# Counter-based generator: output k of a stream is mix64(seed + (k+1)*GOLDEN),
# i.e. the SplitMix64 sequence addressed by index instead of by mutation.
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S63 = np.uint64(63)
_U1 = np.uint64(1)
_U2 = np.uint64(2)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_TWO_PI = 6.283185307179586

LLR_CLAMP = 40.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_seed(master, point_index, trial_index):
    h = mix64(master)
    h = mix64((h ^ point_index) * GOLDEN)
    h = mix64((h ^ trial_index) * GOLDEN)
    return h


@njit(cache=True, inline="always")
def rng_word(seed, k):
    return mix64(seed + (k + _U1) * GOLDEN)


@njit(cache=True, inline="always")
def rng_bit(seed, k):
    return np.uint8(rng_word(seed, k) >> _S63)


@njit(cache=True, inline="always")
def rng_normal(seed, k):
    # Box-Muller, cosine branch only; consumes words k and k+1.
    w1 = rng_word(seed, k)
    w2 = rng_word(seed, k + _U1)
    u1 = (np.float64(w1 >> _S11) + 1.0) * _INV53
    u2 = np.float64(w2 >> _S11) * _INV53
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


@njit(cache=True)
def fill_bits(seed, counter, out):
    for i in range(out.size):
        out[i] = rng_bit(seed, counter + np.uint64(i))


@njit(cache=True)
def fill_normals(seed, counter, out):
    for i in range(out.size):
        out[i] = rng_normal(seed, counter + _U2 * np.uint64(i))


@njit(cache=True)
def crc_register(bits, n_bits, poly, width):
    # MSB-first shift register, initialised to all ones, no final xor.
    mask = (1 << width) - 1
    top = 1 << (width - 1)
    reg = mask
    for i in range(n_bits):
        high = (reg & top) != 0
        reg = (reg << 1) & mask
        if high != (bits[i] != 0):
            reg ^= poly
    return reg


@njit(cache=True)
def encode_std(u, x):
    # In-place butterfly for the transform in standard index order; callers
    # map positions through the bit-reversal table to get codeword order.
    n = u.size
    for i in range(n):
        x[i] = u[i]
    step = 2
    while step <= n:
        half = step >> 1
        for b0 in range(0, n, step):
            for j in range(b0, b0 + half):
                x[j] ^= x[j + half]
        step <<= 1


@njit(cache=True, inline="always")
def f_llr(a, b):
    # Exact check-node combine, log-domain form of 2*artanh(tanh(a/2)*tanh(b/2)).
    if a < -LLR_CLAMP:
        a = -LLR_CLAMP
    elif a > LLR_CLAMP:
        a = LLR_CLAMP
    if b < -LLR_CLAMP:
        b = -LLR_CLAMP
    elif b > LLR_CLAMP:
        b = LLR_CLAMP
    m = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        m = -m
    out = m + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))
    if out > LLR_CLAMP:
        return LLR_CLAMP
    if out < -LLR_CLAMP:
        return -LLR_CLAMP
    return out


@njit(cache=True, inline="always")
def g_llr(a, b, u):
    if u == 0:
        out = b + a
    else:
        out = b - a
    if out > LLR_CLAMP:
        return LLR_CLAMP
    if out < -LLR_CLAMP:
        return -LLR_CLAMP
    return out


@njit(cache=True)
def sc_decode_std(llr_std, frozen, offs, u_hat, llr_ws, bit_ws, bit_cur):
    """Successive cancellation over channel LLRs in standard index order.

    offs[d] is the start of the depth-d slice in the flat workspaces
    (slice length n >> d).  u_hat receives hard decisions in natural order.
    Ties (LLR exactly zero) go to bit 0.
    """
    n = llr_std.size
    levels = 0
    while (1 << levels) < n:
        levels += 1
    for i in range(n):
        v = llr_std[i]
        if v > LLR_CLAMP:
            v = LLR_CLAMP
        elif v < -LLR_CLAMP:
            v = -LLR_CLAMP
        llr_ws[i] = v
    for phi in range(n):
        if phi == 0:
            d_start = 1
        else:
            t = 0
            while ((phi >> t) & 1) == 0:
                t += 1
            d_start = levels - t
        for d in range(d_start, levels + 1):
            m = n >> d
            src = offs[d - 1]
            dst = offs[d]
            if d == d_start and phi != 0:
                for i in range(m):
                    llr_ws[dst + i] = g_llr(
                        llr_ws[src + i], llr_ws[src + m + i], bit_ws[dst + i]
                    )
            else:
                for i in range(m):
                    llr_ws[dst + i] = f_llr(llr_ws[src + i], llr_ws[src + m + i])
        if frozen[phi] != 0:
            bit = np.uint8(0)
        elif llr_ws[offs[levels]] < 0.0:
            bit = np.uint8(1)
        else:
            bit = np.uint8(0)
        u_hat[phi] = bit
        # Propagate re-encoded bits upward while the finished node is a
        # right child; park the block when it is a left child.
        bit_cur[0] = bit
        d = levels
        while d >= 1 and ((phi >> (levels - d)) & 1) == 1:
            m = n >> d
            dst = offs[d]
            for i in range(m - 1, -1, -1):
                bit_cur[m + i] = bit_cur[i]
            for i in range(m):
                bit_cur[i] = bit_ws[dst + i] ^ bit_cur[m + i]
            d -= 1
        if d >= 1:
            m = n >> d
            dst = offs[d]
            for i in range(m):
                bit_ws[dst + i] = bit_cur[i]


@njit(cache=True)
def tree_forward(leaf, tree):
    # Bhattacharyya recursion over the transform tree, codeword order at the
    # bottom, input-bit order at the top.
    n = leaf.size
    for i in range(n):
        tree[0, i] = leaf[i]
    s = 1
    m = 2
    while m <= n:
        half = m >> 1
        for b0 in range(0, n, m):
            for p in range(half):
                a = tree[s - 1, b0 + p]
                b = tree[s - 1, b0 + half + p]
                tree[s, b0 + 2 * p] = a + b - a * b
                tree[s, b0 + 2 * p + 1] = a * b
        s += 1
        m <<= 1


@njit(cache=True)
def tree_forward_path(leaf, tree, j):
    # Refresh after a single-leaf change: only the enclosing block at each
    # level moves, which recomputes the same values a full pass would.
    n = leaf.size
    tree[0, j] = leaf[j]
    s = 1
    m = 2
    while m <= n:
        half = m >> 1
        b0 = (j // m) * m
        for p in range(half):
            a = tree[s - 1, b0 + p]
            b = tree[s - 1, b0 + half + p]
            tree[s, b0 + 2 * p] = a + b - a * b
            tree[s, b0 + 2 * p + 1] = a * b
        s += 1
        m <<= 1


@njit(cache=True)
def tree_reverse(tree, info_mask, adj):
    # Adjoint sweep: d(total_z)/d(leaf) for every codeword position.
    n = info_mask.size
    levels = 0
    while (1 << levels) < n:
        levels += 1
    for i in range(n):
        adj[levels, i] = 1.0 if info_mask[i] != 0 else 0.0
    s = levels
    m = n
    while m >= 2:
        half = m >> 1
        for b0 in range(0, n, m):
            for p in range(half):
                a = tree[s - 1, b0 + p]
                b = tree[s - 1, b0 + half + p]
                ao = adj[s, b0 + 2 * p]
                ae = adj[s, b0 + 2 * p + 1]
                adj[s - 1, b0 + p] = ao * (1.0 - b) + ae * b
                adj[s - 1, b0 + half + p] = ao * (1.0 - a) + ae * a
        s -= 1
        m >>= 1


@njit(cache=True, inline="always")
def select_weighted(sens, leaf):
    # Score = gradient times current leaf value: the first-order drop of the
    # tracked total per extra observation.  Ties go to the smallest index.
    best = 0
    bv = sens[0] * leaf[0]
    for i in range(1, sens.size):
        v = sens[i] * leaf[i]
        if v > bv:
            bv = v
            best = i
    return best


@njit(cache=True)
def fixed_trial(
    seed,
    info_pos,
    info_mask,
    frozen,
    rev,
    offs,
    t0,
    total_tx,
    amp,
    noise_var,
    msg_ws,
    u_ws,
    xstd_ws,
    xpaper_ws,
    leaf,
    llr_acc,
    tree,
    adj,
    llr_std_ws,
    u_hat,
    llr_ws,
    bit_ws,
    bit_cur,
):
    """One fixed-budget trial; t0 == total_tx degenerates to the no-feedback
    round robin.  Returns (bit_errors, block_error)."""
    n = info_mask.size
    k = info_pos.size
    for i in range(k):
        msg_ws[i] = rng_bit(seed, np.uint64(i))
    counter = np.uint64(k)
    for i in range(n):
        u_ws[i] = 0
    for i in range(k):
        u_ws[info_pos[i]] = msg_ws[i]
    encode_std(u_ws, xstd_ws)
    for i in range(n):
        xpaper_ws[i] = xstd_ws[rev[i]]
    for i in range(n):
        leaf[i] = 1.0
        llr_acc[i] = 0.0
    sigma = math.sqrt(noise_var)
    coef = -2.0 * amp / noise_var
    scale = amp / noise_var
    fresh = False
    for i in range(total_tx):
        if i < t0:
            j = i % n
        else:
            if not fresh:
                tree_forward(leaf, tree)
                fresh = True
            tree_reverse(tree, info_mask, adj)
            j = select_weighted(adj[0], leaf)
        v = amp * (2.0 * xpaper_ws[j] - 1.0)
        y = v + sigma * rng_normal(seed, counter)
        counter += _U2
        llr_acc[j] += coef * y
        leaf[j] *= 1.0 / math.cosh(scale * abs(y))
        if fresh:
            tree_forward_path(leaf, tree, j)
    for i in range(n):
        llr_std_ws[i] = llr_acc[rev[i]]
    sc_decode_std(llr_std_ws, frozen, offs, u_hat, llr_ws, bit_ws, bit_cur)
    bit_err = 0
    for i in range(k):
        if u_hat[info_pos[i]] != msg_ws[i]:
            bit_err += 1
    return bit_err, 1 if bit_err > 0 else 0


@njit(cache=True)
def variable_trial(
    seed,
    info_pos,
    info_mask,
    frozen,
    rev,
    offs,
    n_info,
    crc_poly,
    crc_width,
    t0,
    batch,
    max_tx,
    amp,
    noise_var,
    msg_ws,
    u_ws,
    xstd_ws,
    xpaper_ws,
    leaf,
    llr_acc,
    tree,
    adj,
    llr_std_ws,
    u_hat,
    llr_ws,
    bit_ws,
    bit_cur,
    payload_hat,
):
    """One variable-length trial with CRC-gated stopping.

    Returns (info_bit_errors, block_error, detected_failure, tx_count).
    """
    n = info_mask.size
    k = info_pos.size
    for i in range(n_info):
        msg_ws[i] = rng_bit(seed, np.uint64(i))
    counter = np.uint64(n_info)
    reg = crc_register(msg_ws, n_info, crc_poly, crc_width)
    for i in range(crc_width):
        msg_ws[n_info + i] = (reg >> (crc_width - 1 - i)) & 1
    for i in range(n):
        u_ws[i] = 0
    for i in range(k):
        u_ws[info_pos[i]] = msg_ws[i]
    encode_std(u_ws, xstd_ws)
    for i in range(n):
        xpaper_ws[i] = xstd_ws[rev[i]]
    for i in range(n):
        leaf[i] = 1.0
        llr_acc[i] = 0.0
    sigma = math.sqrt(noise_var)
    coef = -2.0 * amp / noise_var
    scale = amp / noise_var
    tx = 0
    for i in range(t0):
        j = i % n
        v = amp * (2.0 * xpaper_ws[j] - 1.0)
        y = v + sigma * rng_normal(seed, counter)
        counter += _U2
        llr_acc[j] += coef * y
        leaf[j] *= 1.0 / math.cosh(scale * abs(y))
        tx += 1
    fresh = False
    detected = 0
    while True:
        for i in range(n):
            llr_std_ws[i] = llr_acc[rev[i]]
        sc_decode_std(llr_std_ws, frozen, offs, u_hat, llr_ws, bit_ws, bit_cur)
        for i in range(k):
            payload_hat[i] = u_hat[info_pos[i]]
        reg = crc_register(payload_hat, n_info, crc_poly, crc_width)
        ok = True
        for i in range(crc_width):
            if payload_hat[n_info + i] != ((reg >> (crc_width - 1 - i)) & 1):
                ok = False
                break
        if ok:
            break
        if tx >= max_tx:
            detected = 1
            break
        steps = batch
        if tx + steps > max_tx:
            steps = max_tx - tx
        for _ in range(steps):
            if not fresh:
                tree_forward(leaf, tree)
                fresh = True
            tree_reverse(tree, info_mask, adj)
            j = select_weighted(adj[0], leaf)
            v = amp * (2.0 * xpaper_ws[j] - 1.0)
            y = v + sigma * rng_normal(seed, counter)
            counter += _U2
            llr_acc[j] += coef * y
            leaf[j] *= 1.0 / math.cosh(scale * abs(y))
            tree_forward_path(leaf, tree, j)
            tx += 1
    bit_err = 0
    for i in range(n_info):
        if payload_hat[i] != msg_ws[i]:
            bit_err += 1
    if detected != 0:
        blk = 1
    else:
        blk = 1 if bit_err > 0 else 0
    return bit_err, blk, detected, tx


@njit(cache=True)
def fixed_batch(
    master,
    point_index,
    trial_lo,
    trial_hi,
    info_pos,
    info_mask,
    frozen,
    rev,
    offs,
    t0,
    total_tx,
    amp,
    noise_var,
    out_bit,
    out_blk,
    out_tx,
):
    # Force unsigned dispatch: a caller handing in plain ints would otherwise
    # compile a mixed-signedness seed path with different output.
    master = np.uint64(master)
    point_index = np.uint64(point_index)
    n = info_mask.size
    k = info_pos.size
    levels = 0
    while (1 << levels) < n:
        levels += 1
    msg_ws = np.empty(k, dtype=np.uint8)
    u_ws = np.empty(n, dtype=np.uint8)
    xstd_ws = np.empty(n, dtype=np.uint8)
    xpaper_ws = np.empty(n, dtype=np.uint8)
    leaf = np.empty(n, dtype=np.float64)
    llr_acc = np.empty(n, dtype=np.float64)
    tree = np.empty((levels + 1, n), dtype=np.float64)
    adj = np.empty((levels + 1, n), dtype=np.float64)
    llr_std_ws = np.empty(n, dtype=np.float64)
    u_hat = np.empty(n, dtype=np.uint8)
    llr_ws = np.empty(2 * n, dtype=np.float64)
    bit_ws = np.empty(2 * n, dtype=np.uint8)
    bit_cur = np.empty(n, dtype=np.uint8)
    for t in range(trial_lo, trial_hi):
        seed = stream_seed(master, point_index, np.uint64(t))
        be, blk = fixed_trial(
            seed, info_pos, info_mask, frozen, rev, offs, t0, total_tx,
            amp, noise_var, msg_ws, u_ws, xstd_ws, xpaper_ws, leaf, llr_acc,
            tree, adj, llr_std_ws, u_hat, llr_ws, bit_ws, bit_cur,
        )
        out_bit[t - trial_lo] = be
        out_blk[t - trial_lo] = blk
        out_tx[t - trial_lo] = total_tx


@njit(cache=True)
def variable_batch(
    master,
    point_index,
    trial_lo,
    trial_hi,
    info_pos,
    info_mask,
    frozen,
    rev,
    offs,
    n_info,
    crc_poly,
    crc_width,
    t0,
    batch,
    max_tx,
    amp,
    noise_var,
    out_bit,
    out_blk,
    out_det,
    out_tx,
):
    master = np.uint64(master)
    point_index = np.uint64(point_index)
    n = info_mask.size
    k = info_pos.size
    levels = 0
    while (1 << levels) < n:
        levels += 1
    msg_ws = np.empty(k, dtype=np.uint8)
    u_ws = np.empty(n, dtype=np.uint8)
    xstd_ws = np.empty(n, dtype=np.uint8)
    xpaper_ws = np.empty(n, dtype=np.uint8)
    leaf = np.empty(n, dtype=np.float64)
    llr_acc = np.empty(n, dtype=np.float64)
    tree = np.empty((levels + 1, n), dtype=np.float64)
    adj = np.empty((levels + 1, n), dtype=np.float64)
    llr_std_ws = np.empty(n, dtype=np.float64)
    u_hat = np.empty(n, dtype=np.uint8)
    llr_ws = np.empty(2 * n, dtype=np.float64)
    bit_ws = np.empty(2 * n, dtype=np.uint8)
    bit_cur = np.empty(n, dtype=np.uint8)
    payload_hat = np.empty(k, dtype=np.uint8)
    for t in range(trial_lo, trial_hi):
        seed = stream_seed(master, point_index, np.uint64(t))
        be, blk, det, tx = variable_trial(
            seed, info_pos, info_mask, frozen, rev, offs, n_info,
            crc_poly, crc_width, t0, batch, max_tx, amp, noise_var,
            msg_ws, u_ws, xstd_ws, xpaper_ws, leaf, llr_acc, tree, adj,
            llr_std_ws, u_hat, llr_ws, bit_ws, bit_cur, payload_hat,
        )
        out_bit[t - trial_lo] = be
        out_blk[t - trial_lo] = blk
        out_det[t - trial_lo] = det
        out_tx[t - trial_lo] = tx
