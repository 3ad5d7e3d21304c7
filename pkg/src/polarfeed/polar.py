"""Polar transform, reliability-based code construction, and SC decoding.

Codewords use the recursive interleave/concatenate order throughout: the
transform splits its input into odd/even pairs, sends the pair XORs through
the first half of the output and the even bits through the second half.
Symbol and input-bit indices on the public surface are 1-based; arrays are
0-based internally.
"""

import numpy as np

from . import _kernels

LLR_CLAMP = _kernels.LLR_CLAMP


def _as_bit_array(bits, name="bits"):
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0s and 1s")
    return arr.astype(np.uint8)


def _check_block_length(n):
    if n <= 0 or (n & (n - 1)) != 0:
        raise ValueError(f"length must be a power of 2, got {n}")


def _bit_reversal(n):
    """Index table mapping codeword order to butterfly order (self-inverse)."""
    levels = n.bit_length() - 1
    table = np.zeros(n, dtype=np.int64)
    for i in range(n):
        x, y = i, 0
        for _ in range(levels):
            y = (y << 1) | (x & 1)
            x >>= 1
        table[i] = y
    return table


def _depth_offsets(n):
    levels = n.bit_length() - 1
    offs = np.zeros(levels + 2, dtype=np.int64)
    for d in range(1, levels + 2):
        offs[d] = offs[d - 1] + (n >> (d - 1))
    return offs


def polar_transform(u):
    """Apply the polar transform to a full input block.

    Parameters
    ----------
    u : array_like
        Bit sequence whose length is a power of 2.

    Returns
    -------
    numpy.ndarray
        Codeword bits, same length as ``u``.
    """
    bits = _as_bit_array(u, "u")
    _check_block_length(bits.size)
    if bits.size == 1:
        return bits.copy()
    q = bits[0::2] ^ bits[1::2]
    r = bits[1::2]
    return np.concatenate([polar_transform(q), polar_transform(r)])


class PolarCode:
    """Block code defined by a block length and a set of information positions.

    Parameters
    ----------
    n : int
        Block length, a power of 2, at least 2.
    info_set : iterable of int
        Distinct 1-based input positions carrying message bits.  Positions
        outside the set are frozen to 0.
    """

    def __init__(self, n, info_set):
        n = int(n)
        _check_block_length(n)
        if n < 2:
            raise ValueError(f"n must be at least 2, got {n}")
        positions = sorted(int(j) for j in info_set)
        if not positions:
            raise ValueError("info_set must not be empty")
        if len(set(positions)) != len(positions):
            raise ValueError("info_set positions must be distinct")
        if positions[0] < 1 or positions[-1] > n:
            raise ValueError(f"info_set positions must lie in [1, {n}]")
        self.n = n
        self.levels = n.bit_length() - 1
        self.info_set = tuple(positions)
        self._info_pos = np.asarray(positions, dtype=np.int64) - 1
        self._info_mask = np.zeros(n, dtype=np.uint8)
        self._info_mask[self._info_pos] = 1
        self._frozen = (1 - self._info_mask).astype(np.uint8)
        self._rev = _bit_reversal(n)
        self._offs = _depth_offsets(n)

    @property
    def k(self):
        return len(self.info_set)

    def __repr__(self):
        return f"PolarCode(n={self.n}, k={self.k})"


def encode(code, message):
    """Place message bits on the information positions and transform.

    Parameters
    ----------
    code : PolarCode
    message : array_like
        ``code.k`` bits, assigned to ``code.info_set`` in ascending order.

    Returns
    -------
    numpy.ndarray
        Codeword of ``code.n`` bits.
    """
    msg = _as_bit_array(message, "message")
    if msg.size != code.k:
        raise ValueError(f"message length must be {code.k}, got {msg.size}")
    u = np.zeros(code.n, dtype=np.uint8)
    u[code._info_pos] = msg
    return polar_transform(u)


def z_recursion(leaf_z):
    """Propagate per-symbol reliability parameters up the transform tree.

    Combines pairs with ``a + b - a*b`` for odd input positions and ``a*b``
    for even ones; both are exact for erasure statistics and upper bounds
    otherwise.

    Parameters
    ----------
    leaf_z : array_like
        Per-codeword-symbol values in [0, 1]; length a power of 2.

    Returns
    -------
    numpy.ndarray
        Per-input-position values, same length, each in [0, 1].
    """
    z = np.asarray(leaf_z, dtype=np.float64)
    if z.ndim != 1:
        raise ValueError(f"leaf_z must be one-dimensional, got shape {z.shape}")
    _check_block_length(z.size)
    if z.size and (z.min() < 0.0 or z.max() > 1.0):
        raise ValueError("leaf_z values must lie in [0, 1]")
    return _z_recursion_unchecked(z)


def _z_recursion_unchecked(z):
    if z.size == 1:
        return z.copy()
    half = z.size // 2
    zq = _z_recursion_unchecked(z[:half])
    zr = _z_recursion_unchecked(z[half:])
    out = np.empty_like(z)
    out[0::2] = zq + zr - zq * zr
    out[1::2] = zq * zr
    return out


def construct_code(n, k, design_leaf_z):
    """Pick the k most reliable input positions for a uniform design value.

    Parameters
    ----------
    n : int
        Block length, a power of 2.
    k : int
        Number of information positions, ``1 <= k <= n``.
    design_leaf_z : float
        Reliability parameter assumed for every codeword symbol, in [0, 1].

    Returns
    -------
    PolarCode
    """
    _check_block_length(n)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if not 0.0 <= design_leaf_z <= 1.0:
        raise ValueError(f"design_leaf_z must lie in [0, 1], got {design_leaf_z}")
    z = z_recursion(np.full(n, float(design_leaf_z)))
    best = np.argsort(z, kind="stable")[:k]
    return PolarCode(n, np.sort(best) + 1)


def llr_f(a, b):
    """Check-node LLR combine, 2*artanh(tanh(a/2)*tanh(b/2)), saturated.

    Evaluated in the log domain so large inputs stay finite; inputs and the
    result are clamped to +/- LLR_CLAMP.
    """
    a = np.clip(np.asarray(a, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)
    b = np.clip(np.asarray(b, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)
    m = np.where(np.signbit(a) != np.signbit(b), -1.0, 1.0) * np.minimum(
        np.abs(a), np.abs(b)
    )
    out = m + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    out = np.clip(out, -LLR_CLAMP, LLR_CLAMP)
    return out if out.shape else float(out)


def llr_g(a, b, u):
    """Variable-node LLR combine given the already-decided partial sum u."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.clip(b + np.where(np.asarray(u) == 0, a, -a), -LLR_CLAMP, LLR_CLAMP)
    return out if out.shape else float(out)


def sc_decode(code, channel_llrs):
    """Successive cancellation decoding from per-symbol channel LLRs.

    Positive LLR means bit 0; a zero LLR resolves to 0.  Input magnitudes are
    clamped to LLR_CLAMP before decoding.

    Parameters
    ----------
    code : PolarCode
    channel_llrs : array_like
        One LLR per codeword symbol, in codeword order.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        Decoded message (``code.k`` bits) and the full input-bit decision
        vector (``code.n`` bits).
    """
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"channel_llrs must have shape ({code.n},), got {llrs.shape}")
    if not np.all(np.isfinite(llrs)):
        raise ValueError("channel_llrs must be finite")
    n = code.n
    llr_std = np.ascontiguousarray(llrs[code._rev])
    u_hat = np.empty(n, dtype=np.uint8)
    llr_ws = np.empty(2 * n, dtype=np.float64)
    bit_ws = np.empty(2 * n, dtype=np.uint8)
    bit_cur = np.empty(n, dtype=np.uint8)
    _kernels.sc_decode_std(
        llr_std, code._frozen, code._offs, u_hat, llr_ws, bit_ws, bit_cur
    )
    return u_hat[code._info_pos].copy(), u_hat
