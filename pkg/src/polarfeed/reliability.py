"""Per-symbol reliability tracking and feedback symbol selection.

Each received amplitude, conditioned on its magnitude, turns the Gaussian
channel use into a binary symmetric one; the corresponding Bhattacharyya
factor ``2*sqrt(eps*(1-eps)) = sech(amplitude*|y|/noise_var)`` multiplies
into that symbol's leaf value.  Propagating the leaves up the transform tree
bounds the reliability of every input position, and an adjoint sweep of the
same tree yields the gradient of the tracked total with respect to every
leaf.  Symbol selection scores each symbol by gradient times current leaf
value: the first-order decrease of the total from one more observation of
that symbol.
"""

import math

import numpy as np


def bsc_epsilon(y_abs, ch):
    """Equivalent crossover probability of one observation of magnitude y_abs.

    Computed as ``1 / (1 + exp(2*amplitude*y_abs/noise_var))``, which keeps
    full precision when the crossover is tiny (the half-minus-half-tanh form
    cancels there).  Overflow of the exponential correctly lands on 0.
    """
    arr = np.asarray(y_abs, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("y_abs must be nonnegative")
    scale = ch.amplitude / ch.noise_var
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.exp(2.0 * scale * arr))
    return out if out.shape else float(out)


def leaf_z_factor(y_abs, ch):
    """Per-observation Bhattacharyya factor sech(amplitude*y_abs/noise_var)."""
    arr = np.asarray(y_abs, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("y_abs must be nonnegative")
    scale = ch.amplitude / ch.noise_var
    with np.errstate(over="ignore"):
        # cosh overflow lands on inf, so the factor correctly underflows to 0.
        out = 1.0 / np.cosh(scale * arr)
    return out if out.shape else float(out)


def channel_llr(observations, ch):
    """Combined LLR of one symbol from all its received amplitudes.

    Positive means bit 0 (the bit mapped to -amplitude); an empty observation
    list gives 0.
    """
    coef = -2.0 * ch.amplitude / ch.noise_var
    total = 0.0
    for y in observations:
        # Running sum in observation order, so repeated decodes see exactly
        # the value an accumulator updated per transmission would hold.
        total += coef * float(y)
    return total


class ObservationLedger:
    """Received amplitudes grouped by 1-based codeword symbol index."""

    def __init__(self, n):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        self.n = n
        self._per_symbol = [[] for _ in range(n)]

    def append(self, j, y):
        if not 1 <= j <= self.n:
            raise ValueError(f"symbol index must lie in [1, {self.n}], got {j}")
        self._per_symbol[j - 1].append(float(y))

    def observations(self, j):
        if not 1 <= j <= self.n:
            raise ValueError(f"symbol index must lie in [1, {self.n}], got {j}")
        return list(self._per_symbol[j - 1])

    def counts(self):
        return np.array([len(lst) for lst in self._per_symbol], dtype=np.int64)

    @property
    def total(self):
        return int(sum(len(lst) for lst in self._per_symbol))


class ReliabilityState:
    """Leaf values plus the derived tree, total, and sensitivities for a code.

    ``tree[0]`` holds the per-symbol leaves in codeword order and
    ``tree[levels]`` the per-input-position values in input order.  All
    derived fields are recomputed by :func:`refresh`; ``record_observation``
    keeps them current automatically.
    """

    def __init__(self, code):
        self.code = code
        n = code.n
        self.leaf_z = np.ones(n, dtype=np.float64)
        self.tree = np.zeros((code.levels + 1, n), dtype=np.float64)
        self.sensitivities = np.zeros(n, dtype=np.float64)
        self.total_z = 0.0
        refresh(self)


def refresh(state):
    """Recompute the tree, the tracked total, and the leaf sensitivities."""
    code = state.code
    n = code.n
    tree = state.tree
    tree[0, :] = state.leaf_z
    m = 2
    for s in range(1, code.levels + 1):
        half = m // 2
        blocks = tree[s - 1].reshape(-1, m)
        a = blocks[:, :half]
        b = blocks[:, half:]
        out = tree[s].reshape(-1, m)
        out[:, 0::2] = a + b - a * b
        out[:, 1::2] = a * b
        m *= 2
    state.total_z = float(tree[code.levels][code._info_pos.astype(np.intp)].sum())
    adj = np.zeros_like(tree)
    adj[code.levels, :] = code._info_mask
    m = n
    for s in range(code.levels, 0, -1):
        half = m // 2
        blocks = tree[s - 1].reshape(-1, m)
        a = blocks[:, :half]
        b = blocks[:, half:]
        upper = adj[s].reshape(-1, m)
        ao = upper[:, 0::2]
        ae = upper[:, 1::2]
        lower = adj[s - 1].reshape(-1, m)
        lower[:, :half] = ao * (1.0 - b) + ae * b
        lower[:, half:] = ao * (1.0 - a) + ae * a
        m = half
    state.sensitivities = adj[0].copy()
    return state


def record_observation(state, ledger, j, y, ch):
    """Fold one received amplitude for symbol j into ledger and state.

    Only leaf j changes directly; the derived fields are refreshed before
    returning.
    """
    ledger.append(j, y)
    scale = ch.amplitude / ch.noise_var
    try:
        factor = 1.0 / math.cosh(scale * abs(y))
    except OverflowError:
        # cosh past the double range means the factor underflows to zero,
        # which is also what the compiled path computes via 1/inf.
        factor = 0.0
    state.leaf_z[j - 1] *= factor
    refresh(state)
    return state


def select_next_symbol(state):
    """1-based index of the symbol whose next observation helps most.

    Scores every symbol by ``sensitivity * leaf_z`` (the first-order drop in
    the tracked total per additional observation) and returns the argmax,
    breaking ties toward the smallest index.  Requires the state to be fresh,
    which :func:`record_observation` guarantees.
    """
    scores = state.sensitivities * state.leaf_z
    return int(np.argmax(scores)) + 1
