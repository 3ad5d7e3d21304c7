"""Monte Carlo sweep driver producing BER/BLER tables over a budget grid.

Trials are independent streams keyed by (master_seed, point_index,
trial_index), so results do not depend on how work is split across
processes.  All aggregation is integer summation; rates and intervals are
derived once at the end.  The same point index is reused for every scheme
at a given budget, which gives all schemes common random numbers and makes
scheme comparisons paired.
"""

import math
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import ebn0_db
from .polar import construct_code
from .protocol import CRC16_POLY, CRC16_WIDTH

CSV_HEADER = (
    "scheme,ebn0_db,total_tx_or_avg,trials,bit_errors,block_errors,"
    "detected_failures,ber,bler,bler_ci95"
)

SCHEMES = ("baseline", "fixed", "variable")

_CHUNK = 256


@dataclass(frozen=True)
class SweepSpec:
    """Grid description: one point per (budget, scheme) pair.

    ``budgets`` are total transmission counts for the baseline and fixed
    schemes and round-robin stage lengths (t0) for the variable-length
    scheme.  ``design_leaf_z`` of None designs each point's code at its own
    operating point, exp(-budget * A^2 / (2 n sigma^2)).
    """

    code_n: int = 1024
    code_k: int = 512
    amplitude: float = 0.5
    noise_var: float = 1.0
    schemes: tuple = SCHEMES
    budgets: tuple = (2048, 3072, 4096)
    t0: int = None
    batch: int = 16
    max_tx: int = None
    crc_poly: int = CRC16_POLY
    crc_width: int = CRC16_WIDTH
    trials: int = 1000
    master_seed: int = 2024
    design_leaf_z: float = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}, expected one of {SCHEMES}")
        if not self.budgets:
            raise ValueError("budgets must be non-empty")


@dataclass
class PointStats:
    """Aggregated outcome of one (scheme, budget) sweep point."""

    scheme: str
    budget: int
    trials: int
    k_info: int
    bit_errors: int
    block_errors: int
    detected_failures: int
    total_tx: int

    @property
    def avg_tx(self):
        return self.total_tx / self.trials

    @property
    def ber(self):
        return self.bit_errors / (self.trials * self.k_info)

    @property
    def bler(self):
        return self.block_errors / self.trials

    @property
    def bler_ci95(self):
        return wilson_interval(self.block_errors, self.trials)

    def ebn0(self, ch):
        return ebn0_db(self.avg_tx, self.k_info, ch)


def wilson_interval(successes, n, z=1.959963984540054):
    """Wilson score interval for a binomial proportion (95% by default)."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= successes <= n:
        raise ValueError(f"successes must lie in [0, {n}], got {successes}")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def _design_z(spec, budget):
    if spec.design_leaf_z is not None:
        return spec.design_leaf_z
    rate = budget / spec.code_n
    return math.exp(-rate * spec.amplitude**2 / (2.0 * spec.noise_var))


def _resolve_point(spec, scheme, budget):
    """Per-point knobs: (code, t0, total_tx, max_tx). ``total_tx`` is None
    for the variable-length scheme, whose budget is the round-robin stage."""
    code = construct_code(spec.code_n, spec.code_k, _design_z(spec, budget))
    if scheme == "baseline":
        return code, budget, budget, None
    if scheme == "fixed":
        t0 = spec.code_n if spec.t0 is None else spec.t0
        if t0 > budget:
            t0 = budget
        return code, t0, budget, None
    max_tx = 8 * spec.code_n if spec.max_tx is None else spec.max_tx
    if max_tx < budget:
        raise ValueError(f"max_tx ({max_tx}) must be at least the budget ({budget})")
    return code, budget, None, max_tx


def _run_chunk(spec, scheme, budget, point_index, lo, hi):
    """Integer totals over trials [lo, hi): (bit, blk, det, tx).

    Bit errors of detected failures count the whole message as wrong, so
    the reported BER is an honest penalty rather than the undelivered
    block's raw mismatch count.
    """
    code, t0, total_tx, max_tx = _resolve_point(spec, scheme, budget)
    count = hi - lo
    out_bit = np.zeros(count, dtype=np.int64)
    out_blk = np.zeros(count, dtype=np.int64)
    out_tx = np.zeros(count, dtype=np.int64)
    master = np.uint64(spec.master_seed)
    pidx = np.uint64(point_index)
    args = (code._info_pos, code._info_mask, code._frozen, code._rev, code._offs)
    if scheme == "variable":
        out_det = np.zeros(count, dtype=np.int64)
        j_info = spec.code_k - spec.crc_width
        _kernels.variable_batch(
            master, pidx, lo, hi, *args, j_info, spec.crc_poly, spec.crc_width,
            t0, spec.batch, max_tx, spec.amplitude, spec.noise_var,
            out_bit, out_blk, out_det, out_tx,
        )
        adj = out_bit.copy()
        adj[out_det != 0] = j_info
        return int(adj.sum()), int(out_blk.sum()), int(out_det.sum()), int(out_tx.sum())
    _kernels.fixed_batch(
        master, pidx, lo, hi, *args, t0, total_tx,
        spec.amplitude, spec.noise_var, out_bit, out_blk, out_tx,
    )
    return int(out_bit.sum()), int(out_blk.sum()), 0, int(out_tx.sum())


def _chunk_task(packed):
    return _run_chunk(*packed)


def run_point(spec, scheme, budget, point_index, pool=None):
    """Simulate one sweep point; ``pool`` fans chunks out to processes."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
    bounds = list(range(0, spec.trials, _CHUNK)) + [spec.trials]
    tasks = [
        (spec, scheme, budget, point_index, lo, hi)
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    if pool is None:
        parts = [_chunk_task(t) for t in tasks]
    else:
        parts = list(pool.map(_chunk_task, tasks))
    bit = sum(p[0] for p in parts)
    blk = sum(p[1] for p in parts)
    det = sum(p[2] for p in parts)
    tx = sum(p[3] for p in parts)
    k_info = spec.code_k - spec.crc_width if scheme == "variable" else spec.code_k
    return PointStats(
        scheme=scheme,
        budget=budget,
        trials=spec.trials,
        k_info=k_info,
        bit_errors=bit,
        block_errors=blk,
        detected_failures=det,
        total_tx=tx,
    )


def run_sweep(spec):
    """All (budget, scheme) points of the grid, budget-major order."""
    points = []
    if spec.workers > 1:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=spec.workers, mp_context=ctx) as pool:
            for bi, budget in enumerate(spec.budgets):
                for scheme in spec.schemes:
                    points.append(run_point(spec, scheme, budget, bi, pool))
    else:
        for bi, budget in enumerate(spec.budgets):
            for scheme in spec.schemes:
                points.append(run_point(spec, scheme, budget, bi))
    return points


def format_csv(points, ch):
    """Render sweep points as CSV text (header included, trailing newline)."""
    lines = [CSV_HEADER]
    for p in points:
        if p.scheme == "variable":
            budget_field = f"{p.avg_tx:.2f}"
        else:
            budget_field = str(p.budget)
        lo, hi = p.bler_ci95
        lines.append(
            f"{p.scheme},{p.ebn0(ch):.4f},{budget_field},{p.trials},"
            f"{p.bit_errors},{p.block_errors},{p.detected_failures},"
            f"{p.ber:.6e},{p.bler:.6e},{lo:.6f}:{hi:.6f}"
        )
    return "\n".join(lines) + "\n"


def write_csv(points, ch, path):
    text = format_csv(points, ch)
    with open(path, "w") as fh:
        fh.write(text)
    return text
