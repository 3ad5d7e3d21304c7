"""Binary-antipodal AWGN channel pieces and the reproducible RNG stream.

The generator is counter-based (SplitMix64 outputs addressed by index), so a
stream is fully determined by its seed and how many words have been consumed.
That is what makes Monte Carlo runs independent of worker layout: every trial
derives its own seed from (master_seed, point_index, trial_index).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class ChannelModel:
    """Per-use channel: antipodal signalling with amplitude, Gaussian noise."""

    amplitude: float
    noise_var: float

    def __post_init__(self):
        if self.amplitude <= 0.0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.noise_var <= 0.0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")


class RngStream:
    """Deterministic random stream with an explicit word counter.

    Word k of a stream is ``mix64(seed + (k+1)*golden)``; bits consume one
    word each and normal draws consume two (Box-Muller, cosine branch).
    """

    def __init__(self, seed, counter=0):
        self.seed = np.uint64(seed)
        self.counter = int(counter)

    @classmethod
    def for_trial(cls, master_seed, point_index, trial_index):
        """Derive an independent stream for one trial of one sweep point."""
        seed = _kernels.stream_seed(
            np.uint64(master_seed), np.uint64(point_index), np.uint64(trial_index)
        )
        return cls(seed)

    def bits(self, count):
        out = np.empty(count, dtype=np.uint8)
        _kernels.fill_bits(self.seed, np.uint64(self.counter), out)
        self.counter += count
        return out

    def normal(self):
        value = _kernels.rng_normal(self.seed, np.uint64(self.counter))
        self.counter += 2
        return float(value)

    def normals(self, count):
        out = np.empty(count, dtype=np.float64)
        _kernels.fill_normals(self.seed, np.uint64(self.counter), out)
        self.counter += 2 * count
        return out


def modulate(bits, ch):
    """Map bit 0 to -amplitude and bit 1 to +amplitude."""
    arr = np.asarray(bits)
    out = ch.amplitude * (2.0 * arr - 1.0)
    return out if out.shape else float(out)


def awgn(signal, ch, rng):
    """Add white Gaussian noise with the channel's variance.

    ``signal`` may be a scalar or an array; one normal draw is consumed per
    sample, in order.
    """
    arr = np.asarray(signal, dtype=np.float64)
    sigma = math.sqrt(ch.noise_var)
    if arr.shape:
        return arr + sigma * rng.normals(arr.size).reshape(arr.shape)
    return float(arr) + sigma * rng.normal()


def ebn0_db(total_tx, k_info, ch):
    """Energy per information bit over noise spectral density, in dB.

    Uses ``total_tx * amplitude^2`` as spent energy and ``N0 = 2 * noise_var``.
    ``total_tx`` may be fractional (an average over trials).
    """
    if total_tx <= 0:
        raise ValueError(f"total_tx must be positive, got {total_tx}")
    if k_info <= 0:
        raise ValueError(f"k_info must be positive, got {k_info}")
    energy_per_bit = total_tx * ch.amplitude**2 / k_info
    return 10.0 * math.log10(energy_per_bit / (2.0 * ch.noise_var))
