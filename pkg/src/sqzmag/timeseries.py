"""Uniformly sampled time series with RNG provenance.

Detector outputs, field drives and spin-noise realizations all travel through
this container so that sample rate, units and the seeds that produced the
data stay attached to the samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class TimeSeries:
    """A uniformly sampled real-valued signal.

    Parameters
    ----------
    sample_rate : float
        Samples per second, > 0.
    samples : ndarray
        1-D float array, at least one sample.
    seed_provenance : tuple of int
        Seeds that deterministically produced the samples (empty for
        deterministic signals).
    units_tag : str
        Unit label, e.g. ``"shot_relative"``, ``"tesla"``, ``"spin"``,
        ``"volts"``.
    """

    sample_rate: float
    samples: np.ndarray
    seed_provenance: tuple = ()
    units_tag: str = "normalized"

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        self.seed_provenance = tuple(self.seed_provenance)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def to_csv(self, path) -> None:
        """Write ``time_s,value`` rows for debugging."""
        data = np.column_stack([self.times(), self.samples])
        np.savetxt(path, data, delimiter=",", header="time_s,value", comments="")

    def to_npy(self, path) -> None:
        np.save(path, self.samples)


def sine_series(amplitude: float, freq_hz: float, duration: float, fs: float,
                phase_rad: float = 0.0, units_tag: str = "normalized") -> TimeSeries:
    """Deterministic sinusoid, handy for drives and test tones."""
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    return TimeSeries(fs, amplitude * np.sin(2 * np.pi * freq_hz * t + phase_rad),
                      units_tag=units_tag)
