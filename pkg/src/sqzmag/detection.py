"""Balanced polarimeter model and photocurrent synthesis.

Units
-----
Synthesized photocurrents are in *shot-relative* normalized units: the
one-sided power spectral density of the shot-noise channel for a coherent
probe at the reference LO power is exactly 1 (per Hz).  Consequently the
per-sample variance of that channel is fs/2.  A single scale constant
(``PolarimeterConfig.signal_scale``) converts to volts when absolute traces
are wanted; all dB quantities are ratios and never need it.

Determinism
-----------
Every stochastic channel draws from a generator seeded by
``SeedSequence(seed, spawn_key=(channel, chunk))``, so a master seed plus a
chunk layout fully determines the output.  Chunked generation (for long
syntheses) is bit-identical across calls with the same layout; the layout is
part of the configuration, not an implementation detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import EmptyDuration, NyquistViolation, ZeroPower
from .medium import SpinNoiseModel
from .polarization import StokesVector, from_db
from .timeseries import TimeSeries

#: LO power at which the shot-relative unit system is anchored.
REFERENCE_LO_POWER_W = 620e-6

#: One-sided PSD of the coherent shot channel, by construction.
SHOT_PSD = 1.0

_CH_SHOT, _CH_ATOMIC, _CH_ELECTRONIC = 0, 1, 2


@dataclass(frozen=True)
class PolarimeterConfig:
    """Balanced polarimeter behind a half-wave plate.

    The plate angle defaults to the balanced working point (pi/8, i.e. 22.5
    degrees) where the detector difference reads the dark linear Stokes
    component directly; a small offset models imperfect alignment.
    ``electronic_noise_db`` is the white electronics floor relative to shot
    noise (an upper bound in practice, taken as the level here).
    """

    hwp_angle: float = math.pi / 8
    detector_qe: float = 0.95
    electronic_noise_db: float = -13.0
    signal_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.detector_qe <= 1.0:
            raise ValueError(f"detector_qe must be in (0, 1], got {self.detector_qe}")
        if not self.electronic_noise_db < 0:
            raise ValueError("electronic noise must sit below shot noise (< 0 dB)")
        if not self.signal_scale > 0:
            raise ValueError("signal_scale must be > 0")


@dataclass(frozen=True)
class SineField:
    """Sinusoidal axial magnetic drive, tesla."""

    amplitude_t: float
    freq_hz: float
    phase_rad: float = 0.0


@dataclass
class PhotocurrentScenario:
    """Channel mix for one synthesis run.

    locked_variance : float or ndarray
        Shot-channel variance in shot units (1 = coherent); an array gives a
        per-sample profile, e.g. for a swept LO phase.
    gz : float
        Signal slope in normalized units per tesla.
    b_field : SineField, TimeSeries or None
        Axial field drive; a TimeSeries must share the synthesis sample rate.
    spin_model : SpinNoiseModel or None
        Statistics of the atomic spin channel.
    atomic_fraction : float
        In-band PSD of the atomic channel as a fraction of coherent shot
        noise (0 disables the channel).
    electronic_db : float or None
        White electronics floor in dB relative to shot noise; None disables.
    lo_power_w : float
        Probe power; noise-channel amplitudes scale as sqrt(power / reference)
        so absolute noise PSD is proportional to power while shot-relative
        levels stay put.
    """

    locked_variance: object = 1.0
    gz: float = 0.0
    b_field: object = None
    spin_model: SpinNoiseModel | None = None
    atomic_fraction: float = 0.0
    electronic_db: float | None = None
    lo_power_w: float = REFERENCE_LO_POWER_W


def polarimeter_signal(s: StokesVector, config: PolarimeterConfig | None = None) -> float:
    """Normalized detector difference (i1 - i2) / (i1 + i2).

    At the balanced plate angle this is exactly the dark linear Stokes
    fraction sy/s0; a plate offset mixes in the bright component.
    """
    if not s.s0 > 0:
        raise ZeroPower("polarimeter signal undefined for zero total power")
    config = config or PolarimeterConfig()
    delta = 4.0 * config.hwp_angle - math.pi / 2.0
    return (s.sy * math.cos(delta) - s.sx * math.sin(delta)) / s.s0


def _chunk_layout(n: int, chunk_samples: int | None) -> list:
    if chunk_samples is None or chunk_samples >= n:
        return [n]
    if chunk_samples <= 0:
        raise ValueError("chunk_samples must be > 0")
    sizes = [chunk_samples] * (n // chunk_samples)
    if n % chunk_samples:
        sizes.append(n % chunk_samples)
    return sizes


def _chunk_rng(seed: int, channel: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(channel, chunk)))


def _white_channel(seed: int, channel: int, sizes: list) -> np.ndarray:
    parts = [_chunk_rng(seed, channel, c).standard_normal(size)
             for c, size in enumerate(sizes)]
    return np.concatenate(parts)


def _ou_channel(seed: int, sizes: list, variance: float, rho: float) -> np.ndarray:
    """Unit machinery as medium.sample_spin_noise, but chunk-seeded."""
    std = math.sqrt(variance)
    innov_scale = std * math.sqrt(1.0 - rho * rho)
    parts = []
    state = None
    for c, size in enumerate(sizes):
        innovations = _chunk_rng(seed, _CH_ATOMIC, c).standard_normal(size)
        if state is None:
            stationary_start = innovations[0] * std
            innovations *= innov_scale
            innovations[0] = stationary_start
            part, _ = lfilter([1.0], [1.0, -rho], innovations, zi=np.zeros(1))
        else:
            innovations *= innov_scale
            part, _ = lfilter([1.0], [1.0, -rho], innovations,
                              zi=np.array([rho * state]))
        state = part[-1]
        parts.append(part)
    return np.concatenate(parts)


def _field_samples(b_field, n: int, fs: float) -> np.ndarray:
    if isinstance(b_field, SineField):
        if b_field.freq_hz >= fs / 2.0:
            raise NyquistViolation(
                f"drive at {b_field.freq_hz} Hz needs fs > {2 * b_field.freq_hz}"
            )
        t = np.arange(n) / fs
        return b_field.amplitude_t * np.sin(
            2.0 * np.pi * b_field.freq_hz * t + b_field.phase_rad
        )
    if isinstance(b_field, TimeSeries):
        if not math.isclose(b_field.sample_rate, fs, rel_tol=1e-9):
            raise ValueError("field series sample rate must match synthesis rate")
        if len(b_field) < n:
            raise ValueError("field series shorter than the synthesis window")
        return b_field.samples[:n]
    raise TypeError(f"unsupported b_field type: {type(b_field)!r}")


def synthesize_photocurrent(scenario: PhotocurrentScenario, duration: float,
                            fs: float, seed: int,
                            chunk_samples: int | None = None) -> TimeSeries:
    """Sample-wise sum of shot, signal, atomic and electronic channels.

    Channels are statistically independent by construction, so the total PSD
    is the sum of the channel PSDs.  The shot channel is white with variance
    locked_variance * fs/2 per sample (PSD = locked_variance in shot units);
    the atomic channel is the scenario's spin process rescaled so its
    zero-frequency PSD equals ``atomic_fraction`` of coherent shot noise.
    """
    if not fs > 0:
        raise ValueError("fs must be > 0")
    n = int(round(duration * fs))
    if n < 2:
        raise EmptyDuration(f"duration {duration} s at {fs} S/s gives {n} samples")

    sizes = _chunk_layout(n, chunk_samples)
    power_scale = math.sqrt(scenario.lo_power_w / REFERENCE_LO_POWER_W)
    total = np.zeros(n)

    v = np.asarray(scenario.locked_variance, dtype=float)
    if np.any(v < 0):
        raise ValueError("locked_variance must be >= 0")
    if v.ndim not in (0, 1) or (v.ndim == 1 and v.size != n):
        raise ValueError("locked_variance must be a scalar or length-n array")
    if np.any(v > 0):
        shot = _white_channel(seed, _CH_SHOT, sizes)
        total += shot * np.sqrt(v * SHOT_PSD * fs / 2.0) * power_scale

    if scenario.atomic_fraction > 0:
        if scenario.spin_model is None:
            raise ValueError("atomic_fraction > 0 requires a spin_model")
        m = scenario.spin_model
        if m.variance > 0:
            rho = math.exp(-1.0 / (fs * m.correlation_time))
            raw = _ou_channel(seed, sizes, m.variance, rho)
            # Rescale so the discrete zero-frequency PSD is the requested
            # fraction of shot noise: S(0) = 2 var (1+rho)/((1-rho) fs).
            psd0 = 2.0 * m.variance * (1.0 + rho) / ((1.0 - rho) * fs)
            total += raw * math.sqrt(
                scenario.atomic_fraction * SHOT_PSD / psd0
            ) * power_scale

    if scenario.electronic_db is not None:
        elec_std = math.sqrt(from_db(scenario.electronic_db) * SHOT_PSD * fs / 2.0)
        total += _white_channel(seed, _CH_ELECTRONIC, sizes) * elec_std * power_scale

    if scenario.b_field is not None and scenario.gz != 0:
        total += scenario.gz * _field_samples(scenario.b_field, n, fs)

    return TimeSeries(fs, total, seed_provenance=(seed,), units_tag="shot_relative")


def to_volts(ts: TimeSeries, config: PolarimeterConfig) -> TimeSeries:
    """Scale a normalized photocurrent to volts."""
    return TimeSeries(ts.sample_rate, ts.samples * config.signal_scale,
                      seed_provenance=ts.seed_provenance, units_tag="volts")


def subtract_electronic(power_trace, electronic_floor,
                        floor_epsilon: float | None = None):
    """Linear-power subtraction of a known electronics floor.

    Values that would drop to or below zero are clamped at a small positive
    epsilon (default 1e-12 of the trace full scale) and flagged.

    Returns
    -------
    (ndarray, ndarray of bool)
        The subtracted trace and the clamp mask.
    """
    trace = np.asarray(power_trace, dtype=float)
    floor = np.asarray(electronic_floor, dtype=float)
    if np.any(floor < 0):
        raise ValueError("electronic floor must be >= 0")
    if floor_epsilon is None:
        full_scale = float(trace.max(initial=0.0))
        floor_epsilon = 1e-12 * full_scale if full_scale > 0 else 1e-12
    out = trace - floor
    mask = out < floor_epsilon
    out[mask] = floor_epsilon
    return out, mask
