"""Swept-spectrum and zero-span measurement emulation.

Signal path, mirroring a real instrument with an RMS detector:

1. mix the input to the analysis frequency (complex baseband),
2. Gaussian resolution-bandwidth filter of known equivalent noise bandwidth,
3. envelope power (a tone of amplitude A reads A^2/2; white noise of
   one-sided density S reads S * ENBW),
4. single-pole video-bandwidth smoothing of the power,
5. resampling onto the displayed grid (power-averaged per displayed point).

Steps 1-3 are evaluated in the frequency domain: one FFT of the record, a
Gaussian-weighted slice around the analysis frequency, and a short inverse
FFT that lands directly on a decimated baseband grid.  This is exact for
stationary records (no sweep-rate distortion is modeled) and lets swept mode
share a single FFT across all frequency bins.

Swept traces are power-averaged over independent input realizations; the
reported values are linear power per RBW bin, with the filter ENBW attached
for unambiguous conversion to spectral density.

The 0 dB reference for exported traces is the coherent-probe (shot-noise)
level; every CSV header states the ENBW so floors convert to densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigModeMismatch, NyquistViolation
from .polarization import to_db
from .timeseries import TimeSeries

#: ENBW / 3-dB bandwidth for a Gaussian filter: sqrt(pi / (4 ln 2)).
GAUSSIAN_ENBW_RATIO = math.sqrt(math.pi / (4.0 * math.log(2.0)))

#: The RBW filter is truncated this many RBWs either side of center.
_FILTER_HALFWIDTH_RBW = 4.0

#: VBW settle margin dropped before time-averaging a bin, in time constants.
_SETTLE_TIME_CONSTANTS = 3.0


def enbw(rbw_hz: float) -> float:
    """Equivalent noise bandwidth of the Gaussian RBW filter.

    Fixed ratio ENBW / RBW(3 dB) = 1.0645 (Gaussian filter shape).
    """
    if not rbw_hz > 0:
        raise ValueError(f"rbw must be > 0, got {rbw_hz}")
    return GAUSSIAN_ENBW_RATIO * rbw_hz


@dataclass(frozen=True)
class SAConfig:
    """Spectrum-analyzer settings.

    ``mode`` selects zero-span (band power versus time at ``center_hz``) or
    swept (band power versus frequency from ``start_hz`` to ``stop_hz`` on a
    grid of spacing at most rbw/2).  ``n_averages`` power-averages sweeps
    over input segments or independent realizations.
    """

    mode: str
    rbw_hz: float
    vbw_hz: float
    center_hz: float | None = None
    start_hz: float | None = None
    stop_hz: float | None = None
    sweep_time_s: float = 2.0
    n_averages: int = 1
    detector: str = "rms"
    n_points: int = 601
    grid_spacing_hz: float | None = None

    def __post_init__(self):
        if self.mode not in ("zero_span", "swept"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.rbw_hz > 0:
            raise ValueError("rbw_hz must be > 0")
        if not 0 < self.vbw_hz <= self.rbw_hz:
            raise ValueError("need 0 < vbw_hz <= rbw_hz")
        if self.detector != "rms":
            raise ValueError("only the rms detector is modeled")
        if not self.sweep_time_s > 0:
            raise ValueError("sweep_time_s must be > 0")
        if self.n_averages < 1:
            raise ValueError("n_averages must be >= 1")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if self.mode == "zero_span":
            if self.center_hz is None or not self.center_hz > 0:
                raise ValueError("zero_span requires center_hz > 0")
        else:
            if self.start_hz is None or self.stop_hz is None:
                raise ValueError("swept requires start_hz and stop_hz")
            if not 0 < self.start_hz < self.stop_hz:
                raise ValueError("need 0 < start_hz < stop_hz")
            if self.grid_spacing_hz is not None:
                if not 0 < self.grid_spacing_hz <= self.rbw_hz / 2.0:
                    raise ValueError("grid spacing must be in (0, rbw/2]")


@dataclass
class PowerTrace:
    """Linear band power versus time (zero-span) or frequency (swept).

    ``reference_power`` is the 0 dB level (coherent shot noise) used by the
    dB conversion and CSV export.
    """

    abscissa: np.ndarray
    values: np.ndarray
    enbw_hz: float
    domain: str
    reference_power: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.abscissa.shape != self.values.shape or self.abscissa.ndim != 1:
            raise ValueError("abscissa and values must be matching 1-D arrays")
        if np.any(np.diff(self.abscissa) <= 0):
            raise ValueError("abscissa must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("linear power values must be >= 0")
        if self.domain not in ("time", "frequency"):
            raise ValueError(f"unknown domain {self.domain!r}")

    def values_db(self, reference: float | None = None) -> np.ndarray:
        ref = self.reference_power if reference is None else reference
        return np.array([to_db(v / ref) for v in self.values])

    def to_csv(self, path) -> None:
        column = "time_s" if self.domain == "time" else "frequency_hz"
        data = np.column_stack([self.abscissa, self.values_db()])
        np.savetxt(path, data, delimiter=",",
                   header=f"enbw_hz={self.enbw_hz!r}\n{column},power_db_rel_shot",
                   comments="# ")


class _BandExtractor:
    """Frequency-domain band extraction from one FFT of a record."""

    def __init__(self, samples: np.ndarray, fs: float):
        self.n = samples.size
        self.fs = fs
        self.df = fs / self.n
        self.spectrum = np.fft.rfft(samples)

    def window_bins(self, rbw_hz: float) -> int:
        return max(int(round(_FILTER_HALFWIDTH_RBW * rbw_hz / self.df)), 4)

    def envelope_power(self, centers_hz: np.ndarray, rbw_hz: float):
        """Decimated envelope power for each analysis frequency.

        Returns (power matrix [n_centers, n_window], decimated sample rate).
        Tone of amplitude A at a center -> A^2/2; white noise of one-sided
        density S -> mean S * ENBW.
        """
        centers = np.atleast_1d(np.asarray(centers_hz, dtype=float))
        half = self.window_bins(rbw_hz)
        n_window = 2 * half
        n_spec = self.spectrum.size

        center_bins = np.round(centers / self.df).astype(int)
        starts = center_bins - half
        # Keep the window inside (DC, Nyquist); bins closer than the filter
        # half-width to an edge see a truncated filter.
        starts = np.clip(starts, 1, max(n_spec - 1 - n_window, 1))

        idx = starts[:, None] + np.arange(n_window)[None, :]
        freqs = idx * self.df
        response = np.exp(
            -math.log(2.0) * 2.0 * ((freqs - centers[:, None]) / rbw_hz) ** 2
        )
        sliced = self.spectrum[idx] * response
        baseband = (2.0 * n_window / self.n) * np.fft.ifft(sliced, axis=1)
        power = 0.5 * (baseband.real**2 + baseband.imag**2)
        fs_dec = n_window * self.df
        return power, fs_dec


def _vbw_filter(power: np.ndarray, fs_dec: float, vbw_hz: float) -> np.ndarray:
    """Single-pole low-pass on the envelope power, rows independent."""
    pole = math.exp(-2.0 * math.pi * vbw_hz / fs_dec)
    first = power[..., :1]
    zi = pole * first
    out, _ = lfilter([1.0 - pole], [1.0, -pole], power, axis=-1, zi=zi)
    return out


def _settle_samples(fs_dec: float, vbw_hz: float, n: int) -> int:
    tau = 1.0 / (2.0 * math.pi * vbw_hz)
    return min(int(math.ceil(_SETTLE_TIME_CONSTANTS * tau * fs_dec)), n // 2)


def _check_zero_span(cfg: SAConfig, fs: float) -> None:
    if cfg.mode != "zero_span":
        raise ConfigModeMismatch(f"zero_span called with mode {cfg.mode!r}")
    if cfg.center_hz + cfg.rbw_hz > fs / 2.0:
        raise NyquistViolation(
            f"center {cfg.center_hz} Hz + rbw does not fit below {fs / 2} Hz"
        )


def zero_span(ts: TimeSeries, cfg: SAConfig) -> PowerTrace:
    """Band power versus time at a fixed center frequency.

    The record must cover n_averages * sweep_time; with n_averages > 1 the
    trace is the power average of consecutive sweeps.  Displayed points are
    power means over their dwell interval (RMS detection).
    """
    _check_zero_span(cfg, ts.sample_rate)
    sweep_samples = int(round(cfg.sweep_time_s * ts.sample_rate))
    needed = sweep_samples * cfg.n_averages
    if len(ts) < needed:
        raise ValueError(
            f"record of {len(ts)} samples cannot cover {cfg.n_averages} "
            f"sweep(s) of {sweep_samples} samples"
        )

    traces = []
    for k in range(cfg.n_averages):
        segment = ts.samples[k * sweep_samples:(k + 1) * sweep_samples]
        extractor = _BandExtractor(segment, ts.sample_rate)
        power, fs_dec = extractor.envelope_power(
            np.array([cfg.center_hz]), cfg.rbw_hz
        )
        smoothed = _vbw_filter(power, fs_dec, cfg.vbw_hz)[0]
        traces.append(_resample_dwell(smoothed, cfg.n_points))
    values = np.mean(traces, axis=0)

    t_centers = (np.arange(cfg.n_points) + 0.5) * cfg.sweep_time_s / cfg.n_points
    return PowerTrace(t_centers, values, enbw(cfg.rbw_hz), "time",
                      metadata={"center_hz": cfg.center_hz,
                                "rbw_hz": cfg.rbw_hz, "vbw_hz": cfg.vbw_hz})


def _resample_dwell(power: np.ndarray, n_points: int) -> np.ndarray:
    n = power.size
    if n < n_points:
        raise ValueError(
            f"only {n} filtered samples for {n_points} display points; "
            "reduce n_points or increase the record length"
        )
    buckets = np.arange(n) * n_points // n
    sums = np.bincount(buckets, weights=power, minlength=n_points)
    counts = np.bincount(buckets, minlength=n_points)
    return sums / counts


def sweep_grid(cfg: SAConfig) -> np.ndarray:
    """Frequency grid of a swept measurement (spacing <= rbw/2)."""
    spacing = cfg.grid_spacing_hz or cfg.rbw_hz / 2.0
    n_bins = int(math.floor((cfg.stop_hz - cfg.start_hz) / spacing + 1e-9)) + 1
    return cfg.start_hz + spacing * np.arange(n_bins)


def swept(ts, cfg: SAConfig) -> PowerTrace:
    """Band power versus frequency, as a bank of zero-span evaluations.

    ``ts`` is a single record (split into n_averages consecutive segments)
    or a sequence of independent records (one per average).  Each bin value
    is the settled time-average of the VBW-filtered envelope power; bins are
    power-averaged across segments/realizations.
    """
    if cfg.mode != "swept":
        raise ConfigModeMismatch(f"swept called with mode {cfg.mode!r}")
    if isinstance(ts, TimeSeries):
        realizations = _split_segments(ts, cfg.n_averages)
    else:
        realizations = list(ts)
        if not realizations:
            raise ValueError("need at least one input record")
        if len({r.sample_rate for r in realizations}) != 1:
            raise ValueError("all records must share one sample rate")
    fs = realizations[0].sample_rate
    if cfg.stop_hz + cfg.rbw_hz > fs / 2.0:
        raise NyquistViolation(
            f"stop {cfg.stop_hz} Hz + rbw does not fit below {fs / 2} Hz"
        )

    freqs = sweep_grid(cfg)
    accum = np.zeros(freqs.size)
    for record in realizations:
        extractor = _BandExtractor(record.samples, fs)
        power, fs_dec = extractor.envelope_power(freqs, cfg.rbw_hz)
        smoothed = _vbw_filter(power, fs_dec, cfg.vbw_hz)
        skip = _settle_samples(fs_dec, cfg.vbw_hz, smoothed.shape[1])
        accum += smoothed[:, skip:].mean(axis=1)
    values = accum / len(realizations)

    return PowerTrace(freqs, values, enbw(cfg.rbw_hz), "frequency",
                      metadata={"rbw_hz": cfg.rbw_hz, "vbw_hz": cfg.vbw_hz,
                                "n_averages": len(realizations)})


def _split_segments(ts: TimeSeries, n_segments: int) -> list:
    seg = len(ts) // n_segments
    if seg < 2:
        raise ValueError("record too short to split into requested averages")
    return [TimeSeries(ts.sample_rate, ts.samples[k * seg:(k + 1) * seg],
                       seed_provenance=ts.seed_provenance, units_tag=ts.units_tag)
            for k in range(n_segments)]
