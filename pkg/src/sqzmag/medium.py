"""Atomic vapor cell: rotation gains, spin-projection noise, spin time series.

The cell couples an axial magnetic field and the collective atomic spin into
a rotation of the probe polarization.  Rotation couplings (Verdet constant,
vector-polarizability coupling, quadratic power-dependent rotation gain) are
calibration constants, not first-principles quantities; defaults are pinned
by the experiment-level calibration.

Spin noise is realized as a stationary Ornstein-Uhlenbeck process with a
configurable correlation time.  The default correlation time is far shorter
than the analysis band's inverse frequencies, yielding a flat in-band
spin-noise spectrum; longer correlation times expose a visible Lorentzian
knee for exploring atomic-noise-limited regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .polarization import StokesVector, faraday_rotate
from .timeseries import TimeSeries

POLARIZATION_MODES = ("thermal", "fully_polarized")


@dataclass(frozen=True)
class EnsembleParams:
    """Atom-number and manifold bookkeeping for the vapor.

    ``f2_fraction`` is the population fraction in the probed upper hyperfine
    manifold of a thermal vapor (5/8 for a spin-3/2 nucleus alkali ground
    state); the remainder sits in the lower manifold.
    """

    n_atoms: float
    f_quantum_number: int = 2
    length: float = 0.15
    f2_fraction: float = 5.0 / 8.0
    polarization_mode: str = "thermal"

    def __post_init__(self):
        if self.n_atoms < 0:
            raise ValueError(f"atom number must be >= 0, got {self.n_atoms}")
        if self.f_quantum_number not in (1, 2):
            raise ValueError(f"F must be 1 or 2, got {self.f_quantum_number}")
        if not self.length > 0:
            raise ValueError("cell length must be > 0")
        if not 0.0 <= self.f2_fraction <= 1.0:
            raise ValueError("f2_fraction must be in [0, 1]")
        if self.polarization_mode not in POLARIZATION_MODES:
            raise ValueError(
                f"polarization_mode must be one of {POLARIZATION_MODES}"
            )


@dataclass(frozen=True)
class MediumCoupling:
    """Rotation couplings of the cell (calibration constants).

    verdet : rad/(T*m), linear magneto-optical rotation per field and length.
    alpha : rad/(spin*m), rotation per unit collective axial spin and length.
    nmor_coefficient : 1/W^2, quadratic probe-power scaling of the effective
        rotation gain; normalized so gain = nmor_coefficient * power^2.
    transmission : power transmission through the cell.
    """

    verdet: float
    alpha: float = 0.0
    nmor_coefficient: float = 0.0
    transmission: float = 0.97

    def __post_init__(self):
        if not (math.isfinite(self.verdet) and math.isfinite(self.alpha)):
            raise ValueError("couplings must be finite")
        if not 0.0 < self.transmission <= 1.0:
            raise ValueError(
                f"transmission must be in (0, 1], got {self.transmission}"
            )


@dataclass(frozen=True)
class PrecessionParams:
    """Constants entering the spin-precession gain."""

    lande_g: float
    bohr_magneton: float
    tau: float

    def __post_init__(self):
        for name in ("lande_g", "bohr_magneton", "tau"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class SpinNoiseModel:
    """Stationary statistics of the collective axial spin fluctuation."""

    variance: float
    correlation_time: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")
        if not self.correlation_time > 0:
            raise ValueError("correlation_time must be > 0")


def spin_variance(e: EnsembleParams) -> float:
    """Collective axial-spin variance of the ensemble.

    Thermal vapor: F(F+1)/3 per atom, counting only the atoms in the probed
    manifold (fraction ``f2_fraction`` for F = 2, the remainder for F = 1).
    Fully polarized ensemble: F/2 per atom, all atoms pumped into the probed
    manifold.  With the defaults (F = 2, fraction 5/8) the thermal/polarized
    detected-noise ratio is exactly 5/4.
    """
    f = e.f_quantum_number
    if e.polarization_mode == "fully_polarized":
        return 0.5 * f * e.n_atoms
    fraction = e.f2_fraction if f == 2 else 1.0 - e.f2_fraction
    return (f * (f + 1) / 3.0) * fraction * e.n_atoms


def field_gain(c: MediumCoupling, s_x: float, length: float) -> float:
    """Signal slope per tesla of axial field: s_x * verdet * length."""
    if not length > 0:
        raise ValueError("length must be > 0")
    return s_x * c.verdet * length


def mean_precessed_spin(p: PrecessionParams, spin_magnitude: float,
                        b_transverse: float) -> float:
    """Mean axial spin developed by precession of a polarized ensemble.

    Product of spin magnitude, magneton, g-factor, transverse field and
    precession time; identically zero for a thermal (unpolarized) ensemble.
    """
    if spin_magnitude == 0:
        return 0.0
    return spin_magnitude * p.bohr_magneton * p.lande_g * b_transverse * p.tau


def precession_gain(c: MediumCoupling, p: PrecessionParams, s_x: float,
                    spin_magnitude: float, length: float) -> float:
    """Signal slope per tesla of transverse field, via spin precession.

    Exactly zero for an unpolarized ensemble (spin_magnitude = 0), which is
    what kills precession-path technical noise in the thermal operating mode.
    """
    if spin_magnitude < 0:
        raise ValueError("spin magnitude must be >= 0")
    if spin_magnitude == 0:
        return 0.0
    return (s_x * c.alpha * p.bohr_magneton * p.lande_g * p.tau
            * spin_magnitude * length)


def faraday_output(s_in: StokesVector, b_z: float, f_z: float,
                   c: MediumCoupling, length: float) -> StokesVector:
    """Probe state after the cell: rotation by (verdet*b_z + alpha*f_z)*length,
    then uniform power scaling by the cell transmission.

    Absorption is applied after rotation; at the microradian rotation angles
    of interest the ordering is immaterial (thin-cell convention).
    """
    theta = (c.verdet * b_z + c.alpha * f_z) * length
    return faraday_rotate(s_in, theta).scaled(c.transmission)


def nmor_rotation_gain(lo_power: float, nmor_coefficient: float) -> float:
    """Effective rotation-gain factor at the given probe power.

    Quadratic in power: doubling the probe power quadruples the gain.  The
    coefficient normalizes the gain to 1 at whatever reference power the
    calibration chose.
    """
    if lo_power < 0:
        raise ValueError("power must be >= 0")
    return nmor_coefficient * lo_power * lo_power


def sample_spin_noise(m: SpinNoiseModel, n_samples: int, dt: float,
                      seed: int) -> TimeSeries:
    """Stationary Ornstein-Uhlenbeck realization of the spin fluctuation.

    Exact discretization: x[n+1] = rho x[n] + sqrt(var (1 - rho^2)) xi[n]
    with rho = exp(-dt / correlation_time) and x[0] drawn from the
    stationary distribution.  Bit-identical for identical seeds.
    """
    if n_samples <= 0:
        raise ValueError("n_samples must be > 0")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if m.variance == 0:
        return TimeSeries(1.0 / dt, np.zeros(n_samples),
                          seed_provenance=(seed,), units_tag="spin")
    rho = math.exp(-dt / m.correlation_time)
    std = math.sqrt(m.variance)
    rng = np.random.default_rng(seed)
    innovations = rng.standard_normal(n_samples)
    innovations[0] *= std                       # stationary start
    innovations[1:] *= std * math.sqrt(1.0 - rho * rho)
    samples = lfilter([1.0], [1.0, -rho], innovations)
    return TimeSeries(1.0 / dt, samples, seed_provenance=(seed,),
                      units_tag="spin")


def ou_psd(f_hz, variance: float, correlation_time: float):
    """One-sided Lorentzian spectral density of the OU process.

    S(f) = 4 var tau / (1 + (2 pi f tau)^2); integrates to the variance.
    Serves as the analytic reference for spectral tests.
    """
    f = np.asarray(f_hz, dtype=float)
    return (4.0 * variance * correlation_time
            / (1.0 + (2.0 * np.pi * f * correlation_time) ** 2))
