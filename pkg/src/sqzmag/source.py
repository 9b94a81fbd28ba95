"""Squeezed-light source model: sub-threshold OPO, loss chain, phase jitter.

The forward chain is

    pump amplitude x  ->  pure squeezed vacuum (v_min * v_max = 1)
                      ->  beam-splitter loss at total efficiency eta
                      ->  Gaussian local-oscillator phase jitter (sigma)

and `fit_source_model` inverts it: given a measured squeezing /
anti-squeezing pair in dB and the known efficiency it recovers (x, sigma)
in closed form, using the fact that phase jitter preserves v_min + v_max.

Zero-frequency, on-resonance variances are used throughout: the analysis
band (<= 2 MHz) sits far below a typical cavity linewidth, so the squeezing
spectrum is treated as flat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EfficiencyOutOfRange, GainBelowUnity, NoPhysicalSolution
from .polarization import QuadratureNoiseState, from_db, to_db


@dataclass(frozen=True)
class OpoParams:
    """Sub-threshold OPO pump setting.

    ``parametric_gain`` is the classical transmission ratio with the pump on
    versus off; the pump relative amplitude ``x = 1 - 1/sqrt(gain)`` is the
    equivalent distance-to-threshold parameter.
    """

    parametric_gain: float

    def __post_init__(self):
        if not (math.isfinite(self.parametric_gain) and self.parametric_gain >= 1.0):
            raise GainBelowUnity(
                f"parametric gain must be >= 1, got {self.parametric_gain}"
            )

    @property
    def pump_relative_amplitude(self) -> float:
        return 1.0 - 1.0 / math.sqrt(self.parametric_gain)

    @classmethod
    def from_pump_amplitude(cls, x: float) -> "OpoParams":
        if not 0.0 <= x < 1.0:
            raise ValueError(f"pump amplitude must be in [0, 1), got {x}")
        return cls(parametric_gain=1.0 / (1.0 - x) ** 2)


@dataclass(frozen=True)
class LossChain:
    """Multiplicative efficiency budget between squeezer and photocurrent."""

    escape: float = 0.96
    homodyne: float = 0.98
    cell_transmission: float = 0.97
    optics: float = 0.95
    detector_qe: float = 0.95

    def __post_init__(self):
        for name, eta in self.factors().items():
            if not 0.0 < eta <= 1.0:
                raise EfficiencyOutOfRange(f"{name} must be in (0, 1], got {eta}")

    def factors(self) -> dict:
        return {
            "escape": self.escape,
            "homodyne": self.homodyne,
            "cell_transmission": self.cell_transmission,
            "optics": self.optics,
            "detector_qe": self.detector_qe,
        }

    @property
    def total(self) -> float:
        return chain_efficiency(self)


@dataclass(frozen=True)
class PhaseJitter:
    """Zero-mean Gaussian local-oscillator phase fluctuation, std in rad."""

    sigma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"jitter sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class ProbeParams:
    """Bright local-oscillator beam parameters (SI units)."""

    lo_power: float = 620e-6
    waist: float = 950e-6
    wavelength: float = 794.7e-9
    detuning: float = 700e6
    overlap: float = 0.99

    def __post_init__(self):
        for name in ("lo_power", "waist", "wavelength", "detuning"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.overlap <= 1.0:
            raise ValueError(f"overlap must be in (0, 1], got {self.overlap}")


def opo_variances(p: OpoParams) -> QuadratureNoiseState:
    """Lossless squeezed/anti-squeezed variances of the sub-threshold OPO.

    v_min = 1 - 4x/(1+x)^2 and v_max = 1 + 4x/(1-x)^2 with
    x = 1 - 1/sqrt(gain); the product v_min * v_max is exactly 1 (pure state).
    """
    x = p.pump_relative_amplitude
    v_min = 1.0 - 4.0 * x / (1.0 + x) ** 2
    v_max = 1.0 + 4.0 * x / (1.0 - x) ** 2
    return QuadratureNoiseState(v_min=v_min, v_max=v_max, theta_min=0.0)


def apply_loss(v: float, eta: float) -> float:
    """Beam-splitter loss on a single quadrature variance: v' = eta*v + 1 - eta.

    Vacuum (v = 1) is a fixed point for every efficiency.
    """
    if not 0.0 <= eta <= 1.0:
        raise EfficiencyOutOfRange(f"efficiency must be in [0, 1], got {eta}")
    if not v > 0:
        raise ValueError(f"variance must be > 0, got {v}")
    return eta * v + (1.0 - eta)


def apply_loss_to_state(q: QuadratureNoiseState, eta: float) -> QuadratureNoiseState:
    """Loss applied to both principal quadratures; ellipse angle unchanged."""
    return QuadratureNoiseState(
        v_min=apply_loss(q.v_min, eta),
        v_max=apply_loss(q.v_max, eta),
        theta_min=q.theta_min,
    )


def chain_efficiency(c: LossChain) -> float:
    """Total detection efficiency: product of the five chain factors."""
    total = 1.0
    for eta in c.factors().values():
        total *= eta
    return total


def jitter_average(q: QuadratureNoiseState, j: PhaseJitter) -> QuadratureNoiseState:
    """Variance ellipse observed through Gaussian phase jitter.

    Averaging V(theta + delta) over delta ~ N(0, sigma^2) mixes the principal
    variances with weight c = (1 + exp(-2 sigma^2)) / 2:

        v_min' = c v_min + (1-c) v_max,   v_max' = c v_max + (1-c) v_min.

    The sum v_min + v_max is preserved exactly and v_min never decreases.
    """
    c = 0.5 * (1.0 + math.exp(-2.0 * j.sigma * j.sigma))
    return QuadratureNoiseState(
        v_min=c * q.v_min + (1.0 - c) * q.v_max,
        v_max=c * q.v_max + (1.0 - c) * q.v_min,
        theta_min=q.theta_min,
    )


@dataclass(frozen=True)
class SourceFit:
    """Result of reconciling the source model with a measured dB pair."""

    pump_relative_amplitude: float
    jitter_sigma_rad: float
    implied_gain: float
    forward_vmin_db: float
    forward_vmax_db: float


def predict_observed_state(x: float, sigma: float, eta: float) -> QuadratureNoiseState:
    """Forward chain: pump amplitude -> loss -> jitter = observed ellipse."""
    pure = opo_variances(OpoParams.from_pump_amplitude(x))
    return jitter_average(apply_loss_to_state(pure, eta), PhaseJitter(sigma))


def fit_source_model(measured_vmin_db: float, measured_vmax_db: float,
                     eta: float) -> SourceFit:
    """Solve for (pump amplitude, jitter sigma) from a measured dB pair.

    Because jitter preserves the variance sum, the sum equation depends only
    on the pump amplitude: with y = v_min (pure) and v_max = 1/y,

        y + 1/y = (m_min + m_max - 2(1 - eta)) / eta

    is a quadratic in y whose smaller root gives x; the jitter mixing weight
    then follows from the measured v_min alone.  Deterministic, no iteration.

    Raises
    ------
    NoPhysicalSolution
        If the measured pair cannot be reached by any (x, sigma) with the
        given efficiency (sum below vacuum, or more squeezing than the loss
        chain permits).
    """
    if not 0.0 < eta <= 1.0:
        raise EfficiencyOutOfRange(f"efficiency must be in (0, 1], got {eta}")
    if measured_vmin_db > 0 or measured_vmax_db < 0:
        raise NoPhysicalSolution(
            "expected squeezing <= 0 dB <= anti-squeezing, got "
            f"({measured_vmin_db}, {measured_vmax_db}) dB"
        )

    m_min = from_db(measured_vmin_db)
    m_max = from_db(measured_vmax_db)

    if math.isclose(m_min, 1.0, rel_tol=1e-12) and math.isclose(m_max, 1.0, rel_tol=1e-12):
        return SourceFit(0.0, 0.0, 1.0, 0.0, 0.0)

    total = (m_min + m_max - 2.0 * (1.0 - eta)) / eta
    if total < 2.0:
        raise NoPhysicalSolution(
            f"measured variance sum {m_min + m_max} lies below the vacuum "
            f"bound for eta = {eta}"
        )
    # Smaller root of y^2 - total*y + 1 = 0 is the pure squeezed variance.
    y = 0.5 * (total - math.sqrt(total * total - 4.0))
    r = math.sqrt(y)
    x = (1.0 - r) / (1.0 + r)

    v_lo = eta * y + (1.0 - eta)
    v_hi = eta / y + (1.0 - eta)
    if math.isclose(v_lo, v_hi, rel_tol=1e-12):
        sigma = 0.0
    else:
        c = (m_min - v_hi) / (v_lo - v_hi)
        if c > 1.0 + 1e-9:
            raise NoPhysicalSolution(
                f"measured squeezing {measured_vmin_db} dB exceeds what the "
                f"loss chain (eta = {eta}) permits at this variance sum"
            )
        if c <= 0.5:
            raise NoPhysicalSolution(
                "measured pair requires mixing beyond full phase diffusion"
            )
        c = min(c, 1.0)
        sigma = math.sqrt(-math.log(2.0 * c - 1.0) / 2.0) if c < 1.0 else 0.0

    observed = predict_observed_state(x, sigma, eta)
    return SourceFit(
        pump_relative_amplitude=x,
        jitter_sigma_rad=sigma,
        implied_gain=1.0 / (1.0 - x) ** 2,
        forward_vmin_db=to_db(observed.v_min),
        forward_vmax_db=to_db(observed.v_max),
    )
