"""Quantum-noise lock: dither-and-difference servo on the LO phase.

The servo holds the local-oscillator phase at the minimum (squeezing) or
maximum (anti-squeezing) of the phase-dependent noise power.  Each step
measures the noise power at phase +/- dither, forms the finite-difference
error signal and integrates it.  A discrete two-point dither is equivalent
in steady state to continuous dither demodulation and is trivial to verify.

Capture range is +/- pi/4 around a target, set by the pi periodicity of the
noise landscape.  Near a target the loop contracts whenever

    loop_gain < 1 / ((v_max - v_min) * sin(2 * dither_amplitude)),

the bound used by :func:`default_lock_config`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import LockNotAcquired, MeasurementFailure
from .polarization import QuadratureNoiseState, quad_variance

#: Consecutive in-tolerance steps required to declare the lock settled.
SETTLE_STREAK = 10


@dataclass(frozen=True)
class LockConfig:
    dither_amplitude: float = 0.05
    dither_freq: float = 1e3          # metadata; the stepper is event-driven
    loop_gain: float = 1.0
    target: str = "min"
    settle_tolerance: float = 0.01
    max_steps: int = 500

    def __post_init__(self):
        if not self.dither_amplitude > 0:
            raise ValueError("dither_amplitude must be > 0")
        if not self.loop_gain > 0:
            raise ValueError("loop_gain must be > 0")
        if not self.settle_tolerance > 0:
            raise ValueError("settle_tolerance must be > 0")
        if self.target not in ("min", "max"):
            raise ValueError(f"target must be 'min' or 'max', got {self.target!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class LockState:
    phase_estimate: float
    error_integrator: float = 0.0
    locked: bool = False
    history: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "phase_estimate",
                           self.phase_estimate % (2.0 * math.pi))


def stability_gain_bound(q: QuadratureNoiseState, dither_amplitude: float) -> float:
    """Largest loop gain for which the noiseless loop contracts everywhere
    inside the capture range."""
    curvature = q.v_max - q.v_min
    if curvature <= 0:
        return math.inf
    return 1.0 / (curvature * math.sin(2.0 * dither_amplitude))


def default_lock_config(q: QuadratureNoiseState, target: str = "min",
                        dither_amplitude: float = 0.05,
                        settle_tolerance: float = 0.01,
                        max_steps: int = 500) -> LockConfig:
    """Config with the loop gain at 30% of the stability bound."""
    bound = stability_gain_bound(q, dither_amplitude)
    gain = 0.3 * bound if math.isfinite(bound) else 1.0
    return LockConfig(dither_amplitude=dither_amplitude, loop_gain=gain,
                      target=target, settle_tolerance=settle_tolerance,
                      max_steps=max_steps)


def lock_step(state: LockState, noise_power_at, cfg: LockConfig) -> LockState:
    """One dither cycle: measure both sides, integrate the error, step."""
    phase = state.phase_estimate
    try:
        upper = noise_power_at(phase + cfg.dither_amplitude)
        lower = noise_power_at(phase - cfg.dither_amplitude)
    except Exception as exc:
        raise MeasurementFailure(f"noise measurement failed at {phase}") from exc
    error = upper - lower
    sign = -1.0 if cfg.target == "min" else 1.0
    new_phase = phase + sign * cfg.loop_gain * error
    step_index = len(state.history)
    return replace(
        state,
        phase_estimate=new_phase,
        error_integrator=state.error_integrator + error,
        history=state.history + ((step_index, new_phase % (2.0 * math.pi),
                                  0.5 * (upper + lower)),),
    )


def _wrapped_distance(phase: float, target: float) -> float:
    """Distance to target modulo the pi landscape period."""
    d = (phase - target) % math.pi
    return min(d, math.pi - d)


def target_phase(q: QuadratureNoiseState, target: str) -> float:
    return q.theta_min if target == "min" else q.theta_min + math.pi / 2.0


def run_lock(q: QuadratureNoiseState, noise_level: float,
             cfg: LockConfig | None = None, seed: int = 0,
             start_phase: float | None = None) -> LockState:
    """Acquire the lock against the quadrature-noise landscape.

    The measurement is quad_variance corrupted by multiplicative Gaussian
    noise of fractional size ``noise_level``.  Locked means the phase stayed
    within settle_tolerance of the target for SETTLE_STREAK consecutive
    steps.  Deterministic per seed.

    Raises
    ------
    LockNotAcquired
        If max_steps elapse without settling (including the degenerate
        isotropic landscape, which offers no error signal).
    """
    cfg = cfg or default_lock_config(q)
    target = target_phase(q, cfg.target)
    if start_phase is None:
        start_phase = target + math.pi / 6.0  # inside the capture range
    rng = np.random.default_rng(seed)

    def measure(phase: float) -> float:
        power = quad_variance(q, phase)
        if noise_level > 0:
            power *= 1.0 + noise_level * rng.standard_normal()
        return power

    state = LockState(phase_estimate=start_phase)
    streak = 0
    for _ in range(cfg.max_steps):
        state = lock_step(state, measure, cfg)
        if _wrapped_distance(state.phase_estimate, target) < cfg.settle_tolerance:
            streak += 1
            if streak >= SETTLE_STREAK:
                return replace(state, locked=True)
        else:
            streak = 0
    raise LockNotAcquired(
        f"no lock within {cfg.max_steps} steps "
        f"(residual {_wrapped_distance(state.phase_estimate, target):.4f} rad)"
    )


def export_history_csv(state: LockState, path) -> None:
    """Write ``step,phase_rad,noise_power_linear`` rows."""
    data = np.array(state.history, dtype=float).reshape(-1, 3)
    np.savetxt(path, data, delimiter=",",
               header="step,phase_rad,noise_power_linear", comments="")
