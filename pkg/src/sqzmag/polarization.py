"""Stokes-parameter algebra and Gaussian quadrature-noise states.

Units and conventions
---------------------
* Stokes components carry the same power unit as ``s0`` (watts or normalized).
* Quadrature variances are in shot-noise units: a coherent probe at the
  configured local-oscillator power has variance 1 in every quadrature.
* Quadrature angles live in the plane spanned by the two dark Stokes
  components of a horizontally polarized probe; the noise ellipse is
  parameterized by its minimum/maximum variance and the angle of the
  minimum-variance axis.

All operations are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InconsistentBases, NegativeIntensity, NonPositiveRatio

#: Relative tolerance for the polarization-sphere inequality check.
SPHERE_RTOL = 1e-12

#: Relative tolerance for basis-pair power consistency in `make_stokes`.
BASIS_RTOL = 1e-9

#: Slack on the uncertainty product v_min * v_max >= 1.
UNCERTAINTY_SLACK = 1e-9


@dataclass(frozen=True)
class StokesVector:
    """Classical polarization state (s0, sx, sy, sz).

    Invariants: ``s0 >= 0`` and ``sx^2 + sy^2 + sz^2 <= s0^2`` (relative
    tolerance ``SPHERE_RTOL``), with equality for fully polarized light.
    """

    s0: float
    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        components = (self.s0, self.sx, self.sy, self.sz)
        if not all(math.isfinite(c) for c in components):
            raise ValueError(f"Stokes components must be finite, got {components}")
        if self.s0 < 0:
            raise ValueError(f"total power must be >= 0, got {self.s0}")
        pol2 = self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
        if pol2 > self.s0 * self.s0 * (1.0 + SPHERE_RTOL):
            raise ValueError(
                "polarized power exceeds total power: "
                f"|s|^2 = {pol2!r} > s0^2 = {self.s0 * self.s0!r}"
            )

    @property
    def degree_of_polarization(self) -> float:
        if self.s0 == 0:
            return 0.0
        return math.sqrt(self.sx**2 + self.sy**2 + self.sz**2) / self.s0

    def scaled(self, factor: float) -> "StokesVector":
        """Uniform power scaling (e.g. transmission loss), factor >= 0."""
        if factor < 0:
            raise ValueError("scale factor must be >= 0")
        return StokesVector(self.s0 * factor, self.sx * factor,
                            self.sy * factor, self.sz * factor)


@dataclass(frozen=True)
class QuadratureNoiseState:
    """Gaussian noise ellipse of the dark-plane quadratures, in shot units.

    ``theta_min`` is the angle of the minimum-variance quadrature, stored
    normalized to [0, pi) since the variance landscape has period pi.
    """

    v_min: float
    v_max: float
    theta_min: float = 0.0

    def __post_init__(self):
        if not (self.v_min > 0 and math.isfinite(self.v_min)):
            raise ValueError(f"v_min must be finite and > 0, got {self.v_min}")
        if not (self.v_max >= self.v_min and math.isfinite(self.v_max)):
            raise ValueError(
                f"need v_min <= v_max, got ({self.v_min}, {self.v_max})"
            )
        if self.v_min * self.v_max < 1.0 - UNCERTAINTY_SLACK:
            raise ValueError(
                "uncertainty bound violated: "
                f"v_min*v_max = {self.v_min * self.v_max} < 1"
            )
        if not math.isfinite(self.theta_min):
            raise ValueError("theta_min must be finite")
        object.__setattr__(self, "theta_min", self.theta_min % math.pi)

    @property
    def is_squeezed(self) -> bool:
        return self.v_min < 1.0


def make_stokes(i_h: float, i_v: float, i_d: float, i_dbar: float,
                i_r: float, i_l: float) -> StokesVector:
    """Build a Stokes vector from the six basis intensities.

    The three basis pairs (horizontal/vertical, diagonal/antidiagonal,
    right/left circular) must each sum to the same total power.

    Raises
    ------
    NegativeIntensity
        If any intensity is negative.
    InconsistentBases
        If the pair sums disagree beyond ``BASIS_RTOL`` relative.
    """
    intensities = (i_h, i_v, i_d, i_dbar, i_r, i_l)
    for value in intensities:
        if value < 0:
            raise NegativeIntensity(f"intensities must be >= 0, got {value}")
    totals = (i_h + i_v, i_d + i_dbar, i_r + i_l)
    scale = max(totals)
    if max(totals) - min(totals) > BASIS_RTOL * scale:
        raise InconsistentBases(
            f"basis pair sums disagree: H/V={totals[0]}, D/D̄={totals[1]}, "
            f"R/L={totals[2]}"
        )
    return StokesVector(totals[0], i_h - i_v, i_d - i_dbar, i_r - i_l)


def faraday_rotate(s: StokesVector, theta: float) -> StokesVector:
    """Rotate the linear-polarization components by ``theta`` (rad).

    Exact rotation about the circular axis: the linear components rotate by
    ``theta`` while ``s0`` and ``sz`` are untouched.  For ``|theta| << 1``
    and ``sy = 0`` this reduces to ``sy' = sx * theta`` to third order,
    which is the usual small-rotation readout regime.
    """
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta}")
    c, n = math.cos(theta), math.sin(theta)
    return StokesVector(s.s0, s.sx * c - s.sy * n, s.sx * n + s.sy * c, s.sz)


def quad_variance(q: QuadratureNoiseState, theta: float) -> float:
    """Noise variance of the quadrature at angle ``theta`` (shot units).

    V(theta) = v_min cos^2(theta - theta_min) + v_max sin^2(theta - theta_min);
    period pi, minimum at theta_min.
    """
    u = theta - q.theta_min
    cu, su = math.cos(u), math.sin(u)
    return q.v_min * cu * cu + q.v_max * su * su


def to_db(ratio_linear: float) -> float:
    """Linear power ratio -> dB."""
    if not ratio_linear > 0:
        raise NonPositiveRatio(f"power ratio must be > 0, got {ratio_linear}")
    return 10.0 * math.log10(ratio_linear)


def from_db(db: float) -> float:
    """dB -> linear power ratio. Exact inverse of :func:`to_db`."""
    return 10.0 ** (db / 10.0)
