"""Closed-form coupling schedules for the sign-flip phase-mismatch coupler.

The coupling between the two guides is a hyperbolic secant,
``omega(z) = omega0 * sech(2*pi*z / L)``, and the mismatch is piecewise
constant, ``+delta0`` for z < 0 and ``-delta0`` for z > 0, over a device
spanning z in [-L, +L] (total length 2L).  The counterdiabatic correction
adds a term ``omega_a = theta_dot / 2`` which, after a diagonal phase
rotation by ``phi = atan2(omega_a, omega)``, yields the physical effective
schedules

    omega_eff = sqrt(omega**2 + omega_a**2)
    delta_eff = delta - phi_dot / 2

All positions are in mm, all rates in 1/mm.  Evaluation exactly at the
sign-flip point z = 0 must be side-tagged (side = -1 or +1); untagged
evaluation there raises :class:`DiscontinuityError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModelParams",
    "SchedulePoint",
    "Diagnostics",
    "GeometryCalibration",
    "DiscontinuityError",
    "UndefinedAngleError",
    "CalibrationDomainError",
    "raw_schedule",
    "mixing_angle",
    "cd_coupling",
    "effective_schedule",
    "diagnostics",
    "geometry_synthesis",
]


class DiscontinuityError(ValueError):
    """Untagged evaluation at the sign-flip point z = 0."""


class UndefinedAngleError(ValueError):
    """Mixing angle requested for omega = delta = 0."""


class CalibrationDomainError(ValueError):
    """Geometry synthesis outside the calibration's domain."""


@dataclass(frozen=True)
class ModelParams:
    """Physical design point of the coupler.

    omega0 : maximum coupling amplitude, 1/mm (>= 0)
    delta0 : phase-mismatch magnitude, 1/mm (>= 0)
    half_length : L, mm; the device spans z in [-L, +L]
    sta : select the counterdiabatic effective schedules instead of the
        raw sign-flip schedules
    """

    omega0: float
    delta0: float
    half_length: float
    sta: bool = False

    def __post_init__(self) -> None:
        if not (self.omega0 >= 0.0):
            raise ValueError(f"omega0 must be >= 0, got {self.omega0}")
        if not (self.delta0 >= 0.0):
            raise ValueError(f"delta0 must be >= 0, got {self.delta0}")
        if not (self.half_length > 0.0):
            raise ValueError(f"half_length must be > 0, got {self.half_length}")

    @property
    def total_length(self) -> float:
        return 2.0 * self.half_length


@dataclass(frozen=True)
class SchedulePoint:
    """Schedule values and derived STA quantities at one position."""

    z: float
    omega: float
    delta: float
    omega_a: float
    phi: float
    theta: float
    omega_eff: float
    delta_eff: float


@dataclass(frozen=True)
class Diagnostics:
    """Grid maxima of the adiabaticity and counterdiabatic ratios."""

    max_adiabaticity_ratio: float
    max_cd_ratio: float
    bound_satisfied: bool


@dataclass(frozen=True)
class GeometryCalibration:
    """User-supplied constants for the schedule-to-geometry mapping.

    coupling_scale (A) : coupling at zero separation, 1/mm
    coupling_decay (gamma) : exponential decay rate of the coupling with
        separation, 1/mm
    mismatch_per_width (k) : mismatch produced per unit width difference,
        1/(mm*um)
    """

    coupling_scale: float
    coupling_decay: float
    mismatch_per_width: float

    def __post_init__(self) -> None:
        if self.coupling_scale <= 0 or self.coupling_decay <= 0 or self.mismatch_per_width <= 0:
            raise ValueError("all calibration constants must be positive")


def _resolve_side(z: float, side: int) -> int:
    """Return -1 for the left half, +1 for the right half.

    side is only consulted exactly at z = 0 and must then be -1 or +1.
    """
    if z < 0.0:
        return -1
    if z > 0.0:
        return +1
    if side in (-1, +1):
        return side
    raise DiscontinuityError(
        "evaluation at z = 0 requires side=-1 or side=+1 (mismatch sign flip)"
    )


class _Point(NamedTuple):
    omega: float
    omega_dot: float
    delta: float
    omega_a: float
    omega_a_dot: float
    phi: float
    phi_dot: float
    omega_eff: float
    delta_eff: float
    theta: float


def _closed_form(omega0: float, delta_left: float, half_length: float,
                 z: float, side: int = 0) -> _Point:
    """Evaluate all schedule quantities for a signed-mismatch model.

    The mismatch is ``delta_left`` for z < 0 and ``-delta_left`` for z > 0
    (delta_left may be negative, which the three-guide reduction needs).
    """
    sgn = _resolve_side(z, side)
    L = half_length
    k = 2.0 * math.pi / L
    u = k * z
    sech = 1.0 / math.cosh(u)
    tanh = math.tanh(u)

    omega = omega0 * sech
    omega_dot = -omega0 * k * sech * tanh
    omega_ddot = omega0 * k * k * sech * (tanh * tanh - sech * sech)
    delta = delta_left if sgn < 0 else -delta_left

    theta = math.atan2(omega, delta)

    if omega0 == 0.0 or delta_left == 0.0:
        # theta is constant on each half: the counterdiabatic correction
        # vanishes identically and the STA schedules reduce to the raw ones.
        return _Point(omega, omega_dot, delta, 0.0, 0.0, 0.0, 0.0, omega, delta, theta)

    denom = omega * omega + delta * delta
    omega_a = omega_dot * delta / (2.0 * denom)
    omega_a_dot = delta * (omega_ddot * denom - 2.0 * omega * omega_dot * omega_dot) / (
        2.0 * denom * denom
    )
    phi = math.atan2(omega_a, omega)
    phi_dot = (omega_a_dot * omega - omega_dot * omega_a) / (
        omega * omega + omega_a * omega_a
    )
    omega_eff = math.hypot(omega, omega_a)
    delta_eff = delta - phi_dot / 2.0
    return _Point(omega, omega_dot, delta, omega_a, omega_a_dot, phi, phi_dot,
                  omega_eff, delta_eff, theta)


def _check_position(p: ModelParams, z: float) -> None:
    if abs(z) > p.half_length * (1.0 + 1e-12):
        raise ValueError(f"position z={z} outside the device [-L, L], L={p.half_length}")


def raw_schedule(p: ModelParams, z: float, side: int = 0) -> tuple[float, float]:
    """Raw sign-flip schedules (omega, delta) at position z."""
    _check_position(p, z)
    cf = _closed_form(p.omega0, p.delta0, p.half_length, z, side)
    return cf.omega, cf.delta


def mixing_angle(omega: float, delta: float) -> float:
    """Mixing angle theta with tan(theta) = omega/delta, theta in (0, pi)
    for omega > 0."""
    if omega == 0.0 and delta == 0.0:
        raise UndefinedAngleError("mixing angle undefined for omega = delta = 0")
    return math.atan2(omega, delta)


def cd_coupling(p: ModelParams, z: float, side: int = 0) -> float:
    """Counterdiabatic coupling omega_a = theta_dot / 2 at position z.

    Even in z and non-negative on both halves; vanishes as z -> 0.
    """
    _check_position(p, z)
    return _closed_form(p.omega0, p.delta0, p.half_length, z, side).omega_a


def effective_schedule(p: ModelParams, z: float, side: int = 0) -> SchedulePoint:
    """Full schedule point including the STA effective quantities."""
    _check_position(p, z)
    cf = _closed_form(p.omega0, p.delta0, p.half_length, z, side)
    return SchedulePoint(
        z=z,
        omega=cf.omega,
        delta=cf.delta,
        omega_a=cf.omega_a,
        phi=cf.phi,
        theta=cf.theta,
        omega_eff=cf.omega_eff,
        delta_eff=cf.delta_eff,
    )


def diagnostics(p: ModelParams, samples: int) -> Diagnostics:
    """Grid maxima of |theta_dot/2| / sqrt(omega^2 + delta^2) and
    |omega_a| / |omega| over [-L, L].

    The grid never evaluates the untagged midpoint: an exact z = 0 sample
    is replaced by one-sided evaluations on both sides.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    grid = np.linspace(-p.half_length, p.half_length, samples)
    points: list[_Point] = []
    for z in grid:
        if z == 0.0:
            points.append(_closed_form(p.omega0, p.delta0, p.half_length, 0.0, -1))
            points.append(_closed_form(p.omega0, p.delta0, p.half_length, 0.0, +1))
        else:
            points.append(_closed_form(p.omega0, p.delta0, p.half_length, float(z)))

    max_ad = 0.0
    max_cd = 0.0
    for pt in points:
        gap = math.hypot(pt.omega, pt.delta)
        if gap > 0.0:
            max_ad = max(max_ad, abs(pt.omega_a) / gap)
        if pt.omega > 0.0:
            max_cd = max(max_cd, abs(pt.omega_a) / pt.omega)
    return Diagnostics(
        max_adiabaticity_ratio=max_ad,
        max_cd_ratio=max_cd,
        bound_satisfied=max_cd <= 1.0 + 1e-12,
    )


def geometry_synthesis(point: SchedulePoint,
                       calib: GeometryCalibration) -> tuple[float, float]:
    """Map a schedule point to waveguide geometry.

    Returns (separation d in mm, width difference dW in um) using the
    exponential coupling-distance law ``omega_eff = A * exp(-gamma * d)``
    and the linear mismatch-width relation ``delta_eff = k * dW``.
    """
    if point.omega_eff == 0.0:
        raise CalibrationDomainError("omega_eff = 0 implies infinite separation")
    if point.omega_eff > calib.coupling_scale:
        raise CalibrationDomainError(
            f"omega_eff={point.omega_eff} exceeds the zero-separation coupling "
            f"A={calib.coupling_scale}"
        )
    separation = math.log(calib.coupling_scale / point.omega_eff) / calib.coupling_decay
    width_difference = point.delta_eff / calib.mismatch_per_width
    return separation, width_difference
