"""Single membrane memcapacitor: capacitance, double-well dynamics, bit encoding.

All quantities are dimensionless: displacement ``y`` in units of the
plate-to-midpoint gap, time ``tau = t * omega0 / (2 pi)`` and voltages in
``beta`` units. :func:`to_dimensionless` converts physical constants once at
the boundary. The right-hand sides accept numpy arrays as well as floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CollapseError, DomainError

FOUR_PI_SQ = 4.0 * math.pi**2


class LogicBit(enum.IntEnum):
    """Stored bit. ZERO is the up-bent membrane, ONE the down-bent one."""

    ZERO = 0
    ONE = 1
    UNSETTLED = 2

    def __str__(self):
        return {0: "0", 1: "1", 2: "?"}[int(self)]


@dataclass(frozen=True)
class PhysicalParams:
    """Device constants in SI units.

    Parameters
    ----------
    omega0 : float
        Natural angular frequency (rad/s).
    gamma : float
        Damping constant (1/s).
    m : float
        Membrane mass (kg).
    d : float
        Separation between bottom plate and membrane midpoint (m).
    z0 : float
        Equilibrium displacement (m), must be smaller than ``d``.
    C0 : float
        Capacitance at the midpoint, ``eps0 * S / d`` (F).
    R : float
        Series membrane resistance (Ohm), default 0.
    """

    omega0: float
    gamma: float
    m: float
    d: float
    z0: float
    C0: float
    R: float = 0.0

    def __post_init__(self):
        problems = [
            name for name in ("omega0", "gamma", "m", "d", "z0", "C0")
            if not getattr(self, name) > 0
        ]
        if problems:
            raise DomainError(f"must be strictly positive: {', '.join(problems)}")
        if not self.R >= 0:
            raise DomainError("R must be non-negative")
        if not self.z0 < self.d:
            raise DomainError("z0 must be smaller than d (equilibria would touch the plate)")


@dataclass(frozen=True)
class DeviceParams:
    """Dimensionless device constants.

    ``Gamma`` is the damping, ``y0`` the well position and ``rho`` the
    series resistance group ``omega0 * R * C0 / pi`` (0 disables the
    resistive model).
    """

    Gamma: float = 0.7
    y0: float = 0.2
    rho: float = 0.0

    def __post_init__(self):
        problems = []
        if not (self.Gamma > 0 and math.isfinite(self.Gamma)):
            problems.append(f"Gamma must be > 0 (got {self.Gamma})")
        if not (0 < self.y0 < 1):
            problems.append(f"y0 must lie in (0, 1) (got {self.y0})")
        if not (self.rho >= 0 and math.isfinite(self.rho)):
            problems.append(f"rho must be >= 0 (got {self.rho})")
        if problems:
            raise DomainError("; ".join(problems))

    @property
    def resistive(self) -> bool:
        return self.rho > 0


@dataclass(frozen=True)
class MembraneState:
    """Displacement ``y``, velocity ``v`` and, in resistive mode, charge ``u``.

    The charge is scaled so that the capacitor voltage is ``u * (1 + y)`` in
    beta units.
    """

    y: float
    v: float = 0.0
    u: float | None = None


def to_dimensionless(p: PhysicalParams) -> tuple[DeviceParams, float]:
    """Convert physical constants to :class:`DeviceParams` plus the volt-to-beta factor."""
    Gamma = 2 * math.pi * p.gamma / p.omega0
    y0 = p.z0 / p.d
    rho = p.omega0 * p.R * p.C0 / math.pi
    beta0 = 2 * math.pi / (p.omega0 * p.d) * math.sqrt(p.C0 / (2 * p.m))
    return DeviceParams(Gamma=Gamma, y0=y0, rho=rho), beta0


def _check_y(y):
    if not np.all(np.asarray(y) > -1.0):
        raise CollapseError(f"membrane collapsed onto the bottom plate (y={y})")


def capacitance(y: float) -> float:
    """Capacitance in units of C0."""
    _check_y(y)
    return 1.0 / (1.0 + y)


def potential_energy(y: float, p: DeviceParams) -> float:
    """Double-well elastic energy whose negative gradient is the restoring force."""
    return math.pi**2 * y**4 / p.y0**2 - 2 * math.pi**2 * y**2


def restoring_force(y: float, p: DeviceParams) -> float:
    return -FOUR_PI_SQ * y * ((y / p.y0) ** 2 - 1.0)


def rhs(s: MembraneState, beta_C: float, p: DeviceParams) -> tuple[float, float]:
    """Time derivatives ``(dy/dtau, dv/dtau)`` for device voltage ``beta_C``."""
    y, v = s.y, s.v
    _check_y(y)
    return v, restoring_force(y, p) - p.Gamma * v - (beta_C / (1.0 + y)) ** 2


def rhs_resistive(s: MembraneState, beta_src: float, p: DeviceParams) -> tuple[float, float, float]:
    """Derivatives ``(dy, dv, du)`` with the series resistance as a charge state.

    The capacitor sees ``beta_C = u (1 + y)``; the charge relaxes towards
    the source through the resistor, ``du/dtau = 2 (beta_src - beta_C) / rho``.
    """
    if not p.rho > 0:
        raise DomainError("rho = 0 has no charge dynamics; use rhs()")
    if s.u is None:
        raise DomainError("resistive state needs a charge u")
    _check_y(s.y)
    beta_C = s.u * (1.0 + s.y)
    dy, dv = rhs(s, beta_C, p)
    return dy, dv, 2.0 * (beta_src - beta_C) / p.rho


def effective_damping(y: float, beta_src: float, beta_C: float, p: DeviceParams) -> float:
    """Coefficient of dy/dtau in the first-order (in rho) resistive equation."""
    return p.Gamma + p.rho * beta_src * beta_C / (1.0 + y) ** 4


def rhs_resistive_expanded(
    s: MembraneState,
    beta_src: float,
    dbeta_C: float,
    p: DeviceParams,
    beta_C: float | None = None,
) -> tuple[float, float]:
    """Resistive dynamics expanded to first order in rho (rho**2 terms dropped).

    ``dbeta_C`` is the caller's estimate of the capacitor-voltage rate;
    ``beta_C`` defaults to ``beta_src``, its zeroth-order value. Used as an
    independent cross-check of :func:`rhs_resistive`.
    """
    y, v = s.y, s.v
    _check_y(y)
    if beta_C is None:
        beta_C = beta_src
    one = 1.0 + y
    return v, (
        restoring_force(y, p)
        - effective_damping(y, beta_src, beta_C, p) * v
        - (beta_src / one) ** 2
        + p.rho * beta_src * dbeta_C / one**3
    )


def init_state(bit: LogicBit, p: DeviceParams, resistive: bool | None = None) -> MembraneState:
    """Membrane at rest in the well encoding ``bit`` (uncharged in resistive mode)."""
    if bit == LogicBit.ZERO:
        y = p.y0
    elif bit == LogicBit.ONE:
        y = -p.y0
    else:
        raise DomainError("UNSETTLED is not a valid initial bit")
    if resistive is None:
        resistive = p.resistive
    return MembraneState(y=y, v=0.0, u=0.0 if resistive else None)


def binarize(
    s: MembraneState,
    p: DeviceParams,
    tol_y: float | None = None,
    tol_v: float = 1e-3,
) -> LogicBit:
    """Read the bit stored by a membrane, or UNSETTLED if it is not at rest in a well.

    ``tol_y`` defaults to a quarter of the well position.
    """
    _check_y(s.y)
    if tol_y is None:
        tol_y = 0.25 * p.y0
    if abs(s.v) > tol_v or abs(abs(s.y) - p.y0) > tol_y:
        return LogicBit.UNSETTLED
    return LogicBit.ONE if s.y < 0 else LogicBit.ZERO
