"""Kirchhoff coupling of one, two or three memcapacitors driven by two sources.

Device voltages follow from charge conservation at the floating node, with
capacitances ``c_i = s_i / (1 + y_i)`` in units of the common C0 (``s_i`` is
an optional per-device C0 ratio, 1 by default). Voltage signs are taken as
given by the node equations; the electrostatic force only sees ``beta_C**2``.

The divider functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .device import DeviceParams, MembraneState, rhs, rhs_resistive
from .errors import CollapseError


class Topology(enum.Enum):
    """Circuit layouts.

    SINGLE
        one device driven directly by source 1.
    REDUCED
        two devices in series between sources 1 and 2 (floating middle node).
    TRIPLE
        C1 from source 1 and C2 from source 2 meet at a node, C3 runs from
        that node to ground. C1, C2 hold the inputs, C3 the output.
    """

    SINGLE = "single"
    REDUCED = "reduced"
    TRIPLE = "triple"

    @property
    def n_devices(self) -> int:
        return {"single": 1, "reduced": 2, "triple": 3}[self.value]

    @property
    def n_inputs(self) -> int:
        return 1 if self is Topology.SINGLE else 2

    @property
    def code(self) -> int:
        """Integer tag understood by the integration kernel."""
        return {"single": 0, "reduced": 1, "triple": 2}[self.value]

    @classmethod
    def parse(cls, value) -> "Topology":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass
class CircuitState:
    """Ordered device states with their parameters.

    ``params`` may be a single :class:`DeviceParams` shared by every device
    or one per device; ``scales`` are optional per-device C0 ratios.
    """

    devices: list[MembraneState]
    params: list[DeviceParams] | DeviceParams = field(default_factory=DeviceParams)
    scales: tuple[float, ...] | None = None

    def __post_init__(self):
        self.devices = list(self.devices)
        if isinstance(self.params, DeviceParams):
            self.params = [self.params] * len(self.devices)
        else:
            self.params = list(self.params)
        if len(self.params) != len(self.devices):
            raise ValueError("need one DeviceParams per device")
        if self.scales is not None:
            self.scales = tuple(float(s) for s in self.scales)
            if len(self.scales) != len(self.devices) or min(self.scales) <= 0:
                raise ValueError("scales must be positive, one per device")
        if len({p.resistive for p in self.params}) > 1:
            raise ValueError("either every device has a series resistance or none does")
        for i, s in enumerate(self.devices):
            if not s.y > -1:
                raise CollapseError(f"device {i + 1} starts collapsed (y={s.y})", device=i)

    @property
    def resistive(self) -> bool:
        return self.params[0].resistive


def _caps(ys, scales):
    out = []
    for i, y in enumerate(ys):
        if np.any(np.asarray(y) <= -1):
            raise CollapseError(f"device {i + 1} collapsed (y <= -1)", device=i)
        c = 1.0 / (1.0 + y)
        out.append(c if scales is None else scales[i] * c)
    return out


def divider_triple(y1, y2, y3, b1, b2, scales=None):
    """Voltages across C1, C2, C3 of the three-device circuit."""
    c1, c2, c3 = _caps((y1, y2, y3), scales)
    total = c1 + c2 + c3
    return (
        (c2 * b2 - (c2 + c3) * b1) / total,
        (c1 * b1 - (c1 + c3) * b2) / total,
        (c1 * b1 + c2 * b2) / total,
    )


def divider_reduced(y1, y2, b1, b2, scales=None):
    """Voltages across the two series devices of the reduced circuit."""
    c1, c2 = _caps((y1, y2), scales)
    total = c1 + c2
    return c2 * (b2 - b1) / total, c1 * (b1 - b2) / total


def device_sources(ys, b1, b2, topo: Topology, scales=None):
    """Divider voltage seen by each device (before any series resistance)."""
    topo = Topology.parse(topo)
    if len(ys) != topo.n_devices:
        raise ValueError(f"{topo.value} topology has {topo.n_devices} devices, got {len(ys)}")
    if topo is Topology.SINGLE:
        _caps(ys, scales)
        return (b1,)
    if topo is Topology.REDUCED:
        return divider_reduced(*ys, b1, b2, scales=scales)
    return divider_triple(*ys, b1, b2, scales=scales)


def device_voltages(cs: CircuitState, b1, b2, topo: Topology):
    """Voltage across each capacitor, including the resistive drop when present."""
    srcs = device_sources([d.y for d in cs.devices], b1, b2, topo, cs.scales)
    out = []
    for s, p, src in zip(cs.devices, cs.params, srcs):
        out.append(s.u * (1.0 + s.y) if p.resistive else src)
    return tuple(out)


def coupled_rhs(cs: CircuitState, b1: float, b2: float, topo: Topology) -> list[tuple]:
    """Per-device derivatives for instantaneous source values ``b1``, ``b2``.

    Resistance-free devices get ``(dy, dv)``; resistive devices ``(dy, dv, du)``
    with their divider voltage acting as the source behind the resistor.
    """
    topo = Topology.parse(topo)
    srcs = device_sources([d.y for d in cs.devices], b1, b2, topo, cs.scales)
    out = []
    for i, (s, p, src) in enumerate(zip(cs.devices, cs.params, srcs)):
        try:
            out.append(rhs_resistive(s, src, p) if p.resistive else rhs(s, src, p))
        except CollapseError as exc:
            raise CollapseError(f"device {i + 1}: {exc}", device=i) from exc
    return out
