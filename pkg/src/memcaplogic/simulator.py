"""Square-pulse driving and fixed-step RK4 integration of memcapacitor circuits.

The time axis is cut at every pulse edge; each constant-drive segment is
integrated with steps of ``dtau`` and a shortened final step so that a step
boundary falls exactly on the edge. The inner loop runs in
:mod:`memcaplogic.kernel`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernel
from .circuit import CircuitState, Topology, device_sources
from .device import DeviceParams, LogicBit, MembraneState, binarize, init_state
from .errors import CollapseError, DomainError, SimulationError

logger = logging.getLogger(__name__)

RELAX_WINDOW = 20.0
RESISTIVE_STEP_FACTOR = 0.5


@dataclass(frozen=True)
class PulseSpec:
    """Square pulse of amplitude ``beta`` on the half-open window [tau_on, tau_off)."""

    beta: float
    tau_on: float = 0.0
    tau_off: float = 20.0

    def __post_init__(self):
        if not (self.tau_off > self.tau_on >= 0):
            raise DomainError(f"need tau_off > tau_on >= 0 (got {self.tau_on}, {self.tau_off})")
        if not self.beta >= 0:
            raise DomainError(f"pulse amplitude must be >= 0 (got {self.beta})")

    @property
    def width(self) -> float:
        return self.tau_off - self.tau_on

    @classmethod
    def overlapping(cls, beta1: float, beta2: float, width: float, tau_on: float = 0.0):
        """The pair of fully overlapping pulses used for logic operations."""
        return cls(beta1, tau_on, tau_on + width), cls(beta2, tau_on, tau_on + width)


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    ``tau_end=None`` observes ``RELAX_WINDOW`` after the last pulse edge.
    ``record_every=0`` keeps only the initial and final samples. For
    resistive circuits the step is capped at ``0.5 * rho`` because the charge
    equation becomes stiff for small ``rho``.
    """

    dtau: float = 1e-3
    tau_end: float | None = None
    relax_extend: float = 20.0
    max_extensions: int = 3
    record_every: int = 10
    tol_v: float = 1e-3
    tol_y: float | None = None

    def __post_init__(self):
        problems = []
        if not self.dtau > 0:
            problems.append("dtau must be > 0")
        if self.tau_end is not None and not self.tau_end > 0:
            problems.append("tau_end must be > 0")
        if not self.relax_extend > 0:
            problems.append("relax_extend must be > 0")
        if self.max_extensions < 0 or self.record_every < 0:
            problems.append("max_extensions and record_every must be >= 0")
        if problems:
            raise DomainError("; ".join(problems))

    def horizon(self, pulses) -> float:
        if self.tau_end is not None:
            return self.tau_end
        edges = [p.tau_off for p in pulses if p is not None]
        return max(edges, default=0.0) + RELAX_WINDOW


@dataclass
class Trajectory:
    """Sampled run of a circuit.

    ``states`` has shape (samples, devices, 2) holding (y, v);
    ``device_voltages`` has shape (samples, devices). ``charges`` is only
    set for resistive circuits.
    """

    times: np.ndarray
    states: np.ndarray
    device_voltages: np.ndarray
    final: CircuitState
    settled: list[LogicBit]
    topology: Topology
    charges: np.ndarray | None = None
    extensions: int = 0


def pulse_value(p: PulseSpec | None, tau: float) -> float:
    if p is None:
        return 0.0
    return p.beta if p.tau_on <= tau < p.tau_off else 0.0


def _normalize_pulses(pulses, topo: Topology):
    if pulses is None:
        pulses = (None, None)
    elif isinstance(pulses, PulseSpec):
        pulses = (pulses, None)
    pulses = tuple(pulses) + (None,) * (2 - len(pulses))
    if topo is Topology.SINGLE:
        pulses = (pulses[0], None)
    return pulses


def _pack(cs: CircuitState):
    m = 3 if cs.resistive else 2
    state = np.empty(m * len(cs.devices))
    coef = np.empty(4 * len(cs.devices))
    for i, (s, p) in enumerate(zip(cs.devices, cs.params)):
        state[m * i] = s.y
        state[m * i + 1] = s.v
        if m == 3:
            state[m * i + 2] = 0.0 if s.u is None else s.u
        coef[4 * i: 4 * i + 4] = (p.Gamma, p.y0 * p.y0, 1.0 / (p.y0 * p.y0),
                                  2.0 / p.rho if p.resistive else 0.0)
    scale = np.array(cs.scales if cs.scales is not None else [1.0] * len(cs.devices))
    return state, coef, scale, m


def _unpack(state, cs: CircuitState, m: int) -> CircuitState:
    devices = [
        MembraneState(float(state[m * i]), float(state[m * i + 1]),
                      float(state[m * i + 2]) if m == 3 else None)
        for i in range(len(cs.devices))
    ]
    return CircuitState(devices, cs.params, cs.scales)


def _split(a: float, b: float, dtau: float):
    """Step size, full-step count and trailing partial step covering [a, b]."""
    q = (b - a) / dtau
    n = round(q)
    if n >= 1 and abs(q - n) < 1e-9:
        return (b - a) / n, n, 0.0
    n = math.floor(q)
    return dtau, n, (b - a) - n * dtau


class _Runner:
    """Drives the kernel segment by segment and collects samples."""

    def __init__(self, cs: CircuitState, topo: Topology, dtau: float, stride: int):
        self.cs0 = cs
        self.topo = topo
        self.stride = stride
        self.state, self.coef, self.scale, self.m = _pack(cs)
        if self.m == 3:
            # the charge relaxes with rate 2(1+y)/rho; keep explicit RK4 stable for 1+y < 2.7
            dtau = min(dtau, RESISTIVE_STEP_FACTOR * min(p.rho for p in cs.params))
        self.dtau = dtau
        self.tau = 0.0
        self.times = [0.0]
        self.samples = [self.state.copy()]

    def segment(self, b: float, b1: float, b2: float):
        a = self.tau
        if b <= a:
            return
        h, n_full, h_last = _split(a, b, self.dtau)
        total = n_full + (1 if h_last > 0 else 0)
        if self.stride > 0:
            rec = np.empty((total // self.stride + 1, self.state.size))
        else:
            rec = np.empty((0, self.state.size))
        nrec, status, step, dev = kernel.run_segment(
            self.state, len(self.cs0.devices), self.topo.code, self.coef, self.scale,
            float(b1), float(b2), h, n_full, h_last, self.stride, rec)
        if status:
            tau = min(a + step * h, b)
            cls, what = (CollapseError, "collapsed onto the bottom plate") if status == 1 \
                else (SimulationError, "reached a non-finite state")
            raise cls(f"device {dev + 1} {what} at tau={tau:.6g}", device=dev, tau=tau)
        if self.stride > 0:
            ks = [k for k in range(1, total + 1) if k % self.stride == 0 or k == total]
            self.times.extend(b if k == total else a + k * h for k in ks)
            self.samples.extend(rec[:nrec])
        self.tau = b

    def finish(self):
        if self.times[-1] != self.tau:
            self.times.append(self.tau)
            self.samples.append(self.state.copy())
        return _unpack(self.state, self.cs0, self.m)


def _drive_segments(pulses, tau_end):
    edges = {0.0, tau_end}
    for p in pulses:
        if p is None:
            continue
        if p.tau_off > tau_end:
            raise DomainError(f"pulse edge {p.tau_off} lies beyond tau_end={tau_end}")
        edges.update((p.tau_on, p.tau_off))
    edges = sorted(edges)
    return [(b, pulse_value(pulses[0], a), pulse_value(pulses[1], a))
            for a, b in zip(edges[:-1], edges[1:])]


def _settle(cs: CircuitState, cfg: SimConfig) -> list[LogicBit]:
    return [binarize(s, p, cfg.tol_y, cfg.tol_v)
            for s, p in zip(cs.devices, cs.params)]


def run_to(cs0: CircuitState, pulses, topo, tau_end: float, dtau: float = 1e-3) -> CircuitState:
    """Integrate up to ``tau_end`` and return the state there (no settling logic)."""
    topo = Topology.parse(topo)
    pulses = _normalize_pulses(pulses, topo)
    runner = _Runner(cs0, topo, dtau, 0)
    for b, b1, b2 in _drive_segments(pulses, tau_end):
        runner.segment(b, b1, b2)
    return runner.finish()


def integrate(cs0: CircuitState, pulses, topo, cfg: SimConfig | None = None) -> Trajectory:
    """Integrate a circuit under (up to) two square pulses.

    After the observation horizon any device that has not settled in a well
    gets up to ``cfg.max_extensions`` further zero-drive windows of
    ``cfg.relax_extend``; devices still moving are reported UNSETTLED.

    Raises
    ------
    CollapseError
        A membrane reached the bottom plate.
    SimulationError
        The state became non-finite.
    """
    cfg = cfg or SimConfig()
    topo = Topology.parse(topo)
    if len(cs0.devices) != topo.n_devices:
        raise DomainError(f"{topo.value} topology needs {topo.n_devices} devices")
    pulses = _normalize_pulses(pulses, topo)
    tau_end = cfg.horizon(pulses)

    runner = _Runner(cs0, topo, cfg.dtau, cfg.record_every)
    for b, b1, b2 in _drive_segments(pulses, tau_end):
        runner.segment(b, b1, b2)
    final = _unpack(runner.state, cs0, runner.m)
    settled = _settle(final, cfg)
    extensions = 0
    while LogicBit.UNSETTLED in settled and extensions < cfg.max_extensions:
        extensions += 1
        runner.segment(runner.tau + cfg.relax_extend, 0.0, 0.0)
        final = _unpack(runner.state, cs0, runner.m)
        settled = _settle(final, cfg)
    runner.finish()
    if LogicBit.UNSETTLED in settled:
        logger.debug("devices still unsettled at tau=%g", runner.tau)
    return _assemble(runner, pulses, final, settled, extensions)


def _assemble(runner: _Runner, pulses, final, settled, extensions) -> Trajectory:
    m = runner.m
    n_dev = len(final.devices)
    raw = np.array(runner.samples)
    times = np.array(runner.times)
    ys = [raw[:, m * i] for i in range(n_dev)]
    b1 = np.array([pulse_value(pulses[0], t) for t in times])
    b2 = np.array([pulse_value(pulses[1], t) for t in times])
    srcs = device_sources(ys, b1, b2, runner.topo, final.scales)
    if m == 3:
        charges = np.stack([raw[:, m * i + 2] for i in range(n_dev)], axis=1)
        volts = charges * (1.0 + np.stack(ys, axis=1))
    else:
        charges = None
        volts = np.stack([np.broadcast_to(s, times.shape) for s in srcs], axis=1)
    states = np.stack([np.stack([raw[:, m * i], raw[:, m * i + 1]], axis=1)
                       for i in range(n_dev)], axis=1)
    return Trajectory(times, states, volts, final, settled, runner.topo, charges, extensions)


def initial_circuit(bits_in, topo, params: DeviceParams | list[DeviceParams],
                    scales=None) -> CircuitState:
    """Circuit with inputs stored in C1 (and C2); the output C3 starts at ZERO."""
    topo = Topology.parse(topo)
    bits = [LogicBit(b) for b in bits_in]
    if len(bits) != topo.n_inputs:
        raise DomainError(f"{topo.value} topology takes {topo.n_inputs} input bits, got {len(bits)}")
    if topo is Topology.TRIPLE:
        bits.append(LogicBit.ZERO)
    if isinstance(params, DeviceParams):
        params = [params] * len(bits)
    return CircuitState([init_state(b, p) for b, p in zip(bits, params)], params, scales)


def single_shot(bits_in, pulses, topo, cfg: SimConfig | None = None,
                params: DeviceParams | list[DeviceParams] | None = None,
                scales=None) -> list[LogicBit]:
    """Store ``bits_in``, apply the pulses and read back every device."""
    cs0 = initial_circuit(bits_in, topo, params or DeviceParams(), scales)
    cfg = cfg or SimConfig()
    if cfg.record_every:
        cfg = replace(cfg, record_every=0)
    return integrate(cs0, pulses, topo, cfg).settled
