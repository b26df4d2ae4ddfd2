"""Logic operations realised by memcapacitor circuits.

A device's operation is identified by a code: its final bit for the input
pairs (C1, C2) = (0,0), (0,1), (1,0), (1,1), weighted 1, 2, 4, 8 and summed.
Sweeping the pulse amplitudes gives operation maps.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import Topology
from .device import DeviceParams, LogicBit
from .errors import CollapseError, DomainError, SimulationError
from .simulator import PulseSpec, SimConfig, initial_circuit, run_to, single_shot

logger = logging.getLogger(__name__)

INPUTS = ((0, 0), (0, 1), (1, 0), (1, 1))
WEIGHTS = (1, 2, 4, 8)
UNSETTLED_MARK = 16

OPERATION_NAMES = (
    "set to 0",
    "NOR",
    "NOT(IMP2)",
    "NOT C1",
    "NOT(IMP1)",
    "NOT C2",
    "XOR",
    "NAND",
    "AND",
    "NOT(XOR)",
    "copy C2",
    "IMP1",
    "copy C1",
    "IMP2",
    "OR",
    "set to 1",
)


def compute_code(finals) -> int:
    """Weighted sum of the four final bits, or UNSETTLED_MARK if any is unsettled."""
    finals = [LogicBit(b) for b in finals]
    if len(finals) != 4:
        raise DomainError("a code needs exactly four final states")
    if LogicBit.UNSETTLED in finals:
        return UNSETTLED_MARK
    return sum(w * int(b) for w, b in zip(WEIGHTS, finals))


def code_name(code: int) -> str:
    if code == UNSETTLED_MARK:
        return "unsettled"
    if not 0 <= code < 16:
        raise DomainError(f"operation code out of range: {code}")
    return OPERATION_NAMES[code]


def swap_inputs(code: int) -> int:
    """Code of the same operation with C1 and C2 exchanged (weights 2 <-> 4)."""
    if code == UNSETTLED_MARK:
        return code
    return (code & 0b1001) | ((code & 0b0010) << 1) | ((code & 0b0100) >> 1)


@dataclass
class TruthTableResult:
    """Final bits of every device for the four input pairs.

    ``finals[i][d]`` is device ``d`` after input pair ``INPUTS[i]``.
    """

    finals: list[list[LogicBit]]
    codes: list[int]
    names: list[str]
    beta1: float
    beta2: float
    width: float
    topology: Topology
    params: DeviceParams

    @classmethod
    def from_finals(cls, finals, **meta) -> "TruthTableResult":
        n_dev = len(finals[0])
        codes = [compute_code([row[d] for row in finals]) for d in range(n_dev)]
        return cls(finals, codes, [code_name(c) for c in codes], **meta)

    def to_dict(self) -> dict:
        labels = [f"c{d + 1}" for d in range(len(self.codes))]
        return {
            "inputs": [list(p) for p in INPUTS],
            "finals": {lab: [int(row[d]) for row in self.finals] for d, lab in enumerate(labels)},
            "codes": {f"code_{lab}": c for lab, c in zip(labels, self.codes)},
            "names": {lab: n for lab, n in zip(labels, self.names)},
            "params": {
                "beta1": self.beta1,
                "beta2": self.beta2,
                "pulse_width": self.width,
                "topology": self.topology.value,
                **asdict(self.params),
            },
        }


def truth_table(beta1: float, beta2: float, width: float = 20.0, topo=Topology.TRIPLE,
                params: DeviceParams | None = None, cfg: SimConfig | None = None,
                tau_on: float = 0.0) -> TruthTableResult:
    """Run the circuit for all four input pairs under fully overlapping pulses.

    A run that collapses or blows up marks every device UNSETTLED for that
    input pair instead of raising.
    """
    topo = Topology.parse(topo)
    if topo is Topology.SINGLE:
        raise DomainError("truth tables need a two-input topology")
    params = params or DeviceParams()
    cfg = cfg or SimConfig()
    pulses = PulseSpec.overlapping(beta1, beta2, width, tau_on)
    finals = []
    for bits in INPUTS:
        try:
            finals.append(single_shot(bits, pulses, topo, cfg, params))
        except (CollapseError, SimulationError) as exc:
            logger.warning("beta=(%g, %g) inputs %s: %s", beta1, beta2, bits, exc)
            finals.append([LogicBit.UNSETTLED] * topo.n_devices)
    return TruthTableResult.from_finals(
        finals, beta1=beta1, beta2=beta2, width=width, topology=topo, params=params)


@dataclass
class OperationMap:
    """Operation codes on a (beta1, beta2) grid.

    ``codes[d, i, j]`` is the code of device ``d`` at
    ``(beta1_axis[i], beta2_axis[j])``.
    """

    beta1_axis: np.ndarray
    beta2_axis: np.ndarray
    codes: np.ndarray
    sensitivity: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def topology(self) -> Topology:
        return Topology.parse(self.meta["topology"])

    def output_device(self) -> int:
        return output_device(self.topology)


def output_device(topo) -> int:
    """Index of the device whose code the maps focus on: C3, or C1 for the reduced circuit."""
    return 2 if Topology.parse(topo) is Topology.TRIPLE else 0


def _cell(args):
    beta1, beta2, width, topo, params, cfg, tau_on = args
    return truth_table(beta1, beta2, width, topo, params, cfg, tau_on).codes


def sweep_map(beta1_range=(0.0, 5.0), beta2_range=(0.0, 5.0), n1: int = 101, n2: int = 101,
              width: float = 20.0, topo=Topology.TRIPLE, params: DeviceParams | None = None,
              cfg: SimConfig | None = None, workers: int | None = None, tau_on: float = 0.0,
              neighborhood: int = 4) -> OperationMap:
    """Truth table at every grid point; cells run in a process pool.

    Results are placed by cell index, so the map does not depend on
    ``workers`` (default: all available CPUs).
    """
    topo = Topology.parse(topo)
    if n1 < 1 or n2 < 1:
        raise DomainError("grid sizes must be positive")
    for lo, hi in (beta1_range, beta2_range):
        if not 0 <= lo <= hi:
            raise DomainError(f"invalid amplitude range ({lo}, {hi})")
    params = params or DeviceParams()
    cfg = cfg or SimConfig()
    ax1 = np.linspace(*beta1_range, n1)
    ax2 = np.linspace(*beta2_range, n2)
    jobs = [(float(b1), float(b2), width, topo, params, cfg, tau_on)
            for b1, b2 in itertools.product(ax1, ax2)]
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        results = [_cell(j) for j in jobs]
    else:
        chunk = max(1, len(jobs) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, jobs, chunksize=chunk))
    codes = np.array(results, dtype=np.int16).T.reshape(topo.n_devices, n1, n2)
    meta = {
        "topology": topo.value,
        "params": asdict(params),
        "pulse_width": width,
        "tau_on": tau_on,
        "sim": asdict(cfg),
        "beta1_range": list(beta1_range),
        "beta2_range": list(beta2_range),
    }
    omap = OperationMap(ax1, ax2, codes, np.zeros((n1, n2), dtype=bool), meta)
    omap.sensitivity = sensitivity_flags(omap, neighborhood=neighborhood)
    return omap


def sensitivity_flags(omap: OperationMap, device: int | None = None,
                      neighborhood: int = 4) -> np.ndarray:
    """Flag cells whose code differs from any neighbour's (4- or 8-neighbourhood)."""
    if neighborhood not in (4, 8):
        raise DomainError("neighborhood must be 4 or 8")
    if device is None:
        device = omap.output_device()
    g = omap.codes[device].astype(int)
    n1, n2 = g.shape
    padded = np.pad(g, 1, constant_values=-1)
    flags = np.zeros(g.shape, dtype=bool)
    for di, dj in _NEIGHBOURS[neighborhood]:
        nb = padded[1 + di:1 + di + n1, 1 + dj:1 + dj + n2]
        flags |= (nb >= 0) & (nb != g)
    return flags


_NEIGHBOURS = {
    4: [(-1, 0), (1, 0), (0, -1), (0, 1)],
    8: [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)],
}


def flagged_fraction(omap: OperationMap, beta1_window, beta2_window, flags=None) -> float:
    """Fraction of sensitivity-flagged cells inside a (closed) amplitude window."""
    flags = omap.sensitivity if flags is None else flags
    sel1 = (omap.beta1_axis >= beta1_window[0] - 1e-12) & (omap.beta1_axis <= beta1_window[1] + 1e-12)
    sel2 = (omap.beta2_axis >= beta2_window[0] - 1e-12) & (omap.beta2_axis <= beta2_window[1] + 1e-12)
    window = flags[np.ix_(sel1, sel2)]
    return float(window.mean()) if window.size else 0.0


@dataclass
class NotCurve:
    """Final ``y1 - y2`` of two single-device runs (started in '0' and '1') versus pulse width."""

    widths: np.ndarray
    y_diff: np.ndarray
    beta: float
    tau_obs: float
    params: DeviceParams

    def not_mask(self, tol: float = 0.02) -> np.ndarray:
        return np.abs(self.y_diff + 2 * self.params.y0) <= tol

    def not_intervals(self, tol: float = 0.02) -> list[tuple[float, float]]:
        """Maximal runs of consecutive samples where both bits flip."""
        mask = self.not_mask(tol)
        out = []
        start = None
        for i, hit in enumerate(mask):
            if hit and start is None:
                start = i
            if start is not None and (not hit or i == len(mask) - 1):
                end = i if hit else i - 1
                out.append((float(self.widths[start]), float(self.widths[end])))
                start = None
        return out


def not_search(beta: float = 2.8, width_range=(0.0, 20.0), n_widths: int = 200,
               tau_obs: float = 40.0, params: DeviceParams | None = None,
               cfg: SimConfig | None = None) -> NotCurve:
    """Scan the pulse width for a single device and record ``y1 - y2`` at ``tau_obs``.

    Failed runs are stored as NaN.
    """
    params = params or DeviceParams()
    cfg = cfg or SimConfig()
    if tau_obs < max(width_range):
        raise DomainError("tau_obs must not precede the end of the longest pulse")
    widths = np.linspace(*width_range, n_widths)
    diff = np.full(n_widths, np.nan)
    starts = [initial_circuit((LogicBit.ZERO,), Topology.SINGLE, params),
              initial_circuit((LogicBit.ONE,), Topology.SINGLE, params)]
    for k, width in enumerate(widths):
        pulse = PulseSpec(beta, 0.0, float(width)) if width > 0 and beta > 0 else None
        try:
            y1, y2 = (run_to(cs, pulse, Topology.SINGLE, tau_obs, cfg.dtau).devices[0].y
                      for cs in starts)
        except (CollapseError, SimulationError) as exc:
            logger.warning("not_search width=%g: %s", width, exc)
            continue
        diff[k] = y1 - y2
    return NotCurve(widths, diff, beta, tau_obs, params)
