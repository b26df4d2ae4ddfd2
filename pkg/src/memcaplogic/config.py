"""Run configuration for the command-line tool.

A configuration is a JSON object with the sections below; every field is
optional and falls back to the defaults of the three-device circuit study
(Gamma=0.7, y0=0.2, T=20, beta=(1, 4), rho=0). Precedence is
command-line overrides > file > defaults. The JSON schema lives next to this
module in ``config.schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path

from .circuit import Topology
from .device import DeviceParams
from .errors import ConfigError
from .simulator import SimConfig

SCHEMA_PATH = Path(__file__).with_name("config.schema.json")


@dataclass
class DeviceSection:
    gamma: float = 0.7
    y0: float = 0.2
    rho: float = 0.0


@dataclass
class PulseSection:
    beta1: float = 1.0
    beta2: float = 4.0
    width: float = 20.0
    tau_on: float = 0.0


@dataclass
class SimSection:
    dtau: float = 1e-3
    tau_end: float | None = None
    relax_extend: float = 20.0
    max_extensions: int = 3
    record_every: int = 10


@dataclass
class GridSection:
    beta1_range: tuple[float, float] = (0.0, 5.0)
    beta2_range: tuple[float, float] = (0.0, 5.0)
    n1: int = 101
    n2: int = 101
    neighborhood: int = 4


@dataclass
class NotSearchSection:
    beta: float = 2.8
    width_range: tuple[float, float] = (0.0, 20.0)
    n_widths: int = 200
    tau_obs: float = 40.0


@dataclass
class OutputSection:
    out: str = "out"
    workers: int | None = None


@dataclass
class RunConfig:
    topology: str = "triple"
    inputs: tuple[int, ...] | None = None
    device: DeviceSection = field(default_factory=DeviceSection)
    pulse: PulseSection = field(default_factory=PulseSection)
    sim: SimSection = field(default_factory=SimSection)
    grid: GridSection = field(default_factory=GridSection)
    not_search: NotSearchSection = field(default_factory=NotSearchSection)
    output: OutputSection = field(default_factory=OutputSection)

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self)))

    def device_params(self) -> DeviceParams:
        return DeviceParams(Gamma=self.device.gamma, y0=self.device.y0, rho=self.device.rho)

    def sim_config(self, record_every: int | None = None) -> SimConfig:
        s = self.sim
        return SimConfig(
            dtau=s.dtau, tau_end=s.tau_end, relax_extend=s.relax_extend,
            max_extensions=s.max_extensions,
            record_every=s.record_every if record_every is None else record_every,
        )

    @property
    def topo(self) -> Topology:
        return Topology.parse(self.topology)

    def input_bits(self) -> tuple[int, ...]:
        return self.inputs if self.inputs is not None else (0,) * self.topo.n_inputs


# flat names accepted on the command line
ALIASES = {
    "topology": "topology",
    "inputs": "inputs",
    "gamma": "device.gamma",
    "y0": "device.y0",
    "rho": "device.rho",
    "beta1": "pulse.beta1",
    "beta2": "pulse.beta2",
    "pulse_width": "pulse.width",
    "width": "pulse.width",
    "tau_on": "pulse.tau_on",
    "dtau": "sim.dtau",
    "tau_end": "sim.tau_end",
    "relax_extend": "sim.relax_extend",
    "max_extensions": "sim.max_extensions",
    "record_every": "sim.record_every",
    "n1": "grid.n1",
    "n2": "grid.n2",
    "beta1_range": "grid.beta1_range",
    "beta2_range": "grid.beta2_range",
    "neighborhood": "grid.neighborhood",
    "not_beta": "not_search.beta",
    "width_range": "not_search.width_range",
    "n_widths": "not_search.n_widths",
    "tau_obs": "not_search.tau_obs",
    "out": "output.out",
    "workers": "output.workers",
}

_PAIRS = {"beta1_range", "beta2_range", "width_range"}
_INTS = {"max_extensions", "record_every", "n1", "n2", "neighborhood", "n_widths", "workers"}


def _merge(target: dict, source: dict, prefix: str, problems: list):
    for key, value in source.items():
        where = f"{prefix}{key}"
        if key not in target:
            problems.append(f"{where}: unknown field")
        elif isinstance(target[key], dict):
            if isinstance(value, dict):
                _merge(target[key], value, where + ".", problems)
            else:
                problems.append(f"{where}: expected an object")
        else:
            target[key] = value


def _set_path(data: dict, dotted: str, value, problems: list):
    dotted = ALIASES.get(dotted.replace("-", "_"), dotted)
    *parents, leaf = dotted.split(".")
    node = data
    for part in parents:
        if not isinstance(node.get(part), dict):
            problems.append(f"{dotted}: unknown field")
            return
        node = node[part]
    if leaf not in node or isinstance(node[leaf], dict):
        problems.append(f"{dotted}: unknown field")
        return
    node[leaf] = value


def _coerce(cls, data: dict, prefix: str, problems: list):
    kwargs = {}
    for f in fields(cls):
        value = data[f.name]
        where = f"{prefix}{f.name}"
        default = f.default_factory() if callable(f.default_factory) else f.default
        if is_dataclass(default):
            kwargs[f.name] = _coerce(type(default), value, where + ".", problems)
            continue
        try:
            kwargs[f.name] = _coerce_value(f.name, value)
        except (TypeError, ValueError) as exc:
            problems.append(f"{where}: {exc}")
            kwargs[f.name] = default
    return cls(**kwargs)


def _coerce_value(name, value):
    if name == "topology":
        if not isinstance(value, str):
            raise TypeError("expected a string")
        return value.lower()
    if name == "out":
        if not isinstance(value, str):
            raise TypeError("expected a string")
        return value
    if name == "inputs" and value is not None:
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split()]
        return tuple(_as_int(v) for v in value)
    if name in _PAIRS:
        if isinstance(value, str):
            value = value.replace(":", ",").split(",")
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValueError("expected two numbers [low, high]")
        return tuple(_as_float(v) for v in value)
    if value is None and name in ("tau_end", "workers", "inputs"):
        return None
    if name in _INTS:
        return _as_int(value)
    return _as_float(value)


def _as_int(v):
    if isinstance(v, bool):
        raise TypeError("expected an integer")
    if isinstance(v, str):
        v = v.strip()
    try:
        f = float(v)
    except (TypeError, ValueError):
        raise TypeError(f"expected an integer, got {v!r}") from None
    if f != int(f):
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


def _as_float(v):
    if isinstance(v, bool):
        raise TypeError("expected a number")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise TypeError(f"expected a number, got {v!r}") from None


def validate(cfg: RunConfig) -> list[str]:
    """Every violated invariant, as messages (empty when valid)."""
    p = []
    if cfg.topology not in {t.value for t in Topology}:
        p.append(f"topology: must be one of single, reduced, triple (got {cfg.topology!r})")
    else:
        n_in = cfg.topo.n_inputs
        if cfg.inputs is not None and (
                len(cfg.inputs) != n_in or any(b not in (0, 1) for b in cfg.inputs)):
            p.append(f"inputs: need {n_in} bits, each 0 or 1 (got {list(cfg.inputs)})")
    d = cfg.device
    if not d.gamma > 0:
        p.append("device.gamma: must be > 0")
    if not 0 < d.y0 < 1:
        p.append("device.y0: must lie in (0, 1)")
    if not d.rho >= 0:
        p.append("device.rho: must be >= 0")
    u = cfg.pulse
    if not (u.beta1 >= 0 and u.beta2 >= 0):
        p.append("pulse.beta1/beta2: must be >= 0")
    if not u.width > 0:
        p.append("pulse.width: must be > 0")
    if not u.tau_on >= 0:
        p.append("pulse.tau_on: must be >= 0")
    s = cfg.sim
    if not s.dtau > 0:
        p.append("sim.dtau: must be > 0")
    if s.tau_end is not None and not s.tau_end >= u.tau_on + u.width:
        p.append("sim.tau_end: must not precede the end of the pulse")
    if not s.relax_extend > 0:
        p.append("sim.relax_extend: must be > 0")
    if s.max_extensions < 0:
        p.append("sim.max_extensions: must be >= 0")
    if s.record_every < 0:
        p.append("sim.record_every: must be >= 0")
    g = cfg.grid
    for name in ("beta1_range", "beta2_range"):
        lo, hi = getattr(g, name)
        if not 0 <= lo <= hi:
            p.append(f"grid.{name}: need 0 <= low <= high")
    if g.n1 < 1 or g.n2 < 1:
        p.append("grid.n1/n2: must be >= 1")
    if g.neighborhood not in (4, 8):
        p.append("grid.neighborhood: must be 4 or 8")
    n = cfg.not_search
    lo, hi = n.width_range
    if not 0 <= lo <= hi:
        p.append("not_search.width_range: need 0 <= low <= high")
    if n.n_widths < 1:
        p.append("not_search.n_widths: must be >= 1")
    if not n.beta >= 0:
        p.append("not_search.beta: must be >= 0")
    if not n.tau_obs >= hi:
        p.append("not_search.tau_obs: must not precede the longest pulse")
    if cfg.output.workers is not None and cfg.output.workers < 1:
        p.append("output.workers: must be >= 1")
    return p


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Resolve a configuration from an optional JSON file and overrides.

    ``overrides`` maps dotted paths (``"device.gamma"``) or flat aliases
    (``"gamma"``) to values.

    Raises
    ------
    ConfigError
        Listing every parse or validation problem.
    """
    data = RunConfig().to_dict()
    problems: list[str] = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
        try:
            loaded = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        _merge(data, loaded, "", problems)
    for key, value in (overrides or {}).items():
        _set_path(data, key, value, problems)
    cfg = _coerce(RunConfig, data, "", problems)
    problems += validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"
