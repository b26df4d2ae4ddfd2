"""Command-line interface: ``memcap {simulate,truth-table,map,not-search}``.

Exit codes: 0 success, 1 invalid configuration, 2 simulation failure,
3 I/O error. Failures print a JSON report on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import export
from .circuit import Topology
from .config import RunConfig, dump_config, parse_config
from .errors import CollapseError, ConfigError, DomainError, SimulationError
from .logic import UNSETTLED_MARK, not_search, output_device, sweep_map, truth_table
from .simulator import PulseSpec, initial_circuit, integrate

EXIT_OK, EXIT_CONFIG, EXIT_SIMULATION, EXIT_IO = 0, 1, 2, 3

COMMANDS = ("simulate", "truth-table", "map", "not-search")


def _grid(text):
    parts = text.lower().replace("x", ",").split(",")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected N or N1xN2")
    return [int(p) for p in parts]


def _floats(text):
    try:
        return [float(p) for p in text.replace(":", ",").split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", type=Path, help="JSON configuration file")
    g.add_argument("--topology", choices=[t.value for t in Topology])
    g.add_argument("--beta1", type=float, help="amplitude of pulse 1")
    g.add_argument("--beta2", type=float, help="amplitude of pulse 2")
    g.add_argument("--pulse-width", type=float, help="pulse width T")
    g.add_argument("--tau-on", type=float, help="pulse start")
    g.add_argument("--gamma", type=float, help="dimensionless damping")
    g.add_argument("--y0", type=float, help="well position")
    g.add_argument("--rho", type=float, help="dimensionless series resistance")
    g.add_argument("--dtau", type=float, help="integration step")
    g.add_argument("--tau-end", type=float, help="observation time")
    g.add_argument("--record-every", type=int, help="trajectory decimation")
    g.add_argument("--grid", type=_grid, help="map grid size, N or N1xN2")
    g.add_argument("--range", type=_floats, dest="beta_range",
                   help="map amplitude range: lo,hi (both axes) or lo1,hi1,lo2,hi2")
    g.add_argument("--inputs", help="stored input bits for simulate, e.g. 1,0")
    g.add_argument("--beta", type=float, help="pulse amplitude for not-search")
    g.add_argument("--width-range", type=_floats, help="pulse-width range for not-search, lo,hi")
    g.add_argument("--samples", type=int, help="number of widths for not-search")
    g.add_argument("--tau-obs", type=float, help="observation time for not-search")
    g.add_argument("--workers", type=int, help="worker processes for map (default: all CPUs)")
    g.add_argument("--out", help="output directory")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any field by dotted path, e.g. grid.neighborhood=8")
    g.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration as JSON and exit")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="memcap", description="Membrane memcapacitor logic simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate one run, write a trajectory CSV")
    sub.add_parser("truth-table", parents=[common], help="all four input pairs, write JSON")
    sub.add_parser("map", parents=[common], help="operation map over (beta1, beta2), CSV + PGM")
    sub.add_parser("not-search", parents=[common], help="y1 - y2 versus pulse width, CSV")
    return parser


def overrides_from_args(args) -> dict:
    o = {}
    simple = {
        "topology": "topology", "beta1": "beta1", "beta2": "beta2",
        "pulse_width": "pulse_width", "tau_on": "tau_on", "gamma": "gamma", "y0": "y0",
        "rho": "rho", "dtau": "dtau", "tau_end": "tau_end", "record_every": "record_every",
        "inputs": "inputs", "beta": "not_beta", "width_range": "width_range",
        "samples": "n_widths", "tau_obs": "tau_obs", "workers": "workers", "out": "out",
    }
    for attr, key in simple.items():
        value = getattr(args, attr)
        if value is not None:
            o[key] = value
    if args.grid is not None:
        o["n1"], o["n2"] = args.grid
    if args.beta_range is not None:
        r = args.beta_range
        if len(r) == 2:
            o["beta1_range"] = o["beta2_range"] = r
        elif len(r) == 4:
            o["beta1_range"], o["beta2_range"] = r[:2], r[2:]
        else:
            raise ConfigError("--range: expected lo,hi or lo1,hi1,lo2,hi2")
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set {item!r}: expected KEY=VALUE")
        try:
            o[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            o[key.strip()] = value
    return o


def run_command(cmd: str, cfg: RunConfig) -> dict:
    """Execute one workflow and write its artifacts; returns a summary.

    Raises the library's errors (ConfigError, CollapseError, SimulationError,
    OSError); :func:`main` maps them to exit codes.
    """
    out = Path(cfg.output.out)
    out.mkdir(parents=True, exist_ok=True)
    conf = cfg.to_dict()
    params = cfg.device_params()
    topo = cfg.topo
    if cmd == "simulate":
        pulses = PulseSpec.overlapping(cfg.pulse.beta1, cfg.pulse.beta2,
                                       cfg.pulse.width, cfg.pulse.tau_on)
        cs0 = initial_circuit(cfg.input_bits(), topo, params)
        traj = integrate(cs0, pulses, topo, cfg.sim_config())
        path = export.write_trajectory_csv(traj, out / "trajectory.csv", conf)
        return {"command": cmd, "files": [str(path), str(export.sidecar_path(path))],
                "final_bits": [int(b) for b in traj.settled],
                "final_y": [s.y for s in traj.final.devices]}
    if cmd == "truth-table":
        if topo is Topology.SINGLE:
            raise ConfigError("topology: truth-table needs the reduced or triple circuit")
        result = truth_table(cfg.pulse.beta1, cfg.pulse.beta2, cfg.pulse.width, topo,
                             params, cfg.sim_config(record_every=0), cfg.pulse.tau_on)
        path = export.write_truth_table_json(result, out / "truth_table.json", conf)
        doc = result.to_dict()
        return {"command": cmd, "files": [str(path)], **doc["codes"], "names": doc["names"],
                "unsettled_devices": sum(c == UNSETTLED_MARK for c in result.codes)}
    if cmd == "map":
        if topo is Topology.SINGLE:
            raise ConfigError("topology: map needs the reduced or triple circuit")
        g = cfg.grid
        omap = sweep_map(g.beta1_range, g.beta2_range, g.n1, g.n2, cfg.pulse.width, topo,
                         params, cfg.sim_config(record_every=0), cfg.output.workers,
                         cfg.pulse.tau_on, g.neighborhood)
        omap.meta["config"] = conf
        files = [export.write_map_csv(omap, out / "map.csv", conf)]
        files.append(export.sidecar_path(files[0]))
        for d in range(topo.n_devices):
            files.append(export.write_map_pgm(omap, d, out / f"map_c{d + 1}.pgm", conf))
        dev = output_device(topo)
        return {"command": cmd, "files": [str(f) for f in files],
                "cells": int(g.n1 * g.n2),
                "unsettled_cells": int((omap.codes == UNSETTLED_MARK).any(axis=0).sum()),
                "output_codes": sorted(int(c) for c in np.unique(omap.codes[dev]))}
    if cmd == "not-search":
        n = cfg.not_search
        curve = not_search(n.beta, n.width_range, n.n_widths, n.tau_obs, params,
                           cfg.sim_config(record_every=0))
        path = export.write_not_curve_csv(curve, out / "not_curve.csv", conf)
        return {"command": cmd, "files": [str(path), str(export.sidecar_path(path))],
                "not_intervals": curve.not_intervals(),
                "failed_samples": int(np.isnan(curve.y_diff).sum())}
    raise ConfigError(f"unknown command {cmd!r}")


def _fail(code: int, kind: str, messages) -> int:
    if isinstance(messages, str):
        messages = [messages]
    print(json.dumps({"error": kind, "exit_code": code, "messages": list(messages)}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args.config, overrides_from_args(args))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "validation", exc.problems)
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK
    try:
        summary = run_command(args.command, cfg)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "validation", exc.problems)
    except DomainError as exc:
        return _fail(EXIT_CONFIG, "validation", str(exc))
    except (CollapseError, SimulationError) as exc:
        return _fail(EXIT_SIMULATION, "simulation", str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "io", f"{exc.filename or ''}: {exc.strerror or exc}")
    print(json.dumps(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
