"""Compare the compiled and pure-Python RK4 kernels.

Times one three-device run of the golden drive (beta=(1, 4), T=20,
observed to tau=40, 40k steps) per backend and a full truth table with the
compiled one.

    python3 benchmarks/bench_kernel.py [--repeat N] [--dtau DT]
"""

import argparse
import time

import numpy as np

from memcaplogic import kernel
from memcaplogic.circuit import Topology
from memcaplogic.device import DeviceParams
from memcaplogic.logic import truth_table
from memcaplogic.simulator import PulseSpec, SimConfig, initial_circuit, integrate


def one_run(dtau):
    cs = initial_circuit((0, 1), Topology.TRIPLE, DeviceParams())
    cfg = SimConfig(dtau=dtau, record_every=0, max_extensions=0)
    return integrate(cs, PulseSpec.overlapping(1.0, 4.0, 20.0), Topology.TRIPLE, cfg)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--dtau", type=float, default=1e-3)
    args = ap.parse_args(argv)

    results = {}
    finals = {}
    for name in kernel.available_backends():
        prev = kernel.use_backend(name)
        try:
            reps = args.repeat if name == "cython" else 1
            results[name] = best_of(lambda: one_run(args.dtau), reps)
            finals[name] = [d.y for d in one_run(args.dtau).final.devices]
        finally:
            kernel.use_backend(prev)

    steps = round(40.0 / args.dtau)
    print(f"{'backend':<8} {'run [s]':>10} {'us/step':>10}")
    for name, t in results.items():
        print(f"{name:<8} {t:>10.4f} {1e6 * t / steps:>10.3f}")
    if len(results) == 2:
        print(f"speedup  {results['python'] / results['cython']:.0f}x")
        same = np.array_equal(finals["cython"], finals["python"])
        print(f"identical final states: {same}")
        t = best_of(lambda: truth_table(1.0, 4.0), args.repeat)
        print(f"truth table (4 runs, compiled): {t:.4f} s")


if __name__ == "__main__":
    main()
