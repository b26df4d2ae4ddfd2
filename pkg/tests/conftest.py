import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from memcaplogic.circuit import Topology  # noqa: E402
from memcaplogic.device import DeviceParams  # noqa: E402
from memcaplogic.logic import sweep_map  # noqa: E402

COARSE = dict(beta1_range=(0.0, 5.0), beta2_range=(0.0, 5.0), n1=26, n2=26, width=20.0)

_maps = {}


def coarse_map(topo=Topology.TRIPLE, **params):
    """26x26 map over [0, 5]^2 with T=20, cached for the whole session."""
    key = (Topology.parse(topo), tuple(sorted(params.items())))
    if key not in _maps:
        _maps[key] = sweep_map(**COARSE, topo=topo, params=DeviceParams(**params), workers=1)
    return _maps[key]


@pytest.fixture(scope="session")
def triple_map():
    return coarse_map()


_verdicts = {}


def record_verdict(number, title, ok, detail):
    _verdicts[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        terminalreporter.write_line(_verdicts[number])
