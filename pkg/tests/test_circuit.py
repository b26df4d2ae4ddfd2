import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from memcaplogic import kernel
from memcaplogic.circuit import (
    CircuitState,
    Topology,
    coupled_rhs,
    device_sources,
    device_voltages,
    divider_reduced,
    divider_triple,
)
from memcaplogic.device import DeviceParams, MembraneState, rhs
from memcaplogic.errors import CollapseError
from memcaplogic.simulator import _pack

from oracles import triple_voltages_by_solve

ys = st.floats(-0.95, 3.0)
bs = st.floats(-8, 8)


class TestTopology:
    def test_sizes(self):
        assert [t.n_devices for t in Topology] == [1, 2, 3]
        assert [t.n_inputs for t in Topology] == [1, 2, 2]

    def test_parse(self):
        assert Topology.parse("TRIPLE") is Topology.TRIPLE
        assert Topology.parse(Topology.REDUCED) is Topology.REDUCED
        with pytest.raises(ValueError):
            Topology.parse("quad")


class TestTriple:
    def test_flat_membranes(self):
        assert divider_triple(0, 0, 0, 3, 3) == (-1.0, -1.0, 2.0)

    def test_no_sources(self):
        assert divider_triple(0.2, -0.1, 0.3, 0.0, 0.0) == (0.0, 0.0, 0.0)

    @given(ys, ys, ys, bs, bs)
    def test_loop_identities(self, y1, y2, y3, b1, b2):
        v1, v2, v3 = divider_triple(y1, y2, y3, b1, b2)
        assert v3 - v1 == pytest.approx(b1, abs=1e-12)
        assert v3 - v2 == pytest.approx(b2, abs=1e-12)

    def test_against_linear_solve(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            y = rng.uniform(-0.9, 0.9, 3)
            b1, b2 = rng.uniform(-5, 5, 2)
            scales = rng.uniform(0.5, 2, 3)
            got = divider_triple(*y, b1, b2, scales=scales)
            np.testing.assert_allclose(got, triple_voltages_by_solve(y, b1, b2, scales),
                                       rtol=0, atol=1e-12)

    @given(ys, ys, ys, bs, bs)
    def test_charge_balance(self, y1, y2, y3, b1, b2):
        v = divider_triple(y1, y2, y3, b1, b2)
        q = sum(vi / (1 + yi) for vi, yi in zip(v, (y1, y2, y3)))
        assert q == pytest.approx(0.0, abs=1e-10 * (1 + abs(b1) + abs(b2)))

    def test_vectorized(self):
        y = np.linspace(-0.5, 0.5, 7)
        v = divider_triple(y, -y, 0 * y, 1.0, 4.0)
        for k in range(7):
            assert tuple(a[k] for a in v) == divider_triple(y[k], -y[k], 0.0, 1.0, 4.0)

    def test_collapse(self):
        with pytest.raises(CollapseError):
            divider_triple(-1.0, 0, 0, 1, 1)


class TestReduced:
    def test_equal_sources(self):
        v1, v2 = divider_reduced(0.1, -0.2, 2.5, 2.5)
        assert v1 == 0.0 and v2 == 0.0

    def test_flat_membranes(self):
        assert divider_reduced(0, 0, 0, 4) == (2.0, -2.0)

    def test_is_triple_without_output(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            y1, y2 = rng.uniform(-0.9, 0.9, 2)
            b1, b2 = rng.uniform(-5, 5, 2)
            v1, v2, _ = divider_triple(y1, y2, 0.0, b1, b2, scales=(1.0, 1.0, 1e-300))
            r1, r2 = divider_reduced(y1, y2, b1, b2)
            assert abs(v1 - r1) < 1e-12 and abs(v2 - r2) < 1e-12

    @given(ys, ys, bs, bs)
    def test_series_sum(self, y1, y2, b1, b2):
        v1, v2 = divider_reduced(y1, y2, b1, b2)
        assert v2 - v1 == pytest.approx(b1 - b2, abs=1e-12)


class TestSources:
    def test_single(self):
        assert device_sources([0.3], 2.0, 9.0, Topology.SINGLE) == (2.0,)

    def test_wrong_count(self):
        with pytest.raises(ValueError):
            device_sources([0.1, 0.1], 1.0, 1.0, Topology.TRIPLE)


def _state(ys, vs, p=DeviceParams(), us=None):
    us = us or [None] * len(ys)
    return CircuitState([MembraneState(y, v, u) for y, v, u in zip(ys, vs, us)], p)


class TestCircuitState:
    def test_shared_params(self):
        cs = _state([0.2, 0.2], [0, 0])
        assert len(cs.params) == 2

    def test_mixed_resistance_rejected(self):
        with pytest.raises(ValueError):
            CircuitState([MembraneState(0.2), MembraneState(0.2, u=0.0)],
                         [DeviceParams(), DeviceParams(rho=0.1)])

    def test_bad_scales(self):
        with pytest.raises(ValueError):
            CircuitState([MembraneState(0.2)], scales=(0.0,))

    def test_collapsed_start(self):
        with pytest.raises(CollapseError) as err:
            _state([0.2, -1.0], [0, 0])
        assert err.value.device == 1


class TestCoupledRhs:
    def test_equilibrium(self):
        for topo in Topology:
            n = topo.n_devices
            out = coupled_rhs(_state([0.2, -0.2, 0.2][:n], [0] * n), 0.0, 0.0, topo)
            assert all(d == (0.0, 0.0) for d in out)

    @given(st.floats(-0.8, 0.8), st.floats(-2, 2), st.floats(-0.8, 0.8), st.floats(-2, 2), bs)
    def test_symmetric_state(self, y, v, y3, v3, b):
        out = coupled_rhs(_state([y, y, y3], [v, v, v3]), b, b, Topology.TRIPLE)
        assert out[0] == out[1]

    @given(st.lists(st.floats(-0.8, 0.8), min_size=6, max_size=6), bs, bs)
    def test_swap_relabeling(self, s, b1, b2):
        for topo in (Topology.TRIPLE, Topology.REDUCED):
            n = topo.n_devices
            y, v = s[:n], s[3:3 + n]
            perm = [1, 0, 2][:n]
            a = coupled_rhs(_state(y, v), b1, b2, topo)
            b = coupled_rhs(_state([y[i] for i in perm], [v[i] for i in perm]), b2, b1, topo)
            assert [a[i] for i in perm] == b

    def test_hand_assembled(self):
        y = (0.13, -0.07, 0.21)
        v = (0.4, -1.2, 0.05)
        b1, b2 = 1.7, 3.9
        p = DeviceParams(Gamma=0.55, y0=0.25)
        c = [1 / (1 + yi) for yi in y]
        s = sum(c)
        volts = [(c[1] * b2 - (c[1] + c[2]) * b1) / s, (c[0] * b1 - (c[0] + c[2]) * b2) / s,
                 (c[0] * b1 + c[1] * b2) / s]
        expected = []
        for yi, vi, bc in zip(y, v, volts):
            acc = 4 * math.pi**2 * yi * (1 - (yi / 0.25) ** 2) - 0.55 * vi - (bc / (1 + yi)) ** 2
            expected.append((vi, acc))
        got = coupled_rhs(_state(y, v, p), b1, b2, Topology.TRIPLE)
        for (gy, gv), (ey, ev) in zip(got, expected):
            assert gy == ey
            assert gv == pytest.approx(ev, abs=1e-12)

    def test_resistive_uses_divider_as_source(self):
        p = DeviceParams(rho=0.2)
        cs = _state([0.1, -0.1, 0.2], [0, 0, 0], p, us=[0.0, 0.0, 0.0])
        out = coupled_rhs(cs, 1.0, 4.0, Topology.TRIPLE)
        srcs = divider_triple(0.1, -0.1, 0.2, 1.0, 4.0)
        for (dy, dv, du), src, d in zip(out, srcs, cs.devices):
            assert du == pytest.approx(2 * src / 0.2)
            # an uncharged capacitor exerts no force
            assert dv == rhs(MembraneState(d.y, d.v), 0.0, p)[1]
        assert device_voltages(cs, 1.0, 4.0, Topology.TRIPLE) == (0.0, -0.0, 0.0)

    def test_collapse_reports_device(self):
        cs = _state([0.1, 0.1, 0.1], [0, 0, 0])
        cs.devices[2] = MembraneState(-1.5)
        with pytest.raises(CollapseError) as err:
            coupled_rhs(cs, 1.0, 1.0, Topology.TRIPLE)
        assert err.value.device == 2


@pytest.mark.parametrize("backend", kernel.available_backends())
@pytest.mark.parametrize("topo", list(Topology))
@pytest.mark.parametrize("rho", [0.0, 0.05])
def test_kernel_derivative_matches_reference(backend, topo, rho):
    rng = np.random.default_rng(5)
    prev = kernel.use_backend(backend)
    try:
        for _ in range(10):
            n = topo.n_devices
            p = DeviceParams(Gamma=rng.uniform(0.1, 2), y0=rng.uniform(0.1, 0.5), rho=rho)
            us = list(rng.uniform(-3, 3, n)) if rho else None
            cs = _state(list(rng.uniform(-0.8, 0.8, n)), list(rng.uniform(-2, 2, n)), p, us)
            b1, b2 = rng.uniform(0, 5, 2)
            state, coef, scale, m = _pack(cs)
            got = kernel.derivative(state, n, topo.code, coef, scale, b1, b2)
            want = [x for d in coupled_rhs(cs, b1, b2, topo) for x in d]
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)
    finally:
        kernel.use_backend(prev)
