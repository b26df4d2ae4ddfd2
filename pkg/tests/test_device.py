import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from memcaplogic.device import (
    DeviceParams,
    LogicBit,
    MembraneState,
    PhysicalParams,
    binarize,
    capacitance,
    effective_damping,
    init_state,
    potential_energy,
    restoring_force,
    rhs,
    rhs_resistive,
    rhs_resistive_expanded,
    to_dimensionless,
)
from memcaplogic.errors import CollapseError, DomainError

P = DeviceParams()
PHYS = PhysicalParams(omega0=2e6, gamma=1e5, m=1e-15, d=1e-6, z0=0.2e-6, C0=1e-15)

ys = st.floats(-0.9, 0.9)
vs = st.floats(-5, 5)
betas = st.floats(-6, 6)
params = st.builds(DeviceParams, Gamma=st.floats(0.05, 3), y0=st.floats(0.05, 0.6))


class TestParams:
    def test_defaults(self):
        assert (P.Gamma, P.y0, P.rho) == (0.7, 0.2, 0.0)
        assert not P.resistive

    @pytest.mark.parametrize("kw", [{"Gamma": 0}, {"Gamma": -1}, {"y0": 0}, {"y0": 1.0},
                                    {"y0": 1.5}, {"rho": -0.1}, {"Gamma": math.inf}])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            DeviceParams(**kw)

    def test_invalid_lists_every_problem(self):
        with pytest.raises(DomainError, match="Gamma.*y0"):
            DeviceParams(Gamma=-1, y0=2)

    def test_physical_validation(self):
        with pytest.raises(DomainError, match="z0"):
            PhysicalParams(omega0=1, gamma=1, m=1, d=1, z0=2, C0=1)
        with pytest.raises(DomainError, match="omega0"):
            PhysicalParams(omega0=0, gamma=1, m=1, d=1, z0=0.1, C0=1)


class TestConversion:
    def test_zero_resistance(self):
        dp, _ = to_dimensionless(PHYS)
        assert dp.rho == 0.0

    def test_y0_ratio(self):
        dp, _ = to_dimensionless(PHYS)
        assert dp.y0 == pytest.approx(0.2)

    def test_rho_linear_in_R(self):
        a, _ = to_dimensionless(PhysicalParams(**{**PHYS.__dict__, "R": 1e6}))
        b, _ = to_dimensionless(PhysicalParams(**{**PHYS.__dict__, "R": 2e6}))
        assert b.rho == pytest.approx(2 * a.rho, rel=1e-15)

    def test_damping_and_beta0(self):
        dp, beta0 = to_dimensionless(PHYS)
        assert dp.Gamma == pytest.approx(2 * math.pi * 1e5 / 2e6)
        assert beta0 == pytest.approx(2 * math.pi / (2e6 * 1e-6) * math.sqrt(1e-15 / 2e-15))


class TestCapacitance:
    def test_midpoint(self):
        assert capacitance(0.0) == 1.0

    def test_states(self):
        assert capacitance(0.2) == pytest.approx(0.8333333333)
        assert capacitance(-0.2) == pytest.approx(1.25)
        assert capacitance(-0.2) > capacitance(0.2)

    def test_collapse(self):
        with pytest.raises(CollapseError):
            capacitance(-1.0)


class TestRhs:
    def test_well_is_equilibrium(self):
        assert rhs(MembraneState(0.2, 0.0), 0.0, P) == (0.0, 0.0)
        assert rhs(MembraneState(-0.2, 0.0), 0.0, P) == (0.0, 0.0)

    def test_origin_is_equilibrium(self):
        assert rhs(MembraneState(0.0, 0.0), 0.0, P) == (0.0, 0.0)

    def test_unit_voltage_at_origin(self):
        for gamma in (0.1, 0.7, 2.0):
            assert rhs(MembraneState(0.0, 0.0), 1.0, DeviceParams(Gamma=gamma)) == (0.0, -1.0)

    def test_collapse(self):
        with pytest.raises(CollapseError):
            rhs(MembraneState(-1.2, 0.0), 1.0, P)

    @given(ys, vs, betas, params)
    def test_force_is_sign_blind(self, y, v, beta, p):
        s = MembraneState(y, v)
        assert rhs(s, beta, p) == rhs(s, -beta, p)

    @given(ys, betas, params)
    def test_voltage_only_attracts(self, y, beta, p):
        s = MembraneState(y, 0.0)
        assert rhs(s, beta, p)[1] <= rhs(s, 0.0, p)[1]

    @given(ys, vs, params)
    def test_mirror_symmetry_without_drive(self, y, v, p):
        dy, dv = rhs(MembraneState(y, v), 0.0, p)
        mdy, mdv = rhs(MembraneState(-y, -v), 0.0, p)
        assert (mdy, mdv) == (-dy, pytest.approx(-dv, abs=1e-12))

    def test_accepts_arrays(self):
        y = np.array([0.2, -0.2, 0.0])
        dy, dv = rhs(MembraneState(y, np.zeros(3)), np.array([0.0, 0.0, 1.0]), P)
        np.testing.assert_allclose(dv, [0.0, 0.0, -1.0], atol=1e-15)


class TestPotential:
    def test_origin(self):
        assert potential_energy(0.0, P) == 0.0

    @pytest.mark.parametrize("y0", [0.1, 0.2, 0.3])
    def test_equal_wells(self, y0):
        p = DeviceParams(y0=y0)
        depth = -math.pi**2 * y0**2
        assert potential_energy(y0, p) == pytest.approx(depth, rel=1e-12)
        assert potential_energy(-y0, p) == pytest.approx(depth, rel=1e-12)

    def test_finite_difference_at_point(self):
        h = 1e-6
        du = (potential_energy(0.1 + h, P) - potential_energy(0.1 - h, P)) / (2 * h)
        assert -du == pytest.approx(restoring_force(0.1, P), abs=1e-6)

    def test_finite_difference_random(self):
        rng = np.random.default_rng(7)
        h = 1e-6
        for y in rng.uniform(-0.9, 0.9, 20):
            du = (potential_energy(y + h, P) - potential_energy(y - h, P)) / (2 * h)
            assert abs(-du - restoring_force(y, P)) < 1e-6

    def test_rhs_force_matches_potential(self):
        y = sp.symbols("y")
        y0 = sp.Rational(1, 5)
        u = sp.pi**2 * y**4 / y0**2 - 2 * sp.pi**2 * y**2
        force = sp.lambdify(y, -sp.diff(u, y))
        for val in (-0.7, -0.2, 0.05, 0.33):
            assert rhs(MembraneState(val, 0.0), 0.0, P)[1] == pytest.approx(force(val), rel=1e-12)


class TestResistive:
    PR = DeviceParams(rho=0.05)

    def test_steady_charge(self):
        y, b = 0.13, 2.5
        s = MembraneState(y, 0.0, b / (1 + y))
        assert rhs_resistive(s, b, self.PR)[2] == pytest.approx(0.0, abs=1e-14)

    def test_no_drive_matches_plain(self):
        s = MembraneState(0.17, -0.3, 0.0)
        dy, dv, du = rhs_resistive(s, 0.0, self.PR)
        assert du == 0.0
        assert (dy, dv) == rhs(MembraneState(0.17, -0.3), 0.0, self.PR)

    def test_capacitor_voltage_from_charge(self):
        s = MembraneState(-0.1, 0.2, 1.5)
        assert rhs_resistive(s, 3.0, self.PR)[:2] == rhs(MembraneState(-0.1, 0.2), 1.5 * 0.9, self.PR)

    def test_requires_rho_and_charge(self):
        with pytest.raises(DomainError):
            rhs_resistive(MembraneState(0.1, 0.0, 0.0), 1.0, P)
        with pytest.raises(DomainError):
            rhs_resistive(MembraneState(0.1, 0.0), 1.0, self.PR)

    @given(ys, vs, betas, st.floats(-5, 5), params)
    def test_expanded_at_zero_rho_is_plain(self, y, v, b, db, p):
        s = MembraneState(y, v)
        assert rhs_resistive_expanded(s, b, db, p) == rhs(s, b, p)

    def test_effective_damping_symbolic(self):
        # first-order expansion of the augmented model, done symbolically:
        # b_C = b - rho/(2(1+y)) * (db - b v/(1+y)); keep the O(rho) part of -(b_C/(1+y))**2
        y, v, b, db, rho, gam = sp.symbols("y v b db rho Gamma")
        bc = b - rho / (2 * (1 + y)) * (db - b * v / (1 + y))
        force = sp.series(-(bc / (1 + y)) ** 2, rho, 0, 2).removeO()
        damping = gam - sp.diff(force, v)
        yv, bv = 0.0, 2.0
        p = DeviceParams(Gamma=0.7, rho=0.03)
        expected = float(damping.subs({y: yv, b: bv, rho: p.rho, gam: p.Gamma}))
        assert effective_damping(yv, bv, bv, p) == pytest.approx(expected, rel=1e-14)
        # and the full expanded right-hand side against the symbolic one
        acc = sp.lambdify((y, v, b, db), 4 * sp.pi**2 * y * (1 - (y / 0.2) ** 2) - 0.7 * v + force.subs(rho, p.rho))
        for args in ((0.0, 0.4, 2.0, 1.5), (0.15, -0.2, 3.0, -0.4), (-0.18, 1.1, 1.2, 0.0)):
            got = rhs_resistive_expanded(MembraneState(*args[:2]), args[2], args[3], p)[1]
            assert got == pytest.approx(acc(*args), rel=1e-12, abs=1e-12)

    def test_expanded_accepts_arrays(self):
        p = DeviceParams(rho=0.01)
        y = np.array([0.1, -0.1])
        out = rhs_resistive_expanded(MembraneState(y, np.zeros(2)), np.ones(2), np.zeros(2), p)[1]
        assert out.shape == (2,)


class TestBits:
    def test_init(self):
        assert init_state(LogicBit.ZERO, P) == MembraneState(0.2, 0.0)
        assert init_state(LogicBit.ONE, P) == MembraneState(-0.2, 0.0)
        assert init_state(LogicBit.ONE, DeviceParams(rho=0.1)).u == 0.0

    def test_init_unsettled(self):
        with pytest.raises(DomainError):
            init_state(LogicBit.UNSETTLED, P)

    @pytest.mark.parametrize("bit", [LogicBit.ZERO, LogicBit.ONE])
    def test_round_trip(self, bit):
        assert binarize(init_state(bit, P), P) == bit

    def test_examples(self):
        assert binarize(MembraneState(0.2, 0.0), P) == LogicBit.ZERO
        assert binarize(MembraneState(-0.2, 0.0), P) == LogicBit.ONE
        assert binarize(MembraneState(0.05, 0.5), P, tol_v=1e-3) == LogicBit.UNSETTLED

    def test_default_tolerance_is_quarter_well(self):
        assert binarize(MembraneState(0.249, 0.0), P) == LogicBit.ZERO
        assert binarize(MembraneState(0.251, 0.0), P) == LogicBit.UNSETTLED
        assert binarize(MembraneState(0.0, 0.0), P) == LogicBit.UNSETTLED

    @given(st.floats(-0.99, 0.99), st.floats(-1, 1), params)
    def test_bit_follows_sign(self, y, v, p):
        bit = binarize(MembraneState(y, v), p)
        if bit == LogicBit.ZERO:
            assert y > 0
        elif bit == LogicBit.ONE:
            assert y < 0
