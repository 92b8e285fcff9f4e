import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacuumgap.errors import IdealLimitRequested, InvalidInput
from vacuumgap.materials import (
    CallableLayerPolarization,
    ConstantEps,
    DrudeModel,
    GrapheneZeroModeModel,
    IdealConductor,
    LorentzPolarizability,
    PlasmaModel,
    StaticPolarizability,
    SuperconductorModel,
    TabulatedEps,
    epsilon_iw,
    graphene_pi00_zero_mode,
)


class TestEpsilon:
    def test_plasma(self):
        assert epsilon_iw(PlasmaModel(1.0), 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_drude_zero_gamma_is_plasma(self):
        assert epsilon_iw(DrudeModel(1.0, 0.0), 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_vacuum(self):
        for w in (0.01, 1.0, 100.0):
            assert epsilon_iw(ConstantEps(1.0), w) == 1.0

    def test_ideal_raises(self):
        with pytest.raises(IdealLimitRequested):
            epsilon_iw(IdealConductor(), 1.0)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            ConstantEps(0.5)
        with pytest.raises(InvalidInput):
            PlasmaModel(0.0)
        with pytest.raises(InvalidInput):
            DrudeModel(1.0, -0.1)

    def test_monotone_decreasing_and_limit(self):
        models = [PlasmaModel(3.0), DrudeModel(3.0, 0.2)]
        grid = np.geomspace(1e-3, 1e4, 200)
        for model in models:
            vals = [epsilon_iw(model, w) for w in grid]
            assert all(a >= b for a, b in zip(vals, vals[1:]))
            assert vals[-1] == pytest.approx(1.0, abs=1e-6)
            assert all(v >= 1.0 for v in vals)

    def test_drude_to_plasma_limit(self):
        plasma = PlasmaModel(2.0)
        for gamma in (1e-2, 1e-4, 1e-6):
            drude = DrudeModel(2.0, gamma)
            for w in (0.5, 1.0, 10.0):
                rel = abs(epsilon_iw(drude, w) - epsilon_iw(plasma, w)) / epsilon_iw(plasma, w)
                assert rel <= gamma / w


class TestTabulated:
    def _drude_table(self, n=400):
        ref = DrudeModel(9.0, 0.035)
        omega = np.geomspace(1e-3, 1e3, n)
        eps = np.array([ref.eps_iw(w) for w in omega])
        return TabulatedEps(omega, eps), ref, omega

    def test_interpolates(self):
        tab, ref, omega = self._drude_table()
        mids = np.sqrt(omega[:-1] * omega[1:])
        for w in mids[:: len(mids) // 37]:
            assert tab.eps_iw(float(w)) == pytest.approx(ref.eps_iw(float(w)), rel=1e-5)

    def test_clamps(self):
        tab, ref, omega = self._drude_table()
        assert tab.eps_iw(1e-6) == tab.eps_iw(float(omega[0]))
        assert tab.eps_iw(1e6) == tab.eps_iw(float(omega[-1]))

    def test_monotone(self):
        tab, _, _ = self._drude_table()
        grid = np.geomspace(1e-3, 1e3, 500)
        vals = [tab.eps_iw(float(w)) for w in grid]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(InvalidInput):
            TabulatedEps([1.0, 1.0], [2.0, 2.0])
        with pytest.raises(InvalidInput):
            TabulatedEps([1.0, 2.0], [0.5, 2.0])
        with pytest.raises(InvalidInput):
            TabulatedEps([1.0], [2.0])


class TestPolarizability:
    def test_static(self):
        p = StaticPolarizability(2.5)
        assert p(0.0) == 2.5 and p(100.0) == 2.5

    def test_lorentz_decay(self):
        p = LorentzPolarizability(2.0, 1.5)
        assert p(0.0) == pytest.approx(2.0)
        grid = np.geomspace(1e-2, 1e3, 100)
        vals = [p(w) for w in grid]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(v >= 0.0 for v in vals)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            StaticPolarizability(-1.0)
        with pytest.raises(InvalidInput):
            LorentzPolarizability(1.0, 0.0)


class TestLayerPolarization:
    @given(
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=0.0, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_gauge_identity_by_construction(self, omega, k, p0, pt):
        layer = CallableLayerPolarization(lambda w, q: p0 + w + q, lambda w, q: pt + 2 * w)
        lhs = omega**2 * layer.pi00(omega, k)
        rhs = k**2 * layer.pi_ll(omega, k)
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-300)

    def test_pi_pp(self):
        layer = CallableLayerPolarization(lambda w, q: 2.0, lambda w, q: 5.0)
        w, k = 1.0, 2.0
        expected = 2.0 * (w * w + k * k) / (k * k) - 5.0
        assert layer.pi_pp(w, k) == pytest.approx(expected, rel=1e-14)


class TestGrapheneZeroMode:
    def test_k_zero_leading_term(self):
        m = GrapheneZeroModeModel(alpha=0.1, v_f=0.01, temperature=2.0)
        expected = 4 * 0.1 * 4 * 2.0 * math.log(2.0) / 0.01**2
        assert graphene_pi00_zero_mode(m, 0.0) == pytest.approx(expected, rel=1e-14)

    def test_free_photon(self):
        m = GrapheneZeroModeModel(alpha=1e-30, v_f=0.01, temperature=1.0)
        assert graphene_pi00_zero_mode(m, 1.0) == pytest.approx(0.0, abs=1e-20)

    def test_reference_numbers(self):
        # direct evaluation: 16 ln2 * 300^2 / 137.036
        m = GrapheneZeroModeModel(alpha=1 / 137.036, v_f=1 / 300.0, temperature=1.0)
        by_hand = 16.0 * math.log(2.0) * 300.0**2 / 137.036
        assert graphene_pi00_zero_mode(m, 0.0) == pytest.approx(by_hand, rel=1e-12)
        assert by_hand == pytest.approx(7283.7, abs=0.1)

    def test_quadratic_term_and_trace(self):
        alpha, vf, t, k = 0.05, 0.02, 1.5, 0.3
        m = GrapheneZeroModeModel(alpha=alpha, v_f=vf, temperature=t)
        an = alpha * 4
        assert m.pi00(0.0, k) == pytest.approx(
            4 * an * t * math.log(2) / vf**2 + an * k * k / (12 * t), rel=1e-13
        )
        assert m.tr_pi(0.0, k) - m.pi00(0.0, k) == pytest.approx(
            an * vf**2 * k * k / (6 * t), rel=1e-13
        )

    def test_zero_mode_only(self):
        m = GrapheneZeroModeModel(alpha=0.01, v_f=0.01, temperature=1.0)
        with pytest.raises(InvalidInput):
            m.pi00(0.5, 1.0)
        with pytest.raises(InvalidInput):
            graphene_pi00_zero_mode(m, -1.0)


def test_superconductor_validation():
    SuperconductorModel(0.0, 0.0)
    with pytest.raises(InvalidInput):
        SuperconductorModel(-1.0)
