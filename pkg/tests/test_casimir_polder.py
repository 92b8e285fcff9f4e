import math

import numpy as np
import pytest

from vacuumgap.casimir_polder import (
    AtomScene,
    HalfSpacePropagatorComponents,
    cp_energy_dielectric,
    cp_energy_perfect_conductor,
    cp_energy_via_propagators,
)
from vacuumgap.errors import InvalidInput
from vacuumgap.materials import (
    ConstantEps,
    LorentzPolarizability,
    PlasmaModel,
    Polarizability,
    StaticPolarizability,
)
from vacuumgap.quadrature import Tolerance
from vacuumgap.reflection import constant_pair_provider, fresnel_provider


def static_iso(alpha0=1.0):
    return Polarizability.isotropic(StaticPolarizability(alpha0))


def closed_form_static_pc(alpha0, a):
    # analytic integral of the perfect-conductor kernel with constant alpha:
    # int (4w^2a^2 + 2wa + 1) e^{-2wa} dw = 2/a, int 2(2wa+1) e^{-2wa} dw = 2/a
    # => E = -(alpha0/(64 pi^2 a^3)) * (2*(2/a) + 2/a) = -3 alpha0/(32 pi^2 a^4)
    return -3.0 * alpha0 / (32.0 * math.pi**2 * a**4)


class TestPerfectConductor:
    def test_static_isotropic_closed_form(self):
        for a in (0.5, 1.0, 2.0):
            scene = AtomScene(static_iso(1.7), a=a)
            assert cp_energy_perfect_conductor(scene) == pytest.approx(
                closed_form_static_pc(1.7, a), rel=1e-10
            )

    def test_zero_polarizability(self):
        scene = AtomScene(static_iso(0.0), a=1.0)
        assert cp_energy_perfect_conductor(scene) == 0.0

    def test_distance_scaling(self):
        e1 = cp_energy_perfect_conductor(AtomScene(static_iso(), a=1.0))
        e2 = cp_energy_perfect_conductor(AtomScene(static_iso(), a=2.0))
        assert e2 / e1 == pytest.approx(1.0 / 16.0, rel=1e-9)

    def test_needs_marker_surface(self):
        scene = AtomScene(static_iso(), a=1.0, surface=constant_pair_provider(0, 0))
        with pytest.raises(InvalidInput):
            cp_energy_perfect_conductor(scene)


class TestDielectric:
    def test_ideal_provider_matches_closed_form(self):
        scene = AtomScene(static_iso(), a=1.0, surface=constant_pair_provider(-1.0, 1.0))
        e = cp_energy_dielectric(scene)
        pc = cp_energy_perfect_conductor(AtomScene(static_iso(), a=1.0))
        assert e == pytest.approx(pc, rel=1e-8)

    def test_zero_provider(self):
        scene = AtomScene(static_iso(), a=1.0, surface=constant_pair_provider(0.0, 0.0))
        assert cp_energy_dielectric(scene) == 0.0

    def test_monotone_in_eps_toward_conductor(self):
        pc = cp_energy_perfect_conductor(AtomScene(static_iso(), a=1.0))
        values = []
        for eps in (1.5, 2.0, 4.0, 16.0, 256.0):
            scene = AtomScene(
                static_iso(), a=1.0, surface=fresnel_provider(ConstantEps(eps))
            )
            values.append(cp_energy_dielectric(scene))
        assert all(a > b for a, b in zip(values, values[1:]))  # deeper with eps
        assert all(v > pc for v in values)  # approaches from above (weaker binding)
        assert values[-1] == pytest.approx(pc, rel=0.1)

    def test_attraction_sign(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            pol = Polarizability.isotropic(
                LorentzPolarizability(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.5, 4.0)))
            )
            scene = AtomScene(
                pol, a=float(rng.uniform(0.5, 2.0)),
                surface=fresnel_provider(ConstantEps(float(rng.uniform(1.5, 20.0)))),
            )
            assert cp_energy_dielectric(scene) < 0.0


class TestPropagatorForm:
    def test_component_ratio(self):
        comps = HalfSpacePropagatorComponents(constant_pair_provider(-0.4, 0.7), a=1.3)
        rng = np.random.default_rng(9)
        for _ in range(20):
            w = float(rng.uniform(0.05, 5.0))
            k = float(rng.uniform(0.05, 5.0))
            ratio = comps.d_zz(w, k) / comps.d_ll(w, k)
            assert ratio == pytest.approx(k * k / (w * w + k * k), rel=1e-13)

    def test_sign_structure(self):
        comps = HalfSpacePropagatorComponents(constant_pair_provider(-0.4, 0.7), a=1.0)
        assert comps.d_pp(1.0, 1.0) < 0.0  # sign of r_TE
        assert comps.d_ll(1.0, 1.0) < 0.0  # sign of -r_TM
        assert comps.d_zz(1.0, 1.0) < 0.0

    def test_te_only_provider_isolates_dpp(self):
        pol = static_iso(0.8)
        provider = constant_pair_provider(-0.6, 0.0)
        scene = AtomScene(pol, a=1.0, surface=provider)
        via_prop = cp_energy_via_propagators(scene)
        direct = cp_energy_dielectric(scene)
        assert via_prop == pytest.approx(direct, rel=1e-9)
        assert via_prop < 0.0

    def test_zero_polarizability(self):
        scene = AtomScene(static_iso(0.0), a=1.0, surface=constant_pair_provider(-0.5, 0.5))
        assert cp_energy_via_propagators(scene) == 0.0

    def test_requires_in_plane_isotropy(self):
        pol = Polarizability(
            StaticPolarizability(1.0), StaticPolarizability(2.0), StaticPolarizability(1.0)
        )
        scene = AtomScene(pol, a=1.0, surface=constant_pair_provider(-0.5, 0.5))
        with pytest.raises(InvalidInput):
            cp_energy_via_propagators(scene)

    def test_matches_dielectric_on_random_scenes(self):
        rng = np.random.default_rng(2024)
        tol = Tolerance(rel=1e-12, abs=1e-18)
        for i in range(20):
            inplane = LorentzPolarizability(
                float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 4.0))
            )
            normal = LorentzPolarizability(
                float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 4.0))
            )
            pol = Polarizability(inplane, inplane, normal)
            if i % 2 == 0:
                surface = fresnel_provider(ConstantEps(float(rng.uniform(1.5, 30.0))))
            else:
                surface = fresnel_provider(PlasmaModel(float(rng.uniform(0.5, 8.0))))
            scene = AtomScene(pol, a=float(rng.uniform(0.6, 1.8)), surface=surface)
            e_direct = cp_energy_dielectric(scene, tol)
            e_prop = cp_energy_via_propagators(scene, tol)
            assert abs(e_prop - e_direct) <= 1e-10 * abs(e_direct)


def test_scene_validation():
    with pytest.raises(InvalidInput):
        AtomScene(static_iso(), a=0.0)
