"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (run pytest with -s to see them all) and
asserts the stated tolerance. Every tolerance is pinned here, not deferred.
"""

import math
import time
from dataclasses import replace

import numpy as np
from scipy.special import zeta

from vacuumgap.casimir_polder import (
    AtomScene,
    cp_energy_dielectric,
    cp_energy_perfect_conductor,
    cp_energy_via_propagators,
)
from vacuumgap.gratings import (
    FlatProfile,
    GratingScene,
    grating_free_energy,
    lateral_force,
    round_trip_matrix,
    sinusoidal_profile,
)
from vacuumgap.lifshitz import (
    PlanePlaneScene,
    asymptote_graphene_metal_highT,
    asymptote_ideal_highT,
    energy_per_area_T0,
    free_energy_per_area,
    zero_mode_terms,
)
from vacuumgap.materials import (
    CallableLayerPolarization,
    ConstantEps,
    DrudeModel,
    GrapheneZeroModeModel,
    IdealConductor,
    LorentzPolarizability,
    PlasmaModel,
    Polarizability,
    StaticPolarizability,
)
from vacuumgap.quadrature import (
    MatsubaraConfig,
    Tolerance,
    integrate_semi_infinite,
    log_det_one_minus,
    matsubara_sum,
)
from vacuumgap.reflection import (
    KPoint,
    constant_pair_provider,
    fresnel_provider,
    ideal_provider,
    layer_provider,
    layer_reflection,
    layer_reflection_pi00_form,
)

ZETA3 = float(zeta(3.0))


def report(index, name, passed, detail):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {index:02d} {status} {name}: {detail}")
    assert passed, f"criterion {index} ({name}): {detail}"


def test_01_ideal_casimir_t0():
    scene = PlanePlaneScene(ideal_provider(), ideal_provider(), a=1.0)
    start = time.perf_counter()
    value = energy_per_area_T0(scene, Tolerance(rel=1e-9))
    elapsed = time.perf_counter() - start
    target = -math.pi**2 / 720.0
    rel = abs(value / target - 1.0)
    report(
        1, "ideal-casimir-T0", rel <= 1e-6 and elapsed < 1.0,
        f"value={value:.9e} target={target:.9e} rel={rel:.2e} time={elapsed:.2f}s",
    )


def test_02_ideal_high_temperature():
    a = 1.0
    t_hot = 50.0 / (4.0 * math.pi * a)
    scene = PlanePlaneScene(ideal_provider(), ideal_provider(), a=a, temperature=t_hot)
    full = free_energy_per_area(scene)
    target = asymptote_ideal_highT(a, t_hot)
    rel_asym = abs(full / target - 1.0)

    t_mid = 30.0 / (4.0 * math.pi * a)
    scene_mid = replace(scene, temperature=t_mid)
    full_mid = free_energy_per_area(scene_mid)
    f_tm, f_te = zero_mode_terms(scene_mid)
    rel_trunc = abs((f_tm + f_te) / full_mid - 1.0)
    report(
        2, "ideal-high-T", rel_asym <= 1e-3 and rel_trunc <= 1e-2,
        f"asymptote rel={rel_asym:.2e} (limit 1e-3), n0-truncation rel={rel_trunc:.2e} (limit 1e-2)",
    )


def test_03_drude_plasma_factor_two():
    a = 1.0
    omega_pl = 100.0 / a
    t = 100.0 / (4.0 * math.pi * a)
    drude = fresnel_provider(DrudeModel(omega_pl, omega_pl / 100.0))
    plasma = fresnel_provider(PlasmaModel(omega_pl))
    f_drude = free_energy_per_area(PlanePlaneScene(drude, drude, a=a, temperature=t))
    f_plasma = free_energy_per_area(PlanePlaneScene(plasma, plasma, a=a, temperature=t))
    ratio = f_drude / f_plasma
    report(
        3, "drude-plasma-ratio", 0.49 <= ratio <= 0.51,
        f"F_Drude/F_plasma={ratio:.5f} (window [0.49, 0.51])",
    )


def test_04_casimir_polder_static_conductor():
    alpha0, a = 1.3, 1.0
    pol = Polarizability.isotropic(StaticPolarizability(alpha0))
    closed = -3.0 * alpha0 / (32.0 * math.pi**2 * a**4)
    numeric = cp_energy_perfect_conductor(AtomScene(pol, a=a))
    rel_pc = abs(numeric / closed - 1.0)
    via_provider = cp_energy_dielectric(
        AtomScene(pol, a=a, surface=constant_pair_provider(-1.0, 1.0))
    )
    rel_diel = abs(via_provider / closed - 1.0)
    report(
        4, "casimir-polder-conductor", rel_pc <= 1e-8 and rel_diel <= 1e-8,
        f"integral rel={rel_pc:.2e}, ideal-pair dielectric rel={rel_diel:.2e} (limits 1e-8)",
    )


def test_05_propagator_form_equivalence():
    rng = np.random.default_rng(20240915)
    tol = Tolerance(rel=1e-12, abs=1e-18)
    worst = 0.0
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
        direct = cp_energy_dielectric(scene, tol)
        contracted = cp_energy_via_propagators(scene, tol)
        worst = max(worst, abs(contracted - direct) / abs(direct))
    report(
        5, "propagator-rewrite", worst <= 1e-10,
        f"worst relative disagreement over 20 scenes = {worst:.2e} (limit 1e-10)",
    )


def test_06_layer_coefficient_forms():
    rng = np.random.default_rng(60)
    worst = 0.0
    for _ in range(1000):
        w = float(rng.uniform(0.1, 3.0))
        k = float(rng.uniform(0.1, 3.0))
        pi00 = float(rng.uniform(0.0, 5.0))
        trpi = float(rng.uniform(0.0, 5.0))
        layer = CallableLayerPolarization(
            lambda _w, _k, v=pi00: v, lambda _w, _k, v=trpi: v
        )
        a = layer_reflection(layer, KPoint(w, k))
        b = layer_reflection_pi00_form(layer, KPoint(w, k))
        worst = max(
            worst,
            abs(a.r_te - b.r_te) / max(abs(a.r_te), 1.0),
            abs(a.r_tm - b.r_tm) / max(abs(a.r_tm), 1.0),
        )
    report(
        6, "layer-form-equivalence", worst <= 1e-12,
        f"worst disagreement over 1000 tuples = {worst:.2e} (limit 1e-12)",
    )


def test_07_graphene_metal_zero_mode():
    alpha, n_species, v_f = 1.0 / 137.036, 4, 1.0 / 300.0
    a = 1.0
    t = 100.0 / (4.0 * math.pi * a)
    layer = GrapheneZeroModeModel(alpha=alpha, v_f=v_f, temperature=t, n_species=n_species)
    scene = PlanePlaneScene(layer_provider(layer), ideal_provider(), a=a, temperature=t)
    f_tm, f_te = zero_mode_terms(scene)
    asym_tm, asym_te = asymptote_graphene_metal_highT(a, t, alpha, n_species, v_f)
    rel_tm = abs(f_tm / asym_tm - 1.0)
    rel_te = abs(f_te / asym_te - 1.0)
    report(
        7, "graphene-metal-high-T", rel_tm <= 1e-2 and rel_te <= 1e-2,
        f"TM rel={rel_tm:.2e}, TE rel={rel_te:.2e} (limits 1e-2)",
    )


def test_08_grating_flat_limit():
    eps = ConstantEps(4.0)
    separation, period, t = 0.75, 1.0, 0.2122
    reference = free_energy_per_area(
        PlanePlaneScene(
            fresnel_provider(eps), fresnel_provider(eps), a=separation, temperature=t
        ),
        Tolerance(rel=1e-9, abs=1e-16),
    )
    values = {}
    elapsed = {}
    for shift in (0.0, 0.41):
        scene = GratingScene(
            FlatProfile(eps), FlatProfile(eps), separation, period, shift, t
        )
        start = time.perf_counter()
        values[shift] = grating_free_energy(scene, 5, Tolerance(rel=1e-7, abs=1e-14))
        elapsed[shift] = time.perf_counter() - start
    rel = max(abs(v / reference - 1.0) for v in values.values())
    shift_dependence = abs(values[0.41] / values[0.0] - 1.0)
    runtime_ok = max(elapsed.values()) < 30.0
    report(
        8, "grating-flat-limit",
        rel <= 1e-6 and shift_dependence <= 1e-12 and runtime_ok,
        f"rel={rel:.2e} (limit 1e-6), shift dependence={shift_dependence:.2e}, "
        f"time/point={max(elapsed.values()):.1f}s (limit 30s)",
    )


class TestCriterion09Structure:
    separation, period = 0.5, 1.0
    temperature = 8.0 / (4.0 * math.pi * 0.5)

    def _scene(self, depth=0.05, shift=0.0):
        prof = sinusoidal_profile(depth, self.period)
        return GratingScene(
            prof, prof, self.separation, self.period, shift, self.temperature
        )

    def test_09a_shift_periodicity(self):
        tol = Tolerance(rel=1e-3, abs=1e-10)
        scene = self._scene(shift=0.2)
        f0 = grating_free_energy(scene, 1, tol)
        f1 = grating_free_energy(replace(scene, shift=0.2 + self.period), 1, tol)
        rel = abs(f1 / f0 - 1.0)
        report(9, "grating-shift-periodicity", rel <= 1e-10,
               f"|F(s+d)/F(s)-1|={rel:.2e} (limit 1e-10)")

    def test_09b_lateral_force_loop_integral(self):
        tol = Tolerance(rel=3e-4, abs=1e-12)
        shifts = (0.1, 0.35, 0.6, 0.85)
        forces = [
            lateral_force(self._scene(shift=s), 1, tol) for s in shifts
        ]
        scale = max(abs(f) for f in forces)
        loop = sum(forces) * (self.period / len(shifts))
        report(
            9, "grating-force-loop", scale > 1e-4 and abs(loop) <= 1e-2 * scale,
            f"loop integral={loop:.2e} vs force scale={scale:.2e}",
        )

    def test_09c_spectral_radius_below_one(self):
        scene = self._scene(depth=0.06, shift=0.17)
        worst = 0.0
        for w in (0.0, 0.8, 2.5, 6.0):
            for k_x in (0.15, 1.5, 3.0):
                for k_y in (0.05, 1.0, 4.0):
                    m = round_trip_matrix(scene, 2, w, k_x, k_y, residual_tol=1e-4)
                    worst = max(worst, float(np.max(np.abs(np.linalg.eigvals(m)))))
        report(9, "grating-spectral-radius", worst < 1.0,
               f"max spectral radius over node grid = {worst:.6f} (< 1 required)")

    def test_09d_depth_correction_richardson(self):
        tol = Tolerance(rel=5e-6, abs=1e-12)

        def flat_reference(a):
            scene = PlanePlaneScene(
                ideal_provider(), ideal_provider(), a=a, temperature=self.temperature
            )
            return free_energy_per_area(scene, Tolerance(rel=1e-9, abs=1e-16))

        def roughness(depth):
            scene = GratingScene(
                sinusoidal_profile(depth, self.period),
                FlatProfile(IdealConductor()),
                self.separation, self.period, 0.0, self.temperature,
            )
            return grating_free_energy(scene, 2, tol) - flat_reference(
                self.separation - 0.5 * depth
            )

        ratio = roughness(0.04) / roughness(0.02)
        report(9, "grating-depth-richardson", abs(ratio - 4.0) <= 0.4,
               f"roughness ratio dF(h)/dF(h/2) = {ratio:.3f} (window 4.0 +- 0.4)")


def test_10_numerical_engines():
    gamma_val = integrate_semi_infinite(
        lambda x: x * x * math.exp(-2.0 * x), Tolerance(rel=1e-12)
    ).value
    rel_gamma = abs(gamma_val / 0.25 - 1.0)

    closed = 0.5 + math.exp(-2 * math.pi) / (1.0 - math.exp(-2 * math.pi))
    geo = matsubara_sum(
        lambda n: math.exp(-2.0 * math.pi * n), MatsubaraConfig(1.0, Tolerance(rel=1e-12))
    ).value
    rel_geo = abs(geo / closed - 1.0)

    from test_quadrature import brute_force_det

    rng = np.random.default_rng(1010)
    worst_det = 0.0
    for n in range(2, 9):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        m *= 0.5 / np.linalg.norm(m, 2)
        reference = math.log(abs(brute_force_det(np.eye(n) - m)))
        worst_det = max(worst_det, abs(log_det_one_minus(m) - reference))
    report(
        10, "numerical-engines",
        rel_gamma <= 1e-10 and rel_geo <= 1e-10 and worst_det <= 1e-12,
        f"gamma rel={rel_gamma:.2e}, geometric rel={rel_geo:.2e}, "
        f"log-det worst abs dev={worst_det:.2e}",
    )
