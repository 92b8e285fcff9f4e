"""Plane-plane Casimir energy and free energy from reflection pairs.

The free energy per unit area of two flat bodies separated by a vacuum gap
``a`` at temperature ``T`` is a primed thermal sum over radial momentum
integrals,

    F = T sum'_n (1/2pi) int k dk [ ln(1 - e^{-2a q} r_TE r_TE')
                                  + ln(1 - e^{-2a q} r_TM r_TM') ],

with q = sqrt(w_n^2 + k^2); the angular integral is the trivial 2*pi because
every in-scope coefficient depends on k only. At T = 0 the sum becomes a
frequency integral and is evaluated as a distinct 2-d quadrature rather than
as a small-T limit.

The radial integral is conditioned by substituting u = 2 a q, which turns
the kernel into a plain e^{-u}; logarithms of products are accumulated as
sums of log1p terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from scipy.special import zeta

from .errors import InvalidInput
from .quadrature import (
    MatsubaraConfig,
    Tolerance,
    central_derivative,
    integrate_semi_infinite,
    matsubara_sum,
)
from .reflection import ReflectionProvider

__all__ = [
    "PlanePlaneScene",
    "free_energy_per_area",
    "energy_per_area_T0",
    "zero_mode_terms",
    "asymptote_ideal_highT",
    "asymptote_graphene_metal_highT",
    "pressure",
]

_ZETA3 = float(zeta(3.0))

# e^{-u} underflows long before this; skipping the providers there avoids
# overflow inside material models at astronomically large momenta.
_U_CUTOFF = 700.0


@dataclass(frozen=True)
class PlanePlaneScene:
    """Two reflection providers facing each other across a gap.

    Parameters
    ----------
    side1, side2 : ReflectionProvider
        Called as provider(omega, k) at quadrature nodes; nodes are interior,
        so omega = k = 0 is never requested.
    a : float
        Separation, natural units (inverse energy). Must be > 0.
    temperature : float
        Temperature in energy units; 0 selects the T = 0 integral.
    """

    side1: ReflectionProvider
    side2: ReflectionProvider
    a: float
    temperature: float = 0.0

    def __post_init__(self):
        if not self.a > 0.0:
            raise InvalidInput(f"separation must be > 0, got {self.a}")
        if self.temperature < 0.0:
            raise InvalidInput(f"temperature must be >= 0, got {self.temperature}")


def _radial_term(scene: PlanePlaneScene, omega: float, tol: Tolerance,
                 te_weight: float = 1.0, tm_weight: float = 1.0) -> float:
    """(1/2pi) int k dk [sum of the two logs] at fixed omega, via u = 2 a q."""
    a = scene.a
    u_min = 2.0 * a * omega
    inv_8pia2 = 1.0 / (8.0 * math.pi * a * a)

    def integrand(v: float) -> float:
        u = u_min + v
        if u > _U_CUTOFF:
            return 0.0
        k = math.sqrt(v * (v + 2.0 * u_min)) / (2.0 * a)
        r1 = scene.side1(omega, k)
        r2 = scene.side2(omega, k)
        damp = math.exp(-u)
        acc = 0.0
        if te_weight != 0.0:
            acc += te_weight * math.log1p(-damp * r1.r_te * r2.r_te)
        if tm_weight != 0.0:
            acc += tm_weight * math.log1p(-damp * r1.r_tm * r2.r_tm)
        return u * acc

    return inv_8pia2 * integrate_semi_infinite(integrand, tol).value


def free_energy_per_area(
    scene: PlanePlaneScene,
    tol: Tolerance = Tolerance(),
    max_terms: int = 100_000,
    stats: Optional[dict] = None,
) -> float:
    """Free energy per unit area at T > 0 (natural units, energy^3).

    Negative (attractive) whenever the coefficient products are positive.
    NonConvergence from the quadrature or the thermal sum propagates.
    """
    if not scene.temperature > 0.0:
        raise InvalidInput("free_energy_per_area needs T > 0; use energy_per_area_T0")
    t = scene.temperature
    inner_tol = Tolerance(rel=0.2 * tol.rel, abs=0.2 * tol.abs)

    def term(n: int) -> float:
        return _radial_term(scene, 2.0 * math.pi * n * t, inner_tol)

    result = matsubara_sum(term, MatsubaraConfig(t, tol, max_terms))
    if stats is not None:
        stats["matsubara_terms"] = result.terms
        stats["tail_estimate"] = result.tail
    return t * result.value


def zero_mode_terms(
    scene: PlanePlaneScene, tol: Tolerance = Tolerance()
) -> tuple[float, float]:
    """The n = 0 contribution to the free energy, split as (TM, TE).

    Both carry the prime-sum half weight, so their sum is the zero-frequency
    truncation of the full free energy. Useful on its own because the n = 0
    term dominates for 4*pi*T*a >> 1 and is the only term several layer
    models (graphene zero mode, superconductor) are defined for.
    """
    if not scene.temperature > 0.0:
        raise InvalidInput("zero-mode term needs T > 0")
    t = scene.temperature
    f_tm = 0.5 * t * _radial_term(scene, 0.0, tol, te_weight=0.0, tm_weight=1.0)
    f_te = 0.5 * t * _radial_term(scene, 0.0, tol, te_weight=1.0, tm_weight=0.0)
    return f_tm, f_te


def energy_per_area_T0(
    scene: PlanePlaneScene, tol: Tolerance = Tolerance(), stats: Optional[dict] = None
) -> float:
    """Casimir energy per unit area at T = 0 (natural units, energy^3).

    Nested semi-infinite quadrature: outer over omega, inner the same
    u-substituted radial integral as the thermal terms.
    """
    if scene.temperature != 0.0:
        raise InvalidInput("energy_per_area_T0 needs T = 0; use free_energy_per_area")
    inner_tol = Tolerance(rel=0.1 * tol.rel, abs=0.1 * tol.abs)

    def outer(omega: float) -> float:
        return _radial_term(scene, omega, inner_tol)

    result = integrate_semi_infinite(outer, tol)
    if stats is not None:
        stats["error_estimate"] = result.error / (2.0 * math.pi)
    return result.value / (2.0 * math.pi)


def asymptote_ideal_highT(a: float, temperature: float) -> float:
    """High-temperature (zero-mode) free energy of two ideal plates:
    -T zeta(3) / (8 pi a^2)."""
    if not (a > 0.0 and temperature > 0.0):
        raise InvalidInput("a and T must be > 0")
    return -temperature * _ZETA3 / (8.0 * math.pi * a * a)


def asymptote_graphene_metal_highT(
    a: float, temperature: float, alpha: float, n_species: int, v_f: float
) -> tuple[float, float]:
    """High-temperature zero-mode terms of a graphene sheet facing an ideal
    metal, returned as (TM, TE):

        TM = -T zeta(3) / (16 pi a^2)       (half of the ideal-ideal value)
        TE = -alpha N v_F^2 / (192 pi a^3)  (T-independent, v_F^2-suppressed)
    """
    if not (a > 0.0 and temperature > 0.0 and alpha > 0.0 and v_f > 0.0):
        raise InvalidInput("a, T, alpha, v_f must be > 0")
    if n_species < 1:
        raise InvalidInput("n_species must be >= 1")
    f_tm = -temperature * _ZETA3 / (16.0 * math.pi * a * a)
    f_te = -alpha * n_species * v_f**2 / (192.0 * math.pi * a**3)
    return f_tm, f_te


def pressure(scene: PlanePlaneScene, tol: Tolerance = Tolerance()) -> float:
    """-d(energy per area)/da by Richardson-extrapolated central difference.

    Step is 1e-3 * a. Negative values mean attraction.
    """

    def energy_at(a: float) -> float:
        s = replace(scene, a=a)
        if scene.temperature > 0.0:
            return free_energy_per_area(s, tol)
        return energy_per_area_T0(s, tol)

    return -central_derivative(energy_at, scene.a, rel_step=1e-3)
