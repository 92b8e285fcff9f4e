"""Energy of an anisotropic atom above a flat surface at T = 0.

Two equivalent routes are implemented on purpose. The explicit double
integral over (w, k) splits into an in-plane term weighted by
alpha_xx + alpha_yy and a normal term weighted by alpha_zz:

    E = (1/(2pi)^2) int dw (a_xx + a_yy)(i w)
          int dk k [w^2 (r_TE - r_TM) - r_TM k^2] e^{-2 a q} / (4 q)
      - (1/(2pi)^2) int dw a_zz(i w)
          int dk k r_TM k^2 e^{-2 a q} / (2 q),            q = sqrt(w^2+k^2).

The propagator route contracts the atom's in-plane-isotropic response
(Pi_at ~ alpha w^2) with half-space propagator components D_ll, D_pp, D_zz;
for a perfectly conducting plane the w-integral collapses to a closed
1-d form. Agreement between the routes is a regression target, not an
accident of shared code: they are evaluated through separate integrands.

Polarizabilities are in Heaviside-Lorentz natural units ((energy)^-3);
Gaussian-unit volumes differ by a factor 4*pi (handled in the CLI only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InvalidInput
from .materials import Polarizability
from .quadrature import Tolerance, integrate_semi_infinite
from .reflection import ReflectionProvider

__all__ = [
    "PerfectConductor",
    "PERFECT_CONDUCTOR",
    "AtomScene",
    "HalfSpacePropagatorComponents",
    "cp_energy_perfect_conductor",
    "cp_energy_dielectric",
    "cp_energy_via_propagators",
]

_U_CUTOFF = 700.0
_FOUR_PI_SQ = 4.0 * math.pi * math.pi


class PerfectConductor:
    """Marker surface for the closed-form perfectly conducting plane."""

    def __repr__(self):
        return "PERFECT_CONDUCTOR"


PERFECT_CONDUCTOR = PerfectConductor()


@dataclass(frozen=True)
class AtomScene:
    """An atom with diagonal polarizability at height ``a`` above a surface."""

    polarizability: Polarizability
    a: float
    surface: Union[PerfectConductor, ReflectionProvider] = PERFECT_CONDUCTOR

    def __post_init__(self):
        if not self.a > 0.0:
            raise InvalidInput(f"atom-surface distance must be > 0, got {self.a}")


def cp_energy_perfect_conductor(
    scene: AtomScene, tol: Tolerance = Tolerance(rel=1e-10, abs=1e-16)
) -> float:
    """Atom above a perfectly conducting plane (closed 1-d integral):

    E = -(1/(64 pi^2 a^3)) int_0^inf dw [ (a_xx + a_yy)(4 w^2 a^2 + 2 w a + 1)
                                        + 2 a_zz (2 w a + 1) ] e^{-2 w a}.
    """
    if not isinstance(scene.surface, PerfectConductor):
        raise InvalidInput("scene.surface must be PERFECT_CONDUCTOR here")
    a = scene.a
    pol = scene.polarizability

    def integrand(w: float) -> float:
        wa = w * a
        if 2.0 * wa > _U_CUTOFF:
            return 0.0
        damp = math.exp(-2.0 * wa)
        planar = (pol.xx(w) + pol.yy(w)) * (4.0 * wa * wa + 2.0 * wa + 1.0)
        normal = 2.0 * pol.zz(w) * (2.0 * wa + 1.0)
        return (planar + normal) * damp

    value = integrate_semi_infinite(integrand, tol).value
    return -value / (64.0 * math.pi**2 * a**3)


def _require_provider(scene: AtomScene) -> ReflectionProvider:
    if isinstance(scene.surface, PerfectConductor):
        raise InvalidInput(
            "scene.surface must be a reflection provider; use "
            "cp_energy_perfect_conductor for the ideal plane"
        )
    return scene.surface


def cp_energy_dielectric(
    scene: AtomScene, tol: Tolerance = Tolerance(rel=1e-10, abs=1e-16)
) -> float:
    """Atom above a surface described by a reflection provider.

    Nested quadrature, outer w then inner k with u = 2 a q; the integrand is
    assembled exactly in the printed two-term split (in-plane / normal).
    """
    provider = _require_provider(scene)
    a = scene.a
    pol = scene.polarizability
    inner_tol = Tolerance(rel=0.1 * tol.rel, abs=0.1 * tol.abs)

    def outer(w: float) -> float:
        u_min = 2.0 * a * w
        if u_min > _U_CUTOFF:
            return 0.0
        a_planar = pol.xx(w) + pol.yy(w)
        a_normal = pol.zz(w)
        w2 = w * w

        def inner(v: float) -> float:
            u = u_min + v
            if u > _U_CUTOFF:
                return 0.0
            k2 = v * (v + 2.0 * u_min) / (4.0 * a * a)
            r = provider(w, math.sqrt(k2))
            damp = math.exp(-u)
            planar = a_planar * (w2 * (r.r_te - r.r_tm) - r.r_tm * k2) / (8.0 * a)
            normal = a_normal * r.r_tm * k2 / (4.0 * a)
            return (planar - normal) * damp

        return integrate_semi_infinite(inner, inner_tol).value

    return integrate_semi_infinite(outer, tol).value / _FOUR_PI_SQ


@dataclass(frozen=True)
class HalfSpacePropagatorComponents:
    """Reflected-wave propagator components above a surface at height ``a``.

    D_pp carries the sign of r_TE; D_ll and D_zz the sign of -r_TM; all decay
    as e^{-2 a q}. The 1/w^2 poles of D_ll and D_zz cancel against the w^2 of
    the atomic response, so quadrature nodes (which exclude w = 0) stay
    finite.
    """

    provider: ReflectionProvider
    a: float

    def _common(self, w: float, k: float):
        q = math.hypot(w, k)
        return self.provider(w, k), q, math.exp(-2.0 * self.a * q)

    def d_ll(self, w: float, k: float) -> float:
        r, q, damp = self._common(w, k)
        return -r.r_tm * q * damp / (2.0 * w * w * _FOUR_PI_SQ)

    def d_pp(self, w: float, k: float) -> float:
        r, q, damp = self._common(w, k)
        return r.r_te * damp / (2.0 * q * _FOUR_PI_SQ)

    def d_zz(self, w: float, k: float) -> float:
        r, q, damp = self._common(w, k)
        return -r.r_tm * k * k * damp / (2.0 * w * w * q * _FOUR_PI_SQ)


def cp_energy_via_propagators(
    scene: AtomScene, tol: Tolerance = Tolerance(rel=1e-10, abs=1e-16)
) -> float:
    """Propagator-contraction form, valid for in-plane-isotropic atoms:

    E = int dw int dk k [ Pi_ll D_ll + Pi_pp D_pp + Pi_zz D_zz ],
    with Pi_ll = Pi_pp = alpha_I(i w) w^2 and Pi_zz = alpha_zz(i w) w^2.

    Must agree with ``cp_energy_dielectric`` on the same scene.
    """
    provider = _require_provider(scene)
    pol = scene.polarizability
    if not pol.in_plane_isotropic():
        raise InvalidInput("propagator form needs alpha_xx = alpha_yy")
    a = scene.a
    comps = HalfSpacePropagatorComponents(provider, a)
    inner_tol = Tolerance(rel=0.1 * tol.rel, abs=0.1 * tol.abs)

    def outer(w: float) -> float:
        if 2.0 * a * w > _U_CUTOFF:
            return 0.0
        pi_inplane = pol.xx(w) * w * w
        pi_normal = pol.zz(w) * w * w
        u_min = 2.0 * a * w

        def inner(v: float) -> float:
            u = u_min + v
            if u > _U_CUTOFF:
                return 0.0
            k = math.sqrt(v * (v + 2.0 * u_min)) / (2.0 * a)
            # measure: int dk k (...) = int du u/(4 a^2) (...)
            jac = u / (4.0 * a * a)
            contracted = (
                pi_inplane * (comps.d_ll(w, k) + comps.d_pp(w, k))
                + pi_normal * comps.d_zz(w, k)
            )
            return jac * contracted

        return integrate_semi_infinite(inner, inner_tol).value

    return integrate_semi_infinite(outer, tol).value
