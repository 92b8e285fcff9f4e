"""Flat-interface reflection coefficients at one imaginary-frequency point.

Covers bulk dielectrics (Fresnel), the ideal conductor, superconductors at
zero frequency, and thin layers of 2+1 fermions. All coefficients are
evaluated after Wick rotation; square roots are the positive real branch
(every radicand is positive on the imaginary axis).

The w = 0 Matsubara point is handled by analytic limits per model, never by
numerical extrapolation in w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import DegeneratePoint, InvalidInput
from .materials import (
    ConstantEps,
    DielectricModel,
    DrudeModel,
    IdealConductor,
    LayerPolarization,
    PlasmaModel,
    SuperconductorModel,
    TabulatedEps,
)

__all__ = [
    "ReflectionPair",
    "KPoint",
    "ReflectionProvider",
    "fresnel",
    "fresnel_provider",
    "layer_reflection",
    "layer_reflection_pi00_form",
    "layer_provider",
    "superconductor_zero_freq",
    "superconductor_zero_mode_provider",
    "ideal_provider",
    "constant_pair_provider",
]


class ReflectionPair(NamedTuple):
    """(r_TE, r_TM) at one (w, k) point; r_TE in (-1, 0], r_TM in [0, 1] for
    passive media on the imaginary axis."""

    r_te: float
    r_tm: float


@dataclass(frozen=True)
class KPoint:
    """Imaginary-axis frequency magnitude and transverse momentum."""

    omega: float
    k: float

    def __post_init__(self):
        if self.omega < 0.0 or self.k < 0.0:
            raise InvalidInput(f"omega and k must be >= 0, got ({self.omega}, {self.k})")


# A reflection provider maps (omega, k) to a ReflectionPair; scenes hold
# providers so that any evaluator below can be partially applied to a model.
ReflectionProvider = Callable[[float, float], ReflectionPair]


def fresnel(model: DielectricModel, p: KPoint) -> ReflectionPair:
    """Fresnel pair of a bulk medium at (i*w, k).

    With q_v = sqrt(w^2 + k^2) and q_m = sqrt(eps(i*w) w^2 + k^2):

        r_TM = (eps q_v - q_m) / (eps q_v + q_m)
        r_TE = (q_v - q_m) / (q_v + q_m)

    At w = 0 exactly the per-model limits are used: the ideal conductor gives
    (-1, +1) everywhere; plasma keeps its TE response through
    q_m = sqrt(w_pl^2 + k^2) and reflects TM perfectly; Drude gives (0, 1);
    finite-permittivity models give (0, (eps - 1)/(eps + 1)).
    """
    w, k = p.omega, p.k
    if w == 0.0 and k == 0.0:
        raise DegeneratePoint("fresnel undefined at omega = k = 0")
    if isinstance(model, IdealConductor):
        return ReflectionPair(-1.0, 1.0)
    if w == 0.0:
        if isinstance(model, PlasmaModel):
            q_m = math.hypot(model.omega_pl, k)
            return ReflectionPair((k - q_m) / (k + q_m), 1.0)
        if isinstance(model, DrudeModel):
            return ReflectionPair(0.0, 1.0)
        if isinstance(model, (ConstantEps, TabulatedEps)):
            # eps*w^2 -> 0, q_m -> k: TE interface disappears; TM keeps the
            # electrostatic contrast eps(0) taken as the low-frequency clamp.
            eps = model.eps0 if isinstance(model, ConstantEps) else model.eps_at_zero()
            return ReflectionPair(0.0, (eps - 1.0) / (eps + 1.0))
        raise InvalidInput(f"no w = 0 limit rule for model {type(model).__name__}")
    eps = model.eps_iw(w)
    # same expression for both roots so that eps = 1 cancels exactly
    q_v = math.sqrt(w * w + k * k)
    q_m = math.sqrt(eps * w * w + k * k)
    return ReflectionPair(
        (q_v - q_m) / (q_v + q_m),
        (eps * q_v - q_m) / (eps * q_v + q_m),
    )


def fresnel_provider(model: DielectricModel) -> ReflectionProvider:
    """Partially apply ``fresnel`` to a model."""

    def provider(omega: float, k: float) -> ReflectionPair:
        return fresnel(model, KPoint(omega, k))

    return provider


def layer_reflection(pi: LayerPolarization, p: KPoint) -> ReflectionPair:
    """Reflection pair of a 2+1-fermion layer from its polarization.

        r_TE = Pi_pp / (2 sqrt(w^2 + k^2) - Pi_pp)
        r_TM = X / (1 + X),   X = sqrt(w^2 + k^2) * Pi_00 / (2 k^2)

    The TM form is written through Pi_00 so that the w -> 0 limit is built
    in; the sign of X follows the convention under which r_TM lies in [0, 1)
    for a passive layer (the gauge identity fixes only w^2 Pi_00 = k^2 Pi_ll,
    not the overall imaginary-axis sign).
    """
    w, k = p.omega, p.k
    if w == 0.0 and k == 0.0:
        raise DegeneratePoint("layer reflection undefined at omega = k = 0")
    if k == 0.0:
        raise InvalidInput("layer reflection needs k > 0 (in-plane response divides by k^2)")
    q = math.hypot(w, k)
    pi00 = pi.pi00(w, k)
    pi_pp = pi.pi_pp(w, k)
    r_te = pi_pp / (2.0 * q - pi_pp)
    x = q * pi00 / (2.0 * k * k)
    if math.isinf(x):
        r_tm = 1.0
    else:
        r_tm = x / (1.0 + x)
    return ReflectionPair(r_te, r_tm)


def layer_reflection_pi00_form(pi: LayerPolarization, p: KPoint) -> ReflectionPair:
    """Same coefficients written through (Pi_00, tr Pi) and k_z = i*sqrt(w^2+k^2).

        r_TM = k_z Pi_00 / (k_z Pi_00 + 2 i k^2)
        r_TE = -(k_z^2 Pi_00 + k^2 tr Pi) / (k_z^2 Pi_00 + k^2 (tr Pi - 2 i k_z))

    Kept as an independent algebraic route; it must agree with
    ``layer_reflection`` whenever the gauge identity holds.
    """
    w, k = p.omega, p.k
    if w == 0.0 and k == 0.0:
        raise DegeneratePoint("layer reflection undefined at omega = k = 0")
    if k == 0.0:
        raise InvalidInput("layer reflection needs k > 0")
    kz = 1j * math.hypot(w, k)
    pi00 = pi.pi00(w, k)
    trpi = pi.tr_pi(w, k)
    k2 = k * k
    r_tm = (kz * pi00) / (kz * pi00 + 2j * k2)
    r_te = -(kz * kz * pi00 + k2 * trpi) / (kz * kz * pi00 + k2 * (trpi - 2j * kz))
    return ReflectionPair(float(r_te.real), float(r_tm.real))


def layer_provider(pi: LayerPolarization) -> ReflectionProvider:
    def provider(omega: float, k: float) -> ReflectionPair:
        return layer_reflection(pi, KPoint(omega, k))

    return provider


def superconductor_zero_freq(model: SuperconductorModel, k: float) -> ReflectionPair:
    """Zero-frequency pair of a superconducting half space, small k.

        r_TM = 1
        r_TE = (q_v - q_m) / (q_v + q_m),  q_v = k, q_m = sqrt(m0^2/(1+gamma) + k^2)

    The quadratic response expansion holds for small k only; the model is
    exposed at all k without an imposed cutoff.
    """
    if not k > 0.0:
        raise InvalidInput(f"k must be > 0, got {k}")
    q_m = math.sqrt(model.m0**2 / (1.0 + model.gamma) + k * k)
    return ReflectionPair((k - q_m) / (k + q_m), 1.0)


def superconductor_zero_mode_provider(model: SuperconductorModel) -> ReflectionProvider:
    """Provider wrapping the zero-frequency superconductor pair.

    Only the w = 0 point is defined; callers evaluating other thermal terms
    must model the finite-frequency response separately.
    """

    def provider(omega: float, k: float) -> ReflectionPair:
        if omega != 0.0:
            raise InvalidInput(
                "superconductor response is modeled at zero frequency only"
            )
        return superconductor_zero_freq(model, k)

    return provider


def ideal_provider() -> ReflectionProvider:
    """Provider that is (-1, +1) everywhere (perfect conductor)."""

    def provider(omega: float, k: float) -> ReflectionPair:
        return ReflectionPair(-1.0, 1.0)

    return provider


def constant_pair_provider(r_te: float, r_tm: float) -> ReflectionProvider:
    """Provider with fixed coefficients; handy for limits and tests."""
    pair = ReflectionPair(r_te, r_tm)

    def provider(omega: float, k: float) -> ReflectionPair:
        return pair

    return provider
