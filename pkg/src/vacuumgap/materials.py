"""Response models on the imaginary frequency axis.

Bulk permittivities eps(i*w), diagonal atomic polarizabilities alpha(i*w),
and the in-plane polarization of a thin fermion layer. Everything is in
natural units (hbar = c = k_B = 1); the CLI owns SI conversion.

All models are immutable after construction and safe to evaluate
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import IdealLimitRequested, InvalidInput

__all__ = [
    "DielectricModel",
    "IdealConductor",
    "ConstantEps",
    "PlasmaModel",
    "DrudeModel",
    "TabulatedEps",
    "epsilon_iw",
    "StaticPolarizability",
    "LorentzPolarizability",
    "Polarizability",
    "LayerPolarization",
    "CallableLayerPolarization",
    "GrapheneZeroModeModel",
    "graphene_pi00_zero_mode",
    "SuperconductorModel",
]


class DielectricModel:
    """Base class; subclasses provide eps(i*w) >= 1 for w > 0."""

    def eps_iw(self, omega: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class IdealConductor(DielectricModel):
    """Perfect conductor; has no finite permittivity on the imaginary axis."""

    def eps_iw(self, omega: float) -> float:
        raise IdealLimitRequested(
            "ideal conductor: use the ideal reflection limit (r_TE, r_TM) = (-1, +1)"
        )


@dataclass(frozen=True)
class ConstantEps(DielectricModel):
    eps0: float = 1.0

    def __post_init__(self):
        if self.eps0 < 1.0:
            raise InvalidInput(f"constant permittivity must be >= 1, got {self.eps0}")

    def eps_iw(self, omega: float) -> float:
        return self.eps0


@dataclass(frozen=True)
class PlasmaModel(DielectricModel):
    """eps(i*w) = 1 + w_pl^2 / w^2."""

    omega_pl: float

    def __post_init__(self):
        if not self.omega_pl > 0.0:
            raise InvalidInput(f"plasma frequency must be > 0, got {self.omega_pl}")

    def eps_iw(self, omega: float) -> float:
        if omega <= 0.0:
            raise InvalidInput("eps(i*w) needs w > 0; the w = 0 point is a model limit")
        return 1.0 + (self.omega_pl / omega) ** 2


@dataclass(frozen=True)
class DrudeModel(DielectricModel):
    """eps(i*w) = 1 + w_pl^2 / (w * (w + gamma))."""

    omega_pl: float
    gamma: float

    def __post_init__(self):
        if not self.omega_pl > 0.0:
            raise InvalidInput(f"plasma frequency must be > 0, got {self.omega_pl}")
        if self.gamma < 0.0:
            raise InvalidInput(f"relaxation rate must be >= 0, got {self.gamma}")

    def eps_iw(self, omega: float) -> float:
        if omega <= 0.0:
            raise InvalidInput("eps(i*w) needs w > 0; the w = 0 point is a model limit")
        return 1.0 + self.omega_pl**2 / (omega * (omega + self.gamma))


class TabulatedEps(DielectricModel):
    """Permittivity from (w_i, eps(i*w_i)) samples.

    Interpolation is monotone cubic (PCHIP) in ln w, which keeps decade-wide
    optical tables smooth and overshoot-free; outside the grid the endpoint
    values are used (clamping, never extrapolation).
    """

    def __init__(self, omega: Sequence[float], eps: Sequence[float]):
        omega = np.asarray(omega, dtype=float)
        eps = np.asarray(eps, dtype=float)
        if omega.ndim != 1 or omega.shape != eps.shape or omega.size < 2:
            raise InvalidInput("tabulated grid needs matching 1-d arrays, length >= 2")
        if np.any(omega <= 0.0):
            raise InvalidInput("tabulated frequencies must be > 0")
        if np.any(np.diff(omega) <= 0.0):
            raise InvalidInput("tabulated frequencies must be strictly increasing")
        if np.any(eps < 1.0):
            raise InvalidInput("tabulated eps(i*w) values must be >= 1")
        self._lo = float(omega[0])
        self._hi = float(omega[-1])
        self._eps_lo = float(eps[0])
        self._eps_hi = float(eps[-1])
        self._interp = PchipInterpolator(np.log(omega), eps, extrapolate=False)

    def eps_iw(self, omega: float) -> float:
        if omega <= 0.0:
            raise InvalidInput("eps(i*w) needs w > 0; the w = 0 point is a model limit")
        if omega <= self._lo:
            return self._eps_lo
        if omega >= self._hi:
            return self._eps_hi
        return float(self._interp(math.log(omega)))

    def eps_at_zero(self) -> float:
        """Low-frequency clamp value, used for the w -> 0 reflection limit."""
        return self._eps_lo


def epsilon_iw(model: DielectricModel, omega: float) -> float:
    """Permittivity of ``model`` at imaginary frequency i*omega, omega > 0.

    Raises IdealLimitRequested for the ideal conductor, whose reflection pair
    is an analytic limit rather than a finite permittivity.
    """
    return model.eps_iw(omega)


@dataclass(frozen=True)
class StaticPolarizability:
    """alpha(i*w) = alpha0."""

    alpha0: float

    def __post_init__(self):
        if self.alpha0 < 0.0:
            raise InvalidInput(f"polarizability must be >= 0, got {self.alpha0}")

    def __call__(self, omega: float) -> float:
        return self.alpha0


@dataclass(frozen=True)
class LorentzPolarizability:
    """Single oscillator: alpha(i*w) = alpha0 * w0^2 / (w0^2 + w^2)."""

    alpha0: float
    omega0: float

    def __post_init__(self):
        if self.alpha0 < 0.0:
            raise InvalidInput(f"polarizability must be >= 0, got {self.alpha0}")
        if not self.omega0 > 0.0:
            raise InvalidInput(f"resonance must be > 0, got {self.omega0}")

    def __call__(self, omega: float) -> float:
        w02 = self.omega0**2
        return self.alpha0 * w02 / (w02 + omega * omega)


@dataclass(frozen=True)
class Polarizability:
    """Diagonal polarizability tensor; components are callables of i*w."""

    xx: Callable[[float], float]
    yy: Callable[[float], float]
    zz: Callable[[float], float]

    @classmethod
    def isotropic(cls, component: Callable[[float], float]) -> "Polarizability":
        return cls(component, component, component)

    def in_plane_isotropic(self) -> bool:
        return self.xx is self.yy or self.xx == self.yy


class LayerPolarization:
    """Polarization of a 2+1 layer: Pi_00 and tr Pi as functions of (i*w, k).

    The longitudinal and transverse in-plane components are derived so the
    gauge identity w^2 Pi_00 = k^2 Pi_ll holds by construction:

        Pi_ll = w^2 Pi_00 / k^2
        Pi_pp = Pi_00 (w^2 + k^2) / k^2 - tr Pi
    """

    def pi00(self, omega: float, k: float) -> float:
        raise NotImplementedError

    def tr_pi(self, omega: float, k: float) -> float:
        raise NotImplementedError

    def pi_ll(self, omega: float, k: float) -> float:
        if k <= 0.0:
            raise InvalidInput("pi_ll needs k > 0")
        return omega * omega * self.pi00(omega, k) / (k * k)

    def pi_pp(self, omega: float, k: float) -> float:
        if k <= 0.0:
            raise InvalidInput("pi_pp needs k > 0")
        w2 = omega * omega
        return self.pi00(omega, k) * (w2 + k * k) / (k * k) - self.tr_pi(omega, k)


@dataclass(frozen=True)
class CallableLayerPolarization(LayerPolarization):
    """Wraps user functions pi00(w, k), tr_pi(w, k)."""

    pi00_fn: Callable[[float, float], float]
    tr_pi_fn: Callable[[float, float], float]

    def pi00(self, omega, k):
        return self.pi00_fn(omega, k)

    def tr_pi(self, omega, k):
        return self.tr_pi_fn(omega, k)


@dataclass(frozen=True)
class GrapheneZeroModeModel(LayerPolarization):
    """Gapless, undoped graphene-like layer at the zero Matsubara frequency.

    Valid at w = 0 and small k only:

        Pi_00(0, k)          = 4 alpha N T ln2 / v_F^2 + alpha N k^2 / (12 T)
        tr Pi(0, k) - Pi_00  = alpha N v_F^2 k^2 / (6 T)

    The full finite-temperature layer polarization is not modeled here; any
    complete model can be plugged in through LayerPolarization instead.
    """

    alpha: float
    v_f: float
    temperature: float
    n_species: int = 4

    def __post_init__(self):
        if self.alpha < 0.0:
            raise InvalidInput(f"coupling must be >= 0, got {self.alpha}")
        if not 0.0 < self.v_f:
            raise InvalidInput(f"Fermi velocity must be > 0, got {self.v_f}")
        if not self.temperature > 0.0:
            raise InvalidInput(f"temperature must be > 0, got {self.temperature}")
        if self.n_species < 1:
            raise InvalidInput(f"species count must be >= 1, got {self.n_species}")

    def _check_zero_mode(self, omega: float):
        if omega != 0.0:
            raise InvalidInput(
                "GrapheneZeroModeModel is valid only at the zero Matsubara frequency"
            )

    def pi00(self, omega: float, k: float) -> float:
        self._check_zero_mode(omega)
        an = self.alpha * self.n_species
        return (
            4.0 * an * self.temperature * math.log(2.0) / self.v_f**2
            + an * k * k / (12.0 * self.temperature)
        )

    def tr_pi(self, omega: float, k: float) -> float:
        self._check_zero_mode(omega)
        an = self.alpha * self.n_species
        return self.pi00(omega, k) + an * self.v_f**2 * k * k / (6.0 * self.temperature)

    def pi_pp(self, omega: float, k: float) -> float:
        # at w = 0 the generic accessor collapses to Pi_00 - tr Pi, which
        # differ here at the 1e-10 level on a 1e+4 background; evaluate the
        # difference analytically instead
        self._check_zero_mode(omega)
        if k <= 0.0:
            raise InvalidInput("pi_pp needs k > 0")
        an = self.alpha * self.n_species
        return -an * self.v_f**2 * k * k / (6.0 * self.temperature)


def graphene_pi00_zero_mode(model: GrapheneZeroModeModel, k: float) -> float:
    """Pi_00(i*w = 0, k) of the graphene zero-mode expansion, k >= 0."""
    if k < 0.0:
        raise InvalidInput(f"k must be >= 0, got {k}")
    return model.pi00(0.0, k)


@dataclass(frozen=True)
class SuperconductorModel:
    """Zero-frequency transverse response Pi_tr(0, k) = m0^2 + gamma*k^2.

    Applies at w = 0 and small k; the quadratic expansion has no stated range
    of validity in k, so no cutoff is imposed here.
    """

    m0: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.m0 < 0.0:
            raise InvalidInput(f"photon mass scale must be >= 0, got {self.m0}")
        if self.gamma <= -1.0:
            raise InvalidInput(f"gamma must be > -1, got {self.gamma}")
