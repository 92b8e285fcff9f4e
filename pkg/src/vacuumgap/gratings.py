"""Scattering-matrix theory of two parallel 1-d gratings with equal period.

Fields outside the corrugation are expanded in diffraction orders
alpha_n = k_x + 2*pi*n/d with imaginary-axis z-decay kappa_n =
sqrt(w^2 + k_y^2 + alpha_n^2); the two longitudinal components (E_y, B_y)
label the polarization blocks, so a reflection matrix has dimension
2(2J+1) for mode truncation J. The energy per unit area is a log-det over
round trips of the lower-grating matrix and the upper-grating matrix
translated across the gap by the diagonal damping matrix K(L) and the
lateral-shift phase matrix Q(s).

Conventions fixed here (and validated by the flat-limit reduction to the
plane-plane formula at every node):

* all z-wavenumbers are continued uniformly as beta_n -> i*kappa_n;
* the upper grating is described by the profile of its upside-down mirror
  image as seen by downward waves; translating that matrix into the upward
  matrix flips the sign of the B_y amplitudes (mirror parity of the
  magnetic field), applied as a cross-block sign conjugation before the
  K/Q sandwich.

Perfectly conducting profiles are solved by Rayleigh point matching:
tangential electric field components are forced to zero on z = g(x) at
oversampled collocation points in least squares, with a condition-number
gate and an a-posteriori boundary-residual check at denser test points, so
deep profiles fail loudly instead of silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
import scipy.linalg

from .errors import (
    DegeneratePoint,
    IllConditioned,
    InvalidInput,
    NonConvergence,
    ResidualTooLarge,
)
from .materials import DielectricModel
from .quadrature import (
    MatsubaraConfig,
    Tolerance,
    integrate_finite,
    integrate_semi_infinite,
    log_det_one_minus,
    matsubara_sum,
)
from .reflection import KPoint, fresnel

__all__ = [
    "RayleighBasis",
    "FlatProfile",
    "PerfectConductorProfile",
    "sinusoidal_profile",
    "GratingScene",
    "flat_reflection_matrix",
    "pc_profile_reflection_matrix",
    "flip_updown",
    "transform_up",
    "round_trip_matrix",
    "grating_energy_T0",
    "grating_free_energy",
    "lateral_force",
]

# beyond this gap damping the round-trip matrix is zero to double precision
_DAMP_CUTOFF = 120.0
# exponent guard for the incident-side growth e^{+kappa g} in collocation
_GROWTH_LIMIT = 300.0


@dataclass(frozen=True)
class RayleighBasis:
    """Diffraction-order basis at one (w, k_x, k_y) node.

    Modes run n = -J..J; the matrix dimension is 2(2J+1) with the E_y block
    first and the B_y block second.
    """

    j_max: int
    period: float
    k_x: float
    k_y: float
    omega: float

    def __post_init__(self):
        if self.j_max < 0:
            raise InvalidInput(f"truncation order must be >= 0, got {self.j_max}")
        if not self.period > 0.0:
            raise InvalidInput(f"period must be > 0, got {self.period}")
        if self.omega < 0.0:
            raise InvalidInput(f"omega must be >= 0, got {self.omega}")
        bz = math.pi / self.period
        if abs(self.k_x) > bz * (1.0 + 1e-12):
            raise InvalidInput(f"k_x = {self.k_x} outside the Brillouin zone [{-bz}, {bz}]")

    @property
    def n_modes(self) -> int:
        return 2 * self.j_max + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def alphas(self) -> np.ndarray:
        n = np.arange(-self.j_max, self.j_max + 1, dtype=float)
        return self.k_x + 2.0 * math.pi * n / self.period

    def kappas(self) -> np.ndarray:
        a = self.alphas()
        return np.sqrt(self.omega**2 + self.k_y**2 + a * a)


@dataclass(frozen=True)
class FlatProfile:
    """Degenerate grating: a flat interface of the given bulk model."""

    model: DielectricModel

    @property
    def depth(self) -> float:
        return 0.0


@dataclass(frozen=True)
class PerfectConductorProfile:
    """Perfectly conducting surface z = height(x), 0 <= height <= depth.

    ``height`` must be periodic with the scene period; ``slope`` is its
    derivative (finite difference fallback when omitted).
    """

    height: Callable[[float], float]
    depth: float
    slope: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.depth < 0.0:
            raise InvalidInput(f"depth must be >= 0, got {self.depth}")

    @staticmethod
    def _eval(fn, x: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(fn(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.asarray([fn(xi) for xi in x], dtype=float)

    def slope_at(self, x: np.ndarray, period: float) -> np.ndarray:
        if self.slope is not None:
            return self._eval(self.slope, x)
        h = 1e-6 * period
        return (self._eval(self.height, x + h) - self._eval(self.height, x - h)) / (
            2.0 * h
        )

    def height_at(self, x: np.ndarray) -> np.ndarray:
        return self._eval(self.height, x)


def sinusoidal_profile(depth: float, period: float) -> PerfectConductorProfile:
    """g(x) = (depth/2) (1 - cos 2 pi x / period), with analytic slope."""
    w = 2.0 * math.pi / period

    def g(x):
        return 0.5 * depth * (1.0 - np.cos(w * x))

    def gp(x):
        return 0.5 * depth * w * np.sin(w * x)

    return PerfectConductorProfile(g, depth, gp)


GratingProfile = Union[FlatProfile, PerfectConductorProfile]


@dataclass(frozen=True)
class GratingScene:
    """Two grating profiles separated by a vacuum gap.

    ``upper`` is the upside-down mirror image of the physical upper body,
    parameterized exactly like ``lower`` (height measured into the gap);
    the reference planes are ``separation`` apart and the upper grating is
    shifted laterally by ``shift``. Periods coincide by construction, and
    every result is periodic in the shift, so [0, period) is canonical but
    any finite value is accepted.
    """

    lower: GratingProfile
    upper: GratingProfile
    separation: float
    period: float
    shift: float = 0.0
    temperature: float = 0.0

    def __post_init__(self):
        if not self.period > 0.0:
            raise InvalidInput(f"period must be > 0, got {self.period}")
        if not math.isfinite(self.shift):
            raise InvalidInput(f"shift must be finite, got {self.shift}")
        if self.temperature < 0.0:
            raise InvalidInput(f"temperature must be >= 0, got {self.temperature}")
        gap = self.separation - self.lower.depth - self.upper.depth
        if not gap > 0.0:
            raise InvalidInput(
                "separation must exceed the sum of profile depths "
                f"({self.separation} <= {self.lower.depth} + {self.upper.depth})"
            )
        for prof in (self.lower, self.upper):
            if isinstance(prof, PerfectConductorProfile):
                x = np.linspace(0.0, self.period, 64, endpoint=False)
                g = prof.height_at(x)
                if np.any(g < -1e-12) or np.any(g > prof.depth * (1.0 + 1e-9) + 1e-12):
                    raise InvalidInput("profile height leaves the band [0, depth]")


def _frame_factors(alpha: float, kappa: float, omega: float, k_y: float):
    """Normalized (c, s) of the per-mode (E_y, B_y) <-> (TE, TM) frame.

    Proportional to (alpha * w, kappa * k_y); the common positive factor
    w * k_t drops out. The direction is undefined only at the measure-zero
    point where both vanish.
    """
    c = alpha * omega
    s = kappa * k_y
    norm = math.hypot(c, s)
    if norm == 0.0:
        if omega > 0.0:
            return 1.0, 0.0  # normal incidence: polarizations degenerate
        raise DegeneratePoint(
            "polarization frame undefined at omega = k_y = alpha_n = 0"
        )
    return c / norm, s / norm


def flat_reflection_matrix(model: DielectricModel, basis: RayleighBasis) -> np.ndarray:
    """Reflection matrix of a flat interface, block-diagonal in mode index.

    Each mode's 2x2 block carries the Fresnel pair at transverse momentum
    k_n = sqrt(k_y^2 + alpha_n^2) rotated from the (TE, TM) frame into the
    (E_y, B_y) frame:

        [ c^2 r_TE - s^2 r_TM    c s (r_TE + r_TM) ]
        [ -c s (r_TE + r_TM)     c^2 r_TM - s^2 r_TE ]

    At k_y = 0 this is diag(r_TE, r_TM); at w = 0 it is
    diag(-r_TM, -r_TE) (the electrostatic E_y reflects like TM).
    """
    n_modes = basis.n_modes
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    alphas = basis.alphas()
    kappas = basis.kappas()
    w, k_y = basis.omega, basis.k_y
    for i in range(n_modes):
        k_n = math.hypot(k_y, alphas[i])
        pair = fresnel(model, KPoint(w, k_n))
        c, s = _frame_factors(alphas[i], kappas[i], w, k_y)
        cross = c * s * (pair.r_te + pair.r_tm)
        out[i, i] = c * c * pair.r_te - s * s * pair.r_tm
        out[i, n_modes + i] = cross
        out[n_modes + i, i] = -cross
        out[n_modes + i, n_modes + i] = c * c * pair.r_tm - s * s * pair.r_te
    return out


def _collocation_system(profile, basis: RayleighBasis, padding: int,
                        n_points: int, offset: float):
    """Boundary-condition rows at ``n_points`` surface points.

    Unknown columns are the reflected amplitudes of the *padded* order set
    n = -(J+P)..(J+P); right-hand-side columns are the incident modes of the
    central orders m = -J..J only. Padding absorbs the mode coupling that
    would otherwise fall outside the truncation for the edge incident
    orders (the reflected response to incident order m leaks into orders
    m +- 1, m +- 2, ...).

    w > 0 imposes E_y = 0 and E_x + g' E_z = 0, which per mode reads

        sum_n [ k_y (alpha_n + i g' kappa_n) e_n
              + (i w g' alpha_n + w kappa_n) b_n ] E_n(x) = -(incident),

    w = 0 decouples: E_y = 0 fixes the E block, the normal-field condition
    (g' d_x - d_z) B_y = 0 fixes the B block.
    """
    d = basis.period
    x = (np.arange(n_points) + offset) * (d / n_points)
    g = profile.height_at(x)
    gp = profile.slope_at(x, d)
    jp = basis.j_max + padding
    n_all = np.arange(-jp, jp + 1, dtype=float)
    alphas = basis.k_x + 2.0 * math.pi * n_all / d
    kappas = np.sqrt(basis.omega**2 + basis.k_y**2 + alphas * alphas)
    if np.max(kappas) * max(float(np.max(g)), 0.0) > _GROWTH_LIMIT:
        raise IllConditioned(
            "incident-side growth e^{kappa g} overflows; profile too deep for "
            "this truncation/frequency"
        )
    cen = slice(padding, padding + basis.n_modes)
    phase = np.exp(1j * np.outer(x, alphas))
    e_refl = phase * np.exp(-np.outer(g, kappas))
    e_inc = phase[:, cen] * np.exp(np.outer(g, kappas[cen]))

    n_unk = alphas.size
    n_inc = basis.n_modes
    w, k_y = basis.omega, basis.k_y
    gp_col = gp[:, None]
    a_row = alphas[None, :]
    k_row = kappas[None, :]
    ac_row = alphas[None, cen]
    kc_row = kappas[None, cen]

    a_mat = np.zeros((2 * n_points, 2 * n_unk), dtype=complex)
    b_mat = np.zeros((2 * n_points, 2 * n_inc), dtype=complex)
    a_mat[:n_points, :n_unk] = e_refl
    b_mat[:n_points, :n_inc] = -e_inc
    if w > 0.0:
        a_mat[n_points:, :n_unk] = k_y * (a_row + 1j * gp_col * k_row) * e_refl
        a_mat[n_points:, n_unk:] = (1j * w * gp_col * a_row + w * k_row) * e_refl
        b_mat[n_points:, :n_inc] = -(k_y * (ac_row - 1j * gp_col * kc_row)) * e_inc
        b_mat[n_points:, n_inc:] = -(1j * w * gp_col * ac_row - w * kc_row) * e_inc
    else:
        a_mat[n_points:, n_unk:] = (1j * gp_col * a_row + k_row) * e_refl
        b_mat[n_points:, n_inc:] = -(1j * gp_col * ac_row - kc_row) * e_inc

    scale = np.max(np.abs(a_mat), axis=1)
    scale[scale == 0.0] = 1.0
    return a_mat / scale[:, None], b_mat / scale[:, None]


def _solve_collocation(profile, basis, padding, residual_tol, cond_limit):
    """One padded least-squares solve; returns (matrix, residual) or raises
    IllConditioned."""
    n_unknown_orders = 2 * (basis.j_max + padding) + 1
    n_points = max(2 * n_unknown_orders, 4 * basis.n_modes)
    a_mat, b_mat = _collocation_system(profile, basis, padding, n_points, 0.5)
    # economic QR: cond(A) = cond(R) exactly, and R is small enough that a
    # full SVD of it costs nothing compared to the factorization
    q_mat, r_mat = scipy.linalg.qr(a_mat, mode="economic", check_finite=False)
    sing = np.linalg.svd(r_mat, compute_uv=False)
    if sing[-1] <= 0.0 or sing[0] / sing[-1] > cond_limit:
        raise IllConditioned(
            f"collocation condition number {sing[0] / max(sing[-1], 1e-300):.3e} "
            f"exceeds {cond_limit:.1e}; profile too deep for the Rayleigh solver"
        )
    refl = scipy.linalg.solve_triangular(
        r_mat, q_mat.conj().T @ b_mat, check_finite=False
    )
    a_test, b_test = _collocation_system(profile, basis, padding, 4 * n_points, 0.25)
    res = a_test @ refl - b_test
    inc_scale = np.max(np.abs(b_test), axis=0)
    inc_scale[inc_scale == 0.0] = 1.0
    worst = float(np.max(np.max(np.abs(res), axis=0) / inc_scale))
    return refl, worst


def pc_profile_reflection_matrix(
    profile: PerfectConductorProfile,
    basis: RayleighBasis,
    residual_tol: float = 1e-6,
    cond_limit: float = 1e12,
    padding: Optional[int] = None,
) -> np.ndarray:
    """Reflection matrix of a perfectly conducting corrugated surface.

    Rayleigh point matching in least squares, with the unknown order set
    padded beyond the output truncation until the boundary conditions are
    met on a 4x denser, offset test grid to ``residual_tol`` relative to
    the incident amplitude; the returned matrix is the central
    2(2J+1) x 2(2J+1) block. Collocation uses at least four points per
    output mode and twice as many boundary-condition rows as unknowns. A
    condition number beyond ``cond_limit`` or a residual that will not
    drop (both the practical signatures of the Rayleigh expansion failing
    for deep profiles) raise instead of returning silently wrong values.
    """
    if padding is not None:
        refl, worst = _solve_collocation(profile, basis, padding, residual_tol, cond_limit)
        if worst > residual_tol:
            raise ResidualTooLarge(
                f"boundary residual {worst:.3e} exceeds {residual_tol:.1e} "
                f"at padding {padding}"
            )
        return _central_block(refl, basis, padding)

    worst_seen = math.inf
    for pad in (4, 8, 12, 16, 20, 24):
        refl, worst = _solve_collocation(profile, basis, pad, residual_tol, cond_limit)
        if worst <= residual_tol:
            return _central_block(refl, basis, pad)
        worst_seen = min(worst_seen, worst)
    raise ResidualTooLarge(
        f"boundary residual {worst_seen:.3e} exceeds {residual_tol:.1e} even at "
        "padding 24; profile outside the reliable Rayleigh regime"
    )


def _central_block(refl: np.ndarray, basis: RayleighBasis, padding: int) -> np.ndarray:
    """Keep reflected orders |n| <= J of a padded solution."""
    n_inc = basis.n_modes
    n_unk = 2 * (basis.j_max + padding) + 1
    cen = slice(padding, padding + n_inc)
    out = np.empty((2 * n_inc, 2 * n_inc), dtype=complex)
    out[:n_inc, :n_inc] = refl[cen, :n_inc]
    out[:n_inc, n_inc:] = refl[cen, n_inc:]
    out[n_inc:, :n_inc] = refl[n_unk:, :n_inc][cen, :]
    out[n_inc:, n_inc:] = refl[n_unk:, n_inc:][cen, :]
    return out


def flip_updown(matrix: np.ndarray) -> np.ndarray:
    """Amplitude dictionary for a profile turned upside-down.

    Mirroring z flips the sign of B_y (axial vector) while E_y is
    unchanged, so the cross-polarization blocks change sign:
    R -> S R S with S = diag(+1 on the E block, -1 on the B block).
    """
    n = matrix.shape[0] // 2
    sv = np.ones(2 * n)
    sv[n:] = -1.0
    return matrix * np.outer(sv, sv)


def transform_up(
    r2_down: np.ndarray, basis: RayleighBasis, separation: float, shift: float
) -> np.ndarray:
    """Translate a downward reflection matrix into the upward one:

        R_up = Q*(s) K(L) R_down K(L) Q(s),

    with K = diag(e^{-L kappa_m}) and Q = diag(e^{2 pi i m s / d}), each
    repeated over both polarization blocks. The K damping keeps every entry
    finite.
    """
    if not separation > 0.0:
        raise InvalidInput(f"separation must be > 0, got {separation}")
    n = basis.n_modes
    m = np.arange(-basis.j_max, basis.j_max + 1, dtype=float)
    q = np.exp(2j * math.pi * m * shift / basis.period)
    kk = np.exp(-separation * basis.kappas())
    left = np.tile(np.conj(q) * kk, 2)
    right = np.tile(kk * q, 2)
    return left[:, None] * r2_down * right[None, :]


def _profile_matrix(
    profile: GratingProfile, basis: RayleighBasis, residual_tol: float
) -> np.ndarray:
    if isinstance(profile, FlatProfile):
        return flat_reflection_matrix(profile.model, basis)
    return pc_profile_reflection_matrix(profile, basis, residual_tol=residual_tol)


def round_trip_matrix(
    scene: GratingScene,
    j_max: int,
    omega: float,
    k_x: float,
    k_y: float,
    residual_tol: float = 1e-6,
) -> np.ndarray:
    """R_1down @ R_2up at one quadrature node."""
    basis = RayleighBasis(j_max, scene.period, k_x, k_y, omega)
    r1 = _profile_matrix(scene.lower, basis, residual_tol)
    if scene.upper is scene.lower:
        r2_down = r1
    else:
        r2_down = _profile_matrix(scene.upper, basis, residual_tol)
    r2_up = transform_up(flip_updown(r2_down), basis, scene.separation, scene.shift)
    return r1 @ r2_up


def _node_log_det_shifts(scene, j_max, omega, k_x, k_y, shifts, weights,
                         residual_tol) -> float:
    """Weighted combination of ln det over lateral shifts at one node.

    The reflection matrices do not depend on the shift, so finite-difference
    stencils in s reuse one collocation solve per node.
    """
    basis = RayleighBasis(j_max, scene.period, k_x, k_y, omega)
    r1 = _profile_matrix(scene.lower, basis, residual_tol)
    if scene.upper is scene.lower:
        r2_down = r1
    else:
        r2_down = _profile_matrix(scene.upper, basis, residual_tol)
    r2_flipped = flip_updown(r2_down)
    acc = 0.0
    for s, wgt in zip(shifts, weights):
        r2_up = transform_up(r2_flipped, basis, scene.separation, s)
        acc += wgt * log_det_one_minus(r1 @ r2_up)
    return acc


@lru_cache(maxsize=16)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_doubling(f: Callable[[float], float], a: float, b: float,
                 tol: Tolerance, start: int = 16, max_nodes: int = 256) -> float:
    """Gauss-Legendre on [a, b], node count doubled until the value settles."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    prev = None
    n = start
    while n <= max_nodes:
        x, w = _leggauss(n)
        val = half * math.fsum(wi * f(mid + half * xi) for xi, wi in zip(x, w))
        if prev is not None and abs(val - prev) <= tol.bound(val):
            return val
        prev = val
        n *= 2
    raise NonConvergence(
        f"Gauss-Legendre failed to settle within {max_nodes} nodes", estimate=prev
    )


def _residual_gate(tol: Tolerance) -> float:
    """Boundary-residual tolerance for energy runs: follows the requested
    accuracy, never looser than 1e-3 or tighter than 1e-8."""
    return min(max(tol.rel, 1e-8), 1e-3)


def _free_energy_shift_combination(
    scene: GratingScene,
    j_max: int,
    tol: Tolerance,
    shifts,
    weights,
    max_terms: int,
    stats: Optional[dict] = None,
) -> float:
    """sum_i weights_i * F(shift_i), evaluated in a single quadrature pass."""
    t = scene.temperature
    tol_ky = Tolerance(rel=0.2 * tol.rel, abs=0.2 * tol.abs)
    tol_kx = Tolerance(rel=0.05 * tol.rel, abs=0.05 * tol.abs)
    res_tol = _residual_gate(tol)
    bz = math.pi / scene.period
    two_l = 2.0 * scene.separation

    def term(n: int) -> float:
        omega = 2.0 * math.pi * n * t

        def over_ky(k_y: float) -> float:
            if two_l * math.hypot(omega, k_y) > _DAMP_CUTOFF:
                return 0.0
            # adaptive panels: the zero-mode integrand of ideally conducting
            # profiles is log-singular at the k_x -> 0 edge
            return integrate_finite(
                lambda k_x: _node_log_det_shifts(
                    scene, j_max, omega, k_x, k_y, shifts, weights, res_tol
                ),
                0.0, bz, tol_kx,
            ).value

        return integrate_semi_infinite(over_ky, tol_ky).value

    result = matsubara_sum(term, MatsubaraConfig(t, tol, max_terms))
    if stats is not None:
        stats["matsubara_terms"] = result.terms
        stats["j_used"] = j_max
    return t / math.pi**2 * result.value


def grating_free_energy(
    scene: GratingScene,
    j_max: int = 5,
    tol: Tolerance = Tolerance(rel=1e-7, abs=1e-12),
    max_terms: int = 10_000,
    stats: Optional[dict] = None,
) -> float:
    """Free energy per unit area of the two-grating scene at T > 0:

        F = (T / pi^2) sum'_n int_0^inf dk_y int_0^{pi/d} dk_x
                ln det(I - R_1down(i w_n) R_2up(i w_n, L, s)),

    with the n = 0 term at half weight. The restricted momentum ranges use
    the k_y and k_x parity of the integrand (asserted in tests, not assumed
    silently). The truncation order is taken as given here; convergence in J
    can be checked by calling twice.
    """
    if not scene.temperature > 0.0:
        raise InvalidInput("grating_free_energy needs T > 0; use grating_energy_T0")
    return _free_energy_shift_combination(
        scene, j_max, tol, [scene.shift], [1.0], max_terms, stats
    )


def grating_energy_T0(
    scene: GratingScene,
    j_max: int = 5,
    tol: Tolerance = Tolerance(rel=1e-7, abs=1e-12),
    j_step: int = 2,
    j_limit: int = 15,
    stats: Optional[dict] = None,
) -> float:
    """Casimir energy per unit area at T = 0.

    The (w, k_y) quarter plane is integrated in polar coordinates
    (w, k_y) = rho (cos th, sin th) so that the gap kernel decays along a
    single radial scale; the Brillouin-zone integral stays innermost. The
    truncation order is raised by ``j_step`` until the result moves by less
    than the tolerance.
    """
    if scene.temperature != 0.0:
        raise InvalidInput("grating_energy_T0 needs T = 0")
    tol_rho = Tolerance(rel=0.2 * tol.rel, abs=0.2 * tol.abs)
    tol_ang = Tolerance(rel=0.1 * tol.rel, abs=0.1 * tol.abs)
    tol_kx = Tolerance(rel=0.05 * tol.rel, abs=0.05 * tol.abs)
    res_tol = _residual_gate(tol)
    bz = math.pi / scene.period
    two_l = 2.0 * scene.separation

    def energy_at(j: int) -> float:
        def over_theta(theta: float) -> float:
            cw, sw = math.cos(theta), math.sin(theta)

            def over_rho(rho: float) -> float:
                if two_l * rho > _DAMP_CUTOFF:
                    return 0.0
                return rho * integrate_finite(
                    lambda k_x: _node_log_det_shifts(
                        scene, j, rho * cw, k_x, rho * sw,
                        (scene.shift,), (1.0,), res_tol,
                    ),
                    0.0, bz, tol_kx,
                ).value

            return integrate_semi_infinite(over_rho, tol_rho).value

        angular = _gl_doubling(over_theta, 0.0, 0.5 * math.pi, tol_ang)
        return angular / (2.0 * math.pi**3)

    value = energy_at(j_max)
    j = j_max
    while True:
        j_next = j + j_step
        if j_next > j_limit:
            raise NonConvergence(
                f"grating energy not converged in truncation order by J = {j}",
                estimate=value,
            )
        value_next = energy_at(j_next)
        if abs(value_next - value) <= tol.bound(value_next):
            if stats is not None:
                stats["j_used"] = j_next
            return value_next
        value, j = value_next, j_next


def lateral_force(
    scene: GratingScene,
    j_max: int = 5,
    tol: Tolerance = Tolerance(rel=1e-7, abs=1e-12),
    max_terms: int = 10_000,
) -> float:
    """-dF/ds by Richardson-extrapolated central difference, step d/200.

    Antisymmetric about shifts where the profiles align; integrates to zero
    over one period. The four-shift stencil is integrated in one quadrature
    pass (the reflection matrices are shift-independent), so the adaptive
    refinement resolves the force integrand directly rather than a
    difference of large energies.
    """
    if not scene.temperature > 0.0:
        raise InvalidInput("lateral_force differentiates the T > 0 free energy")
    d = scene.period
    h = d / 200.0
    s0 = scene.shift
    # -(4 D_{h/2} - D_h)/3 expanded over the four stencil points
    shifts = (s0 + h, s0 - h, s0 + 0.5 * h, s0 - 0.5 * h)
    weights = (1.0 / (6.0 * h), -1.0 / (6.0 * h), -4.0 / (3.0 * h), 4.0 / (3.0 * h))
    return _free_energy_shift_combination(
        scene, j_max, tol, shifts, weights, max_terms
    )
