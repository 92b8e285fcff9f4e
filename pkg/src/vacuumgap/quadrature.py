"""Reusable numerical engines.

Adaptive semi-infinite integration, thermal (Matsubara-type) summation with
geometric tail control, stable evaluation of Re ln det(I - M), and a
Richardson-extrapolated central derivative.

All routines are pure functions of their inputs; evaluations within one call
are reduced in a fixed order, so results are deterministic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    InvalidInput,
    NonConvergence,
    SingularMatrix,
    SpectralRadiusExceeded,
)

__all__ = [
    "Tolerance",
    "MatsubaraConfig",
    "IntegralResult",
    "SumResult",
    "integrate_semi_infinite",
    "integrate_finite",
    "matsubara_sum",
    "log_det_one_minus",
    "central_derivative",
]


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerance with an absolute floor."""

    rel: float = 1e-8
    abs: float = 1e-14

    def __post_init__(self):
        if not self.rel > 0.0:
            raise InvalidInput(f"Tolerance.rel must be > 0, got {self.rel}")
        if self.abs < 0.0:
            raise InvalidInput(f"Tolerance.abs must be >= 0, got {self.abs}")

    def bound(self, value: float) -> float:
        return max(self.rel * abs(value), self.abs)


@dataclass(frozen=True)
class MatsubaraConfig:
    """Temperature, tolerance and term cap for a thermal sum at w_n = 2*pi*n*T."""

    temperature: float
    tolerance: Tolerance = Tolerance()
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise InvalidInput(f"temperature must be > 0, got {self.temperature}")
        if self.max_terms < 1:
            raise InvalidInput(f"max_terms must be >= 1, got {self.max_terms}")


class IntegralResult(NamedTuple):
    value: float
    error: float
    neval: int


class SumResult(NamedTuple):
    value: float
    terms: int
    tail: float


# 15-point Kronrod nodes on [-1, 1] (positive half) and weights; the nodes at
# odd indices 1, 3, 5, 7 form the embedded 7-point Gauss rule.
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)


def _gk15(f: Callable[[float], float], a: float, b: float):
    """Gauss-Kronrod 15(7) on [a, b]; returns (K15, |K15 - G7|, neval)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)

    fc = f(mid)
    if not math.isfinite(fc):
        raise InvalidInput(f"integrand returned non-finite value at x={mid!r}")
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    neval = 1
    for i in range(7):
        dx = half * _XGK[i]
        f1 = f(mid - dx)
        f2 = f(mid + dx)
        if not (math.isfinite(f1) and math.isfinite(f2)):
            raise InvalidInput(
                f"integrand returned non-finite value near x={mid - dx!r} or x={mid + dx!r}"
            )
        s = f1 + f2
        resk += _WGK[i] * s
        if i % 2 == 1:
            resg += _WG[i // 2] * s
        neval += 2
    resk *= half
    resg *= half
    return resk, abs(resk - resg), neval


def integrate_semi_infinite(
    f: Callable[[float], float],
    tol: Tolerance = Tolerance(),
    max_panels: int = 4000,
) -> IntegralResult:
    """Integrate ``f`` over [0, inf) by adaptive panel refinement.

    The half line is mapped to [0, 1) by x = t/(1-t); panels on [0, 1] are
    refined with an embedded Gauss-Kronrod rule until the summed error
    estimate drops below ``max(rel*|I|, abs)``. Node points are interior, so
    ``f`` is never evaluated at x = 0 or at the (infinite) right endpoint.

    Parameters
    ----------
    f : callable
        Real-valued integrand on (0, inf). Must decay fast enough beyond a
        finite scale for the transformed integrand to vanish at t -> 1.
    tol : Tolerance
        Convergence target.
    max_panels : int
        Refinement budget; exceeding it raises NonConvergence.

    Returns
    -------
    IntegralResult
        ``value``, estimated ``error`` and the number of evaluations.
    """

    def g(t: float) -> float:
        onemt = 1.0 - t
        x = t / onemt
        return f(x) / (onemt * onemt)

    # Seed panels spanning x in (0,1), (1,9), (9, inf).
    seeds = ((0.0, 0.5), (0.5, 0.9), (0.9, 1.0))
    heap = []
    total = 0.0
    total_err = 0.0
    neval = 0
    counter = 0
    for a, b in seeds:
        val, err, n = _gk15(g, a, b)
        total += val
        total_err += err
        neval += n
        heapq.heappush(heap, (-err, counter, a, b, val))
        counter += 1

    panels = len(seeds)
    while total_err > tol.bound(total):
        if panels >= max_panels:
            raise NonConvergence(
                f"semi-infinite integral stalled at error {total_err:.3e} "
                f"(target {tol.bound(total):.3e}) after {panels} panels",
                estimate=total,
                error=total_err,
            )
        neg_err, _, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        v1, e1, n1 = _gk15(g, a, mid)
        v2, e2, n2 = _gk15(g, mid, b)
        total += (v1 + v2) - val
        total_err += (e1 + e2) - (-neg_err)
        neval += n1 + n2
        heapq.heappush(heap, (-e1, counter, a, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, b, v2))
        counter += 1
        panels += 1

    return IntegralResult(total, total_err, neval)


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = Tolerance(),
    max_panels: int = 2000,
) -> IntegralResult:
    """Adaptive Gauss-Kronrod panels on [a, b].

    Nodes are interior, and panel bisection clusters geometrically toward
    integrable endpoint singularities (log-type endpoints cost a logarithmic
    number of panels).
    """
    if not b > a:
        raise InvalidInput(f"need b > a, got [{a}, {b}]")
    total, total_err, neval = _gk15(f, a, b)
    heap = [(-total_err, 0, a, b, total)]
    counter = 1
    panels = 1
    while total_err > tol.bound(total):
        if panels >= max_panels:
            raise NonConvergence(
                f"finite integral stalled at error {total_err:.3e} "
                f"(target {tol.bound(total):.3e}) after {panels} panels",
                estimate=total,
                error=total_err,
            )
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1, n1 = _gk15(f, lo, mid)
        v2, e2, n2 = _gk15(f, mid, hi)
        total += (v1 + v2) - val
        total_err += (e1 + e2) - (-neg_err)
        neval += n1 + n2
        heapq.heappush(heap, (-e1, counter, lo, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2))
        counter += 1
        panels += 1
    return IntegralResult(total, total_err, neval)


def matsubara_sum(term: Callable[[int], float], cfg: MatsubaraConfig) -> SumResult:
    """Primed thermal sum ``term(0)/2 + sum_{n>=1} term(n)``.

    The remainder beyond the last computed term is bounded by fitting a single
    geometric ratio to the last three terms; once that bound meets the
    tolerance it is added as a signed correction (exact for a geometric tail).

    Raises
    ------
    NonConvergence
        If ``cfg.max_terms`` terms are consumed before the tail bound is met.
    InvalidInput
        If a term evaluates to a non-finite value.
    """
    t0 = term(0)
    if not math.isfinite(t0):
        raise InvalidInput("term(0) is not finite")
    total = 0.5 * t0
    recent = []  # last three |term| values
    n = 0
    while n < cfg.max_terms:
        n += 1
        tn = term(n)
        if not math.isfinite(tn):
            raise InvalidInput(f"term({n}) is not finite")
        total += tn
        recent.append(abs(tn))
        if len(recent) > 3:
            recent.pop(0)
        if len(recent) == 3:
            a, b, c = recent
            if c == 0.0 and b == 0.0:
                return SumResult(total, n, 0.0)
            ratios = [x / y for x, y in ((b, a), (c, b)) if y > 0.0]
            if ratios:
                r = max(ratios)
                if r < 1.0:
                    tail = abs(tn) * r / (1.0 - r)
                    if tail <= cfg.tolerance.bound(total):
                        correction = tn * r / (1.0 - r)
                        return SumResult(total + correction, n, tail)
    raise NonConvergence(
        f"Matsubara sum did not meet tolerance within {cfg.max_terms} terms",
        estimate=total,
    )


def log_det_one_minus(m: np.ndarray) -> float:
    """Re ln det(I - M) via pivoted LU, summing logs of pivot magnitudes.

    The determinant itself is never formed. The spectral radius of ``m`` must
    be below one; a cheap norm bound is tried first and an eigenvalue check
    certifies violations when the bound is inconclusive.

    Raises
    ------
    SpectralRadiusExceeded
        If the spectral radius of ``m`` is certified to be >= 1.
    SingularMatrix
        If a pivot magnitude underflows.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return 0.0
    absm = np.abs(m)
    norm_bound = min(absm.sum(axis=0).max(), absm.sum(axis=1).max())
    if norm_bound < 1e-6:
        # forming I - M would quantize entries below one ulp of 1; use
        # Re ln(1 - lambda) = log1p(-2 Re lambda + |lambda|^2) / 2 instead,
        # which keeps full relative precision for heavily damped round trips
        lam = np.linalg.eigvals(m)
        return float(0.5 * np.sum(np.log1p(-2.0 * lam.real + np.abs(lam) ** 2)))
    if norm_bound >= 1.0:
        rho = float(np.max(np.abs(np.linalg.eigvals(m))))
        if rho >= 1.0:
            raise SpectralRadiusExceeded(
                f"spectral radius {rho:.6g} >= 1; log det(I - M) undefined for the "
                "round-trip expansion"
            )
    a = np.eye(n, dtype=m.dtype) - m
    lu, _ = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    if np.any(diag < np.finfo(float).tiny):
        raise SingularMatrix("pivot underflow in LU of (I - M)")
    return float(np.sum(np.log(diag)))


def central_derivative(
    f: Callable[[float], float], x: float, rel_step: float = 1e-3
) -> float:
    """Once Richardson-extrapolated central difference of ``f`` at ``x``.

    The step is ``rel_step * |x|``; combining steps h and h/2 cancels the
    leading O(h^2) error.
    """
    if x == 0.0:
        raise InvalidInput("central_derivative needs x != 0 to scale its step")
    h = rel_step * abs(x)
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0
