"""Quadrature and weighted-series summation with explicit error contracts.

Every analytic evaluation in the lab goes through :func:`integrate` or
:func:`sum_weighted_coefficients`. Both are pure functions of their inputs.

Integrands are *vectorised*: they receive a float ndarray of abscissae and
must return an array (real or complex) of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonFiniteIntegrand, RadiusOutOfRange, ToleranceNotReached

DEFAULT_TOL = 1e-10
SERIES_CAP = 2**26
_CHUNK = 2**20

_ORDER = 15
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    tail_bound: float
    truncated: bool = False


def _gauss(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> complex:
    half = 0.5 * (b - a)
    x = a + half * (_NODES + 1.0)
    y = np.asarray(f(x), dtype=complex)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise NonFiniteIntegrand(f"integrand is not finite at x={bad!r}")
    return complex(half * np.dot(_WEIGHTS, y))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    points: Iterable[float] | None = None,
    max_evaluations: int = 2_000_000,
) -> QuadratureResult:
    """Globally adaptive Gauss-Legendre quadrature of ``f`` over ``[a, b]``.

    Each panel is integrated once with a 15-point rule and once on its two
    halves; the panel error is the modulus of the difference and the panel
    with the largest error is bisected next. Interior ``points`` (known
    kinks or jumps) seed the initial partition.

    Raises ToleranceNotReached when the evaluation budget is exhausted
    before the summed error estimate drops below ``tol``.
    """
    a, b = float(a), float(b)
    if not (a < b):
        raise ValueError(f"integrate needs a < b, got [{a}, {b}]")
    if not tol > 0:
        raise ValueError("tol must be positive")

    edges = [a]
    for p in sorted(set(float(p) for p in (points or ()))):
        if a < p < b and p > edges[-1]:
            edges.append(p)
    edges.append(b)

    evaluations = 0
    heap: list[tuple[float, int, float, float, complex, complex, complex]] = []
    counter = 0

    def panel(lo: float, hi: float, whole: complex | None):
        nonlocal evaluations, counter
        if whole is None:
            whole = _gauss(f, lo, hi)
            evaluations += _ORDER
        mid = 0.5 * (lo + hi)
        left = _gauss(f, lo, mid)
        right = _gauss(f, mid, hi)
        evaluations += 2 * _ORDER
        err = abs(left + right - whole)
        counter += 1
        # counter breaks ties so the refinement order is deterministic
        return (-err, counter, lo, hi, whole, left, right)

    for lo, hi in zip(edges[:-1], edges[1:]):
        heapq.heappush(heap, panel(lo, hi, None))

    def totals() -> tuple[complex, float]:
        re = math.fsum((p[5] + p[6]).real for p in heap)
        im = math.fsum((p[5] + p[6]).imag for p in heap)
        return complex(re, im), math.fsum(-p[0] for p in heap)

    final: list[tuple] = []
    err_total = math.fsum(-p[0] for p in heap)
    while heap and err_total > tol:
        if evaluations >= max_evaluations:
            heap.extend(final)
            value, err = totals()
            raise ToleranceNotReached(
                f"quadrature budget of {max_evaluations} evaluations exhausted "
                f"(error estimate {err:.3e} > tol {tol:.3e})",
                value=value,
                error_estimate=err,
            )
        worst = heapq.heappop(heap)
        neg_err, _, lo, hi, _, left, right = worst
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi) or (hi - lo) <= 4 * math.ulp(max(abs(lo), abs(hi))):
            # cannot bisect further in double precision
            final.append(worst)
            err_total += neg_err
            continue
        c1 = panel(lo, mid, left)
        c2 = panel(mid, hi, right)
        heapq.heappush(heap, c1)
        heapq.heappush(heap, c2)
        err_total += neg_err - c1[0] - c2[0]

    heap.extend(final)
    value, err = totals()
    if err > tol:
        raise ToleranceNotReached(
            f"panels exhausted at error estimate {err:.3e} > tol {tol:.3e}",
            value=value,
            error_estimate=err,
        )
    return QuadratureResult(value=value, error_estimate=err, evaluations=evaluations)


# ---------------------------------------------------------------------------
# weighted series
# ---------------------------------------------------------------------------

# radial: w_n = (n+1)(1-R^2)^2 R^{2n},       n >= 0
# lift:   w_n = n (1-R^2)^2 R^{2(n-1)},       n >= 1 (w_0 = 0)
FAMILIES = ("radial", "lift")


def _check_radius(R: float) -> float:
    R = float(R)
    if not (0.0 <= R < 1.0):
        raise RadiusOutOfRange(f"radius must lie in [0, 1), got {R!r}")
    return R


def weight_tail(family: str, R: float, N: int) -> float:
    """Closed-form mass ``sum_{n > N} w_n(R)`` of a weight family."""
    R = _check_radius(R)
    x = R * R
    if x == 0.0:
        first = 0 if family == "radial" else 1
        return 1.0 if N < first else 0.0
    one_minus_x = (1.0 - R) * (1.0 + R)
    logx = 2.0 * math.log(R)
    if family == "radial":
        # sum_{n>N} (n+1) x^n (1-x)^2 = x^{N+1} ((N+2) - (N+1) x)
        return math.exp((N + 1) * logx) * ((N + 1) * one_minus_x + 1.0)
    if family == "lift":
        if N < 0:
            return 1.0
        return math.exp(N * logx) * (N * one_minus_x + 1.0)
    raise ValueError(f"unknown weight family {family!r}")


def weights(family: str, R: float, n: np.ndarray) -> np.ndarray:
    R = _check_radius(R)
    n = np.asarray(n, dtype=np.int64)
    x = R * R
    one_minus_x = (1.0 - R) * (1.0 + R)
    if family == "radial":
        k = n
        lead = (n + 1).astype(float)
    elif family == "lift":
        k = np.maximum(n - 1, 0)
        lead = n.astype(float)
    else:
        raise ValueError(f"unknown weight family {family!r}")
    if x == 0.0:
        powers = (k == 0).astype(float)
    else:
        powers = np.exp(k * (2.0 * math.log(R)))
    return lead * one_minus_x * one_minus_x * powers


def truncation_index(family: str, R: float, budget: float, cap: int = SERIES_CAP) -> tuple[int, bool]:
    """Smallest N with ``weight_tail(N) <= budget``; ``(cap, True)`` if none."""
    if weight_tail(family, R, cap) > budget:
        return cap, True
    lo, hi = 0, 1
    while weight_tail(family, R, hi) > budget:
        lo, hi = hi, 2 * hi
    while lo < hi:
        mid = (lo + hi) // 2
        if weight_tail(family, R, mid) <= budget:
            hi = mid
        else:
            lo = mid + 1
    return lo, False


def sum_weighted_coefficients(
    coefficients: Callable[[np.ndarray], np.ndarray],
    R: float,
    sup_modulus: float,
    tol: float = DEFAULT_TOL,
    family: str = "radial",
    cap: int = SERIES_CAP,
) -> SeriesResult:
    """Sum ``sum_n w_n(R) c_n`` for one of the two normalised weight families.

    ``coefficients`` maps an int64 index array to the values ``c_n``; it is
    called in chunks. Since both families sum to exactly 1, the neglected
    tail is bounded by ``sup_modulus * weight_tail(N)``, and N is chosen to
    push that below ``tol``. When the cap is hit the partial sum comes back
    with ``truncated=True`` and an honest (possibly large) tail bound.
    """
    R = _check_radius(R)
    if sup_modulus < 0 or not math.isfinite(sup_modulus):
        raise ValueError("sup_modulus must be finite and non-negative")
    budget = tol / sup_modulus if sup_modulus > 0 else math.inf
    N, truncated = truncation_index(family, R, budget, cap)
    re_parts: list[float] = []
    im_parts: list[float] = []
    for start in range(0, N + 1, _CHUNK):
        n = np.arange(start, min(N, start + _CHUNK - 1) + 1, dtype=np.int64)
        w = weights(family, R, n)
        c = np.asarray(coefficients(n), dtype=complex)
        s = np.sum(w * c)
        re_parts.append(float(s.real))
        im_parts.append(float(s.imag))
    value = complex(math.fsum(re_parts), math.fsum(im_parts))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonFiniteIntegrand("weighted series produced a non-finite value")
    tail = sup_modulus * weight_tail(family, R, N)
    return SeriesResult(value=value, terms_used=N + 1, tail_bound=tail, truncated=truncated)


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` points with log-uniform spacing between ``lo`` and ``hi`` (both > 0)."""
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))


def boundary_grid(k_values: Sequence[int] | np.ndarray) -> np.ndarray:
    """Radii ``1 - 2^{-k}`` approaching the unit circle."""
    return np.array([1.0 - math.ldexp(1.0, -int(k)) for k in k_values])
