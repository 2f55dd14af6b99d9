"""Berezin transform of radial and quasi-homogeneous symbols.

Expanding the squared Bergman kernel and integrating the angle out gives,
for a radial symbol ``f`` and ``|z| = R``::

    f~(z) = (1 - R^2)^2 * sum_{n>=0} (n+1) C_{2n+1}(f) R^{2n}

a convex average of the Toeplitz eigenvalues. For ``F(r e^{it}) =
e^{imt} f(r)`` the same computation gives::

    F~(R e^{it}) = (1-R^2)^2 R^|m| e^{imt}
                   * sum_{k>=0} 2(k+1)(k+|m|+1)/(2k+|m|+2) C_{2k+|m|+1}(f) R^{2k}

Both series are checked against :func:`berezin_integral_oracle`, a direct
nested quadrature of the defining area integral. A second, widely quoted
form with coefficients ``n(n+|m|)/(2n+|m|+1) C_{2n+|m|}`` is kept as
``quasihomogeneous_shifted_series``: it equals the kernel expansion applied
to ``r f(r)`` instead of ``f(r)``, so it agrees only for special symbols.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import numerics
from .coefficients import mellin_closed_form
from .errors import RadiusOutOfRange, ToleranceNotReached
from .symbols import RadialSymbol, sample


@dataclass(frozen=True)
class QuasihomogeneousSymbol:
    degree: int
    radial_part: RadialSymbol

    def sup_modulus(self) -> float:
        return self.radial_part.sup_modulus()


def _radius(R: float) -> float:
    R = float(R)
    if not (0.0 <= R < 1.0):
        raise RadiusOutOfRange(f"R must lie in [0, 1), got {R!r}")
    return R


def _eigenvalues(s: RadialSymbol):
    return lambda n: mellin_closed_form(s, 2 * n + 1)


def berezin_radial_series(
    s: RadialSymbol, R: float, tol: float = numerics.DEFAULT_TOL, family: str = "radial"
) -> numerics.SeriesResult:
    """Series value with its certified tail; never raises on truncation.

    ``family="lift"`` sums ``n (1-R^2)^2 R^{2n-2} C_{2n+1}`` instead, the
    degree-one lift divided by R.
    """
    R = _radius(R)
    return numerics.sum_weighted_coefficients(_eigenvalues(s), R, s.sup_modulus(), tol, family=family)


def berezin_radial(s: RadialSymbol, R: float, tol: float = numerics.DEFAULT_TOL) -> complex:
    res = berezin_radial_series(s, R, tol)
    if res.truncated and res.tail_bound > tol:
        raise ToleranceNotReached(
            f"Berezin series at R={R!r} hit the truncation cap; tail bound {res.tail_bound:.3e}",
            value=res.value,
            error_estimate=res.tail_bound,
        )
    return res.value


# ---------------------------------------------------------------------------
# quasi-homogeneous symbols
# ---------------------------------------------------------------------------


def quasihomogeneous_series(F: QuasihomogeneousSymbol, R: float, theta: float, tol: float = numerics.DEFAULT_TOL) -> complex:
    R = _radius(R)
    m = abs(F.degree)
    if R == 0.0 and m > 0:
        return 0j
    f = F.radial_part

    def coeffs(k):
        return (1.0 + m / (2.0 * k + m + 2.0)) * mellin_closed_form(f, 2 * k + m + 1)

    # the extra factor is below 2, so 2*sup bounds the coefficients
    res = numerics.sum_weighted_coefficients(coeffs, R, 2.0 * f.sup_modulus(), tol, family="radial")
    return R**m * cmath.exp(1j * F.degree * theta) * res.value


def quasihomogeneous_shifted_series(
    F: QuasihomogeneousSymbol, R: float, theta: float, tol: float = numerics.DEFAULT_TOL
) -> complex:
    """``2(1-R^2)^2 R^|m| e^{imt} sum n(n+|m|)/(2n+|m|+1) C_{2n+|m|} R^{2(n-1)}``."""
    R = _radius(R)
    m = abs(F.degree)
    if R == 0.0 and m > 0:
        return 0j
    f = F.radial_part

    def coeffs(n):
        nf = n.astype(float)
        return 2.0 * (nf + m) / (2.0 * nf + m + 1.0) * mellin_closed_form(f, 2 * n + m)

    res = numerics.sum_weighted_coefficients(coeffs, R, 2.0 * f.sup_modulus(), tol, family="lift")
    return R**m * cmath.exp(1j * F.degree * theta) * res.value


@dataclass(frozen=True)
class QuasihomogeneousBerezin:
    value: complex
    shifted: complex
    oracle: Optional[complex]
    shifted_gap: float
    oracle_gap: Optional[float]


def berezin_quasihomogeneous(
    F: QuasihomogeneousSymbol,
    R: float,
    theta: float,
    tol: float = numerics.DEFAULT_TOL,
    with_oracle: bool = True,
) -> QuasihomogeneousBerezin:
    """Kernel-expansion value plus a consistency report.

    The shifted series and, for ``R <= 0.95``, the area-integral oracle are
    evaluated alongside; their distances to the returned value are reported.
    """
    value = quasihomogeneous_series(F, R, theta, tol)
    shifted = quasihomogeneous_shifted_series(F, R, theta, tol)
    oracle = None
    if with_oracle and R <= ORACLE_MAX_RADIUS:
        oracle = berezin_integral_oracle(F, R * cmath.exp(1j * theta), tol=max(tol, 1e-9)).value
    return QuasihomogeneousBerezin(
        value=value,
        shifted=shifted,
        oracle=oracle,
        shifted_gap=abs(shifted - value),
        oracle_gap=None if oracle is None else abs(oracle - value),
    )


# ---------------------------------------------------------------------------
# area-integral oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_RADIUS = 0.95


def berezin_integral_oracle(
    s: Union[RadialSymbol, QuasihomogeneousSymbol],
    z: complex,
    tol: float = 1e-9,
) -> numerics.QuadratureResult:
    """``int_D F(w) (1-|z|^2)^2 / |1 - conj(z) w|^4 dA(w)`` by nested quadrature.

    ``dA = r dr dphi / pi``. The angle is integrated first for every radial
    node, then the radius on ``[0, 1]`` split at ``|z|`` and at the symbol's
    breakpoints.
    """
    z = complex(z)
    if abs(z) > ORACLE_MAX_RADIUS:
        raise RadiusOutOfRange(f"oracle is limited to |z| <= {ORACLE_MAX_RADIUS}, got {abs(z)!r}")
    if isinstance(s, QuasihomogeneousSymbol):
        m, f = s.degree, s.radial_part
    else:
        m, f = 0, s
    zc = z.conjugate()
    factor = (1.0 - abs(z) ** 2) ** 2
    sup = f.sup_modulus()
    inner_tol = tol / 8.0
    evaluations = 0

    def angular(r: float) -> complex:
        nonlocal evaluations

        def g(phi: np.ndarray) -> np.ndarray:
            w = r * np.exp(1j * phi)
            return np.exp(1j * m * phi) * factor / np.abs(1.0 - zc * w) ** 4

        res = numerics.integrate(g, 0.0, 2.0 * math.pi, tol=inner_tol * 2.0 * math.pi)
        evaluations += res.evaluations
        return res.value / (2.0 * math.pi)

    def radial(r: np.ndarray) -> np.ndarray:
        a = np.array([angular(float(x)) for x in r])
        return 2.0 * r * sample(f, r) * a

    points = [abs(z)] + list(f.breakpoints())
    outer = numerics.integrate(radial, 0.0, 1.0, tol=tol / 2.0, points=points)
    err = outer.error_estimate + sup * inner_tol
    return numerics.QuadratureResult(outer.value, err, outer.evaluations + evaluations)


# ---------------------------------------------------------------------------
# convex decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexDecomposition:
    a_R: float
    M_R: Optional[complex]
    N_R: Optional[complex]
    reconstruction: complex
    tolerance: float
    family: str

    def recombined(self) -> complex:
        m = self.M_R if self.M_R is not None else 0j
        n = self.N_R if self.N_R is not None else 0j
        return self.a_R * m + (1.0 - self.a_R) * n


def convex_decomposition(
    s: RadialSymbol,
    R: float,
    L: complex,
    eps: float,
    tol: float = numerics.DEFAULT_TOL,
    family: str = "radial",
) -> ConvexDecomposition:
    """Split the Berezin series into indices far from ``L`` and the rest.

    With ``P = {n : |C_{2n+1} - L| > eps}``, ``a_R`` is the weight mass of P,
    and ``M_R`` / ``N_R`` are the weight-normalised averages of the
    eigenvalues over P and its complement (``None`` when that part is empty,
    in which case ``a_R`` is exactly 0 or 1).
    """
    R = _radius(R)
    if not eps > 0:
        raise ValueError("eps must be positive")
    sup = s.sup_modulus()
    budget = tol / sup if sup > 0 else math.inf
    N, truncated = numerics.truncation_index(family, R, budget)
    eig = _eigenvalues(s)
    w_p = []
    w_q = []
    wc_p = []
    wc_q = []
    chunk = 2**20
    for start in range(0, N + 1, chunk):
        n = np.arange(start, min(N, start + chunk - 1) + 1, dtype=np.int64)
        w = numerics.weights(family, R, n)
        c = eig(n)
        far = np.abs(c - L) > eps
        w_p.append(float(np.sum(w[far])))
        w_q.append(float(np.sum(w[~far])))
        wc_p.append(complex(np.sum(w[far] * c[far])))
        wc_q.append(complex(np.sum(w[~far] * c[~far])))
    mass_p = math.fsum(w_p)
    mass_q = math.fsum(w_q)
    sum_p = sum(wc_p)
    sum_q = sum(wc_q)
    if mass_p == 0.0:
        a_R, M_R = 0.0, None
    else:
        a_R, M_R = min(mass_p, 1.0), sum_p / mass_p
    N_R = None if mass_q == 0.0 else sum_q / mass_q
    if N_R is None:
        a_R = 1.0
    recon = berezin_radial_series(s, R, tol, family=family)
    return ConvexDecomposition(
        a_R=a_R,
        M_R=M_R,
        N_R=N_R,
        reconstruction=recon.value,
        tolerance=2.0 * tol + (recon.tail_bound if truncated else 0.0),
        family=family,
    )
