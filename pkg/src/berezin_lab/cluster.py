"""Boundary means, sampled cluster sets, density counts and the sup chain.

All three boundary quantities are sampled along schedules approaching the
boundary:

* ``mellin``  -- indices ``n`` (increasing), sampling ``C_n``;
* ``mean``    -- gaps ``d = 1 - eps`` (decreasing), sampling ``M_eps``;
* ``berezin`` -- radii ``R`` (increasing), sampling the radial transform.

Means are parameterised by the gap throughout because ``1 - eps`` is where
the precision lives; :func:`boundary_mean` also accepts ``eps`` directly and
refuses ``1 - eps < 1e-12`` in that form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import numerics
from .berezin import berezin_radial
from .coefficients import _closed, _exact_modulus, mellin_closed_form, toeplitz_eigenvalue_sequence
from .errors import DomainError, NotExtremePoint, OrderingViolation, ScheduleTooShort, UnsupportedVariant
from .symbols import (
    STEP_RAMP_END,
    Affine,
    Constant,
    GrudskyVasilevski,
    PiecewiseConstant,
    Power,
    RadialSymbol,
    RealPart,
    StepExample10,
    compute_alpha,
    essential_range_extreme_points,
    step_blocks,
    gv_log_integrand,
)

KINDS = ("mellin", "mean", "berezin")
MIN_EPS_GAP = 1e-12
MIN_SCHEDULE = 16


# ---------------------------------------------------------------------------
# boundary means
# ---------------------------------------------------------------------------


def _overlap(gap: float, lo: float, hi: float) -> float:
    """Length of ``(lo, hi] ∩ (0, gap]``."""
    top = min(gap, hi)
    return top - lo if top > lo else 0.0


def _mean_by_gap(s: RadialSymbol, gap: float, tol: float) -> complex:
    if isinstance(s, Constant):
        return s.value
    if isinstance(s, Power):
        q = s.p + 1.0
        return complex(-math.expm1(q * math.log1p(-gap)) / (q * gap))
    if isinstance(s, PiecewiseConstant):
        total = 0j
        bp = s.breakpoints_
        for lo, hi, v in zip(bp[:-1], bp[1:], s.values_):
            total += v * _overlap(gap, 1.0 - hi, 1.0 - lo)
        return total / gap
    if isinstance(s, StepExample10):
        total = 0.0
        ramp_gap = 1.0 - STEP_RAMP_END
        if gap > ramp_gap:
            # g = 16 (1 - d) for d in (15/16, 1]
            total += 16.0 * ((gap - ramp_gap) - 0.5 * (gap * gap - ramp_gap * ramp_gap))
        total += _overlap(gap, math.ldexp(1.0, -4), ramp_gap)
        for b in step_blocks():
            if b.value:
                total += _overlap(gap, b.gap_lo, b.gap_hi)
        return complex(total / gap)
    if isinstance(s, GrudskyVasilevski):
        return _gv_mean(gap, tol)
    if isinstance(s, Affine):
        return s.a * _mean_by_gap(s.inner, gap, tol / max(abs(s.a), 1.0)) + s.b
    if isinstance(s, RealPart):
        return complex(_mean_by_gap(s.inner, gap, tol).real)
    raise UnsupportedVariant(f"no boundary mean for {type(s).__name__}")


def gv_mean_with_error(gap: float, tol: float = numerics.DEFAULT_TOL) -> tuple[complex, float]:
    """Mean of the oscillating symbol over ``[1 - gap, 1)``.

    With ``r = exp(-e^v)`` the integral is ``int_{-inf}^{ln ln(1/eps)}
    e^{iv} e^v e^{-e^v} dv``; the lower limit is cut at ``v_min`` with the
    neglected mass ``e^{v_min}`` folded into the error.
    """
    alpha = compute_alpha()
    scale = alpha.modulus / gap
    log_inv = -math.log1p(-gap)
    v_top = math.log(log_inv)
    v_min = min(math.log(tol / (4.0 * scale)), v_top - 1.0)
    res = numerics.integrate(gv_log_integrand(1.0), v_min, v_top, tol=tol / (2.0 * scale))
    value = alpha.value * res.value / gap
    err = scale * (res.error_estimate + math.exp(v_min)) + abs(value) * alpha.error_estimate / alpha.modulus
    return value, err


def _gv_mean(gap: float, tol: float) -> complex:
    return gv_mean_with_error(gap, tol)[0]


def boundary_mean(
    s: RadialSymbol,
    eps: Optional[float] = None,
    tol: float = numerics.DEFAULT_TOL,
    *,
    gap: Optional[float] = None,
) -> complex:
    """``(1/(1-eps)) int_eps^1 s(r) dr``, given ``eps`` or ``gap = 1 - eps``."""
    if (eps is None) == (gap is None):
        raise TypeError("give exactly one of eps or gap")
    if eps is not None:
        if not (0.0 < eps < 1.0):
            raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
        gap = 1.0 - eps
        if gap < MIN_EPS_GAP:
            raise DomainError(
                f"1 - eps = {gap:.3e} is below {MIN_EPS_GAP:g}; pass gap= to go closer to the boundary"
            )
    if not (0.0 < gap < 1.0):
        raise DomainError(f"gap must lie in (0, 1), got {gap!r}")
    return _mean_by_gap(s, float(gap), tol)


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def mellin_phase_schedule(phis: Sequence[float], ks: Sequence[int]) -> np.ndarray:
    """Indices ``floor(e^{phi + 2 pi k})``: ``ln n`` lands just below each target."""
    n = sorted({int(math.floor(math.exp(phi + 2.0 * math.pi * k))) for k in ks for phi in phis})
    return np.array(n, dtype=np.int64)


def mean_phase_schedule(phis: Sequence[float], ks: Sequence[int]) -> np.ndarray:
    """Gaps with ``ln ln(1/eps) = -(phi + 2 pi k)`` exactly (up to rounding)."""
    gaps = {-math.expm1(-math.exp(-(phi + 2.0 * math.pi * k))) for k in ks for phi in phis}
    return np.array(sorted(gaps, reverse=True))


def dyadic_gap_schedule(parity: str, count: int) -> np.ndarray:
    """Step-symbol block starts: ``2^{-(2n)^2}`` (even) or ``2^{-(2n+1)^2}`` (odd), n = 1..count."""
    off = {"even": 0, "odd": 1}[parity]
    return np.array([math.ldexp(1.0, -((2 * n + off) ** 2)) for n in range(1, count + 1)])


def radius_schedule(ks: Sequence[float]) -> np.ndarray:
    return np.array([1.0 - 2.0 ** (-float(k)) for k in ks])


def sample_quantity(kind: str, s: RadialSymbol, params: Sequence, tol: float = numerics.DEFAULT_TOL) -> np.ndarray:
    if kind == "mellin":
        return mellin_closed_form(s, np.asarray(params, dtype=np.int64))
    if kind == "mean":
        return np.array([boundary_mean(s, gap=float(g), tol=tol) for g in params])
    if kind == "berezin":
        return np.array([berezin_radial(s, float(R), tol) for R in params])
    raise ValueError(f"unknown quantity {kind!r}; expected one of {KINDS}")


def _check_schedule(kind: str, params: np.ndarray) -> None:
    d = np.diff(params.astype(float))
    ok = np.all(d < 0) if kind == "mean" else np.all(d > 0)
    if not ok:
        raise ValueError(f"{kind} schedule must approach the boundary strictly monotonically")


# ---------------------------------------------------------------------------
# cluster estimates
# ---------------------------------------------------------------------------


@dataclass
class ClusterEstimate:
    kind: str
    params: np.ndarray
    values: np.ndarray
    tail_start: int
    tail_limsup_modulus: float
    tail_liminf_modulus: float
    cluster_points: list[complex]
    delta: float
    schedule: str

    @property
    def samples(self) -> list[tuple[float, complex]]:
        return list(zip(self.params.tolist(), self.values.tolist()))

    def tail_values(self) -> np.ndarray:
        return self.values[self.tail_start:]


def greedy_cover(points: np.ndarray, delta: float) -> list[complex]:
    """Centres such that every point lies within ``delta`` of one; input order decides."""
    centres = np.empty(0, dtype=complex)
    for z in points:
        if centres.size and np.min(np.abs(centres - z)) <= delta:
            continue
        centres = np.append(centres, z)
    return centres.tolist()


def cluster_estimate_from_samples(
    kind: str,
    params: np.ndarray,
    values: np.ndarray,
    delta: float,
    tail_fraction: float = 0.5,
    schedule: str = "",
    moduli: Optional[np.ndarray] = None,
) -> ClusterEstimate:
    if len(params) < MIN_SCHEDULE:
        raise ScheduleTooShort(f"schedule has {len(params)} samples; at least {MIN_SCHEDULE} are needed")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    if not delta > 0:
        raise ValueError("delta must be positive")
    start = len(params) - max(1, int(math.ceil(tail_fraction * len(params))))
    tail = values[start:]
    mods = np.abs(tail) if moduli is None else moduli[start:]
    return ClusterEstimate(
        kind=kind,
        params=np.asarray(params),
        values=np.asarray(values),
        tail_start=start,
        tail_limsup_modulus=float(np.max(mods)),
        tail_liminf_modulus=float(np.min(mods)),
        cluster_points=greedy_cover(tail, delta),
        delta=delta,
        schedule=schedule,
    )


def cluster_estimate(
    kind: str,
    s: RadialSymbol,
    schedule: Sequence,
    delta: float,
    tail_fraction: float = 0.5,
    tol: float = numerics.DEFAULT_TOL,
    description: str = "",
) -> ClusterEstimate:
    params = np.asarray(schedule)
    if len(params) < MIN_SCHEDULE:
        raise ScheduleTooShort(f"schedule has {len(params)} samples; at least {MIN_SCHEDULE} are needed")
    _check_schedule(kind, params)
    values = sample_quantity(kind, s, params, tol)
    moduli = _exact_modulus(s, params) if kind == "mellin" else None
    return cluster_estimate_from_samples(
        kind, params, values, delta, tail_fraction, description or f"{kind}[{len(params)}]", moduli
    )


# ---------------------------------------------------------------------------
# density counts
# ---------------------------------------------------------------------------


@dataclass
class DensityReport:
    L: complex
    eps: float
    counts: list[tuple[int, int]]  # (N, p_N), N ascending
    ratio_floor: float

    @property
    def ratios(self) -> list[float]:
        return [p / (N + 1) for N, p in self.counts]


def far_counts(s: RadialSymbol, L: complex, eps: float, N: int) -> np.ndarray:
    """Running counts ``p_M = #{n <= M : |C_{2n+1} - L| > eps}`` for M = 0..N."""
    c = toeplitz_eigenvalue_sequence(s, N)
    return np.cumsum(np.abs(c - L) > eps)


def density_ratio(s: RadialSymbol, L: complex, eps: float, N: int, levels: int = 10) -> DensityReport:
    """Counts at ``N, N/2, N/4, ...`` (``levels`` halvings, never below 1).

    Ratios are ``p_M / (M + 1)``, the fraction of the indices ``0..M``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    cum = far_counts(s, L, eps, N)
    Ns = sorted({max(1, N >> j) for j in range(levels + 1)})
    counts = [(M, int(cum[M])) for M in Ns]
    floor = min(p / (M + 1) for M, p in counts)
    return DensityReport(L=complex(L), eps=float(eps), counts=counts, ratio_floor=floor)


def density_arc_count(theta: float, N: int) -> int:
    """Count ``n <= N`` whose eigenvalue ``e^{-i ln(2n+2)}`` is more than
    ``sqrt 2`` away from ``e^{-i theta}``.

    That happens exactly when ``ln(2n+2)`` falls in an arc
    ``(theta + pi/2 + 2k pi, theta + 3pi/2 + 2k pi)``, i.e. when
    ``n`` lies in ``(e^{a_k}/2 - 1, e^{b_k}/2 - 1)``; the integers in each
    interval are counted directly.
    """
    if N < 0:
        return 0
    total = 0
    top = math.log(2.0 * N + 2.0)
    k = math.floor((math.log(2.0) - theta - 1.5 * math.pi) / (2.0 * math.pi))
    while True:
        a = theta + 0.5 * math.pi + 2.0 * k * math.pi
        b = theta + 1.5 * math.pi + 2.0 * k * math.pi
        if a >= top:
            break
        lo = 0.5 * math.exp(a) - 1.0
        hi = 0.5 * math.exp(b) - 1.0
        first = max(0, math.floor(lo) + 1)
        last = min(N, math.ceil(hi) - 1)
        if last >= first:
            total += last - first + 1
        k += 1
    return total


# ---------------------------------------------------------------------------
# the sup chain
# ---------------------------------------------------------------------------


def _default_mellin_grid() -> np.ndarray:
    dense = np.arange(0, 2**12, dtype=np.int64)
    sparse = np.floor(numerics.log_grid(2.0**12, 2.0**26, 400)).astype(np.int64)
    return np.unique(np.concatenate([dense, sparse]))


@dataclass
class ChainConfig:
    mellin_n: np.ndarray = field(default_factory=_default_mellin_grid)
    berezin_k: Sequence[float] = tuple(range(4, 21))
    mean_gaps: np.ndarray = field(default_factory=lambda: 2.0 ** (-np.arange(1, 161) / 4.0))
    tol: float = numerics.DEFAULT_TOL
    order_tol: float = 1e-6
    delta: float = 0.05
    tail_fraction: float = 0.5

    def describe(self) -> dict:
        return {
            "mellin_n": {"count": int(len(self.mellin_n)), "min": int(self.mellin_n[0]), "max": int(self.mellin_n[-1])},
            "berezin_R": [1.0 - 2.0 ** (-float(k)) for k in self.berezin_k],
            "mean_gaps": {"count": int(len(self.mean_gaps)), "max": float(self.mean_gaps[0]), "min": float(self.mean_gaps[-1])},
            "tol": self.tol,
            "order_tol": self.order_tol,
            "delta": self.delta,
            "tail_fraction": self.tail_fraction,
        }


@dataclass
class ChainReport:
    sup_berezin: float
    sup_mellin: float
    sup_mean: float
    sup_modulus: float
    margins: dict
    ordered: bool
    nesting_check: Optional[bool]
    config: dict
    grids: dict = field(default_factory=dict, repr=False)


def _tail_interval(values: np.ndarray, tail_fraction: float) -> tuple[float, float]:
    start = len(values) - max(1, int(math.ceil(tail_fraction * len(values))))
    tail = values[start:].real
    return float(np.min(tail)), float(np.max(tail))


def verify_chain(s: RadialSymbol, config: Optional[ChainConfig] = None, strict: bool = True) -> ChainReport:
    """Finite-resolution check of ``sup|B| <= sup|C| <= sup|M| <= ||f||``.

    For real symbols the sampled tail ranges must also nest,
    ``A_B ⊂ A_M ⊂ A_me``, up to ``delta``. With ``strict`` an ordering
    failure raises OrderingViolation carrying the full report.
    """
    cfg = config or ChainConfig()
    n = np.asarray(cfg.mellin_n, dtype=np.int64)
    c_vals, _ = _closed(s, n)
    c_mod = _exact_modulus(s, n)
    if c_mod is None:
        c_mod = np.abs(c_vals)
    radii = radius_schedule(cfg.berezin_k)
    b_vals = np.array([berezin_radial(s, R, cfg.tol) for R in radii])
    gaps = np.asarray(cfg.mean_gaps, dtype=float)
    m_vals = np.array([boundary_mean(s, gap=g, tol=cfg.tol) for g in gaps])

    sup_c = float(np.max(c_mod))
    sup_b = float(np.max(np.abs(b_vals)))
    sup_m = float(np.max(np.abs(m_vals)))
    sup_f = s.sup_modulus()
    margins = {
        "mellin_minus_berezin": sup_c - sup_b,
        "mean_minus_mellin": sup_m - sup_c,
        "modulus_minus_mean": sup_f - sup_m,
    }
    ordered = all(v >= -cfg.order_tol for v in margins.values())

    nesting = None
    if s.is_real():
        ib = _tail_interval(b_vals, cfg.tail_fraction)
        im = _tail_interval(c_vals, cfg.tail_fraction)
        ie = _tail_interval(m_vals, cfg.tail_fraction)
        d = cfg.delta
        nesting = bool(
            im[0] - d <= ib[0] and ib[1] <= im[1] + d and ie[0] - d <= im[0] and im[1] <= ie[1] + d
        )

    report = ChainReport(
        sup_berezin=sup_b,
        sup_mellin=sup_c,
        sup_mean=sup_m,
        sup_modulus=sup_f,
        margins=margins,
        ordered=ordered,
        nesting_check=nesting,
        config=cfg.describe(),
        grids={
            "mellin": (n, c_vals),
            "berezin": (radii, b_vals),
            "mean": (gaps, m_vals),
        },
    )
    if strict and not ordered:
        raise OrderingViolation(f"sup chain out of order beyond {cfg.order_tol:g}: {margins}", report)
    return report


# ---------------------------------------------------------------------------
# extreme points
# ---------------------------------------------------------------------------


@dataclass
class MembershipReport:
    L: complex
    delta: float
    members: dict  # kind -> bool
    nearest: dict  # kind -> (param, distance)
    consistent: bool


def extreme_point_membership_check(
    s: RadialSymbol,
    L: complex,
    schedules: Mapping[str, Sequence],
    delta: float,
    tail_fraction: float = 0.5,
    tol: float = numerics.DEFAULT_TOL,
) -> MembershipReport:
    """Does a tail sample of each quantity come within ``delta`` of ``L``?

    ``L`` must be an extreme point of the essential range; for those the
    three memberships are equivalent, so ``consistent`` reports whether the
    tested quantities agree at this resolution.
    """
    L = complex(L)
    try:
        extremes = essential_range_extreme_points(s)
    except UnsupportedVariant as exc:
        if exc.circle is None:
            raise
        c, rad = exc.circle
        if abs(abs(L - c) - rad) > 1e-12:
            raise NotExtremePoint(f"{L} is not on the essential-range circle") from None
    else:
        if not any(abs(L - p) <= 1e-12 for p in extremes):
            raise NotExtremePoint(f"{L} is not an extreme point of the essential range {sorted(extremes, key=abs)}")
    members: dict = {}
    nearest: dict = {}
    for kind, params in schedules.items():
        params = np.asarray(params)
        vals = sample_quantity(kind, s, params, tol)
        start = len(vals) - max(1, int(math.ceil(tail_fraction * len(vals))))
        dist = np.abs(vals[start:] - L)
        i = int(np.argmin(dist))
        nearest[kind] = (params[start + i].item(), float(dist[i]))
        members[kind] = bool(dist[i] <= delta)
    consistent = len(set(members.values())) <= 1
    return MembershipReport(L=L, delta=delta, members=members, nearest=nearest, consistent=consistent)


def scan_mellin(s: RadialSymbol, L: complex, delta: float, n_max: int) -> np.ndarray:
    """Indices ``n <= n_max`` with ``|C_n - L| <= delta``."""
    n = np.arange(n_max + 1, dtype=np.int64)
    return n[np.abs(mellin_closed_form(s, n) - L) <= delta]
