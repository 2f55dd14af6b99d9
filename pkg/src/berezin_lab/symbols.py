"""Bounded radial symbols on the unit disc.

A radial symbol is a bounded complex function of ``r = |z|`` on ``[0, 1)``.
The variants are immutable dataclasses; ``values`` is the vectorised
pointwise map used by the quadrature routes, and :func:`evaluate` is the
checked scalar entry point.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any, Iterator, Union

import numpy as np

from . import numerics
from .errors import DomainError, ParseError, UnsupportedVariant, ValidationError

_R_MAX = 1.0 - 2.0**-53  # largest double below 1


# ---------------------------------------------------------------------------
# the normalising constant of the oscillating symbol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaConstant:
    value: complex
    modulus: float
    error_estimate: float


def gv_log_integrand(rate: float):
    """``v -> exp((1+i) v) * exp(-rate * e^v)``.

    With ``r = exp(-e^v)`` this is ``(ln 1/r)^i r^{rate-1} dr`` written in
    the smooth log-log variable; ``rate = n + 1`` gives the Mellin moment.
    """

    def f(v: np.ndarray) -> np.ndarray:
        ev = np.exp(v)
        return np.exp(v * (1.0 + 1.0j) - rate * ev)

    return f


def gv_moment(rate: float, tol: float) -> numerics.QuadratureResult:
    """``int_0^1 (ln 1/r)^i r^{rate-1} dr`` by quadrature in the log-log variable.

    The integrand modulus is ``e^v exp(-rate e^v)``; both tails are cut where
    their closed-form mass is below ``tol/4`` and that mass is added to the
    error estimate.
    """
    tail = tol / 4.0
    v_lo = math.log(tail)
    shift = math.log(rate)
    if tail * rate < 1.0:
        v_hi = math.log(math.log(1.0 / (tail * rate))) - shift
    else:
        v_hi = 1.0 - shift
    v_hi = max(v_hi, v_lo + 1.0)
    res = numerics.integrate(gv_log_integrand(rate), v_lo, v_hi, tol=tol / 2.0)
    lo_mass = math.exp(v_lo)
    hi_mass = math.exp(-rate * math.exp(v_hi)) / rate
    return numerics.QuadratureResult(
        value=res.value,
        error_estimate=res.error_estimate + lo_mass + hi_mass,
        evaluations=res.evaluations,
    )


@functools.lru_cache(maxsize=None)
def compute_alpha(tol: float = 1e-13) -> AlphaConstant:
    """Normalising constant ``alpha = 1 / int_0^1 (ln 1/r)^i dr``.

    The integral is computed by quadrature (u = ln 1/r, then v = ln u) and
    its modulus is checked against ``|Gamma(1+i)|^2 = pi / sinh(pi)``.
    """
    res = gv_moment(1.0, tol)
    integral = res.value
    expected = math.sqrt(math.pi / math.sinh(math.pi))
    if abs(abs(integral) - expected) > 1e-9:
        raise ArithmeticError(
            f"alpha quadrature disagrees with the Gamma reflection oracle: "
            f"{abs(integral)!r} vs {expected!r}"
        )
    alpha = 1.0 / integral
    err = res.error_estimate / abs(integral) ** 2
    return AlphaConstant(value=alpha, modulus=abs(alpha), error_estimate=err)


# ---------------------------------------------------------------------------
# step symbol block table
# ---------------------------------------------------------------------------

# Near 1 the step symbol is organised by the gap d = 1 - r. Block m >= 2 is
# d in (2^-(m+1)^2, 2^-m^2], value 1 for even m and 0 for odd m. Below the
# first block the block rule does not reach [1/16, 15/16); the value 1 is
# used there, continuing the ramp. Blocks are stored by exponent so lengths never cancel.
STEP_RAMP_END = 1.0 / 16.0
STEP_FIRST_BLOCK = 2


@dataclass(frozen=True)
class Block:
    m: int
    hi_exp: int  # block is d in (2^-lo_exp, 2^-hi_exp]
    lo_exp: int
    value: float

    @property
    def gap_hi(self) -> float:
        return math.ldexp(1.0, -self.hi_exp)

    @property
    def gap_lo(self) -> float:
        return math.ldexp(1.0, -self.lo_exp)


def step_blocks(max_m: int = 32) -> Iterator[Block]:
    for m in range(STEP_FIRST_BLOCK, max_m + 1):
        yield Block(m=m, hi_exp=m * m, lo_exp=(m + 1) ** 2, value=1.0 if m % 2 == 0 else 0.0)


# ---------------------------------------------------------------------------
# variants
# ---------------------------------------------------------------------------


def _as_complex(x: Any) -> complex:
    return complex(x)


@dataclass(frozen=True)
class Constant:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", _as_complex(self.value))

    def values(self, r: np.ndarray) -> np.ndarray:
        return np.full(np.shape(r), self.value, dtype=complex)

    def sup_modulus(self) -> float:
        return abs(self.value)

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def is_real(self) -> bool:
        return self.value.imag == 0.0

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": complex_to_json(self.value)}


@dataclass(frozen=True)
class Power:
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 0):
            raise ValidationError(f"power exponent must be finite and >= 0, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))

    def values(self, r: np.ndarray) -> np.ndarray:
        return np.power(np.asarray(r, dtype=float), self.p).astype(complex)

    def sup_modulus(self) -> float:
        return 1.0

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def is_real(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"kind": "power", "p": self.p}


@dataclass(frozen=True)
class GrudskyVasilevski:
    """``r -> alpha * (ln 1/r)^i``: unimodular up to ``|alpha|``, no limit at 1."""

    def values(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        near = r > 0.5
        log_inv = np.empty(r.shape)
        log_inv[near] = -np.log1p(r[near] - 1.0)  # r - 1 is exact here
        log_inv[~near] = -np.log(np.maximum(r[~near], 1e-300))
        return compute_alpha().value * np.exp(1j * np.log(log_inv))

    def sup_modulus(self) -> float:
        return compute_alpha().modulus

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def is_real(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"kind": "gv"}


@dataclass(frozen=True)
class StepExample10:
    """Ramp ``16 r`` on ``[0, 1/16)``, then 0/1 blocks accumulating at 1."""

    def values(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        gap = 1.0 - r
        out = np.ones(r.shape, dtype=float)
        ramp = r < STEP_RAMP_END
        out[ramp] = 16.0 * r[ramp]
        for b in step_blocks():
            if b.value == 0.0:
                out[(gap <= b.gap_hi) & (gap > b.gap_lo)] = 0.0
        return out.astype(complex)

    def sup_modulus(self) -> float:
        return 1.0

    def breakpoints(self) -> tuple[float, ...]:
        pts = [STEP_RAMP_END]
        for b in step_blocks(8):
            r = 1.0 - b.gap_hi
            if r < 1.0:
                pts.append(r)
        return tuple(pts)

    def is_real(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"kind": "example10"}


@dataclass(frozen=True)
class PiecewiseConstant:
    breakpoints_: tuple[float, ...]
    values_: tuple[complex, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints_)
        vals = tuple(_as_complex(v) for v in self.values_)
        if len(bp) < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValidationError("piecewise breakpoints must start at 0 and end at 1")
        if any(not (a < b) for a, b in zip(bp[:-1], bp[1:])):
            raise ValidationError("piecewise breakpoints must be strictly increasing")
        if len(vals) != len(bp) - 1:
            raise ValidationError(
                f"piecewise symbol needs {len(bp) - 1} values for {len(bp)} breakpoints, got {len(vals)}"
            )
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
            raise ValidationError("piecewise values must be finite")
        object.__setattr__(self, "breakpoints_", bp)
        object.__setattr__(self, "values_", vals)

    def values(self, r: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.breakpoints_), np.asarray(r, dtype=float), side="right") - 1
        idx = np.clip(idx, 0, len(self.values_) - 1)
        return np.asarray(self.values_, dtype=complex)[idx]

    def sup_modulus(self) -> float:
        return max(abs(v) for v in self.values_)

    def breakpoints(self) -> tuple[float, ...]:
        return self.breakpoints_[1:-1]

    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.values_)

    def to_dict(self) -> dict:
        return {
            "kind": "piecewise",
            "breakpoints": list(self.breakpoints_),
            "values": [complex_to_json(v) for v in self.values_],
        }


@dataclass(frozen=True)
class Affine:
    """``a * inner + b``."""

    a: complex
    b: complex
    inner: "RadialSymbol"

    def __post_init__(self):
        object.__setattr__(self, "a", _as_complex(self.a))
        object.__setattr__(self, "b", _as_complex(self.b))

    def values(self, r: np.ndarray) -> np.ndarray:
        return self.a * self.inner.values(r) + self.b

    def sup_modulus(self) -> float:
        return abs(self.a) * self.inner.sup_modulus() + abs(self.b)

    def breakpoints(self) -> tuple[float, ...]:
        return self.inner.breakpoints()

    def is_real(self) -> bool:
        if self.a == 0:
            return self.b.imag == 0.0
        return self.a.imag == 0.0 and self.b.imag == 0.0 and self.inner.is_real()

    def to_dict(self) -> dict:
        return {
            "kind": "affine",
            "a": complex_to_json(self.a),
            "b": complex_to_json(self.b),
            "inner": self.inner.to_dict(),
        }


@dataclass(frozen=True)
class RealPart:
    inner: "RadialSymbol"

    def values(self, r: np.ndarray) -> np.ndarray:
        return self.inner.values(r).real.astype(complex)

    def sup_modulus(self) -> float:
        return self.inner.sup_modulus()

    def breakpoints(self) -> tuple[float, ...]:
        return self.inner.breakpoints()

    def is_real(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"kind": "re", "inner": self.inner.to_dict()}


RadialSymbol = Union[Constant, Power, GrudskyVasilevski, StepExample10, PiecewiseConstant, Affine, RealPart]
SYMBOL_TYPES = (Constant, Power, GrudskyVasilevski, StepExample10, PiecewiseConstant, Affine, RealPart)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def evaluate(s: RadialSymbol, r: float) -> complex:
    if not (0.0 < r < 1.0):
        raise DomainError(f"symbols are evaluated on (0, 1), got r={r!r}")
    return complex(s.values(np.array([float(r)]))[0])


def sup_modulus(s: RadialSymbol) -> float:
    return s.sup_modulus()


def sample(s: RadialSymbol, r: np.ndarray) -> np.ndarray:
    """Vectorised values with r clamped into (0, 1); used by quadrature routes."""
    r = np.clip(np.asarray(r, dtype=float), 1e-300, _R_MAX)
    return s.values(r)


def _hull(points: list[complex]) -> list[complex]:
    """Vertices of the convex hull (monotone chain), collinear points dropped."""
    pts = sorted(set((p.real, p.imag) for p in points))
    if len(pts) <= 2:
        return [complex(*p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [complex(*p) for p in lower[:-1] + upper[:-1]]


def essential_range_extreme_points(s: RadialSymbol) -> frozenset[complex]:
    """Extreme points of the closed convex hull of the essential range.

    The oscillating symbol has a circle as essential range (every point is
    extreme); for it UnsupportedVariant is raised with ``circle`` set.
    """
    if isinstance(s, Constant):
        return frozenset({s.value})
    if isinstance(s, PiecewiseConstant):
        return frozenset(_hull(list(s.values_)))
    if isinstance(s, StepExample10):
        return frozenset({0j, 1 + 0j})
    if isinstance(s, Power):
        return frozenset({1 + 0j}) if s.p == 0 else frozenset({0j, 1 + 0j})
    if isinstance(s, GrudskyVasilevski):
        raise UnsupportedVariant(
            "essential range of the oscillating symbol is a circle",
            circle=(0j, compute_alpha().modulus),
        )
    if isinstance(s, Affine):
        if s.a == 0:
            return frozenset({s.b})
        try:
            pts = essential_range_extreme_points(s.inner)
        except UnsupportedVariant as exc:
            if exc.circle is None:
                raise
            c, rad = exc.circle
            raise UnsupportedVariant(str(exc), circle=(s.a * c + s.b, abs(s.a) * rad)) from None
        return frozenset(_hull([s.a * p + s.b for p in pts]))
    if isinstance(s, RealPart):
        try:
            xs = [p.real for p in essential_range_extreme_points(s.inner)]
        except UnsupportedVariant as exc:
            if exc.circle is None:
                raise
            c, rad = exc.circle
            xs = [c.real - rad, c.real + rad]
        return frozenset({complex(min(xs)), complex(max(xs))})
    raise UnsupportedVariant(f"no essential range for {type(s).__name__}")


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def complex_to_json(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def parse_complex(text: str) -> complex:
    """Parse ``0.5+0.5i``, ``3i``, ``-i``, ``2`` (``j`` also accepted)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"not a complex number: {text!r}") from None


def complex_from_json(obj: Any, field: str) -> complex:
    if isinstance(obj, bool):
        raise ParseError("expected a complex number", field)
    if isinstance(obj, (int, float)):
        z = complex(obj)
    elif isinstance(obj, str):
        try:
            z = parse_complex(obj)
        except ParseError as exc:
            raise ParseError(str(exc), field) from None
    elif isinstance(obj, dict):
        try:
            z = complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
        except (TypeError, ValueError):
            raise ParseError("re/im must be numbers", field) from None
    else:
        raise ParseError("expected a complex number", field)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"{field}: value must be finite")
    return z


def symbol_from_dict(obj: Any, field: str = "symbol") -> RadialSymbol:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("expected an object with a 'kind' key", field)
    kind = obj["kind"]

    def need(key):
        if key not in obj:
            raise ParseError(f"missing key {key!r}", field)
        return obj[key]

    if kind == "constant":
        return Constant(complex_from_json(need("value"), f"{field}.value"))
    if kind == "power":
        p = need("p")
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ParseError("p must be a number", f"{field}.p")
        return Power(float(p))
    if kind == "gv":
        return GrudskyVasilevski()
    if kind == "example10":
        return StepExample10()
    if kind == "piecewise":
        bps = need("breakpoints")
        vals = need("values")
        if not isinstance(bps, list) or not isinstance(vals, list):
            raise ParseError("breakpoints and values must be lists", field)
        try:
            bp = [float(b) for b in bps]
        except (TypeError, ValueError):
            raise ParseError("breakpoints must be numbers", f"{field}.breakpoints") from None
        cv = [complex_from_json(v, f"{field}.values[{i}]") for i, v in enumerate(vals)]
        return PiecewiseConstant(tuple(bp), tuple(cv))
    if kind == "affine":
        return Affine(
            complex_from_json(obj.get("a", 1.0), f"{field}.a"),
            complex_from_json(obj.get("b", 0.0), f"{field}.b"),
            symbol_from_dict(need("inner"), f"{field}.inner"),
        )
    if kind == "re":
        return RealPart(symbol_from_dict(need("inner"), f"{field}.inner"))
    raise ParseError(f"unknown symbol kind {kind!r}", f"{field}.kind")


def fingerprint(s: RadialSymbol) -> str:
    blob = json.dumps(s.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def describe(s: RadialSymbol) -> str:
    if isinstance(s, Constant):
        return f"constant:{s.value}"
    if isinstance(s, Power):
        return f"power:{s.p:g}"
    if isinstance(s, GrudskyVasilevski):
        return "gv"
    if isinstance(s, StepExample10):
        return "example10"
    if isinstance(s, PiecewiseConstant):
        return f"piecewise[{len(s.values_)}]"
    if isinstance(s, Affine):
        return f"{s.a}*({describe(s.inner)})+{s.b}"
    if isinstance(s, RealPart):
        return f"re:{describe(s.inner)}"
    return type(s).__name__
