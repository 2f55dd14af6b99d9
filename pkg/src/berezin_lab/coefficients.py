"""Normalised Mellin coefficients ``C_n(f) = (n+1) int_0^1 f(r) r^n dr``.

Every built-in variant has a closed form (vectorised over ``n``); a
quadrature route exists for all of them as an independent check.
Coefficient tables are cached as CSV under ``$BEREZIN_LAB_CACHE``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numerics
from .errors import CacheCorrupt, UnsupportedVariant
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
    step_blocks,
    fingerprint,
    gv_moment,
    sample,
)

log = logging.getLogger(__name__)

CLOSED_FORM = "closed"
QUADRATURE = "quadrature"
CACHE_ENV = "BEREZIN_LAB_CACHE"

# Step-symbol blocks are summed until k * 2^-(m^2) drops below this.
_BLOCK_TAIL = 1e-20


def _log_near_one(b: float) -> float:
    return math.log1p(b - 1.0) if b > 0.5 else math.log(b)


def _power_diff(k: np.ndarray, log_lo: float, log_hi: float) -> np.ndarray:
    """``hi^k - lo^k`` for ``0 <= lo < hi <= 1`` given their logs (``-inf`` for 0)."""
    hi_pow = np.exp(k * log_hi)
    if log_lo == -math.inf:
        return hi_pow
    return hi_pow * -np.expm1(k * (log_lo - log_hi))


def _step_closed(k: np.ndarray) -> tuple[np.ndarray, float]:
    kmax = float(np.max(k)) if k.size else 1.0
    # ramp: k * int_0^{1/16} 16 r^k dr
    out = k / (k + 1.0) * np.exp(k * math.log(STEP_RAMP_END))
    # value 1 on [1/16, 15/16)
    out = out + _power_diff(k, math.log(STEP_RAMP_END), math.log1p(-STEP_RAMP_END))
    err = 0.0
    for b in step_blocks():
        if b.value:
            out = out + _power_diff(k, math.log1p(-b.gap_hi), math.log1p(-b.gap_lo))
        err = kmax * b.gap_lo  # mass not yet accounted for, times sup |g| = 1
        if err < _BLOCK_TAIL:
            break
    return out, err


def mellin_closed_form(s: RadialSymbol, n) -> np.ndarray:
    """Closed-form ``C_n(s)`` for an array of indices (complex array)."""
    return _closed(s, np.asarray(n, dtype=np.int64))[0]


def _closed(s: RadialSymbol, n: np.ndarray) -> tuple[np.ndarray, float]:
    k = n.astype(float) + 1.0
    if isinstance(s, Constant):
        return np.full(k.shape, s.value, dtype=complex), 0.0
    if isinstance(s, Power):
        return (k / (k + s.p)).astype(complex), 0.0
    if isinstance(s, GrudskyVasilevski):
        # alpha * Gamma(1+i) = 1 leaves only the phase (n+1)^{-i}
        return np.exp(-1j * np.log(k)), 0.0
    if isinstance(s, StepExample10):
        vals, err = _step_closed(k)
        return vals.astype(complex), err
    if isinstance(s, PiecewiseConstant):
        out = np.zeros(k.shape, dtype=complex)
        bp = s.breakpoints_
        for lo, hi, v in zip(bp[:-1], bp[1:], s.values_):
            if v == 0:
                continue
            log_lo = -math.inf if lo == 0.0 else _log_near_one(lo)
            out += v * _power_diff(k, log_lo, _log_near_one(hi))
        return out, 0.0
    if isinstance(s, Affine):
        inner, err = _closed(s.inner, n)
        return s.a * inner + s.b, abs(s.a) * err
    if isinstance(s, RealPart):
        # the weight r^n is real, so C_n(Re f) = Re C_n(f)
        inner, err = _closed(s.inner, n)
        return inner.real.astype(complex), err
    raise UnsupportedVariant(f"no closed form for {type(s).__name__}")


def _exact_modulus(s: RadialSymbol, n: np.ndarray) -> np.ndarray | None:
    if isinstance(s, GrudskyVasilevski):
        return np.ones(n.shape)
    return None


def mellin_quadrature(s: RadialSymbol, n: int, tol: float = numerics.DEFAULT_TOL) -> numerics.QuadratureResult:
    """``C_n(s)`` by adaptive quadrature, independent of the closed forms."""
    n = int(n)
    if n < 0:
        raise ValueError("index must be >= 0")
    k = n + 1.0
    if isinstance(s, GrudskyVasilevski):
        alpha = compute_alpha()
        scale = k * alpha.modulus
        res = gv_moment(k, tol / scale)
        value = k * alpha.value * res.value
        err = scale * res.error_estimate + k * abs(res.value) * alpha.error_estimate
        return numerics.QuadratureResult(value, err, res.evaluations)
    if isinstance(s, Affine):
        res = mellin_quadrature(s.inner, n, tol / max(abs(s.a), 1.0))
        return numerics.QuadratureResult(s.a * res.value + s.b, abs(s.a) * res.error_estimate, res.evaluations)
    if isinstance(s, RealPart):
        res = mellin_quadrature(s.inner, n, tol)
        return numerics.QuadratureResult(complex(res.value.real), res.error_estimate, res.evaluations)

    def integrand(r: np.ndarray) -> np.ndarray:
        return k * sample(s, r) * np.power(r, n)

    res = numerics.integrate(integrand, 0.0, 1.0, tol=tol, points=s.breakpoints())
    return res


def mellin_coefficient(s: RadialSymbol, n: int, tol: float = numerics.DEFAULT_TOL, route: str = CLOSED_FORM) -> complex:
    if n < 0:
        raise ValueError("index must be >= 0")
    if route == QUADRATURE:
        return mellin_quadrature(s, n, tol).value
    return complex(mellin_closed_form(s, np.array([n]))[0])


def toeplitz_eigenvalue_sequence(s: RadialSymbol, N: int) -> np.ndarray:
    """``(C_{2n+1}(s))_{n=0..N}``: the diagonal of the radial Toeplitz operator."""
    n = np.arange(N + 1, dtype=np.int64)
    return mellin_closed_form(s, 2 * n + 1)


# ---------------------------------------------------------------------------
# tables and cache
# ---------------------------------------------------------------------------

_HEADER = ["n", "re", "im", "abs", "route", "err"]


@dataclass
class CoefficientTable:
    symbol_fingerprint: str
    n: np.ndarray
    values: np.ndarray
    moduli: np.ndarray
    routes: list[str]
    errors: np.ndarray

    def __len__(self) -> int:
        return len(self.n)

    def max_modulus(self) -> float:
        return float(np.max(self.moduli))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# fingerprint={self.symbol_fingerprint}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_HEADER)
        for i in range(len(self.n)):
            z = self.values[i]
            w.writerow(
                [int(self.n[i]), repr(float(z.real)), repr(float(z.imag)),
                 repr(float(self.moduli[i])), self.routes[i], repr(float(self.errors[i]))]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, expected_fingerprint: str | None = None) -> "CoefficientTable":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# fingerprint="):
            raise CacheCorrupt("missing fingerprint line")
        fp = lines[0].split("=", 1)[1].strip()
        if expected_fingerprint is not None and fp != expected_fingerprint:
            raise CacheCorrupt(f"fingerprint mismatch: {fp} != {expected_fingerprint}")
        rows = list(csv.reader(lines[1:]))
        if not rows or rows[0] != _HEADER:
            raise CacheCorrupt("bad header")
        try:
            body = rows[1:]
            n = np.array([int(r[0]) for r in body], dtype=np.int64)
            values = np.array([complex(float(r[1]), float(r[2])) for r in body])
            moduli = np.array([float(r[3]) for r in body])
            routes = [r[4] for r in body]
            errors = np.array([float(r[5]) for r in body])
        except (ValueError, IndexError) as exc:
            raise CacheCorrupt(f"unparseable row: {exc}") from None
        if not np.array_equal(n, np.arange(len(n))):
            raise CacheCorrupt("indices are not contiguous from 0")
        return cls(fp, n, values, moduli, routes, errors)

    def equals(self, other: "CoefficientTable") -> bool:
        return (
            self.symbol_fingerprint == other.symbol_fingerprint
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.moduli, other.moduli)
            and self.routes == other.routes
            and np.array_equal(self.errors, other.errors)
        )


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, "./.cache"))


def cache_path(s: RadialSymbol, N: int, tol: float, directory: Path | None = None) -> Path:
    directory = cache_dir() if directory is None else Path(directory)
    return directory / f"coeffs_{fingerprint(s)}_N{N}_tol{tol:.3g}.csv"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def compute_table(s: RadialSymbol, N: int, tol: float = numerics.DEFAULT_TOL) -> CoefficientTable:
    n = np.arange(N + 1, dtype=np.int64)
    try:
        values, err = _closed(s, n)
        routes = [CLOSED_FORM] * len(n)
        errors = np.full(len(n), err)
    except UnsupportedVariant:
        results = [mellin_quadrature(s, int(i), tol) for i in n]
        values = np.array([r.value for r in results])
        routes = [QUADRATURE] * len(n)
        errors = np.array([r.error_estimate for r in results])
    moduli = _exact_modulus(s, n)
    if moduli is None:
        moduli = np.abs(values)
    return CoefficientTable(fingerprint(s), n, values, moduli, routes, errors)


def coefficient_table(
    s: RadialSymbol,
    N: int,
    tol: float = numerics.DEFAULT_TOL,
    use_cache: bool = True,
    directory: Path | None = None,
) -> CoefficientTable:
    """Coefficients ``C_0..C_N``, loaded from or persisted to the cache."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if not use_cache:
        return compute_table(s, N, tol)
    path = cache_path(s, N, tol, directory)
    fp = fingerprint(s)
    if path.exists():
        try:
            table = CoefficientTable.from_csv(path.read_text(), expected_fingerprint=fp)
            if len(table) == N + 1:
                return table
            raise CacheCorrupt("row count mismatch")
        except CacheCorrupt as exc:
            log.warning("discarding corrupt cache entry %s: %s", path, exc)
    table = compute_table(s, N, tol)
    _atomic_write(path, table.to_csv())
    return table


