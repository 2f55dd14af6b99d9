import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berezin_lab.coefficients import (
    CLOSED_FORM,
    CoefficientTable,
    cache_path,
    coefficient_table,
    compute_table,
    mellin_closed_form,
    mellin_coefficient,
    mellin_quadrature,
    toeplitz_eigenvalue_sequence,
)
from berezin_lab.errors import CacheCorrupt
from berezin_lab.symbols import (
    Affine,
    Constant,
    GrudskyVasilevski,
    PiecewiseConstant,
    Power,
    RealPart,
    StepExample10,
)

GV = GrudskyVasilevski()
EX10 = StepExample10()

VARIANTS = [
    Constant(0.25 - 1j),
    Power(1.0),
    Power(3.5),
    GV,
    EX10,
    PiecewiseConstant((0.0, 0.3, 0.9, 1.0), (1.0, -1j, 0.5 + 0.5j)),
    Affine(1 - 2j, 0.5, GV),
    RealPart(GV),
]


def step_exact(n: int, blocks: int = 9) -> Fraction:
    """C_n of the step symbol in exact rational arithmetic (blocks beyond m=9 are below 2^-100)."""
    k = n + 1
    sixteenth = Fraction(1, 16)
    total = Fraction(16 * k, k + 1) * sixteenth ** (k + 1)  # ramp 16 r on [0, 1/16)
    total += (1 - sixteenth) ** k - sixteenth**k  # plateau [1/16, 15/16)
    for m in range(2, blocks + 1, 2):
        lo = 1 - Fraction(1, 2 ** (m * m))
        hi = 1 - Fraction(1, 2 ** ((m + 1) ** 2))
        total += hi**k - lo**k
    return total


class TestClosedForms:
    @pytest.mark.parametrize("s", VARIANTS, ids=lambda s: s.to_dict()["kind"])
    @pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 100, 1000])
    def test_quadrature_agrees(self, s, n):
        q = mellin_quadrature(s, n, 1e-11)
        assert abs(q.value - mellin_coefficient(s, n)) < 1e-9

    def test_gv_phase_formula(self):
        n = np.arange(5000)
        assert np.max(np.abs(mellin_closed_form(GV, n) - np.exp(-1j * np.log(n + 1.0)))) == 0.0

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 15, 40])
    def test_step_exact_rational(self, n):
        assert mellin_coefficient(EX10, n) == pytest.approx(float(step_exact(n)), abs=1e-14)

    def test_power_formula(self):
        n = np.arange(100)
        assert np.allclose(mellin_closed_form(Power(2.0), n), (n + 1) / (n + 3.0), rtol=0, atol=1e-15)

    def test_constant_normalisation(self):
        assert np.all(mellin_closed_form(Constant(1.0), np.arange(1000)) == 1.0)

    @given(n=st.integers(0, 10**7))
    @settings(max_examples=50, deadline=None)
    def test_step_coefficients_in_unit_interval(self, n):
        c = mellin_coefficient(EX10, n)
        assert 0.0 <= c.real <= 1.0 and c.imag == 0.0

    def test_eigenvalue_sequence_uses_odd_indices(self):
        seq = toeplitz_eigenvalue_sequence(GV, 10)
        assert np.allclose(seq, np.exp(-1j * np.log(2.0 * np.arange(11) + 2.0)))

    def test_negative_index(self):
        with pytest.raises(ValueError):
            mellin_coefficient(GV, -1)


class TestQuadratureRoute:
    def test_gv_large_index(self):
        for n in (10**4, 10**6):
            q = mellin_quadrature(GV, n, 1e-10)
            assert abs(q.value - cmath.exp(-1j * math.log(n + 1))) < 1e-8

    def test_tolerance_halving_consistent(self):
        a = mellin_quadrature(EX10, 50, 1e-8)
        b = mellin_quadrature(EX10, 50, 0.5e-8)
        assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-15


class TestTables:
    def test_gv_moduli_are_exactly_one(self):
        table = compute_table(GV, 2000)
        assert table.max_modulus() == 1.0
        assert np.all(table.moduli == 1.0)

    def test_csv_round_trip_is_bit_exact(self):
        table = compute_table(EX10, 300)
        back = CoefficientTable.from_csv(table.to_csv(), expected_fingerprint=table.symbol_fingerprint)
        assert back.equals(table)
        assert back.routes == [CLOSED_FORM] * 301

    def test_cache_round_trip(self, isolated_cache):
        first = coefficient_table(GV, 500, 1e-10)
        path = cache_path(GV, 500, 1e-10)
        assert path.exists() and path.parent == isolated_cache
        again = coefficient_table(GV, 500, 1e-10)
        assert again.equals(first)
        assert not list(isolated_cache.glob("*.tmp"))

    def test_fingerprint_mismatch_rejected(self):
        text = compute_table(Power(1.0), 10).to_csv()
        with pytest.raises(CacheCorrupt):
            CoefficientTable.from_csv(text, expected_fingerprint="0" * 16)

    @pytest.mark.parametrize(
        "damage",
        [
            lambda t: "",
            lambda t: t.replace("# fingerprint", "#fp", 1),
            lambda t: t.replace("n,re,im", "n,real,im", 1),
            lambda t: t[: len(t) // 2] + "garbage\n",
            lambda t: "\n".join(l for i, l in enumerate(t.splitlines()) if i != 5),
        ],
    )
    def test_corrupt_cache_is_recomputed(self, damage):
        s = Power(2.0)
        good = coefficient_table(s, 40)
        path = cache_path(s, 40, 1e-10)
        path.write_text(damage(path.read_text()))
        repaired = coefficient_table(s, 40)
        assert repaired.equals(good)
        assert CoefficientTable.from_csv(path.read_text()).equals(good)

    def test_no_cache(self, isolated_cache):
        coefficient_table(GV, 10, use_cache=False)
        assert not isolated_cache.exists()
