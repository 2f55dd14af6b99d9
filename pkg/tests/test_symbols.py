import cmath
import math

import mpmath
import numpy as np
import pytest

from berezin_lab.errors import DomainError, ParseError, UnsupportedVariant, ValidationError
from berezin_lab.symbols import (
    STEP_RAMP_END,
    Affine,
    Constant,
    GrudskyVasilevski,
    PiecewiseConstant,
    Power,
    RealPart,
    StepExample10,
    compute_alpha,
    essential_range_extreme_points,
    evaluate,
    step_blocks,
    fingerprint,
    parse_complex,
    symbol_from_dict,
    sup_modulus,
)

GV = GrudskyVasilevski()
EX10 = StepExample10()


class TestAlpha:
    def test_modulus_matches_gamma_reflection(self):
        alpha = compute_alpha()
        assert alpha.modulus == pytest.approx(1.0 / math.sqrt(math.pi / math.sinh(math.pi)), abs=1e-12)

    def test_value_matches_mpmath_gamma(self):
        expected = complex(1 / mpmath.gamma(1 + 1j))
        assert abs(compute_alpha().value - expected) < 1e-12
        assert cmath.phase(compute_alpha().value) == pytest.approx(float(-mpmath.arg(mpmath.gamma(1 + 1j))), abs=1e-12)

    def test_riemann_sum_oracle_on_truncated_interval(self):
        """Plain midpoint sum over [1/e, 1] in r against the log-log route on v <= 0."""
        from berezin_lab import numerics
        from berezin_lab.symbols import gv_log_integrand

        panels = 10**7
        h = (1.0 - math.exp(-1.0)) / panels
        total = 0j
        for start in range(0, panels, 10**6):
            r = math.exp(-1.0) + h * (np.arange(start, start + 10**6) + 0.5)
            total += np.sum(np.exp(1j * np.log(np.log(1.0 / r))))
        riemann = total * h
        # r = exp(-e^v) maps [1/e, 1] onto v in (-inf, 0]
        loglog = numerics.integrate(gv_log_integrand(1.0), -40.0, 0.0, tol=1e-12).value
        assert abs(riemann - loglog) < 1e-6

    def test_published_digits(self):
        alpha = compute_alpha()
        assert alpha.value == pytest.approx(1.8307443965905352 + 0.569607641036602j, abs=1e-12)
        assert alpha.modulus / math.sqrt(2) == pytest.approx(1.3557429532132788, abs=1e-12)


class TestVariants:
    @pytest.mark.parametrize(
        "s,r,expected",
        [
            (Constant(2 - 1j), 0.3, 2 - 1j),
            (Power(2.0), 0.5, 0.25),
            (Power(0.0), 0.5, 1.0),
            (EX10, 0.5 / 16, 0.5),
            (EX10, 0.5, 1.0),
            (EX10, 1 - 2.0**-5, 1.0),
            (EX10, 1 - 2.0**-10, 0.0),
            (EX10, 1 - 2.0**-17, 1.0),
            (PiecewiseConstant((0.0, 0.5, 1.0), (1j, -1.0)), 0.25, 1j),
            (PiecewiseConstant((0.0, 0.5, 1.0), (1j, -1.0)), 0.75, -1.0),
            (Affine(2.0, 1j, Power(1.0)), 0.5, 1.0 + 1j),
            (RealPart(Constant(3 + 4j)), 0.5, 3.0),
        ],
    )
    def test_point_values(self, s, r, expected):
        assert evaluate(s, r) == pytest.approx(expected, abs=1e-15)

    def test_gv_modulus_is_constant(self):
        r = np.array([1e-200, 1e-10, 0.3, 0.5, 0.9, 1 - 1e-12])
        assert np.allclose(np.abs(GV.values(r)), compute_alpha().modulus, rtol=0, atol=1e-14)

    def test_gv_near_one_uses_accurate_log(self):
        r = 1.0 - 2.0**-40
        expected = compute_alpha().value * cmath.exp(1j * math.log(-math.log1p(-(2.0**-40))))
        assert evaluate(GV, r) == pytest.approx(expected, abs=1e-13)

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, r):
        with pytest.raises(DomainError):
            evaluate(Power(1.0), r)

    @pytest.mark.parametrize(
        "s,expected",
        [(Constant(3j), 3.0), (Power(1.0), 1.0), (EX10, 1.0), (Affine(2.0, 1.0, Power(1.0)), 3.0)],
    )
    def test_sup_modulus(self, s, expected):
        assert sup_modulus(s) == pytest.approx(expected)

    def test_gv_sup_is_alpha(self):
        assert sup_modulus(GV) == pytest.approx(compute_alpha().modulus)

    def test_piecewise_validation(self):
        with pytest.raises(ValidationError):
            PiecewiseConstant((0.0, 0.5), (1.0,))
        with pytest.raises(ValidationError):
            PiecewiseConstant((0.0, 0.7, 0.5, 1.0), (1.0, 2.0, 3.0))
        with pytest.raises(ValidationError):
            PiecewiseConstant((0.0, 1.0), (math.nan,))

    def test_is_real(self):
        assert EX10.is_real() and Power(1.0).is_real() and RealPart(GV).is_real()
        assert not GV.is_real() and not Constant(1j).is_real()


class TestStepBlocks:
    def test_blocks_tile_the_boundary(self):
        blocks = list(step_blocks(12))
        assert blocks[0].gap_hi == 1.0 / 16.0
        for a, b in zip(blocks, blocks[1:]):
            assert a.lo_exp == b.hi_exp
        assert [b.value for b in blocks[:4]] == [1.0, 0.0, 1.0, 0.0]

    def test_ramp_is_continuous_into_plateau(self):
        assert evaluate(EX10, STEP_RAMP_END * (1 - 1e-12)) == pytest.approx(1.0, abs=1e-10)


class TestExtremePoints:
    def test_piecewise_hull(self):
        s = PiecewiseConstant((0.0, 0.2, 0.4, 0.6, 0.8, 1.0), (0, 1, 1j, 1 + 1j, 0.5 + 0.5j))
        assert essential_range_extreme_points(s) == frozenset({0, 1, 1j, 1 + 1j})

    def test_step_and_power(self):
        assert essential_range_extreme_points(EX10) == frozenset({0, 1})
        assert essential_range_extreme_points(Power(3.0)) == frozenset({0, 1})

    def test_gv_reports_circle(self):
        with pytest.raises(UnsupportedVariant) as info:
            essential_range_extreme_points(GV)
        assert info.value.circle == (0j, pytest.approx(compute_alpha().modulus))

    def test_affine_maps_circle(self):
        with pytest.raises(UnsupportedVariant) as info:
            essential_range_extreme_points(Affine(2j, 1.0, GV))
        c, rad = info.value.circle
        assert c == 1.0 and rad == pytest.approx(2 * compute_alpha().modulus)

    def test_real_part_of_circle(self):
        a = compute_alpha().modulus
        pts = sorted(p.real for p in essential_range_extreme_points(RealPart(GV)))
        assert pts == pytest.approx([-a, a])


class TestJson:
    @pytest.mark.parametrize(
        "s",
        [
            Constant(0.5 - 2j),
            Power(2.5),
            GV,
            EX10,
            PiecewiseConstant((0.0, 0.25, 1.0), (1j, -0.5)),
            Affine(1 + 1j, -2.0, Power(1.0)),
            RealPart(Affine(1j, 0.0, GV)),
        ],
    )
    def test_round_trip(self, s):
        assert symbol_from_dict(s.to_dict()) == s
        assert fingerprint(symbol_from_dict(s.to_dict())) == fingerprint(s)

    def test_fingerprints_differ(self):
        assert fingerprint(Power(1.0)) != fingerprint(Power(2.0))

    @pytest.mark.parametrize(
        "text,value", [("0.5+0.5i", 0.5 + 0.5j), ("3i", 3j), ("-i", -1j), ("i", 1j), ("2", 2), ("1-2j", 1 - 2j)]
    )
    def test_parse_complex(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize(
        "obj,field",
        [
            ({"kind": "wobble"}, "symbol.kind"),
            ({"kind": "power"}, "symbol"),
            ({"kind": "power", "p": "two"}, "symbol.p"),
            ({"kind": "constant", "value": [1, 2]}, "symbol.value"),
            ({"kind": "affine", "a": 1, "inner": {"kind": "constant", "value": "x"}}, "symbol.inner.value"),
            ([1, 2], "symbol"),
        ],
    )
    def test_parse_errors_name_the_field(self, obj, field):
        with pytest.raises(ParseError) as info:
            symbol_from_dict(obj)
        assert info.value.field == field
