"""Small worked examples for each operation, with hand-checkable answers."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from berezin_lab import numerics
from berezin_lab.berezin import (
    QuasihomogeneousSymbol,
    berezin_integral_oracle,
    berezin_quasihomogeneous,
    berezin_radial,
    convex_decomposition,
)
from berezin_lab.cluster import (
    ChainConfig,
    boundary_mean,
    cluster_estimate,
    density_arc_count,
    density_ratio,
    extreme_point_membership_check,
    mean_phase_schedule,
    radius_schedule,
    verify_chain,
)
from berezin_lab.coefficients import coefficient_table, mellin_coefficient, toeplitz_eigenvalue_sequence
from berezin_lab.symbols import (
    Constant,
    GrudskyVasilevski,
    PiecewiseConstant,
    Power,
    StepExample10,
    compute_alpha,
    essential_range_extreme_points,
    evaluate,
    sup_modulus,
)

GV = GrudskyVasilevski()
EX10 = StepExample10()
MEAN_LIMIT = compute_alpha().modulus / math.sqrt(2.0)


class TestNumerics:
    @pytest.mark.parametrize("f,expected", [(lambda r: np.ones_like(r), 1.0), (lambda r: r, 0.5)])
    def test_elementary_integrals(self, f, expected):
        assert numerics.integrate(f, 0.0, 1.0).value == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("family,R", [("radial", 0.7), ("lift", 0.9)])
    def test_unit_coefficients_sum_to_one(self, family, R):
        res = numerics.sum_weighted_coefficients(lambda n: np.ones(n.shape), R, 1.0, 1e-12, family=family)
        assert res.value == pytest.approx(1.0, abs=1e-12) and res.tail_bound <= 1e-12

    @pytest.mark.parametrize("family,survivor", [("radial", 0), ("lift", 1)])
    def test_centre_keeps_one_term(self, family, survivor):
        w = numerics.weights(family, 0.0, np.arange(5))
        assert w.tolist() == [1.0 if n == survivor else 0.0 for n in range(5)]


class TestSymbols:
    def test_values(self):
        assert evaluate(Constant(0.5), 0.3) == 0.5
        assert evaluate(GV, math.exp(-1.0)) == pytest.approx(compute_alpha().value, abs=1e-15)
        assert evaluate(EX10, 1.0 / 32.0) == 0.5

    def test_sup_moduli(self):
        assert sup_modulus(Constant(3j)) == 3.0
        assert sup_modulus(GV) == pytest.approx(1.9173100715259714, abs=1e-13)
        assert sup_modulus(EX10) == 1.0

    def test_extreme_points(self):
        three = PiecewiseConstant((0.0, 0.2, 0.6, 1.0), (0.0, 0.5, 1.0))
        assert essential_range_extreme_points(three) == frozenset({0, 1})
        assert essential_range_extreme_points(EX10) == frozenset({0, 1})
        two = PiecewiseConstant((0.0, 0.5, 1.0), (1.0, 1j))
        assert essential_range_extreme_points(two) == frozenset({1, 1j})


class TestCoefficients:
    def test_values(self):
        assert mellin_coefficient(GV, 0) == 1.0
        assert mellin_coefficient(Power(1.0), 3) == pytest.approx(0.8, abs=1e-15)
        c9 = mellin_coefficient(GV, 9)
        assert c9 == pytest.approx(cmath.exp(-1j * math.log(10.0)), abs=1e-15)
        assert c9 == pytest.approx(-0.668202 - 0.743980j, abs=1e-6)
        assert abs(mellin_coefficient(GV, 9, tol=1e-11, route="quadrature") - c9) < 1e-9

    def test_tables(self):
        ones = coefficient_table(Constant(1.0), 100)
        assert np.all(ones.values == 1.0) and set(ones.routes) == {"closed"}
        assert np.all(coefficient_table(GV, 10**4).moduli == 1.0)

    def test_eigenvalues(self):
        assert np.all(toeplitz_eigenvalue_sequence(Constant(2 - 1j), 50) == 2 - 1j)
        assert toeplitz_eigenvalue_sequence(GV, 0)[0] == pytest.approx(0.769239 - 0.638961j, abs=1e-6)
        n = np.arange(40)
        assert np.allclose(toeplitz_eigenvalue_sequence(Power(1.0), 39), (2 * n + 2) / (2 * n + 3.0), atol=1e-15)


class TestBerezin:
    def test_values(self):
        assert berezin_radial(Constant(1.0), 0.7) == pytest.approx(1.0, abs=1e-10)
        assert berezin_radial(GV, 0.0) == toeplitz_eigenvalue_sequence(GV, 0)[0]
        assert abs(berezin_radial(Power(1.0), 0.5) - berezin_integral_oracle(Power(1.0), 0.5).value) < 1e-8

    def test_quasihomogeneous_centre(self):
        assert berezin_quasihomogeneous(QuasihomogeneousSymbol(1, GV), 0.0, 1.0).value == 0

    def test_oracle_constant_off_axis(self):
        assert berezin_integral_oracle(Constant(2 + 1j), 0.3 + 0.2j).value == pytest.approx(2 + 1j, abs=1e-9)

    def test_oracle_step_symbol_at_centre(self):
        # 2 int g r dr: ramp 2*16/3 (1/16)^3, plateau (15/16)^2 - (1/16)^2, even blocks exact
        exact = Fraction(32, 3) * Fraction(1, 16) ** 3 + Fraction(15, 16) ** 2 - Fraction(1, 16) ** 2
        for m in range(2, 10, 2):
            lo = 1 - Fraction(1, 2 ** (m * m))
            hi = 1 - Fraction(1, 2 ** ((m + 1) ** 2))
            exact += hi**2 - lo**2
        assert abs(berezin_integral_oracle(EX10, 0.0).value - float(exact)) < 1e-9
        assert berezin_radial(EX10, 0.0) == pytest.approx(float(exact), abs=1e-15)

    def test_decomposition_extremes(self):
        empty = convex_decomposition(GV, 0.8, 0.0, 10.0)
        assert empty.a_R == 0.0 and empty.N_R == pytest.approx(berezin_radial(GV, 0.8), abs=1e-9)
        full = convex_decomposition(GV, 0.8, 100.0, 1e-9)
        assert full.a_R == 1.0 and full.M_R == pytest.approx(berezin_radial(GV, 0.8), abs=1e-9)

    def test_far_mass_stays_positive(self):
        masses = [convex_decomposition(GV, R, 1.0, math.sqrt(2.0)).a_R for R in radius_schedule(range(4, 21))]
        assert min(masses) > 0.05


class TestCluster:
    def test_means(self):
        assert boundary_mean(Constant(3 - 1j), 0.4) == 3 - 1j
        for eps in (0.1, 0.5, 0.99):
            assert boundary_mean(Power(1.0), eps) == pytest.approx((1 + eps) / 2, abs=1e-15)
        assert abs(abs(boundary_mean(GV, 1 - 1e-4)) - MEAN_LIMIT) < 1e-3
        assert 1 - 2.0**-5 <= boundary_mean(EX10, gap=2.0**-16).real <= 1.0

    def test_gv_mean_error_is_order_gap(self):
        ratios = [abs(abs(boundary_mean(GV, gap=10.0**-k)) - MEAN_LIMIT) / 10.0**-k for k in range(2, 7)]
        assert max(ratios) < 0.2

    def test_constant_cluster(self):
        est = cluster_estimate("mellin", Constant(0.3j), np.arange(1000), delta=1e-6)
        assert est.cluster_points == [0.3j]
        assert est.tail_limsup_modulus == est.tail_liminf_modulus == pytest.approx(0.3)

    def test_mean_phase_sweep_covers_circle(self):
        phis = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
        est = cluster_estimate("mean", GV, mean_phase_schedule(phis, range(1, 6)), delta=0.05, tail_fraction=1.0)
        grid = MEAN_LIMIT * np.exp(1j * np.linspace(0.0, 2.0 * math.pi, 100, endpoint=False))
        spacing = 2.0 * math.pi * MEAN_LIMIT / 100
        assert max(np.min(np.abs(est.values - g)) for g in grid) <= 0.05 + spacing

    def test_estimates_are_deterministic(self):
        a = cluster_estimate("berezin", GV, radius_schedule(np.linspace(2, 16, 20)), delta=0.01)
        b = cluster_estimate("berezin", GV, radius_schedule(np.linspace(2, 16, 20)), delta=0.01)
        assert a.cluster_points == b.cluster_points and np.array_equal(a.values, b.values)

    def test_density_of_constants(self):
        near = density_ratio(Constant(0.5), 0.5, 0.5, 1000)
        assert near.counts[-1] == (1000, 0) and near.ratio_floor == 0.0
        far = density_ratio(Constant(0.0), 1.0, 0.5, 1000)
        assert far.counts[-1] == (1000, 1001) and far.ratio_floor == 1.0

    def test_gv_density_floor(self):
        rep = density_ratio(GV, 1.0, math.sqrt(2.0), 10**6)
        assert rep.counts[-1] == (10**6, 338866)
        assert rep.ratio_floor > 0

    def test_arc_count_empty(self):
        # ln(2n+2) in [ln 2, ln 4] never reaches the arc (pi/2, 3pi/2)
        assert density_arc_count(0.0, 1) == 0

    def test_chain_of_constant(self):
        cfg = ChainConfig(mellin_n=np.arange(0, 2**20), berezin_k=tuple(range(1, 15)))
        rep = verify_chain(Constant(0.6 + 0.8j), cfg)
        assert rep.sup_mellin == pytest.approx(1.0, abs=1e-15)
        assert rep.sup_mean == pytest.approx(1.0, abs=1e-15)
        assert rep.sup_berezin == pytest.approx(1.0, abs=1e-9)

    def test_membership_of_constant(self):
        sched = {"mellin": np.arange(16), "mean": [0.5, 0.1], "berezin": [0.5, 0.9]}
        rep = extreme_point_membership_check(Constant(2.0), 2.0, sched, delta=1e-6)
        assert all(rep.members.values()) and rep.consistent
