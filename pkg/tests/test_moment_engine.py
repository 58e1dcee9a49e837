import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentclt.clt_harness import MAProcess, empirical_mixed_moment
from momentclt.errors import ArgumentError, SizeError
from momentclt.index_spaces import box_family, make_box, make_window
from momentclt.moment_engine import (
    MomentEngine,
    covariance,
    decay_bound_check,
    exact_mixed_moment,
    gamma,
    mixing_product_bound,
    moment_bound,
    separation_certificate,
    separation_constants,
    separation_sweep,
    sigma2,
)
from momentclt.partitions import bell_number
from momentclt.processes import Distribution, InnovationSpec, MACoefficients, truncate_coefficients
from oracles import cesaro_second_moment, sign_pattern_moment

RAD = InnovationSpec()
GEO = truncate_coefficients({"kind": "geometric", "rho": 0.5}, tol=1e-15)


class TestMixedMoment:
    def test_first_moment_zero(self):
        assert exact_mixed_moment(GEO, RAD, (3,)).value == 0

    def test_iid_square(self):
        assert exact_mixed_moment(MACoefficients({0: 1.0}), RAD, (7, 7)).value == 1

    def test_two_tap_fourth_moment(self):
        rep = exact_mixed_moment(MACoefficients({0: 1, 1: 1}), RAD, (0, 0, 0, 0), exact=True)
        assert rep.value == 8
        assert rep.value == sign_pattern_moment({0: 1, 1: 1}, (0, 0, 0, 0))

    def test_frozen_oracle_values(self):
        c = {0: Fraction(1), 1: Fraction(1, 2), 2: Fraction(1, 4)}
        m = MACoefficients(c)
        assert exact_mixed_moment(m, RAD, (0, 1, 1, 2), exact=True).value == Fraction(63, 64)
        assert exact_mixed_moment(m, RAD, (0, 0, 0, 0), exact=True).value == Fraction(777, 256)
        c2 = MACoefficients({0: Fraction(1), 1: Fraction(-1, 2), 3: Fraction(1, 3)})
        assert exact_mixed_moment(c2, RAD, (0, 0, 2, 3), exact=True).value == Fraction(-19, 24)

    def test_breakdown_sums_to_value(self):
        rep = exact_mixed_moment(GEO, InnovationSpec(Distribution.GAUSSIAN), (0, 1, 1, 3, 4, 4))
        assert sum(v for _, v in rep.breakdown) == pytest.approx(rep.value, rel=1e-13)
        assert len(rep.breakdown) == 41  # partitions of 6 points without singletons

    def test_order_cap(self):
        with pytest.raises(SizeError):
            exact_mixed_moment(GEO, RAD, tuple(range(9)))

    def test_enumeration_cap(self):
        with pytest.raises(SizeError):
            exact_mixed_moment(GEO, RAD, (0, 0, 1, 1), method="enumerate", cap=10)

    def test_methods_agree(self):
        c = MACoefficients({0: 1.0, 1: 0.5, 3: -0.25, 4: 0.125})
        for tup in [(0, 1, 2, 3), (0, 0, 4, 4), (1, 2, 2, 5, 6, 6)]:
            a = exact_mixed_moment(c, RAD, tup)
            b = exact_mixed_moment(c, RAD, tup, method="enumerate")
            assert a.value == pytest.approx(b.value, abs=1e-13)
            assert a.term_count == b.term_count

    def test_two_dimensional_against_direct_sum(self):
        c = MACoefficients({(0, 0): 1.0, (1, 0): 0.5, (0, 1): -0.5}, dim=2)
        eng = MomentEngine(c, RAD)
        # covariance by hand: c_{t-s} c_{t'-s} with t=(1,0), t'=(0,1): s=(0,0) gives 0.5 * -0.5
        assert eng.covariance((1, 0), (0, 1)) == pytest.approx(-0.25)
        assert eng.mixed_moment([(0, 0), (0, 0)]).value == pytest.approx(1.5)

    @settings(max_examples=40, deadline=None)
    @given(
        st.dictionaries(st.integers(-2, 3), st.integers(-4, 4).map(lambda v: Fraction(v, 4)), min_size=1, max_size=4),
        st.lists(st.integers(-2, 4), min_size=2, max_size=4),
    )
    def test_exact_matches_sign_patterns(self, coeffs, tup):
        coeffs = {k: v for k, v in coeffs.items() if v != 0} or {0: Fraction(1)}
        got = exact_mixed_moment(MACoefficients(coeffs), RAD, tuple(tup), exact=True).value
        assert got == sign_pattern_moment(coeffs, tup)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=2, max_size=5), st.randoms())
    def test_permutation_symmetry(self, tup, rnd):
        shuffled = list(tup)
        rnd.shuffle(shuffled)
        a = exact_mixed_moment(GEO, RAD, tuple(tup)).value
        b = exact_mixed_moment(GEO, RAD, tuple(shuffled)).value
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)

    def test_translation_invariance(self):
        eng = MomentEngine(GEO, RAD)
        assert eng.moment_value((0, 1, 5, 5)) == eng.moment_value((10, 11, 15, 15))

    def test_exact_mode_rejects_gaussian_two_point(self):
        with pytest.raises(ArgumentError):
            MomentEngine(GEO, InnovationSpec(Distribution.CENTERED_TWO_POINT, 0.3), exact=True)

    @pytest.mark.parametrize(
        "law", [InnovationSpec(), InnovationSpec(Distribution.CENTERED_UNIFORM), InnovationSpec(Distribution.GAUSSIAN)]
    )
    @pytest.mark.parametrize("tup", [(0, 0), (0, 1, 1, 2), (0, 0, 0, 0), (0, 2, 3)])
    def test_monte_carlo_consistency(self, law, tup):
        c = MACoefficients({0: 1.0, 1: 0.6, 2: -0.3})
        exact = exact_mixed_moment(c, law, tup).value
        mean, se = empirical_mixed_moment(MAProcess(c, law), tup, R=10**5, seed=17)
        assert abs(mean - exact) <= 4 * se + 1e-12


class TestCovariance:
    def test_iid(self):
        assert covariance(MACoefficients({0: 1.0}), 0, 3) == 0

    def test_geometric(self):
        assert covariance(GEO, 5, 5) == pytest.approx(4 / 3, abs=1e-12)
        assert covariance(GEO, 5, 6) == pytest.approx(2 / 3, abs=1e-12)
        assert covariance(GEO, 6, 5) == pytest.approx(2 / 3, abs=1e-12)


class TestSigma2:
    def test_iid(self):
        res = sigma2(MACoefficients({0: 1.0}), box_family(1), [1, 10, 100])
        assert res.sigma2 == 1 and all(v == pytest.approx(1) for v in res.partials.values())

    def test_ar1(self):
        res = sigma2(GEO, box_family(1), [10, 100, 10**4])
        assert res.sigma2 == pytest.approx(4, abs=1e-12)
        assert res.partials[10] == pytest.approx(cesaro_second_moment(dict(GEO.entries), 10), abs=1e-12)
        assert res.partials[10] == pytest.approx(3.4671875, abs=1e-6)
        assert abs(res.partials[10**4] - 4) < 0.05
        assert abs(res.extrapolated - 4) < abs(res.partials[10**4] - 4)

    def test_degenerate(self):
        c = MACoefficients({0: 1.0, 1: -1.0})
        res = sigma2(c, box_family(1), [10, 100])
        assert res.sigma2 == 0
        assert res.partials[10] == pytest.approx(0.2)

    def test_nonnegative_partials_random(self):
        rng = random.Random(4)
        for _ in range(20):
            c = MACoefficients({j: rng.uniform(-1, 1) for j in range(-2, 4)})
            res = sigma2(c, box_family(1), [1, 2, 5, 17])
            assert all(v >= -1e-12 for v in res.partials.values())

    def test_two_dimensional_rate(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.5, "dim": 2, "sided": "two"}, tol=1e-12)
        res = sigma2(c, box_family(2, centered=True), [8, 16, 32, 64])
        errs = [abs(res.partials[n] - res.sigma2) for n in (8, 16, 32, 64)]
        assert all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
        # error shrinks like the inverse side length
        assert errs[-1] * (2 * 64 + 1) < 2 * errs[0] * (2 * 8 + 1)

    def test_grid_must_increase(self):
        with pytest.raises(ArgumentError):
            sigma2(GEO, box_family(1), [10, 5])


class TestConstants:
    def test_iid_m2(self):
        assert moment_bound(MACoefficients({0: 1.0}), RAD, 2) == 1

    def test_moment_bound_dominates_absolute_moment(self):
        c = MACoefficients({0: 1.0, 1: -0.5, 2: 0.25})
        # E X^4 <= M_4 since every term is replaced by its modulus
        assert exact_mixed_moment(c, RAD, (0,) * 4).value <= moment_bound(c, RAD, 4)

    def test_gamma_iid(self):
        c = MACoefficients({0: 1.0})
        assert all(gamma(c, a) == 0 for a in range(1, 10))

    def test_gamma_geometric(self):
        for a in range(0, 30):
            assert gamma(GEO, a) == pytest.approx(2.0 ** -(a // 2), abs=1e-12)

    def test_constant_formula(self):
        C, gam = separation_constants(GEO, InnovationSpec(Distribution.GAUSSIAN), 4)
        assert C == pytest.approx(2 * 3 * bell_number(4) * 4**4 * 2.0**4, rel=1e-12)
        vals = [gam(a) for a in range(20)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_bad_k(self):
        with pytest.raises(ArgumentError):
            moment_bound(GEO, RAD, 13)

    def test_mixing_product_bound(self):
        assert mixing_product_bound(1, [0]) == 0
        assert mixing_product_bound(1, [1 / 16]) == pytest.approx(6)
        assert mixing_product_bound(2, [0.01, 0.04]) == pytest.approx(14.4)

    @pytest.mark.parametrize("M,alphas", [(0.5, [0.1]), (1, [1.5]), (1, [-0.1]), (1, [])])
    def test_mixing_product_bound_errors(self, M, alphas):
        with pytest.raises(ArgumentError):
            mixing_product_bound(M, alphas)


class TestSeparation:
    def test_single_block(self):
        cert = separation_certificate(GEO, RAD, make_window(0, 10), (3, 3, 3, 3), 0)
        assert cert.lhs == 0 and cert.holds

    def test_iid_independent(self):
        c = MACoefficients({0: 1.0})
        cert = separation_certificate(c, RAD, make_window(0, 20), (0, 0, 9, 9), 3)
        assert cert.lhs == 0

    def test_far_pairs(self):
        sp = make_window(0, 30)
        cert = separation_certificate(GEO, RAD, sp, (0, 1, 20, 21), 5)
        assert [len(b) for b in cert.partition.blocks] == [2, 2]
        eng = MomentEngine(GEO, RAD)
        manual = abs(eng.moment_value((0, 1, 20, 21)) - eng.moment_value((0, 1)) * eng.moment_value((20, 21)))
        assert cert.lhs == pytest.approx(manual, rel=1e-12)
        assert cert.holds and 0 < cert.lhs < cert.rhs

    def test_exact_mode(self):
        c = MACoefficients({0: Fraction(1), 1: Fraction(1, 2), 2: Fraction(1, 4)})
        cert = separation_certificate(c, RAD, make_window(0, 10), (0, 1, 4, 5), 1, exact=True)
        assert isinstance(cert.lhs, Fraction) and cert.holds

    def test_certificate_dict(self):
        d = separation_certificate(GEO, RAD, make_window(0, 10), (0, 5), 2).to_dict()
        assert set(d) >= {"tuple", "a", "partition", "lhs", "C_k", "gamma_a", "rhs", "holds"}

    def test_small_exhaustive_sweep(self):
        res = separation_sweep(GEO, RAD, make_window(0, 6), 3, range(1, 6))
        assert res.holds and res.tuples == 7 + 49 + 343

    def test_explicit_coefficients_sweep(self):
        c = MACoefficients({0: 1.0, 1: -0.7, 2: 0.4, 4: 0.2})
        res = separation_sweep(c, InnovationSpec(Distribution.CENTERED_UNIFORM), make_window(0, 7), 4, range(1, 11), max_tuples=800)
        assert res.holds and res.checked == 8000

    def test_subsampling_deterministic(self):
        a = separation_sweep(GEO, RAD, make_window(0, 11), 3, [2], max_tuples=50, seed=3, keep=True)
        b = separation_sweep(GEO, RAD, make_window(0, 11), 3, [2], max_tuples=50, seed=3, keep=True)
        assert [c.tuple for c in a.certificates] == [c.tuple for c in b.certificates]


class TestDecay:
    def test_single_point(self):
        lhs, rhs, holds = decay_bound_check(GEO, [0], [0], a=3)
        assert lhs == pytest.approx(rhs) and holds

    def test_iid_disjoint(self):
        lhs, rhs, holds = decay_bound_check(MACoefficients({0: 1.0}), [0, 5], [0, 1], a=2)
        # the support sits inside every ball, so gamma and hence rhs vanish as well
        assert lhs == 0 and rhs == 0 and holds
        lhs, rhs, holds = decay_bound_check(MACoefficients({0: 1.0, 3: 0.5}), [0, 5], [0, 1], a=2)
        assert lhs == 0 and rhs > 0 and holds

    def test_geometric_three_points(self):
        pts = [0, 1, 10]
        lhs, rhs, holds = decay_bound_check(GEO, pts, [0, 0, 1], a=8, ell=2)
        brute = sum(
            math.prod(abs(GEO[t - s]) for t in pts)
            for s in range(-60, 11)
        )
        assert lhs == pytest.approx(brute, rel=1e-12)
        assert holds

    def test_precondition(self):
        with pytest.raises(ArgumentError):
            decay_bound_check(GEO, [0, 2], [0, 1], a=2)

    def test_random_instances(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            support = rng.choice(np.arange(-5, 6), size=rng.integers(1, 8), replace=False)
            c = MACoefficients({int(s): float(v) for s, v in zip(support, rng.normal(size=len(support)))})
            ell = int(rng.integers(1, 4))
            a = int(rng.integers(0, 8))
            anchors = [int(x) for x in np.cumsum(rng.integers(a + 1, a + 6, size=ell))]
            pts, labels = [], []
            for lab, x in enumerate(anchors):
                pts.append(x)
                labels.append(lab)
            for _ in range(int(rng.integers(0, 3))):
                lab = int(rng.integers(0, ell))
                pts.append(anchors[lab])
                labels.append(lab)
            assert decay_bound_check(c, pts, labels, a, ell).holds
