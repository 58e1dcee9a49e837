import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentclt.errors import ArgumentError, ExistenceError, ModelError, SizeError
from momentclt.index_spaces import make_box, make_window
from momentclt.processes import (
    ArmaModel,
    Distribution,
    InnovationSpec,
    MACoefficients,
    arma_reduce,
    arma_to_ma,
    cluster_roots,
    digit_event_covariance,
    make_digit_process,
    make_markov_chain,
    nonmixing_witness,
    polynomial_roots,
    simulate_ma_batch,
    simulate_ma_window,
    stationary_distribution,
    truncate_coefficients,
)
from momentclt.rng import derive_seed, hash_keys, uniforms
from oracles import long_division

ALL_LAWS = [
    InnovationSpec(Distribution.RADEMACHER),
    InnovationSpec(Distribution.CENTERED_UNIFORM),
    InnovationSpec(Distribution.GAUSSIAN),
    InnovationSpec(Distribution.CENTERED_TWO_POINT, 0.3),
]


class TestRng:
    def test_deterministic(self):
        assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
        assert derive_seed(5, 1, 2) != derive_seed(5, 2, 1)

    def test_broadcast_matches_scalar(self):
        grid = hash_keys(9, np.arange(-3, 4))
        assert [int(v) for v in grid] == [int(hash_keys(9, int(i))) for i in range(-3, 4)]

    def test_uniforms_open_interval(self):
        u = uniforms(hash_keys(1, np.arange(10**5)))
        assert u.min() > 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / 10**5)


class TestInnovations:
    @pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: l.distribution.value)
    def test_standardised(self, law):
        assert law.moment(1) == pytest.approx(0, abs=1e-12)
        assert law.moment(2) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: l.distribution.value)
    def test_empirical_mean_and_variance(self, law):
        n = 10**6
        y = law.transform(hash_keys(123, np.arange(n)))
        se_mean = 1 / math.sqrt(n)
        se_var = math.sqrt((law.moment(4) - 1) / n)
        assert abs(y.mean()) <= 4 * se_mean
        # the sample variance subtracts mean^2, which is O(1/n) even when Y^2 is constant
        assert abs(y.var() - 1) <= 4 * se_var + 16 / n

    def test_exact_moments(self):
        assert InnovationSpec(Distribution.GAUSSIAN).moment(6, exact=True) == 15
        assert InnovationSpec(Distribution.CENTERED_UNIFORM).moment(4, exact=True) == Fraction(9, 5)
        assert InnovationSpec().moment(3, exact=True) == 0

    def test_two_point_irrational(self):
        with pytest.raises(ArgumentError):
            InnovationSpec(Distribution.CENTERED_TWO_POINT, 0.3).moment(4, exact=True)
        with pytest.raises(ArgumentError):
            InnovationSpec(Distribution.CENTERED_TWO_POINT, 1.0)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: l.distribution.value)
    def test_abs_moment_dominates(self, law):
        for m in range(1, 9):
            assert abs(law.moment(m)) <= law.abs_moment(m) + 1e-12

    def test_descriptor_roundtrip(self):
        law = InnovationSpec(Distribution.CENTERED_TWO_POINT, 0.2)
        assert InnovationSpec.from_descriptor(law.descriptor) == law
        assert InnovationSpec.from_descriptor("gaussian").distribution is Distribution.GAUSSIAN


class TestCoefficients:
    def test_zeros_dropped(self):
        c = MACoefficients({0: 1.0, 1: 0.0, 2: 0.5})
        assert c.support == [0, 2]

    def test_empty(self):
        with pytest.raises(ModelError):
            MACoefficients({0: 0.0})

    def test_geometric_tail(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.5}, tol=2.0**-20)
        assert c.support == list(range(21))
        assert c.truncation_error == pytest.approx(2.0**-20)

    def test_explicit_iid(self):
        c = truncate_coefficients({"kind": "explicit", "entries": {"0": 1.0}})
        assert c.support == [0]

    def test_polynomial_radius(self):
        c = truncate_coefficients({"kind": "polynomial", "beta": 4.0}, tol=1e-3)
        R = c.radius
        true_tail = 2 * sum((1 + s) ** -4.0 for s in range(R + 1, 10**6))
        assert true_tail <= 1e-3
        # one less would not be certified by the bound
        assert 2 * (1 + R - 1) ** -3.0 / 3 > 1e-3

    def test_polynomial_needs_summable_moments(self):
        with pytest.raises(ModelError):
            truncate_coefficients({"kind": "polynomial", "beta": 2.0})

    def test_bad_tol(self):
        with pytest.raises(ArgumentError):
            truncate_coefficients({"kind": "geometric", "rho": 0.5}, tol=0)

    def test_tail_bound_honest(self):
        for rho in (0.3, 0.7, -0.6):
            c = truncate_coefficients({"kind": "geometric", "rho": rho, "sided": "two"}, tol=1e-9)
            R = c.radius
            true_tail = 2 * sum(abs(rho) ** s for s in range(R + 1, R + 2000))
            assert true_tail <= 1e-9 * (1 + 1e-9)

    def test_norm_outside_monotone(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.5, "sided": "two", "dim": 2}, tol=1e-8)
        vals = [c.norm_outside(a) for a in range(c.radius + 2)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == 0

    def test_csv_roundtrip(self, tmp_path):
        c = MACoefficients({(0, 1): 0.5, (-1, 2): 0.25}, dim=2)
        path = tmp_path / "c.csv"
        c.to_csv(path)
        back = MACoefficients.from_csv(path)
        assert back.entries == c.entries

    def test_exact_conversion(self):
        c = MACoefficients({0: 0.5, 1: 0.25}).exact()
        assert c[1] == Fraction(1, 4) and c.is_exact


class TestSimulation:
    def test_identity_filter(self):
        sp = make_window(0, 9)
        w = simulate_ma_window(MACoefficients({0: 1.0}), InnovationSpec(), sp, seed=4)
        y = InnovationSpec().transform(hash_keys(np.array([4], dtype=np.uint64)[:, None], 1, np.arange(10)[None]))[0]
        assert np.array_equal(w.values, y)

    def test_injected_alternating_sequence(self):
        sp = make_window(0, 9)
        c = MACoefficients({0: 1.0, 1: 1.0})
        w = simulate_ma_window(c, InnovationSpec(), sp, 0, innovations=lambda z: (-1.0) ** z)
        assert np.all(w.values == 0)

    def test_sample_variance(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.5})
        x = simulate_ma_window(c, InnovationSpec(), make_window(1, 10**5), 77).values
        # 1/(1-0.25); generous SE that accounts for the short-range dependence
        assert abs(x.var() - 4 / 3) < 3 * math.sqrt(2 * 4.0**2 / 10**5) * 2

    def test_overlapping_windows_agree(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.5, "sided": "two"})
        small = simulate_ma_window(c, InnovationSpec(), make_window(10, 20), 5)
        big = simulate_ma_window(c, InnovationSpec(), make_window(0, 40), 5)
        assert all(small[t] == big[t] for t in range(10, 21))

    def test_linear_in_coefficients(self):
        c = truncate_coefficients({"kind": "geometric", "rho": 0.4, "dim": 2, "sided": "two"})
        sp = make_box(2, 3)
        a = simulate_ma_window(c, InnovationSpec(Distribution.GAUSSIAN), sp, 9).values
        b = simulate_ma_window(c.scaled(2.5), InnovationSpec(Distribution.GAUSSIAN), sp, 9).values
        assert np.allclose(b, 2.5 * a, rtol=1e-13, atol=1e-13)

    def test_batch_rows_independent_of_batch(self):
        c = MACoefficients({0: 1.0, -1: 0.5})
        sp = make_window(0, 5)
        seeds = np.array([3, 8, 13], dtype=np.uint64)
        full = simulate_ma_batch(c, InnovationSpec(), sp, seeds)
        assert np.array_equal(full[1], simulate_ma_batch(c, InnovationSpec(), sp, seeds[1:2])[0])

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            simulate_ma_window(MACoefficients({0: 1.0}), InnovationSpec(), make_box(2, 2), 0)


class TestArma:
    def test_ar1_against_long_division(self):
        c = arma_to_ma(ArmaModel((-0.5,)), tol=1e-12)
        for j in range(31):
            assert abs(c[j] - 0.5**j) <= 1e-12

    def test_arma_against_long_division(self):
        model = ArmaModel((-1.4, 0.49), (0.3,))  # double root at 1/0.7
        c = arma_to_ma(model, tol=1e-13)
        ref = long_division([1, -1.4, 0.49], [1, 0.3], 40)
        assert max(abs(c[j] - ref[j]) for j in range(40)) < 1e-10

    def test_pure_ma(self):
        c = arma_to_ma(ArmaModel((), (0.4, -0.2)))
        assert [c[j] for j in range(3)] == [1.0, 0.4, -0.2]

    def test_unit_root(self):
        with pytest.raises(ExistenceError, match="unit circle"):
            arma_to_ma(ArmaModel((-1.0,)))

    def test_anticausal(self):
        c = arma_to_ma(ArmaModel((-2.0,)), tol=1e-12)
        assert c[-1] == pytest.approx(-0.5) and c[-2] == pytest.approx(-0.25)
        assert c.hi[0] < 0

    def test_recursion_holds(self):
        model = ArmaModel((-0.3, 0.5, -0.1), (0.7, 0.2))
        tol = 1e-12
        c = arma_to_ma(model, tol=tol)
        lo, hi = c.lo[0], c.hi[0]
        series = np.array([c[j] for j in range(lo, hi + 1)])
        conv = np.convolve(model.A, series)
        target = np.zeros_like(conv)
        target[-lo: -lo + len(model.B)] = model.B
        assert np.abs(conv - target).sum() <= 10 * tol * (1 + np.abs(model.A).sum())

    def test_reduce_common_factor(self):
        A = np.polynomial.polynomial.polymul([1, -0.5], [1, -0.3])
        model = ArmaModel(tuple(A[1:]), (-0.3,))
        red = arma_reduce(model)
        assert red.a_coeffs == pytest.approx((-0.5,))
        assert red.b_coeffs == ()
        assert len(red.common_roots) == 1

    def test_reduce_coprime_is_identity(self):
        model = ArmaModel((-0.5,), (0.4,))
        assert arma_reduce(model).a_coeffs == model.a_coeffs

    def test_reduce_equal_polynomials(self):
        model = ArmaModel((-0.5, 0.06), (-0.5, 0.06))
        red = arma_reduce(model)
        assert red.a_coeffs == () and red.b_coeffs == ()
        assert arma_to_ma(model).support == [0]

    def test_unit_root_cancelled_by_B(self):
        c = arma_to_ma(ArmaModel((-1.5, 0.5), (-1.0,)))
        assert c[3] == pytest.approx(0.125)

    def test_root_clustering(self):
        roots = polynomial_roots(np.polynomial.polynomial.polyfromroots([2.0, 2.0, -3.0]))
        clusters = cluster_roots(roots)
        mult = sorted(m for _, m in clusters)
        assert mult == [1, 2]

    def test_order_cap(self):
        with pytest.raises(ArgumentError):
            ArmaModel(tuple([0.01] * 13))


class TestChains:
    def test_not_stochastic(self):
        with pytest.raises(ModelError):
            make_markov_chain([[0.5, 0.6], [0.5, 0.5]])

    def test_state_cap(self):
        with pytest.raises(SizeError):
            make_markov_chain(np.full((17, 17), 1 / 17))

    def test_fair_coin_is_iid(self):
        ch = make_markov_chain([[0.5, 0.5], [0.5, 0.5]])
        law = ch.joint_law([1, 3, 4])
        assert np.allclose(law, 1 / 8)

    def test_stationary(self):
        P = np.array([[0.9, 0.1], [0.2, 0.8]])
        pi = stationary_distribution(P)
        assert np.allclose(pi, [2 / 3, 1 / 3]) and np.allclose(pi @ P, pi)

    def test_long_run_variance_two_state(self):
        p, q = 0.1, 0.2
        ch = make_markov_chain([[1 - p, p], [q, 1 - q]], values=[-1, 1])
        lam = 1 - p - q
        var = 1 - (ch.stationary_mean()) ** 2
        assert ch.long_run_variance() == pytest.approx(var * (1 + lam) / (1 - lam))

    def test_simulation_frequencies(self):
        ch = make_markov_chain([[0.9, 0.1], [0.2, 0.8]])
        states = ch.simulate_states(2000, np.arange(50, dtype=np.uint64))
        assert abs(states.mean() - 1 / 3) < 0.03

    def test_joint_law_order_check(self):
        ch = make_markov_chain([[0.9, 0.1], [0.2, 0.8]])
        with pytest.raises(ArgumentError):
            ch.joint_law([3, 2])


class TestDigits:
    def test_range(self):
        x = make_digit_process(seed=3).simulate(5000)
        assert x.min() >= 0 and x.max() < 10

    def test_first_decimal_digit(self):
        proc = make_digit_process(seed=11)
        for n in range(30):
            assert proc.decimal_digit(n, 1) == int(proc.digits(n + 1, n + 2)[0])

    def test_witness(self):
        assert nonmixing_witness() == Fraction(9, 100)
        assert nonmixing_witness(k=4, d=9) == Fraction(9, 100)

    def test_binary_variant(self):
        assert nonmixing_witness(base=2, digit=1) == Fraction(1, 4)

    def test_distinct_positions_independent(self):
        assert digit_event_covariance(10, (3, {5}), (4, {5})) == 0

    def test_bad_args(self):
        with pytest.raises(ArgumentError):
            nonmixing_witness(k=0)
        with pytest.raises(ModelError):
            make_digit_process(base=1)
