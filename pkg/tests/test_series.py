import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import repeated_binomial, schoolbook_mul
from wachkit.errors import (
    InsufficientExponentPrecision,
    NonUnitSeries,
    NonzeroConstant,
    NotDivisible,
    NotInS0,
    VariableMismatch,
)
from wachkit.padic import PScalar
from wachkit.series import (
    PI,
    PI0,
    PI_TO_PI0,
    PI_TO_PI0_PURE,
    TruncationProfile,
    binomial_power,
    change_coordinates,
    constant_series,
    make_series,
    series_add,
    series_compose,
    series_invert_unit,
    series_multiply,
    series_pow,
    shift_divide_exact,
    shift_multiply,
    substitute,
    weierstrass_divide_q_power,
    x_series,
    zero_series,
)


def rand_series(rng, var, p, N, order, zero_const=False):
    pn = p**N
    coeffs = [rng.randrange(pn) for _ in range(order)]
    if zero_const:
        coeffs[0] = 0
    return make_series(var, coeffs, p, N)


def pi0_closed_form_p3(order, N=16):
    """pi0 = X^2/(1+X), exact closed form at p = 3."""
    one_plus = make_series(PI, [1, 1] + [0] * (order - 2), 3, N)
    return series_multiply(series_pow(x_series(PI, 3, N, order), 2), series_invert_unit(one_plus))


class TestProfile:
    def test_invariants(self):
        prof = TruncationProfile.default(3)
        assert prof.M_pi0 >= prof.N
        assert prof.M_pi >= (prof.p - 1) * prof.M_pi0 + prof.p
        with pytest.raises(Exception):
            TruncationProfile(3, 16, 8, 100)  # M_pi0 < N
        with pytest.raises(Exception):
            TruncationProfile(3, 4, 4, 5)  # M_pi too small


class TestMultiply:
    def test_conjugate_pair(self):
        f = make_series(PI, [1, 1, 0, 0], 5, 2)
        g = make_series(PI, [1, -1, 0, 0], 5, 2)
        assert series_multiply(f, g).coeffs == (1, 0, 24, 0)

    def test_truncation_boundary(self):
        order = 6
        top = make_series(PI, [0] * (order - 1) + [1], 3, 2)
        x = x_series(PI, 3, 2, order)
        assert series_multiply(top, x).is_zero()

    def test_small_square(self):
        f = make_series(PI, [1, 1, 0], 3, 2)
        assert series_multiply(f, f).coeffs == (1, 2, 1)

    def test_mismatch(self):
        with pytest.raises(VariableMismatch):
            series_multiply(x_series(PI, 3, 2, 4), x_series(PI0, 3, 2, 4))

    @given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_ring_laws(self, a, b, c):
        p, N, order = 5, 3, 8
        rng = random.Random(a ^ (b << 1) ^ (c << 2))
        f, g, h = (rand_series(rng, PI, p, N, order) for _ in range(3))
        assert series_multiply(f, g) == series_multiply(g, f)
        assert series_multiply(series_multiply(f, g), h) == series_multiply(
            f, series_multiply(g, h)
        )
        assert series_multiply(f, series_add(g, h)) == series_add(
            series_multiply(f, g), series_multiply(f, h)
        )

    def test_against_schoolbook(self):
        rng = random.Random(9)
        for _ in range(30):
            p, N, order = 7, 16, 12
            f = rand_series(rng, PI0, p, N, order)
            g = rand_series(rng, PI0, p, N, order)
            expect = schoolbook_mul(list(f.coeffs), list(g.coeffs), p**N, order)
            assert list(series_multiply(f, g).coeffs) == expect


class TestInvert:
    def test_one(self):
        one = constant_series(PI, 1, 3, 4, 6)
        assert series_invert_unit(one) == one

    def test_geometric(self):
        f = make_series(PI, [1, 1, 0, 0, 0], 5, 3)
        inv = series_invert_unit(f)
        pn = 125
        assert inv.coeffs == tuple((-1) ** k % pn for k in range(5))

    def test_non_unit(self):
        with pytest.raises(NonUnitSeries):
            series_invert_unit(x_series(PI, 3, 2, 4))

    def test_random_units(self):
        rng = random.Random(4)
        for _ in range(25):
            f = rand_series(rng, PI0, 7, 16, 10)
            if f.coeffs[0] % 7 == 0:
                f = series_add(f, constant_series(PI0, 1, 7, 16, 10))
            prod = series_multiply(f, series_invert_unit(f))
            assert prod == constant_series(PI0, 1, 7, 16, 10)


class TestCompose:
    def test_square_of_double(self):
        f = make_series(PI, [0, 0, 1, 0], 5, 3)
        g = make_series(PI, [0, 2, 0, 0], 5, 3)
        assert series_compose(f, g).coeffs == (0, 0, 4, 0)

    def test_identity_substitution(self):
        rng = random.Random(2)
        f = rand_series(rng, PI, 3, 4, 7)
        assert series_compose(f, x_series(PI, 3, 4, 7)) == f

    def test_identity_function(self):
        g = make_series(PI, [0, 3, 3, 1, 0], 3, 4)
        assert series_compose(x_series(PI, 3, 4, 5), g) == g

    def test_nonzero_constant_rejected(self):
        with pytest.raises(NonzeroConstant):
            series_compose(x_series(PI, 3, 2, 4), constant_series(PI, 1, 3, 2, 4))

    def test_associativity(self):
        rng = random.Random(8)
        p, N, order = 5, 4, 9
        f = rand_series(rng, PI, p, N, order)
        g = rand_series(rng, PI, p, N, order, zero_const=True)
        h = rand_series(rng, PI, p, N, order, zero_const=True)
        lhs = series_compose(series_compose(f, g), h)
        rhs = series_compose(f, series_compose(g, h))
        assert lhs == rhs


class TestBinomialPower:
    def test_zero(self):
        assert binomial_power(0, 5, 2, 4).coeffs == (1, 0, 0, 0)

    def test_two(self):
        assert binomial_power(2, 5, 2, 4).coeffs == (1, 2, 1, 0)

    def test_eight_mod_nine(self):
        # oracle: repeated multiplication with integer exponent 8
        expect = repeated_binomial(8, 9, 3)
        assert expect == [1, 8, 1]  # C(8,2) = 28 = 1 mod 9
        assert list(binomial_power(8, 3, 2, 3).coeffs) == expect

    @pytest.mark.parametrize("c", range(21))
    def test_matches_repeated_multiplication(self, c):
        p, N, order = 3, 16, 10
        expect = repeated_binomial(c, p**N, order)
        assert list(binomial_power(c, p, N, order).coeffs) == expect

    def test_additive_in_exponent(self):
        p, N, order = 5, 6, 12
        rng = random.Random(6)
        for _ in range(10):
            c1, c2 = rng.randrange(5**8), rng.randrange(5**8)
            lhs = series_multiply(
                binomial_power(c1, p, N, order), binomial_power(c2, p, N, order)
            )
            assert lhs == binomial_power(c1 + c2, p, N, order)

    def test_precision_guard(self):
        # order 10 at p = 3 needs K >= N + 3
        with pytest.raises(InsufficientExponentPrecision):
            binomial_power(PScalar(4, 3, 4), 3, 4, 10)
        binomial_power(PScalar(4, 3, 7), 3, 4, 10)

    def test_padic_exponent_consistency(self):
        # representatives agreeing mod p^K give the same expansion
        p, N, order = 3, 4, 6
        K = N + 2
        a = binomial_power(PScalar(7, p, K), p, N, order)
        b = binomial_power(7 + 2 * 3**K, p, N, order)
        assert a == b


class TestWeierstrass:
    def test_exact_factor(self):
        f = make_series(PI0, [3, 1, 0, 0], 3, 4)
        q, rem = weierstrass_divide_q_power(f, 1)
        assert q.coeffs == (1, 0, 0) and rem == (0,)

    def test_x_squared(self):
        f = make_series(PI0, [0, 0, 1, 0], 3, 4)
        q, rem = weierstrass_divide_q_power(f, 1)
        assert q.coeffs == ((-3) % 81, 1, 0) and rem == (9,)

    def test_x_cubed_r2(self):
        f = make_series(PI0, [0, 0, 0, 1, 0], 3, 4)
        q, rem = weierstrass_divide_q_power(f, 2)
        assert q.coeffs == ((-6) % 81, 1, 0) and rem == (54, 27)

    def test_reconstruction(self):
        rng = random.Random(77)
        for _ in range(60):
            p, N = rng.choice([(3, 5), (5, 4), (7, 3)])
            order = rng.randint(4, 14)
            r = rng.randint(0, min(order, 5))
            f = rand_series(rng, PI0, p, N, order)
            q, rem = weierstrass_divide_q_power(f, r)
            qp = series_pow(
                make_series(PI0, [p, 1] + [0] * (order - 2), p, N), r
            )
            back = series_multiply(qp, make_series(PI0, list(q.coeffs) + [0] * r, p, N))
            back = series_add(back, make_series(PI0, list(rem) + [0] * (order - r), p, N))
            assert back.coeffs == f.coeffs


class TestShift:
    def test_basic(self):
        f = make_series(PI0, [0, 0, 1], 3, 2)
        assert shift_divide_exact(f, 2).coeffs == (1,)

    def test_zero_shift(self):
        f = x_series(PI0, 3, 2, 4)
        assert shift_divide_exact(f, 0) == f

    def test_not_divisible(self):
        with pytest.raises(NotDivisible):
            shift_divide_exact(make_series(PI0, [1, 1, 0], 3, 2), 1)

    def test_inverse_of_multiply(self):
        rng = random.Random(1)
        f = rand_series(rng, PI0, 5, 3, 6)
        assert shift_divide_exact(shift_multiply(f, 3), 3) == f


class TestChangeCoordinates:
    ORDER = 2 * 16 + 3  # pi window for p = 3, M_pi0 = 16

    def test_pi0_itself(self):
        pi0 = pi0_closed_form_p3(self.ORDER)
        parts = change_coordinates(pi0, PI_TO_PI0, pi0, out_order=16)
        assert parts[0].coeffs == tuple([0, 1] + [0] * 14)
        assert parts[1].is_zero()

    def test_pi_basis_vector(self):
        pi0 = pi0_closed_form_p3(self.ORDER)
        parts = change_coordinates(x_series(PI, 3, 16, self.ORDER), PI_TO_PI0, pi0, out_order=16)
        assert parts[1].coeffs == tuple([1] + [0] * 15)
        assert parts[0].is_zero()

    def test_pi_squared(self):
        # pi^2 = pi0 * (1 + pi), so f_0 = X and f_1 = X
        pi0 = pi0_closed_form_p3(self.ORDER)
        f = series_pow(x_series(PI, 3, 16, self.ORDER), 2)
        parts = change_coordinates(f, PI_TO_PI0, pi0, out_order=16)
        x16 = tuple([0, 1] + [0] * 14)
        assert parts[0].coeffs == x16
        assert parts[1].coeffs == x16

    def test_pure_s0_rejects(self):
        pi0 = pi0_closed_form_p3(self.ORDER)
        with pytest.raises(NotInS0):
            change_coordinates(x_series(PI, 3, 16, self.ORDER), PI_TO_PI0_PURE, pi0, out_order=16)

    def test_roundtrip_from_components(self):
        rng = random.Random(31)
        pi0 = pi0_closed_form_p3(self.ORDER)
        for _ in range(25):
            parts = [rand_series(rng, PI0, 3, 16, 16) for _ in range(2)]
            f = zero_series(PI, 3, 16, self.ORDER)
            for j, part in enumerate(parts):
                term = substitute(part, pi0)
                f = series_add(f, shift_multiply(term, j).truncate(self.ORDER))
            rec = change_coordinates(f, PI_TO_PI0, pi0, out_order=16)
            assert [r.coeffs for r in rec] == [q.coeffs for q in parts]

    def test_roundtrip_to_pi(self):
        rng = random.Random(13)
        pi0 = pi0_closed_form_p3(self.ORDER)
        window = 2 * 16  # degrees determined by components of order 16
        for _ in range(25):
            f = rand_series(rng, PI, 3, 16, self.ORDER)
            parts = change_coordinates(f, PI_TO_PI0, pi0, out_order=16)
            rec = zero_series(PI, 3, 16, self.ORDER)
            for j, part in enumerate(parts):
                rec = series_add(rec, shift_multiply(substitute(part, pi0), j).truncate(self.ORDER))
            assert rec.coeffs[:window] == f.coeffs[:window]
