import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_kernel, span_of_rows
from wachkit.errors import InvalidInput, NonUnit, SingularModP
from wachkit.padic import (
    PMatrix,
    PScalar,
    howell_form,
    howell_kernel,
    howell_member,
    matrix_inverse_mod,
    pval,
    scalar_inverse,
    smith_elementary_divisors,
    teichmueller_lift,
)


class TestScalarInverse:
    def test_identity(self):
        assert scalar_inverse(PScalar(1, 5, 2)).value == 1

    def test_seven_mod_25(self):
        # oracle: direct multiplication
        inv = scalar_inverse(PScalar(7, 5, 2)).value
        assert (7 * inv) % 25 == 1
        assert inv == 18

    def test_non_unit(self):
        with pytest.raises(NonUnit):
            scalar_inverse(PScalar(3, 3, 2))

    @given(st.sampled_from([3, 5, 7]), st.integers(1, 10), st.integers(1, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_involution(self, p, N, raw):
        a = raw - raw % p + 1  # force a unit
        s = PScalar(a, p, N)
        assert scalar_inverse(scalar_inverse(s)) == s
        assert (s.value * scalar_inverse(s).value) % p**N == 1


class TestTeichmueller:
    def test_examples(self):
        assert teichmueller_lift(1, 5, 2).value == 1
        # oracle: iterate x -> x^5 mod 25 starting at 2: 2 -> 7 -> 7
        assert pow(2, 5, 25) == 7 and pow(7, 5, 25) == 7
        assert teichmueller_lift(2, 5, 2).value == 7
        # 8 = -1 mod 9 and (-1)^2 = 1
        assert teichmueller_lift(2, 3, 2).value == 8

    def test_zero_rejected(self):
        with pytest.raises(InvalidInput):
            teichmueller_lift(0, 5, 2)
        with pytest.raises(InvalidInput):
            teichmueller_lift(10, 5, 3)

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    @pytest.mark.parametrize("N", [1, 2, 5, 16])
    def test_root_of_unity(self, p, N):
        pn = p**N
        for a in range(1, p):
            w = teichmueller_lift(a, p, N).value
            assert pow(w, p - 1, pn) == 1
            assert w % p == a

    def test_lifts_sum_to_zero(self):
        # the p-1 roots of x^(p-1) - 1 sum to zero exactly
        for p in (3, 5, 7):
            total = sum(teichmueller_lift(a, p, 16).value for a in range(1, p))
            assert total % p**16 == 0


class TestMatrixInverse:
    def test_identity(self):
        I = PMatrix.identity(3, 5, 2)
        assert matrix_inverse_mod(I) == I

    def test_unipotent(self):
        A = PMatrix.from_lists([[1, 1], [0, 1]], 5, 2)
        assert matrix_inverse_mod(A).to_lists() == [[1, 24], [0, 1]]

    def test_singular(self):
        A = PMatrix.from_lists([[5, 0], [0, 1]], 5, 2)
        with pytest.raises(SingularModP):
            matrix_inverse_mod(A)

    def test_random_inverses(self):
        rng = random.Random(11)
        for _ in range(40):
            p, N = rng.choice([(3, 4), (5, 3), (7, 16)])
            d = rng.randint(1, 4)
            pn = p**N
            while True:
                A = PMatrix(d, d, tuple(rng.randrange(pn) for _ in range(d * d)), p, N)
                try:
                    inv = matrix_inverse_mod(A)
                    break
                except SingularModP:
                    continue
            I = PMatrix.identity(d, p, N)
            assert A.mul(inv) == I
            assert inv.mul(A) == I


class TestHowellKernel:
    def test_injective(self):
        K = howell_kernel(PMatrix.identity(2, 3, 2))
        assert K.rows == 0

    def test_five_mod_25(self):
        # oracle: exhaustive check over Z/25: 5x = 0 iff 5 | x
        assert brute_kernel(PMatrix(1, 1, (5,), 5, 2)) == {(0,), (5,), (10,), (15,), (20,)}
        K = howell_kernel(PMatrix(1, 1, (5,), 5, 2))
        assert K.to_lists() == [[5]]

    def test_zero_map(self):
        K = howell_kernel(PMatrix(1, 1, (0,), 3, 2))
        assert K.to_lists() == [[1]]

    def test_against_brute_force(self):
        rng = random.Random(23)
        for _ in range(120):
            p, N = rng.choice([(3, 2), (3, 3), (5, 2), (5, 3)])
            if p**N > 125:
                continue
            rows, cols = rng.randint(1, 3), rng.randint(1, 2)
            pn = p**N
            A = PMatrix(rows, cols, tuple(rng.randrange(pn) for _ in range(rows * cols)), p, N)
            K = howell_kernel(A)
            assert span_of_rows(K) == brute_kernel(A)

    def test_against_brute_force_wider(self):
        # three-column systems at p^N = 9 keep enumeration cheap
        rng = random.Random(29)
        for _ in range(40):
            rows = rng.randint(1, 4)
            A = PMatrix(rows, 3, tuple(rng.randrange(9) for _ in range(rows * 3)), 3, 2)
            K = howell_kernel(A)
            assert span_of_rows(K) == brute_kernel(A)

    def test_canonical(self):
        rng = random.Random(5)
        pn = 27
        A = PMatrix(3, 2, tuple(rng.randrange(pn) for _ in range(6)), 3, 3)
        K1 = howell_kernel(A)
        # permuting the input rows must not change the canonical kernel
        perm_rows = [list(A.row(i)) for i in (2, 0, 1)]
        K2 = howell_kernel(PMatrix.from_lists(perm_rows, 3, 3))
        assert K1 == K2

    def test_member(self):
        H = howell_form(PMatrix.from_lists([[3, 1], [0, 9]], 3, 3))
        assert howell_member(H, [3, 1])
        assert howell_member(H, [6, 11])
        assert not howell_member(H, [1, 0])


class TestSmith:
    def test_diagonal(self):
        A = PMatrix.from_lists([[1, 0, 0], [0, 3, 0], [0, 0, 9]], 3, 4)
        assert smith_elementary_divisors(A) == [0, 1, 2]

    def test_conjugation_invariance(self):
        rng = random.Random(3)
        p, N = 5, 4
        pn = p**N
        D = PMatrix.from_lists([[5, 0], [0, 25]], p, N)
        for _ in range(10):
            while True:
                U = PMatrix(2, 2, tuple(rng.randrange(pn) for _ in range(4)), p, N)
                try:
                    matrix_inverse_mod(U)
                    break
                except SingularModP:
                    continue
            assert smith_elementary_divisors(U.mul(D).mul(matrix_inverse_mod(U))) == [1, 2]

    def test_pval(self):
        assert pval(0, 3, 4) == 4
        assert pval(18, 3, 4) == 2
        assert pval(1, 3, 4) == 0
