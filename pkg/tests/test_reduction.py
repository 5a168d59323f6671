import random

import pytest

from wachkit.errors import AxiomViolation, NotCongruent
from wachkit.flmod import make_fl, unit_fl
from wachkit.padic import PMatrix
from wachkit.reduction import (
    _phi_r_image,
    _smat_series_inverse,
    normalize_basis,
    recover_filtration,
    reduce_mod_pi0,
    roundtrip_check,
)
from wachkit.series import PI0, TruncSeries, constant_series, series_scale, shift_multiply, substitute
from wachkit.suite import random_unit_matrix
from wachkit.wach import (
    WachModule,
    _pad,
    _q_powers,
    smat,
    smat_add,
    smat_eq,
    smat_identity,
    smat_map,
    smat_mul,
    smat_truncate,
    solve_wach,
)


def planted_perturbation(ctx, m, seed):
    """(C_pert, P0) at guard order with P0 = Id + pi0*R for seeded random R."""
    rng = random.Random(seed)
    mw = ctx.work.M_pi0
    pn = ctx.pn
    d = m.rank
    R = smat(
        [
            [
                TruncSeries(
                    PI0, m.p, m.N, tuple(rng.randrange(pn) for _ in range(ctx.profile.M_pi0 - 1))
                )
                for _ in range(d)
            ]
            for _ in range(d)
        ]
    )
    P0 = smat_add(
        smat_identity(d, m.p, m.N, mw),
        smat_map(R, lambda e: _pad(shift_multiply(e, 1), mw)),
    )
    qpow = _q_powers(ctx.work.q, m.h)
    AQ = smat(
        [
            [series_scale(qpow[m.weights[j]], m.A.at(i, j)) for j in range(d)]
            for i in range(d)
        ]
    )
    phi_P0 = smat_map(P0, lambda e: substitute(e, ctx.work.phi_pi0))
    C_pert = smat_mul(smat_mul(_smat_series_inverse(P0), AQ), phi_P0)
    return C_pert, P0, AQ


class TestReduce:
    def test_rank_one(self, ctx3):
        C0, G0 = reduce_mod_pi0(solve_wach(unit_fl(3, 16, 0, 2), ctx3))
        assert C0.entries == (2,) and G0.entries == (1,)

    def test_weights_through_constants(self, ctx3):
        m = make_fl(3, 16, (0, 1), PMatrix.identity(2, 3, 16))
        C0, _ = reduce_mod_pi0(solve_wach(m, ctx3))
        assert C0.to_lists() == [[1, 0], [0, 3]]

    def test_weights_recovered_from_elementary_divisors(self, ctx5):
        # the reduction constants determine the weights as p-valuations of
        # the elementary divisors of C0
        from wachkit.padic import smith_elementary_divisors

        rng = random.Random(77)
        m = make_fl(5, 16, (0, 1, 3), random_unit_matrix(rng, 3, 5, 16))
        C0, _ = reduce_mod_pi0(solve_wach(m, ctx5))
        assert tuple(sorted(smith_elementary_divisors(C0))) == m.weights

    def test_tampered(self, ctx3):
        w = solve_wach(unit_fl(3, 16, 0, 1), ctx3)
        bad = WachModule(
            ctx=ctx3,
            weights=w.weights,
            C=w.C,
            G=smat([[constant_series(PI0, 2, 3, 16, 16)]]),
        )
        with pytest.raises(AxiomViolation):
            reduce_mod_pi0(bad)


class TestRecoverFiltration:
    def test_rank_one_weight_zero(self, ctx3):
        red = recover_filtration(solve_wach(unit_fl(3, 16, 0, 2), ctx3), 0)
        assert red.fil_ranks == (1, 0)
        assert red.weights_recovered == (0,)

    def test_rank_two(self, ctx3):
        m = make_fl(3, 16, (0, 1), PMatrix.identity(2, 3, 16))
        red = recover_filtration(solve_wach(m, ctx3), 1)
        assert red.fil_ranks == (2, 1, 0)
        assert red.weights_recovered == (0, 1)
        assert red.A_recovered == PMatrix.identity(2, 3, 16)

    def test_random_roundtrips(self, contexts):
        rng = random.Random(14)
        for p, ctx in contexts.items():
            for _ in range(3):
                d = rng.randint(1, 3)
                weights = sorted(rng.randint(0, p - 2) for _ in range(d))
                m = make_fl(p, 16, weights, random_unit_matrix(rng, d, p, 16))
                red = recover_filtration(solve_wach(m, ctx), m.h)
                assert red.weights_recovered == m.weights

    def test_invariant_under_planted_base_change(self, ctx3):
        # fil_ranks do not move under P = Id mod pi0 conjugation of C
        rng = random.Random(55)
        m = make_fl(3, 16, (0, 1, 1), random_unit_matrix(rng, 3, 3, 16))
        w = solve_wach(m, ctx3)
        C_pert, _, _ = planted_perturbation(ctx3, m, seed=4)
        perturbed = WachModule(
            ctx=ctx3,
            weights=m.weights,
            C=smat_truncate(C_pert, 16),
            G=w.G,  # G is ignored by the filtration solve
        )
        red0 = recover_filtration(w, m.h)
        red1 = recover_filtration(perturbed, m.h)
        assert red0.fil_ranks == red1.fil_ranks
        assert red0.weights_recovered == red1.weights_recovered

    def test_divided_frobenius_compatibility(self, ctx5):
        # on Fil^(r+1): phi^r = p * phi^(r+1)
        rng = random.Random(66)
        m = make_fl(5, 16, (0, 2), random_unit_matrix(rng, 2, 5, 16))
        w = solve_wach(m, ctx5)
        red = recover_filtration(w, m.h)
        pn = 5**16
        lat = red.fil_generators[2]  # Fil^2 generators
        for i in range(lat.rows):
            x = list(lat.row(i))
            low = _phi_r_image(w, x, 1)
            high = _phi_r_image(w, x, 2)
            assert low == [(5 * v) % pn for v in high]

    def test_h_max_guard(self, ctx3):
        w = solve_wach(unit_fl(3, 16, 0, 1), ctx3)
        with pytest.raises(Exception):
            recover_filtration(w, 5)


class TestNormalize:
    def test_identity_perturbation(self, ctx3):
        m = make_fl(3, 16, (1,), PMatrix(1, 1, (1,), 3, 16))
        qpow = _q_powers(ctx3.work.q, 1)
        AQ = smat([[qpow[1]]])
        P = normalize_basis(AQ, m, ctx3)
        assert smat_eq(P, smat_identity(1, 3, 16, 16))

    def test_plant_and_recover(self, contexts):
        rng = random.Random(3)
        for p, ctx in contexts.items():
            d = rng.randint(1, 2)
            weights = sorted(rng.randint(0, p - 2) for _ in range(d))
            m = make_fl(p, 16, weights, random_unit_matrix(rng, d, p, 16))
            C_pert, P0, AQ = planted_perturbation(ctx, m, seed=p)
            P = normalize_basis(C_pert, m, ctx)
            # P must invert the planted base change on the user window
            P0inv = _smat_series_inverse(P0)
            assert smat_eq(P, smat_truncate(P0inv, 16))

    def test_scalar_perturbation_p3(self, ctx3):
        # rank 1, r = 1, perturbation a*(1+pi0)
        m = make_fl(3, 16, (1,), PMatrix(1, 1, (1,), 3, 16))
        mw = ctx3.work.M_pi0
        q = ctx3.work.q
        pert = smat(
            [[TruncSeries(PI0, 3, 16, tuple((q.coeffs[k] + q.coeff(k - 1) if k else q.coeffs[0]) for k in range(mw)))]]
        )  # (1 + X) * q
        P = normalize_basis(pert, m, ctx3)
        # residual is certified inside normalize_basis; P must be nontrivial
        assert not smat_eq(P, smat_identity(1, 3, 16, 16))

    def test_not_congruent(self, ctx3):
        m = make_fl(3, 16, (1,), PMatrix(1, 1, (1,), 3, 16))
        wrong = smat([[constant_series(PI0, 5, 3, 16, ctx3.work.M_pi0)]])
        with pytest.raises(NotCongruent):
            normalize_basis(wrong, m, ctx3)


class TestRoundtrip:
    def test_rank_one(self, ctx3):
        rep = roundtrip_check(unit_fl(3, 16, 0, 1), ctx3)
        assert rep.ok

    def test_boundary_weight(self, contexts):
        rng = random.Random(9)
        for p, ctx in contexts.items():
            m = make_fl(p, 16, (p - 2,), random_unit_matrix(rng, 1, p, 16))
            assert roundtrip_check(m, ctx, seed=1).ok

    def test_stabilizer_comparison_tied_weights(self, ctx5):
        # equal weights allow any unimodular block; recovery must still match
        rng = random.Random(12)
        m = make_fl(5, 16, (2, 2), random_unit_matrix(rng, 2, 5, 16))
        assert roundtrip_check(m, ctx5, seed=2).ok
