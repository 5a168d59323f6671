"""Reduction mod pi0, filtration recovery, and basis normalization.

The reduction functor sends a solved module to its constant coefficients
(C0, G0 = Id).  The filtration of the reduction is recovered from the
q-divisibility conditions: x lies in Fil^r iff some lift x + sum pi0^k y_k
has phi-image divisible by q^r, which is a linear system over Z/p^N in
(x, y) solved by the Howell kernel; the divided Frobenius on Fil^r is the
constant term of the exact quotient by (X+p)^r.

normalize_basis is the recognition recursion: given C_pert = A*Q + pi0*(...)
presenting a module isomorphic to the target, it finds the base change
P = Id + pi0*Cm with P^(-1)*C_pert*phi(P) = A*Q by iterating

    Cm  <-  [Delta + u*q^(p-1)*C_pert*phi(Cm)] * Q^(-1) * A^(-1),

which contracts because the column factor q^(p-1-r_j) has positive valuation
for weights <= p-2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cyclo import CycloContext
from .errors import (
    AxiomViolation,
    InvalidInput,
    NoConvergence,
    NotCongruent,
    PrecisionExhausted,
)
from .flmod import FLModule, require_valid, validate_fl
from .padic import PMatrix, howell_form, howell_kernel, matrix_inverse_mod, pval
from .series import (
    PI0,
    TruncSeries,
    series_add,
    series_multiply,
    series_scale,
    shift_divide_exact,
    shift_multiply,
    substitute,
    weierstrass_divide_exact,
    weierstrass_divide_q_power,
)
from .wach import (
    SeriesMat,
    WachModule,
    _pad,
    _q_powers,
    smat,
    smat_add,
    smat_eq,
    smat_identity,
    smat_is_zero,
    smat_map,
    smat_mul,
    smat_scalar_right,
    smat_sub,
    smat_truncate,
    solve_gamma_matrix,
    solve_wach,
)


@dataclass(frozen=True)
class FilteredReduction:
    """Recovered filtered data of the reduction mod pi0."""

    d: int
    fil_ranks: tuple[int, ...]  # rank(Fil^r) for r = 0..h_max+1
    weights_recovered: tuple[int, ...]
    A_recovered: PMatrix
    fil_generators: tuple[PMatrix, ...]  # canonical Howell rows per r
    adapted_basis: PMatrix  # columns b_j, ascending recovered weights


def reduce_mod_pi0(w: WachModule) -> tuple[PMatrix, PMatrix]:
    """Constant coefficients (C0, G0); G0 must be the identity."""
    p, N = w.ctx.p, w.ctx.N
    d = w.rank
    C0 = PMatrix(
        d, d, tuple(w.C[i][j].constant_term() for i in range(d) for j in range(d)), p, N
    )
    G0 = PMatrix(
        d, d, tuple(w.G[i][j].constant_term() for i in range(d) for j in range(d)), p, N
    )
    if G0 != PMatrix.identity(d, p, N):
        raise AxiomViolation("G mod pi0 is not the identity")
    return C0, G0


def _phi_pi0_powers(ctx: CycloContext, up_to: int) -> list[TruncSeries]:
    f = ctx.work.phi_pi0
    pows = [TruncSeries(PI0, ctx.p, ctx.N, (1,) + (0,) * (f.order - 1))]
    for _ in range(up_to):
        pows.append(series_multiply(pows[-1], f))
    return pows


def _fil_lattice(w: WachModule, r: int) -> PMatrix:
    """Canonical generators of Fil^r as rows of a Howell form.

    The condition entries are evaluated at the guard order (module entries
    are exact polynomials on the user window, so zero-padding is exact);
    at the user window the canonical division junk would pollute the
    Weierstrass remainders mod p^N and fake near-p^N kernel vectors.
    """
    ctx = w.ctx
    p, N = ctx.p, ctx.N
    d = w.rank
    M0 = ctx.profile.M_pi0
    mw = ctx.work.M_pi0
    if r == 0:
        return PMatrix.identity(d, p, N)
    phi_pows = _phi_pi0_powers(ctx, M0 - 1)
    # unknowns: x_0..x_{d-1}, then y_{k,i} for k = 1..M0-1
    cols = d * M0
    rows: list[list[int]] = [[0] * cols for _ in range(r * d)]
    for i2 in range(d):  # ambient coordinate
        for i in range(d):  # unknown index
            base = _pad(w.C[i2][i], mw)
            _, rem = weierstrass_divide_q_power(base, r)
            for t in range(r):
                rows[i2 * r + t][i] = rem[t]
            for k in range(1, M0):
                prod = series_multiply(base, phi_pows[k])
                _, rem = weierstrass_divide_q_power(prod, r)
                for t in range(r):
                    rows[i2 * r + t][k * d + i] = rem[t]
    system = PMatrix.from_lists(rows, p, N)
    kern = howell_kernel(system)
    xs = [list(kern.row(i)[:d]) for i in range(kern.rows)]
    xs = [row for row in xs if any(row)]
    if not xs:
        return PMatrix(0, d, (), p, N)
    return howell_form(PMatrix.from_lists(xs, p, N))


def _saturation_guard(lat: PMatrix) -> None:
    for i in range(lat.rows):
        row = lat.row(i)
        piv = next(x for x in row if x)
        if pval(piv, lat.p, lat.N) != 0:
            raise PrecisionExhausted(
                "recovered filtration lattice is not p-saturated"
            )


def _phi_r_image(w: WachModule, x: list[int], r: int) -> list[int]:
    """Constant term of C*x / q^r for x in Fil^r (divided Frobenius value).

    Guard-order evaluation for the same reason as _fil_lattice: the constant
    term of a user-window quotient is only exact mod p^(M_pi0 - r).
    """
    d = w.rank
    mw = w.ctx.work.M_pi0
    out = []
    for i2 in range(d):
        acc = None
        for i in range(d):
            term = series_scale(_pad(w.C[i2][i], mw), x[i])
            acc = term if acc is None else series_add(acc, term)
        quot = weierstrass_divide_exact(acc, r)
        out.append(quot.constant_term())
    return out


def _mod_p_rank(vectors: list[list[int]], p: int) -> int:
    if not vectors:
        return 0
    work = [[x % p for x in v] for v in vectors]
    rank, col, n = 0, 0, len(work[0])
    while rank < len(work) and col < n:
        piv = next((i for i in range(rank, len(work)) if work[i][col] % p), None)
        if piv is None:
            col += 1
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = pow(work[rank][col], -1, p)
        work[rank] = [(v * inv) % p for v in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                f = work[i][col]
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[rank])]
        rank += 1
        col += 1
    return rank


def recover_filtration(w: WachModule, h_max: int) -> FilteredReduction:
    """Recover fil_ranks, weights, the divided Frobenius matrix and an
    adapted basis from the q-divisibility conditions."""
    ctx = w.ctx
    p, N = ctx.p, ctx.N
    if h_max > p - 2:
        raise InvalidInput("h_max exceeds p-2")
    d = w.rank

    lattices = [_fil_lattice(w, r) for r in range(h_max + 2)]
    for lat in lattices:
        _saturation_guard(lat)
    fil_ranks = tuple(lat.rows for lat in lattices)
    if fil_ranks[0] != d:
        raise PrecisionExhausted("Fil^0 does not have full rank")
    if fil_ranks[-1] != 0:
        raise PrecisionExhausted(f"Fil^{h_max + 1} is nonzero")
    for a, b in zip(fil_ranks, fil_ranks[1:]):
        if b > a:
            raise PrecisionExhausted("filtration ranks are not decreasing")

    weights: list[int] = []
    for r in range(1, h_max + 2):
        weights.extend([r - 1] * (fil_ranks[r - 1] - fil_ranks[r]))
    weights_rec = tuple(sorted(weights))

    # adapted basis: extend a basis of Fil^(r+1) to one of Fil^r, descending r
    chosen: list[tuple[int, list[int]]] = []  # (weight, vector)
    for r in range(h_max, -1, -1):
        lat = lattices[r]
        for i in range(lat.rows):
            if len(chosen) == fil_ranks[r]:
                break
            cand = list(lat.row(i))
            if _mod_p_rank([v for _, v in chosen] + [cand], p) > len(chosen):
                chosen.append((r, cand))
        if len(chosen) != fil_ranks[r]:
            raise PrecisionExhausted(f"cannot complete a basis of Fil^{r}")
    chosen.sort(key=lambda t: t[0])  # ascending weights; stable

    T = PMatrix(
        d,
        d,
        tuple(chosen[j][1][i] for i in range(d) for j in range(d)),
        p,
        N,
    )
    phi_cols = [_phi_r_image(w, vec, wt) for wt, vec in chosen]
    Phi = PMatrix(
        d, d, tuple(phi_cols[j][i] for i in range(d) for j in range(d)), p, N
    )
    A_rec = matrix_inverse_mod(T).mul(Phi)

    return FilteredReduction(
        d=d,
        fil_ranks=fil_ranks,
        weights_recovered=weights_rec,
        A_recovered=A_rec,
        fil_generators=tuple(lattices),
        adapted_basis=T,
    )


# ---------------------------------------------------------------------------
# basis normalization (recognition direction)


def normalize_basis(
    C_perturbed: SeriesMat,
    target: FLModule,
    ctx: CycloContext,
    max_iter: int | None = None,
) -> SeriesMat:
    """Base change P = Id mod pi0 with P^(-1)*C_perturbed*phi(P) = A*Q.

    The input series are taken as exact at their stated truncation.  Raises
    NotCongruent if C_perturbed does not reduce to A*diag(p^(r_j)) mod pi0,
    NotDivisible if the perturbation is not realizable over the ring, and
    NoConvergence if the iteration budget is exhausted.
    """
    require_valid(target)
    p, N = ctx.p, ctx.N
    d = target.rank
    weights = target.weights
    A = target.A
    work = ctx.work
    mw = work.M_pi0
    t_order = ctx.profile.M_pi0
    if max_iter is None:
        max_iter = N + t_order + p + 4

    pm = p**N
    for i in range(d):
        for j in range(d):
            expect = (A.at(i, j) * pow(p, weights[j], pm)) % pm
            if C_perturbed[i][j].constant_term() != expect:
                raise NotCongruent(
                    f"C mod pi0 differs from A*diag(p^r) at entry ({i},{j})"
                )

    Cp = smat_map(C_perturbed, lambda e: _pad(e, mw))
    qpow = _q_powers(work.q, p - 1)
    AQ = smat(
        [
            [series_scale(qpow[weights[j]], A.at(i, j)) for j in range(d)]
            for i in range(d)
        ]
    )
    Ainv = matrix_inverse_mod(A)
    uq = series_multiply(work.u, qpow[p - 1])

    delta = smat_map(smat_sub(Cp, AQ), lambda e: _pad(shift_divide_exact(e, 1), mw))

    Cm = smat_map(smat_identity(d, p, N, mw), lambda e: series_scale(e, 0))
    prev_window = smat_truncate(Cm, t_order)
    for _ in range(max_iter):
        phiCm = smat_map(Cm, lambda e: substitute(e, work.phi_pi0))
        S = smat_mul(Cp, phiCm)
        S = smat_map(S, lambda e: series_multiply(uq, e))
        S = smat_add(delta, S)
        # multiply by Q^(-1) (exact column divisions), then by A^(-1)
        S = smat(
            [
                [
                    _pad(weierstrass_divide_exact(S[i][j], weights[j]), mw)
                    for j in range(d)
                ]
                for i in range(d)
            ]
        )
        Cm = smat_scalar_right(S, Ainv)
        cur_window = smat_truncate(Cm, t_order)
        if smat_eq(cur_window, prev_window):
            break
        prev_window = cur_window
    else:
        raise NoConvergence(f"normalization did not stabilize in {max_iter} steps")

    P = smat_add(
        smat_identity(d, p, N, t_order),
        smat_map(cur_window, lambda e: shift_multiply(e, 1).truncate(t_order)),
    )
    # certify the residual on the user window: C_pert*phi(P) = P*A*Q
    residual = smat_sub(
        smat_mul(smat_truncate(Cp, t_order), _phi_target(P, ctx)),
        smat_mul(P, smat_truncate(AQ, t_order)),
    )
    if not smat_is_zero(residual):
        raise AxiomViolation("normalization residual is nonzero at the user window")
    return P


def _phi_target(X: SeriesMat, ctx: CycloContext) -> SeriesMat:
    f = ctx.phi_pi0
    return smat_map(X, lambda e: substitute(e, f.truncate(min(e.order, f.order))))


# ---------------------------------------------------------------------------
# roundtrip


@dataclass(frozen=True)
class RoundtripReport:
    checks: tuple[tuple[str, bool, str], ...]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def _expected_fil_ranks(weights: tuple[int, ...], h: int) -> tuple[int, ...]:
    return tuple(sum(1 for r in weights if r >= t) for t in range(h + 2))


def _stabilizer_match(
    m: FLModule, red: FilteredReduction
) -> tuple[bool, str]:
    """Compare recovered data with the source up to the splitting stabilizer.

    The recovered adapted basis T must be filtration-compatible (T_{ij} = 0
    whenever weight(e_i) < weight(b_j)), invertible, and satisfy the divided
    Frobenius morphism identity A*D(T) = T*A_rec where
    D(T)_{ij} = T_{ij} p^(r_i - r_j).
    """
    p, N = m.p, m.N
    pm = p**N
    d = m.rank
    if red.weights_recovered != m.weights:
        return False, f"weights {red.weights_recovered} != {m.weights}"
    T = red.adapted_basis
    if not T.is_unit_matrix():
        return False, "adapted basis is singular mod p"
    for i in range(d):
        for j in range(d):
            if m.weights[i] < m.weights[j] and T.at(i, j) != 0:
                return False, f"basis vector {j} is not in Fil^{m.weights[j]}"
    D = PMatrix(
        d,
        d,
        tuple(
            (T.at(i, j) * pow(p, m.weights[i] - m.weights[j], pm)) % pm
            if m.weights[i] >= m.weights[j]
            else 0
            for i in range(d)
            for j in range(d)
        ),
        p,
        N,
    )
    lhs = m.A.mul(D)
    rhs = T.mul(red.A_recovered)
    if lhs != rhs:
        return False, "A_recovered is not stabilizer-equivalent to A"
    return True, ""


def roundtrip_check(
    m: FLModule, ctx: CycloContext, seed: int = 0
) -> RoundtripReport:
    """Build, reduce, recover, and recognize; passes iff all stages agree.

    The recognition stage perturbs C by a seeded random P0 = Id + pi0*R,
    normalizes back, re-solves the Gamma-matrix and compares entrywise.
    """
    checks: list[tuple[str, bool, str]] = []
    rep = validate_fl(m)
    checks.append(("validate", rep.ok, "; ".join(rep.failures)))
    if not rep.ok:
        return RoundtripReport(tuple(checks))

    w = solve_wach(m, ctx)
    checks.append(("solve", True, f"iterations={w.iterations_used}"))

    red = recover_filtration(w, m.h)
    ranks_ok = red.fil_ranks == _expected_fil_ranks(m.weights, m.h)
    checks.append(
        ("fil_ranks", ranks_ok, f"{red.fil_ranks}")
    )
    ok, why = _stabilizer_match(m, red)
    checks.append(("weights_and_A", ok, why))

    C0, _ = reduce_mod_pi0(w)
    pm = m.p**m.N
    expected_C0 = PMatrix(
        m.rank,
        m.rank,
        tuple(
            (m.A.at(i, j) * pow(m.p, m.weights[j], pm)) % pm
            for i in range(m.rank)
            for j in range(m.rank)
        ),
        m.p,
        m.N,
    )
    checks.append(("reduction_constants", C0 == expected_C0, ""))

    # recognition leg: plant a perturbation, normalize it away, re-solve
    rng = random.Random(seed)
    mw = ctx.work.M_pi0
    d = m.rank
    R = smat(
        [
            [
                TruncSeries(
                    PI0,
                    m.p,
                    m.N,
                    tuple(rng.randrange(pm) for _ in range(ctx.profile.M_pi0 - 1)),
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
    P0inv = _smat_series_inverse(P0)
    AQ_w = smat(
        [
            [
                series_scale(_q_powers(ctx.work.q, m.h)[m.weights[j]], m.A.at(i, j))
                for j in range(d)
            ]
            for i in range(d)
        ]
    )
    C_pert = smat_mul(smat_mul(P0inv, AQ_w), _phi_work(P0, ctx))
    try:
        P = normalize_basis(C_pert, m, ctx)
        norm_ok = True
        detail = ""
    except Exception as exc:  # report, don't raise: this is a check
        norm_ok, detail = False, f"{type(exc).__name__}: {exc}"
    checks.append(("normalize", norm_ok, detail))

    if norm_ok:
        G2, _ = solve_gamma_matrix(w.C, m.weights, m.A, ctx)
        checks.append(("resolve_matches", smat_eq(G2, w.G), ""))

    return RoundtripReport(tuple(checks))


def _phi_work(X: SeriesMat, ctx: CycloContext) -> SeriesMat:
    f = ctx.work.phi_pi0
    return smat_map(X, lambda e: substitute(e, f.truncate(min(e.order, f.order))))


def _smat_series_inverse(X: SeriesMat) -> SeriesMat:
    """Inverse of a series matrix congruent to Id mod pi0 (Neumann series)."""
    d = len(X)
    ref = X[0][0]
    ident = smat_identity(d, ref.p, ref.N, ref.order)
    nil = smat_sub(ident, X)  # vanishes mod pi0
    acc = ident
    power = ident
    for _ in range(ref.order):
        power = smat_mul(power, nil)
        if smat_is_zero(power):
            break
        acc = smat_add(acc, power)
    return acc
