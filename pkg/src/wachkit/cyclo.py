"""Bootstrap and application of the cyclotomic operators.

A :class:`CycloContext` packages, for one truncation profile and one choice
of Gamma-generator character value chi(gamma), the distinguished data:

* pi0_in_pi: the invariant coordinate -p + 1 + sum_a (1+pi)^(omega_a) over the
  Teichmueller exponents omega_a (NOT the integer exponents 0..p-1 - only the
  Teichmueller sum is fixed by the torsion substitutions),
* the substitution images phi(pi), gamma(pi), the torsion images
  (1+pi)^(omega_a) - 1, and their pi0-coordinate counterparts phi(pi0),
  gamma(pi0),
* q = p + pi0 and the unit certificates u = phi(pi0)/(pi0 q^(p-1)) and
  v_gamma = gamma(q)/q, with v_gamma(0) = 1.

All fields exposed on the context are truncated to the user profile.
Internally everything is computed at a guard order M_pi0 + N + p: the
canonical quotient of a Weierstrass division carries noise in its top
coefficients, and the guard keeps every coefficient in the user window exact
(see the valuation argument in wach.solve_gamma_matrix).  The guard data
rides along on ``ctx.work`` for the solver modules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput, VariableMismatch
from .padic import inv_mod, teichmueller_lift
from .series import (
    PI,
    PI0,
    PI_TO_PI0_PURE,
    TruncationProfile,
    TruncSeries,
    binomial_power,
    change_coordinates,
    constant_series,
    default_pi_order,
    series_add,
    series_invert_unit,
    series_scale,
    series_sub,
    shift_divide_exact,
    substitute,
    weierstrass_divide_exact,
    zero_series,
)


@dataclass(frozen=True)
class OperatorTag:
    """Which semilinear operator to apply: phi, gamma, torsion(a), projector(i)."""

    kind: str
    index: int = 0

    PHI = "phi"
    GAMMA = "gamma"
    TORSION = "torsion"
    PROJECTOR = "projector"


PHI = OperatorTag(OperatorTag.PHI)
GAMMA = OperatorTag(OperatorTag.GAMMA)


def torsion(a: int) -> OperatorTag:
    return OperatorTag(OperatorTag.TORSION, a)


def projector(i: int) -> OperatorTag:
    return OperatorTag(OperatorTag.PROJECTOR, i)


@dataclass(frozen=True)
class CycloWork:
    """Guard-order twins of the context series, for the exact solvers."""

    M_pi0: int
    M_pi: int
    pi0_in_pi: TruncSeries
    phi_pi: TruncSeries
    gamma_pi: TruncSeries
    torsion_pi: tuple[TruncSeries, ...]
    phi_pi0: TruncSeries
    gamma_pi0: TruncSeries
    q: TruncSeries
    u: TruncSeries
    v_gamma: TruncSeries
    v_gamma_inv: TruncSeries


@dataclass(frozen=True)
class CycloContext:
    """Immutable bootstrap data for one (profile, chi(gamma)) choice."""

    profile: TruncationProfile
    chi_gamma: int
    teich: tuple[int, ...]  # omega_a mod p^N, a = 1..p-1
    pi0_in_pi: TruncSeries
    phi_pi: TruncSeries
    gamma_pi: TruncSeries
    torsion_pi: tuple[TruncSeries, ...]
    phi_pi0: TruncSeries
    gamma_pi0: TruncSeries
    q: TruncSeries
    u: TruncSeries
    v_gamma: TruncSeries
    work: CycloWork

    @property
    def p(self) -> int:
        return self.profile.p

    @property
    def N(self) -> int:
        return self.profile.N

    @property
    def pn(self) -> int:
        return self.profile.pn

    def torsion_image(self, a: int) -> TruncSeries:
        if not 1 <= a <= self.p - 1:
            raise InvalidInput(f"torsion index {a} outside [1, p-1]")
        return self.torsion_pi[a - 1]

    def primitive_root(self) -> int:
        """Smallest generator of (Z/p)^*; its torsion substitution generates all."""
        p = self.p
        for g in range(2, p):
            x, order = g, 1
            while x != 1:
                x = (x * g) % p
                order += 1
            if order == p - 1:
                return g
        raise AssertionError("no primitive root found")


def guard_order(p: int, N: int, M_pi0: int) -> int:
    """Internal working order.

    Quotients of monic division carry noise above the input's valid order;
    the worst pipeline (the unit u, valid to guard-p, feeding a p-1-deep
    division stack) leaves noise of weighted valuation >= guard - 2p + 2,
    and a user-window monomial has weighted valuation at most N + M_pi0 - 2,
    so this choice keeps every emitted window coefficient exact with margin.
    """
    return M_pi0 + N + 2 * p + 2


def _validate_chi(chi: int, p: int) -> None:
    if chi % p != 1 % p or (chi - 1) % p != 0:
        raise InvalidInput("chi(gamma) must be congruent to 1 mod p")
    if (chi - 1) % (p * p) == 0:
        raise InvalidInput("chi(gamma) must not be 1 mod p^2 (needs a topological generator)")


def build_context(
    p: int,
    N: int = 16,
    M_pi0: int = 16,
    chi_gamma: int | None = None,
    M_pi: int | None = None,
) -> CycloContext:
    """Construct the cyclotomic bootstrap data for an odd prime p.

    chi_gamma is an exact integer representative of the cyclotomic character
    of the chosen Gamma_0-generator (default 1 + p).
    """
    chi = (1 + p) if chi_gamma is None else int(chi_gamma)
    _validate_chi(chi, p)
    profile = TruncationProfile(p, N, M_pi0, M_pi or default_pi_order(p, M_pi0))

    mw = guard_order(p, N, M_pi0)
    mpw = default_pi_order(p, mw)
    pn = p**N

    # Teichmueller exponents at enough precision for order-mpw binomials
    K = N + _ceil_log(p, mpw)
    teich_K = tuple(teichmueller_lift(a, p, K) for a in range(1, p))
    teich_N = tuple(t.value % pn for t in teich_K)

    # pi0 = -p + 1 + sum_a (1+pi)^(omega_a)
    acc = constant_series(PI, 1 - p, p, N, mpw)
    torsion_w = []
    for omega in teich_K:
        pw = binomial_power(omega, p, N, mpw, var=PI)
        acc = series_add(acc, pw)
        torsion_w.append(series_sub(pw, constant_series(PI, 1, p, N, mpw)))
    pi0_in_pi_w = acc
    if pi0_in_pi_w.constant_term() != 0:
        raise AssertionError("pi0 bootstrap: nonzero constant term")
    if any(pi0_in_pi_w.coeffs[1 : p - 1]):
        raise AssertionError("pi0 bootstrap: expected exact valuation p-1")
    if pi0_in_pi_w.coeff(p - 1) % p == 0:
        raise AssertionError("pi0 bootstrap: leading coefficient not a unit")

    phi_pi_w = series_sub(
        binomial_power(p, p, N, mpw, var=PI), constant_series(PI, 1, p, N, mpw)
    )
    gamma_pi_w = series_sub(
        binomial_power(chi, p, N, mpw, var=PI), constant_series(PI, 1, p, N, mpw)
    )

    # images of pi0 in pi-coordinates, then back to pure pi0-coordinates;
    # PI_TO_PI0_PURE doubles as the Gamma_f-invariance assertion
    phi_pi0_w = change_coordinates(
        substitute(pi0_in_pi_w, phi_pi_w), PI_TO_PI0_PURE, pi0_in_pi_w, out_order=mw
    )
    gamma_pi0_w = change_coordinates(
        substitute(pi0_in_pi_w, gamma_pi_w), PI_TO_PI0_PURE, pi0_in_pi_w, out_order=mw
    )
    if phi_pi0_w.constant_term() != 0 or gamma_pi0_w.constant_term() != 0:
        raise AssertionError("phi/gamma must preserve the maximal ideal")

    q_w = TruncSeries(PI0, p, N, (p, 1) + (0,) * (mw - 2))

    # u = phi(pi0) / (pi0 * q^(p-1)), division-free fixpoint certificates
    u_w = weierstrass_divide_exact(shift_divide_exact(phi_pi0_w, 1), p - 1)
    if u_w.coeff(0) % p == 0:
        raise AssertionError("u is not a unit")

    gamma_q_w = series_add(
        constant_series(PI0, p, p, N, mw), gamma_pi0_w
    )  # gamma(q) = p + gamma(pi0)
    v_w = weierstrass_divide_exact(gamma_q_w, 1)
    if v_w.coeff(0) != 1:
        raise AssertionError("v_gamma(0) must be exactly 1")
    v_inv_w = series_invert_unit(v_w)

    work = CycloWork(
        M_pi0=mw,
        M_pi=mpw,
        pi0_in_pi=pi0_in_pi_w,
        phi_pi=phi_pi_w,
        gamma_pi=gamma_pi_w,
        torsion_pi=tuple(torsion_w),
        phi_pi0=phi_pi0_w,
        gamma_pi0=gamma_pi0_w,
        q=q_w,
        u=u_w,
        v_gamma=v_w,
        v_gamma_inv=v_inv_w,
    )

    t_pi, t_pi0 = profile.M_pi, profile.M_pi0
    return CycloContext(
        profile=profile,
        chi_gamma=chi,
        teich=teich_N,
        pi0_in_pi=pi0_in_pi_w.truncate(t_pi),
        phi_pi=phi_pi_w.truncate(t_pi),
        gamma_pi=gamma_pi_w.truncate(t_pi),
        torsion_pi=tuple(t.truncate(t_pi) for t in torsion_w),
        phi_pi0=phi_pi0_w.truncate(t_pi0),
        gamma_pi0=gamma_pi0_w.truncate(t_pi0),
        q=q_w.truncate(t_pi0),
        u=u_w.truncate(t_pi0),
        v_gamma=v_w.truncate(t_pi0),
        work=work,
    )


_CONTEXT_CACHE: dict[tuple[int, int, int, int], CycloContext] = {}


def get_context(
    p: int, N: int = 16, M_pi0: int = 16, chi_gamma: int | None = None
) -> CycloContext:
    """Memoized build_context; contexts are immutable and shareable."""
    chi = (1 + p) if chi_gamma is None else int(chi_gamma)
    key = (p, N, M_pi0, chi)
    ctx = _CONTEXT_CACHE.get(key)
    if ctx is None:
        ctx = build_context(p, N, M_pi0, chi)
        _CONTEXT_CACHE[key] = ctx
    return ctx


def _ceil_log(p: int, m: int) -> int:
    k, q = 0, 1
    while q < m:
        q *= p
        k += 1
    return k


def apply_operator(ctx: CycloContext, tag: OperatorTag, f: TruncSeries) -> TruncSeries:
    """Apply phi, gamma, a torsion substitution, or an eigenspace projector.

    phi and gamma act on pi0-series (substitution of the stored image of
    pi0); torsion and projectors act on pi-series.  Coefficients are fixed by
    the operators (the residue field is F_p), so the action is substitution
    in the variable only.
    """
    kind = tag.kind
    if kind in (OperatorTag.PHI, OperatorTag.GAMMA):
        if f.var != PI0:
            raise VariableMismatch("phi/gamma act on pi0-series")
        stored = ctx.work.phi_pi0 if kind == OperatorTag.PHI else ctx.work.gamma_pi0
        return substitute(f, stored.truncate(min(f.order, stored.order)))
    if kind == OperatorTag.TORSION:
        if f.var != PI:
            raise VariableMismatch("torsion substitutions act on pi-series")
        a = tag.index
        if not 1 <= a <= ctx.p - 1:
            raise InvalidInput(f"torsion index {a} outside [1, p-1]")
        stored = ctx.work.torsion_pi[a - 1]
        return substitute(f, stored.truncate(min(f.order, stored.order)))
    if kind == OperatorTag.PROJECTOR:
        i = tag.index
        if not 0 <= i <= ctx.p - 2:
            raise InvalidInput(f"projector index {i} outside [0, p-2]")
        return _projector(ctx, i, f)
    raise InvalidInput(f"unknown operator kind {kind!r}")


def _torsion_images(ctx: CycloContext, f: TruncSeries) -> list[TruncSeries]:
    if f.var != PI:
        raise VariableMismatch("projectors act on pi-series")
    out = []
    for stored in ctx.work.torsion_pi:
        out.append(substitute(f, stored.truncate(min(f.order, stored.order))))
    return out


def _projector(ctx: CycloContext, i: int, f: TruncSeries) -> TruncSeries:
    return _project_from_images(ctx, i, f, _torsion_images(ctx, f))


def _project_from_images(
    ctx: CycloContext, i: int, f: TruncSeries, images: list[TruncSeries]
) -> TruncSeries:
    pn = ctx.pn
    norm = inv_mod(ctx.p - 1, ctx.p, ctx.N)
    acc = zero_series(PI, ctx.p, ctx.N, images[0].order)
    for a, img in enumerate(images, start=1):
        w = pow(inv_mod(ctx.teich[a - 1], ctx.p, ctx.N), i, pn)
        acc = series_add(acc, series_scale(img, w))
    return series_scale(acc, norm)


def decompose_gamma_f(
    ctx: CycloContext, f: TruncSeries, verify: bool = True
) -> tuple[TruncSeries, ...]:
    """Split a pi-series into its p-1 torsion-character eigencomponents.

    The components sum to f exactly at the truncation.  With verify=True
    (default) each component is certified to transform by omega_a^i under a
    generating torsion substitution, which pins its eigenspace.
    """
    images = _torsion_images(ctx, f)
    comps = tuple(_project_from_images(ctx, i, f, images) for i in range(ctx.p - 1))
    if verify:
        a = ctx.primitive_root()
        stored = ctx.work.torsion_pi[a - 1]
        omega = ctx.teich[a - 1]
        pn = ctx.pn
        for i, comp in enumerate(comps):
            moved = substitute(comp, stored.truncate(min(comp.order, stored.order)))
            scaled = series_scale(comp, pow(omega, i, pn)).truncate(moved.order)
            if moved != scaled:
                raise AssertionError(f"component {i} left its eigenspace")
    return comps


def is_gamma_f_invariant(ctx: CycloContext, f_pi: TruncSeries) -> bool:
    """Invariance under the torsion subgroup, certified on a generator.

    The torsion subgroup is cyclic of order p-1, so invariance under the
    substitution for one primitive root is equivalent to invariance under all
    of them.
    """
    a = ctx.primitive_root()
    stored = ctx.work.torsion_pi[a - 1]
    image = substitute(f_pi, stored.truncate(min(f_pi.order, stored.order)))
    return image.coeffs == f_pi.coeffs[: image.order]


def push_to_pi(ctx: CycloContext, f: TruncSeries) -> TruncSeries:
    """Express a pi0-series in pi-coordinates (at the pi window)."""
    if f.var != PI0:
        raise VariableMismatch("expected a pi0-series")
    target = ctx.work.pi0_in_pi if f.order > ctx.profile.M_pi0 else ctx.pi0_in_pi
    return substitute(f, target)


def context_to_dict(ctx: CycloContext) -> dict:
    """Serializable form of the bootstrap fields (decimal-string series)."""

    def ser(s: TruncSeries) -> list[str]:
        return [str(c) for c in s.coeffs]

    return {
        "p": ctx.p,
        "N": ctx.N,
        "M_pi0": ctx.profile.M_pi0,
        "M_pi": ctx.profile.M_pi,
        "chi_gamma": str(ctx.chi_gamma),
        "teich": [str(t) for t in ctx.teich],
        "pi0_in_pi": ser(ctx.pi0_in_pi),
        "phi_pi0": ser(ctx.phi_pi0),
        "gamma_pi0": ser(ctx.gamma_pi0),
        "q": ser(ctx.q),
        "u": ser(ctx.u),
        "v_gamma": ser(ctx.v_gamma),
    }


def context_from_dict(data: dict) -> CycloContext:
    """Rebuild a context from its serialized fields and cross-check them."""
    ctx = get_context(int(data["p"]), int(data["N"]), int(data["M_pi0"]), int(data["chi_gamma"]))
    for name in ("pi0_in_pi", "phi_pi0", "gamma_pi0", "q", "u", "v_gamma"):
        stored = tuple(int(c) for c in data[name])
        if stored != getattr(ctx, name).coeffs:
            raise InvalidInput(f"cached context field {name} does not match rebuild")
    return ctx
