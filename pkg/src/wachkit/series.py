"""Truncated power series over Z/p^N in the variables pi and pi0.

A :class:`TruncSeries` is a coefficient tuple (index k = coefficient of X^k,
canonical residues mod p^N) tagged with its variable.  The length of the
tuple is the series' valid order: operations that genuinely lose knowledge of
top coefficients (``shift_divide_exact``) return shorter series instead of
padding with unearned zeros, and binary operations work at the shorter of the
two windows.

The two variables are related by the coordinate change pi0 = pi0_in_pi(pi),
a series of exact pi-valuation p-1 with unit leading coefficient; the
pi -> pi0 direction is a strictly triangular back-substitution graded by
d = j + k(p-1) and needs no division by p.

Profiles: a :class:`TruncationProfile` fixes (p, N, M_pi0, M_pi) with
M_pi0 >= N (so evaluation at pi0 = -p, the Weierstrass remainder, is exact
mod p^N) and M_pi >= (p-1)*M_pi0 + p (so pi-coordinates determine
pi0-coordinates to order M_pi0).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import (
    InsufficientExponentPrecision,
    InvalidInput,
    NonUnitSeries,
    NonzeroConstant,
    NotDivisible,
    NotInS0,
    ProfileMismatch,
    VariableMismatch,
)
from .padic import PScalar, _check_modulus

PI = "pi"
PI0 = "pi0"

PI0_TO_PI = "pi0_to_pi"
PI_TO_PI0 = "pi_to_pi0"
PI_TO_PI0_PURE = "pi_to_pi0_pure"


def default_pi_order(p: int, M_pi0: int) -> int:
    return (p - 1) * M_pi0 + p


@dataclass(frozen=True)
class TruncationProfile:
    """Truncation orders for one computation: fixed p, N, M_pi0, M_pi."""

    p: int
    N: int
    M_pi0: int
    M_pi: int

    def __post_init__(self) -> None:
        _check_modulus(self.p, self.N)
        if self.M_pi0 < self.N:
            raise InvalidInput(
                f"M_pi0 = {self.M_pi0} must be >= N = {self.N} "
                "(Weierstrass remainders are only exact mod p^N above that order)"
            )
        if self.M_pi < default_pi_order(self.p, self.M_pi0):
            raise InvalidInput(
                f"M_pi = {self.M_pi} must be >= (p-1)*M_pi0 + p = "
                f"{default_pi_order(self.p, self.M_pi0)}"
            )

    @staticmethod
    def default(p: int, N: int = 16, M_pi0: int = 16) -> "TruncationProfile":
        return TruncationProfile(p, N, M_pi0, default_pi_order(p, M_pi0))

    @property
    def pn(self) -> int:
        return self.p**self.N

    def order_for(self, var: str) -> int:
        return self.M_pi if var == PI else self.M_pi0


@dataclass(frozen=True)
class TruncSeries:
    """A truncated series: coefficient of X^k at index k, mod p^N."""

    var: str
    p: int
    N: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.var not in (PI, PI0):
            raise InvalidInput(f"unknown variable tag {self.var!r}")
        pn = self.p**self.N
        object.__setattr__(self, "coeffs", tuple(c % pn for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def pn(self) -> int:
        return self.p**self.N

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if k < len(self.coeffs) else 0

    def constant_term(self) -> int:
        return self.coeff(0)

    def is_unit(self) -> bool:
        return self.coeff(0) % self.p != 0

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        if order > len(self.coeffs):
            raise InvalidInput("cannot extend a series' valid order")
        return TruncSeries(self.var, self.p, self.N, self.coeffs[:order])

    def scalar(self, k: int) -> PScalar:
        return PScalar(self.coeff(k), self.p, self.N)


def _same_ring(f: TruncSeries, g: TruncSeries) -> None:
    if (f.p, f.N) != (g.p, g.N):
        raise ProfileMismatch("series over different moduli")
    if f.var != g.var:
        raise VariableMismatch(f"variable tags differ: {f.var} vs {g.var}")


def make_series(var: str, coeffs, p: int, N: int) -> TruncSeries:
    return TruncSeries(var, p, N, tuple(coeffs))


def zero_series(var: str, p: int, N: int, order: int) -> TruncSeries:
    return TruncSeries(var, p, N, (0,) * order)


def constant_series(var: str, c: int, p: int, N: int, order: int) -> TruncSeries:
    return TruncSeries(var, p, N, (c,) + (0,) * (order - 1))


def x_series(var: str, p: int, N: int, order: int) -> TruncSeries:
    coeffs = [0] * order
    if order > 1:
        coeffs[1] = 1
    return TruncSeries(var, p, N, tuple(coeffs))


def series_add(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    _same_ring(f, g)
    n = min(f.order, g.order)
    return TruncSeries(
        f.var, f.p, f.N, tuple(f.coeffs[k] + g.coeffs[k] for k in range(n))
    )


def series_sub(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    _same_ring(f, g)
    n = min(f.order, g.order)
    return TruncSeries(
        f.var, f.p, f.N, tuple(f.coeffs[k] - g.coeffs[k] for k in range(n))
    )


def series_scale(f: TruncSeries, c: int) -> TruncSeries:
    return TruncSeries(f.var, f.p, f.N, tuple(c * x for x in f.coeffs))


def series_multiply(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """Exact truncated product at the shorter of the two windows."""
    _same_ring(f, g)
    n = min(f.order, g.order)
    out = kernels.series_mul(list(f.coeffs), list(g.coeffs), f.pn, n)
    return TruncSeries(f.var, f.p, f.N, tuple(out))


def series_pow(f: TruncSeries, e: int) -> TruncSeries:
    """e-th power by binary powering, e >= 0."""
    if e < 0:
        raise InvalidInput("negative power")
    result = constant_series(f.var, 1, f.p, f.N, f.order)
    base = f
    while e:
        if e & 1:
            result = series_multiply(result, base)
        base = series_multiply(base, base) if e > 1 else base
        e >>= 1
    return result


def series_invert_unit(f: TruncSeries) -> TruncSeries:
    """Multiplicative inverse of a series with unit constant term."""
    if not f.is_unit():
        raise NonUnitSeries("constant term is not a unit mod p")
    pn = f.pn
    inv0 = pow(f.coeffs[0], -1, pn)
    out = [0] * f.order
    out[0] = inv0
    for k in range(1, f.order):
        acc = 0
        for i in range(1, k + 1):
            fi = f.coeffs[i] if i < f.order else 0
            if fi:
                acc += fi * out[k - i]
        out[k] = (-inv0 * acc) % pn
    return TruncSeries(f.var, f.p, f.N, tuple(out))


def series_compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """f(g(X)); g must have zero constant term, tags must agree."""
    _same_ring(f, g)
    if g.constant_term() != 0:
        raise NonzeroConstant("substitution argument has nonzero constant term")
    n = min(f.order, g.order)
    out = kernels.series_compose(list(f.coeffs[:n]), list(g.coeffs), f.pn, n)
    return TruncSeries(f.var, f.p, f.N, tuple(out))


def substitute(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """Like series_compose but allows f and g to carry different tags.

    Used for coordinate changes and operator images, where f is a series in
    one variable and g expresses that variable in another one; the result
    inherits g's tag.
    """
    if (f.p, f.N) != (g.p, g.N):
        raise ProfileMismatch("series over different moduli")
    if g.constant_term() != 0:
        raise NonzeroConstant("substitution argument has nonzero constant term")
    out = kernels.series_compose(list(f.coeffs), list(g.coeffs), f.pn, g.order)
    return TruncSeries(g.var, g.p, g.N, tuple(out))


def _ceil_log(p: int, m: int) -> int:
    k, q = 0, 1
    while q < m:
        q *= p
        k += 1
    return k


def binomial_power(
    c, p: int, N: int, order: int, var: str = PI
) -> TruncSeries:
    """(1 + X)^c truncated at the given order.

    ``c`` may be a plain int (an exact exponent) or a :class:`PScalar` given
    mod p^K, which must satisfy K >= N + ceil(log_p order); the expansion is
    computed from the p-adic digits of the representative by repeated p-th
    powering, so an integer representative yields the exact finite binomial
    expansion.
    """
    if isinstance(c, PScalar):
        if c.p != p:
            raise ProfileMismatch("exponent lives over a different prime")
        need = N + _ceil_log(p, order)
        if c.N < need:
            raise InsufficientExponentPrecision(
                f"exponent precision {c.N} below required {need}"
            )
        n = c.value
    else:
        n = int(c)
        if n < 0:
            raise InvalidInput("negative exponent; invert the unit instead")
    if order < 1:
        raise InvalidInput("order must be positive")
    base_coeffs = (1, 1)[:order] + (0,) * max(0, order - 2)
    tower = TruncSeries(var, p, N, base_coeffs)  # (1+X)^(p^i)
    result = constant_series(var, 1, p, N, order)
    while n:
        digit = n % p
        if digit:
            result = series_multiply(result, series_pow(tower, digit))
        n //= p
        if n:
            tower = series_pow(tower, p)
    return result


def _divmod_linear(f: list[int], p_const: int, pn: int) -> tuple[list[int], int]:
    """Polynomial division of f by the monic linear factor (X + p_const).

    Returns (quotient of length len(f)-1, constant remainder); exact identity
    f = (X + p_const) * q + r in Z/pn[X], computed top-down with no scalar
    inversions.
    """
    m = len(f)
    if m == 1:
        return [], f[0] % pn
    q = [0] * (m - 1)
    q[m - 2] = f[m - 1] % pn
    for k in range(m - 2, 0, -1):
        q[k - 1] = (f[k] - p_const * q[k]) % pn
    r = (f[0] - p_const * q[0]) % pn
    return q, r


def weierstrass_divide_q_power(
    f: TruncSeries, r: int
) -> tuple[TruncSeries, tuple[int, ...]]:
    """Divide a pi0-series by (X + p)^r with remainder of degree < r.

    Reconstruction f = (X+p)^r * quotient + remainder holds exactly at the
    truncation; the division is r iterated monic linear divisions, so it uses
    no scalar inversions.
    """
    if f.var != PI0:
        raise VariableMismatch("Weierstrass division expects a pi0-series")
    if r < 0 or r > f.order:
        raise InvalidInput("division exponent out of range")
    pn = f.pn
    cur = list(f.coeffs)
    rem_stages: list[int] = []
    for _ in range(r):
        cur, c = _divmod_linear(cur, f.p, pn)
        rem_stages.append(c)
    # remainder = sum of c_i * (X+p)^(i-1), expanded to degree < r
    rem = [0] * r
    basis = [1] + [0] * max(0, r - 1)
    for c in rem_stages:
        if c:
            for t in range(r):
                rem[t] = (rem[t] + c * basis[t]) % pn
        # multiply basis by (X+p)
        nxt = [0] * r
        for t in range(r):
            if basis[t]:
                nxt[t] = (nxt[t] + f.p * basis[t]) % pn
                if t + 1 < r:
                    nxt[t + 1] = (nxt[t + 1] + basis[t]) % pn
        basis = nxt
    return TruncSeries(PI0, f.p, f.N, tuple(cur)), tuple(rem)


def weierstrass_divide_exact(f: TruncSeries, r: int) -> TruncSeries:
    """Division by (X+p)^r that must leave remainder zero mod p^N."""
    q, rem = weierstrass_divide_q_power(f, r)
    if any(rem):
        raise NotDivisible(f"nonzero remainder {rem} dividing by (X+p)^{r}")
    return q


def shift_divide_exact(f: TruncSeries, k: int) -> TruncSeries:
    """Exact division by X^k; the valid order shrinks by k."""
    if k < 0 or k > f.order:
        raise InvalidInput("shift out of range")
    if any(f.coeffs[:k]):
        raise NotDivisible("low coefficients are nonzero")
    return TruncSeries(f.var, f.p, f.N, f.coeffs[k:])


def shift_multiply(f: TruncSeries, k: int) -> TruncSeries:
    """Multiply by X^k; the valid order grows by k (coefficients are known)."""
    return TruncSeries(f.var, f.p, f.N, (0,) * k + f.coeffs)


def _pi_decompose(
    f: TruncSeries, pi0_in_pi: TruncSeries, out_order: int | None
) -> list[TruncSeries]:
    """Coordinates f = sum_j pi^j f_j(pi0), 0 <= j <= p-2.

    Strictly triangular back-substitution along the grading d = j + k(p-1):
    pi^j * pi0_in_pi^k has exact pi-valuation d with unit leading coefficient,
    so each residual coefficient determines one unknown with no division by p.
    """
    p, pn = f.p, f.pn
    m = f.order
    if out_order is None:
        out_order = (m - p + 1) // (p - 1) + 1
    d_limit = min(m, (p - 2) + (out_order - 1) * (p - 1) + 1)
    pows: list[list[int]] = [[1] + [0] * (m - 1)]
    base = list(pi0_in_pi.coeffs[:m]) + [0] * max(0, m - pi0_in_pi.order)
    for _ in range(1, out_order):
        pows.append(kernels.series_mul(pows[-1], base, pn, m))
    residual = list(f.coeffs)
    out = [[0] * out_order for _ in range(p - 1)]
    for d in range(d_limit):
        k, j = divmod(d, p - 1)
        if k >= out_order:
            break
        if residual[d] == 0:
            continue
        lead = pows[k][k * (p - 1)]
        c = (residual[d] * pow(lead, -1, pn)) % pn
        out[j][k] = c
        pk = pows[k]
        for s in range(k * (p - 1), m - j):
            if pk[s]:
                residual[j + s] = (residual[j + s] - c * pk[s]) % pn
    return [TruncSeries(PI0, f.p, f.N, tuple(row)) for row in out]


def change_coordinates(
    f: TruncSeries,
    direction: str,
    pi0_in_pi: TruncSeries,
    out_order: int | None = None,
):
    """Coordinate change between the pi and pi0 descriptions.

    * PI0_TO_PI: substitute pi0_in_pi into a pi0-series; returns a pi-series.
    * PI_TO_PI0: returns the full record (f_0, ..., f_{p-2}) of pi0-series
      with f = sum_j pi^j f_j(pi0).
    * PI_TO_PI0_PURE: asserts f_j = 0 for j >= 1 and returns f_0, raising
      NotInS0 otherwise.
    """
    if direction == PI0_TO_PI:
        if f.var != PI0:
            raise VariableMismatch("expected a pi0-series")
        if pi0_in_pi.var != PI:
            raise VariableMismatch("pi0_in_pi must be a pi-series")
        return substitute(f, pi0_in_pi)
    if direction in (PI_TO_PI0, PI_TO_PI0_PURE):
        if f.var != PI:
            raise VariableMismatch("expected a pi-series")
        parts = _pi_decompose(f, pi0_in_pi, out_order)
        if direction == PI_TO_PI0:
            return tuple(parts)
        for j, part in enumerate(parts[1:], start=1):
            if not part.is_zero():
                raise NotInS0(f"component at pi^{j} is nonzero")
        return parts[0]
    raise InvalidInput(f"unknown direction {direction!r}")
