"""Exact arithmetic over Z/p^N (p an odd prime) and canonical linear algebra.

Scalars are represented by :class:`PScalar` (a canonical residue in
[0, p^N) together with its modulus data); matrices by :class:`PMatrix`, which
stores a row-major tuple of plain int residues sharing one (p, N).  Mixed
moduli are rejected rather than coerced.

The linear algebra is what a local PIR Z/p^N supports exactly:

* inversion of matrices that are invertible mod p (Gauss-Jordan, unit pivots),
* Howell form: the canonical echelon form whose rows include the p-power
  "shadows" needed so that row spans can be compared and membership decided,
* kernels via the Howell form of the augmented transpose,
* Smith elementary divisors (p-power diagonal).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput, NonUnit, ProfileMismatch, SingularModP


def _check_modulus(p: int, N: int) -> None:
    if p < 3 or N < 1:
        raise InvalidInput(f"need an odd prime p >= 3 and N >= 1, got p={p}, N={N}")


def pval(x: int, p: int, N: int) -> int:
    """p-adic valuation of a residue mod p^N; val(0) = N."""
    if x == 0:
        return N
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class PScalar:
    """A canonical residue mod p^N."""

    value: int
    p: int
    N: int

    def __post_init__(self) -> None:
        _check_modulus(self.p, self.N)
        object.__setattr__(self, "value", self.value % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _same(self, other: "PScalar") -> None:
        if (self.p, self.N) != (other.p, other.N):
            raise ProfileMismatch(
                f"mixed moduli: {self.p}^{self.N} vs {other.p}^{other.N}"
            )

    def __add__(self, other: "PScalar") -> "PScalar":
        self._same(other)
        return PScalar(self.value + other.value, self.p, self.N)

    def __sub__(self, other: "PScalar") -> "PScalar":
        self._same(other)
        return PScalar(self.value - other.value, self.p, self.N)

    def __mul__(self, other: "PScalar") -> "PScalar":
        self._same(other)
        return PScalar(self.value * other.value, self.p, self.N)

    def is_unit(self) -> bool:
        return self.value % self.p != 0


def scalar_inverse(a: PScalar) -> PScalar:
    """Inverse of a unit mod p^N."""
    if not a.is_unit():
        raise NonUnit(f"{a.value} is divisible by {a.p}")
    return PScalar(pow(a.value, -1, a.modulus), a.p, a.N)


def inv_mod(x: int, p: int, N: int) -> int:
    """Inverse of a unit residue, plain-int form."""
    if x % p == 0:
        raise NonUnit(f"{x} is divisible by {p}")
    return pow(x, -1, p**N)


def teichmueller_lift(a: int, p: int, N: int) -> PScalar:
    """The (p-1)-th root of unity congruent to a mod p.

    Computed by iterating x -> x^p, which stabilizes in at most N steps.
    """
    _check_modulus(p, N)
    if a % p == 0:
        raise InvalidInput("Teichmueller lift needs a nonzero residue mod p")
    pn = p**N
    x = a % pn
    for _ in range(N + 1):
        y = pow(x, p, pn)
        if y == x:
            return PScalar(x, p, N)
        x = y
    raise AssertionError("Teichmueller iteration failed to stabilize in N steps")


def teichmueller_lifts(p: int, N: int) -> tuple[int, ...]:
    """All lifts omega_a for a = 1..p-1, as plain residues."""
    return tuple(teichmueller_lift(a, p, N).value for a in range(1, p))


@dataclass(frozen=True)
class PMatrix:
    """A rows x cols matrix over Z/p^N, entries row-major canonical residues."""

    rows: int
    cols: int
    entries: tuple[int, ...]
    p: int
    N: int

    def __post_init__(self) -> None:
        _check_modulus(self.p, self.N)
        if len(self.entries) != self.rows * self.cols:
            raise InvalidInput("entry count does not match dimensions")
        pn = self.p**self.N
        object.__setattr__(self, "entries", tuple(e % pn for e in self.entries))

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def _same(self, other: "PMatrix") -> None:
        if (self.p, self.N) != (other.p, other.N):
            raise ProfileMismatch("mixed moduli in matrix operation")

    @staticmethod
    def identity(n: int, p: int, N: int) -> "PMatrix":
        ents = [0] * (n * n)
        for i in range(n):
            ents[i * n + i] = 1
        return PMatrix(n, n, tuple(ents), p, N)

    @staticmethod
    def from_lists(rows: list[list[int]], p: int, N: int) -> "PMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise InvalidInput("ragged matrix")
        return PMatrix(r, c, tuple(x for row in rows for x in row), p, N)

    def mul(self, other: "PMatrix") -> "PMatrix":
        self._same(other)
        if self.cols != other.rows:
            raise InvalidInput("dimension mismatch in matrix product")
        pn = self.modulus
        out = [0] * (self.rows * other.cols)
        for i in range(self.rows):
            base = i * self.cols
            for k in range(self.cols):
                aik = self.entries[base + k]
                if aik == 0:
                    continue
                obase = k * other.cols
                rbase = i * other.cols
                for j in range(other.cols):
                    out[rbase + j] = (out[rbase + j] + aik * other.entries[obase + j]) % pn
        return PMatrix(self.rows, other.cols, tuple(out), self.p, self.N)

    def add(self, other: "PMatrix") -> "PMatrix":
        self._same(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InvalidInput("dimension mismatch in matrix sum")
        return PMatrix(
            self.rows,
            self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
            self.p,
            self.N,
        )

    def scale(self, c: int) -> "PMatrix":
        return PMatrix(
            self.rows, self.cols, tuple(c * e for e in self.entries), self.p, self.N
        )

    def transpose(self) -> "PMatrix":
        ents = tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        return PMatrix(self.cols, self.rows, ents, self.p, self.N)

    def matvec(self, v: list[int]) -> list[int]:
        pn = self.modulus
        return [
            sum(self.at(i, j) * v[j] for j in range(self.cols)) % pn
            for i in range(self.rows)
        ]

    def kron(self, other: "PMatrix") -> "PMatrix":
        self._same(other)
        r, c = self.rows * other.rows, self.cols * other.cols
        ents = [0] * (r * c)
        for i1 in range(self.rows):
            for j1 in range(self.cols):
                a = self.at(i1, j1)
                if a == 0:
                    continue
                for i2 in range(other.rows):
                    for j2 in range(other.cols):
                        ents[(i1 * other.rows + i2) * c + (j1 * other.cols + j2)] = (
                            a * other.at(i2, j2)
                        ) % self.modulus
        return PMatrix(r, c, tuple(ents), self.p, self.N)

    @staticmethod
    def block_diag(a: "PMatrix", b: "PMatrix") -> "PMatrix":
        a._same(b)
        r, c = a.rows + b.rows, a.cols + b.cols
        ents = [0] * (r * c)
        for i in range(a.rows):
            for j in range(a.cols):
                ents[i * c + j] = a.at(i, j)
        for i in range(b.rows):
            for j in range(b.cols):
                ents[(a.rows + i) * c + (a.cols + j)] = b.at(i, j)
        return PMatrix(r, c, tuple(ents), a.p, a.N)

    def is_unit_matrix(self) -> bool:
        """True iff the matrix is square and invertible mod p."""
        if self.rows != self.cols:
            return False
        try:
            matrix_inverse_mod(self)
            return True
        except SingularModP:
            return False


def matrix_inverse_mod(A: PMatrix) -> PMatrix:
    """Inverse of a matrix with unit determinant mod p, exact mod p^N."""
    if A.rows != A.cols:
        raise InvalidInput("inverse needs a square matrix")
    n = A.rows
    pn = A.modulus
    work = [list(A.row(i)) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] % A.p != 0), None)
        if piv is None:
            raise SingularModP("matrix is singular mod p")
        work[col], work[piv] = work[piv], work[col]
        inv = pow(work[col][col], -1, pn)
        work[col] = [(x * inv) % pn for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [(x - f * y) % pn for x, y in zip(work[r], work[col])]
    ents = tuple(work[i][n + j] for i in range(n) for j in range(n))
    return PMatrix(n, n, ents, A.p, A.N)


def _howell_rows(rows: list[list[int]], p: int, N: int) -> list[list[int]]:
    """Howell form of the span of the given rows, as a list of pivot rows."""
    pn = p**N
    m = len(rows[0]) if rows else 0
    work = [[x % pn for x in r] for r in rows if any(x % pn for x in r)]
    pivots: list[tuple[int, int, list[int]]] = []  # (col, val, row)
    for col in range(m):
        best = None
        bestval = N
        for idx, r in enumerate(work):
            v = pval(r[col], p, N)
            if v < bestval:
                bestval, best = v, idx
        if best is None:
            continue
        row = work.pop(best)
        unit = row[col] // p**bestval
        inv = pow(unit, -1, pn)
        row = [(x * inv) % pn for x in row]  # pivot becomes p^bestval
        piv = row[col]
        for r in work:
            if r[col]:
                f = (r[col] // p**bestval) % pn
                for j in range(col, m):
                    r[j] = (r[j] - f * row[j]) % pn
        # Howell closure: the p^(N-val)-shadow of the pivot row re-enters the pool
        if bestval > 0:
            shadow = [(x * p ** (N - bestval)) % pn for x in row]
            if any(shadow):
                work.append(shadow)
        work = [r for r in work if any(r)]
        pivots.append((col, bestval, row))
    # reduce entries above each pivot
    for k, (col, val, _) in enumerate(pivots):
        pk = p**val
        for j in range(k):
            r = pivots[j][2]
            if r[col] % pk:
                f = r[col] // pk
                for t in range(col, m):
                    r[t] = (r[t] - f * pivots[k][2][t]) % pn
    return [row for (_, _, row) in pivots]


def howell_form(A: PMatrix) -> PMatrix:
    """Canonical Howell form of the row span of A (zero rows dropped)."""
    rows = _howell_rows(A.to_lists(), A.p, A.N)
    if not rows:
        return PMatrix(0, A.cols, (), A.p, A.N)
    return PMatrix.from_lists(rows, A.p, A.N)


def howell_kernel(A: PMatrix) -> PMatrix:
    """Canonical generating set (rows) of {x : A x = 0 mod p^N}.

    Computed as the Howell form of [A^T | I]: rows whose A^T-part vanished
    carry kernel generators in their identity part, and the Howell closure
    guarantees every kernel element is a combination of the returned rows.
    """
    n, m = A.rows, A.cols
    pn = A.modulus
    aug = []
    for j in range(m):
        row = [A.at(i, j) % pn for i in range(n)] + [0] * m
        row[n + j] = 1
        aug.append(row)
    reduced = _howell_rows(aug, A.p, A.N)
    gens = [r[n:] for r in reduced if not any(r[:n])]
    gens = _howell_rows(gens, A.p, A.N) if gens else []
    if not gens:
        return PMatrix(0, m, (), A.p, A.N)
    return PMatrix.from_lists(gens, A.p, A.N)


def howell_member(H: PMatrix, v: list[int]) -> bool:
    """Decide membership of v in the row span of a Howell form H."""
    pn = H.modulus
    res = [x % pn for x in v]
    for i in range(H.rows):
        row = H.row(i)
        col = next(j for j in range(H.cols) if row[j])
        piv = row[col]
        pv = pval(piv, H.p, H.N)
        if res[col]:
            if pval(res[col], H.p, H.N) < pv:
                return False
            f = res[col] // H.p**pv
            for j in range(col, H.cols):
                res[j] = (res[j] - f * row[j]) % pn
    return not any(res)


def smith_elementary_divisors(A: PMatrix) -> list[int]:
    """p-valuations of the Smith elementary divisors of A over Z/p^N.

    Returns a list of length min(rows, cols); entries N stand for divisors
    that vanish mod p^N.
    """
    pn = A.modulus
    work = A.to_lists()
    n, m = A.rows, A.cols
    divisors: list[int] = []
    top = 0
    while top < min(n, m):
        best, bestval = None, A.N
        for i in range(top, n):
            for j in range(top, m):
                v = pval(work[i][j], A.p, A.N)
                if v < bestval:
                    bestval, best = v, (i, j)
        if best is None:
            divisors.extend([A.N] * (min(n, m) - top))
            break
        bi, bj = best
        work[top], work[bi] = work[bi], work[top]
        for row in work:
            row[top], row[bj] = row[bj], row[top]
        inv = pow(work[top][top] // A.p**bestval, -1, pn)
        work[top] = [(x * inv) % pn for x in work[top]]
        piv = A.p**bestval
        for i in range(top + 1, n):
            if work[i][top]:
                f = work[i][top] // piv
                work[i] = [(x - f * y) % pn for x, y in zip(work[i], work[top])]
        for j in range(top + 1, m):
            if work[top][j]:
                f = work[top][j] // piv
                for i in range(top, n):
                    work[i][j] = (work[i][j] - f * work[i][top]) % pn
        divisors.append(bestval)
        top += 1
    return divisors
