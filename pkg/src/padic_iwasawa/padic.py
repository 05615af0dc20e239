"""Fixed-precision arithmetic on Z_p.

Elements of Z_p are stored as residues modulo p^a.  "Zero" always means zero
at precision p^a, and ranks computed here are ranks at precision: a lower
bound for the rank of any exact lift.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import isprime

from .errors import NotInvertibleError, PrecisionError, ShapeError


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise ValueError(f"p must be a prime, got {p!r}")
    return p


def check_precision(a: int) -> int:
    if not isinstance(a, int) or a < 1:
        raise PrecisionError(f"precision must be a positive integer, got {a!r}")
    return a


def int_valuation(x: int, p: int, cap: int) -> int:
    """Valuation of the integer x, capped at ``cap`` (also returned for x = 0)."""
    if x == 0:
        return cap
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Random streams


class CounterStream:
    """Deterministic random stream keyed by ``(seed, index)``.

    Block ``k`` of the stream is ``blake2b(seed:index:k)``, so a stream depends
    only on its key and never on how many other streams were drawn before it.
    Monte Carlo loops use one stream per sample index.
    """

    __slots__ = ("seed", "index", "_key", "_block", "_buf", "_nbits")

    def __init__(self, seed: int, index: int = 0) -> None:
        self.seed = int(seed)
        self.index = int(index)
        self._key = b"%d:%d:" % (self.seed, self.index)
        self._block = 0
        self._buf = 0
        self._nbits = 0

    def getrandbits(self, k: int) -> int:
        while self._nbits < k:
            digest = hashlib.blake2b(
                self._key + self._block.to_bytes(8, "little"), digest_size=64
            ).digest()
            self._block += 1
            self._buf |= int.from_bytes(digest, "little") << self._nbits
            self._nbits += 512
        r = self._buf & ((1 << k) - 1)
        self._buf >>= k
        self._nbits -= k
        return r

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on bit strings."""
        if n <= 0:
            raise ValueError("n must be positive")
        k = n.bit_length()
        r = self.getrandbits(k)
        while r >= n:
            r = self.getrandbits(k)
        return r

    def randrange(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo)


def stream(seed: int, index: int = 0) -> CounterStream:
    return CounterStream(seed, index)


# ---------------------------------------------------------------------------
# Scalars


@dataclass(frozen=True)
class PadicScalar:
    p: int
    a: int
    residue: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        check_precision(self.a)
        if not 0 <= self.residue < self.p**self.a:
            raise ValueError("residue must lie in [0, p^a)")

    @classmethod
    def of(cls, value: int, p: int, a: int) -> "PadicScalar":
        return cls(p, a, value % p**a)

    @property
    def modulus(self) -> int:
        return self.p**self.a

    def valuation(self) -> int:
        return int_valuation(self.residue, self.p, self.a)

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def is_zero(self) -> bool:
        return self.residue == 0

    def signed(self) -> int:
        """Representative in (-p^a/2, p^a/2]."""
        q = self.modulus
        return self.residue - q if self.residue > q // 2 else self.residue

    def _coerce(self, other: "PadicScalar | int") -> int:
        if isinstance(other, PadicScalar):
            if (other.p, other.a) != (self.p, self.a):
                raise PrecisionError("scalars at different (p, a)")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented  # type: ignore[return-value]

    def _new(self, value: int) -> "PadicScalar":
        return PadicScalar(self.p, self.a, value % self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self) -> "PadicScalar":
        return self._new(-self.residue)

    def __pow__(self, k: int) -> "PadicScalar":
        if k < 0:
            return self.inverse() ** (-k)
        return self._new(pow(self.residue, k, self.modulus))

    def inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise NotInvertibleError(f"{self.residue} is not a unit mod {self.p}")
        return self._new(pow(self.residue, -1, self.modulus))

    def reduce(self, n: int) -> "PadicScalar":
        """Image at the lower precision n <= a."""
        if not 1 <= n <= self.a:
            raise PrecisionError(f"cannot reduce precision {self.a} to {n}")
        return PadicScalar(self.p, n, self.residue % self.p**n)

    def __int__(self) -> int:
        return self.residue


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class PadicMatrix:
    """Matrix over Z/p^a.  Entries are stored as residues, row-major.

    Zero-column (or zero-row) shapes are allowed; they show up naturally, for
    instance as the generator matrix of the zero submodule.
    """

    p: int
    a: int
    nrows: int
    ncols: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        check_prime(self.p)
        check_precision(self.a)
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ShapeError("entry grid does not match the declared shape")

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, p: int, a: int, nrows: int, ncols: int, data: tuple) -> "PadicMatrix":
        # trusted internal constructor: entries already reduced, shape consistent
        obj = object.__new__(cls)
        obj.__dict__.update(p=p, a=a, nrows=nrows, ncols=ncols, data=data)
        return obj

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], p: int, a: int, ncols: int | None = None
    ) -> "PadicMatrix":
        q = p**a
        data = tuple(tuple(int(x) % q for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ShapeError("ncols is required for a matrix without rows")
            ncols = len(data[0])
        return cls(p, a, len(data), ncols, data)

    @classmethod
    def from_columns(
        cls, cols: Sequence[Sequence[int]], p: int, a: int, nrows: int | None = None
    ) -> "PadicMatrix":
        cols = [list(c) for c in cols]
        if nrows is None:
            if not cols:
                raise ShapeError("nrows is required for a matrix without columns")
            nrows = len(cols[0])
        if any(len(c) != nrows for c in cols):
            raise ShapeError("columns of different lengths")
        rows = [[c[r] for c in cols] for r in range(nrows)]
        return cls.from_rows(rows, p, a, ncols=len(cols))

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: int, a: int) -> "PadicMatrix":
        return cls(p, a, nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int, p: int, a: int) -> "PadicMatrix":
        return cls(p, a, n, n, tuple(tuple(int(r == c) for c in range(n)) for r in range(n)))

    @classmethod
    def diagonal(cls, entries: Sequence[int], p: int, a: int) -> "PadicMatrix":
        n = len(entries)
        return cls.from_rows(
            [[entries[r] if r == c else 0 for c in range(n)] for r in range(n)], p, a, ncols=n
        )

    # access -------------------------------------------------------------

    @property
    def modulus(self) -> int:
        return self.p**self.a

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        r, c = idx
        return self.data[r][c]

    def entry(self, r: int, c: int) -> PadicScalar:
        return PadicScalar(self.p, self.a, self.data[r][c])

    def column(self, c: int) -> tuple[int, ...]:
        return tuple(row[c] for row in self.data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(c) for c in range(self.ncols)]

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    # structure ----------------------------------------------------------

    def _like(self, rows: Iterable[Iterable[int]], ncols: int) -> "PadicMatrix":
        q = self.modulus
        data = tuple(tuple(x % q for x in r) for r in rows)
        return PadicMatrix._raw(self.p, self.a, len(data), ncols, data)

    def _check_same_ring(self, other: "PadicMatrix") -> None:
        if (self.p, self.a) != (other.p, other.a):
            raise PrecisionError("matrices at different (p, a)")

    @property
    def T(self) -> "PadicMatrix":
        return PadicMatrix._raw(
            self.p, self.a, self.ncols, self.nrows,
            tuple(tuple(self.data[r][c] for r in range(self.nrows)) for c in range(self.ncols)),
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PadicMatrix":
        return PadicMatrix._raw(
            self.p, self.a, len(rows), len(cols),
            tuple(tuple(self.data[r][c] for c in cols) for r in rows),
        )

    def select_columns(self, cols: Sequence[int]) -> "PadicMatrix":
        return self.submatrix(range(self.nrows), cols)

    def select_rows(self, rows: Sequence[int]) -> "PadicMatrix":
        return self.submatrix(rows, range(self.ncols))

    def hstack(self, *others: "PadicMatrix") -> "PadicMatrix":
        rows = [list(r) for r in self.data]
        ncols = self.ncols
        for o in others:
            self._check_same_ring(o)
            if o.nrows != self.nrows:
                raise ShapeError("hstack needs equal row counts")
            for r, orow in zip(rows, o.data):
                r.extend(orow)
            ncols += o.ncols
        return PadicMatrix(self.p, self.a, self.nrows, ncols, tuple(tuple(r) for r in rows))

    def vstack(self, *others: "PadicMatrix") -> "PadicMatrix":
        data = list(self.data)
        for o in others:
            self._check_same_ring(o)
            if o.ncols != self.ncols:
                raise ShapeError("vstack needs equal column counts")
            data.extend(o.data)
        return PadicMatrix(self.p, self.a, len(data), self.ncols, tuple(data))

    def reduce(self, n: int) -> "PadicMatrix":
        """Image at the lower precision n <= a."""
        if not 1 <= n <= self.a:
            raise PrecisionError(f"cannot reduce precision {self.a} to {n}")
        q = self.p**n
        return PadicMatrix._raw(
            self.p, n, self.nrows, self.ncols, tuple(tuple(x % q for x in r) for r in self.data)
        )

    def lift(self, a: int) -> "PadicMatrix":
        """Reinterpret the stored residues at another precision (canonical lift)."""
        return PadicMatrix.from_rows(self.data, self.p, a, ncols=self.ncols)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check_same_ring(other)
        if self.shape != other.shape:
            raise ShapeError("shapes differ")
        return self._like(
            ((x + y for x, y in zip(r, s)) for r, s in zip(self.data, other.data)), self.ncols
        )

    def __sub__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check_same_ring(other)
        if self.shape != other.shape:
            raise ShapeError("shapes differ")
        return self._like(
            ((x - y for x, y in zip(r, s)) for r, s in zip(self.data, other.data)), self.ncols
        )

    def __neg__(self) -> "PadicMatrix":
        return self._like(((-x for x in r) for r in self.data), self.ncols)

    def scale(self, c: int) -> "PadicMatrix":
        return self._like(((c * x for x in r) for r in self.data), self.ncols)

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check_same_ring(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return self._like(
            ((sum(x * y for x, y in zip(r, c)) for c in cols) for r in self.data), other.ncols
        )

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise ShapeError("vector length does not match")
        q = self.modulus
        return tuple(sum(x * y for x, y in zip(r, v)) % q for r in self.data)

    def det(self) -> PadicScalar:
        if self.nrows != self.ncols:
            raise ShapeError("determinant of a non-square matrix")
        return PadicScalar(self.p, self.a, integer_det(self.data) % self.modulus)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and integer_det(self.data) % self.p != 0

    def inverse(self) -> "PadicMatrix":
        """Gauss-Jordan inverse with unit pivots."""
        n = self.nrows
        if n != self.ncols:
            raise ShapeError("inverse of a non-square matrix")
        p, q = self.p, self.modulus
        m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self.data)]
        for k in range(n):
            piv = next((r for r in range(k, n) if m[r][k] % p), None)
            if piv is None:
                raise NotInvertibleError("matrix is not invertible over Z_p")
            m[k], m[piv] = m[piv], m[k]
            inv = pow(m[k][k], -1, q)
            m[k] = [x * inv % q for x in m[k]]
            for r in range(n):
                if r != k and m[r][k]:
                    f = m[r][k]
                    m[r] = [(x - f * y) % q for x, y in zip(m[r], m[k])]
        return PadicMatrix._raw(self.p, self.a, n, n, tuple(tuple(r[n:]) for r in m))


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """U·A·V = diag(p^v_1, ..., p^v_r) with r = min(rows, cols).

    A valuation equal to the precision ``a`` stands for a zero diagonal entry.
    """

    diagonal_valuations: tuple[int, ...]
    left_transform: PadicMatrix
    right_transform: PadicMatrix

    @property
    def precision(self) -> int:
        return self.left_transform.a

    @property
    def rank(self) -> int:
        return sum(1 for v in self.diagonal_valuations if v < self.precision)


def valuation(x: PadicScalar) -> int:
    return x.valuation()


def smith_normal_form(A: PadicMatrix) -> SmithForm:
    """Smith form by valuation pivoting.

    At each step the pivot is an entry of least valuation in the remaining
    block; ties go to the smallest (row, col) in row-major order.
    """
    p, a, q = A.p, A.a, A.modulus
    m, n = A.nrows, A.ncols
    M = [list(r) for r in A.data]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    vals: list[int] = []
    r = min(m, n)
    for k in range(r):
        best = None
        for i in range(k, m):
            row = M[i]
            for j in range(k, n):
                x = row[j]
                if x:
                    v = int_valuation(x, p, a)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            vals.extend([a] * (r - k))
            break
        v, i, j = best
        if i != k:
            M[k], M[i] = M[i], M[k]
            U[k], U[i] = U[i], U[k]
        if j != k:
            for row in M:
                row[k], row[j] = row[j], row[k]
            for row in V:
                row[k], row[j] = row[j], row[k]
        pv = p**v
        uinv = pow(M[k][k] // pv, -1, q)
        M[k] = [x * uinv % q for x in M[k]]
        U[k] = [x * uinv % q for x in U[k]]
        for i2 in range(m):
            if i2 != k and M[i2][k]:
                f = M[i2][k] // pv
                M[i2] = [(x - f * y) % q for x, y in zip(M[i2], M[k])]
                U[i2] = [(x - f * y) % q for x, y in zip(U[i2], U[k])]
        for j2 in range(k + 1, n):
            if M[k][j2]:
                f = M[k][j2] // pv
                M[k][j2] = 0
                for row in V:
                    row[j2] = (row[j2] - f * row[k]) % q
        vals.append(v)
    return SmithForm(
        tuple(vals),
        PadicMatrix._raw(p, a, m, m, tuple(tuple(r_) for r_ in U)),
        PadicMatrix._raw(p, a, n, n, tuple(tuple(r_) for r_ in V)),
    )


def rank_at_precision(A: PadicMatrix) -> int:
    """Number of Smith valuations below a.

    This is a lower bound for the Z_p-rank of every exact lift of A.
    """
    return smith_normal_form(A).rank


def solve(A: PadicMatrix, b: Sequence[int], n: int | None = None) -> tuple[int, ...] | None:
    """Some x with A·x ≡ b (mod p^n), or None if there is none.  n defaults to a."""
    if n is None:
        n = A.a
    if len(b) != A.nrows:
        raise ShapeError("right-hand side has the wrong length")
    if A.ncols == 0:
        return () if all(x % A.p**n == 0 for x in b) else None
    if A.nrows == 0:
        return (0,) * A.ncols
    An = A.reduce(n)
    q = An.modulus
    sf = smith_normal_form(An)
    c = sf.left_transform.apply([x % q for x in b])
    y = [0] * A.ncols
    for k, ck in enumerate(c):
        if k < len(sf.diagonal_valuations):
            v = sf.diagonal_valuations[k]
            if v >= n:
                if ck:
                    return None
                continue
            if int_valuation(ck, A.p, n) < v:
                return None
            y[k] = ck // A.p**v
        elif ck:
            return None
    return sf.right_transform.apply(y)


def in_span(G: PadicMatrix, v: Sequence[int], n: int | None = None) -> bool:
    return solve(G, v, n) is not None


def saturated_kernel(A: PadicMatrix) -> PadicMatrix:
    """Columns spanning the free part of ker(A) at precision.

    These are the columns of V in positions whose Smith entry is zero at
    precision, plus the positions beyond min(rows, cols).  Torsion solutions
    such as p^(a-v)·(something) are deliberately left out.
    """
    return saturated_kernel_with_loss(A)[0]


def saturated_kernel_with_loss(A: PadicMatrix) -> tuple[PadicMatrix, int]:
    """saturated_kernel(A) and the precision it is good to.

    Every kernel vector agrees with an exact kernel vector of any lift of A
    modulo p^(a - loss), where loss is the largest Smith valuation below a.
    """
    sf = smith_normal_form(A)
    V = sf.right_transform
    keep = [k for k, v in enumerate(sf.diagonal_valuations) if v >= A.a]
    keep += list(range(len(sf.diagonal_valuations), A.ncols))
    loss = max((v for v in sf.diagonal_valuations if v < A.a), default=0)
    return V.select_columns(keep), loss


# ---------------------------------------------------------------------------
# Haar sampling on GL_d


def gl_acceptance_probability(d: int, p: int) -> Fraction:
    """|GL_d(F_p)| / p^(d^2) = prod_{k=1..d} (1 - p^-k)."""
    out = Fraction(1)
    for k in range(1, d + 1):
        out *= 1 - Fraction(1, p**k)
    return out


def sample_gl_counted(d: int, p: int, a: int, rng: CounterStream) -> tuple[PadicMatrix, int]:
    """Haar-uniform element of GL_d(Z/p^a) and the number of draws it took."""
    if d < 1:
        raise ValueError("d must be at least 1")
    check_prime(p)
    check_precision(a)
    q = p**a
    attempts = 0
    while True:
        attempts += 1
        rows = tuple(tuple(rng.randbelow(q) for _ in range(d)) for _ in range(d))
        if integer_det(rows) % p:
            return PadicMatrix._raw(p, a, d, d, rows), attempts


def sample_gl(d: int, p: int, a: int, rng: CounterStream) -> PadicMatrix:
    """Uniform element of GL_d(Z/p^a): uniform entries, rejected unless det is a unit."""
    return sample_gl_counted(d, p, a, rng)[0]
