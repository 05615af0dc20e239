"""The p-adic Grassmannian Gr(i, Z_p^d).

A point is a submodule N of M = Z_p^d with M/N free of rank i, stored by a
d x (d-i) generator matrix.  Coordinates are 0-based throughout: the chart
subset W is a sorted tuple of row indices in range(d).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Any, Sequence

from .errors import EnumerationTooLarge, PrecisionError, SchemaError, ShapeError
from .padic import (
    CounterStream,
    PadicMatrix,
    check_precision,
    check_prime,
    in_span,
    integer_det,
    sample_gl,
)

ENUMERATION_LIMIT = 10**6


def gaussian_binomial(d: int, i: int, p: int) -> int:
    """Number of i-dimensional subspaces of F_p^d."""
    if i < 0 or i > d:
        return 0
    num = den = 1
    for k in range(i):
        num *= p ** (d - k) - 1
        den *= p ** (k + 1) - 1
    return num // den


def level_count(d: int, i: int, p: int, n: int) -> int:
    """Number of points of Gr(i, (Z/p^n)^d), for n >= 1."""
    return gaussian_binomial(d, i, p) * p ** ((n - 1) * i * (d - i))


def measure_ball_exact(d: int, i: int, n: int, p: int) -> Fraction:
    """Haar measure (total mass 1) of a neighbourhood V_n(N_0)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    return Fraction(1, level_count(d, i, p, n))


@dataclass(frozen=True)
class ChartCoordinate:
    """Chart U_W: N is spanned by e_w + sum_j A[j, w] e_j over w in W, j not in W.

    Rows of ``A`` follow the sorted complement of W, columns follow W.
    """

    W: tuple[int, ...]
    A: PadicMatrix

    def __post_init__(self) -> None:
        d = self.A.nrows + self.A.ncols
        if len(self.W) != self.A.ncols:
            raise ShapeError("|W| must equal the number of columns of A")
        if tuple(sorted(set(self.W))) != tuple(self.W) or any(not 0 <= w < d for w in self.W):
            raise ShapeError("W must be a sorted subset of range(d)")

    @property
    def d(self) -> int:
        return self.A.nrows + self.A.ncols

    @property
    def i(self) -> int:
        return self.A.nrows

    def complement(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.d) if j not in self.W)

    def to_dict(self) -> dict[str, Any]:
        return {"W": list(self.W), "A": self.A.to_list()}

    @classmethod
    def from_dict(cls, obj: dict[str, Any], d: int, p: int, a: int) -> "ChartCoordinate":
        try:
            W = tuple(int(w) for w in obj["W"])
            return cls(W, PadicMatrix.from_rows(obj["A"], p, a, ncols=len(W)))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad chart coordinate: {exc}") from exc


@dataclass(frozen=True)
class GrassmannPoint:
    d: int
    i: int
    generators: PadicMatrix

    def __post_init__(self) -> None:
        if not 1 <= self.i <= self.d:
            raise ValueError("need 1 <= i <= d")
        if self.generators.shape != (self.d, self.d - self.i):
            raise ShapeError(f"generators must be {self.d}x{self.d - self.i}")
        if _unit_minor_rows(self.generators) is None:
            raise ValueError("M/N is not free of rank i: no unit maximal minor")

    @classmethod
    def _trusted(cls, d: int, i: int, generators: PadicMatrix) -> "GrassmannPoint":
        # skips the unit-minor check for callers that guarantee it
        obj = object.__new__(cls)
        obj.__dict__.update(d=d, i=i, generators=generators)
        return obj

    @property
    def p(self) -> int:
        return self.generators.p

    @property
    def a(self) -> int:
        return self.generators.a

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], d: int, p: int, a: int) -> "GrassmannPoint":
        G = PadicMatrix.from_columns(cols, p, a, nrows=d)
        return cls(d, d - G.ncols, G)

    def transform(self, g: PadicMatrix) -> "GrassmannPoint":
        return GrassmannPoint(self.d, self.i, g @ self.generators)

    def canonical(self) -> "GrassmannPoint":
        return from_chart(to_chart(self))

    @cached_property
    def chart(self) -> ChartCoordinate:
        return _compute_chart(self)

    def reduce(self, n: int) -> "GrassmannPoint":
        return GrassmannPoint._trusted(self.d, self.i, self.generators.reduce(n))

    def lift(self, a: int) -> "GrassmannPoint":
        return GrassmannPoint(self.d, self.i, self.generators.lift(a))

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "i": self.i,
            "p": self.p,
            "a": self.a,
            "generators": self.generators.to_list(),
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "GrassmannPoint":
        try:
            d, i, p, a = (int(obj[k]) for k in ("d", "i", "p", "a"))
            G = PadicMatrix.from_rows(obj["generators"], p, a, ncols=d - i)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad Grassmann point: {exc}") from exc
        return cls(d, i, G)


def _unit_minor_rows(G: PadicMatrix) -> tuple[int, ...] | None:
    """Lexicographically first row subset whose square minor is a unit."""
    k = G.ncols
    for W in itertools.combinations(range(G.nrows), k):
        if integer_det([G.data[r] for r in W]) % G.p:
            return W
    return None


def from_chart(c: ChartCoordinate) -> GrassmannPoint:
    d, W, comp = c.d, c.W, c.complement()
    A = c.A
    rows = [[0] * len(W) for _ in range(d)]
    for col, w in enumerate(W):
        rows[w][col] = 1
    for r, j in enumerate(comp):
        for col in range(len(W)):
            rows[j][col] = A.data[r][col]
    G = PadicMatrix.from_rows(rows, A.p, A.a, ncols=len(W))
    return GrassmannPoint._trusted(d, c.i, G)


def to_chart(N: GrassmannPoint) -> ChartCoordinate:
    """Chart in the lexicographically first W with a unit minor."""
    return N.chart


def _compute_chart(N: GrassmannPoint) -> ChartCoordinate:
    G = N.generators
    W = _unit_minor_rows(G)
    assert W is not None  # guaranteed by the point invariant
    comp = tuple(j for j in range(N.d) if j not in W)
    if G.ncols == 1:
        q = G.modulus
        u = pow(G.data[W[0]][0], -1, q)
        A = PadicMatrix._raw(G.p, G.a, len(comp), 1, tuple((G.data[j][0] * u % q,) for j in comp))
    else:
        A = G.select_rows(comp) @ G.select_rows(W).inverse()
    return ChartCoordinate(W, A)


def same_point(N1: GrassmannPoint, N2: GrassmannPoint) -> bool:
    """Equality as submodules at precision (mutual containment)."""
    if (N1.d, N1.i, N1.p, N1.a) != (N2.d, N2.i, N2.p, N2.a):
        raise ValueError("points live in different Grassmannians")
    G1, G2 = N1.generators, N2.generators
    return all(in_span(G2, v) for v in G1.columns()) and all(
        in_span(G1, v) for v in G2.columns()
    )


def standard_point(d: int, i: int, p: int, a: int) -> GrassmannPoint:
    """N_0 = <e_1, ..., e_{d-i}>."""
    I = PadicMatrix.identity(d, p, a)
    return GrassmannPoint(d, i, I.select_columns(range(d - i)))


def sample_haar(d: int, i: int, p: int, a: int, rng: CounterStream) -> GrassmannPoint:
    """g(N_0) for a Haar-random g in GL_d."""
    if not 1 <= i <= d:
        raise ValueError("need 1 <= i <= d")
    g = sample_gl(d, p, a, rng)
    return GrassmannPoint._trusted(d, i, g.select_columns(range(d - i)))


def in_neighborhood(N: GrassmannPoint, N0: GrassmannPoint, n: int) -> bool:
    """Whether N lies in V_n(N0), i.e. N is contained in N0 + p^n M."""
    if n > min(N.a, N0.a):
        raise PrecisionError(f"level {n} exceeds the precision")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return True
    # N0 = {x : x_comp = A0 x_W}, so v is in N0 + p^n M iff v_comp ≡ A0 v_W (mod p^n)
    c0 = to_chart(N0)
    q = N0.p**n
    W, comp, A0 = c0.W, c0.complement(), c0.A.data
    for v in N.generators.columns():
        vW = [v[w] for w in W]
        for r, j in enumerate(comp):
            if (v[j] - sum(x * y for x, y in zip(A0[r], vW))) % q:
                return False
    return True


def enumerate_finite(
    d: int, i: int, p: int, n: int, limit: int = ENUMERATION_LIMIT
) -> list[GrassmannPoint]:
    """All points of Gr(i, (Z/p^n)^d), each once, in canonical chart form."""
    check_prime(p)
    check_precision(n)
    if not 1 <= i <= d:
        raise ValueError("need 1 <= i <= d")
    expected = level_count(d, i, p, n)
    if expected > limit:
        raise EnumerationTooLarge(f"{expected} classes exceed the limit {limit}")
    k = d - i
    q = p**n
    subsets = list(itertools.combinations(range(d), k))
    out: list[GrassmannPoint] = []
    for idx, W in enumerate(subsets):
        earlier = subsets[:idx]
        comp = tuple(j for j in range(d) if j not in W)
        for flat in itertools.product(range(q), repeat=i * k):
            rows = [[0] * k for _ in range(d)]
            for col, w in enumerate(W):
                rows[w][col] = 1
            for r, j in enumerate(comp):
                rows[j] = list(flat[r * k:(r + 1) * k])
            # canonical iff no earlier W already has a unit minor
            if any(integer_det([rows[r] for r in W2]) % p for W2 in earlier):
                continue
            G = PadicMatrix._raw(p, n, d, k, tuple(tuple(r) for r in rows))
            out.append(GrassmannPoint._trusted(d, i, G))
    return out


def shear(B: PadicMatrix, C: PadicMatrix) -> tuple[PadicMatrix, PadicMatrix]:
    """(B, C) -> (B', C) with B' = [B1; B2 - C·B1], where B1 is the top block of B.

    B1 has as many rows as C has columns.
    """
    top = C.ncols
    if top > B.nrows or C.nrows != B.nrows - top:
        raise ShapeError(
            f"shear needs B with {C.ncols} + {C.nrows} rows, got {B.nrows}"
        )
    B1 = B.select_rows(range(top))
    B2 = B.select_rows(range(top, B.nrows))
    return B1.vstack(B2 - C @ B1), C


def basis_completion(N: GrassmannPoint) -> PadicMatrix:
    """A matrix in GL_d whose first d-i columns generate N."""
    c = to_chart(N)
    G = from_chart(c).generators
    I = PadicMatrix.identity(N.d, N.p, N.a)
    return G.hstack(I.select_columns(c.complement()))


def transport(N: GrassmannPoint, N2: GrassmannPoint) -> PadicMatrix:
    """Some g in GL_d with g(N) = N2."""
    if (N.d, N.i, N.p, N.a) != (N2.d, N2.i, N2.p, N2.a):
        raise ValueError("points live in different Grassmannians")
    return basis_completion(N2) @ basis_completion(N).inverse()
