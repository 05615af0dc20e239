"""Genericity on Gr(i, Z_p^d): image ranks, determinant certificates, s(N).

"Generic" is never claimed here.  Samplers report failure counts and
frequencies, and exact certificates are offered where they exist.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .errors import (
    FamilyRankError,
    InadmissibleError,
    NoAdmissibleError,
    PrecisionError,
    SchemaError,
    ShapeError,
    ZeroPolynomialError,
)
from .grassmann import (
    ChartCoordinate,
    GrassmannPoint,
    enumerate_finite,
    from_chart,
    level_count,
    sample_haar,
    ENUMERATION_LIMIT,
)
from .padic import (
    CounterStream,
    PadicMatrix,
    PadicScalar,
    check_precision,
    check_prime,
    rank_at_precision,
    saturated_kernel_with_loss,
    smith_normal_form,
)


@dataclass(frozen=True)
class SubmoduleFamily:
    """Submodules L_1, ..., L_r of Z_p^d, each of rank at least i at precision."""

    d: int
    i: int
    members: tuple[PadicMatrix, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("a family needs at least one member")
        p, a = self.members[0].p, self.members[0].a
        for j, L in enumerate(self.members):
            if (L.p, L.a) != (p, a):
                raise PrecisionError("family members at different (p, a)")
            if L.nrows != self.d:
                raise ShapeError(f"member {j} does not have {self.d} rows")
            if rank_at_precision(L) < self.i:
                raise FamilyRankError(f"member {j} has rank below {self.i}")

    @property
    def p(self) -> int:
        return self.members[0].p

    @property
    def a(self) -> int:
        return self.members[0].a

    @classmethod
    def from_columns(
        cls, members: Sequence[Sequence[Sequence[int]]], d: int, i: int, p: int, a: int
    ) -> "SubmoduleFamily":
        return cls(d, i, tuple(PadicMatrix.from_columns(m, p, a, nrows=d) for m in members))

    def trimmed(self) -> tuple[PadicMatrix, ...]:
        return tuple(trim(L, self.i) for L in self.members)

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "p": self.p,
            "a": self.a,
            "i": self.i,
            "L": [L.to_list() for L in self.members],
        }

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "SubmoduleFamily":
        try:
            d, p, a, i = (int(obj[k]) for k in ("d", "p", "a", "i"))
            members = []
            for rows in obj["L"]:
                if len(rows) != d:
                    raise SchemaError(f"each L must have {d} rows")
                members.append(PadicMatrix.from_rows(rows, p, a, ncols=len(rows[0])))
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"bad submodule family: {exc}") from exc
        return cls(d, i, tuple(members))


@dataclass(frozen=True)
class GenericityReport:
    samples: int
    failures: int
    seed: int | None = None
    certificate_used: bool = False
    excluded: int = 0
    witnesses: tuple = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.failures <= self.samples:
            raise ValueError("failures must lie in [0, samples]")

    @property
    def failure_frequency(self) -> Fraction:
        return Fraction(self.failures, self.samples) if self.samples else Fraction(0)

    def to_dict(self) -> dict[str, Any]:
        f = self.failure_frequency
        return {
            "samples": self.samples,
            "failures": self.failures,
            "failure_frequency": str(f),
            "failure_frequency_float": float(f),
            "certificate_used": self.certificate_used,
            "excluded": self.excluded,
            "seed": self.seed,
        }


def trim(L: PadicMatrix, i: int) -> PadicMatrix:
    """First i columns of L (greedily) that are independent at precision."""
    chosen: list[int] = []
    for c in range(L.ncols):
        if len(chosen) == i:
            break
        if rank_at_precision(L.select_columns(chosen + [c])) == len(chosen) + 1:
            chosen.append(c)
    if len(chosen) < i:
        raise FamilyRankError(f"cannot find {i} independent columns")
    return L.select_columns(chosen)


def image_rank(L: PadicMatrix, N: GrassmannPoint, precision: int | None = None) -> int:
    """Rank of the image of L in M/N, at precision ``precision`` (default a)."""
    G = N.generators
    if L.nrows != N.d:
        raise ShapeError("L must have d rows")
    if precision is not None and precision != G.a:
        G, L = G.reduce(precision), L.reduce(precision)
    return rank_at_precision(G.hstack(L)) - rank_at_precision(G)


def chart_generators(chart: ChartCoordinate | PadicMatrix, d: int) -> PadicMatrix:
    """Generators of N_alpha; a bare matrix alpha means the chart W = {0..d-i-1}."""
    if isinstance(chart, PadicMatrix):
        k = chart.ncols
        chart = ChartCoordinate(tuple(range(k)), chart)
    if chart.d != d:
        raise ShapeError("chart does not match the ambient rank")
    return from_chart(chart).generators


def det_certificate(family: SubmoduleFamily, chart: ChartCoordinate | PadicMatrix) -> PadicScalar:
    """prod_j det[G_alpha | b^(j)_1 ... b^(j)_i] with each L_j trimmed to i columns.

    With the standard chart, G_alpha is the identity stacked over alpha.  The
    certificate is a unit exactly when every L_j maps onto a rank-i lattice
    of full index mod p in M/N_alpha.
    """
    G = chart_generators(chart, family.d)
    out = PadicScalar(family.p, family.a, 1)
    for b in family.trimmed():
        out = out * G.hstack(b).det()
    return out


def certificate_valuation_bound(family: SubmoduleFamily, chart: ChartCoordinate | PadicMatrix) -> int:
    """min(a, sum of the Smith valuations of all blocks [G_alpha | b^(j)])."""
    G = chart_generators(chart, family.d)
    total = 0
    for b in family.trimmed():
        total += sum(smith_normal_form(G.hstack(b)).diagonal_valuations)
    return min(total, family.a)


def _check_admissible(N: GrassmannPoint, family: SubmoduleFamily) -> None:
    if family.i != 1 or N.i != 1:
        raise ValueError("s(N) is defined here for i = 1")
    if family.d != N.d:
        raise ShapeError("family and point have different ambient rank")
    for j, L in enumerate(family.members):
        if image_rank(L, N) != 1:
            raise InadmissibleError(f"L_{j} has image rank 0 in M/N at precision")


def s_of(N: GrassmannPoint, family: SubmoduleFamily) -> int:
    """Rank of N / sum_j (N ∩ L_j) at precision.

    N ∩ L_j is read off the free part of the kernel of [G_N | -L_j], kept in
    the coordinates of the basis G_N of N.  Those kernels are only known
    modulo p^(a - loss), so the final rank is taken at that precision.
    """
    _check_admissible(N, family)
    G = N.generators
    k = G.ncols
    cols: list[tuple[int, ...]] = []
    loss = 0
    for L in family.members:
        K, lost = saturated_kernel_with_loss(G.hstack(-L))
        loss = max(loss, lost)
        for c in range(K.ncols):
            cols.append(K.column(c)[:k])
    if not cols:
        return k
    if loss >= N.a:
        raise PrecisionError("intersections are not determined at this precision")
    X = PadicMatrix.from_columns(cols, N.p, N.a, nrows=k)
    return k - rank_at_precision(X.reduce(N.a - loss))


def s_formula(alpha: Sequence[int], family: SubmoduleFamily) -> int:
    """d - 1 - rank of the bilinear matrix, for N_alpha = <e_k + alpha_k e_d>.

    For every member L_j and every pair of basis vectors b, b' of L_j the
    column with k-th entry sum_l (b_k b'_l - b_l b'_k) alpha_l is used, where
    alpha_d = -1.  Such a combination sum_k c_k e_k lies in N_alpha ∩ L_j, and
    these columns span it.
    """
    d = family.d
    if len(alpha) != d - 1:
        raise ShapeError("alpha must have d-1 entries")
    al = list(alpha) + [-1]
    cols: list[list[int]] = []
    for L in family.members:
        basis = L.columns()
        for b, b2 in itertools.combinations(basis, 2):
            ab = sum(x * y for x, y in zip(al, b))
            ab2 = sum(x * y for x, y in zip(al, b2))
            cols.append([b[k] * ab2 - b2[k] * ab for k in range(d)])
    if not cols:
        return d - 1
    X = PadicMatrix.from_columns(cols, family.p, family.a, nrows=d)
    return d - 1 - rank_at_precision(X)


def alpha_point(alpha: Sequence[int], d: int, p: int, a: int) -> GrassmannPoint:
    """N_alpha = <e_k + alpha_k e_d : k < d>, a point of Gr(1, Z_p^d)."""
    A = PadicMatrix.from_rows([list(alpha)], p, a, ncols=d - 1)
    return from_chart(ChartCoordinate(tuple(range(d - 1)), A))


@dataclass(frozen=True)
class GenericSResult:
    s: int
    attaining: int
    admissible: int
    excluded: int
    level: int
    stable: bool | None
    warning: str

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.attaining, self.admissible)

    def to_dict(self) -> dict[str, Any]:
        return {
            "s": self.s,
            "attaining": self.attaining,
            "admissible": self.admissible,
            "excluded": self.excluded,
            "fraction": str(self.fraction),
            "level": self.level,
            "stable": self.stable,
            "warning": self.warning,
        }


def _level_scan(family: SubmoduleFamily, n: int) -> tuple[dict[int, int], int]:
    counts: dict[int, int] = {}
    excluded = 0
    for P in enumerate_finite(family.d, 1, family.p, n):
        N = P.lift(family.a)
        try:
            s = s_of(N, family)
        except InadmissibleError:
            excluded += 1
            continue
        counts[s] = counts.get(s, 0) + 1
    return counts, excluded


def generic_min_s(
    family: SubmoduleFamily, n: int = 1, check_stability: bool = True
) -> GenericSResult:
    """Minimum of s over all admissible level-n classes, lifted to precision a.

    The level at which the generic value is reached is not known a priori, so
    the result is compared against level n+1 when that level is enumerable.
    """
    if family.i != 1:
        raise ValueError("generic_min_s needs i = 1")
    if n > family.a:
        raise PrecisionError("level exceeds the precision of the family")
    counts, excluded = _level_scan(family, n)
    if not counts:
        raise NoAdmissibleError(f"no admissible class at level {n}")
    s = min(counts)
    stable: bool | None = None
    warning = "heuristic: generic value read off a finite level"
    if check_stability:
        if n + 1 <= family.a and level_count(family.d, 1, family.p, n + 1) <= ENUMERATION_LIMIT:
            nxt, _ = _level_scan(family, n + 1)
            stable = bool(nxt) and min(nxt) == s
            if not stable:
                warning += f"; value changed at level {n + 1}"
        else:
            warning += f"; level {n + 1} not enumerable, stability unchecked"
    return GenericSResult(s, counts[s], sum(counts.values()), excluded, n, stable, warning)


# ---------------------------------------------------------------------------
# Monte Carlo


Polynomial = Mapping[tuple[int, ...], int]


def evaluate_polynomial(f: Polynomial, alpha: Sequence[int], modulus: int) -> int:
    total = 0
    for exps, c in f.items():
        term = c
        for x, e in zip(alpha, exps):
            if e:
                term *= pow(x, e, modulus)
        total += term
    return total % modulus


def polynomial_zero_measure(
    f: Polynomial, p: int, a: int, samples: int, seed: int
) -> GenericityReport:
    """Frequency of f(alpha) ≡ 0 (mod p^a) for uniform alpha in (Z/p^a)^n.

    ``f`` maps exponent tuples to integer coefficients.
    """
    check_prime(p)
    check_precision(a)
    q = p**a
    if not f or all(c % q == 0 for c in f.values()):
        raise ZeroPolynomialError("polynomial vanishes identically at precision")
    nvars = len(next(iter(f)))
    failures = 0
    for k in range(samples):
        rng = CounterStream(seed, k)
        alpha = [rng.randbelow(q) for _ in range(nvars)]
        if evaluate_polynomial(f, alpha, q) == 0:
            failures += 1
    return GenericityReport(samples, failures, seed=seed)


def _verify_chunk(
    prop: Callable[[GrassmannPoint], bool], d: int, i: int, p: int, a: int, seed: int,
    indices: range,
) -> tuple[int, list[int]]:
    bad = []
    for k in indices:
        if not prop(sample_haar(d, i, p, a, CounterStream(seed, k))):
            bad.append(k)
    return len(bad), bad


def verify_generic(
    prop: Callable[[GrassmannPoint], bool],
    d: int,
    i: int,
    p: int,
    a: int,
    samples: int,
    seed: int,
    workers: int = 1,
    certificate_used: bool = False,
) -> GenericityReport:
    """Failure frequency of ``prop`` under Haar sampling of Gr(i, Z_p^d).

    Sample k always uses the stream (seed, k), so the report does not depend
    on ``workers``.  With several workers ``prop`` must be picklable.  The
    report's witnesses are the indices of the failing samples.
    """
    if workers <= 1:
        n, bad = _verify_chunk(prop, d, i, p, a, seed, range(samples))
    else:
        step = -(-samples // workers)
        chunks = [range(s, min(s + step, samples)) for s in range(0, samples, step)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(
                ex.map(_verify_chunk, *zip(*[(prop, d, i, p, a, seed, c) for c in chunks]))
            )
        bad = sorted(k for _, b in parts for k in b)
        n = len(bad)
    return GenericityReport(
        samples, n, seed=seed, certificate_used=certificate_used, witnesses=tuple(bad)
    )
