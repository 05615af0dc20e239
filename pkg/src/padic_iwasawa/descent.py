"""Descent of characteristic ideals along S_alpha = 0.

For f in Z_p[[T_1, T_2]] distinguished in T_1, the quotient Λ/(f) is free over
Z_p[[T_2]] on 1, T_1, ..., T_1^(lam-1); T_1 acts by a companion matrix A.
Setting 1+T_1 = (1+T_2)^(-alpha) turns the image of f into
det((I + A)(1+T_2)^alpha - I) up to a unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import (
    DescentMismatch,
    IndeterminateError,
    NotDistinguishedError,
    ShapeError,
    UnsupportedIdeal,
)
from .genericity import GenericityReport
from .series import AlphaVector, TruncatedSeries, binom_series, s_alpha
from .algebra import CharIdeal, weierstrass


def bar_substitute(f: TruncatedSeries, alpha: AlphaVector) -> TruncatedSeries:
    """Image of f under 1+T_1 -> prod_j (1+T_j)^(-alpha_j), in the variables T_2..T_d."""
    if len(alpha) != f.nvars - 1 or f.nvars < 2:
        raise ShapeError("alpha must have one entry per variable T_2..T_d")
    p, a, D = f.p, f.a, f.D
    m = f.nvars - 1
    theta = TruncatedSeries.constant(1, p, a, m, D)
    for j, x in enumerate(alpha.entries):
        theta = theta * binom_series(-x, j, m, D, p, a)
    theta = theta - 1
    images = [theta] + [TruncatedSeries.variable(j, p, a, m, D) for j in range(m)]
    return f.substitute(images)


def bar_nonzero_scan(f: TruncatedSeries, alphas: Iterable[AlphaVector]) -> GenericityReport:
    """Count the alpha for which the image of f vanishes at precision."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    n = 0
    hits = []
    for al in alphas:
        n += 1
        if bar_substitute(f, al).is_zero():
            hits.append(al.entries)
    return GenericityReport(n, len(hits), witnesses=tuple(hits))


def t1_coefficients(f: TruncatedSeries) -> list[TruncatedSeries]:
    """f = sum_k c_k(T_2) T_1^k, returned as one-variable series c_k."""
    if f.nvars != 2:
        raise ShapeError("expected a series in T_1, T_2")
    top = max((e[0] for e, _ in f.terms), default=0)
    buckets: list[dict[tuple[int, ...], int]] = [dict() for _ in range(top + 1)]
    for (k, j), c in f.terms:
        buckets[k][(j,)] = c
    return [TruncatedSeries.from_dict(b, f.p, f.a, 1, f.D) for b in buckets]


Matrix = list[list[TruncatedSeries]]


def companion_rep(f: TruncatedSeries) -> Matrix:
    """Matrix of multiplication by T_1 on Λ/(f) over Z_p[[T_2]].

    f must be monic in T_1 of some degree lam >= 1 with lower coefficients in
    the maximal ideal (p, T_2).
    """
    cs = t1_coefficients(f)
    lam = len(cs) - 1
    if lam < 1:
        raise NotDistinguishedError("f has T_1-degree 0")
    if cs[lam].terms != (((0,), 1),):
        raise NotDistinguishedError("f is not monic in T_1")
    if any(c.constant_term() % f.p for c in cs[:lam]):
        raise NotDistinguishedError("a lower coefficient is a unit")
    zero = TruncatedSeries.constant(0, f.p, f.a, 1, f.D)
    one = zero + 1
    A = [[zero for _ in range(lam)] for _ in range(lam)]
    for k in range(lam - 1):
        A[k + 1][k] = one
    for k in range(lam):
        A[k][lam - 1] = -cs[k]
    return A


def series_det(M: Matrix) -> TruncatedSeries:
    """Determinant by cofactor expansion (matrices here are at most a few rows)."""
    n = len(M)
    if n == 1:
        return M[0][0]
    out = None
    for c in range(n):
        if M[0][c].is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        term = M[0][c] * series_det(minor)
        if c % 2:
            term = -term
        out = term if out is None else out + term
    if out is None:
        return M[0][0] * 0
    return out


def descent_determinant(f: TruncatedSeries, alpha: AlphaVector) -> TruncatedSeries:
    """det((I + A)(1+T_2)^alpha - I) for A = companion_rep(f)."""
    if len(alpha) != 1:
        raise ShapeError("descent is implemented for two variables")
    A = companion_rep(f)
    lam = len(A)
    u = binom_series(alpha.entries[0], 0, 1, f.D, f.p, f.a)
    M = []
    for r in range(lam):
        row = []
        for c in range(lam):
            x = A[r][c] + (1 if r == c else 0)
            x = x * u
            if r == c:
                x = x - 1
            row.append(x)
        M.append(row)
    return series_det(M)


def descend_char(f: TruncatedSeries, alpha: AlphaVector, check: bool = True) -> CharIdeal:
    """Characteristic ideal of the descended module Λ/(f) ⊗ Λ/(S_alpha).

    With ``check`` the result is compared against the Weierstrass data of
    bar_substitute(f, alpha) and DescentMismatch is raised on disagreement.
    """
    det = descent_determinant(f, alpha)
    if det.is_zero():
        raise IndeterminateError("determinant is zero at precision; raise a or D")
    c = CharIdeal.from_weierstrass(weierstrass(det))
    if check:
        bar = CharIdeal.from_weierstrass(weierstrass(bar_substitute(f, alpha)))
        if not c.same_up_to_unit(bar):
            raise DescentMismatch(f"determinant side {c} differs from substitution side {bar}")
    return c


@dataclass(frozen=True)
class CatalogIdeal:
    """Ideal generated by a subset of {p, T_1, ..., T_d}; variables are 1-based."""

    has_p: bool
    variables: frozenset[int]

    @classmethod
    def parse(cls, text: str) -> "CatalogIdeal":
        has_p = False
        variables = set()
        for g in (x.strip() for x in text.strip("() ").split(",")):
            if not g:
                continue
            if g == "p":
                has_p = True
            elif re.fullmatch(r"T_?(\d+)", g):
                variables.add(int(re.fullmatch(r"T_?(\d+)", g).group(1)))
            else:
                raise UnsupportedIdeal(f"generator {g!r} is not in the catalog {{p, T_j}}")
        return cls(has_p, frozenset(variables))

    def __str__(self) -> str:
        gens = (["p"] if self.has_p else []) + [f"T{j}" for j in sorted(self.variables)]
        return "(" + ",".join(gens) + ")"


def reduce_mod_catalog(f: TruncatedSeries, P: CatalogIdeal) -> dict[tuple[int, ...], int]:
    if any(not 1 <= j <= f.nvars for j in P.variables):
        raise UnsupportedIdeal("ideal mentions a variable outside T_1..T_d")
    m = f.p if P.has_p else f.modulus
    out = {}
    for e, c in f.terms:
        if any(e[j - 1] for j in P.variables):
            continue
        if c % m:
            out[e] = c % m
    return out


def ideal_membership_salpha(P: CatalogIdeal, alpha: AlphaVector, D: int) -> bool:
    """Whether S_alpha reduces to 0 modulo the generators of P (at precision and truncation)."""
    return not reduce_mod_catalog(s_alpha(alpha, D), P)


def series_in_two_vars(coeffs: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """sum_k coeffs[k](T_2) T_1^k as a two-variable series."""
    c0 = coeffs[0]
    acc: dict[tuple[int, ...], int] = {}
    for k, c in enumerate(coeffs):
        for (j,), x in c.terms:
            acc[(k, j)] = x
    return TruncatedSeries.from_dict(acc, c0.p, c0.a, 2, c0.D)


def descent_report(f: TruncatedSeries, alpha: AlphaVector) -> dict[str, Any]:
    det_side = CharIdeal.from_weierstrass(weierstrass(descent_determinant(f, alpha)))
    bar_side = CharIdeal.from_weierstrass(weierstrass(bar_substitute(f, alpha)))
    return {
        "determinant_side": det_side.to_dict(),
        "substitution_side": bar_side.to_dict(),
        "agree": det_side.same_up_to_unit(bar_side),
    }
