"""Weierstrass preparation and characteristic ideals over Z_p[[T]].

All work happens in the truncated ring R = (Z/p^a')[T]/(T^(D+1)).  In R a
principal ideal generated by a distinguished polynomial P of degree lam
contains nonzero polynomials of degree < lam (truncation side effects), so the
distinguished polynomial is only defined modulo the subgroup J of such
elements.  ``weierstrass`` returns the canonical representative: the lower
coefficients of P are reduced modulo J with a Howell-style echelon basis.
This makes "equal up to unit" an exact comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .errors import (
    AllZeroError,
    InconsistentInput,
    PrecisionError,
    SchemaError,
    ShapeError,
    TruncationTooSmall,
)
from .padic import PadicMatrix, int_valuation, smith_normal_form
from .series import TruncatedSeries, poly_inv, poly_mul, poly_pad


# ---------------------------------------------------------------------------
# The subgroup J = (P) ∩ {deg < lam} and reduction modulo it


def _low_kernel(P: Sequence[int], p: int, a: int, D: int) -> list[tuple[list[int], list[int]]]:
    """Generators (j, c) of J with j = low part of c·P and c·P of degree < lam."""
    lam = len(P) - 1
    q = p**a
    Pp = poly_pad(P, D)
    shifts = []
    for k in range(D + 1):
        shifts.append([0] * k + Pp[: D + 1 - k])
    nhigh = D + 1 - lam
    if nhigh <= 0:
        return [([s[t] for t in range(lam)], [int(k == t) for t in range(D + 1)])
                for k, s in enumerate(shifts)]
    H = PadicMatrix.from_rows(
        [[shifts[k][lam + r] for k in range(D + 1)] for r in range(nhigh)], p, a, ncols=D + 1
    )
    sf = smith_normal_form(H)
    V = sf.right_transform
    gens = []
    for k in range(D + 1):
        if k < len(sf.diagonal_valuations):
            v = sf.diagonal_valuations[k]
            scale = p ** (a - v)
        else:
            scale = 1
        c = [x * scale % q for x in V.column(k)]
        if not any(c):
            continue
        low = [sum(c[k2] * shifts[k2][t] for k2 in range(D + 1)) % q for t in range(lam)]
        gens.append((low, c))
    return gens


@dataclass
class _Echelon:
    pivots: list[tuple[int, int, list[int], list[int]]]  # (position, valuation, vec, mult)


def _echelon(gens: list[tuple[list[int], list[int]]], lam: int, p: int, a: int, D: int) -> _Echelon:
    """Howell-style echelon basis of the subgroup generated by ``gens``."""
    q = p**a
    work = [(list(v), list(m)) for v, m in gens if any(x % q for x in v)]
    pivots = []
    for k in range(lam):
        cands = [g for g in work if g[0][k] % q]
        if not cands:
            continue
        vals = [int_valuation(g[0][k], p, a) for g in cands]
        v = min(vals)
        g = cands[vals.index(v)]
        work.remove(g)
        u_inv = pow(g[0][k] // p**v, -1, q)
        gv = [x * u_inv % q for x in g[0]]
        gm = [x * u_inv % q for x in g[1]]
        nxt = []
        for h in work:
            if h[0][k] % q:
                t = (h[0][k] % q) // p**v
                h = ([(x - t * y) % q for x, y in zip(h[0], gv)],
                     [(x - t * y) % q for x, y in zip(h[1], gm)])
            if any(h[0]):
                nxt.append(h)
        if v > 0:
            s = p ** (a - v)
            extra = ([x * s % q for x in gv], [x * s % q for x in gm])
            if any(extra[0]):
                nxt.append(extra)
        work = nxt
        pivots.append((k, v, gv, gm))
    return _Echelon(pivots)


def _reduce(r: Sequence[int], ech: _Echelon, p: int, a: int, D: int) -> tuple[list[int], list[int]]:
    """Canonical representative of r modulo J, and the multiplier used."""
    q = p**a
    r = [x % q for x in r]
    mult = [0] * (D + 1)
    for k, v, gv, gm in ech.pivots:
        t = r[k] // p**v
        if t:
            r = [(x - t * y) % q for x, y in zip(r, gv)]
            mult = [(x + t * y) % q for x, y in zip(mult, gm)]
    return r, mult


def _weierstrass_remainder(h: Sequence[int], P: Sequence[int], q: int, D: int) -> list[int]:
    """Remainder of h modulo the monic distinguished P in R: degree < lam."""
    lam = len(P) - 1
    h = poly_pad(h, D)
    B = [(-c) % q for c in P[:lam]]  # T^lam ≡ B (mod P)
    for _ in range(4 * (D + 2) * max(1, q.bit_length())):
        high = h[lam:]
        if not any(high):
            return h[:lam]
        low = h[:lam] + [0] * (D + 1 - lam)
        h = [(x + y) % q for x, y in zip(low, poly_mul(B, high, q, D))]
    raise RuntimeError("Weierstrass division did not converge")


def ideal_contains(P: Sequence[int], h: Sequence[int], p: int, a: int, D: int) -> bool:
    """Whether h lies in (P) inside (Z/p^a)[T]/(T^(D+1)); P monic distinguished."""
    q = p**a
    lam = len(P) - 1
    if lam > D:
        raise TruncationTooSmall("degree of P exceeds the truncation")
    rem = _weierstrass_remainder(h, P, q, D)
    if lam == 0:
        return True
    ech = _echelon(_low_kernel(P, p, a, D), lam, p, a, D)
    red, _ = _reduce(rem, ech, p, a, D)
    return not any(red)


def canonical_distinguished(P: Sequence[int], p: int, a: int, D: int) -> list[int]:
    """Canonical generator-level representative of the ideal (P) in R."""
    lam = len(P) - 1
    if lam == 0:
        return [1]
    ech = _echelon(_low_kernel(P, p, a, D), lam, p, a, D)
    low, _ = _reduce(P[:lam], ech, p, a, D)
    return low + [1]


# ---------------------------------------------------------------------------
# Weierstrass preparation


@dataclass(frozen=True)
class WeierstrassData:
    """f ≡ p^mu · distinguished · unit_cofactor (mod p^a, T^(D+1)).

    ``distinguished`` holds coefficients low to high, monic, reduced modulo
    p^(a-mu) and canonical for the ideal it generates in the truncated ring.
    """

    p: int
    a: int
    D: int
    mu: int
    lam: int
    distinguished: tuple[int, ...]
    unit_cofactor: TruncatedSeries

    @property
    def working_precision(self) -> int:
        return self.a - self.mu

    def reconstruct(self) -> TruncatedSeries:
        P = TruncatedSeries.from_univariate(self.distinguished, self.p, self.a, self.D)
        U = self.unit_cofactor
        if U.a != self.a:
            U = TruncatedSeries.from_univariate(U.univariate(), self.p, self.a, self.D)
        return P * U * self.p**self.mu

    def to_dict(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "lambda": self.lam,
            "distinguished": list(self.distinguished),
            "unit_cofactor": self.unit_cofactor.univariate(),
            "p": self.p,
            "a": self.a,
            "D": self.D,
        }


def weierstrass(f: TruncatedSeries) -> WeierstrassData:
    """Weierstrass preparation of a one-variable series.

    mu is the least coefficient valuation and lam the first index where f/p^mu
    has a unit coefficient.  T^lam is reduced modulo f/p^mu by iterated
    division, giving P = T^lam - r with P = (f/p^mu)·w; the unit cofactor is
    w^-1.  P is then made canonical modulo J.
    """
    if f.nvars != 1:
        raise ShapeError("weierstrass needs a one-variable series")
    p, a, D = f.p, f.a, f.D
    if f.is_zero():
        raise AllZeroError("series is zero at precision")
    mu = f.valuation()
    a2 = a - mu
    q = p**a2
    g = [(c // p**mu) % q for c in f.univariate()]
    lam = next((k for k, c in enumerate(g) if c % p), None)
    if lam is None:
        raise TruncationTooSmall(f"no unit coefficient within degree {D}")
    if lam == 0:
        P = [1]
        U = g
    else:
        B = g[:lam] + [0] * (D + 1 - lam)
        Cinv = poly_inv(g[lam:], q, D)
        BC = poly_mul(B, Cinv, q, D)
        h = [0] * (D + 1)
        h[lam] = 1
        w = [0] * (D + 1)
        while True:
            high = h[lam:]
            if not any(high):
                break
            w = [(x + y) % q for x, y in zip(w, poly_mul(Cinv, high, q, D))]
            low = h[:lam] + [0] * (D + 1 - lam)
            h = [(x - y) % q for x, y in zip(low, poly_mul(BC, high, q, D))]
        # P = T^lam - h_low = g·w
        P = [(-x) % q for x in h[:lam]] + [1]
        ech = _echelon(_low_kernel(P, p, a2, D), lam, p, a2, D)
        low, mult = _reduce(P[:lam], ech, p, a2, D)
        # P_canon = P·(1 - mult), so g = P_canon·(1 - mult)^-1·w^-1
        z = [(-x) % q for x in mult]
        z[0] = (z[0] + 1) % q
        P = low + [1]
        U = poly_inv(poly_mul(z, w, q, D), q, D)
    return WeierstrassData(
        p, a, D, mu, lam, tuple(P), TruncatedSeries.from_univariate(U, p, a2, D)
    )


# ---------------------------------------------------------------------------
# Modules and characteristic ideals


@dataclass(frozen=True)
class ElementaryModule:
    """The module ⊕ Λ/(f_l)."""

    nvars: int
    factors: tuple[TruncatedSeries, ...]

    def __post_init__(self) -> None:
        for f in self.factors:
            if f.nvars != self.nvars:
                raise ShapeError("factor in the wrong number of variables")
            if f.is_zero():
                raise AllZeroError("elementary factors must be nonzero at precision")

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.nvars, "f": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "ElementaryModule":
        try:
            return cls(int(obj["d"]), tuple(TruncatedSeries.from_json(f) for f in obj["f"]))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad elementary module: {exc}") from exc


@dataclass(frozen=True)
class CharIdeal:
    """p^mu·(distinguished), compared up to units of the truncated ring."""

    p: int
    a: int
    D: int
    mu: int
    lam: int
    distinguished: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.distinguished) != self.lam + 1 or self.distinguished[-1] != 1:
            raise ValueError("distinguished polynomial must be monic of degree lambda")

    @classmethod
    def from_weierstrass(cls, w: WeierstrassData) -> "CharIdeal":
        return cls(w.p, w.a, w.D, w.mu, w.lam, w.distinguished)

    @classmethod
    def unit(cls, p: int, a: int, D: int) -> "CharIdeal":
        return cls(p, a, D, 0, 0, (1,))

    def __add__(self, other: "CharIdeal") -> "CharIdeal":
        """Product of ideals (characteristic ideals add along direct sums)."""
        if (self.p, self.a, self.D) != (other.p, other.a, other.D):
            raise PrecisionError("ideals at different (p, a, D)")
        mu = self.mu + other.mu
        lam = self.lam + other.lam
        if mu >= self.a:
            raise AllZeroError("product is zero at precision")
        if lam > self.D:
            raise TruncationTooSmall("product degree exceeds the truncation")
        q = self.p ** (self.a - mu)
        P = [0] * (lam + 1)
        for i, x in enumerate(self.distinguished):
            for j, y in enumerate(other.distinguished):
                P[i + j] = (P[i + j] + x * y) % q
        return CharIdeal(
            self.p, self.a, self.D, mu, lam,
            tuple(canonical_distinguished(P, self.p, self.a - mu, self.D)),
        )

    def same_up_to_unit(self, other: "CharIdeal") -> bool:
        if (self.mu, self.lam) != (other.mu, other.lam):
            return False
        q = self.p ** (self.a - self.mu)
        return [x % q for x in self.distinguished] == [x % q for x in other.distinguished]

    def to_dict(self) -> dict[str, Any]:
        return {"mu": self.mu, "lambda": self.lam, "distinguished": list(self.distinguished)}


def char_ideal(E: ElementaryModule) -> CharIdeal:
    if E.nvars != 1:
        raise ShapeError("characteristic ideals are computed in one variable")
    if not E.factors:
        raise ValueError("empty module")
    f0 = E.factors[0]
    out = CharIdeal.unit(f0.p, f0.a, f0.D)
    for f in E.factors:
        out = out + CharIdeal.from_weierstrass(weierstrass(f))
    return out


# ---------------------------------------------------------------------------
# Dagger pseudo-nullity and cyclotomic factors


def euler_phi_prime_power(p: int, m: int) -> int:
    return 1 if m == 0 else (p - 1) * p ** (m - 1)


def m_max(p: int, lam: int) -> int:
    """Smallest m with phi(p^(m+1)) > lam."""
    m = 0
    while euler_phi_prime_power(p, m + 1) <= lam:
        m += 1
    return m


def omega(p: int, m: int, q: int, D: int) -> list[int]:
    """(1+T)^(p^m) - 1 truncated at degree D."""
    from math import comb

    n = p**m
    return [0] + [comb(n, k) % q for k in range(1, D + 1)]


def cyclotomic_factor(p: int, m: int) -> list[int]:
    """((1+T)^(p^m) - 1) / ((1+T)^(p^(m-1)) - 1) = sum_k (1+T)^(k p^(m-1)), exact."""
    from math import comb

    step = p ** (m - 1)
    deg = (p - 1) * step
    out = [0] * (deg + 1)
    for k in range(p):
        e = k * step
        for t in range(e + 1):
            out[t] += comb(e, t)
    return out


def dagger_pseudo_null(c: CharIdeal) -> bool:
    """Whether ch contains ((1+T)^(p^m) - 1)^lam for some m <= m_max."""
    if c.mu > 0:
        return False
    if c.lam == 0:
        return True
    p, a, D = c.p, c.a, c.D
    q = p**a
    for m in range(m_max(p, c.lam) + 1):
        w = omega(p, m, q, D)
        h = [1] + [0] * D
        for _ in range(c.lam):
            h = poly_mul(h, w, q, D)
        if ideal_contains(c.distinguished, h, p, a, D):
            return True
    return False


def prime_to_higher_cyclotomic(c: CharIdeal) -> bool:
    """No cyclotomic factor of degree phi(p^m), 1 <= m <= m_max, divides ch."""
    p, D = c.p, c.D
    a2 = c.a - c.mu
    for m in range(1, m_max(p, c.lam) + 1):
        Phi = cyclotomic_factor(p, m)
        if len(Phi) - 1 > c.lam or len(Phi) - 1 > D:
            continue
        if ideal_contains(Phi, c.distinguished, p, a2, D):
            return False
    return True


@dataclass(frozen=True)
class StructureVerdict:
    conclusive: bool
    mu: int | None = None
    lam: int | None = None
    exponent: int | None = None
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "conclusive": self.conclusive,
            "mu": self.mu,
            "lambda": self.lam,
            "exponent": self.exponent,
            "reason": self.reason,
        }


def is_power_of_T(c: CharIdeal) -> bool:
    q = c.p ** (c.a - c.mu)
    return all(x % q == 0 for x in c.distinguished[:-1])


def conclude_structure(c: CharIdeal, nonsplit: bool, semisimple: bool, s: int) -> StructureVerdict:
    """Chain: dagger-null and prime to higher cyclotomic factors => ch = (T^e).

    Both premises are always required.  With semisimplicity asserted the
    verdict is mu = 0, lambda = e = s.
    """
    if not dagger_pseudo_null(c):
        return StructureVerdict(False, reason="not dagger-pseudo-null")
    if not prime_to_higher_cyclotomic(c):
        reason = "not prime to higher cyclotomic factors"
        if not nonsplit:
            reason += " (and the extension is not flagged nonsplit)"
        return StructureVerdict(False, reason=reason)
    if not is_power_of_T(c):
        return StructureVerdict(False, reason="distinguished polynomial is not a power of T at precision")
    e = c.lam
    if not semisimple:
        return StructureVerdict(False, exponent=e, reason="not arithmetically semi-simple")
    if e != s:
        raise InconsistentInput(f"ch = (T^{e}) but s = {s} with semisimplicity asserted")
    return StructureVerdict(True, mu=0, lam=s, exponent=e, reason="ch = (T^s)")
