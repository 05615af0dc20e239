"""Truncated power series over Z/p^a in variables T_1, ..., T_d.

Exponent vectors are tuples; variable indices are 0-based in code (index 0 is
T_1).  Truncation is by total degree: monomials of degree > D are dropped.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

from .errors import PrecisionError, SchemaError, ShapeError
from .padic import PadicScalar, check_precision, check_prime, int_valuation


@dataclass(frozen=True)
class TruncatedSeries:
    p: int
    a: int
    nvars: int
    D: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self) -> None:
        check_prime(self.p)
        check_precision(self.a)
        if self.nvars < 1 or self.D < 0:
            raise ValueError("need at least one variable and D >= 0")
        q = self.p**self.a
        for e, c in self.terms:
            if len(e) != self.nvars or sum(e) > self.D or min(e) < 0:
                raise ShapeError(f"bad exponent vector {e}")
            if not 0 < c < q:
                raise ValueError("stored coefficients must be nonzero residues")

    @classmethod
    def from_dict(
        cls, coeffs: Mapping[tuple[int, ...], int], p: int, a: int, nvars: int, D: int
    ) -> "TruncatedSeries":
        q = p**a
        acc: dict[tuple[int, ...], int] = {}
        for e, c in coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ShapeError(f"exponent {e} has the wrong length")
            if sum(e) <= D:
                acc[e] = (acc.get(e, 0) + int(c)) % q
        return cls(p, a, nvars, D, tuple(sorted((e, c) for e, c in acc.items() if c)))

    @classmethod
    def from_univariate(cls, coeffs: Sequence[int], p: int, a: int, D: int) -> "TruncatedSeries":
        return cls.from_dict({(k,): c for k, c in enumerate(coeffs)}, p, a, 1, D)

    @classmethod
    def constant(cls, c: int, p: int, a: int, nvars: int, D: int) -> "TruncatedSeries":
        return cls.from_dict({(0,) * nvars: c}, p, a, nvars, D)

    @classmethod
    def variable(cls, index: int, p: int, a: int, nvars: int, D: int) -> "TruncatedSeries":
        e = [0] * nvars
        e[index] = 1
        return cls.from_dict({tuple(e): 1}, p, a, nvars, D)

    @cached_property
    def coeffs(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    @property
    def modulus(self) -> int:
        return self.p**self.a

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.coeffs.get(tuple(exps), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def univariate(self) -> list[int]:
        """Coefficient list of a one-variable series, length D+1."""
        if self.nvars != 1:
            raise ShapeError("not a one-variable series")
        out = [0] * (self.D + 1)
        for (k,), c in self.terms:
            out[k] = c
        return out

    def _same_ring(self, other: "TruncatedSeries") -> None:
        if (self.p, self.a, self.nvars, self.D) != (other.p, other.a, other.nvars, other.D):
            raise PrecisionError("series live in different truncated rings")

    def _lift(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        if isinstance(other, int):
            return TruncatedSeries.constant(other, self.p, self.a, self.nvars, self.D)
        self._same_ring(other)
        return other

    def __add__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        o = self._lift(other)
        acc = dict(self.coeffs)
        for e, c in o.terms:
            acc[e] = acc.get(e, 0) + c
        return TruncatedSeries.from_dict(acc, self.p, self.a, self.nvars, self.D)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries.from_dict(
            {e: -c for e, c in self.terms}, self.p, self.a, self.nvars, self.D
        )

    def __sub__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other: int) -> "TruncatedSeries":
        return self._lift(other) - self

    def __mul__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        o = self._lift(other)
        D, q = self.D, self.modulus
        acc: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms:
            s1 = sum(e1)
            for e2, c2 in o.terms:
                if s1 + sum(e2) > D:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                acc[e] = (acc.get(e, 0) + c1 * c2) % q
        return TruncatedSeries.from_dict(acc, self.p, self.a, self.nvars, D)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            raise ValueError("use inverse() for negative powers")
        out = TruncatedSeries.constant(1, self.p, self.a, self.nvars, self.D)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def constant_term(self) -> int:
        return self.coeffs.get((0,) * self.nvars, 0)

    def is_unit(self) -> bool:
        return self.constant_term() % self.p != 0

    def inverse(self) -> "TruncatedSeries":
        """Inverse of a unit: u^-1 = c^-1 · sum_k (1 - c^-1 u)^k."""
        c = self.constant_term()
        if c % self.p == 0:
            raise ValueError("series is not a unit")
        cinv = pow(c, -1, self.modulus)
        x = 1 - self * cinv  # no constant term
        out = TruncatedSeries.constant(1, self.p, self.a, self.nvars, self.D)
        power = out
        for _ in range(self.D):
            power = power * x
            if power.is_zero():
                break
            out = out + power
        return out * cinv

    def valuation(self) -> int:
        """Least p-adic valuation of a coefficient (a if zero at precision)."""
        if not self.terms:
            return self.a
        return min(int_valuation(c, self.p, self.a) for _, c in self.terms)

    def substitute(self, images: Sequence["TruncatedSeries"]) -> "TruncatedSeries":
        """Replace T_k by images[k] (each with zero constant term, same target ring)."""
        if len(images) != self.nvars:
            raise ShapeError("one image per variable is required")
        tgt = images[0]
        for im in images:
            tgt._same_ring(im)
            if im.constant_term():
                raise ValueError("images must lie in the maximal ideal")
        powers: list[dict[int, TruncatedSeries]] = [dict() for _ in images]
        one = TruncatedSeries.constant(1, tgt.p, tgt.a, tgt.nvars, tgt.D)

        def pw(k: int, e: int) -> TruncatedSeries:
            cache = powers[k]
            if e not in cache:
                cache[e] = one if e == 0 else pw(k, e - 1) * images[k]
            return cache[e]

        acc = TruncatedSeries.constant(0, tgt.p, tgt.a, tgt.nvars, tgt.D)
        for e, c in self.terms:
            term = one * c
            for k, ek in enumerate(e):
                if ek:
                    term = term * pw(k, ek)
            acc = acc + term
        return acc

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "a": self.a,
            "d": self.nvars,
            "D": self.D,
            "terms": [{"exp": list(e), "c": c} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "TruncatedSeries":
        try:
            coeffs: dict[tuple[int, ...], int] = {}
            for t in obj["terms"]:
                e = tuple(int(x) for x in t["exp"])
                coeffs[e] = coeffs.get(e, 0) + int(t["c"])
            return cls.from_dict(coeffs, int(obj["p"]), int(obj["a"]), int(obj["d"]), int(obj["D"]))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad series: {exc}") from exc

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                f"T{k + 1}" + (f"^{x}" if x > 1 else "") for k, x in enumerate(e) if x
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


_TERM = re.compile(r"^([+-]?\d*)\*?(T(?:\^(\d+))?)?$")


def parse_univariate(text: str, p: int, a: int, D: int) -> TruncatedSeries:
    """Parse the grammar ``c0+c1T+c2T^2`` (signs allowed, '*' optional)."""
    s = text.replace(" ", "")
    if not s:
        raise SchemaError("empty series")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise SchemaError(f"cannot parse series {text!r}")
    coeffs: dict[tuple[int, ...], int] = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (not m.group(2) and m.group(1) in ("", "+", "-")):
            raise SchemaError(f"cannot parse term {piece!r}")
        cs, var, ex = m.groups()
        c = int(cs + "1") if cs in ("", "+", "-") else int(cs)
        k = (int(ex) if ex else 1) if var else 0
        coeffs[(k,)] = coeffs.get((k,), 0) + c
    return TruncatedSeries.from_dict(coeffs, p, a, 1, D)


@dataclass(frozen=True)
class AlphaVector:
    """Exponents (alpha_2, ..., alpha_{i+1}) in Z_p, kept as integer lifts."""

    p: int
    a: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        check_prime(self.p)
        check_precision(self.a)

    @classmethod
    def of(cls, entries: Iterable[int | PadicScalar], p: int, a: int) -> "AlphaVector":
        vals = []
        for x in entries:
            if isinstance(x, PadicScalar):
                if (x.p, x.a) != (p, a):
                    raise PrecisionError("alpha entries at different (p, a)")
                x = x.residue
            vals.append(int(x))
        return cls(p, a, tuple(vals))

    def __len__(self) -> int:
        return len(self.entries)

    def scalars(self) -> tuple[PadicScalar, ...]:
        return tuple(PadicScalar.of(x, self.p, self.a) for x in self.entries)


def binom_coefficients(alpha: int, p: int, a: int, D: int) -> list[int]:
    """C(alpha, k) mod p^a for k = 0..D, for alpha in Z_p given by an integer lift.

    alpha is reduced modulo p^(a + v_p(D!)), which keeps C(alpha, k) exact mod
    p^a, and then a nonnegative integer binomial is taken.
    """
    q = p**a
    lift = alpha % p ** (a + int_valuation(math.factorial(D), p, 10**9))
    return [math.comb(lift, k) % q for k in range(D + 1)]


def binom_series(
    alpha: int | PadicScalar, var: int, nvars: int, D: int, p: int, a: int
) -> TruncatedSeries:
    """(1 + T_var)^alpha truncated at degree D."""
    if isinstance(alpha, PadicScalar):
        alpha = alpha.residue
    cs = binom_coefficients(int(alpha), p, a, D)
    coeffs = {}
    for k, c in enumerate(cs):
        e = [0] * nvars
        e[var] = k
        coeffs[tuple(e)] = c
    return TruncatedSeries.from_dict(coeffs, p, a, nvars, D)


def s_alpha(alpha: AlphaVector, D: int, d: int | None = None) -> TruncatedSeries:
    """S_alpha = (1+T_1) prod_j (1+T_j)^alpha_j - 1 in d = len(alpha)+1 variables."""
    nvars = len(alpha) + 1
    if d is not None and d != nvars:
        raise ShapeError("d must equal len(alpha) + 1")
    p, a = alpha.p, alpha.a
    out = TruncatedSeries.variable(0, p, a, nvars, D) + 1
    for j, x in enumerate(alpha.entries, start=1):
        out = out * binom_series(x, j, nvars, D, p, a)
    return out - 1


# ---------------------------------------------------------------------------
# One-variable helpers on coefficient lists (length D+1, residues mod q)


def poly_mul(f: Sequence[int], g: Sequence[int], q: int, D: int) -> list[int]:
    out = [0] * (D + 1)
    for i, x in enumerate(f[: D + 1]):
        if x:
            for j, y in enumerate(g[: D + 1 - i]):
                if y:
                    out[i + j] += x * y
    return [c % q for c in out]


def poly_inv(f: Sequence[int], q: int, D: int) -> list[int]:
    """Inverse of a unit series modulo T^(D+1)."""
    f = list(f) + [0] * (D + 1 - len(f))
    inv0 = pow(f[0], -1, q)
    out = [0] * (D + 1)
    out[0] = inv0
    for k in range(1, D + 1):
        s = sum(f[j] * out[k - j] for j in range(1, k + 1))
        out[k] = (-s * inv0) % q
    return out


def poly_pad(f: Sequence[int], D: int) -> list[int]:
    f = list(f[: D + 1])
    return f + [0] * (D + 1 - len(f))
