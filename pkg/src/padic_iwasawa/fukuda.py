"""Iwasawa invariants of class-number towers and the Fukuda-type criterion.

A tower is given by e_n = v_p(#X(k_n)).  For n large,
e_n = lam·n + mu·p^n + nu.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .errors import NegativeEntry, NotStabilized, SchemaError
from .padic import check_prime


@dataclass(frozen=True)
class ClassNumberSequence:
    p: int
    e: tuple[int, ...]
    n0: int = 0
    s: int = 0

    def __post_init__(self) -> None:
        check_prime(self.p)
        if not self.e:
            raise SchemaError("the sequence must be nonempty")
        if any(x < 0 for x in self.e):
            raise NegativeEntry("valuations of class numbers are nonnegative")
        if not 0 <= self.n0 < len(self.e):
            raise SchemaError("n0 must index an entry of the sequence")
        if self.s < 0:
            raise SchemaError("s must be nonnegative")

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "n0": self.n0, "s": self.s, "e": list(self.e)}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "ClassNumberSequence":
        try:
            return cls(
                int(obj["p"]),
                tuple(int(x) for x in obj["e"]),
                int(obj.get("n0", 0)),
                int(obj.get("s", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad class number sequence: {exc}") from exc

    @classmethod
    def from_csv(cls, text: str, p: int, n0: int = 0, s: int = 0) -> "ClassNumberSequence":
        """Rows ``n,e_n`` (header optional); n must run 0, 1, 2, ..."""
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(x.strip() for x in r)]
        if rows and not rows[0][0].strip().lstrip("-").isdigit():
            rows = rows[1:]
        try:
            pairs = sorted((int(r[0]), int(r[1])) for r in rows)
        except (IndexError, ValueError) as exc:
            raise SchemaError(f"bad CSV row: {exc}") from exc
        if [n for n, _ in pairs] != list(range(len(pairs))):
            raise SchemaError("CSV must list n = 0, 1, 2, ... without gaps")
        return cls(p, tuple(x for _, x in pairs), n0, s)


@dataclass(frozen=True)
class InvariantFit:
    lam: int
    mu: int
    nu: int
    onset: int

    def to_dict(self) -> dict[str, Any]:
        return {"lambda": self.lam, "mu": self.mu, "nu": self.nu, "onset": self.onset}


def fit_lambda_mu_nu(seq: ClassNumberSequence) -> InvariantFit:
    """Exact solve from the last three entries, then walk back to the onset."""
    e, p = seq.e, seq.p
    if len(e) < 3:
        raise NotStabilized("need at least three entries")
    N = len(e) - 1
    d1 = e[N] - e[N - 1]
    d2 = e[N - 1] - e[N - 2]
    # d1 - d2 = mu·(p-1)^2·p^(N-2)
    den = (p - 1) ** 2 * p ** (N - 2)
    if (d1 - d2) % den:
        raise NotStabilized("last three entries admit no integral mu")
    mu = (d1 - d2) // den
    lam = d1 - mu * (p - 1) * p ** (N - 1)
    if mu < 0 or lam < 0:
        raise NotStabilized("last three entries force a negative invariant")
    nu = e[N] - lam * N - mu * p**N
    onset = N
    while onset > 0 and e[onset - 1] == lam * (onset - 1) + mu * p ** (onset - 1) + nu:
        onset -= 1
    return InvariantFit(lam, mu, nu, onset)


@dataclass(frozen=True)
class FukudaVerdict:
    conclusive: bool
    rank: int | None = None
    witness: int | None = None
    radius: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "conclusive": self.conclusive,
            "rank": self.rank,
            "witness": self.witness,
            "radius": self.radius,
        }


def fukuda_check(seq: ClassNumberSequence) -> FukudaVerdict:
    """First n >= n0 with 0 <= e_{n+1} - e_n <= s.

    Such an n shows X(K) is finitely generated over Z_p of rank
    e_{n+1} - e_n (so mu = 0), and that this rank equals s(K/k).
    """
    e = seq.e
    for n in range(seq.n0, len(e) - 1):
        diff = e[n + 1] - e[n]
        if 0 <= diff <= seq.s:
            return FukudaVerdict(True, rank=diff, witness=n, radius=n + 1)
    return FukudaVerdict(False)


def openness_radius(seq: ClassNumberSequence) -> int | None:
    """Layer depth n+1 for the witness n, or None when inconclusive."""
    return fukuda_check(seq).radius


def synthesize_tower(
    lam: int,
    mu: int,
    nu: int,
    p: int,
    length: int,
    noise_prefix: Sequence[int] = (),
    s: int = 0,
    n0: int = 0,
) -> ClassNumberSequence:
    """e_n = lam·n + mu·p^n + nu, with the first entries replaced by ``noise_prefix``."""
    if lam < 0 or mu < 0:
        raise ValueError("lambda and mu are nonnegative")
    if length < 1 or len(noise_prefix) > length:
        raise ValueError("bad length")
    e = list(noise_prefix) + [
        lam * n + mu * p**n + nu for n in range(len(noise_prefix), length)
    ]
    if any(x < 0 for x in e):
        raise NegativeEntry("synthesized tower has a negative entry")
    return ClassNumberSequence(p, tuple(e), n0, s)
