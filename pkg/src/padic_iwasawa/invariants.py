"""s(k), s'(k) and d(k) from splitting data or from inertia/decomposition ranks.

Inertia and decomposition subgroups are arithmetic input and are never
computed here; fixtures encode their ranks from local degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .errors import MissingDecompositionData, SchemaError, UnsupportedProfile
from .genericity import GenericSResult, SubmoduleFamily, generic_min_s
from .padic import PadicMatrix, rank_at_precision

FIELD_CLASSES = ("imaginary_quadratic", "complex_cubic", "totally_imaginary_quartic", "general")
_CLASS_SHAPE = {
    "imaginary_quadratic": (2, 1),
    "complex_cubic": (3, 1),
    "totally_imaginary_quartic": (4, 2),
}


@dataclass(frozen=True)
class SplittingProfile:
    field_class: str
    degree: int
    r2: int
    primes_above_p: tuple[tuple[int, int], ...]  # (residue degree f, ramification index e)
    leopoldt_defect: int = 0
    nonsplit_first_layer: bool | None = None

    def __post_init__(self) -> None:
        if self.field_class not in FIELD_CLASSES:
            raise SchemaError(f"unknown field class {self.field_class!r}")
        if self.r2 < 0 or 2 * self.r2 > self.degree:
            raise SchemaError("need 0 <= r2 <= degree/2")
        if self.leopoldt_defect < 0:
            raise SchemaError("Leopoldt defect must be nonnegative")
        if not self.primes_above_p:
            raise SchemaError("at least one prime lies above p")
        if any(f < 1 or e < 1 for f, e in self.primes_above_p):
            raise SchemaError("residue degrees and ramification indices are positive")
        if sum(f * e for f, e in self.primes_above_p) != self.degree:
            raise SchemaError("sum of e*f must equal the degree")
        shape = _CLASS_SHAPE.get(self.field_class)
        if shape and shape != (self.degree, self.r2):
            raise SchemaError(f"{self.field_class} needs (degree, r2) = {shape}")

    @property
    def splits_completely(self) -> bool:
        return len(self.primes_above_p) == self.degree

    def to_dict(self) -> dict[str, Any]:
        return {
            "class": self.field_class,
            "degree": self.degree,
            "r2": self.r2,
            "primes": [{"f": f, "e": e} for f, e in self.primes_above_p],
            "delta": self.leopoldt_defect,
            "nonsplit_first_layer": self.nonsplit_first_layer,
        }

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "SplittingProfile":
        try:
            return cls(
                obj["class"],
                int(obj["degree"]),
                int(obj["r2"]),
                tuple((int(x["f"]), int(x["e"])) for x in obj["primes"]),
                int(obj.get("delta", 0)),
                obj.get("nonsplit_first_layer"),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad splitting profile: {exc}") from exc


def d_of_k(profile: SplittingProfile) -> int:
    return profile.r2 + 1 + profile.leopoldt_defect


def s_catalog(profile: SplittingProfile) -> int:
    """Catalog value of s(k) for the classes where it is known from splitting alone."""
    d = d_of_k(profile)
    nprimes = len(profile.primes_above_p)
    if nprimes == 1:
        return 0
    cls = profile.field_class
    if cls == "imaginary_quadratic":
        return 1 if nprimes == 2 else 0
    if cls == "complex_cubic":
        return 1 if profile.splits_completely else 0
    if cls == "totally_imaginary_quartic":
        return {4: 2, 3: 1}.get(nprimes, 0)
    if profile.splits_completely:
        return d - 1
    raise UnsupportedProfile("no catalog rule applies; supply inertia data")


@dataclass(frozen=True)
class InertiaData:
    d: int
    inertia: SubmoduleFamily
    decomposition: SubmoduleFamily | None = None

    def __post_init__(self) -> None:
        for fam in (self.inertia, self.decomposition):
            if fam is None:
                continue
            if fam.d != self.d:
                raise SchemaError("family lives in a different ambient rank")
            if any(rank_at_precision(L) < 1 for L in fam.members):
                raise SchemaError("every inertia or decomposition group has rank >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "inertia": self.inertia.to_dict(),
            "decomposition": None if self.decomposition is None else self.decomposition.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "InertiaData":
        try:
            dec = obj.get("decomposition")
            return cls(
                int(obj["d"]),
                SubmoduleFamily.from_dict(obj["inertia"]),
                None if dec is None else SubmoduleFamily.from_dict(dec),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad inertia data: {exc}") from exc


def s_from_inertia(data: InertiaData, n: int = 1) -> GenericSResult:
    return generic_min_s(data.inertia, n)


def s_prime_from_decomposition(data: InertiaData, n: int = 1) -> GenericSResult:
    if data.decomposition is None:
        raise MissingDecompositionData("no decomposition family supplied")
    return generic_min_s(data.decomposition, n)


def check_assumption_decomp(data: InertiaData) -> bool:
    """Every decomposition group has Z_p-rank at least 2 (at precision)."""
    if data.decomposition is None:
        raise MissingDecompositionData("no decomposition family supplied")
    return all(rank_at_precision(L) >= 2 for L in data.decomposition.members)


def inertia_fixture(profile: SplittingProfile, p: int, a: int) -> InertiaData:
    """Inertia data whose ranks follow local degree counting.

    The prime with local degree e·f gets an inertia group of rank
    min(e·f, d), generated by consecutive vectors of the cyclic list
    e_1, ..., e_d, (1, ..., 1).  Any d of these vectors form a basis, so the
    groups sit in general position.
    """
    d = d_of_k(profile)
    pool = [tuple(int(r == c) for r in range(d)) for c in range(d)] + [(1,) * d]
    members = []
    pos = 0
    for f, e in profile.primes_above_p:
        r = min(e * f, d)
        cols = [pool[(pos + t) % len(pool)] for t in range(r)]
        pos += r
        members.append(PadicMatrix.from_columns(cols, p, a, nrows=d))
    return InertiaData(d, SubmoduleFamily(d, 1, tuple(members)))
