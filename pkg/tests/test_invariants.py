import pytest

from padic_iwasawa.errors import MissingDecompositionData, SchemaError, UnsupportedProfile
from padic_iwasawa.genericity import SubmoduleFamily, s_of
from padic_iwasawa.grassmann import GrassmannPoint
from padic_iwasawa.invariants import (
    InertiaData,
    SplittingProfile,
    check_assumption_decomp,
    d_of_k,
    inertia_fixture,
    s_catalog,
    s_from_inertia,
    s_prime_from_decomposition,
)

P, A = 3, 6

QUAD = {"split": ((1, 1), (1, 1)), "inert": ((2, 1),), "ramified": ((1, 2),)}
CUBIC = {1: ((3, 1),), 2: ((1, 1), (2, 1)), 3: ((1, 1), (1, 1), (1, 1))}
QUARTIC = {
    1: ((4, 1),),
    2: ((1, 2), (1, 2)),
    3: ((1, 1), (1, 1), (2, 1)),
    4: ((1, 1),) * 4,
}


def quad(kind):
    return SplittingProfile("imaginary_quadratic", 2, 1, QUAD[kind])


def cubic(n):
    return SplittingProfile("complex_cubic", 3, 1, CUBIC[n])


def quartic(n):
    return SplittingProfile("totally_imaginary_quartic", 4, 2, QUARTIC[n])


def all_fixtures():
    return [quad(k) for k in QUAD] + [cubic(n) for n in CUBIC] + [quartic(n) for n in QUARTIC]


def fam(members, d):
    return SubmoduleFamily.from_columns(members, d, 1, P, A)


def test_d_of_k():
    assert d_of_k(quad("split")) == 2
    assert d_of_k(cubic(3)) == 2
    assert d_of_k(quartic(2)) == 3
    pr = SplittingProfile("imaginary_quadratic", 2, 1, QUAD["split"], leopoldt_defect=1)
    assert d_of_k(pr) == 3


def test_catalog_values():
    assert s_catalog(quad("split")) == 1
    assert s_catalog(quad("inert")) == 0 and s_catalog(quad("ramified")) == 0
    assert [s_catalog(cubic(n)) for n in (1, 2, 3)] == [0, 0, 1]
    assert [s_catalog(quartic(n)) for n in (1, 2, 3, 4)] == [0, 0, 1, 2]
    one_prime = SplittingProfile("general", 5, 2, ((5, 1),))
    assert s_catalog(one_prime) == 0


def test_unsupported_profile():
    with pytest.raises(UnsupportedProfile):
        s_catalog(SplittingProfile("general", 6, 3, ((1, 2), (2, 2))))


def test_profile_validation_and_json():
    with pytest.raises(SchemaError):
        SplittingProfile("imaginary_quadratic", 2, 1, ((1, 1),))
    with pytest.raises(SchemaError):
        SplittingProfile("complex_cubic", 4, 1, ((4, 1),))
    with pytest.raises(SchemaError):
        SplittingProfile("sextic", 6, 3, ((6, 1),))
    pr = quartic(3)
    assert SplittingProfile.from_dict(pr.to_dict()) == pr
    assert pr.to_dict()["primes"][2] == {"f": 2, "e": 1}


@pytest.mark.parametrize("profile", all_fixtures(), ids=lambda pr: f"{pr.field_class}-{len(pr.primes_above_p)}")
def test_catalog_matches_inertia(profile):
    data = inertia_fixture(profile, P, A)
    r = s_from_inertia(data)
    assert r.s == s_catalog(profile)
    assert 0 <= r.s <= d_of_k(profile) - 1
    assert r.fraction > 0.5


def test_s_from_inertia_examples():
    full = InertiaData(2, fam([[[1, 0], [0, 1]]], 2))
    assert s_from_inertia(full).s == 0
    lines = InertiaData(2, fam([[[1, 0]], [[0, 1]]], 2))
    assert s_from_inertia(lines).s == 1


def test_quartic_two_primes_not_constant():
    data = inertia_fixture(quartic(2), P, A)
    r = s_from_inertia(data)
    assert r.s == 0
    # N through the common line L_1 ∩ L_2 = <(1,1,0)> without containing either group
    N = GrassmannPoint.from_columns([[1, 1, 0], [1, 0, 1]], 3, P, A)
    assert s_of(N, data.inertia) == 1
    N0 = GrassmannPoint.from_columns([[1, 0, 0], [0, 0, 1]], 3, P, A)
    assert s_of(N0, data.inertia) == 0


def test_s_prime_examples():
    inert = fam([[[1, 0], [0, 1]]], 2)
    d = InertiaData(2, inert, fam([[[1, 0], [0, 1]]], 2))
    assert s_prime_from_decomposition(d).s == 0
    d3 = InertiaData(3, fam([[[1, 0, 0]]], 3), fam([[[1, 0, 0]], [[0, 1, 0]]], 3))
    assert s_prime_from_decomposition(d3).s == 2
    # abelian-type fixture: full-rank decomposition groups, s' = 0
    ab = InertiaData(
        3,
        fam([[[1, 0, 0]], [[0, 1, 0]]], 3),
        fam([[[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]], 3),
    )
    assert s_prime_from_decomposition(ab).s == 0
    for data in (d, d3, ab):
        assert s_prime_from_decomposition(data).s <= data.d - 1


def test_assumption_decomp():
    two = fam([[[1, 0, 0], [0, 1, 0]], [[0, 1, 0], [0, 0, 1]]], 3)
    assert check_assumption_decomp(InertiaData(3, two, two))
    mixed = fam([[[1, 0, 0], [0, 1, 0]], [[0, 0, 1]]], 3)
    assert not check_assumption_decomp(InertiaData(3, two, mixed))
    equal = fam([[[1, 0, 0], [0, 1, 0], [0, 0, 1]]] * 3, 3)
    data = InertiaData(3, two, equal)
    assert check_assumption_decomp(data) and s_prime_from_decomposition(data).s == 0
    with pytest.raises(MissingDecompositionData):
        check_assumption_decomp(InertiaData(3, two))
    with pytest.raises(MissingDecompositionData):
        s_prime_from_decomposition(InertiaData(3, two))


def test_inertia_json():
    data = inertia_fixture(quartic(3), P, A)
    assert InertiaData.from_dict(data.to_dict()) == data
    with pytest.raises(SchemaError):
        InertiaData.from_dict({"d": 2})
