import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from padic_iwasawa.errors import EnumerationTooLarge, PrecisionError, ShapeError
from padic_iwasawa.grassmann import (
    ChartCoordinate,
    GrassmannPoint,
    enumerate_finite,
    from_chart,
    gaussian_binomial,
    in_neighborhood,
    level_count,
    measure_ball_exact,
    same_point,
    sample_haar,
    shear,
    standard_point,
    to_chart,
    transport,
)
from padic_iwasawa.padic import CounterStream, PadicMatrix, integer_det


def pt(cols, d, p=3, a=4):
    return GrassmannPoint.from_columns(cols, d, p, a)


def test_from_chart_examples():
    p, a = 3, 4
    N = from_chart(ChartCoordinate((0,), PadicMatrix.from_rows([[0]], p, a)))
    assert same_point(N, pt([[1, 0]], 2))
    N = from_chart(ChartCoordinate((0,), PadicMatrix.from_rows([[5]], p, a)))
    assert N.generators.column(0) == (1, 5)


def test_to_chart_examples():
    c = to_chart(pt([[1, 0, 0], [0, 1, 0]], 3))
    assert c.W == (0, 1) and c.A.is_zero()
    c = to_chart(pt([[0, 1]], 2))
    assert c.W == (1,) and c.A.to_list() == [[0]]
    c = to_chart(pt([[3, 1]], 2))
    assert c.W == (1,) and c.A.to_list() == [[3]]


def test_same_point_examples():
    p, a = 3, 4
    N = pt([[1, 0, 2], [0, 1, 1]], 3)
    assert same_point(N, pt([[0, 1, 1], [1, 0, 2]], 3))
    assert same_point(pt([[1, 0]], 2), pt([[1, p**a]], 2))
    assert not same_point(pt([[1, 0]], 2), pt([[0, 1]], 2))


def test_in_neighborhood_examples():
    N, N0 = pt([[1, 3]], 2), pt([[1, 0]], 2)
    assert in_neighborhood(N, N0, 0)
    assert in_neighborhood(N, N0, 1)
    assert not in_neighborhood(N, N0, 2)
    for n in range(5):
        assert in_neighborhood(N0, N0, n)
    with pytest.raises(PrecisionError):
        in_neighborhood(N, N0, 5)


def test_measure_examples():
    assert measure_ball_exact(2, 1, 1, 2) == Fraction(1, 3)
    assert measure_ball_exact(3, 1, 1, 2) == Fraction(1, 7)
    assert measure_ball_exact(3, 2, 0, 2) == 1


def test_enumerate_examples():
    assert len(enumerate_finite(2, 1, 3, 1)) == 4
    assert len(enumerate_finite(2, 1, 2, 2)) == 6
    (Z,) = enumerate_finite(1, 1, 5, 3)
    assert Z.generators.shape == (1, 0)
    with pytest.raises(EnumerationTooLarge):
        enumerate_finite(4, 2, 3, 5)


def span(cols, p, n, d):
    q = p**n
    out = set()
    for coeffs in itertools.product(range(q), repeat=len(cols)):
        out.add(tuple(sum(c * v[r] for c, v in zip(coeffs, cols)) % q for r in range(d)))
    return frozenset(out)


def brute_force_classes(d, i, p, n):
    """Spans of (d-i)-tuples whose reduction mod p is independent."""
    q = p**n
    k = d - i
    vecs = list(itertools.product(range(q), repeat=d))
    found = set()
    for cols in itertools.product(vecs, repeat=k):
        rows = [[c[r] % p for c in cols] for r in range(d)]
        if k and not any(
            integer_det([rows[r] for r in W]) % p for W in itertools.combinations(range(d), k)
        ):
            continue
        found.add(span(cols, p, n, d))
    return found


@pytest.mark.parametrize(
    "d,i,p,n", [(2, 1, 2, 1), (2, 1, 3, 1), (2, 1, 2, 2), (3, 1, 2, 1), (3, 2, 2, 1), (2, 2, 3, 2)]
)
def test_enumeration_matches_brute_force(d, i, p, n):
    classes = enumerate_finite(d, i, p, n)
    spans = [span(N.generators.columns(), p, n, d) for N in classes]
    assert len(set(spans)) == len(spans)
    assert set(spans) == brute_force_classes(d, i, p, n)


def test_gaussian_binomial_oracle():
    # count subspaces of F_p^d as distinct spans
    for p in (2, 3):
        for d in range(1, 4):
            vecs = list(itertools.product(range(p), repeat=d))
            for i in range(d + 1):
                subspaces = {span(cols, p, 1, d) for cols in itertools.product(vecs, repeat=i)}
                exact = {S for S in subspaces if len(S) == p**i}
                assert len(exact) == gaussian_binomial(d, i, p)


def test_fiber_counting():
    for d in range(1, 4):
        for i in range(1, d + 1):
            for p in (2, 3):
                for n in (1, 2):
                    if level_count(d, i, p, n) <= 20000:
                        assert len(enumerate_finite(d, i, p, n)) == level_count(d, i, p, n)
                        assert measure_ball_exact(d, i, n, p) == Fraction(
                            1, len(enumerate_finite(d, i, p, n))
                        )


def random_chart(rng, d, i, p, a, standard=False):
    k = d - i
    W = tuple(range(k)) if standard else tuple(sorted(rng_sample(rng, d, k)))
    A = PadicMatrix.from_rows([[rng.randbelow(p**a) for _ in range(k)] for _ in range(i)], p, a, ncols=k)
    return ChartCoordinate(W, A)


def rng_sample(rng, d, k):
    pool = list(range(d))
    out = []
    for _ in range(k):
        out.append(pool.pop(rng.randbelow(len(pool))))
    return out


def test_chart_round_trip():
    for k in range(1000):
        rng = CounterStream(7, k)
        d = 2 + k % 3
        i = 1 + rng.randbelow(d - 1)
        p = (2, 3, 5)[k % 3]
        c = random_chart(rng, d, i, p, 3, standard=True)
        assert to_chart(from_chart(c)) == c
        c2 = random_chart(rng, d, i, p, 3)
        N = from_chart(c2)
        assert same_point(from_chart(to_chart(N)), N)


def test_sample_haar_validity_and_trivial_case():
    for k in range(200):
        N = sample_haar(3, 1 + k % 3, 2, 3, CounterStream(9, k))
        GrassmannPoint(N.d, N.i, N.generators)  # revalidates the unit-minor invariant
    Z = sample_haar(2, 2, 3, 2, CounterStream(0, 0))
    assert Z.generators.shape == (2, 0)


def test_transitivity():
    for k in range(1000):
        rng = CounterStream(13, k)
        d = 2 + k % 3
        i = 1 + k % (d - 1) if d > 1 else 1
        p = (2, 3)[k % 2]
        N = sample_haar(d, i, p, 3, rng)
        N2 = sample_haar(d, i, p, 3, CounterStream(14, k))
        g = transport(N, N2)
        assert g.is_invertible()
        assert same_point(N.transform(g), N2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3), st.sampled_from([2, 3]))
def test_neighborhood_nesting(seed, n, p):
    rng = CounterStream(seed, 0)
    N0 = sample_haar(3, 1, p, 4, rng)
    N = sample_haar(3, 1, p, 4, rng)
    if in_neighborhood(N, N0, n + 1):
        assert in_neighborhood(N, N0, n)


def test_neighborhood_is_symmetric_and_matches_reduction():
    # V_n(N0) is exactly the class of N0 at level n
    for k in range(300):
        rng = CounterStream(21, k)
        N0 = sample_haar(3, 2, 2, 3, rng)
        N = sample_haar(3, 2, 2, 3, rng)
        for n in (1, 2):
            same = to_chart(N.reduce(n)) == to_chart(N0.reduce(n))
            assert in_neighborhood(N, N0, n) == same == in_neighborhood(N0, N, n)


def test_sampling_consistency_level2():
    d, i, p, n = 2, 1, 2, 2
    classes = {to_chart(c): 0 for c in enumerate_finite(d, i, p, n)}
    samples = 100000
    for k in range(samples):
        classes[to_chart(sample_haar(d, i, p, 4, CounterStream(99, k)).reduce(n))] += 1
    mu = float(measure_ball_exact(d, i, n, p))
    sd = (mu * (1 - mu) / samples) ** 0.5
    for c in classes.values():
        assert abs(c / samples - mu) <= 3 * sd


def test_shear_examples():
    p, a = 3, 3
    B = PadicMatrix.from_rows([[1, 2], [0, 4], [5, 6]], p, a)
    C0 = PadicMatrix.zeros(2, 1, p, a)
    assert shear(B, C0) == (B, C0)
    C = PadicMatrix.from_rows([[7], [8]], p, a)
    B2, C2 = shear(B, C)
    assert B2.select_rows([0]) == B.select_rows([0])
    assert shear(B2, -C) == (B, -C)
    with pytest.raises(ShapeError):
        shear(B, PadicMatrix.zeros(1, 1, p, a))


def test_shear_preserves_uniform_measure():
    p, a = 2, 3
    samples = 100000
    hist = {}
    for k in range(samples):
        rng = CounterStream(31, k)
        B = PadicMatrix.from_rows([[rng.randbelow(p**a)] for _ in range(3)], p, a)
        C = PadicMatrix.from_rows([[rng.randbelow(p**a)] for _ in range(2)], p, a)
        B2, _ = shear(B, C)
        key = (B2.reduce(1).data, C.reduce(1).data)
        hist[key] = hist.get(key, 0) + 1
    assert len(hist) == 2**5
    stat, _ = chisquare(list(hist.values()))
    assert stat < 61.10  # chi2(31) 99.9th percentile


def test_json_round_trip():
    N = sample_haar(4, 2, 3, 3, CounterStream(0, 1))
    assert GrassmannPoint.from_dict(N.to_dict()) == N
    c = to_chart(N)
    assert ChartCoordinate.from_dict(c.to_dict(), 4, 3, 3) == c
    assert standard_point(3, 1, 2, 2).to_dict()["generators"] == [[1, 0], [0, 1], [0, 0]]
