import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from padic_iwasawa.errors import NotInvertibleError, PrecisionError
from padic_iwasawa.padic import (
    CounterStream,
    PadicMatrix,
    PadicScalar,
    gl_acceptance_probability,
    in_span,
    integer_det,
    rank_at_precision,
    sample_gl,
    sample_gl_counted,
    saturated_kernel,
    smith_normal_form,
    solve,
    valuation,
)

from conftest import smith_valuations_by_minors


@pytest.mark.parametrize(
    "p,a,r,expected", [(3, 4, 9, 2), (2, 5, 0, 5), (5, 3, 7, 0)]
)
def test_valuation_examples(p, a, r, expected):
    assert valuation(PadicScalar(p, a, r)) == expected


def test_scalar_arithmetic():
    x = PadicScalar.of(-1, 3, 2)
    assert x.residue == 8
    assert (x * x).residue == 1
    assert x.inverse() == x
    assert (x + 1).is_zero()
    assert x.signed() == -1
    with pytest.raises(NotInvertibleError):
        PadicScalar(3, 2, 3).inverse()
    with pytest.raises(ValueError):
        PadicScalar(4, 2, 1)
    with pytest.raises(PrecisionError):
        PadicScalar(3, 2, 1) + PadicScalar(3, 3, 1)


def test_smith_examples():
    assert smith_normal_form(PadicMatrix.identity(3, 5, 2)).diagonal_valuations == (0, 0, 0)
    assert smith_normal_form(PadicMatrix.diagonal([3, 1], 3, 4)).diagonal_valuations == (0, 1)
    A = PadicMatrix.from_rows([[1, 2], [3, 4]], 5, 4)
    assert smith_normal_form(A).diagonal_valuations == (0, 0)


def test_rank_examples():
    assert rank_at_precision(PadicMatrix.zeros(2, 3, 3, 4)) == 0
    assert rank_at_precision(PadicMatrix.from_rows([[3, 0], [0, 3]], 3, 1)) == 0
    assert rank_at_precision(PadicMatrix.from_rows([[1, 1], [1, 1]], 7, 3)) == 1


def test_smith_frozen_golden():
    # entries have gcd 2, 2x2 minors gcd 4, det = 208 = 2^4 * 13
    A = PadicMatrix.from_rows([[2, 4, 0], [0, 2, 8], [6, 0, 4]], 2, 6)
    assert smith_normal_form(A).diagonal_valuations == tuple(
        smith_valuations_by_minors(A.data, 2, 6)
    )
    assert smith_normal_form(A).diagonal_valuations == (1, 1, 2)


matrices = st.tuples(
    st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)
).flatmap(
    lambda t: st.tuples(
        st.just(t[0]),
        st.just(t[1]),
        st.lists(
            st.lists(
                st.one_of(
                    st.integers(0, t[0] ** t[1] - 1),
                    st.sampled_from([0, 1, t[0], t[0] ** 2]),
                ),
                min_size=t[3],
                max_size=t[3],
            ),
            min_size=t[2],
            max_size=t[2],
        ),
    )
)


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_smith_transforms_diagonalize(m):
    p, a, rows = m
    A = PadicMatrix.from_rows(rows, p, a)
    sf = smith_normal_form(A)
    assert sf.left_transform.is_invertible() and sf.right_transform.is_invertible()
    D = sf.left_transform @ A @ sf.right_transform
    vals = sf.diagonal_valuations
    assert list(vals) == sorted(vals)
    for r in range(A.nrows):
        for c in range(A.ncols):
            want = p ** vals[r] % p**a if r == c else 0
            assert D[r, c] == want


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_matches_determinantal_divisors(m):
    p, a, rows = m
    A = PadicMatrix.from_rows(rows, p, a)
    assert list(smith_normal_form(A).diagonal_valuations) == smith_valuations_by_minors(
        A.data, p, a
    )


def test_rank_invariant_under_gl():
    for k in range(1000):
        rng = CounterStream(11, k)
        p = (2, 3, 5)[k % 3]
        a = 1 + k % 3
        A = PadicMatrix.from_rows(
            [[rng.randbelow(p) * p ** rng.randbelow(2) for _ in range(3)] for _ in range(3)], p, a
        )
        g = sample_gl(3, p, a, rng)
        h = sample_gl(3, p, a, rng)
        assert rank_at_precision(g @ A @ h) == rank_at_precision(A)


def test_solve_and_kernel():
    A = PadicMatrix.from_rows([[3, 0], [0, 1]], 3, 3)
    assert solve(A, [6, 5]) is not None
    assert solve(A, [1, 0]) is None
    assert in_span(A, [1, 0], 0 + 1) is False
    x = solve(A, [9, 2])
    assert A.apply(x) == (9, 2)
    K = saturated_kernel(PadicMatrix.from_rows([[1, 1, 0], [0, 0, 0]], 3, 3))
    assert K.ncols == 2
    assert rank_at_precision(PadicMatrix.from_rows([[1, 1, 0]], 3, 3) @ K) == 0
    # torsion solutions such as 9 e_1 of [[3]] are not part of the free kernel
    assert saturated_kernel(PadicMatrix.from_rows([[3]], 3, 3)).ncols == 0


def test_inverse_and_det():
    A = PadicMatrix.from_rows([[2, 1], [1, 1]], 5, 3)
    assert (A @ A.inverse()) == PadicMatrix.identity(2, 5, 3)
    assert A.det().residue == 1
    with pytest.raises(NotInvertibleError):
        PadicMatrix.from_rows([[5, 0], [0, 1]], 5, 3).inverse()
    assert integer_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3


def count_gl(d, p):
    return sum(
        1
        for flat in itertools.product(range(p), repeat=d * d)
        if integer_det([flat[r * d:(r + 1) * d] for r in range(d)]) % p
    )


def test_gl_acceptance_probability_oracle():
    assert gl_acceptance_probability(1, 2) == Fraction(1, 2)
    assert gl_acceptance_probability(2, 3) == Fraction(16, 27)
    assert Fraction(count_gl(2, 3), 3**4) == Fraction(16, 27)
    assert Fraction(count_gl(2, 2), 2**4) == gl_acceptance_probability(2, 2)


def test_gl_empirical_acceptance():
    attempts = sum(sample_gl_counted(2, 3, 2, CounterStream(5, k))[1] for k in range(20000))
    rate = 20000 / attempts
    assert abs(rate - 16 / 27) < 0.01


def test_sample_gl_invertible_mod_p():
    for k in range(500):
        g = sample_gl(3, 2, 3, CounterStream(1, k))
        assert integer_det(g.reduce(1).data) % 2 == 1


def test_sample_gl_entry_distribution():
    # The marginal of one entry mod p is the GL_d(F_p) marginal, which puts
    # mass (p^(d-1)-1)/(p^d-1) on 0; it is not uniform on F_p.
    d, p = 2, 3
    counts = [0] * p
    for flat in itertools.product(range(p), repeat=4):
        if integer_det([flat[:2], flat[2:]]) % p:
            counts[flat[0]] += 1
    assert counts == [12, 18, 18]
    n = 100000
    obs = [0] * p
    for k in range(n):
        g = sample_gl(d, p, 3, CounterStream(2024, k))
        obs[g[0, 0] % p] += 1
    exp = [n * c / sum(counts) for c in counts]
    stat, _ = chisquare(obs, exp)
    assert stat < 13.82  # chi2(2) 99.9th percentile


def test_stream_is_keyed_by_index():
    a = [CounterStream(3, 7).randbelow(1000) for _ in range(3)]
    s = CounterStream(3, 7)
    b = [s.randbelow(1000) for _ in range(3)]
    assert a[0] == b[0]
    assert CounterStream(3, 8).getrandbits(64) != CounterStream(3, 7).getrandbits(64)
    assert CounterStream(3, 7).getrandbits(600) == CounterStream(3, 7).getrandbits(600)
