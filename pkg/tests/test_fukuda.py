import pytest
from hypothesis import given, settings, strategies as st

from padic_iwasawa.errors import NegativeEntry, NotStabilized, SchemaError
from padic_iwasawa.fukuda import (
    ClassNumberSequence,
    InvariantFit,
    fit_lambda_mu_nu,
    fukuda_check,
    openness_radius,
    synthesize_tower,
)


def seq(p, e, n0=0, s=0):
    return ClassNumberSequence(p, tuple(e), n0, s)


def test_fit_examples():
    assert fit_lambda_mu_nu(seq(3, (1, 5, 13, 33, 89))) == InvariantFit(2, 1, 0, 0)
    assert fit_lambda_mu_nu(seq(3, (0, 0, 0, 0))) == InvariantFit(0, 0, 0, 0)
    assert fit_lambda_mu_nu(seq(2, (0, 1, 3, 7, 15))) == InvariantFit(0, 1, -1, 0)


def test_fit_onset_after_noise():
    s = synthesize_tower(1, 0, 4, 5, 8, noise_prefix=(0, 0, 0))
    assert s.e == (0, 0, 0, 7, 8, 9, 10, 11)
    assert fit_lambda_mu_nu(s) == InvariantFit(1, 0, 4, 3)


def test_fit_not_stabilized():
    with pytest.raises(NotStabilized):
        fit_lambda_mu_nu(seq(3, (0, 0)))
    with pytest.raises(NotStabilized):
        fit_lambda_mu_nu(seq(3, (0, 5, 6)))  # forces mu not integral
    with pytest.raises(NotStabilized):
        fit_lambda_mu_nu(seq(2, (10, 20, 21)))  # forces negative mu


def test_check_examples():
    v = fukuda_check(seq(3, (2, 2), s=0))
    assert v.conclusive and v.rank == 0 and v.witness == 0 and v.radius == 1
    v = fukuda_check(seq(3, (0, 1, 2), s=1))
    assert v.conclusive and v.rank == 1
    assert not fukuda_check(seq(3, (0, 1, 3), s=0)).conclusive


def test_openness_radius():
    assert openness_radius(seq(3, (2, 2))) == 1
    assert openness_radius(seq(2, (0, 1, 3, 7, 7), s=0)) == 4
    assert openness_radius(seq(3, (0, 1, 3))) is None


def test_n0_respected():
    e = (0, 0, 3, 4)
    assert fukuda_check(seq(3, e, n0=0, s=1)).witness == 0
    v = fukuda_check(seq(3, e, n0=1, s=1))
    assert v.witness == 2 and v.rank == 1


def test_validation():
    with pytest.raises(NegativeEntry):
        seq(3, (1, -1))
    with pytest.raises(SchemaError):
        seq(3, ())
    with pytest.raises(SchemaError):
        seq(3, (1, 2), n0=2)
    with pytest.raises(NegativeEntry):
        synthesize_tower(0, 1, -5, 2, 4)


def test_synthesize_examples():
    assert synthesize_tower(2, 1, 0, 3, 5).e == (1, 5, 13, 33, 89)
    assert synthesize_tower(0, 0, 7, 5, 6).e == (7,) * 6


triples = st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-10, 10), st.sampled_from([2, 3, 5, 7]))


@settings(max_examples=300, deadline=None)
@given(triples, st.integers(0, 4))
def test_round_trip(t, extra):
    lam, mu, nu, p = t
    # nonnegativity at n = 0 needs mu + nu >= 0
    if mu + nu < 0:
        nu = -mu
    s = synthesize_tower(lam, mu, nu, p, 4 + extra)
    f = fit_lambda_mu_nu(s)
    assert (f.lam, f.mu, f.nu) == (lam, mu, nu)
    assert f.onset == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=2, max_size=8), st.lists(st.integers(0, 30), max_size=4), st.integers(0, 3))
def test_monotone_in_data(e, more, s):
    v = fukuda_check(seq(3, e, s=s))
    w = fukuda_check(seq(3, list(e) + list(more), s=s))
    if v.conclusive:
        assert w == v


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.lists(st.integers(1, 5), max_size=4), st.integers(0, 10), st.integers(3, 6))
def test_conclusive_implies_fit(lam, slack, jumps, start, tail):
    # towers meeting the hypotheses: before the trigger every step exceeds s,
    # after it the steps are constant and equal to the rank
    s = lam + slack
    e = [start]
    for j in jumps:
        e.append(e[-1] + s + j)
    for _ in range(tail):
        e.append(e[-1] + lam)
    tower = seq(3, e, s=s)
    v = fukuda_check(tower)
    assert v.conclusive and v.witness == len(jumps) and v.rank == lam
    f = fit_lambda_mu_nu(tower)
    assert f.mu == 0 and f.lam == v.rank and f.onset <= v.witness + 1


def test_check_outside_hypotheses():
    # e_n = 2^n is not a tower where the criterion applies; it triggers on the
    # first step although mu = 1
    tower = synthesize_tower(0, 1, 0, 2, 6, s=1)
    assert fukuda_check(tower).conclusive
    assert fit_lambda_mu_nu(tower).mu == 1


def test_csv_and_json():
    s = ClassNumberSequence.from_csv("n,e_n\n0,0\n1,1\n2,2\n", 3, s=1)
    assert s.e == (0, 1, 2)
    assert ClassNumberSequence.from_dict(s.to_dict()) == s
    with pytest.raises(SchemaError):
        ClassNumberSequence.from_csv("0,0\n2,1\n", 3)
    with pytest.raises(SchemaError):
        ClassNumberSequence.from_csv("0,x\n", 3)
    with pytest.raises(SchemaError):
        ClassNumberSequence.from_dict({"p": 3})
