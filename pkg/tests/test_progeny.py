"""Unit tests for total-progeny moments, pmfs, and certified sums.

Frozen expected values come from independent computations: direct pmf series
with math.lgamma, geometric closed forms for the h = 1 binomial cascade, and
closed geometric-series identities for the exponential sums.
"""
import math

import pytest

from chaos_bounds import (
    Binomial,
    CertifiedSum,
    DomainError,
    FactorialMoments,
    InsufficientMoments,
    PoissonMean,
    SupercriticalError,
    abel_plana_bound,
    borel_pmf,
    compositions,
    consul_pmf,
    factorial_moments,
    progeny_moment,
    progeny_moment_closed,
    progeny_moment_series,
    progeny_moment_table,
)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# offspring laws and factorial moments


def test_factorial_moments_poisson():
    assert factorial_moments(PoissonMean(0.5), 3) == [0.5, 0.25, 0.125]


def test_factorial_moments_binomial():
    # E(P)_i = (h)_i p^i, zero past i = h
    assert factorial_moments(Binomial(2, 0.25), 3) == [0.5, 0.125, 0.0]
    assert factorial_moments(Binomial(1, 0.5), 2) == [0.5, 0.0]


def test_factorial_moments_stored_list():
    law = FactorialMoments((0.4, 0.1))
    assert factorial_moments(law, 2) == [0.4, 0.1]
    with pytest.raises(InsufficientMoments):
        factorial_moments(law, 3)


def test_offspring_validation():
    with pytest.raises(SupercriticalError):
        PoissonMean(1.0)
    with pytest.raises(DomainError):
        PoissonMean(0.0)
    with pytest.raises(DomainError):
        PoissonMean(-0.5)
    with pytest.raises(DomainError):
        Binomial(0, 0.5)
    with pytest.raises(DomainError):
        Binomial(2, 1.2)
    with pytest.raises(SupercriticalError):
        Binomial(2, 0.6)
    with pytest.raises(SupercriticalError):
        FactorialMoments((1.5, 0.1))
    with pytest.raises(DomainError):
        FactorialMoments(())
    with pytest.raises(DomainError):
        FactorialMoments((0.5, -0.1))


# ---------------------------------------------------------------------------
# compositions


def test_compositions_examples():
    assert compositions(3, 2) == [(1, 2), (2, 1)]
    assert compositions(4, 4) == [(1, 1, 1, 1)]
    assert compositions(2, 3) == []
    assert compositions(5, 1) == [(5,)]
    assert compositions(5, 3) == [
        (1, 1, 3),
        (1, 2, 2),
        (1, 3, 1),
        (2, 1, 2),
        (2, 2, 1),
        (3, 1, 1),
    ]


def test_compositions_counts():
    for k in range(1, 9):
        for i in range(1, 9):
            got = compositions(k, i)
            assert len(got) == (math.comb(k - 1, i - 1) if i <= k else 0)
            assert all(len(t) == i and sum(t) == k and min(t) >= 1 for t in got)


def test_compositions_validation():
    with pytest.raises(DomainError):
        compositions(0, 1)
    with pytest.raises(DomainError):
        compositions(3, 0)


# ---------------------------------------------------------------------------
# moment recursion vs closed forms and frozen goldens


def test_poisson_golden_moments():
    law = PoissonMean(0.5)
    assert progeny_moment_closed(law, 1) == 2.0
    assert progeny_moment_closed(law, 2) == 8.0
    assert progeny_moment_closed(law, 3) == 64.0
    assert progeny_moment_closed(law, 4) == 832.0
    for n in (1, 2, 3, 4):
        assert rel_err(progeny_moment(law, n), progeny_moment_closed(law, n)) <= 1e-12


def test_binomial_golden_moments():
    # h = 1 makes Z geometric on {1, 2, ...}; moments from the closed
    # geometric sums: (2, 6, 26, 150) at p = 0.5
    law = Binomial(1, 0.5)
    for n, want in [(1, 2.0), (2, 6.0), (3, 26.0), (4, 150.0)]:
        assert rel_err(progeny_moment_closed(law, n), want) <= 1e-12
        assert rel_err(progeny_moment(law, n), want) <= 1e-12


def test_consul_golden_moments():
    # independent direct-summation values for Binomial(2, 0.25)
    law = Binomial(2, 0.25)
    for n, want in [(1, 2.0), (2, 7.0), (3, 42.5), (4, 391.75)]:
        assert rel_err(progeny_moment(law, n), want) <= 1e-12
        assert rel_err(progeny_moment_closed(law, n), want) <= 1e-12


@pytest.mark.parametrize("h", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_recursion_matches_closed_poisson(h):
    law = PoissonMean(h)
    for n in (1, 2, 3, 4):
        assert rel_err(progeny_moment(law, n), progeny_moment_closed(law, n)) <= 1e-12


@pytest.mark.parametrize("h,p", [(1, 0.3), (1, 0.7), (2, 0.25), (3, 0.2), (5, 0.15)])
def test_recursion_matches_closed_binomial(h, p):
    law = Binomial(h, p)
    for n in (1, 2, 3, 4):
        assert rel_err(progeny_moment(law, n), progeny_moment_closed(law, n)) <= 1e-12


def test_zero_offspring_degenerate():
    # no offspring at all: Z = 1, every moment is 1
    law = FactorialMoments((0.0,) * 6)
    for n in (1, 2, 3, 4, 6):
        assert progeny_moment(law, n) == 1.0
    assert progeny_moment_closed(law, 4) == 1.0


def test_moment_table():
    table = progeny_moment_table(PoissonMean(0.5), 4)
    assert table.n_max == 4
    assert table.moment(1) == 2.0
    assert rel_err(table.moment(4), 832.0) <= 1e-12
    assert table.moments == tuple(progeny_moment(PoissonMean(0.5), n) for n in (1, 2, 3, 4))
    with pytest.raises(InsufficientMoments):
        table.moment(5)
    with pytest.raises(InsufficientMoments):
        table.moment(0)


def test_closed_form_order_limit():
    with pytest.raises(DomainError):
        progeny_moment_closed(PoissonMean(0.5), 5)


def test_high_order_recursion_finite():
    # m_max = 12 is used by the cumulant checks; make sure it stays finite and
    # increasing out to there
    table = progeny_moment_table(PoissonMean(0.9), 12)
    assert all(math.isfinite(v) for v in table.moments)
    assert all(b > a for a, b in zip(table.moments, table.moments[1:]))


# ---------------------------------------------------------------------------
# pmfs


def test_borel_pmf_goldens():
    assert rel_err(borel_pmf(0.5, 1), math.exp(-0.5)) <= 1e-13
    assert rel_err(borel_pmf(0.3, 1), math.exp(-0.3)) <= 1e-13
    # k = 2: e^{-2h} (2h)^1 / 2 = h e^{-2h}
    assert rel_err(borel_pmf(0.5, 2), 0.5 * math.exp(-1.0)) <= 1e-13


def test_consul_pmf_goldens():
    # k = 1: (1-p)^h
    assert rel_err(consul_pmf(2, 0.25, 1), 0.75 ** 2) <= 1e-13
    assert rel_err(consul_pmf(3, 0.2, 1), 0.8 ** 3) <= 1e-13
    # h = 1 reduces to the geometric pmf p^{k-1}(1-p)
    for k in (1, 2, 5, 9):
        assert rel_err(consul_pmf(1, 0.3, k), 0.3 ** (k - 1) * 0.7) <= 1e-12
    # hand value: (1/2) C(4,1) p (1-p)^3 at p = 0.25
    assert rel_err(consul_pmf(2, 0.25, 2), 0.2109375) <= 1e-13


@pytest.mark.parametrize("h", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_borel_pmf_normalizes(h):
    total = sum(borel_pmf(h, k) for k in range(1, 3000))
    assert abs(total - 1.0) <= 1e-10


@pytest.mark.parametrize("h,p", [(1, 0.5), (2, 0.3), (3, 0.25), (4, 0.2)])
def test_consul_pmf_normalizes(h, p):
    total = sum(consul_pmf(h, p, k) for k in range(1, 3000))
    assert abs(total - 1.0) <= 1e-10


def test_pmf_validation():
    with pytest.raises(DomainError):
        borel_pmf(1.2, 3)
    with pytest.raises(DomainError):
        borel_pmf(0.5, 0)
    with pytest.raises(DomainError):
        consul_pmf(0, 0.5, 1)
    with pytest.raises(SupercriticalError):
        consul_pmf(2, 0.5, 1)
    with pytest.raises(DomainError):
        consul_pmf(2, 0.25, 0)


# ---------------------------------------------------------------------------
# certified series vs recursion


@pytest.mark.parametrize("h", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_series_matches_recursion_poisson(h, m):
    series = progeny_moment_series(PoissonMean(h), m, 1e-10)
    assert rel_err(series, progeny_moment(PoissonMean(h), m)) <= 1e-7


@pytest.mark.parametrize("h,p", [(1, 0.3), (1, 0.6), (2, 0.25), (3, 0.2), (4, 0.15)])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_series_matches_recursion_binomial(h, p, m):
    law = Binomial(h, p)
    series = progeny_moment_series(law, m, 1e-10)
    assert rel_err(series, progeny_moment(law, m)) <= 1e-7


def test_series_geometric_mean():
    # Bernoulli(0.3) offspring: E Z = 1/0.7
    got = progeny_moment_series(Binomial(1, 0.3), 1, 1e-10)
    assert rel_err(got, 1.0 / 0.7) <= 1e-9


def test_series_edge_cases():
    assert progeny_moment_series(PoissonMean(0.5), 0, 1e-10) == 1.0
    with pytest.raises(DomainError):
        progeny_moment_series(FactorialMoments((0.5,)), 2, 1e-10)
    with pytest.raises(DomainError):
        progeny_moment_series(PoissonMean(0.5), 2, 0.0)
    with pytest.raises(DomainError):
        progeny_moment_series(PoissonMean(0.5), -1, 1e-10)


# ---------------------------------------------------------------------------
# certified exponential sums


def exp_sum_direct(nu, m):
    total = 0.0
    for k in range(1, 100000):
        term = math.exp(-nu * k) * k ** (m - 1)
        total += term
        if term < 1e-18 * total and k > 10:
            break
    return total


def test_abel_plana_center_golden():
    cs = abel_plana_bound(1.0, 2)
    assert cs.center == 1.0
    assert rel_err(cs.radius, 0.5209522534684663) <= 1e-13
    # true sum: e^{-1}/(1 - e^{-1})^2
    assert cs.contains(0.9206735942077924)


def test_abel_plana_second_golden():
    cs = abel_plana_bound(2.0, 3)
    assert rel_err(cs.radius, 0.2881610808246933) <= 1e-13
    # true sum: x(1+x)/(1-x)^3 at x = e^{-2}
    assert cs.contains(0.23767962743150492)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_abel_plana_contains_true_sum(nu, m):
    cs = abel_plana_bound(nu, m)
    true = exp_sum_direct(nu, m)
    assert cs.lower <= true <= cs.upper
    assert cs.center == nu ** (-m) * math.factorial(m - 1)


def test_abel_plana_validation():
    with pytest.raises(DomainError):
        abel_plana_bound(0.0, 2)
    with pytest.raises(DomainError):
        abel_plana_bound(1.0, 1)
    with pytest.raises(DomainError):
        CertifiedSum(1.0, -0.1)


def test_certified_sum_interval():
    cs = CertifiedSum(2.0, 0.5)
    assert cs.lower == 1.5 and cs.upper == 2.5
    assert cs.contains(2.49) and not cs.contains(2.51)
