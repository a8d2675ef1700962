"""Moments of the total progeny of a subcritical Galton-Watson cascade.

Z counts every individual of a cascade started by one ancestor, the ancestor
included.  With P the offspring variable, all moments of Z are polynomial in
the factorial moments E(P)_i = E[P(P-1)...(P-i+1)], via the recursion

    E Z^n = ( 1 + sum_{k=1..n-1} k! C(n,k) sum_{i=1..k} E(P)_i/i! *
                  sum_{m_1+..+m_i=k} prod_j E Z^{m_j}/m_j!
                + n! sum_{i=2..n} E(P)_i/i! *
                  sum_{m_1+..+m_i=n} prod_j E Z^{m_j}/m_j! ) / (1 - E P),

where the inner sums run over ordered compositions into positive parts (only
parts < n appear for i >= 2, so the right-hand side uses lower moments only).

The Poisson(h) cascade makes Z Borel-distributed and the Binomial(h, p)
cascade makes it Consul-distributed; the pmf series give an independent check
of the recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import (
    DomainError,
    InsufficientMoments,
    NoConvergence,
    SupercriticalError,
)

# (1 - E P) appears in denominators raised to high powers, so anything closer
# to criticality than this is rejected rather than silently overflowing.
SUBCRITICAL_SLACK = 1e-9

_SERIES_MAX_TERMS = 2_000_000


def _check_mean(mean: float) -> None:
    if mean > 1.0 - SUBCRITICAL_SLACK:
        raise SupercriticalError(
            f"offspring mean {mean} is >= 1 - {SUBCRITICAL_SLACK:g}"
        )


@dataclass(frozen=True)
class PoissonMean:
    """Poisson offspring with mean h, 0 < h < 1."""

    h: float

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise DomainError("Poisson offspring needs h > 0")
        _check_mean(self.h)

    @property
    def mean(self) -> float:
        return self.h

    def describe(self) -> dict:
        return {"family": "poisson", "h": self.h}


@dataclass(frozen=True)
class Binomial:
    """Binomial(h, p) offspring: h trials, success probability p, hp < 1."""

    h: int
    p: float

    def __post_init__(self):
        if not (isinstance(self.h, (int, np.integer)) and self.h >= 1):
            raise DomainError("Binomial offspring needs integer h >= 1")
        if not (0.0 < self.p < 1.0):
            raise DomainError("Binomial offspring needs 0 < p < 1")
        _check_mean(self.h * self.p)

    @property
    def mean(self) -> float:
        return self.h * self.p

    def describe(self) -> dict:
        return {"family": "binomial", "h": self.h, "p": self.p}


@dataclass(frozen=True)
class FactorialMoments:
    """Offspring given by its factorial moments; entry i (0-based) is E(P)_{i+1}.

    The degenerate all-zero list (P = 0, so Z = 1) is allowed and handy as a
    trivial oracle.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise DomainError("need at least E(P)_1")
        if any(not (v >= 0 and math.isfinite(v)) for v in self.values):
            raise DomainError("factorial moments must be finite and >= 0")
        _check_mean(self.values[0])

    @property
    def mean(self) -> float:
        return self.values[0]

    def describe(self) -> dict:
        return {"family": "factorial-moments", "values": list(self.values)}


OffspringLaw = Union[PoissonMean, Binomial, FactorialMoments]


def factorial_moments(law: OffspringLaw, n_max: int) -> list[float]:
    """[E(P)_1, ..., E(P)_{n_max}] for the offspring variable P.

    Poisson(h): E(P)_i = h^i.  Binomial(h, p): E(P)_i = (h)_i p^i with the
    falling factorial (h)_i = 0 once i > h.  A stored list is echoed.
    """
    if not (isinstance(n_max, (int, np.integer)) and n_max >= 1):
        raise DomainError("n_max must be an integer >= 1")
    if isinstance(law, PoissonMean):
        return [law.h ** i for i in range(1, n_max + 1)]
    if isinstance(law, Binomial):
        out = []
        for i in range(1, n_max + 1):
            if i > law.h:
                out.append(0.0)
            else:
                falling = 1.0
                for j in range(i):
                    falling *= law.h - j
                out.append(falling * law.p ** i)
        return out
    if n_max > len(law.values):
        raise InsufficientMoments(
            f"law stores {len(law.values)} factorial moments, {n_max} requested"
        )
    return list(law.values[:n_max])


def compositions(k: int, i: int) -> list[tuple[int, ...]]:
    """All ordered i-tuples of positive integers summing to k, lexicographic.

    There are C(k-1, i-1) of them; the list is empty when i > k.
    """
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("k must be an integer >= 1")
    if not (isinstance(i, (int, np.integer)) and i >= 1):
        raise DomainError("i must be an integer >= 1")
    if i > k:
        return []
    if i == 1:
        return [(k,)]
    out: list[tuple[int, ...]] = []
    for first in range(1, k - i + 2):
        for rest in compositions(k - first, i - 1):
            out.append((first,) + rest)
    return out


def _moment_sequence(law: OffspringLaw, n: int) -> list[float]:
    """[E Z^1, ..., E Z^n] by the recursion, lower orders memoized locally."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError("moment order must be an integer >= 1")
    ep = law.mean
    _check_mean(ep)
    epi = factorial_moments(law, n)
    ez = {1: 1.0 / (1.0 - ep)}
    fact = [math.factorial(j) for j in range(n + 1)]
    for order in range(2, n + 1):
        total = 1.0
        for k in range(1, order):
            inner = 0.0
            for i in range(1, k + 1):
                comp_sum = 0.0
                for parts in compositions(k, i):
                    prod = 1.0
                    for m in parts:
                        prod *= ez[m] / fact[m]
                    comp_sum += prod
                inner += epi[i - 1] / fact[i] * comp_sum
            total += math.comb(order, k) * fact[k] * inner
        tail = 0.0
        for i in range(2, order + 1):
            comp_sum = 0.0
            for parts in compositions(order, i):
                prod = 1.0
                for m in parts:
                    prod *= ez[m] / fact[m]
                comp_sum += prod
            tail += epi[i - 1] / fact[i] * comp_sum
        total += fact[order] * tail
        ez[order] = total / (1.0 - ep)
    return [ez[j] for j in range(1, n + 1)]


def progeny_moment(law: OffspringLaw, n: int) -> float:
    """E Z^n via the composition recursion."""
    return _moment_sequence(law, n)[-1]


@dataclass(frozen=True)
class ProgenyMomentTable:
    """E Z^1..E Z^{n_max} computed in one recursion pass."""

    n_max: int
    moments: tuple[float, ...]

    def moment(self, n: int) -> float:
        if not 1 <= n <= self.n_max:
            raise InsufficientMoments(f"table holds orders 1..{self.n_max}")
        return self.moments[n - 1]


def progeny_moment_table(law: OffspringLaw, n_max: int) -> ProgenyMomentTable:
    return ProgenyMomentTable(n_max=n_max, moments=tuple(_moment_sequence(law, n_max)))


def progeny_moment_closed(law: OffspringLaw, n: int) -> float:
    """E Z^n for n <= 4 from the closed expressions in E(P)_i and Var P."""
    if n not in (1, 2, 3, 4):
        raise DomainError("closed forms cover n in {1, 2, 3, 4}")
    ep = law.mean
    _check_mean(ep)
    d = 1.0 - ep
    if n == 1:
        return 1.0 / d
    epi = factorial_moments(law, n)
    e2 = epi[1]
    varp = e2 + ep - ep * ep
    ez2 = (varp + d) / d ** 3
    if n == 2:
        return ez2
    e3 = epi[2]
    ez3 = (1.0 / d) * (
        1.0
        + 3.0 * ep / d
        + 3.0 * e2 / d ** 2
        + (e3 + 3.0 * varp) / d ** 3
        + 3.0 * varp ** 2 / d ** 4
    )
    if n == 3:
        return ez3
    e4 = epi[3]
    return (1.0 / d) * (
        1.0
        + 4.0 * ep / d
        + 6.0 * e2 / d ** 2
        + 4.0 * e3 / d ** 3
        + e4 / d ** 4
        + 3.0 * ez2 * (2.0 * ep + 4.0 * e2 / d + e2 * ez2 + 2.0 * e3 / d ** 2)
        + 4.0 * ez3 * varp / d
    )


def borel_pmf(h: float, k: int) -> float:
    """P(Z = k) = e^{-hk} (hk)^{k-1} / k! for the Poisson(h) cascade.

    Evaluated in log space; k = 1 gives e^{-h}.
    """
    if not (0.0 < h < 1.0):
        raise DomainError("Borel pmf needs 0 < h < 1")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("Borel pmf needs integer k >= 1")
    log_p = -h * k + (k - 1) * math.log(h * k) - gammaln(k + 1)
    return float(math.exp(log_p))


def consul_pmf(h: int, p: float, k: int) -> float:
    """P(Z = k) = (1/k) C(kh, k-1) p^{k-1} (1-p)^{k(h-1)+1} for Binomial(h, p).

    The binomial coefficient is taken through log-gamma, since it overflows
    for k in the hundreds already.
    """
    if not (isinstance(h, (int, np.integer)) and h >= 1):
        raise DomainError("Consul pmf needs integer h >= 1")
    if not (0.0 < p < 1.0):
        raise DomainError("Consul pmf needs 0 < p < 1")
    if h * p >= 1.0:
        raise SupercriticalError(f"hp = {h * p} >= 1")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("Consul pmf needs integer k >= 1")
    log_binom = gammaln(k * h + 1) - gammaln(k) - gammaln(k * (h - 1) + 2)
    log_p = (
        -math.log(k)
        + log_binom
        + (k - 1) * math.log(p)
        + (k * (h - 1) + 1) * math.log1p(-p)
    )
    return float(math.exp(log_p))


def _term_ratio_bound(law: OffspringLaw, k: int, m: int) -> float:
    """Upper bound on t_{j+1}/t_j for all j >= k, where t_j = j^m pmf(j).

    Borel: pmf(k+1)/pmf(k) = h e^{-h} (1+1/k)^{k-1}, which increases to
    h e^{1-h} < 1.  Consul: the exact ratio is a product of h linear factors
    over h-1 linear factors; bounding each factor gives
    q e^{(h+1)/(2j)} with q = p h (h(1-p)/(h-1))^{h-1} (and plain p at h = 1).
    The polynomial factor contributes (1+1/j)^m <= (1+1/k)^m.
    """
    poly = (1.0 + 1.0 / k) ** m
    if isinstance(law, PoissonMean):
        return poly * law.h * math.exp(1.0 - law.h)
    if law.h == 1:
        return poly * law.p
    q = law.p * law.h * (law.h * (1.0 - law.p) / (law.h - 1)) ** (law.h - 1)
    return poly * q * math.exp((law.h + 1) / (2.0 * k))


def progeny_moment_series(law: OffspringLaw, m: int, rel_tol: float) -> float:
    """E Z^m = sum_k k^m pmf(k), truncated with a certified geometric tail.

    Only the samplable families have a pmf, so the law must be PoissonMean or
    Binomial.  The sum stops once the dominating tail bound
    t_k r/(1-r) drops below rel_tol times the partial sum.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 0):
        raise DomainError("m must be an integer >= 0")
    if not rel_tol > 0:
        raise DomainError("rel_tol must be > 0")
    if isinstance(law, FactorialMoments):
        raise DomainError("series oracle needs a Poisson or Binomial law")
    if m == 0:
        return 1.0
    if isinstance(law, PoissonMean):
        pmf = lambda k: borel_pmf(law.h, k)
    else:
        pmf = lambda k: consul_pmf(law.h, law.p, k)
    total = 0.0
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term = float(k) ** m * pmf(k)
        total += term
        ratio = _term_ratio_bound(law, k, m)
        if ratio < 1.0:
            tail = term * ratio / (1.0 - ratio)
            if tail <= rel_tol * total:
                return total
    raise NoConvergence(
        f"ratio test did not certify within {_SERIES_MAX_TERMS} terms"
    )


@dataclass(frozen=True)
class CertifiedSum:
    """A value known to lie in [center - radius, center + radius]."""

    center: float
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("radius must be >= 0")

    @property
    def lower(self) -> float:
        return self.center - self.radius

    @property
    def upper(self) -> float:
        return self.center + self.radius

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def abel_plana_bound(nu: float, m: int) -> CertifiedSum:
    """Certified evaluation of sum_{k>=1} e^{-nu k} k^{m-1}.

    The sum equals nu^{-m} (m-1)! up to a remainder of absolute size at most
    1/(pi (m-1)) + 2 (m-1)! / pi^m.
    """
    if not nu > 0:
        raise DomainError("nu must be > 0")
    if not (isinstance(m, (int, np.integer)) and m >= 2):
        raise DomainError("m must be an integer >= 2")
    center = nu ** (-m) * math.factorial(m - 1)
    radius = 1.0 / (math.pi * (m - 1)) + 2.0 * math.factorial(m - 1) / math.pi ** m
    return CertifiedSum(center=center, radius=radius)
