"""Mark (and interference power) laws: absolute moments and sampling.

A mark law enters every bound only through its absolute moments E|M|^m, so
each family stores its parameters and answers ``abs_moment(m)`` in closed
form.  The named families also know how to draw samples; a moments-only
law cannot be sampled.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, InsufficientMoments


@dataclass(frozen=True)
class ConstantMark:
    """Degenerate mark M = value.

    A zero value is accepted so that trivially-null models can be simulated;
    operations that divide by E M^2 reject it at the call site.
    """

    value: float

    def abs_moment(self, m: int) -> float:
        _check_order(m)
        return abs(self.value) ** m

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.value))

    def describe(self) -> dict:
        return {"family": "constant", "value": self.value}


@dataclass(frozen=True)
class UniformMark:
    """Mark uniform on [0, upper]."""

    upper: float

    def __post_init__(self):
        if not (self.upper > 0 and math.isfinite(self.upper)):
            raise DomainError("uniform mark needs upper > 0")

    def abs_moment(self, m: int) -> float:
        _check_order(m)
        return self.upper ** m / (m + 1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(0.0, self.upper, size)

    def describe(self) -> dict:
        return {"family": "uniform", "upper": self.upper}


@dataclass(frozen=True)
class ExponentialMark:
    """Exponential mark with the given mean; E M^m = m! * mean^m."""

    mean: float

    def __post_init__(self):
        if not (self.mean > 0 and math.isfinite(self.mean)):
            raise DomainError("exponential mark needs mean > 0")

    def abs_moment(self, m: int) -> float:
        _check_order(m)
        return math.factorial(m) * self.mean ** m

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(self.mean, size)

    def describe(self) -> dict:
        return {"family": "exponential", "mean": self.mean}


@dataclass(frozen=True)
class CenteredGaussianMark:
    """N(0, sigma^2) mark; E|M|^m = sigma^m 2^{m/2} Gamma((m+1)/2) / sqrt(pi)."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError("centered Gaussian mark needs sigma > 0")

    def abs_moment(self, m: int) -> float:
        _check_order(m)
        return (
            self.sigma ** m
            * 2.0 ** (m / 2.0)
            * math.gamma((m + 1) / 2.0)
            / math.sqrt(math.pi)
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(0.0, self.sigma, size)

    def describe(self) -> dict:
        return {"family": "gaussian", "sigma": self.sigma}


@dataclass(frozen=True)
class CustomAbsMoments:
    """Moments-only mark: entry i (0-based) is E|M|^(i+1).

    Entries violating the Lyapunov ordering (E|M|^a)^{1/a} <= (E|M|^b)^{1/b}
    draw a warning rather than a rejection, because callers may legitimately
    pass upper bounds instead of exact moments.
    """

    moments: tuple[float, ...]

    def __post_init__(self):
        if len(self.moments) < 2:
            raise DomainError("need at least E|M| and E M^2")
        if any(not (v >= 0 and math.isfinite(v)) for v in self.moments):
            raise DomainError("absolute moments must be finite and >= 0")
        for a in range(1, len(self.moments)):
            b = a + 1
            lo, hi = self.moments[a - 1], self.moments[b - 1]
            if lo > 0 and lo ** (1.0 / a) > hi ** (1.0 / b) * (1 + 1e-12):
                warnings.warn(
                    f"moment list is not Lyapunov-consistent at orders {a},{b}",
                    stacklevel=2,
                )

    def abs_moment(self, m: int) -> float:
        _check_order(m)
        if m > len(self.moments):
            raise InsufficientMoments(
                f"order {m} requested, only {len(self.moments)} stored"
            )
        return self.moments[m - 1]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise DomainError("a moments-only mark law cannot be sampled")

    def describe(self) -> dict:
        return {"family": "custom", "abs_moments": list(self.moments)}


MarkLaw = Union[
    ConstantMark, UniformMark, ExponentialMark, CenteredGaussianMark, CustomAbsMoments
]


def _check_order(m: int) -> None:
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise DomainError("moment order must be an integer >= 1")


def second_moment(mark: MarkLaw) -> float:
    return mark.abs_moment(2)


def mark_abs_moments(mark: MarkLaw, m_max: int) -> list[float]:
    """[E|M|^1, ..., E|M|^m_max]."""
    return [mark.abs_moment(m) for m in range(1, m_max + 1)]
