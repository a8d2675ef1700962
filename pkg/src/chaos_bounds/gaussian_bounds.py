"""Explicit Wasserstein / Kolmogorov distance bounds to the standard normal.

All bounds here share one shape: with m3 the third absolute moment and m4 the
fourth moment of the standardized kernel,

    dw = m3,
    dk = (1 + max{4, (4 m4 + 2)^{1/4}} / 2) * m3 + sqrt(m4).

The concrete calculators only differ in how (m3, m4) are assembled from model
ingredients: kernel integrals for shot noise, progeny and mark moments over a
window for cluster / Hawkes processes, power moments and attenuation integrals
for planar interference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergentIntegral, DomainError
from .marks import MarkLaw
from .progeny import (
    Binomial,
    OffspringLaw,
    PoissonMean,
    progeny_moment_closed,
)


@dataclass(frozen=True)
class Region:
    """Constant intensity lam on a window of volume leb."""

    lam: float
    leb: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError("region intensity must be positive and finite")
        if not (self.leb > 0 and math.isfinite(self.leb)):
            raise DomainError("region volume must be positive and finite")


@dataclass(frozen=True)
class KernelMoments:
    """The three kernel integrals (orders 2, 3, 4); i3_abs uses |kernel|^3."""

    i2: float
    i3_abs: float
    i4: float

    def __post_init__(self):
        if not (self.i2 > 0 and math.isfinite(self.i2)):
            raise DomainError("i2 must be positive and finite")
        if self.i3_abs < 0 or self.i4 < 0:
            raise DomainError("kernel moments must be >= 0")
        if not (math.isfinite(self.i3_abs) and math.isfinite(self.i4)):
            raise DomainError("kernel moments must be finite")


@dataclass(frozen=True)
class GaussianBoundReport:
    """A (dw, dk) bound pair plus an echo of what produced it.

    ``vacuous`` flags dk_bound >= 1: the Kolmogorov distance never exceeds 1,
    so such a bound carries no information.  (Wasserstein has no universal
    cap, so no flag is derived from dw_bound.)  Vacuous bounds are reported,
    not clamped.
    """

    dw_bound: float
    dk_bound: float
    inputs: dict

    @property
    def vacuous(self) -> bool:
        return self.dk_bound >= 1.0

    def to_dict(self) -> dict:
        return {
            "dw_bound": self.dw_bound,
            "dk_bound": self.dk_bound,
            "vacuous": self.vacuous,
            "inputs": self.inputs,
        }


def _dk_from(dw: float, m4: float) -> float:
    return (1.0 + 0.5 * max(4.0, (4.0 * m4 + 2.0) ** 0.25)) * dw + math.sqrt(m4)


def first_chaos_bounds(m3: float, m4: float) -> GaussianBoundReport:
    """Bounds for a normalized first chaos with kernel moments m3 = int |f|^3,
    m4 = int f^4 (and int f^2 = 1)."""
    if m3 < 0 or m4 < 0:
        raise DomainError("kernel moments must be >= 0")
    return GaussianBoundReport(
        dw_bound=m3,
        dk_bound=_dk_from(m3, m4),
        inputs={"kind": "first-chaos", "m3": m3, "m4": m4},
    )


def shotnoise_bounds(km: KernelMoments) -> GaussianBoundReport:
    """Bounds for a standardized shot-noise functional from its raw kernel
    integrals; invariant under kernel rescaling (i2,i3,i4) -> (c^2 i2, c^3 i3,
    c^4 i4)."""
    dw = km.i3_abs / km.i2 ** 1.5
    r4 = km.i4 / km.i2 ** 2
    return GaussianBoundReport(
        dw_bound=dw,
        dk_bound=_dk_from(dw, r4),
        inputs={"kind": "shot-noise", "i2": km.i2, "i3_abs": km.i3_abs, "i4": km.i4},
    )


def standardized_kernel_moments(
    raw: list[tuple[int, float]],
) -> list[tuple[int, float]]:
    """Divide each (m, value) pair by i2^{m/2}; the m = 2 entry maps to 1."""
    i2 = None
    for m, v in raw:
        if m == 2:
            i2 = v
    if i2 is None or i2 <= 0:
        raise DomainError("a positive order-2 entry is required")
    return [(m, v / i2 ** (m / 2.0)) for m, v in raw]


def cluster_moment_bound(leb: float, ezm: float, emm: float) -> float:
    """leb * E Z^m * E|M|^m, an upper bound on the m-th windowed cluster-kernel
    integral."""
    if leb < 0 or ezm < 0 or emm < 0:
        raise DomainError("all factors must be >= 0")
    return leb * ezm * emm


def compound_cluster_bounds(
    region: Region, mark: MarkLaw, ez3: float, ez4: float
) -> GaussianBoundReport:
    """Bounds for a standardized compound cluster sum over a window.

    dw = E|M|^3 E Z^3 / ((E M^2)^{3/2} sqrt(lam * leb)); dk uses
    m4 = E M^4 E Z^4 / (lam * leb * (E M^2)^2).  Both are invariant under mark
    scaling M -> cM.
    """
    m2 = mark.abs_moment(2)
    m3 = mark.abs_moment(3)
    m4 = mark.abs_moment(4)
    if not m2 > 0:
        raise DomainError("E M^2 must be > 0")
    if not all(math.isfinite(v) for v in (m2, m3, m4, ez3, ez4)):
        raise DomainError("all moments must be finite")
    if ez3 < 0 or ez4 < 0:
        raise DomainError("progeny moments must be >= 0")
    ll = region.lam * region.leb
    dw = m3 * ez3 / (m2 ** 1.5 * math.sqrt(ll))
    q = m4 * ez4 / (ll * m2 ** 2)
    return GaussianBoundReport(
        dw_bound=dw,
        dk_bound=_dk_from(dw, q),
        inputs={
            "kind": "compound-cluster",
            "lam": region.lam,
            "leb": region.leb,
            "mark": mark.describe(),
            "ez3": ez3,
            "ez4": ez4,
        },
    )


def hawkes_poisson_bounds(
    region: Region, h: float, mark: MarkLaw
) -> GaussianBoundReport:
    """Compound cluster bounds with Poisson(h) cascade sizes."""
    law = PoissonMean(h)
    report = compound_cluster_bounds(
        region,
        mark,
        progeny_moment_closed(law, 3),
        progeny_moment_closed(law, 4),
    )
    inputs = dict(report.inputs, kind="hawkes-poisson", h=h)
    return GaussianBoundReport(report.dw_bound, report.dk_bound, inputs)


def hawkes_binomial_bounds(
    region: Region, h: int, p: float, mark: MarkLaw
) -> GaussianBoundReport:
    """Compound cluster bounds with Binomial(h, p) cascade sizes."""
    law = Binomial(h, p)
    report = compound_cluster_bounds(
        region,
        mark,
        progeny_moment_closed(law, 3),
        progeny_moment_closed(law, 4),
    )
    inputs = dict(report.inputs, kind="hawkes-binomial", h=h, p=p)
    return GaussianBoundReport(report.dw_bound, report.dk_bound, inputs)


def cluster_bounds_for_law(
    region: Region, law: OffspringLaw, mark: MarkLaw
) -> GaussianBoundReport:
    """Compound cluster bounds for any offspring law with 4 moments."""
    return compound_cluster_bounds(
        region,
        mark,
        progeny_moment_closed(law, 3),
        progeny_moment_closed(law, 4),
    )


def hertzian_integral(R: float, alpha: float, m: int) -> float:
    """int_{R^2} max{R, |x|}^{-alpha m} dx = pi alpha m / (alpha m - 2) * R^{2 - alpha m}.

    Diverges unless alpha * m > 2.
    """
    if not (R > 0 and math.isfinite(R)):
        raise DomainError("R must be positive and finite")
    if not (alpha > 1 and math.isfinite(alpha)):
        raise DomainError("alpha must be > 1")
    if not (isinstance(m, int) and m >= 1):
        raise DomainError("m must be an integer >= 1")
    am = alpha * m
    if am <= 2.0:
        raise DivergentIntegral(f"alpha * m = {am} <= 2")
    return math.pi * am / (am - 2.0) * R ** (2.0 - am)


def interference_bounds(
    lam: float,
    power2: float,
    power3: float,
    power4: float,
    i2: float,
    i3: float,
    i4: float,
) -> GaussianBoundReport:
    """Bounds for standardized planar interference at the origin.

    dw = lam^{-1/2} (E P^3 / (E P^2)^{3/2}) (i3 / i2^{3/2}), with i_m the m-th
    attenuation integral; dk uses m4 = lam^{-1} (E P^4 / (E P^2)^2) (i4 / i2^2).
    """
    if not (lam > 0 and power2 > 0 and i2 > 0):
        raise DomainError("lam, power2 and i2 must be > 0")
    vals = (lam, power2, power3, power4, i2, i3, i4)
    if any(not math.isfinite(v) for v in vals) or power3 < 0 or power4 < 0:
        raise DomainError("all inputs must be finite (and moments >= 0)")
    if i3 < 0 or i4 < 0:
        raise DomainError("attenuation integrals must be >= 0")
    dw = (power3 / power2 ** 1.5) * (i3 / i2 ** 1.5) / math.sqrt(lam)
    q = (power4 / power2 ** 2) * (i4 / i2 ** 2) / lam
    return GaussianBoundReport(
        dw_bound=dw,
        dk_bound=_dk_from(dw, q),
        inputs={
            "kind": "interference",
            "lam": lam,
            "power2": power2,
            "power3": power3,
            "power4": power4,
            "i2": i2,
            "i3": i3,
            "i4": i4,
        },
    )
