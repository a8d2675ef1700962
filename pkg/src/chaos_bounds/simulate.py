"""Exact Monte Carlo samplers and empirical verification of the bounds.

Samplers are exact (no discretization): cluster windows are grown generation
by generation with the collapsed-count trick (a sum of k iid Poisson(h) counts
is Poisson(k h), and likewise Binomial(k h, p)), and interference fields are
truncated at a radius chosen so the discarded far field has expectation below
``tail_eps``, which is then added back analytically.

Determinism: every replication i of batch b draws from its own
``default_rng([seed, b, i])`` stream (batch 0 is the main pass, batch 1 the
standardization pass), and progeny draws are blocked into fixed chunks of
4096 with per-chunk streams ``default_rng([seed, chunk])``.  Results are
placed by index, so output is byte-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .deviations import bci_bound, check_cumulant_condition
from .errors import CapExceeded, DivergentModel, DomainError
from .gaussian_bounds import (
    GaussianBoundReport,
    Region,
    cluster_bounds_for_law,
    hertzian_integral,
    interference_bounds,
)
from .marks import (
    ConstantMark,
    CenteredGaussianMark,
    CustomAbsMoments,
    MarkLaw,
    mark_abs_moments,
)
from .progeny import (
    Binomial,
    FactorialMoments,
    OffspringLaw,
    PoissonMean,
    progeny_moment,
    progeny_moment_table,
)

_PROGENY_CHUNK = 4096
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class ClusterModel:
    """Marked cluster process on [0, horizon]: immigrants arrive at rate lam,
    every point spawns offspring per the given law after iid exponential
    delays (rate delay_rate), points past the horizon are censored, and each
    surviving point carries an iid mark.  The observable is the mark total.

    A FactorialMoments offspring law is only simulable in the degenerate
    all-zero case (no offspring at all, i.e. a compound Poisson total).
    """

    lam: float
    horizon: float
    offspring: OffspringLaw
    mark: MarkLaw = ConstantMark(1.0)
    delay_rate: float = 1.0
    progeny_cap: int = 10 ** 7

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError("lam must be positive and finite")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise DomainError("horizon must be positive and finite")
        if not isinstance(self.offspring, (PoissonMean, Binomial, FactorialMoments)):
            raise DomainError(f"unsupported offspring law: {self.offspring!r}")
        if isinstance(self.offspring, FactorialMoments) and any(
            v != 0 for v in self.offspring.values
        ):
            raise DomainError(
                "a bare factorial-moment sequence has no sampler; "
                "only the all-zero (compound Poisson) case can be simulated"
            )
        if isinstance(self.mark, CustomAbsMoments):
            raise DomainError("a moment-only mark law cannot be sampled")
        if not (self.delay_rate > 0 and math.isfinite(self.delay_rate)):
            raise DomainError("delay_rate must be positive and finite")
        if self.progeny_cap < 1:
            raise DomainError("progeny_cap must be >= 1")


@dataclass(frozen=True)
class InterferenceModel:
    """Planar interference at the origin: transmitters form a Poisson process
    of intensity lam on R^2, each emits an iid power, and the received signal
    decays like max{radius, distance}^(-alpha).

    Simulation truncates the plane at ``truncation_radius``, chosen so the
    expected discarded far-field contribution is at most tail_eps; that mean
    (``farfield_mean``) is added back, so sampled totals are unbiased for any
    tail_eps.
    """

    lam: float
    radius: float
    alpha: float
    power: MarkLaw = ConstantMark(1.0)
    tail_eps: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError("lam must be positive and finite")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("radius must be positive and finite")
        if not math.isfinite(self.alpha):
            raise DomainError("alpha must be finite")
        if self.alpha <= 2.0:
            raise DivergentModel(
                f"alpha = {self.alpha} <= 2: the interference integral diverges"
            )
        if not (self.tail_eps > 0 and math.isfinite(self.tail_eps)):
            raise DomainError("tail_eps must be positive and finite")
        if isinstance(self.power, CustomAbsMoments):
            raise DomainError("a moment-only power law cannot be sampled")
        if isinstance(self.power, CenteredGaussianMark) or (
            isinstance(self.power, ConstantMark) and self.power.value < 0
        ):
            raise DomainError("emitted powers must be nonnegative")

    @property
    def truncation_radius(self) -> float:
        mean_p = self.power.abs_moment(1)
        a = self.alpha
        rho = (2.0 * math.pi * self.lam * mean_p / ((a - 2.0) * self.tail_eps)) ** (
            1.0 / (a - 2.0)
        )
        return max(self.radius, rho)

    @property
    def farfield_mean(self) -> float:
        a = self.alpha
        rho = self.truncation_radius
        return (
            2.0
            * math.pi
            * self.lam
            * self.power.abs_moment(1)
            * rho ** (2.0 - a)
            / (a - 2.0)
        )


# ---------------------------------------------------------------------------
# samplers


def _offspring_counts(law: OffspringLaw, rng, size: int) -> np.ndarray:
    if isinstance(law, PoissonMean):
        return rng.poisson(law.h, size)
    if isinstance(law, Binomial):
        return rng.binomial(law.h, law.p, size)
    return np.zeros(size, dtype=np.int64)  # all-zero FactorialMoments


def sample_progeny(law: OffspringLaw, rng, cap: int = 10 ** 7) -> int:
    """Draw one total-progeny count (the root included) of a cascade.

    Generations are collapsed: k alive individuals produce Poisson(k h)
    (resp. Binomial(k h, p)) children in one draw.
    """
    if isinstance(law, FactorialMoments):
        if any(v != 0 for v in law.values):
            raise DomainError("a bare factorial-moment sequence has no sampler")
        return 1
    total = 1
    alive = 1
    while alive:
        if isinstance(law, PoissonMean):
            kids = int(rng.poisson(alive * law.h))
        else:
            kids = int(rng.binomial(alive * law.h, law.p))
        total += kids
        alive = kids
        if total > cap:
            raise CapExceeded(f"total progeny exceeded cap {cap}")
    return total


def _sample_progeny_block(law: OffspringLaw, rng, size: int, cap: int) -> np.ndarray:
    """Vectorized sample_progeny: one cascade per slot, all grown in lockstep."""
    if isinstance(law, FactorialMoments):
        if any(v != 0 for v in law.values):
            raise DomainError("a bare factorial-moment sequence has no sampler")
        return np.ones(size, dtype=np.int64)
    total = np.ones(size, dtype=np.int64)
    alive = np.ones(size, dtype=np.int64)
    while True:
        live = alive > 0
        if not live.any():
            return total
        kids = np.zeros(size, dtype=np.int64)
        if isinstance(law, PoissonMean):
            kids[live] = rng.poisson(alive[live] * law.h)
        else:
            kids[live] = rng.binomial(alive[live] * law.h, law.p)
        total += kids
        alive = kids
        if int(total.max()) > cap:
            raise CapExceeded(f"total progeny exceeded cap {cap}")


def sample_cluster_window(model: ClusterModel, rng) -> float:
    """Draw one mark total over the window.  Draw order is fixed: immigrant
    count, immigrant times, then per generation (counts, delays), then all
    marks in one block."""
    T = model.horizon
    n0 = int(rng.poisson(model.lam * T))
    if n0 > model.progeny_cap:
        raise CapExceeded(
            f"window population exceeded progeny_cap {model.progeny_cap}"
        )
    cur = rng.uniform(0.0, T, n0)
    total = n0
    while cur.size:
        counts = _offspring_counts(model.offspring, rng, cur.size)
        n_children = int(counts.sum())
        if n_children == 0:
            break
        child = np.repeat(cur, counts) + rng.exponential(
            1.0 / model.delay_rate, n_children
        )
        cur = child[child <= T]
        total += cur.size
        if total > model.progeny_cap:
            raise CapExceeded(
                f"window population exceeded progeny_cap {model.progeny_cap}"
            )
    marks = model.mark.sample(rng, total)
    return float(np.sum(marks))


def sample_interference(model: InterferenceModel, rng) -> float:
    """Draw one interference total at the origin (far-field mean added back).

    Radial symmetry of the attenuation makes angles irrelevant, so only radii
    are drawn: rho * sqrt(U) for the disk of truncation radius rho.
    """
    rho = model.truncation_radius
    n = int(rng.poisson(model.lam * math.pi * rho * rho))
    r = rho * np.sqrt(rng.random(n))
    attenuation = np.maximum(r, model.radius) ** (-model.alpha)
    powers = model.power.sample(rng, n)
    return float(np.sum(powers * attenuation) + model.farfield_mean)


# ---------------------------------------------------------------------------
# empirical distances


def _standardized_sorted(samples, standardization) -> np.ndarray:
    mu, sd = standardization
    if not (sd > 0 and math.isfinite(sd)):
        raise DomainError("standardization sd must be positive and finite")
    z = (np.asarray(samples, dtype=float) - mu) / sd
    if z.size == 0:
        raise DomainError("need at least one sample")
    if not np.all(np.isfinite(z)):
        raise DomainError("samples must be finite")
    return np.sort(z)


def empirical_kolmogorov(samples, standardization=(0.0, 1.0)) -> float:
    """sup_t |F_n(t) - Phi(t)| for the standardized samples, evaluated exactly
    at the jump points."""
    z = _standardized_sorted(samples, standardization)
    n = z.size
    cdf = ndtr(z)
    above = np.arange(1, n + 1) / n - cdf
    below = cdf - np.arange(0, n) / n
    return float(max(above.max(), below.max()))


def _phi_antiderivative(t: np.ndarray) -> np.ndarray:
    # d/dt [t Phi(t) + phi(t)] = Phi(t), with limit 0 at -inf
    return t * ndtr(t) + np.exp(-0.5 * t * t) / _SQRT_TWO_PI


def empirical_wasserstein(samples, standardization=(0.0, 1.0)) -> float:
    """int |F_n(t) - Phi(t)| dt for the standardized samples, in closed form.

    Between consecutive order statistics F_n is the constant c = i/n, and
    |c - Phi| integrates exactly once Phi's antiderivative and the crossing
    point ndtri(c) (clipped into the segment) are known; the two tail pieces
    are int Phi below the minimum and int (1 - Phi) above the maximum.
    """
    z = _standardized_sorted(samples, standardization)
    n = z.size
    total = float(_phi_antiderivative(z[0]) + (_phi_antiderivative(z[-1]) - z[-1]))
    if n > 1:
        a = z[:-1]
        b = z[1:]
        c = np.arange(1, n) / n
        qc = np.clip(ndtri(c), a, b)
        ia = _phi_antiderivative(a)
        iq = _phi_antiderivative(qc)
        ib = _phi_antiderivative(b)
        total += float(np.sum(c * (qc - a) - (iq - ia) + (ib - iq) - c * (b - qc)))
    return total


def dkw_margin(n: int, delta: float) -> float:
    """Two-sided DKW radius: sup |F_n - F| <= sqrt(log(2/delta) / (2n)) with
    probability at least 1 - delta."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


@dataclass(frozen=True)
class EmpiricalDistanceReport:
    n: int
    kolmogorov: float
    wasserstein: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kolmogorov": self.kolmogorov,
            "wasserstein": self.wasserstein,
        }


def empirical_distances(samples, standardization=(0.0, 1.0)) -> EmpiricalDistanceReport:
    z = np.asarray(samples, dtype=float)
    return EmpiricalDistanceReport(
        n=int(z.size),
        kolmogorov=empirical_kolmogorov(z, standardization),
        wasserstein=empirical_wasserstein(z, standardization),
    )


# ---------------------------------------------------------------------------
# verification drivers


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one empirical check; ``samples`` carries the standardized
    (or raw, for moment checks) draws for optional CSV export and is excluded
    from to_dict()."""

    kind: str
    passed: bool
    details: dict
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "passed": self.passed, "details": self.details}


def _run_indexed(fn, n: int, workers: int) -> np.ndarray:
    """Evaluate fn(0..n-1), in parallel but placed by index, so the result is
    independent of the worker count."""
    if n <= 0:
        return np.empty(0, dtype=float)
    if workers <= 1:
        return np.asarray([fn(i) for i in range(n)], dtype=float)
    block = max(1, math.ceil(n / (4 * workers)))
    spans = [(s, min(s + block, n)) for s in range(0, n, block)]

    def run_span(span):
        s, e = span
        return [fn(i) for i in range(s, e)]

    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(run_span, spans))
    return np.asarray([v for part in parts for v in part], dtype=float)


def _bounds_for_scenario(scenario) -> GaussianBoundReport:
    if isinstance(scenario, ClusterModel):
        region = Region(scenario.lam, scenario.horizon)
        return cluster_bounds_for_law(region, scenario.offspring, scenario.mark)
    if isinstance(scenario, InterferenceModel):
        p = scenario.power
        return interference_bounds(
            scenario.lam,
            p.abs_moment(2),
            p.abs_moment(3),
            p.abs_moment(4),
            hertzian_integral(scenario.radius, scenario.alpha, 2),
            hertzian_integral(scenario.radius, scenario.alpha, 3),
            hertzian_integral(scenario.radius, scenario.alpha, 4),
        )
    raise DomainError(f"unsupported scenario: {scenario!r}")


def _simulate_batch(scenario, n: int, seed: int, batch: int, workers: int) -> np.ndarray:
    if isinstance(scenario, ClusterModel):
        draw = sample_cluster_window
    else:
        draw = sample_interference

    def one(i: int) -> float:
        return draw(scenario, np.random.default_rng([seed, batch, i]))

    return _run_indexed(one, n, workers)


def verify_gaussian_bound(
    scenario, n_reps: int, seed: int, workers: int = 1
) -> VerificationReport:
    """Simulate the scenario, standardize, and test the empirical Kolmogorov
    and Wasserstein distances to N(0,1) against the computed bounds.

    Cluster scenarios standardize empirically from a separate pass of
    10 * n_reps replications (batch 1); interference scenarios standardize
    with the exact mean lam E[P] i1 and variance lam E[P^2] i2.  Passing
    means dk_emp <= dk_bound + dkw_margin(n_reps, 0.001) and
    dw_emp <= dw_bound + 0.05.
    """
    if n_reps < 2:
        raise DomainError("n_reps must be >= 2")
    report = _bounds_for_scenario(scenario)
    if isinstance(scenario, ClusterModel):
        calibration = _simulate_batch(scenario, 10 * n_reps, seed, 1, workers)
        mu = float(calibration.mean())
        sd = float(calibration.std(ddof=1))
        if sd == 0.0:
            raise DomainError("simulated distribution is degenerate (zero variance)")
        standardization = {"kind": "empirical", "n_calibration": 10 * n_reps}
    else:
        p = scenario.power
        i1 = hertzian_integral(scenario.radius, scenario.alpha, 1)
        i2 = hertzian_integral(scenario.radius, scenario.alpha, 2)
        mu = scenario.lam * p.abs_moment(1) * i1
        sd = math.sqrt(scenario.lam * p.abs_moment(2) * i2)
        standardization = {"kind": "analytic"}
    standardization.update(mean=mu, sd=sd)

    main = _simulate_batch(scenario, n_reps, seed, 0, workers)
    z = (main - mu) / sd
    dk_emp = empirical_kolmogorov(z)
    dw_emp = empirical_wasserstein(z)
    dk_margin = dkw_margin(n_reps, 0.001)
    dw_margin = 0.05
    dk_ok = dk_emp <= report.dk_bound + dk_margin
    dw_ok = dw_emp <= report.dw_bound + dw_margin
    details = {
        "bounds": report.to_dict(),
        "n_reps": n_reps,
        "seed": seed,
        "standardization": standardization,
        "dk_emp": dk_emp,
        "dk_margin": dk_margin,
        "dk_ok": dk_ok,
        "dw_emp": dw_emp,
        "dw_margin": dw_margin,
        "dw_ok": dw_ok,
    }
    return VerificationReport("gaussian-bound", dk_ok and dw_ok, details, samples=z)


def verify_bci(
    scenario,
    gamma: float,
    delta: float,
    x_grid,
    n_reps: int,
    seed: int,
    workers: int = 1,
    m_max: int = 12,
) -> VerificationReport:
    """Two-part check of a concentration parameter pair (gamma, delta).

    Empirically: at every grid point x where the tail bound is informative
    (bound + DKW margin < 1), the observed two-sided tail frequency of the
    standardized total must not exceed bound + margin.  Structurally: the
    cumulant growth condition behind the bound must hold order by order up to
    m_max, from the exact mark and progeny moments of the scenario.  Both
    must pass.  Standardization uses a same-size batch-1 pass.
    """
    if not isinstance(scenario, ClusterModel):
        raise DomainError("tail verification expects a ClusterModel scenario")
    if n_reps < 2:
        raise DomainError("n_reps must be >= 2")
    xs = [float(x) for x in x_grid]
    if not xs:
        raise DomainError("x_grid must be nonempty")
    if any(x < 0 for x in xs):
        raise DomainError("x_grid values must be >= 0")

    calibration = _simulate_batch(scenario, n_reps, seed, 1, workers)
    mu = float(calibration.mean())
    sd = float(calibration.std(ddof=1))
    if sd == 0.0:
        raise DomainError("simulated distribution is degenerate (zero variance)")
    main = _simulate_batch(scenario, n_reps, seed, 0, workers)
    z = (main - mu) / sd

    margin = dkw_margin(n_reps, 0.001)
    abs_z = np.abs(z)
    tails = []
    tails_ok = True
    for x in xs:
        bound = bci_bound(gamma, delta, x)
        checked = bound + margin < 1.0
        emp = float(np.mean(abs_z >= x))
        ok = (emp <= bound + margin) if checked else True
        tails_ok = tails_ok and ok
        tails.append(
            {"x": x, "bound": bound, "empirical": emp, "checked": checked, "ok": ok}
        )

    cumulant = check_cumulant_condition(
        mark_abs_moments(scenario.mark, m_max),
        progeny_moment_table(scenario.offspring, m_max),
        scenario.lam * scenario.horizon,
        gamma,
        delta,
        m_max,
    )
    passed = tails_ok and cumulant.all_pass
    details = {
        "gamma": gamma,
        "delta": delta,
        "n_reps": n_reps,
        "seed": seed,
        "dkw_margin": margin,
        "standardization": {"kind": "empirical", "mean": mu, "sd": sd},
        "tails": tails,
        "tails_ok": tails_ok,
        "cumulant": cumulant.to_dict(),
    }
    return VerificationReport("bci", passed, details, samples=z)


def verify_moments(
    offspring: OffspringLaw, n_draws: int, seed: int, workers: int = 1
) -> VerificationReport:
    """Draw n_draws cascade totals and compare the first three empirical
    moments of Z with the recursion values, at 4 standard errors each."""
    if n_draws < 2:
        raise DomainError("n_draws must be >= 2")
    n_chunks = math.ceil(n_draws / _PROGENY_CHUNK)

    def chunk(ci: int) -> np.ndarray:
        size = min(_PROGENY_CHUNK, n_draws - ci * _PROGENY_CHUNK)
        rng = np.random.default_rng([seed, ci])
        return _sample_progeny_block(offspring, rng, size, 10 ** 7)

    if workers <= 1:
        parts = [chunk(ci) for ci in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(chunk, range(n_chunks)))
    draws = np.concatenate(parts).astype(float)

    emp = {m: float(np.mean(draws ** m)) for m in range(1, 7)}
    checks = []
    passed = True
    for m in (1, 2, 3):
        theory = progeny_moment(offspring, m)
        se = math.sqrt(max(emp[2 * m] - emp[m] ** 2, 0.0) / n_draws)
        ok = abs(emp[m] - theory) <= 4.0 * se
        passed = passed and ok
        checks.append(
            {"m": m, "empirical": emp[m], "theory": theory, "se": se, "ok": ok}
        )
    details = {
        "n_draws": n_draws,
        "seed": seed,
        "per_moment": checks,
    }
    return VerificationReport("gw-moments", passed, details, samples=draws)


def samples_csv_text(samples) -> str:
    """Render draws as a two-column CSV string, full repr precision."""
    lines = ["seed_index,value"]
    lines.extend(
        f"{i},{float(v)!r}" for i, v in enumerate(np.asarray(samples).tolist())
    )
    return "\n".join(lines) + "\n"


def write_samples_csv(path, samples) -> None:
    """Dump draws as two columns, full repr precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(samples_csv_text(samples))
