"""Marginal likelihoods of test statistics and their Bayes factors.

Every Bayes factor is reported as a weight of evidence (natural log of
BF10). Marginals under alternative priors are one-dimensional integrals over
the non-centrality parameter, evaluated by adaptive Gauss-Kronrod quadrature
(QUADPACK via scipy) on sub-intervals split at the prior modes and at the
likelihood peak, with infinite tails handled by QUADPACK's mapping. For
chi-squared and F statistics the Poisson-mixture series in
:mod:`bff.mixture` offers a second route (``method="series"``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from . import distributions as dist
from . import mixture
from .distributions import Kind, StatFamily
from .errors import DomainError, NumericalError
from .priors import (
    DEFAULT_NU,
    CauchyJZS,
    InverseGamma,
    InverseMoment,
    NormalG,
    PriorSpec,
    Support,
    TestRow,
    n_effective,
    tau_for_effect,
)

__all__ = [
    "Sidedness",
    "TestStatistic",
    "default_row",
    "prior_for_effect",
    "log_marginal_null",
    "log_marginal_alt",
    "marginal_alt",
    "log_bf10",
    "log_bf10_ideal",
    "log_bf10_gprior",
    "log_bf10_jzs",
]

_EPSREL = 1e-10
_EPSABS = 1e-15


class Sidedness(str, Enum):
    TWO_SIDED = "two-sided"
    GREATER = "greater"
    LESS = "less"

    @property
    def support(self) -> Support:
        return {
            Sidedness.TWO_SIDED: Support.TWO_SIDED,
            Sidedness.GREATER: Support.POSITIVE,
            Sidedness.LESS: Support.NEGATIVE,
        }[self]


def default_row(family: StatFamily) -> TestRow:
    """Default calibration row for a family.

    One-df chi-squared and F statistics are treated as squared z and t
    statistics, so their BFFs coincide with the two-sided z/t BFFs.
    """
    if family.kind is Kind.Z:
        return TestRow.ONE_SAMPLE_Z
    if family.kind is Kind.T:
        return TestRow.ONE_SAMPLE_T
    if family.kind is Kind.CHISQ:
        return TestRow.ONE_SAMPLE_Z if family.df1 == 1 else TestRow.LIKELIHOOD_RATIO
    return TestRow.ONE_SAMPLE_T if family.df1 == 1 else TestRow.LINEAR_MODEL


@dataclass(frozen=True)
class TestStatistic:
    """An observed test statistic with the design information needed for BFFs."""

    __test__ = False

    family: StatFamily
    value: float
    n: object = None
    sidedness: Sidedness = Sidedness.TWO_SIDED
    row: TestRow | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "sidedness", Sidedness(self.sidedness))
        if self.row is None:
            object.__setattr__(self, "row", default_row(self.family))
        else:
            object.__setattr__(self, "row", TestRow(self.row))
        if not np.isfinite(self.value):
            raise DomainError(f"statistic must be finite, got {self.value!r}")
        if self.family.nonneg:
            if self.value < 0:
                raise DomainError(f"{self.family} statistic must be non-negative")
            if self.sidedness is not Sidedness.TWO_SIDED:
                raise DomainError("chi-squared/F tests have no sidedness option")
        if self.row.vector and not self.family.nonneg:
            raise DomainError(f"row {self.row.value} needs a chi-squared or F statistic")

    @property
    def n_effective(self) -> float:
        if self.n is None:
            raise DomainError("statistic carries no sample size")
        if self.row.vector:
            return float(self.n[0] if isinstance(self.n, (tuple, list)) else self.n)
        return n_effective(self.row, self.n)


def prior_for_effect(stat: TestStatistic, omega: float, nu: float = DEFAULT_NU) -> PriorSpec | None:
    """Calibrated alternative prior centred on standardized effect ``omega``.

    Returns ``None`` at omega = 0, where the prior collapses onto the null.
    For vector rows ``omega`` is the effect magnitude; tau uses omega**2.
    """
    if omega < 0:
        raise DomainError("standardized effect must be non-negative")
    if omega == 0:
        return None
    if stat.n is None:
        raise DomainError("statistic carries no sample size")
    q = omega * omega if stat.row.vector else omega
    tau = tau_for_effect(stat.row, stat.n, q, nu)
    if stat.family.nonneg:
        return InverseGamma(nu / 2, tau)
    return InverseMoment(tau, nu, stat.sidedness.support)


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------


def _quad(fn, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            fn, a, b, points=points, epsabs=_EPSABS, epsrel=_EPSREL, limit=400, full_output=True
        )[:3]
    return val, err, info


def _log_integrate_halfline(logfn, breakpoints) -> float:
    """log of int_0^inf exp(logfn(d)) dd with splits at ``breakpoints``."""
    pts = sorted({float(p) for p in breakpoints if np.isfinite(p) and p > 0})
    probes = pts + [p * s for p in pts for s in (0.5, 0.9, 1.1, 2.0)]
    vals = [logfn(p) for p in probes]
    finite = [v for v in vals if np.isfinite(v)]
    if not finite:
        probes = list(np.geomspace(1e-3, 1e3, 61))
        finite = [v for v in (logfn(p) for p in probes) if np.isfinite(v)]
        if not finite:
            return -math.inf
    shift = max(finite)

    def f(d):
        v = logfn(d)
        return math.exp(v - shift) if v > -math.inf else 0.0

    edges = [0.0] + pts
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, _ = _quad(f, lo, hi)
        total += val
        total_err += err
    val, err, _ = _quad(f, edges[-1], math.inf)
    total += val
    total_err += err
    if not total > 0:
        raise NumericalError("marginal integral vanished", shift=shift, breakpoints=pts)
    if total_err > 1e-6 * total:
        raise NumericalError("quadrature did not converge", estimate=total, abserr=total_err, breakpoints=pts)
    return shift + math.log(total)


def _prior_points(prior: PriorSpec) -> list[float]:
    if isinstance(prior, InverseMoment):
        m = math.sqrt(2 * prior.tau / (prior.nu + 1))
        return [m]
    if isinstance(prior, InverseGamma):
        return [math.sqrt(prior.scale / (prior.shape + 1)), math.sqrt(prior.scale / (prior.shape + 0.5))]
    if isinstance(prior, NormalG):
        return [math.sqrt(prior.g)]
    return [prior.r]


def _likelihood_points(family: StatFamily, x: float) -> list[float]:
    """Points on the delta = |non-centrality| scale near the likelihood peak."""
    if family.kind in (Kind.Z, Kind.T):
        c = abs(x)
        pts = [c, c + 3.0, max(c - 3.0, 0.0)]
        if family.kind is Kind.T:
            spread = 6.0 * c / math.sqrt(family.df2) + 3.0
            pts += [c + spread, max(c - spread, 0.0)]
        return pts
    k = float(family.df1)
    if family.kind is Kind.CHISQ:
        c = math.sqrt(max(x - k, 0.0))
    else:
        c = math.sqrt(max(k * x - k, 0.0))
    return [c, c + 3.0, max(c - 3.0, 0.0), 1.0]


def _log_delta_weight(prior: PriorSpec, sidedness_sign: int):
    """Log prior density on delta >= 0 for the integration variable."""
    if isinstance(prior, InverseGamma):
        return lambda d: math.log(2 * d) + prior.logpdf(d * d) if d > 0 else -math.inf
    if sidedness_sign == 0:
        # folded kernel f(x|d)+f(x|-d) times the symmetric density at d
        return lambda d: prior.logpdf(d)
    # one-sided prior: density on the matching half-line
    return lambda d: prior.logpdf(sidedness_sign * d)


def log_marginal_null(stat: TestStatistic) -> float:
    return dist.log_density(stat.family, stat.value, 0.0)


def _check_prior(stat: TestStatistic, prior: PriorSpec):
    if isinstance(prior, InverseGamma) and not stat.family.nonneg:
        raise DomainError("inverse-gamma priors apply to chi-squared/F non-centralities")
    if stat.family.nonneg and not isinstance(prior, InverseGamma) and prior.support is not Support.TWO_SIDED:
        raise DomainError("signed priors for chi-squared/F statistics must be two-sided")
    if not stat.family.nonneg and prior.support is not stat.sidedness.support:
        raise DomainError(
            f"{stat.sidedness.value} test needs a {stat.sidedness.support.value} prior, got {prior.support.value}"
        )


def log_marginal_alt(stat: TestStatistic, prior: PriorSpec, method: str = "quad") -> float:
    """log of int f(x | lam) g(lam) dlam."""
    _check_prior(stat, prior)
    family, x = stat.family, float(stat.value)
    if method == "series":
        if not family.nonneg:
            raise DomainError("series method applies to chi-squared and F statistics")
        return float(mixture.log_marginal_series(family, [x], prior)[0])
    if method != "quad":
        raise DomainError(f"unknown method {method!r}")
    if family.nonneg:
        weight = _log_delta_weight(prior, 0)
        if isinstance(prior, InverseGamma):
            dens = lambda d: dist.log_density(family, x, d * d)
        else:
            # signed prior on delta, squared: density of |delta| is 2 g(d)
            dens = lambda d: dist.log_density(family, x, d * d) + math.log(2.0)
    elif stat.sidedness is Sidedness.TWO_SIDED:
        weight = _log_delta_weight(prior, 0)
        dens = lambda d: dist.log_density_folded(family, x, d)
    else:
        sign = 1 if stat.sidedness is Sidedness.GREATER else -1
        weight = _log_delta_weight(prior, sign)
        dens = lambda d: dist.log_density(family, x, sign * d)

    def safe(d):
        w = weight(d) if d > 0 else -math.inf
        if w == -math.inf:
            return -math.inf
        return dens(d) + w

    pts = _prior_points(prior) + _likelihood_points(family, x)
    return _log_integrate_halfline(safe, pts)


def marginal_alt(stat: TestStatistic, prior: PriorSpec, method: str = "quad") -> float:
    return math.exp(log_marginal_alt(stat, prior, method))


def log_bf10(stat: TestStatistic, prior: PriorSpec | None, method: str = "quad") -> float:
    """Weight of evidence log BF10 = log m1(x) - log f(x | 0).

    ``prior=None`` denotes a prior collapsed onto the null (WOE 0).
    """
    if prior is None:
        return 0.0
    return log_marginal_alt(stat, prior, method) - log_marginal_null(stat)


def log_bf10_ideal(stat: TestStatistic, lambda_star: float) -> float:
    """Likelihood ratio against a simple alternative at ``lambda_star``."""
    if lambda_star == 0:
        return 0.0
    return dist.log_density(stat.family, stat.value, lambda_star) - log_marginal_null(stat)


def _check_baseline(stat: TestStatistic, what: str):
    fam = stat.family
    if fam.nonneg and fam.df1 != 1:
        raise DomainError(f"{what} Bayes factors are defined for z, t, chisq(1) and F(1, m) statistics")


def log_bf10_gprior(stat: TestStatistic, g: float, method: str = "quad") -> float:
    """g-prior: N(0, g) on the z/t non-centrality, squared for chisq(1)/F(1, m)."""
    _check_baseline(stat, "g-prior")
    if g <= 0:
        raise DomainError("g must be positive")
    fam = stat.family
    x = float(stat.value)
    if stat.sidedness is Sidedness.TWO_SIDED and fam.kind in (Kind.Z, Kind.CHISQ):
        x2 = x * x if fam.kind is Kind.Z else x
        # z ~ N(0, 1 + g) marginally
        return -0.5 * math.log1p(g) + x2 * g / (2 * (1 + g))
    return log_bf10(stat, NormalG(g, stat.sidedness.support), method)


def log_bf10_jzs(stat: TestStatistic, r: float, method: str = "quad") -> float:
    """JZS baseline: Cauchy(0, r) on the z/t non-centrality, squared for chisq(1)/F(1, m)."""
    _check_baseline(stat, "JZS")
    if r <= 0:
        raise DomainError("r must be positive")
    return log_bf10(stat, CauchyJZS(r, stat.sidedness.support), method)
