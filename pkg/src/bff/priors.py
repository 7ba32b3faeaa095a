"""Alternative-hypothesis priors on non-centrality parameters.

Inverse-moment, normal (g-prior) and Cauchy (JZS) priors are stated on the
signed z/t non-centrality. The inverse-gamma prior lives on the chi-squared/F
non-centrality directly. If the signed parameter has a two-sided
inverse-moment prior with (tau, nu), its square is inverse-gamma with shape
nu/2 and scale tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError, NumericalError

__all__ = [
    "Support",
    "TestRow",
    "InverseMoment",
    "InverseGamma",
    "NormalG",
    "CauchyJZS",
    "PriorSpec",
    "DEFAULT_NU",
    "im_density",
    "im_modes",
    "im_cdf",
    "im_sample",
    "tau_for_effect",
    "effect_lambda",
    "n_effective",
    "nu_coverage",
    "select_nu",
    "smallest_nu",
    "iqr_index",
    "median_index",
    "lambda_median",
    "with_index",
]

DEFAULT_NU = 9.0


class Support(str, Enum):
    TWO_SIDED = "two-sided"
    POSITIVE = "positive"
    NEGATIVE = "negative"


class TestRow(str, Enum):
    """Test types with a default tau calibration."""

    __test__ = False  # keep pytest from collecting this enum

    ONE_SAMPLE_Z = "one-sample-z"
    ONE_SAMPLE_T = "one-sample-t"
    TWO_SAMPLE_Z = "two-sample-z"
    TWO_SAMPLE_T = "two-sample-t"
    MULTINOMIAL_POISSON = "multinomial-poisson"
    LINEAR_MODEL = "linear-model"
    LIKELIHOOD_RATIO = "likelihood-ratio"

    @property
    def two_sample(self) -> bool:
        return self in (TestRow.TWO_SAMPLE_Z, TestRow.TWO_SAMPLE_T)

    @property
    def vector(self) -> bool:
        return self in (TestRow.MULTINOMIAL_POISSON, TestRow.LINEAR_MODEL, TestRow.LIKELIHOOD_RATIO)


def _positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def _support_factor(support: Support, lam):
    """(log multiplier, inside-support mask) for one-sided restriction."""
    lam = np.asarray(lam, dtype=float)
    if support is Support.TWO_SIDED:
        return 0.0, np.ones(lam.shape, dtype=bool)
    if support is Support.POSITIVE:
        return math.log(2.0), lam > 0
    return math.log(2.0), lam < 0


def _scalar(out, like):
    return float(out) if np.ndim(like) == 0 else out


# ---------------------------------------------------------------------------
# inverse-moment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InverseMoment:
    tau: float
    nu: float = DEFAULT_NU
    support: Support = Support.TWO_SIDED

    def __post_init__(self):
        _positive("tau", self.tau)
        _positive("nu", self.nu)
        object.__setattr__(self, "support", Support(self.support))

    def logpdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        shift, inside = _support_factor(self.support, lam)
        a = self.nu / 2
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            l2 = lam * lam
            out = (
                shift
                + a * math.log(self.tau)
                - special.gammaln(a)
                - (self.nu + 1) / 2 * np.log(l2)
                - self.tau / l2
            )
        out = np.where(inside & (l2 > 0), out, -np.inf)
        return _scalar(out, lam)

    def pdf(self, lam):
        return np.exp(self.logpdf(lam))

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        a = self.nu / 2
        with np.errstate(divide="ignore"):
            y = self.tau / (lam * lam)
        upper = special.gammaincc(a, y)  # P(|L| <= |lam|)
        lower = special.gammainc(a, y)  # P(|L| > |lam|)
        if self.support is Support.TWO_SIDED:
            out = np.where(lam > 0, 0.5 + 0.5 * upper, np.where(lam < 0, 0.5 * lower, 0.5))
        elif self.support is Support.POSITIVE:
            out = np.where(lam > 0, upper, 0.0)
        else:
            out = np.where(lam < 0, lower, 1.0)
        return _scalar(out, lam)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        a = self.nu / 2
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.support is Support.TWO_SIDED:
                pos = np.sqrt(self.tau / special.gammainccinv(a, np.clip(2 * p - 1, 0, 1)))
                neg = -np.sqrt(self.tau / special.gammaincinv(a, np.clip(2 * p, 0, 1)))
                out = np.where(p > 0.5, pos, np.where(p < 0.5, neg, 0.0))
            elif self.support is Support.POSITIVE:
                out = np.sqrt(self.tau / special.gammainccinv(a, p))
            else:
                out = -np.sqrt(self.tau / special.gammaincinv(a, p))
        return _scalar(out, p)

    def modes(self):
        m = math.sqrt(2 * self.tau / (self.nu + 1))
        if self.support is Support.TWO_SIDED:
            return (-m, m)
        return (m,) if self.support is Support.POSITIVE else (-m,)

    def sample(self, rng: np.random.Generator, size=None):
        g = rng.standard_gamma(self.nu / 2, size)
        w = np.sqrt(self.tau / g)
        if self.support is Support.TWO_SIDED:
            sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
            return w * sign
        return w if self.support is Support.POSITIVE else -w

    def squared(self) -> "InverseGamma":
        """Law of the squared parameter."""
        return InverseGamma(self.nu / 2, self.tau)


# ---------------------------------------------------------------------------
# inverse-gamma (on chi-squared / F non-centrality)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InverseGamma:
    shape: float
    scale: float
    support: Support = Support.POSITIVE

    def __post_init__(self):
        _positive("shape", self.shape)
        _positive("scale", self.scale)
        if Support(self.support) is not Support.POSITIVE:
            raise DomainError("inverse-gamma prior is supported on the positive half-line only")
        object.__setattr__(self, "support", Support.POSITIVE)

    @classmethod
    def from_nu(cls, tau, nu=DEFAULT_NU):
        return cls(nu / 2, tau)

    def logpdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        a, b = self.shape, self.scale
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = a * math.log(b) - special.gammaln(a) - (a + 1) * np.log(lam) - b / lam
        out = np.where(lam > 0, out, -np.inf)
        return _scalar(out, lam)

    def pdf(self, lam):
        return np.exp(self.logpdf(lam))

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(lam > 0, special.gammaincc(self.shape, self.scale / np.where(lam > 0, lam, 1.0)), 0.0)
        return _scalar(out, lam)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore"):
            out = self.scale / special.gammainccinv(self.shape, p)
        return _scalar(out, p)

    def modes(self):
        return (self.scale / (self.shape + 1),)

    def sample(self, rng: np.random.Generator, size=None):
        return self.scale / rng.standard_gamma(self.shape, size)


# ---------------------------------------------------------------------------
# local priors used as baselines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalG:
    """Normal prior with mean 0 and variance ``g`` on the z/t non-centrality."""

    g: float
    support: Support = Support.TWO_SIDED

    def __post_init__(self):
        _positive("g", self.g)
        object.__setattr__(self, "support", Support(self.support))

    @property
    def sd(self):
        return math.sqrt(self.g)

    def logpdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        shift, inside = _support_factor(self.support, lam)
        out = shift - 0.5 * math.log(2 * math.pi * self.g) - lam * lam / (2 * self.g)
        return _scalar(np.where(inside, out, -np.inf), lam)

    def pdf(self, lam):
        return np.exp(self.logpdf(lam))

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        base = special.ndtr(lam / self.sd)
        return _scalar(_fold_cdf(self.support, base), lam)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return _scalar(self.sd * special.ndtri(_unfold_p(self.support, p)), p)

    def modes(self):
        return (0.0,)

    def sample(self, rng: np.random.Generator, size=None):
        return _fold_sample(self.support, self.sd * rng.standard_normal(size))


@dataclass(frozen=True)
class CauchyJZS:
    """Cauchy prior with location 0 and scale ``r`` on the z/t non-centrality."""

    r: float
    support: Support = Support.TWO_SIDED

    def __post_init__(self):
        _positive("r", self.r)
        object.__setattr__(self, "support", Support(self.support))

    def logpdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        shift, inside = _support_factor(self.support, lam)
        out = shift - math.log(math.pi * self.r) - np.log1p((lam / self.r) ** 2)
        return _scalar(np.where(inside, out, -np.inf), lam)

    def pdf(self, lam):
        return np.exp(self.logpdf(lam))

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        base = 0.5 + np.arctan(lam / self.r) / math.pi
        return _scalar(_fold_cdf(self.support, base), lam)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return _scalar(self.r * np.tan(math.pi * (_unfold_p(self.support, p) - 0.5)), p)

    def modes(self):
        return (0.0,)

    def sample(self, rng: np.random.Generator, size=None):
        return _fold_sample(self.support, self.r * rng.standard_cauchy(size))


def _fold_cdf(support, base):
    if support is Support.TWO_SIDED:
        return base
    if support is Support.POSITIVE:
        return np.clip(2 * base - 1, 0.0, 1.0)
    return np.clip(2 * base, 0.0, 1.0)


def _unfold_p(support, p):
    if support is Support.TWO_SIDED:
        return p
    if support is Support.POSITIVE:
        return 0.5 + p / 2
    return p / 2


def _fold_sample(support, draws):
    if support is Support.TWO_SIDED:
        return draws
    return np.abs(draws) if support is Support.POSITIVE else -np.abs(draws)


PriorSpec = Union[InverseMoment, InverseGamma, NormalG, CauchyJZS]


# ---------------------------------------------------------------------------
# functional wrappers
# ---------------------------------------------------------------------------


def im_density(lam, tau, nu=DEFAULT_NU, support=Support.TWO_SIDED):
    """Inverse-moment density; zero at exactly lam = 0."""
    return InverseMoment(tau, nu, support).pdf(lam)


def im_modes(tau, nu=DEFAULT_NU):
    _positive("tau", tau)
    _positive("nu", nu)
    m = math.sqrt(2 * tau / (nu + 1))
    return (-m, m)


def im_cdf(lam, tau, nu=DEFAULT_NU, support=Support.TWO_SIDED):
    return InverseMoment(tau, nu, support).cdf(lam)


def im_sample(tau, nu, support, rng, size=None):
    return InverseMoment(tau, nu, support).sample(rng, size)


def _sample_sizes(row: TestRow, n):
    if row.two_sample:
        try:
            n1, n2 = n
        except (TypeError, ValueError):
            raise DomainError(f"{row.value} needs a pair of sample sizes (n1, n2)") from None
        if not (n1 > 0 and n2 > 0):
            raise DomainError(f"sample sizes must be positive, got {n!r}")
        return float(n1), float(n2)
    if isinstance(n, (tuple, list)):
        if len(n) != 1:
            raise DomainError(f"{row.value} takes a single sample size")
        n = n[0]
    if not n > 0:
        raise DomainError(f"sample size must be positive, got {n!r}")
    return (float(n),)


def n_effective(row: TestRow, n) -> float:
    """Sample size whose product with omega**2 is the squared non-centrality."""
    row = TestRow(row)
    sizes = _sample_sizes(row, n)
    if row.two_sample:
        n1, n2 = sizes
        return 2 * n1 * n2 / (n1 + n2)
    return sizes[0]


def tau_for_effect(row: TestRow, n, omega: float, nu: float = DEFAULT_NU) -> float:
    """tau placing the prior mode at the non-centrality implied by ``omega``.

    For the vector rows (multinomial/Poisson, linear model, likelihood
    ratio), ``omega`` is the quadratic form omega'omega.
    """
    row = TestRow(row)
    _positive("nu", nu)
    sizes = _sample_sizes(row, n)
    if row.vector:
        if omega < 0:
            raise DomainError("omega'omega must be non-negative")
        return sizes[0] * omega * (nu / 2 + 1)
    if row.two_sample:
        n1, n2 = sizes
        return n1 * n2 * omega * omega * (nu + 1) / (n1 + n2)
    return sizes[0] * omega * omega * (nu + 1) / 2


def effect_lambda(row: TestRow, n, omega: float) -> float:
    """Non-centrality parameter at which the calibrated prior has its mode."""
    row = TestRow(row)
    if row.vector:
        return _sample_sizes(row, n)[0] * omega
    return math.sqrt(n_effective(row, n)) * omega


# ---------------------------------------------------------------------------
# choice of nu
# ---------------------------------------------------------------------------


def nu_coverage(nu, small=0.2, large=0.8, medium=0.5):
    """Prior probability of effects in (small, large) when the mode sits at ``medium``.

    Computed as the mass of an inverse-gamma(nu/2, 1) law on (c, d) with
    c = 2 (small/medium)**2 / (nu + 1) and d = 2 (large/medium)**2 / (nu + 1).
    """
    a = nu / 2
    c = 2 * (small / medium) ** 2 / (nu + 1)
    d = 2 * (large / medium) ** 2 / (nu + 1)
    return float(special.gammaincc(a, 1 / d) - special.gammaincc(a, 1 / c))


def select_nu(gamma=0.9, small=0.2, large=0.8, medium=0.5, bracket=(0.1, 100.0)):
    """Continuous nu at which :func:`nu_coverage` equals ``gamma``."""
    if not 0 < gamma < 1:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not 0 < small < medium < large:
        raise DomainError("need 0 < small < medium < large")
    lo, hi = bracket
    f = lambda nu: nu_coverage(nu, small, large, medium) - gamma
    if f(lo) * f(hi) > 0:
        raise NumericalError("no root of the coverage equation in bracket", gamma=gamma, bracket=bracket)
    root = optimize.brentq(f, lo, hi, xtol=1e-12, rtol=1e-14)
    if abs(f(root)) > 1e-6:
        raise NumericalError("coverage root residual too large", residual=f(root))
    return root


def smallest_nu(gamma=0.9, small=0.2, large=0.8, medium=0.5) -> int:
    """Smallest integer nu whose coverage reaches ``gamma``.

    Coverage increases with nu, so this is the ceiling of the continuous root.
    """
    root = select_nu(gamma, small, large, medium)
    nu = max(math.floor(root), 1)
    while nu_coverage(nu, small, large, medium) < gamma:
        nu += 1
    return nu


# ---------------------------------------------------------------------------
# dispersion indices
# ---------------------------------------------------------------------------


def iqr_index(prior: PriorSpec) -> float:
    """Interquartile range of a two-sided prior."""
    if prior.support is not Support.TWO_SIDED:
        raise DomainError("IQR indexing applies to two-sided priors; use median_index")
    return float(prior.quantile(0.75) - prior.quantile(0.25))


def median_index(prior: PriorSpec) -> float:
    """Median of a one-sided prior."""
    if prior.support is Support.TWO_SIDED:
        raise DomainError("median indexing applies to one-sided priors; use iqr_index")
    return float(prior.quantile(0.5))


def lambda_median(prior: PriorSpec) -> float:
    """Median of the induced prior on a chi-squared/F non-centrality.

    Signed priors are squared; the inverse-gamma prior is used as is.
    """
    if isinstance(prior, InverseGamma):
        return float(prior.quantile(0.5))
    folded = replace(prior, support=Support.POSITIVE)
    return float(folded.quantile(0.5)) ** 2


_DISPERSION = {InverseMoment: "tau", InverseGamma: "scale", NormalG: "g", CauchyJZS: "r"}


def with_index(prior: PriorSpec, value: float, index=None) -> PriorSpec:
    """Return a copy of ``prior`` whose dispersion index equals ``value``.

    ``index`` maps a prior to its index; defaults to IQR for two-sided
    priors and the median otherwise. The dispersion parameter (tau, scale,
    g or r) is found by bisection on its logarithm.
    """
    _positive("index value", value)
    if index is None:
        index = iqr_index if prior.support is Support.TWO_SIDED else median_index
    field = _DISPERSION[type(prior)]

    def gap(logp):
        return math.log(index(replace(prior, **{field: math.exp(logp)}))) - math.log(value)

    lo, hi = -5.0, 5.0
    for _ in range(200):
        if gap(lo) < 0:
            break
        lo -= 10.0
    for _ in range(200):
        if gap(hi) > 0:
            break
        hi += 10.0
    if gap(lo) * gap(hi) > 0:
        raise NumericalError("could not bracket the dispersion parameter", value=value)
    logp = optimize.bisect(gap, lo, hi, xtol=1e-13, maxiter=500)
    return replace(prior, **{field: math.exp(logp)})
