"""Central and noncentral densities for the z, t, chi-squared and F families.

Noncentral t, chi-squared and F densities are evaluated as Poisson-type
mixtures of central densities, summed in log space outward from the modal
term so that large non-centrality parameters do not underflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, NumericalError

__all__ = [
    "Kind",
    "StatFamily",
    "log_density",
    "density",
    "log_density_folded",
    "cdf",
    "quantile",
    "sample",
    "log_poisson",
    "log_central_chisq",
    "log_central_f_term",
]

LOG_REL_TOL = math.log(1e-14)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_BLOCK = 32


class Kind(str, Enum):
    Z = "z"
    T = "t"
    CHISQ = "chisq"
    F = "f"


@dataclass(frozen=True)
class StatFamily:
    """Sampling family of a test statistic.

    ``df1`` is the chi-squared df or the F numerator df; ``df2`` is the t df or
    the F denominator df.
    """

    kind: Kind
    df1: float | None = None
    df2: float | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        need1 = kind in (Kind.CHISQ, Kind.F)
        need2 = kind in (Kind.T, Kind.F)
        for name, needed in (("df1", need1), ("df2", need2)):
            value = getattr(self, name)
            if needed:
                if value is None or not np.isfinite(value) or value <= 0:
                    raise DomainError(f"{kind.value} family needs a positive {name}, got {value!r}")
            elif value is not None:
                raise DomainError(f"{kind.value} family takes no {name}")

    @classmethod
    def z(cls):
        return cls(Kind.Z)

    @classmethod
    def t(cls, df):
        return cls(Kind.T, df2=df)

    @classmethod
    def chisq(cls, df):
        return cls(Kind.CHISQ, df1=df)

    @classmethod
    def f(cls, df1, df2):
        return cls(Kind.F, df1=df1, df2=df2)

    @property
    def nonneg(self) -> bool:
        """True when the statistic and its non-centrality live on [0, inf)."""
        return self.kind in (Kind.CHISQ, Kind.F)

    def __str__(self):
        if self.kind is Kind.Z:
            return "z"
        if self.kind is Kind.T:
            return f"t({self.df2:g})"
        if self.kind is Kind.CHISQ:
            return f"chisq({self.df1:g})"
        return f"f({self.df1:g},{self.df2:g})"


def _check(family: StatFamily, x, lam):
    if family.nonneg:
        if lam < 0 or not np.isfinite(lam):
            raise DomainError(f"non-centrality must be >= 0 for {family}, got {lam!r}")
    elif not np.isfinite(lam):
        raise DomainError(f"non-centrality must be finite, got {lam!r}")
    if np.isnan(x):
        raise DomainError("statistic is NaN")


# ---------------------------------------------------------------------------
# log-space series summation
# ---------------------------------------------------------------------------


def _tail_done(t, best):
    """True if the series beyond the last entry of ``t`` is negligible."""
    last = t[-1]
    if not np.isfinite(last):
        return True
    if last > best + LOG_REL_TOL:
        return False
    if len(t) < 2 or t[-2] < last:
        return False
    step = last - t[-2]
    # geometric bound on the remaining tail
    return last + step - math.log1p(-math.exp(step)) < best + LOG_REL_TOL


def _series_logsumexp(logterm, j0: int) -> float:
    """Sum ``exp(logterm(j))`` over j >= 0 for a unimodal series.

    Evaluation starts at ``j0`` and walks up and down in blocks until the
    remaining terms fall below 1e-14 of the largest term seen.
    """
    j0 = max(int(j0), 0)
    lo = max(j0 - _BLOCK // 2, 0)
    hi = lo + _BLOCK
    mid = logterm(np.arange(lo, hi, dtype=float))
    chunks = [mid]
    best = np.max(mid)
    up = mid
    while not _tail_done(up, best):
        up = logterm(np.arange(hi, hi + _BLOCK, dtype=float))
        hi += _BLOCK
        chunks.append(up)
        best = max(best, np.max(up))
        if hi > j0 + 10_000_000:
            raise NumericalError("series failed to converge upward", j0=j0)
    down = mid
    while lo > 0 and not _tail_done(down[::-1], best):
        new_lo = max(lo - _BLOCK, 0)
        down = logterm(np.arange(new_lo, lo, dtype=float))
        lo = new_lo
        chunks.append(down)
        best = max(best, np.max(down))
    allterms = np.concatenate(chunks)
    if not np.isfinite(best):
        return -math.inf
    return float(best + math.log(np.sum(np.exp(allterms - best))))


def log_poisson(j, mean):
    """log P(J = j) for J ~ Poisson(mean); vectorized in j."""
    j = np.asarray(j, dtype=float)
    if mean == 0:
        return np.where(j == 0, 0.0, -np.inf)
    return j * math.log(mean) - mean - special.gammaln(j + 1.0)


def log_central_chisq(x, d):
    """log density of a central chi-squared with ``d`` df (vectorized in d)."""
    d = np.asarray(d, dtype=float)
    if x == 0:
        return np.where(d < 2, np.inf, np.where(d == 2, -math.log(2.0), -np.inf))
    return (d / 2 - 1) * math.log(x) - x / 2 - (d / 2) * math.log(2.0) - special.gammaln(d / 2)


def log_central_f_term(x, k, d, m):
    """log of the F mixture kernel.

    Equals log[(k/d) * f_{F(d, m)}(k x / d)], the j-th component of the
    noncentral F(k, m) density when d = k + 2j.
    """
    d = np.asarray(d, dtype=float)
    if x == 0:
        return np.where(d < 2, np.inf, np.where(d == 2, math.log(k / m), -np.inf))
    return (
        (d / 2) * math.log(k / m)
        + (d / 2 - 1) * math.log(x)
        - ((d + m) / 2) * math.log1p(k * x / m)
        - special.betaln(d / 2, m / 2)
    )


# ---------------------------------------------------------------------------
# noncentral t
# ---------------------------------------------------------------------------


class _SeriesTooLong(Exception):
    pass


_T_SERIES_MAX_INDEX = 1_000_000


def _t_log_parts(t, k, lam, even_only=False):
    """Return (log E, log O) for the noncentral t density.

    The density is E + sign(lam * t) * O where E and O are the sums of the
    even and odd terms of the power series in lam * t; both are positive.
    Raises _SeriesTooLong when the terms peak beyond a million.
    """
    a = k + t * t
    base = (
        -_LOG_SQRT_2PI
        - lam * lam / 2
        + (k / 2) * math.log(k)
        - (k / 2) * math.log(2.0)
        - special.gammaln(k / 2)
    )
    log2a = math.log(2.0 / a)
    lt = abs(lam * t)
    if lt == 0:
        return base + special.gammaln((k + 1) / 2) + ((k + 1) / 2) * log2a, -math.inf
    log_lt = math.log(lt)

    def term(j):
        return (
            base
            + j * log_lt
            - special.gammaln(j + 1)
            + special.gammaln((j + k + 1) / 2)
            + ((j + k + 1) / 2) * log2a
        )

    q = lt * math.sqrt(2.0 / a)
    u = q * q / 4 + math.sqrt(q**4 / 16 + q * q * k / 2)
    m0 = max(int(u) - 1, 0) // 2
    if m0 > _T_SERIES_MAX_INDEX:
        raise _SeriesTooLong
    log_even = _series_logsumexp(lambda m: term(2 * m), m0)
    if even_only:
        return log_even, -math.inf
    log_odd = _series_logsumexp(lambda m: term(2 * m + 1), m0)
    return log_even, log_odd


def _t_logpdf_mixing(t, k, lam):
    """Noncentral t log density by integrating over the chi mixing variable.

    Used when the power series cancels (lam * t << 0). The integrand
    s * phi(t s - lam) * p_S(s), S = sqrt(V / k), is positive.
    """
    const = (
        -_LOG_SQRT_2PI
        + math.log(2.0)
        + (k / 2) * math.log(k)
        - (k / 2) * math.log(2.0)
        - special.gammaln(k / 2)
    )
    a = k + t * t

    def logf(s):
        return k * math.log(s) - (t * s - lam) ** 2 / 2 - k * s * s / 2

    s_star = (lam * t + math.sqrt(lam * lam * t * t + 4 * k * a)) / (2 * a)
    width = 1.0 / math.sqrt(k / s_star**2 + a)
    peak = logf(s_star)
    lo = max(s_star - 40 * width, 0.0)
    hi = s_star + 40 * width
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            lambda s: math.exp(logf(s) - peak) if s > 0 else 0.0,
            lo,
            hi,
            points=[s_star],
            epsabs=0.0,
            epsrel=1e-12,
            limit=200,
        )
    if val <= 0:
        raise NumericalError("noncentral t mixing integral vanished", t=t, df=k, lam=lam)
    return const + peak + math.log(val)


def _t_logpdf(t, k, lam):
    if lam == 0 or t == 0:
        log_even, _ = _t_log_parts(t, k, lam, even_only=True)
        return log_even
    try:
        log_even, log_odd = _t_log_parts(t, k, lam)
    except _SeriesTooLong:
        return _t_logpdf_mixing(t, k, lam)
    if lam * t > 0:
        return float(np.logaddexp(log_even, log_odd))
    ratio = math.exp(log_odd - log_even)
    if 1.0 - ratio > 1e-4:
        return log_even + math.log1p(-ratio)
    return _t_logpdf_mixing(t, k, lam)


# ---------------------------------------------------------------------------
# public density API
# ---------------------------------------------------------------------------


def _quadratic_root(b, c) -> int:
    """Integer part of the larger root of j**2 + b j + c = 0, floored at 0."""
    disc = b * b - 4 * c
    if disc <= 0:
        return 0
    return max(int((-b + math.sqrt(disc)) / 2), 0)


def log_density(family: StatFamily, x: float, lam: float = 0.0) -> float:
    """Log density of the statistic ``x`` given non-centrality ``lam``."""
    x = float(x)
    lam = float(lam)
    _check(family, x, lam)
    kind = family.kind
    if kind is Kind.Z:
        return -_LOG_SQRT_2PI - 0.5 * (x - lam) ** 2
    if kind is Kind.T:
        if not np.isfinite(x):
            return -math.inf
        return _t_logpdf(x, float(family.df2), lam)
    if x < 0 or x == math.inf:
        return -math.inf
    k = float(family.df1)
    if kind is Kind.CHISQ:
        if lam == 0:
            return float(log_central_chisq(x, k))
        half = lam / 2

        def term(j):
            return log_poisson(j, half) + log_central_chisq(x, k + 2 * j)

        # peak where the term ratio (half x / 2) / ((j + 1)(j + k/2)) is 1
        return _series_logsumexp(term, _quadratic_root(1 + k / 2, k / 2 - half * x / 2))
    m = float(family.df2)
    if lam == 0:
        return float(log_central_f_term(x, k, k, m))
    half = lam / 2

    def term(j):
        return log_poisson(j, half) + log_central_f_term(x, k, k + 2 * j, m)

    # peak where half * y * (j + (k+m)/2) = (j + 1)(j + k/2), y = kx/(kx+m)
    hy = half * k * x / (k * x + m)
    return _series_logsumexp(term, _quadratic_root(1 + k / 2 - hy, k / 2 - hy * (k + m) / 2))


def density(family: StatFamily, x: float, lam: float = 0.0) -> float:
    return math.exp(log_density(family, x, lam))


def log_density_folded(family: StatFamily, x: float, delta: float) -> float:
    """log[f(x | delta) + f(x | -delta)] for the z and t families.

    For t this is log(2 E) with E the even part of the series, so no
    cancellation occurs.
    """
    x = float(x)
    delta = float(delta)
    if family.kind is Kind.Z:
        return float(
            np.logaddexp(-0.5 * (x - delta) ** 2, -0.5 * (x + delta) ** 2) - _LOG_SQRT_2PI
        )
    if family.kind is Kind.T:
        _check(family, x, delta)
        k = float(family.df2)
        try:
            log_even, _ = _t_log_parts(x, k, delta, even_only=True)
        except _SeriesTooLong:
            return float(np.logaddexp(_t_logpdf_mixing(x, k, delta), _t_logpdf_mixing(x, k, -delta)))
        return math.log(2.0) + log_even
    raise DomainError(f"folded density is defined for z and t only, not {family}")


# ---------------------------------------------------------------------------
# distribution functions
# ---------------------------------------------------------------------------


def _poisson_window(half):
    if half == 0:
        return np.array([0.0]), np.array([1.0])
    sd = math.sqrt(half)
    lo = max(int(half - 12 * sd - 30), 0)
    hi = int(half + 12 * sd + 30)
    j = np.arange(lo, hi + 1, dtype=float)
    return j, np.exp(log_poisson(j, half))


def cdf(family: StatFamily, x: float, lam: float = 0.0) -> float:
    """P(X <= x | lam)."""
    x = float(x)
    lam = float(lam)
    _check(family, x, lam)
    kind = family.kind
    if kind is Kind.Z:
        return float(special.ndtr(x - lam))
    if kind is Kind.T:
        k = float(family.df2)
        if x == math.inf:
            return 1.0
        if x == -math.inf:
            return 0.0

        # P(T <= x) = E_S[Phi(x S - lam)], S = sqrt(V / k)
        def integrand(s):
            if s <= 0:
                return 0.0
            logp = (
                math.log(2.0)
                + (k / 2) * math.log(k / 2)
                + (k - 1) * math.log(s)
                - k * s * s / 2
                - special.gammaln(k / 2)
            )
            return special.ndtr(x * s - lam) * math.exp(logp)

        sd = 1.0 / math.sqrt(2 * k)
        hi = 1.0 + 60 * sd + 5.0
        val = integrate.quad(integrand, 0.0, hi, points=[1.0], epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        return float(min(max(val, 0.0), 1.0))
    if x <= 0:
        return 0.0
    if x == math.inf:
        return 1.0
    k = float(family.df1)
    j, w = _poisson_window(lam / 2)
    if kind is Kind.CHISQ:
        parts = special.gammainc((k + 2 * j) / 2, x / 2)
    else:
        m = float(family.df2)
        parts = special.betainc((k + 2 * j) / 2, m / 2, k * x / (k * x + m))
    return float(min(max(np.sum(w * parts), 0.0), 1.0))


def quantile(family: StatFamily, p: float, lam: float = 0.0) -> float:
    """Inverse of :func:`cdf` by bracketed root search."""
    if not 0 < p < 1:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    if family.kind is Kind.Z:
        return lam + float(special.ndtri(p))
    if family.nonneg:
        lo, hi = 0.0, max(1.0, 2 * (float(family.df1) + lam))
    else:
        lo, hi = lam - 10.0, lam + 10.0
        while cdf(family, lo, lam) > p:
            lo -= 2 * (hi - lo)
    while cdf(family, hi, lam) < p:
        hi *= 2
        if hi > 1e300:
            raise NumericalError("quantile bracket search overflowed", p=p)
    return optimize.brentq(lambda v: cdf(family, v, lam) - p, lo, hi, xtol=1e-14, rtol=1e-14)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample(family: StatFamily, lam: float, rng: np.random.Generator, size=None):
    """Draw from the noncentral distribution.

    Draw order is fixed (normal, then the numerator chi-squared remainder,
    then the denominator chi-squared) so that, for one-df families sharing a
    generator state, chi-squared draws are squares of z draws and F draws are
    squares of t draws.
    """
    lam = float(lam)
    _check(family, 0.0, lam)
    kind = family.kind
    if kind is Kind.Z:
        return rng.standard_normal(size) + lam
    if kind is Kind.T:
        num = rng.standard_normal(size) + lam
        k = float(family.df2)
        return num / np.sqrt(rng.chisquare(k, size) / k)
    k = float(family.df1)
    num = (rng.standard_normal(size) + math.sqrt(lam)) ** 2
    if k > 1:
        num = num + rng.chisquare(k - 1, size)
    if kind is Kind.CHISQ:
        return num
    m = float(family.df2)
    return (num / k) / (rng.chisquare(m, size) / m)
