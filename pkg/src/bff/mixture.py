"""Prior-predictive Poisson-mixture weights for chi-squared and F statistics.

A noncentral chi-squared or F density is sum_j Pois(j; lam/2) h_j(x). Averaging
the Poisson weights over a prior on lam gives weights pi_j, and the marginal
density becomes sum_j pi_j h_j(x). No quadrature over lam is needed per
statistic, so whole batches of statistics share one weight vector. This is
the engine behind the operating-characteristics simulator.

Closed forms:
  inverse-gamma(a, b):  pi_j = b^a / (Gamma(a) j! 2^j) * 2 (2b)^((j-a)/2) K_{j-a}(sqrt(2b))
  squared N(0, g):      pi_j = Gamma(j+1/2) / (Gamma(1/2) j!) g^j / (1+g)^(j+1/2)
Squared Cauchy weights are computed by one-dimensional quadrature per j.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .distributions import Kind, StatFamily, log_central_chisq, log_central_f_term, log_poisson
from .errors import DomainError, NumericalError
from .priors import CauchyJZS, InverseGamma, InverseMoment, NormalG, PriorSpec, Support

__all__ = [
    "series_length",
    "log_kernel_matrix",
    "log_weights",
    "log_weights_ig",
    "log_weights_poisson",
    "logsumexp_rows",
    "log_marginal_series",
]

_MAX_TERMS = 50_000


def series_length(family: StatFamily, x_max: float, lam_max: float = 0.0) -> int:
    """Number of mixture terms needed for statistics up to ``x_max``."""
    if not family.nonneg:
        raise DomainError("mixture series apply to chi-squared and F families")
    k = float(family.df1)
    x_max = float(max(x_max, 0.0))
    if family.kind is Kind.F:
        m = float(family.df2)
        peak = max(k * x_max - k, 0.0) / 2
        y = k * x_max / (k * x_max + m)
        geo = 40.0 / -math.log(y) if 0 < y < 1 else 0.0
    else:
        peak = max(x_max - k, 0.0) / 2
        geo = 0.0
    peak = max(peak, lam_max / 2)
    n = int(peak + 14 * math.sqrt(peak) + geo + 80)
    if n > _MAX_TERMS:
        raise NumericalError("mixture series too long", terms=n, x_max=x_max)
    return n


def log_kernel_matrix(family: StatFamily, x, n_terms: int) -> np.ndarray:
    """log h_j(x_r) for statistics x (shape R) and j < n_terms; shape (R, n_terms)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise DomainError("chi-squared/F statistics must be non-negative")
    j = np.arange(n_terms, dtype=float)
    k = float(family.df1)
    d = k + 2 * j
    with np.errstate(divide="ignore"):
        logx = np.log(x)[:, None]
    if family.kind is Kind.CHISQ:
        out = (d / 2 - 1) * logx - x[:, None] / 2 - (d / 2) * math.log(2.0) - special.gammaln(d / 2)
    elif family.kind is Kind.F:
        m = float(family.df2)
        out = (
            (d / 2) * math.log(k / m)
            + (d / 2 - 1) * logx
            - ((d + m) / 2) * np.log1p(k * x[:, None] / m)
            - special.betaln(d / 2, m / 2)
        )
    else:
        raise DomainError("mixture series apply to chi-squared and F families")
    zero = x == 0
    if np.any(zero):
        for r in np.flatnonzero(zero):
            if family.kind is Kind.CHISQ:
                out[r] = log_central_chisq(0.0, d)
            else:
                out[r] = log_central_f_term(0.0, k, d, float(family.df2))
    return out


def logsumexp_rows(a: np.ndarray) -> np.ndarray:
    top = np.max(a, axis=-1, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.sum(np.exp(a - top), axis=-1)) + top[..., 0]


def log_weights_poisson(lam, n_terms: int) -> np.ndarray:
    """log Pois(j; lam/2); lam may be an array (rows)."""
    lam = np.asarray(lam, dtype=float)
    j = np.arange(n_terms, dtype=float)
    if lam.ndim == 0:
        return log_poisson(j, float(lam) / 2)
    half = lam[:, None] / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = j * np.log(half) - half - special.gammaln(j + 1)
    return np.where(half == 0, np.where(j == 0, 0.0, -np.inf), out)


def _log_bessel_ladder(mu0, z, length):
    """log K_{mu0 + i}(z) for i < length, mu0 in [0, 1); z may be an array."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape + (length,))
    if length == 0:
        return out
    out[..., 0] = np.log(special.kve(mu0, z)) - z
    if length == 1:
        return out
    out[..., 1] = np.log(special.kve(mu0 + 1, z)) - z
    ratio = np.exp(out[..., 1] - out[..., 0])
    for i in range(1, length - 1):
        # K_{mu+1} = K_{mu-1} + (2 mu / z) K_mu
        ratio = 1.0 / ratio + 2.0 * (mu0 + i) / z
        out[..., i + 1] = out[..., i] + np.log(ratio)
    return out


def log_weights_ig(shape: float, scale, n_terms: int) -> np.ndarray:
    """Mixture weights for an inverse-gamma(shape, scale) prior on lam.

    ``scale`` may be an array of length R; the result then has shape (R, n_terms).
    """
    a = float(shape)
    b = np.asarray(scale, dtype=float)
    if np.any(b <= 0):
        raise DomainError("inverse-gamma scale must be positive")
    z = np.sqrt(2 * b)
    j = np.arange(n_terms, dtype=float)
    # orders j - a; |j - a| on two integer-spaced ladders
    fa = math.floor(a)
    low_len = min(fa + 1, n_terms)  # j = 0..fa  -> order a - j
    mu_low = a - fa
    ladder_low = _log_bessel_ladder(mu_low, z, fa + 1)
    start_high = math.ceil(a) if a != fa else fa
    high_len = max(n_terms - start_high, 0)
    ladder_high = _log_bessel_ladder(start_high - a, z, high_len)
    logk = np.empty(b.shape + (n_terms,))
    for jj in range(low_len):
        logk[..., jj] = ladder_low[..., fa - jj]
    if high_len:
        logk[..., start_high:] = ladder_high
    logb = np.log(b)[..., None]
    return (
        a * logb
        - special.gammaln(a)
        - j * math.log(2.0)
        - special.gammaln(j + 1)
        + math.log(2.0)
        + ((j - a) / 2) * (math.log(2.0) + logb)
        + logk
    )


def _log_weights_normal(g: float, n_terms: int) -> np.ndarray:
    j = np.arange(n_terms, dtype=float)
    return (
        special.gammaln(j + 0.5)
        - special.gammaln(0.5)
        - special.gammaln(j + 1)
        + j * (math.log(g) - math.log1p(g))
        - 0.5 * math.log1p(g)
    )


@lru_cache(maxsize=64)
def _log_weights_cauchy(r: float, n_terms: int) -> np.ndarray:
    # pi_j = int_0^inf Pois(j; d^2/2) * 2 c(d; r) dd
    out = np.empty(n_terms)
    log_c = math.log(2.0 / (math.pi * r))
    for j in range(n_terms):
        peak = math.sqrt(2.0 * j) if j else 0.0

        def logf(d, j=j):
            h = d * d / 2
            pois = -h if j == 0 else j * math.log(h) - h - math.lgamma(j + 1) if h > 0 else -math.inf
            return pois + log_c - math.log1p((d / r) ** 2)

        top = logf(peak) if j else logf(0.0)
        pts = [p for p in (peak - 8, peak - 3, peak, peak + 3, peak + 8) if p > 0]
        hi = peak + 40.0
        val = integrate.quad(
            lambda d: math.exp(logf(d) - top), 0.0, hi, points=pts or None, epsabs=0.0, epsrel=1e-12, limit=400
        )[0]
        out[j] = top + math.log(val)
    return out


def log_weights(prior: PriorSpec, n_terms: int) -> np.ndarray:
    """log pi_j for the prior on a chi-squared/F non-centrality.

    Signed priors (inverse-moment, normal, Cauchy) act on the z/t
    non-centrality and induce a prior on its square.
    """
    if isinstance(prior, InverseGamma):
        return log_weights_ig(prior.shape, prior.scale, n_terms)
    if isinstance(prior, InverseMoment):
        return log_weights_ig(prior.nu / 2, prior.tau, n_terms)
    if isinstance(prior, NormalG):
        return _log_weights_normal(prior.g, n_terms)
    if isinstance(prior, CauchyJZS):
        bucket = -(-int(n_terms) // 256) * 256  # shared cache across nearby lengths
        return _log_weights_cauchy(float(prior.r), bucket)[:n_terms].copy()
    raise DomainError(f"unsupported prior {prior!r}")


def log_marginal_series(family: StatFamily, x, prior: PriorSpec | None) -> np.ndarray:
    """log marginal density of chi-squared/F statistics under ``prior``.

    ``prior=None`` gives the central (null) density.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n_terms = series_length(family, float(np.max(x)) if x.size else 0.0)
    h = log_kernel_matrix(family, x, n_terms)
    if prior is None:
        return h[:, 0]
    return logsumexp_rows(h + log_weights(prior, n_terms))
