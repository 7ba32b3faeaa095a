"""Expected-posterior-probability discrepancy between two predictive densities.

For densities f and g on a common support,

    D(f || g) = int f(x) f(x) / (f(x) + g(x)) dx,

the posterior probability of the true model averaged over data from it,
with equal prior odds. The identity int f^2/(f+g) = int g^2/(f+g) holds
because the difference integrates f - g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import distributions as dist
from .distributions import Kind, StatFamily
from .engine import Sidedness, TestStatistic, log_marginal_alt
from .errors import DomainError, NumericalError
from .mixture import log_marginal_series
from .priors import InverseGamma, PriorSpec, Support, lambda_median, with_index

__all__ = ["Marginal", "dep", "dep_pair", "dep_marginals", "dep_compare"]

DEP_TOL = 1e-8


def _quad_pieces(fn, lower, upper, points):
    cuts = sorted({p for p in points if lower < p < upper})
    edges = [lower, *cuts, upper]
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(fn, a, b, epsabs=DEP_TOL / 10, epsrel=DEP_TOL, limit=500)
        total += val
        err += e
    if err > 10 * DEP_TOL:
        raise NumericalError("discrepancy integral did not converge", error=err)
    return total


_SKIP_LOG_F = -45.0


def dep(log_f, log_g, lower=-math.inf, upper=math.inf, points=()):
    """D(f || g) for log-density callables on [lower, upper].

    The integrand is at most f, so where f < exp(-45) the point is dropped
    without evaluating g; the error is bounded by the mass of f there.
    """

    def integrand(x):
        lf = log_f(x)
        if lf < _SKIP_LOG_F:
            return 0.0
        return math.exp(lf) * special.expit(lf - log_g(x))

    return _quad_pieces(integrand, lower, upper, points)


def dep_pair(log_f, log_g, lower=-math.inf, upper=math.inf, points=()):
    """(int f^2/(f+g), int g^2/(f+g)); the two agree for normalized f and g."""
    return (dep(log_f, log_g, lower, upper, points), dep(log_g, log_f, lower, upper, points))


@dataclass(frozen=True)
class Marginal:
    """Prior-predictive density of a test statistic; ``prior=None`` is the null."""

    family: StatFamily
    prior: PriorSpec | None = None

    def __post_init__(self):
        if self.prior is not None and isinstance(self.prior, InverseGamma) and not self.family.nonneg:
            raise DomainError("inverse-gamma priors apply to chi-squared/F families")

    def _reducible(self) -> bool:
        # symmetric priors on z/t fold exactly onto chisq(1)/F(1, m)
        return not self.family.nonneg and (self.prior is None or self.prior.support is Support.TWO_SIDED)

    def _squared_family(self) -> StatFamily:
        if self.family.kind is Kind.Z:
            return StatFamily.chisq(1)
        return StatFamily.f(1, self.family.df2)

    def logpdf(self, x: float) -> float:
        fam = self.family
        if self.prior is None:
            return dist.log_density(fam, float(x), 0.0) if x >= 0 or not fam.nonneg else -math.inf
        if fam.nonneg:
            if x < 0:
                return -math.inf
            return self._series_or_quad(fam, x)
        if self._reducible() and x != 0:
            # f(x) = |x| m(x^2) for a symmetric density of x
            return self._series_or_quad(self._squared_family(), x * x) + math.log(abs(x))
        sided = Sidedness.TWO_SIDED
        if self.prior is not None and self.prior.support is Support.POSITIVE:
            sided = Sidedness.GREATER
        elif self.prior is not None:
            sided = Sidedness.LESS
        return self._quad(fam, x, sided)

    def _quad(self, fam, x, sided=Sidedness.TWO_SIDED):
        stat = TestStatistic(fam, float(x), sidedness=sided)
        return log_marginal_alt(stat, self.prior)

    def _series_or_quad(self, fam, x):
        try:
            return float(log_marginal_series(fam, x, self.prior)[0])
        except NumericalError:
            # far tail: the series gets long, the quadrature route does not
            return self._quad(fam, x)

    def _scale_points(self):
        pts = [0.0]
        if self.prior is not None:
            pts += [float(m) for m in np.ravel(self.prior.modes()) if np.isfinite(m)]
        return pts


def _dep_marginals(f: Marginal, g: Marginal) -> float:
    if f.family != g.family:
        raise DomainError("marginals must share a statistic family")
    pts = sorted(set(f._scale_points() + g._scale_points()))
    if f.family.nonneg:
        # integrate over s = sqrt(x); the discrepancy is invariant to the map
        def lf(s):
            return f.logpdf(s * s) + math.log(2 * s) if s > 0 else -math.inf

        def lg(s):
            return g.logpdf(s * s) + math.log(2 * s) if s > 0 else -math.inf

        roots = [math.sqrt(abs(p)) for p in pts] + [1.0, 3.0]
        return dep(lf, lg, 0.0, math.inf, roots)
    if f._reducible() and g._reducible():
        pos = [abs(p) for p in pts] + [1.0, 3.0]
        return dep(f.logpdf, g.logpdf, 0.0, math.inf, pos) * 2.0
    both = sorted(set(pts + [-3.0, -1.0, 1.0, 3.0]))
    return dep(f.logpdf, g.logpdf, -math.inf, math.inf, both)


def _index_for(prior: PriorSpec, family: StatFamily):
    if family.nonneg and not isinstance(prior, InverseGamma):
        return lambda_median
    if isinstance(prior, InverseGamma):
        return lambda p: float(p.quantile(0.5))
    return None  # with_index picks IQR or median from the support


def dep_compare(family: StatFamily, prior_a: PriorSpec, prior_b: PriorSpec, index: float, n=None):
    """D(null || m_a) and D(null || m_b) after matching both priors to ``index``.

    Two-sided priors are matched on the interquartile range of the
    non-centrality, one-sided priors on the median; for chi-squared/F
    families the median of the induced prior on the non-centrality is used.
    ``n`` sets the degrees of freedom n - 1 for t and F families. Larger
    values favour the alternative model whose prior was used.
    """
    if n is not None and family.kind in (Kind.T, Kind.F):
        family = StatFamily.t(n - 1) if family.kind is Kind.T else StatFamily.f(family.df1, n - 1)
    out = []
    for prior in (prior_a, prior_b):
        matched = with_index(prior, index, _index_for(prior, family))
        out.append(_dep_marginals(Marginal(family, None), Marginal(family, matched)))
    return tuple(out)


def dep_marginals(f: Marginal, g: Marginal) -> float:
    """D(f || g) for two statistic marginals."""
    return _dep_marginals(f, g)
