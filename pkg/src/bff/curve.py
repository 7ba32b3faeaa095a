"""Bayes factor functions over a grid of standardized effects."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import TestStatistic, log_bf10, prior_for_effect
from .errors import BFFError, DomainError
from .priors import DEFAULT_NU

__all__ = [
    "DEFAULT_GRID",
    "BFFCurve",
    "EvidenceBand",
    "omega_grid",
    "omega_min",
    "golden_section_max",
    "constrained_max",
    "build_bff",
    "categorize",
    "posterior_null_probability",
]

GOLDEN_TOL = 1e-6
_INVPHI = (math.sqrt(5) - 1) / 2


def omega_grid(start=0.01, stop=1.0, step=0.005) -> np.ndarray:
    if not 0 < start <= stop or step <= 0:
        raise DomainError("grid needs 0 < start <= stop and step > 0")
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 12)


DEFAULT_GRID = omega_grid()


def omega_min(n_effective: float) -> float:
    """Smallest effect whose simple-alternative expected WOE under the null is -3."""
    if not n_effective > 0:
        raise DomainError("sample size must be positive")
    return math.sqrt(6.0 / n_effective)


def golden_section_max(fn, lo, hi, tol=GOLDEN_TOL):
    """Maximize ``fn`` on [lo, hi] by golden-section search.

    ``lo`` and ``hi`` may be arrays, in which case ``fn`` receives and returns
    arrays and each element is searched independently. Returns (argmax, max).
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = np.asarray(fn(c), dtype=float)
    fd = np.asarray(fn(d), dtype=float)
    while np.max(hi - lo) > tol:
        left = fc >= fd
        # keep [lo, d] where f(c) >= f(d), else [c, hi]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - _INVPHI * (hi - lo)
        new_d = lo + _INVPHI * (hi - lo)
        probe = np.where(left, new_c, new_d)
        fp = np.asarray(fn(probe), dtype=float)
        fc, c, fd, d = (
            np.where(left, fp, fd),
            np.where(left, new_c, d),
            np.where(left, fc, fp),
            np.where(left, c, new_d),
        )
    x = (lo + hi) / 2
    fx = np.asarray(fn(x), dtype=float)
    if x.ndim == 0:
        return float(x), float(fx)
    return x, fx


def constrained_max(omegas, values, fn, lower):
    """Maximum of a curve over omega >= ``lower``.

    The best stored grid point (with ``lower`` itself as a candidate) is
    refined by golden-section search between its neighbours.
    """
    omegas = np.asarray(omegas, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = (omegas >= lower) & np.isfinite(values)
    cand_w = np.concatenate([[lower], omegas[keep]])
    v_lower = float(fn(lower))
    cand_v = np.concatenate([[v_lower], values[keep]])
    if not np.any(np.isfinite(cand_v)):
        raise BFFError("no finite curve values above the threshold")
    i = int(np.nanargmax(cand_v))
    best_w, best_v = float(cand_w[i]), float(cand_v[i])
    lo = float(cand_w[i - 1]) if i > 0 else lower
    hi = float(cand_w[i + 1]) if i + 1 < len(cand_w) else best_w
    if hi > lo:
        w, v = golden_section_max(fn, lo, hi)
        if v > best_v:
            best_w, best_v = w, v
    return best_w, best_v


@dataclass(frozen=True)
class EvidenceBand:
    category: str  # inconclusive, positive, strong, very strong
    direction: str | None  # "alternative", "null" or None when inconclusive

    @property
    def label(self) -> str:
        if self.direction is None:
            return self.category
        return f"{self.category} for {self.direction}"

    def __str__(self):
        return self.label


def categorize(woe: float) -> EvidenceBand:
    """Evidence category from the weight of evidence (natural log scale)."""
    size = abs(woe)
    if size < 1:
        return EvidenceBand("inconclusive", None)
    direction = "alternative" if woe > 0 else "null"
    if size >= 5:
        return EvidenceBand("very strong", direction)
    if size >= 3:
        return EvidenceBand("strong", direction)
    return EvidenceBand("positive", direction)


def posterior_null_probability(woe: float, prior_odds: float = 1.0) -> float:
    """P(H0 | x) given the WOE and prior odds H1:H0."""
    return 1.0 / (1.0 + prior_odds * math.exp(woe))


@dataclass
class BFFCurve:
    """Weight of evidence as a function of the standardized effect."""

    omega: np.ndarray
    log_bf10: np.ndarray
    omega_min: float
    max_omega: float
    max_log_bf10: float
    nu: float = DEFAULT_NU
    meta: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.log_bf10 = np.asarray(self.log_bf10, dtype=float)
        if self.omega.shape != self.log_bf10.shape:
            raise DomainError("omega and log_bf10 differ in length")
        if np.any(np.diff(self.omega) <= 0):
            raise DomainError("omega grid must be strictly increasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.omega.tolist(), self.log_bf10.tolist()))

    @property
    def band(self) -> EvidenceBand:
        return categorize(self.max_log_bf10)

    def summary(self) -> str:
        return (
            f"omega_min={self.omega_min:.4f} max_omega={self.max_omega:.4f} "
            f"max_log_bf10={self.max_log_bf10:.4f} evidence={self.band.label}"
        )


def build_bff(
    stat: TestStatistic,
    nu: float = DEFAULT_NU,
    omegas=None,
    *,
    method: str = "quad",
    floor: float | None = None,
) -> BFFCurve:
    """Evaluate the BFF of ``stat`` on ``omegas`` (default 0.01..1.0 by 0.005).

    ``floor`` overrides the omega_min threshold derived from the statistic's
    effective sample size. Grid points whose evaluation fails are stored as
    NaN and listed in ``failures``.
    """
    omegas = DEFAULT_GRID if omegas is None else np.asarray(omegas, dtype=float)
    if omegas.size == 0 or np.any(omegas <= 0):
        raise DomainError("omega grid must be non-empty and positive")

    def woe(w):
        return log_bf10(stat, prior_for_effect(stat, float(w), nu), method)

    values = np.empty(omegas.shape)
    failures = []
    for i, w in enumerate(omegas):
        try:
            values[i] = woe(w)
        except BFFError as exc:
            values[i] = np.nan
            failures.append((float(w), str(exc)))
    lower = omega_min(stat.n_effective) if floor is None else float(floor)

    def safe(w):
        try:
            if np.ndim(w):
                return np.array([woe(v) for v in np.ravel(w)]).reshape(np.shape(w))
            return woe(w)
        except BFFError:
            return -math.inf

    max_w, max_v = constrained_max(omegas, values, safe, lower)
    meta = {
        "family": str(stat.family),
        "statistic": float(stat.value),
        "n": stat.n,
        "sidedness": stat.sidedness.value,
        "row": stat.row.value,
    }
    return BFFCurve(omegas, values, lower, max_w, max_v, nu, meta, failures)
