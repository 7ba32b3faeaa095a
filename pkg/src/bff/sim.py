"""Monte Carlo operating characteristics of Bayes factors for one-df tests.

Statistics are drawn from the noncentral F(1, n - 1) or chi-squared(1)
distribution with non-centrality n * omega**2 (or the z/t analogue with
non-centrality sqrt(n) * omega) and scored by each requested method:

  ideal        likelihood ratio against the generating non-centrality
  bff_curve    BFF value at the generating effect
  bff_max      BFF maximum over omega >= sqrt(6 / n)
  gprior_unit  g-prior with g = n
  gprior_risk  g-prior with g = 1
  jzs_r1       Cauchy prior with scale 1
  jzs_r07      Cauchy prior with scale 0.7

For F and chi-squared data every method runs through the Poisson-mixture
representation, so a whole cell of replicates shares one kernel matrix.
z and t data are scored one replicate at a time through quadrature.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import mixture
from .curve import build_bff, golden_section_max, omega_grid, omega_min
from .distributions import StatFamily, sample
from .engine import (
    TestStatistic,
    log_bf10,
    log_bf10_gprior,
    log_bf10_ideal,
    log_bf10_jzs,
    prior_for_effect,
)
from .errors import BFFError, DomainError
from .priors import DEFAULT_NU, CauchyJZS, NormalG

__all__ = ["METHODS", "SimConfig", "SimRow", "SimReport", "run_sim", "sim_family"]

METHODS = ("ideal", "bff_curve", "bff_max", "gprior_unit", "gprior_risk", "jzs_r1", "jzs_r07")
FAMILIES = ("f", "chisq", "z", "t")
WORKERS_ENV = "BFF_WORKERS"


@dataclass(frozen=True)
class SimConfig:
    """Simulation design.

    ``scenario="alternative"`` draws data at non-centrality n * omega**2;
    ``scenario="null"`` draws central data and uses omega only to place the
    ideal and BFF alternatives. omega = 0 gives central data either way.
    """

    family: str = "f"
    n_values: tuple = (50, 100, 150, 200)
    omegas: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
    replicates: int = 10_000
    methods: tuple = METHODS
    seed: int = 0
    scenario: str = "alternative"
    nu: float = DEFAULT_NU
    omega_max: float = 1.0
    grid_step: float = 0.005
    scatter: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", str(self.family).lower())
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.replicates < 1:
            raise DomainError("replicates must be at least 1")
        if any(n < 2 for n in self.n_values):
            raise DomainError("sample sizes must be at least 2")
        if any(w < 0 for w in self.omegas):
            raise DomainError("omega values must be non-negative")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise DomainError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.scenario not in ("alternative", "null"):
            raise DomainError("scenario must be 'alternative' or 'null'")


@dataclass(frozen=True)
class SimRow:
    method: str
    n: int
    omega: float
    mean_woe: float
    se: float
    replicates: int
    failures: int
    diff_vs_ideal: float


@dataclass
class SimReport:
    config: SimConfig
    rows: list = field(default_factory=list)
    # (n, omega) -> (ideal WOE, bff_max WOE) per replicate
    scatter: dict = field(default_factory=dict)

    def row(self, method, n, omega) -> SimRow:
        for r in self.rows:
            if r.method == method and r.n == n and r.omega == omega:
                return r
        raise KeyError((method, n, omega))

    def config_dict(self) -> dict:
        return asdict(self.config)


def sim_family(name: str, n: int) -> StatFamily:
    if name == "f":
        return StatFamily.f(1, n - 1)
    if name == "chisq":
        return StatFamily.chisq(1)
    if name == "t":
        return StatFamily.t(n - 1)
    return StatFamily.z()


def _lam(family: StatFamily, n: int, omega: float) -> float:
    return n * omega * omega if family.nonneg else math.sqrt(n) * omega


def _cell_rng(seed: int, n: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, index)))


# ---------------------------------------------------------------------------
# batch path for chi-squared and F data
# ---------------------------------------------------------------------------


class _Batch:
    """All replicates of one cell, scored through the mixture series."""

    def __init__(self, family, n, x, cfg):
        self.family, self.n, self.x, self.cfg = family, n, x, cfg
        lam_max = n * max(cfg.omega_max, max(cfg.omegas)) ** 2
        self.terms = mixture.series_length(family, float(np.max(x)), lam_max)
        self.h = mixture.log_kernel_matrix(family, x, self.terms)
        self.log_null = self.h[:, 0]
        self.tau_per_w2 = n * (cfg.nu + 1) / 2  # the calibrated tau is tau_per_w2 * omega**2

    def woe(self, log_weights):
        return mixture.logsumexp_rows(self.h + log_weights) - self.log_null

    def bff(self, omega):
        if omega == 0:
            return np.zeros(len(self.x))
        tau = self.tau_per_w2 * omega * omega
        return self.woe(mixture.log_weights_ig(self.cfg.nu / 2, tau, self.terms))

    def bff_each(self, omegas):
        # one omega per replicate
        taus = self.tau_per_w2 * omegas * omegas
        lw = mixture.log_weights_ig(self.cfg.nu / 2, taus, self.terms)
        return mixture.logsumexp_rows(self.h + lw) - self.log_null

    def ideal(self, omega):
        if omega == 0:
            return np.zeros(len(self.x))
        lam = self.n * omega * omega
        return self.woe(mixture.log_weights_poisson(lam, self.terms))

    def bff_max(self):
        cfg = self.cfg
        lower = omega_min(self.n)
        grid = omega_grid(0.01, cfg.omega_max, cfg.grid_step)
        grid = np.concatenate([[lower], grid[grid > lower]])
        values = np.stack([self.bff(w) for w in grid], axis=1)
        best = np.argmax(values, axis=1)
        lo = grid[np.maximum(best - 1, 0)]
        hi = grid[np.minimum(best + 1, len(grid) - 1)]
        _, refined = golden_section_max(self.bff_each, lo, hi)
        return np.maximum(values[np.arange(len(best)), best], refined)

    def gprior(self, g):
        return self.woe(mixture.log_weights(NormalG(g), self.terms))

    def jzs(self, r):
        return self.woe(mixture.log_weights(CauchyJZS(r), self.terms))


def _score_batch(family, n, omega, x, cfg, methods):
    batch = _Batch(family, n, x, cfg)
    out = {}
    for m in methods:
        if m == "ideal":
            out[m] = batch.ideal(omega)
        elif m == "bff_curve":
            out[m] = batch.bff(omega)
        elif m == "bff_max":
            out[m] = batch.bff_max()
        elif m == "gprior_unit":
            out[m] = batch.gprior(float(n))
        elif m == "gprior_risk":
            out[m] = batch.gprior(1.0)
        elif m == "jzs_r1":
            out[m] = batch.jzs(1.0)
        elif m == "jzs_r07":
            out[m] = batch.jzs(0.7)
    return out


# ---------------------------------------------------------------------------
# scalar path for z and t data
# ---------------------------------------------------------------------------


def _score_one(stat, n, omega, cfg, method):
    if method == "ideal":
        return log_bf10_ideal(stat, _lam(stat.family, n, omega))
    if method == "bff_curve":
        return log_bf10(stat, prior_for_effect(stat, omega, cfg.nu))
    if method == "bff_max":
        grid = omega_grid(0.01, cfg.omega_max, cfg.grid_step)
        return build_bff(stat, cfg.nu, grid).max_log_bf10
    if method == "gprior_unit":
        return log_bf10_gprior(stat, float(n))
    if method == "gprior_risk":
        return log_bf10_gprior(stat, 1.0)
    if method == "jzs_r1":
        return log_bf10_jzs(stat, 1.0)
    return log_bf10_jzs(stat, 0.7)


def _score_scalar(family, n, omega, x, cfg, methods):
    out = {m: np.empty(len(x)) for m in methods}
    for i, value in enumerate(x):
        stat = TestStatistic(family, float(value), n=n)
        for m in methods:
            try:
                out[m][i] = _score_one(stat, n, omega, cfg, m)
            except BFFError:
                out[m][i] = np.nan
    return out


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _run_cell(args):
    cfg, n_index, w_index = args
    n = cfg.n_values[n_index]
    omega = cfg.omegas[w_index]
    family = sim_family(cfg.family, n)
    rng = _cell_rng(cfg.seed, n, w_index)
    data_lam = 0.0 if cfg.scenario == "null" else _lam(family, n, omega)
    x = sample(family, data_lam, rng, cfg.replicates)
    methods = list(cfg.methods)
    need = list(dict.fromkeys(methods + ["ideal"]))
    if family.nonneg:
        scores = _score_batch(family, n, omega, x, cfg, need)
    else:
        scores = _score_scalar(family, n, omega, x, cfg, need)
    ideal = scores["ideal"]
    rows = []
    for m in methods:
        v = scores[m]
        ok = np.isfinite(v)
        good = v[ok]
        mean = float(np.mean(good)) if good.size else math.nan
        se = float(np.std(good, ddof=1) / math.sqrt(good.size)) if good.size > 1 else math.nan
        both = ok & np.isfinite(ideal)
        diff = float(np.mean(v[both] - ideal[both])) if np.any(both) else math.nan
        rows.append(SimRow(m, n, omega, mean, se, int(good.size), int((~ok).sum()), diff))
    pair = None
    if cfg.scatter and "bff_max" in scores:
        pair = (ideal.copy(), scores["bff_max"].copy())
    return rows, pair


def _workers(requested):
    if requested is not None:
        return max(int(requested), 1)
    try:
        return max(int(os.environ.get(WORKERS_ENV, "1")), 1)
    except ValueError:
        return 1


def run_sim(cfg: SimConfig, workers: int | None = None) -> SimReport:
    """Run every (n, omega) cell; results depend on the seed only.

    Each cell draws from its own stream keyed by (seed, n, omega index), so
    the worker count does not change the output. ``workers`` defaults to
    the BFF_WORKERS environment variable, else 1.
    """
    cells = [(cfg, i, j) for i in range(len(cfg.n_values)) for j in range(len(cfg.omegas))]
    report = SimReport(cfg)
    if not cfg.methods:
        return report
    nworkers = _workers(workers)
    if nworkers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    for (c, i, j), (rows, pair) in zip(cells, results):
        report.rows.extend(rows)
        if pair is not None:
            report.scatter[(cfg.n_values[i], cfg.omegas[j])] = pair
    return report

