"""Combining Bayes factor functions across replicated correlation studies.

Each study reports a sample correlation r_i from n_i pairs. Its rescaled
Fisher transform sqrt(n_i - 3) * atanh(r_i) is treated as a z statistic
with non-centrality sqrt(n_i - 3) * atanh(rho). Independent studies multiply
their Bayes factors, so the combined weight of evidence is a sum.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .curve import DEFAULT_GRID, BFFCurve, build_bff, constrained_max, omega_min
from .distributions import StatFamily
from .engine import TestStatistic, log_bf10, prior_for_effect
from .errors import DomainError, ParseError
from .priors import DEFAULT_NU, TestRow

__all__ = [
    "FIXTURES",
    "StudyRecord",
    "CombinedBFF",
    "fisher_z",
    "omega_of_rho",
    "study_statistic",
    "combined_bff",
    "ingest_studies",
    "load_fixture",
]

FIXTURES = {"manylabs3-persistence": "manylabs3_persistence.csv"}


@dataclass(frozen=True)
class StudyRecord:
    r_hat: float
    n: int

    def __post_init__(self):
        if not -1 < self.r_hat < 1:
            raise DomainError(f"correlation must lie in (-1, 1), got {self.r_hat!r}")
        if int(self.n) != self.n or self.n <= 3:
            raise DomainError(f"sample size must be an integer above 3, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


def omega_of_rho(rho: float) -> float:
    """Standardized effect atanh(rho) of a population correlation."""
    if not -1 < rho < 1:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho!r}")
    return math.atanh(rho)


def fisher_z(study: StudyRecord) -> float:
    return math.sqrt(study.n - 3) * math.atanh(study.r_hat)


def study_statistic(study: StudyRecord) -> TestStatistic:
    """Two-sided z statistic whose effective sample size is n - 3."""
    return TestStatistic(StatFamily.z(), fisher_z(study), n=study.n - 3, row=TestRow.ONE_SAMPLE_Z)


@dataclass
class CombinedBFF:
    studies: list
    per_study: list
    combined: BFFCurve
    total_n: int
    nu: float = DEFAULT_NU
    meta: dict = field(default_factory=dict)

    @property
    def omega_min_combined(self) -> float:
        return self.combined.omega_min


def combined_bff(studies, nu: float = DEFAULT_NU, omegas=None, method: str = "quad") -> CombinedBFF:
    """Per-study curves and their pointwise sum on a shared grid.

    Thresholds use the recorded sample sizes: sqrt(6 / n_i) for each study
    and sqrt(6 / sum n_i) for the combination.
    """
    studies = list(studies)
    if not studies:
        raise DomainError("at least one study is required")
    omegas = DEFAULT_GRID if omegas is None else np.asarray(omegas, dtype=float)
    stats = [study_statistic(s) for s in studies]
    per_study = [
        build_bff(st, nu, omegas, method=method, floor=omega_min(s.n)) for st, s in zip(stats, studies)
    ]
    stacked = np.stack([c.log_bf10 for c in per_study])
    # fsum is exactly rounded, so the sum does not depend on study order
    total = np.array([math.fsum(col) for col in stacked.T])

    def combined_woe(w):
        if np.ndim(w):
            return np.array([combined_woe(v) for v in np.ravel(w)]).reshape(np.shape(w))
        return math.fsum(log_bf10(st, prior_for_effect(st, float(w), nu), method) for st in stats)

    total_n = sum(s.n for s in studies)
    lower = omega_min(total_n)
    max_w, max_v = constrained_max(omegas, total, combined_woe, lower)
    failures = [f for c in per_study for f in c.failures]
    combined = BFFCurve(
        omegas,
        total,
        lower,
        max_w,
        max_v,
        nu,
        {"studies": len(studies), "total_n": total_n},
        failures,
    )
    return CombinedBFF(studies, per_study, combined, total_n, nu)


def _parse_rows(lines):
    out = []
    reader = csv.reader(lines)
    for lineno, row in enumerate(reader, start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells) or cells[0].startswith("#"):
            continue
        if lineno == 1 and not _is_number(cells[0]):
            if [c.lower() for c in cells[:2]] != ["r", "n"]:
                raise ParseError(f"unexpected header {row!r}; expected r,n", row=lineno)
            continue
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns (r, n), got {len(cells)}", row=lineno)
        try:
            r = float(cells[0])
            n = float(cells[1])
        except ValueError as exc:
            raise ParseError(f"non-numeric value: {exc}", row=lineno) from None
        try:
            out.append(StudyRecord(r, n))
        except DomainError as exc:
            # well-formed but out of range: a validation error, not a parse error
            raise DomainError(f"row {lineno}: {exc}") from None
    return out


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def ingest_studies(source) -> list[StudyRecord]:
    """Read (r, n) records from a path, a file object or CSV text.

    A header line ``r,n`` is optional. Malformed rows raise ParseError and
    out-of-range values raise DomainError; both name the 1-based line.
    """
    if hasattr(source, "read"):
        return _parse_rows(source.read().splitlines())
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, newline="", encoding="utf-8") as fh:
            return _parse_rows(fh.read().splitlines())
    if isinstance(source, str) and ("," in source or source.strip() == ""):
        return _parse_rows(io.StringIO(source).read().splitlines())
    raise ParseError(f"no such input {source!r}")


def load_fixture(name: str = "manylabs3-persistence") -> list[StudyRecord]:
    try:
        filename = FIXTURES[name]
    except KeyError:
        raise DomainError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    text = resources.files("bff.data").joinpath(filename).read_text(encoding="utf-8")
    return ingest_studies(io.StringIO(text))
