"""Synthetic clinical cohorts with planted, known ground truth.

The label comes from a logistic model over three named drivers (age,
comorbidity count, a biomarker), optional pairwise/threshold interactions, and
nothing else, so feature-recovery experiments know the right answer. Missing
values are injected after label generation and can be label-correlated
(informative missingness). Everything is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..rng import stream
from .table import ColumnSpec, FeatureTable

DRIVERS = ("age", "comorbidity_count", "biomarker_a")


@dataclass
class CohortSpec:
    n_rows: int = 1000
    prevalence: float = 0.2
    # standardized effect per driver; zero silences a driver
    effects: dict[str, float] = field(default_factory=lambda: {
        "age": 1.0, "comorbidity_count": 1.0, "biomarker_a": 1.2,
    })
    # (driver, driver, weight) products of standardized drivers
    interactions: list[tuple[str, str, float]] = field(default_factory=list)
    # weight on the indicator product 1[age > 65] * 1[comorbidity_count >= 3]
    threshold_interaction: float = 0.0
    # per-column base missing probability
    missing_rates: dict[str, float] = field(default_factory=dict)
    # added missing probability for label-1 rows on the columns above
    informative_missingness: float = 0.0
    n_comorbidities: int = 8
    n_labs: int = 4
    n_treatments: int = 3
    n_noise: int = 6
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.prevalence < 1.0:
            raise ConfigError("prevalence must be in (0, 1)")
        for name, rate in self.missing_rates.items():
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f"missing rate for '{name}' must be in [0, 1)")
        for name in self.effects:
            if name not in DRIVERS:
                raise ConfigError(f"effects allowed only on {DRIVERS}, got '{name}'")


def _standardize(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    return (x - x.mean()) / (sd if sd > 0 else 1.0)


def _solve_intercept(z: np.ndarray, prevalence: float) -> float:
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if np.mean(1.0 / (1.0 + np.exp(-(z + mid)))) < prevalence:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def synth_cohort(spec: CohortSpec) -> FeatureTable:
    """Generate the cohort; labels live on the returned table."""
    rng = stream(spec.seed, "cohort")
    n = spec.n_rows

    age = rng.normal(62.0, 12.0, size=n)
    sex = (rng.random(n) < 0.5).astype(np.float64)
    como = (rng.random((n, spec.n_comorbidities)) < 0.25).astype(np.float64)
    como_count = como.sum(axis=1)
    biomarker = np.exp(rng.normal(1.0, 0.5, size=n))
    labs = rng.normal(0.0, 1.0, size=(n, spec.n_labs)) * 5 + 10
    treats = (rng.random((n, spec.n_treatments)) < 0.3).astype(np.float64)
    admission = rng.choice(["elective", "urgent", "emergency"], size=n,
                           p=[0.3, 0.3, 0.4])
    noise = rng.normal(0.0, 1.0, size=(n, spec.n_noise))

    drivers = {
        "age": _standardize(age),
        "comorbidity_count": _standardize(como_count),
        "biomarker_a": _standardize(biomarker),
    }
    z = np.zeros(n)
    for name, weight in spec.effects.items():
        z += weight * drivers[name]
    for a, b, weight in spec.interactions:
        z += weight * drivers[a] * drivers[b]
    if spec.threshold_interaction:
        z += spec.threshold_interaction * ((age > 65) & (como_count >= 3))
    z += _solve_intercept(z, spec.prevalence)
    labels = (rng.random(n) < 1.0 / (1.0 + np.exp(-z))).astype(np.float64)

    columns = [ColumnSpec("age", "continuous"), ColumnSpec("sex", "binary")]
    data: dict[str, np.ndarray] = {"age": age, "sex": sex}
    for i in range(spec.n_comorbidities):
        name = f"como_{i}"
        columns.append(ColumnSpec(name, "binary"))
        data[name] = como[:, i]
    columns.append(ColumnSpec("comorbidity_count", "continuous"))
    data["comorbidity_count"] = como_count.astype(np.float64)
    columns.append(ColumnSpec("biomarker_a", "continuous"))
    data["biomarker_a"] = biomarker
    for i in range(spec.n_labs):
        name = f"lab_{i}"
        columns.append(ColumnSpec(name, "continuous"))
        data[name] = labs[:, i]
    for i in range(spec.n_treatments):
        name = f"treat_{i}"
        columns.append(ColumnSpec(name, "binary"))
        data[name] = treats[:, i]
    columns.append(ColumnSpec("admission_type", "categorical"))
    data["admission_type"] = admission.astype(object)
    for i in range(spec.n_noise):
        name = f"noise_{i}"
        columns.append(ColumnSpec(name, "continuous"))
        data[name] = noise[:, i]

    for name, rate in spec.missing_rates.items():
        if name not in data:
            raise ConfigError(f"missing-rate column '{name}' not in cohort")
        p = np.full(n, rate)
        if spec.informative_missingness:
            p = np.clip(p + spec.informative_missingness * labels, 0.0, 0.99)
        mask = stream(spec.seed, "missing", name).random(n) < p
        if any(c.name == name and c.kind == "categorical" for c in columns):
            col = data[name].copy()
            col[mask] = None
            data[name] = col
        else:
            col = data[name].copy()
            col[mask] = np.nan
            data[name] = col

    row_ids = [f"pt{idx:06d}" for idx in range(n)]
    return FeatureTable(row_ids=row_ids, columns=columns, data=data,
                        labels=labels)
