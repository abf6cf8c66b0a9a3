"""Seeded Monte Carlo experiments that test bounds against reality.

Each experiment draws R independent samples, measures how often the
estimator misbehaves (or how large its error is), and compares the
empirical frequency with the corresponding theoretical bound.  Replication
r always uses the Philox substream keyed by (master_seed, r), so results
are bit-identical across runs, platforms, and parallelism degrees.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import distributions, tailbounds
from .distributions import (
    Distribution,
    SubExponential,
    SubGaussian,
    TailModel,
    default_tail_model,
    format_distribution,
    true_cvar,
    true_var,
)
from .estimators import RiskLevel, as_alpha, estimate_cvar, estimate_var
from .tailbounds import ConditionCheck, DeviationBound, require_var_interval_feasible

__all__ = [
    "KINDS",
    "BOUND_CHOICES",
    "ExperimentPlan",
    "ExperimentRecord",
    "run_var_coverage",
    "run_var_deviation",
    "run_cvar_deviation",
    "run_convergence",
    "run_plan",
    "default_grid_plans",
    "recompute_pass",
    "records_to_csv",
    "record_to_json_dict",
    "record_from_json_dict",
    "CSV_COLUMNS",
]

KINDS = ("var-coverage", "var-deviation", "cvar-deviation", "convergence")
BOUND_CHOICES = ("subgauss_general", "subexp_general", "subgauss_simplified", "subexp_simplified")

CSV_COLUMNS = (
    "kind",
    "family",
    "params",
    "alpha",
    "n",
    "s_or_eps",
    "R",
    "seed",
    "frequency",
    "stderr",
    "bound_raw",
    "bound_clamped",
    "pass",
)

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ExperimentPlan:
    """Validated description of one Monte Carlo experiment.

    ``kind`` selects the experiment; ``s`` applies to var-coverage,
    ``eps`` to the deviation kinds, ``n_grid`` to convergence.  ``tail``
    overrides the catalogued tail model for cvar-deviation runs and
    ``bound_choice`` picks which bound to validate (defaults to the
    general form matching the tail-model kind).
    """

    kind: str
    dist: Distribution
    alpha: float
    replications: int
    master_seed: int
    n: int | None = None
    s: float | None = None
    eps: float | None = None
    bound_choice: str | None = None
    n_grid: tuple[int, ...] | None = None
    tail: TailModel | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if int(self.replications) < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications!r}")
        object.__setattr__(self, "replications", int(self.replications))
        seed = int(self.master_seed)
        if not 0 <= seed <= _U64_MAX:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {seed!r}")
        object.__setattr__(self, "master_seed", seed)

        if self.kind == "convergence":
            if self.n is not None:
                raise ValueError("convergence plans take n_grid, not n")
            if self.n_grid is None or len(self.n_grid) < 3:
                raise ValueError("convergence requires an n_grid of at least 3 points")
            grid = tuple(int(v) for v in self.n_grid)
            if any(v < 1 for v in grid):
                raise ValueError(f"n_grid entries must be positive integers, got {self.n_grid!r}")
            object.__setattr__(self, "n_grid", grid)
        else:
            if self.n_grid is not None:
                raise ValueError(f"n_grid is only valid for convergence plans, not {self.kind!r}")
            if self.n is None or int(self.n) < 1:
                raise ValueError(f"n must be a positive integer, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))

        if self.kind == "var-coverage":
            if self.s is None:
                raise ValueError("var-coverage requires s in (0, 1/2)")
            require_var_interval_feasible(self.n, self.alpha, self.s)
            object.__setattr__(self, "s", float(self.s))
        elif self.s is not None:
            raise ValueError(f"s is only valid for var-coverage plans, not {self.kind!r}")

        if self.kind in ("var-deviation", "cvar-deviation"):
            if self.eps is None or not float(self.eps) > 0:
                raise ValueError(f"{self.kind} requires eps > 0, got {self.eps!r}")
            object.__setattr__(self, "eps", float(self.eps))
        elif self.eps is not None:
            raise ValueError(f"eps is only valid for deviation plans, not {self.kind!r}")

        if self.kind == "cvar-deviation":
            choice = self.bound_choice
            if choice is None:
                tail = self.tail if self.tail is not None else default_tail_model(self.dist)
                choice = "subgauss_general" if isinstance(tail, SubGaussian) else "subexp_general"
                object.__setattr__(self, "bound_choice", choice)
            if self.bound_choice not in BOUND_CHOICES:
                raise ValueError(
                    f"bound_choice must be one of {BOUND_CHOICES}, got {self.bound_choice!r}"
                )
        elif self.bound_choice is not None:
            raise ValueError("bound_choice is only valid for cvar-deviation plans")

    @property
    def s_or_eps(self) -> float | None:
        return self.s if self.kind == "var-coverage" else self.eps

    def resolved_tail(self) -> TailModel:
        return self.tail if self.tail is not None else default_tail_model(self.dist)


@dataclass(frozen=True)
class ExperimentRecord:
    """One experiment's configuration, measurements, and verdict.

    ``passed`` is recomputable from the stored fields: coverage runs pass
    when frequency >= bound_clamped - 3 * stderr, deviation runs when
    frequency <= bound_clamped + 3 * stderr; convergence rows carry their
    medians in ``terms`` and pass vacuously.
    """

    kind: str
    family: str
    params: str
    alpha: float
    n: int
    s_or_eps: float | None
    replications: int
    master_seed: int
    empirical_frequency: float | None
    binomial_stderr: float | None
    bound_raw: float | None
    bound_clamped: float | None
    passed: bool
    terms: tuple[tuple[str, float], ...]
    conditions: tuple[ConditionCheck, ...]
    duration_s: float

    def term(self, label: str) -> float:
        for name, value in self.terms:
            if name == label:
                return value
        raise KeyError(f"no term labelled {label!r}")


def recompute_pass(record: ExperimentRecord) -> bool:
    """Re-derive the pass flag from a record's stored fields."""
    if record.kind == "convergence":
        return True
    slack = 3.0 * record.binomial_stderr
    if record.kind == "var-coverage":
        return record.empirical_frequency >= record.bound_clamped - slack
    return record.empirical_frequency <= record.bound_clamped + slack


def _binomial_stderr(frequency: float, replications: int) -> float:
    return math.sqrt(frequency * (1.0 - frequency) / replications)


@dataclass(frozen=True)
class _ConvergencePoint:
    """Internal stand-in plan for one n on a convergence grid."""

    dist: Distribution
    alpha: float
    replications: int
    master_seed: int
    n: int
    kind: str = "convergence"
    s: float | None = None
    eps: float | None = None


def _rep_values(plan, r: int) -> tuple[float, ...]:
    """Per-replication measurement; depends only on (master_seed, r)."""
    sample = distributions.sample(plan.dist, plan.n, plan.master_seed, substream=r)
    if plan.kind == "var-coverage":
        ci = tailbounds.var_interval(sample, plan.alpha, plan.s)
        v = true_var(plan.dist, plan.alpha)
        return (1.0 if ci.lower <= v <= ci.upper else 0.0,)
    if plan.kind == "var-deviation":
        v = true_var(plan.dist, plan.alpha)
        return (1.0 if abs(estimate_var(sample, plan.alpha) - v) >= plan.eps else 0.0,)
    if plan.kind == "cvar-deviation":
        c = true_cvar(plan.dist, plan.alpha)
        return (1.0 if estimate_cvar(sample, plan.alpha) - c > plan.eps else 0.0,)
    # convergence
    v = true_var(plan.dist, plan.alpha)
    c = true_cvar(plan.dist, plan.alpha)
    return (
        abs(estimate_var(sample, plan.alpha) - v),
        estimate_cvar(sample, plan.alpha) - c,
    )


def _chunk_values(plan, start: int, stop: int) -> list[tuple[float, ...]]:
    return [_rep_values(plan, r) for r in range(start, stop)]


def _collect(plan, workers: int) -> np.ndarray:
    """All per-replication rows, ordered by replication index.

    Replications are independent tasks reduced by index, so the result is
    identical for every parallelism degree.
    """
    total = plan.replications
    if workers <= 1:
        rows = _chunk_values(plan, 0, total)
    else:
        workers = min(workers, total)
        edges = np.linspace(0, total, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_chunk_values, plan, int(lo), int(hi))
                for lo, hi in zip(edges[:-1], edges[1:])
                if hi > lo
            ]
            rows = [row for fut in futures for row in fut.result()]
    return np.asarray(rows, dtype=float)


def _frequency_record(
    plan: ExperimentPlan,
    bound_raw: float,
    bound_clamped: float,
    terms: tuple[tuple[str, float], ...],
    conditions: tuple[ConditionCheck, ...],
    workers: int,
) -> ExperimentRecord:
    start = time.perf_counter()
    hits = _collect(plan, workers)[:, 0]
    duration = time.perf_counter() - start
    frequency = float(np.sum(hits)) / plan.replications
    stderr = _binomial_stderr(frequency, plan.replications)
    if plan.kind == "var-coverage":
        passed = frequency >= bound_clamped - 3.0 * stderr
    else:
        passed = frequency <= bound_clamped + 3.0 * stderr
    return ExperimentRecord(
        kind=plan.kind,
        family=plan.dist.family,
        params=format_distribution(plan.dist),
        alpha=plan.alpha,
        n=plan.n,
        s_or_eps=plan.s_or_eps,
        replications=plan.replications,
        master_seed=plan.master_seed,
        empirical_frequency=frequency,
        binomial_stderr=stderr,
        bound_raw=bound_raw,
        bound_clamped=bound_clamped,
        passed=passed,
        terms=terms,
        conditions=conditions,
        duration_s=duration,
    )


def run_var_coverage(plan: ExperimentPlan, workers: int = 1) -> ExperimentRecord:
    """Frequency of the VaR interval containing the true VaR vs its floor."""
    if plan.kind != "var-coverage":
        raise ValueError(f"plan kind must be var-coverage, got {plan.kind!r}")
    n_pow = plan.n ** (1.0 - 2.0 * plan.s)
    floor = max(0.0, 1.0 - 2.0 * math.exp(-n_pow / 8.0))
    return _frequency_record(
        plan,
        bound_raw=floor,
        bound_clamped=floor,
        terms=(("confidence_floor", floor),),
        conditions=(),
        workers=workers,
    )


def run_var_deviation(plan: ExperimentPlan, workers: int = 1) -> ExperimentRecord:
    """Frequency of |VaR estimate - true VaR| >= eps vs the deviation bound."""
    if plan.kind != "var-deviation":
        raise ValueError(f"plan kind must be var-deviation, got {plan.kind!r}")
    bound = tailbounds.var_deviation_bound(plan.dist, plan.alpha, plan.n, plan.eps)
    return _frequency_record(
        plan,
        bound_raw=bound.total,
        bound_clamped=bound.clamped,
        terms=bound.terms,
        conditions=bound.conditions,
        workers=workers,
    )


_CVAR_EVALUATORS = {
    "subgauss_general": (tailbounds.cvar_bound_subgauss_general, SubGaussian),
    "subgauss_simplified": (tailbounds.cvar_bound_subgauss, SubGaussian),
    "subexp_general": (tailbounds.cvar_bound_subexp_general, SubExponential),
    "subexp_simplified": (tailbounds.cvar_bound_subexp, SubExponential),
}


def _cvar_bound_for(plan: ExperimentPlan) -> DeviationBound:
    evaluator, expected_kind = _CVAR_EVALUATORS[plan.bound_choice]
    tail = plan.resolved_tail()
    if not isinstance(tail, expected_kind):
        raise ValueError(
            f"bound choice {plan.bound_choice!r} needs a {expected_kind.__name__} tail model, "
            f"got {type(tail).__name__}"
        )
    return evaluator(tail, plan.dist, plan.alpha, plan.n, plan.eps)


def run_cvar_deviation(plan: ExperimentPlan, workers: int = 1) -> ExperimentRecord:
    """Frequency of CVaR overshoot beyond eps vs the chosen one-sided bound.

    The bound (and, for simplified choices, its parameter condition) is
    evaluated before any sampling; a failing condition aborts the run.
    """
    if plan.kind != "cvar-deviation":
        raise ValueError(f"plan kind must be cvar-deviation, got {plan.kind!r}")
    bound = _cvar_bound_for(plan)
    return _frequency_record(
        plan,
        bound_raw=bound.total,
        bound_clamped=bound.clamped,
        terms=bound.terms,
        conditions=bound.conditions,
        workers=workers,
    )


def run_convergence(plan: ExperimentPlan, workers: int = 1) -> list[ExperimentRecord]:
    """Median estimator errors over an n-grid, for log-log rate fits.

    Emits one record per grid point; the medians of |VaR error| and of the
    signed CVaR error are stored in ``terms``.
    """
    if plan.kind != "convergence":
        raise ValueError(f"plan kind must be convergence, got {plan.kind!r}")
    records = []
    for n in plan.n_grid:
        point = _ConvergencePoint(
            dist=plan.dist,
            alpha=plan.alpha,
            replications=plan.replications,
            master_seed=plan.master_seed,
            n=int(n),
        )
        start = time.perf_counter()
        values = _collect(point, workers)
        duration = time.perf_counter() - start
        med_var = float(np.median(values[:, 0]))
        med_cvar = float(np.median(values[:, 1]))
        records.append(
            ExperimentRecord(
                kind="convergence",
                family=plan.dist.family,
                params=format_distribution(plan.dist),
                alpha=plan.alpha,
                n=int(n),
                s_or_eps=None,
                replications=plan.replications,
                master_seed=plan.master_seed,
                empirical_frequency=None,
                binomial_stderr=None,
                bound_raw=None,
                bound_clamped=None,
                passed=True,
                terms=(("median_abs_var_error", med_var), ("median_cvar_error", med_cvar)),
                conditions=(),
                duration_s=duration,
            )
        )
    return records


def run_plan(plan: ExperimentPlan, workers: int = 1) -> list[ExperimentRecord]:
    """Execute any plan, returning its records (one, or one per grid point)."""
    if plan.kind == "var-coverage":
        return [run_var_coverage(plan, workers)]
    if plan.kind == "var-deviation":
        return [run_var_deviation(plan, workers)]
    if plan.kind == "cvar-deviation":
        return [run_cvar_deviation(plan, workers)]
    return run_convergence(plan, workers)


def default_grid_plans(master_seed: int, replications: int = 2000) -> list[ExperimentPlan]:
    """The standard validation grid: 3 families x 2 alpha x 3 n x 3 eps.

    Covers both vacuous (bound >= 1) and binding regimes for the VaR and
    CVaR deviation bounds.
    """
    dists = (
        distributions.Gaussian(0.0, 1.0),
        distributions.Exponential(1.0),
        distributions.Uniform(0.0, 1.0),
    )
    plans = []
    for dist in dists:
        for alpha in (0.9, 0.95):
            for n in (1_000, 10_000, 100_000):
                for eps in (0.1, 0.5, 1.0):
                    for kind in ("var-deviation", "cvar-deviation"):
                        plans.append(
                            ExperimentPlan(
                                kind=kind,
                                dist=dist,
                                alpha=alpha,
                                replications=replications,
                                master_seed=master_seed,
                                n=n,
                                eps=eps,
                            )
                        )
    return plans


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_to_csv_row(record: ExperimentRecord) -> list[str]:
    return [
        record.kind,
        record.family,
        record.params,
        _csv_cell(record.alpha),
        _csv_cell(record.n),
        _csv_cell(record.s_or_eps),
        _csv_cell(record.replications),
        _csv_cell(record.master_seed),
        _csv_cell(record.empirical_frequency),
        _csv_cell(record.binomial_stderr),
        _csv_cell(record.bound_raw),
        _csv_cell(record.bound_clamped),
        _csv_cell(record.passed),
    ]


def records_to_csv(records: list[ExperimentRecord]) -> str:
    """Render records as CSV with the fixed column order and a header row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(record_to_csv_row(record))
    return buffer.getvalue()


def record_to_json_dict(record: ExperimentRecord) -> dict:
    return {
        "kind": record.kind,
        "family": record.family,
        "params": record.params,
        "alpha": record.alpha,
        "n": record.n,
        "s_or_eps": record.s_or_eps,
        "R": record.replications,
        "seed": record.master_seed,
        "frequency": record.empirical_frequency,
        "stderr": record.binomial_stderr,
        "bound_raw": record.bound_raw,
        "bound_clamped": record.bound_clamped,
        "pass": record.passed,
        "terms": [{"label": label, "value": value} for label, value in record.terms],
        "conditions": [check.to_json_dict() for check in record.conditions],
        "duration_s": record.duration_s,
    }


def record_from_json_dict(data: dict) -> ExperimentRecord:
    """Parse a record emitted by record_to_json_dict (the artifact's own reader)."""
    return ExperimentRecord(
        kind=data["kind"],
        family=data["family"],
        params=data["params"],
        alpha=float(data["alpha"]),
        n=int(data["n"]),
        s_or_eps=None if data["s_or_eps"] is None else float(data["s_or_eps"]),
        replications=int(data["R"]),
        master_seed=int(data["seed"]),
        empirical_frequency=None if data["frequency"] is None else float(data["frequency"]),
        binomial_stderr=None if data["stderr"] is None else float(data["stderr"]),
        bound_raw=None if data["bound_raw"] is None else float(data["bound_raw"]),
        bound_clamped=None if data["bound_clamped"] is None else float(data["bound_clamped"]),
        passed=bool(data["pass"]),
        terms=tuple((item["label"], float(item["value"])) for item in data["terms"]),
        conditions=tuple(
            ConditionCheck(item["name"], bool(item["satisfied"]), float(item["threshold"]))
            for item in data["conditions"]
        ),
        duration_s=float(data["duration_s"]),
    )


def loads_record(text: str) -> ExperimentRecord:
    return record_from_json_dict(json.loads(text))
