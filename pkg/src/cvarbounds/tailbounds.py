"""Finite-sample concentration bounds for empirical VaR and CVaR.

Implements the distribution-free VaR confidence interval, the DKW-based
VaR deviation bound (exact CDF-increment form plus the looser
density-constant form), one-sided CVaR deviation bounds for sub-Gaussian
and sub-exponential tail models (general and simplified variants), the
parameter conditions gating the simplified variants, and inversion of the
bounds into sample sizes.

Bound totals are reported raw: they are algebraic right-hand sides and may
exceed 1.  Use ``DeviationBound.clamped`` for a probability reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import (
    Distribution,
    SubExponential,
    SubGaussian,
    cdf,
    format_distribution,
    true_var,
)
from .estimators import RiskLevel, SortedSample, as_alpha, empirical_quantile

__all__ = [
    "InfeasibleParametersError",
    "ConditionNotSatisfiedError",
    "ConditionCheck",
    "ConditionReport",
    "VarConfidenceInterval",
    "DeltaEpsilon",
    "DeviationBound",
    "SampleSizeResult",
    "dkw_bound",
    "minimal_feasible_n",
    "require_var_interval_feasible",
    "var_interval",
    "delta_epsilon",
    "var_deviation_bound",
    "check_subgauss_condition",
    "check_subexp_condition",
    "cvar_bound_subgauss_general",
    "cvar_bound_subgauss",
    "cvar_bound_subexp_general",
    "cvar_bound_subexp",
    "sample_size_for_var",
    "sample_size_for_cvar",
]


class InfeasibleParametersError(ValueError):
    """Quantile offsets alpha +- 1/(2 n^s) left (0, 1); carries the smallest workable n."""

    def __init__(self, message: str, min_feasible_n: int):
        super().__init__(message)
        self.min_feasible_n = min_feasible_n


class ConditionNotSatisfiedError(ValueError):
    """A simplified bound was requested but its parameter condition fails."""

    def __init__(self, message: str, report: "ConditionReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    satisfied: bool
    threshold: float

    def to_json_dict(self) -> dict:
        return {"name": self.name, "satisfied": self.satisfied, "threshold": self.threshold}


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a simplified-bound parameter check.  Failure is data, not an error."""

    satisfied: bool
    threshold: float
    checks: tuple[ConditionCheck, ...]
    m_b: float | None = None


@dataclass(frozen=True)
class VarConfidenceInterval:
    """Distribution-free interval [lower, upper] for the true VaR.

    Holds with probability at least ``confidence_floor`` =
    max(0, 1 - 2 exp(-n^(1-2s) / 8)); the endpoints are the empirical
    quantiles at alpha -+ 1/(2 n^s).
    """

    lower: float
    upper: float
    confidence_floor: float
    s: float
    alpha_minus: float
    alpha_plus: float

    def to_json_dict(self) -> dict:
        return {
            "bound_name": "var-interval",
            "inputs": {"s": self.s, "alpha_minus": self.alpha_minus, "alpha_plus": self.alpha_plus},
            "terms": [
                {"label": "lower", "value": self.lower},
                {"label": "upper", "value": self.upper},
            ],
            "total": self.confidence_floor,
            "conditions": [],
        }


@dataclass(frozen=True)
class DeltaEpsilon:
    """Smaller of the CDF increments on the two sides of the true VaR."""

    value: float
    left_arg: float
    right_arg: float


@dataclass(frozen=True)
class DeviationBound:
    """An evaluated bound with its per-term breakdown.

    ``terms`` lists every reported component by label.  For the CVaR
    bounds, ``total`` is the sum of the four listed terms; for the VaR
    deviation bound it equals the ``dkw_delta_eps`` term, with the looser
    ``density_constant_form`` reported alongside.  ``conditions`` records
    parameter checks, including the per-sample log factor of the MGF term
    (named ``t1_log_factor_negative``) whose sign decides whether that
    term shrinks or diverges as n grows.
    """

    bound_name: str
    inputs: dict
    terms: tuple[tuple[str, float], ...]
    total: float
    conditions: tuple[ConditionCheck, ...]

    @property
    def clamped(self) -> float:
        return min(1.0, self.total)

    def term(self, label: str) -> float:
        for name, value in self.terms:
            if name == label:
                return value
        raise KeyError(f"no term labelled {label!r} in bound {self.bound_name!r}")

    def condition(self, name: str) -> ConditionCheck:
        for check in self.conditions:
            if check.name == name:
                return check
        raise KeyError(f"no condition named {name!r} in bound {self.bound_name!r}")

    def to_json_dict(self) -> dict:
        return {
            "bound_name": self.bound_name,
            "inputs": dict(self.inputs),
            "terms": [{"label": label, "value": value} for label, value in self.terms],
            "total": self.total,
            "conditions": [check.to_json_dict() for check in self.conditions],
        }


@dataclass(frozen=True)
class SampleSizeResult:
    """Outcome of inverting a bound to the smallest n meeting a target."""

    achievable: bool
    n: int | None
    bound_at_n: float | None
    bound_below_n: float | None
    reason: str | None = None


def _exp(x: float) -> float:
    # math.exp raises on overflow; a diverging term is reported as inf instead.
    if x > 709.0:
        return math.inf
    return math.exp(x)


def dkw_bound(n: int, eps: float) -> float:
    """Uniform empirical-CDF deviation bound 2 exp(-2 n eps^2)."""
    n = int(n)
    eps = float(eps)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if math.isnan(eps) or eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    return 2.0 * _exp(-2.0 * n * eps * eps)


def minimal_feasible_n(level: RiskLevel | float, s: float) -> int:
    """Smallest n for which alpha -+ 1/(2 n^s) both land strictly inside (0, 1)."""
    alpha = as_alpha(level)
    s = _validate_s(s)
    margin = min(alpha, 1.0 - alpha)
    n = max(1, math.floor((1.0 / (2.0 * margin)) ** (1.0 / s)) + 1)
    while 1.0 / (2.0 * n**s) >= margin:  # float-rounding safety net
        n += 1
    return n


def _validate_s(s: float) -> float:
    s = float(s)
    if math.isnan(s) or not 0.0 < s < 0.5:
        raise ValueError(f"s must lie strictly in (0, 1/2), got {s!r}")
    return s


def require_var_interval_feasible(n: int, level: RiskLevel | float, s: float) -> tuple[float, float]:
    """Return (alpha_minus, alpha_plus) or raise with the minimal feasible n."""
    alpha = as_alpha(level)
    s = _validate_s(s)
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    half_width = 1.0 / (2.0 * n**s)
    alpha_minus = alpha - half_width
    alpha_plus = alpha + half_width
    if alpha_minus <= 0.0 or alpha_plus >= 1.0:
        n_min = minimal_feasible_n(alpha, s)
        raise InfeasibleParametersError(
            f"quantile offsets alpha -+ 1/(2 n^s) = {alpha:g} -+ {half_width:g} leave (0, 1) "
            f"at n={n}; the smallest feasible n for (alpha={alpha:g}, s={s:g}) is {n_min}",
            min_feasible_n=n_min,
        )
    return alpha_minus, alpha_plus


def var_interval(sample: SortedSample, level: RiskLevel | float, s: float) -> VarConfidenceInterval:
    """Distribution-free VaR confidence interval from empirical quantiles.

    The endpoints are the empirical quantiles at alpha -+ 1/(2 n^s) and the
    coverage floor is max(0, 1 - 2 exp(-n^(1-2s) / 8)).  Raises
    InfeasibleParametersError when the offset quantile levels leave (0, 1).
    """
    alpha = as_alpha(level)
    s = _validate_s(s)
    n = sample.n
    alpha_minus, alpha_plus = require_var_interval_feasible(n, alpha, s)
    lower = empirical_quantile(sample, alpha_minus)
    upper = empirical_quantile(sample, alpha_plus)
    floor = max(0.0, 1.0 - 2.0 * _exp(-(n ** (1.0 - 2.0 * s)) / 8.0))
    return VarConfidenceInterval(
        lower=lower,
        upper=upper,
        confidence_floor=floor,
        s=s,
        alpha_minus=alpha_minus,
        alpha_plus=alpha_plus,
    )


def delta_epsilon(
    dist: Distribution, level: RiskLevel | float, left_arg: float, right_arg: float
) -> DeltaEpsilon:
    """min(F(v + left_arg) - F(v), F(v) - F(v - right_arg)) at the true VaR v.

    Asymmetric window arguments let the same primitive serve the n-scaled
    and square-root windows of the CVaR bounds.  Infinite arguments are
    allowed and saturate at min(alpha, 1 - alpha).
    """
    alpha = as_alpha(level)
    left_arg = float(left_arg)
    right_arg = float(right_arg)
    for name, arg in (("left_arg", left_arg), ("right_arg", right_arg)):
        if math.isnan(arg) or arg <= 0.0:
            raise ValueError(f"{name} must be positive, got {arg!r}")
    v = true_var(dist, alpha)
    f_v = cdf(dist, v)
    value = min(cdf(dist, v + left_arg) - f_v, f_v - cdf(dist, v - right_arg))
    return DeltaEpsilon(value=max(value, 0.0), left_arg=left_arg, right_arg=right_arg)


def _density_min(dist: Distribution, lo: float, hi: float) -> float:
    """Minimum of the density over [lo, hi] clipped to the support.

    1024-point grid search refined by a bounded scalar minimization to an
    absolute tolerance of 1e-6.  An unbounded window has density infimum 0
    for every catalogued family.
    """
    support_lo, support_hi = dist.support
    lo = max(lo, support_lo)
    hi = min(hi, support_hi)
    if not math.isfinite(lo) or not math.isfinite(hi):
        return 0.0
    if not lo < hi:
        return float(dist.pdf(min(max(lo, support_lo), support_hi)))
    grid = np.linspace(lo, hi, 1024)
    values = np.asarray(dist.pdf(grid), dtype=float)
    i = int(np.argmin(values))
    best = float(values[i])
    left = float(grid[max(i - 1, 0)])
    right = float(grid[min(i + 1, grid.size - 1)])
    if right > left:
        result = minimize_scalar(
            lambda x: float(dist.pdf(x)),
            bounds=(left, right),
            method="bounded",
            options={"xatol": 1e-6},
        )
        best = min(best, float(result.fun))
    return best


def var_deviation_bound(
    dist: Distribution, level: RiskLevel | float, n: int, eps: float
) -> DeviationBound:
    """Two-sided VaR deviation bound 2 exp(-2 n delta_eps^2).

    The total uses the exact CDF-increment delta_eps.  The looser
    density-constant form 2 exp(-2 n c eps^2), with c the squared density
    minimum over [v - eps, v + eps], is reported as an extra term.
    """
    alpha = as_alpha(level)
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    eps = float(eps)
    if math.isnan(eps) or eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    delta = delta_epsilon(dist, alpha, eps, eps)
    total = 2.0 * _exp(-2.0 * n * delta.value**2)
    v = true_var(dist, alpha)
    f_min = _density_min(dist, v - eps, v + eps)
    c = f_min**2
    density_form = 2.0 * _exp(-2.0 * n * c * eps * eps)
    return DeviationBound(
        bound_name="var-deviation",
        inputs={
            "dist": format_distribution(dist),
            "alpha": alpha,
            "n": n,
            "eps": eps,
            "delta_eps": delta.value,
            "density_min": f_min,
        },
        terms=(("dkw_delta_eps", total), ("density_constant_form", density_form)),
        total=total,
        conditions=(ConditionCheck("delta_eps_positive", delta.value > 0.0, delta.value),),
    )


def check_subgauss_condition(
    tail: SubGaussian, v_alpha: float, level: RiskLevel | float
) -> ConditionReport:
    """Check sigma < sqrt((v_alpha - mu)^2 / (2 ln(1/(1-alpha)))).

    Requires v_alpha > mu; a nonpositive gap is reported as its own failed
    check rather than raised.
    """
    alpha = as_alpha(level)
    gap = float(v_alpha) - tail.mu
    if gap <= 0.0:
        checks = (ConditionCheck("var_exceeds_mean", False, gap),)
        return ConditionReport(satisfied=False, threshold=0.0, checks=checks)
    threshold = gap / math.sqrt(2.0 * math.log(1.0 / (1.0 - alpha)))
    ok = tail.sigma < threshold
    checks = (
        ConditionCheck("var_exceeds_mean", True, gap),
        ConditionCheck("sigma_below_threshold", ok, threshold),
    )
    return ConditionReport(satisfied=ok, threshold=threshold, checks=checks)


def check_subexp_condition(
    tail: SubExponential, v_alpha: float, level: RiskLevel | float
) -> ConditionReport:
    """Check sigma < sqrt((2 ln(1-alpha) + 2 (v_alpha - mu) m_b) / m_b^2).

    m_b = min((v_alpha - mu) / sigma^2, b').  A nonpositive radicand means
    no sigma can satisfy the condition; reported with threshold 0.
    """
    alpha = as_alpha(level)
    gap = float(v_alpha) - tail.mu
    if gap <= 0.0:
        checks = (ConditionCheck("var_exceeds_mean", False, gap),)
        return ConditionReport(satisfied=False, threshold=0.0, checks=checks, m_b=None)
    m_b = min(gap / tail.sigma**2, tail.b_prime)
    radicand = 2.0 * math.log(1.0 - alpha) + 2.0 * gap * m_b
    if radicand <= 0.0:
        checks = (
            ConditionCheck("var_exceeds_mean", True, gap),
            ConditionCheck("radicand_positive", False, radicand),
        )
        return ConditionReport(satisfied=False, threshold=0.0, checks=checks, m_b=m_b)
    threshold = math.sqrt(radicand) / m_b
    ok = tail.sigma < threshold
    checks = (
        ConditionCheck("var_exceeds_mean", True, gap),
        ConditionCheck("radicand_positive", True, radicand),
        ConditionCheck("sigma_below_threshold", ok, threshold),
    )
    return ConditionReport(satisfied=ok, threshold=threshold, checks=checks, m_b=m_b)


def _validate_n_eps(n: int, eps: float) -> tuple[int, float]:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    eps = float(eps)
    if math.isnan(eps) or eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    return n, eps


def _require_gap(v: float, mu: float) -> float:
    gap = v - mu
    if gap <= 0.0:
        raise ValueError(
            f"the bound requires the VaR to exceed the tail-model mean, "
            f"got v_alpha={v:g} <= mu={mu:g}; raise alpha or fix the tail model"
        )
    return gap


def _shared_tail_terms(
    dist: Distribution, alpha: float, n: int, eps: float
) -> tuple[float, float, float, float, float]:
    """T2-T4 of the general CVaR bounds plus the two delta values."""
    window = n * (1.0 - alpha) * eps / 8.0
    d1 = delta_epsilon(dist, alpha, window, window).value
    d2 = delta_epsilon(dist, alpha, math.sqrt(eps) / 4.0, math.sqrt(eps) / 4.0).value
    t2 = 2.0 * _exp(-2.0 * n * d1 * d1)
    t3 = 2.0 * _exp(-2.0 * n * d2 * d2)
    t4 = _exp(-2.0 * n * eps * (1.0 - alpha) ** 2)
    return t2, t3, t4, d1, d2


def cvar_bound_subgauss_general(
    tail: SubGaussian, dist: Distribution, level: RiskLevel | float, n: int, eps: float
) -> DeviationBound:
    """One-sided CVaR deviation bound for a sub-Gaussian tail, no sigma gate.

    total = exp(-n eps (1-alpha) (v-mu) / (2 sigma^2)) * [alpha + exp(-(v-mu)^2/(2 sigma^2))]^n
            + 2 exp(-2 n d1^2) + 2 exp(-2 n d2^2) + exp(-2 n eps (1-alpha)^2)

    with d1, d2 the CDF increments over the n-scaled and sqrt(eps) windows.
    The MGF term is evaluated in log space; its per-sample log factor is
    exposed as the condition ``t1_log_factor_negative`` (the term shrinks
    with n only when that factor is negative).
    """
    alpha = as_alpha(level)
    n, eps = _validate_n_eps(n, eps)
    v = true_var(dist, alpha)
    gap = _require_gap(v, tail.mu)
    sig2 = tail.sigma**2
    bracket = alpha + math.exp(-(gap**2) / (2.0 * sig2))
    log_factor = math.log(bracket) - eps * (1.0 - alpha) * gap / (2.0 * sig2)
    t1 = _exp(n * log_factor)
    t2, t3, t4, d1, d2 = _shared_tail_terms(dist, alpha, n, eps)
    total = t1 + t2 + t3 + t4
    return DeviationBound(
        bound_name="cvar-subgauss-general",
        inputs={
            "dist": format_distribution(dist),
            "alpha": alpha,
            "n": n,
            "eps": eps,
            "sigma": tail.sigma,
            "mu": tail.mu,
            "v_alpha": v,
            "delta_eps1": d1,
            "delta_eps2": d2,
        },
        terms=(
            ("mgf_chernoff", t1),
            ("var_dev_scaled_window", t2),
            ("var_dev_sqrt_window", t3),
            ("ecdf_dkw", t4),
        ),
        total=total,
        conditions=(
            ConditionCheck("var_exceeds_mean", True, gap),
            ConditionCheck("t1_log_factor_negative", log_factor < 0.0, log_factor),
        ),
    )


def _simplified_tail_terms(
    dist: Distribution, alpha: float, n: int, eps: float
) -> tuple[float, float, float, float, float]:
    """Density-constant T2-T4 of the simplified CVaR bounds.

    c1 = (f_min over the n-scaled window * n (1-alpha) / 8)^2 and
    c2 = (f_min over the sqrt window)^2 / 16, each window clipped to the
    support (the mean-value points the reduction supplies live where the
    CDF actually accrues mass).
    """
    v = true_var(dist, alpha)
    window = n * (1.0 - alpha) * eps / 8.0
    f1 = _density_min(dist, v - window, v + window)
    c1 = (f1 * n * (1.0 - alpha) / 8.0) ** 2
    root = math.sqrt(eps) / 4.0
    f2 = _density_min(dist, v - root, v + root)
    c2 = f2 * f2 / 16.0
    t2 = 2.0 * _exp(-2.0 * n * c1 * eps * eps)
    t3 = 2.0 * _exp(-2.0 * n * c2 * eps)
    t4 = _exp(-2.0 * n * eps * (1.0 - alpha) ** 2)
    return t2, t3, t4, c1, c2


def cvar_bound_subgauss(
    tail: SubGaussian, dist: Distribution, level: RiskLevel | float, n: int, eps: float
) -> DeviationBound:
    """Simplified sub-Gaussian CVaR bound, valid only under the sigma condition.

    total = exp(-n eps (1-alpha) (v-mu) / (2 sigma^2)) + 2 exp(-2 n c1 eps^2)
            + 2 exp(-2 n c2 eps) + exp(-2 n eps (1-alpha)^2)

    Raises ConditionNotSatisfiedError (carrying the threshold) when the
    sigma condition fails; callers fall back to the general form.
    """
    alpha = as_alpha(level)
    n, eps = _validate_n_eps(n, eps)
    v = true_var(dist, alpha)
    report = check_subgauss_condition(tail, v, alpha)
    if not report.satisfied:
        raise ConditionNotSatisfiedError(
            f"sub-Gaussian condition fails: sigma={tail.sigma:g} is not below the "
            f"threshold {report.threshold:g}; use the general bound instead",
            report=report,
        )
    gap = v - tail.mu
    log_factor = -eps * (1.0 - alpha) * gap / (2.0 * tail.sigma**2)
    t1 = _exp(n * log_factor)
    t2, t3, t4, c1, c2 = _simplified_tail_terms(dist, alpha, n, eps)
    total = t1 + t2 + t3 + t4
    return DeviationBound(
        bound_name="cvar-subgauss",
        inputs={
            "dist": format_distribution(dist),
            "alpha": alpha,
            "n": n,
            "eps": eps,
            "sigma": tail.sigma,
            "mu": tail.mu,
            "v_alpha": v,
            "c1": c1,
            "c2": c2,
        },
        terms=(
            ("mgf_chernoff", t1),
            ("var_dev_quadratic", t2),
            ("var_dev_linear", t3),
            ("ecdf_dkw", t4),
        ),
        total=total,
        conditions=report.checks + (ConditionCheck("t1_log_factor_negative", True, log_factor),),
    )


def cvar_bound_subexp_general(
    tail: SubExponential, dist: Distribution, level: RiskLevel | float, n: int, eps: float
) -> DeviationBound:
    """One-sided CVaR deviation bound for a sub-exponential tail, no sigma gate.

    The MGF term uses the clipped exponent m_b = min((v-mu)/sigma^2, b'):

    total = exp(-n eps (1-alpha) m_b / 2) * [alpha + exp(m_b (mu-v) + m_b^2 sigma^2 / 2)]^n
            + 2 exp(-2 n d1^2) + 2 exp(-2 n d2^2) + exp(-2 n eps (1-alpha)^2)
    """
    alpha = as_alpha(level)
    n, eps = _validate_n_eps(n, eps)
    v = true_var(dist, alpha)
    gap = _require_gap(v, tail.mu)
    m_b = min(gap / tail.sigma**2, tail.b_prime)
    bracket = alpha + math.exp(-m_b * gap + m_b**2 * tail.sigma**2 / 2.0)
    log_factor = math.log(bracket) - eps * (1.0 - alpha) * m_b / 2.0
    t1 = _exp(n * log_factor)
    t2, t3, t4, d1, d2 = _shared_tail_terms(dist, alpha, n, eps)
    total = t1 + t2 + t3 + t4
    return DeviationBound(
        bound_name="cvar-subexp-general",
        inputs={
            "dist": format_distribution(dist),
            "alpha": alpha,
            "n": n,
            "eps": eps,
            "sigma": tail.sigma,
            "b": tail.b,
            "b_prime": tail.b_prime,
            "mu": tail.mu,
            "v_alpha": v,
            "m_b": m_b,
            "delta_eps1": d1,
            "delta_eps2": d2,
        },
        terms=(
            ("mgf_chernoff", t1),
            ("var_dev_scaled_window", t2),
            ("var_dev_sqrt_window", t3),
            ("ecdf_dkw", t4),
        ),
        total=total,
        conditions=(
            ConditionCheck("var_exceeds_mean", True, gap),
            ConditionCheck("t1_log_factor_negative", log_factor < 0.0, log_factor),
        ),
    )


def cvar_bound_subexp(
    tail: SubExponential, dist: Distribution, level: RiskLevel | float, n: int, eps: float
) -> DeviationBound:
    """Simplified sub-exponential CVaR bound, gated on the sigma condition.

    total = exp(-n eps (1-alpha) m_b / 2) + 2 exp(-2 n c1 eps^2)
            + 2 exp(-2 n c2 eps) + exp(-2 n eps (1-alpha)^2)
    """
    alpha = as_alpha(level)
    n, eps = _validate_n_eps(n, eps)
    v = true_var(dist, alpha)
    report = check_subexp_condition(tail, v, alpha)
    if not report.satisfied:
        raise ConditionNotSatisfiedError(
            f"sub-exponential condition fails: sigma={tail.sigma:g} is not below the "
            f"threshold {report.threshold:g}; use the general bound instead",
            report=report,
        )
    m_b = report.m_b
    log_factor = -eps * (1.0 - alpha) * m_b / 2.0
    t1 = _exp(n * log_factor)
    t2, t3, t4, c1, c2 = _simplified_tail_terms(dist, alpha, n, eps)
    total = t1 + t2 + t3 + t4
    return DeviationBound(
        bound_name="cvar-subexp",
        inputs={
            "dist": format_distribution(dist),
            "alpha": alpha,
            "n": n,
            "eps": eps,
            "sigma": tail.sigma,
            "b": tail.b,
            "b_prime": tail.b_prime,
            "mu": tail.mu,
            "v_alpha": v,
            "m_b": m_b,
            "c1": c1,
            "c2": c2,
        },
        terms=(
            ("mgf_chernoff", t1),
            ("var_dev_quadratic", t2),
            ("var_dev_linear", t3),
            ("ecdf_dkw", t4),
        ),
        total=total,
        conditions=report.checks + (ConditionCheck("t1_log_factor_negative", True, log_factor),),
    )


_MAX_SEARCH_N = 2**62


def _smallest_n(total_at: "callable", delta: float) -> int:
    """Smallest n with total_at(n) <= delta, by doubling then bisection."""
    n = 1
    if total_at(n) <= delta:
        return n
    while total_at(n) > delta:
        if n >= _MAX_SEARCH_N:
            raise RuntimeError("sample-size search exceeded 2^62 without meeting the target")
        n = min(2 * n, _MAX_SEARCH_N)
    lo, hi = n // 2, n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total_at(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def _validate_eps_delta(eps: float, delta: float) -> tuple[float, float]:
    eps = float(eps)
    if math.isnan(eps) or eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    delta = float(delta)
    if math.isnan(delta) or not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie strictly in (0, 1), got {delta!r}")
    return eps, delta


def sample_size_for_var(
    eps: float, delta: float, dist: Distribution, level: RiskLevel | float
) -> SampleSizeResult:
    """Smallest n with var_deviation_bound(...).total <= delta.

    Always achievable: the bound decays like exp(-2 n delta_eps^2) with
    delta_eps > 0 for every catalogued family.
    """
    eps, delta = _validate_eps_delta(eps, delta)
    alpha = as_alpha(level)

    def total_at(n: int) -> float:
        return var_deviation_bound(dist, alpha, n, eps).total

    n = _smallest_n(total_at, delta)
    below = total_at(n - 1) if n > 1 else None
    return SampleSizeResult(achievable=True, n=n, bound_at_n=total_at(n), bound_below_n=below)


def sample_size_for_cvar(
    eps: float,
    delta: float,
    tail: SubGaussian | SubExponential,
    dist: Distribution,
    level: RiskLevel | float,
) -> SampleSizeResult:
    """Smallest n with the general CVaR bound at or below delta.

    Uses the ungated general form matching the tail-model kind.  When the
    MGF term's per-sample log factor is nonnegative the bound never drops
    below 1 and the target is reported as not achievable.
    """
    eps, delta = _validate_eps_delta(eps, delta)
    alpha = as_alpha(level)
    if isinstance(tail, SubGaussian):
        evaluator = cvar_bound_subgauss_general
    else:
        evaluator = cvar_bound_subexp_general

    probe = evaluator(tail, dist, alpha, 1, eps)
    log_factor = probe.condition("t1_log_factor_negative")
    if not log_factor.satisfied:
        return SampleSizeResult(
            achievable=False,
            n=None,
            bound_at_n=None,
            bound_below_n=None,
            reason=(
                f"the MGF term grows with n (per-sample log factor "
                f"{log_factor.threshold:g} >= 0) so the bound never falls below 1; "
                f"increase eps or supply a tighter tail model"
            ),
        )

    def total_at(n: int) -> float:
        return evaluator(tail, dist, alpha, n, eps).total

    n = _smallest_n(total_at, delta)
    below = total_at(n - 1) if n > 1 else None
    return SampleSizeResult(achievable=True, n=n, bound_at_n=total_at(n), bound_below_n=below)
