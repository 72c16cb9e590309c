"""Chernoff-style violation-probability bounds for the FCFS (IPQ) discipline.

All exponents are rate-function values of the form

    sup_theta { theta * y  -  coeff * logmgf(theta) }

over ``theta in (0, theta_max)``, optionally intersected with a stability
constraint.  The objective is concave (the log-MGF is convex), so a
golden-section search is used.  Upper bounds carry a ``(d_tilde * c' + 1)``
prefactor where ``c'`` is one past the minimising ``l'``; lower bounds carry
prefactor one and an additive slack ``eps`` in the exponent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .dist import Deterministic, Exponential, ServiceLaw
from .errors import (
    EmptyFeasibleSet,
    ScanCapExceeded,
    StabilityViolated,
    WrongLaw,
)
from .model import SystemSpec
from .schedule import (
    IterationSchedule,
    count_J_minus,
    frac_J_minus,
    k_prime,
    k_tilde,
)

__all__ = [
    "SupResult",
    "BoundReport",
    "sup_rate",
    "stability_margin",
    "require_stability",
    "theorem1_upper",
    "theorem2_lower",
    "corollary1_asymptotic",
    "corollary2_longrun",
    "homogeneous_bounds",
    "approx_exponents_ipq",
]

ELL_SCAN_CAP = 64
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SupResult:
    value: float
    theta_star: float
    unbounded: bool = False


@dataclass(frozen=True)
class BoundReport:
    """One bound query's result; ``probability`` is clamped to [0, 1]."""

    exponent: float
    prefactor: float
    probability: float
    argmin_ell: int | None
    theta_star: float
    flags: tuple[str, ...] = ()


def _golden_max(f, lo: float, hi: float, rel_tol: float = 1e-10, max_iter: int = 200):
    """Golden-section maximisation of a unimodal f on [lo, hi]."""
    span0 = hi - lo
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * span0:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, f(x)


def sup_rate(y: float, coeff: float, law: ServiceLaw,
             theta_cap: float | None = None) -> SupResult:
    """sup over theta > 0 of ``theta * y - coeff * logmgf(theta)``.

    ``theta_cap`` restricts the feasible set to ``(0, theta_cap)``; the
    boundary case ``y <= coeff * mean`` returns value 0 at ``theta* = 0``.
    """
    if coeff < 0:
        raise ValueError("coeff must be >= 0")
    if theta_cap is not None and theta_cap <= 0:
        raise EmptyFeasibleSet("theta constraint excludes every theta > 0")
    if isinstance(law, Deterministic):
        slope = y - coeff * law.v
        if slope <= 0:
            return SupResult(0.0, 0.0)
        if theta_cap is None or math.isinf(theta_cap):
            return SupResult(math.inf, math.inf, unbounded=True)
        return SupResult(theta_cap * slope, theta_cap)
    hi = law.theta_max() * (1.0 - 1e-12)
    if theta_cap is not None:
        hi = min(hi, theta_cap)
    lo = min(1e-12, hi * 0.5)

    def objective(theta: float) -> float:
        return theta * y - coeff * law.logmgf(theta)

    theta_star, val = _golden_max(objective, lo, hi)
    # The comparison-limited golden bracket localises theta* only to about
    # sqrt(eps); polish the stationary point by bisecting the analytic slope.
    slope_lo, slope_hi = max(lo, theta_star - 1e-4 * hi), min(hi, theta_star + 1e-4 * hi)

    def slope(theta: float) -> float:
        return y - coeff * law.logmgf_deriv(theta)

    if slope(slope_lo) > 0 > slope(slope_hi):
        for _ in range(100):
            mid = 0.5 * (slope_lo + slope_hi)
            if slope(mid) > 0:
                slope_lo = mid
            else:
                slope_hi = mid
        theta_star = 0.5 * (slope_lo + slope_hi)
        val = max(val, objective(theta_star))
    if val <= 0.0:
        return SupResult(0.0, 0.0)
    return SupResult(val, theta_star)


# -- stability ----------------------------------------------------------------


def _alpha_sum(spec: SystemSpec, d_tilde: int) -> float:
    """sum over real groups of (d_tilde / d_g) * alpha_g."""
    return sum(
        (d_tilde / spec.d(g)) * spec.alpha(g)
        for g in spec.real_groups
    )


def stability_margin(spec: SystemSpec, sched: IterationSchedule) -> float:
    """Derivative at theta=0 of the per-iteration net-load function.

    Negative means a theta > 0 exists with
    ``sum_j (d_tilde/d_j) alpha_j logmgf(theta) < d_tilde * theta * b``.
    """
    return _alpha_sum(spec, sched.d_tilde) * spec.service.mean() - sched.d_tilde * spec.b


def require_stability(spec: SystemSpec, sched: IterationSchedule) -> None:
    margin = stability_margin(spec, sched)
    if margin >= 0:
        raise StabilityViolated(
            f"per-iteration mean work exceeds the iteration budget by {margin:.6g} "
            f"time units per scaled source"
        )


# -- Theorem 1 / Theorem 2 -----------------------------------------------------


def _m_of(spec, sched, g, i, k, limit_n):
    if limit_n:
        return frac_J_minus(spec, sched, g, i, k)
    return count_J_minus(spec, sched, g, i, k) / spec.n_scale


def _gamma_upper(spec, sched, g, i, k, x, ell, m, alpha_sum) -> SupResult:
    d_g, b = spec.d(g), spec.b
    if ell == 0:
        return sup_rate(x - d_g * b, m, spec.service)
    arg = x / ell + ((ell - 1) * sched.d_tilde - d_g) * b / ell
    res = sup_rate(arg, alpha_sum + m / ell, spec.service)
    return SupResult(ell * res.value, res.theta_star, res.unbounded)


def _gamma_lower(spec, sched, g, i, k, x, ell, m, alpha_sum) -> SupResult:
    d_g, b = spec.d(g), spec.b
    if ell == 0:
        return sup_rate(x - d_g * b, m, spec.service)
    arg = x / ell + (ell * sched.d_tilde - d_g) * b / ell
    res = sup_rate(arg, ((ell - 1) * alpha_sum + m) / ell, spec.service)
    return SupResult(ell * res.value, res.theta_star, res.unbounded)


def _scan_min(gammas: list[SupResult], scanned_all: bool):
    values = [g.value for g in gammas]
    argmin = min(range(len(values)), key=values.__getitem__)
    if not scanned_all and argmin == len(values) - 1:
        raise ScanCapExceeded(
            f"minimum over l' still decreasing at the scan cap {ELL_SCAN_CAP}"
        )
    return argmin, gammas[argmin]


def _finish(exponent, prefactor, argmin, theta_star, n_scale, flags=()):
    if math.isinf(exponent):
        prob = 0.0
    else:
        prob = min(1.0, prefactor * math.exp(-n_scale * exponent))
    if exponent <= 0.0:
        flags = flags + ("threshold_below_floor",)
        warnings.warn("threshold at or below the deterministic floor; bound is vacuous",
                      stacklevel=3)
        prob = 1.0
    return BoundReport(exponent, prefactor, prob, argmin, theta_star, flags)


def theorem1_upper(spec: SystemSpec, sched: IterationSchedule, g: int, i: int,
                   k: int, x: float, *, limit_n: bool = False) -> BoundReport:
    """Finite-n upper bound on Pr(A_{g,i}(k) >= n*x) under the IPQ.

    ``limit_n`` evaluates the rate functions with large-system fractions in
    place of finite counts.
    """
    spec.check_source(g, i)
    require_stability(spec, sched)
    m = _m_of(spec, sched, g, i, k, limit_n)
    alpha_sum = _alpha_sum(spec, sched.d_tilde)
    kp = k_prime(k_tilde(spec.d(g), k), sched.d_tilde)
    ells = range(0, min(kp, ELL_SCAN_CAP) + 1)
    gammas = [_gamma_upper(spec, sched, g, i, k, x, ell, m, alpha_sum) for ell in ells]
    argmin, best = _scan_min(gammas, scanned_all=(kp <= ELL_SCAN_CAP))
    c_prime = argmin + 1
    prefactor = sched.d_tilde * c_prime + 1
    return _finish(best.value, prefactor, argmin, best.theta_star, spec.n_scale)


def theorem2_lower(spec: SystemSpec, sched: IterationSchedule, g: int, i: int,
                   k: int, x: float, eps: float = 0.0, *,
                   limit_n: bool = False) -> BoundReport:
    """Asymptotic lower bound on Pr(A_{g,i}(k) >= n*x) under the IPQ.

    ``eps`` is the user-chosen additive exponent slack and is included in the
    reported exponent.
    """
    spec.check_source(g, i)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    require_stability(spec, sched)
    m = _m_of(spec, sched, g, i, k, limit_n)
    alpha_sum = _alpha_sum(spec, sched.d_tilde)
    kp = k_prime(k_tilde(spec.d(g), k), sched.d_tilde)
    ells = range(0, min(kp, ELL_SCAN_CAP) + 1)
    gammas = [_gamma_lower(spec, sched, g, i, k, x, ell, m, alpha_sum) for ell in ells]
    argmin, best = _scan_min(gammas, scanned_all=(kp <= ELL_SCAN_CAP))
    return _finish(best.value + eps, 1.0, argmin, best.theta_star, spec.n_scale)


def corollary1_asymptotic(spec: SystemSpec, sched: IterationSchedule, g: int,
                          i: int, k: int, x: float) -> tuple[float, float]:
    """(lower, upper) sandwich of the asymptotic decay rate as n -> infinity."""
    ub = theorem1_upper(spec, sched, g, i, k, x, limit_n=True)
    lb = theorem2_lower(spec, sched, g, i, k, x, eps=0.0, limit_n=True)
    return ub.exponent, lb.exponent


def corollary2_longrun(spec: SystemSpec, sched: IterationSchedule, g: int,
                       i: int, x: float) -> tuple[float, float]:
    """Long-run violation-fraction bound and its stated decay-rate bound.

    The probability bound mixes the finite ``n`` in the exponential scaling
    with large-system rate functions, one term per update phase ``zeta``.
    The decay-rate figure is the per-phase sum as stated; the probability
    bound is the primary tested artifact.
    """
    spec.check_source(g, i)
    require_stability(spec, sched)
    alpha_sum = _alpha_sum(spec, sched.d_tilde)
    phases = sched.d_tilde // spec.d(g)
    per_phase = []
    c_prime = 1
    for zeta in range(1, phases + 1):
        m = frac_J_minus(spec, sched, g, i, zeta)
        gammas = [
            _gamma_upper(spec, sched, g, i, zeta, x, ell, m, alpha_sum)
            for ell in range(0, ELL_SCAN_CAP + 1)
        ]
        argmin, best = _scan_min(gammas, scanned_all=False)
        per_phase.append(best.value)
        c_prime = max(c_prime, argmin + 1)
    d_tilde, d_g = sched.d_tilde, spec.d(g)
    prefactor = d_tilde * c_prime + 1
    prob = sum(
        (d_g / d_tilde) * prefactor * math.exp(-spec.n_scale * gamma)
        for gamma in per_phase
    )
    return min(1.0, prob), sum(per_phase)


# -- homogeneous specialisations ----------------------------------------------


def _stability_theta_cap(law: ServiceLaw, b: float) -> float:
    """sup of the interval (0, cap) where logmgf(theta) < theta * b."""
    if law.mean() >= b:
        raise StabilityViolated(f"mean service {law.mean()} >= round period {b}")
    hi = law.theta_max() * (1.0 - 1e-12)
    if math.isinf(hi):
        return math.inf  # deterministic law below b never violates the constraint
    if law.logmgf(hi) - hi * b < 0:
        return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if law.logmgf(mid) - mid * b < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return lo


def homogeneous_bounds(n: int, b: float, law: ServiceLaw, i: int, k: int,
                       x: float) -> tuple[BoundReport, BoundReport]:
    """Matching upper/lower bounds for the single-group (round-robin) case.

    Both reports share one exponent; they differ in the prefactor (``c' + 1``
    for the upper bound, one for the lower).
    """
    if not 1 <= i <= n:
        raise ValueError(f"source index {i} out of range 1..{n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    cap = _stability_theta_cap(law, b)
    gammas = []
    for ell in range(0, k):
        if ell == 0:
            res = sup_rate(x - b, i / n, law, theta_cap=cap)
        else:
            arg = x / ell + (ell - 1) * b / ell
            res = sup_rate(arg, (ell + i / n) / ell, law, theta_cap=cap)
            res = SupResult(ell * res.value, res.theta_star, res.unbounded)
        gammas.append(res)
    argmin, best = _scan_min(gammas, scanned_all=True)
    c_prime = argmin + 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ub = _finish(best.value, c_prime + 1.0, argmin, best.theta_star, n)
        lb = _finish(best.value, 1.0, argmin, best.theta_star, n)
    return ub, lb


# -- exponential-service approximations ----------------------------------------


def approx_exponents_ipq(spec: SystemSpec, sched: IterationSchedule, g: int,
                         i: int, k: int, x: float, regime: str) -> float:
    """Closed-form large-system exponent approximations for exponential service.

    ``regime``: ``"plugin"`` evaluates the stationary-point plug-in form,
    which keeps the unshifted threshold inside the optimal tilt (the exact
    evaluator shifts consistently instead); ``"large_rate"`` and
    ``"small_rate"`` apply the respective simplifications.  Returns the
    minimum over ``l'``.
    """
    law = spec.service
    if not isinstance(law, Exponential):
        raise WrongLaw("approximations require an exponential service law")
    if regime not in ("plugin", "large_rate", "small_rate"):
        raise ValueError(f"unknown regime {regime!r}")
    spec.check_source(g, i)
    lam = law.rate
    b, d_g, d_tilde = spec.b, spec.d(g), sched.d_tilde
    m = frac_J_minus(spec, sched, g, i, k)
    alpha_sum = _alpha_sum(spec, d_tilde)
    kp = k_prime(k_tilde(d_g, k), d_tilde)

    def gamma0() -> float:
        if regime == "plugin":
            return lam * x - d_g * (lam * b - m * b / x) - m - m * math.log(lam * x / m)
        if regime == "large_rate":
            return lam * (x - d_g * b)
        return lam * x - d_g * (1.0 - m * b / x) - m - m * math.log(lam * x / m)

    def gamma_ell(ell: int) -> float:
        c = ell * alpha_sum + m
        tail = d_tilde * (ell - 1) * c * b / x + c * (1.0 + math.log(lam * x / c))
        if regime == "plugin":
            return lam * x - d_g * (lam * b - c * b / x) - tail + (ell - 1) * d_tilde * lam * b
        if regime == "large_rate":
            return lam * x - d_g * lam * b - tail + (ell - 1) * d_tilde
        return lam * x - d_g * (1.0 - c * b / x) - tail

    values = [gamma0()]
    values.extend(gamma_ell(ell) for ell in range(1, min(kp, ELL_SCAN_CAP) + 1))
    return min(values)
