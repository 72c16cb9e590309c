"""Violation-probability upper bound and approximations for the SPQ discipline.

The single-packet queue admits the pathwise bound
``A_{g,i}(k) < d_g*n*b + T_{g,i}(k-1) + V_{g,i}(k)``, whose Chernoff
transform needs only the slot count between consecutive services.  No lower
bound is evaluated; callers report "n/a" instead of a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dist import Exponential
from .errors import KTooSmall, WrongLaw
from .model import SystemSpec
from .schedule import IterationSchedule, count_I, frac_I
from .bounds_ipq import BoundReport, sup_rate, _finish

__all__ = [
    "SpqBoundQuery",
    "theorem3_upper",
    "corollary6_asymptotic",
    "corollary7_longrun",
    "approx_exponents_spq",
]


@dataclass(frozen=True)
class SpqBoundQuery:
    g: int
    i: int
    k: int
    x: float

    def __post_init__(self):
        if self.k < 2:
            raise KTooSmall("SPQ bounds need k >= 2 (a predecessor service)")


def theorem3_upper(spec: SystemSpec, sched: IterationSchedule,
                   q: SpqBoundQuery, *, limit_n: bool = False) -> BoundReport:
    """Upper bound on Pr(A_{g,i}(k) >= n*x) under the SPQ; prefactor one."""
    spec.check_source(q.g, q.i)
    if limit_n:
        coeff = frac_I(spec, sched, q.g, q.i, q.k)
    else:
        coeff = count_I(spec, sched, q.g, q.i, q.k) / spec.n_scale + 1.0 / spec.n_scale
    res = sup_rate(q.x - spec.d(q.g) * spec.b, coeff, spec.service)
    return _finish(res.value, 1.0, None, res.theta_star, spec.n_scale)


def corollary6_asymptotic(spec: SystemSpec, sched: IterationSchedule,
                          q: SpqBoundQuery) -> float:
    """Large-system decay-rate bound: drops the 1/n term, uses slot fractions."""
    return theorem3_upper(spec, sched, q, limit_n=True).exponent


def corollary7_longrun(spec: SystemSpec, sched: IterationSchedule, g: int,
                       i: int, x: float) -> float:
    """Stated long-run decay-rate bound: per-phase sum of asymptotic exponents.

    The slot count between services is periodic in k with period
    ``d_tilde / d_g``; the phases are covered by ``k = 2 .. d_tilde/d_g + 1``.
    """
    phases = sched.d_tilde // spec.d(g)
    total = 0.0
    for k in range(2, phases + 2):
        total += corollary6_asymptotic(spec, sched, SpqBoundQuery(g, i, k, x))
    return total


def approx_exponents_spq(spec: SystemSpec, sched: IterationSchedule,
                         q: SpqBoundQuery, regime: str) -> float:
    """Closed-form large-system exponent approximations for exponential service.

    Same regime conventions as the IPQ approximations, with the
    between-services slot fraction in place of the within-round one.
    """
    law = spec.service
    if not isinstance(law, Exponential):
        raise WrongLaw("approximations require an exponential service law")
    if regime not in ("plugin", "large_rate", "small_rate"):
        raise ValueError(f"unknown regime {regime!r}")
    lam = law.rate
    b, d_g = spec.b, spec.d(q.g)
    t = frac_I(spec, sched, q.g, q.i, q.k)
    x = q.x
    tail = t + t * math.log(lam * x / t)
    if regime == "plugin":
        return lam * x - d_g * (lam * b - t * b / x) - tail
    if regime == "large_rate":
        return lam * x - d_g * lam * b - tail
    return lam * x - d_g * (1.0 - t * b / x) - tail
