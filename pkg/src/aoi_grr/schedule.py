"""GRR iteration schedule and index-set cardinalities.

One iteration has ``d_tilde = lcm(d_1..d_eta)`` rounds.  Group ``g`` is served
in round ``r`` exactly when ``r % d_g == 0``; inside a round, groups appear in
ascending group order and sources in ascending within-group order.  The k-th
service of source ``(g, i)`` therefore sits in round ``d_g * (k - 1)``.

The two slot counts exported here drive the bound formulas:

* ``count_J_minus(g, i, k)`` -- slots in the round containing service ``k``,
  from the round's first slot up to and including ``(g, i)``'s own slot.
  Divided by ``n`` it is the coefficient ``m_{g,i}(k)``.
* ``count_I(g, i, k)`` -- slots from service ``k - 1`` (inclusive) to service
  ``k`` (exclusive).  Divided by ``n`` it is ``t_{g,i}(k-1)``.

Virtual anchor slots carry zero service time and are excluded from both
counts.  ``frac_*`` variants return the large-system limits in which each
slot of group ``g`` weighs ``alpha_g / count_g`` instead of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, KTooSmall, SourceNotServedInRound
from .model import SourceId, SystemSpec

__all__ = [
    "IterationSchedule",
    "build_schedule",
    "k_tilde",
    "ell_prime",
    "k_prime",
    "count_J_minus",
    "frac_J_minus",
    "count_I",
    "frac_I",
]


# -- pure integer maps -------------------------------------------------------


def k_tilde(d_g: int, k: int) -> int:
    return d_g * (k - 1) + 1


def ell_prime(ell: int, ktilde: int, d_tilde: int) -> int:
    return math.ceil((ktilde - ell) / d_tilde)


def k_prime(ktilde: int, d_tilde: int) -> int:
    return math.ceil((ktilde - 1) / d_tilde)


# -- schedule -----------------------------------------------------------------


@dataclass(frozen=True)
class IterationSchedule:
    spec: SystemSpec
    d_tilde: int
    rounds: tuple[tuple[SourceId, ...], ...]

    def active_groups(self, r: int) -> tuple[int, ...]:
        """1-based group indices served in (absolute) round ``r``."""
        return tuple(
            g
            for g in range(1, self.spec.eta + 1)
            if r % self.spec.d(g) == 0
        )

    def round_slots(self, r: int) -> tuple[SourceId, ...]:
        return self.rounds[r % self.d_tilde]

    def round_size(self, r: int, real_only: bool = True) -> int:
        """Number of slots in round ``r`` (virtual anchor excluded by default)."""
        total = 0
        for g in self.active_groups(r):
            if real_only and self.spec.is_virtual(g):
                continue
            total += self.spec.count(g)
        return total

    def services_per_iteration(self) -> int:
        """Real slots in one iteration: sum over g of (d_tilde/d_g) * count_g."""
        return sum(self.round_size(r) for r in range(self.d_tilde))


def build_schedule(spec: SystemSpec) -> IterationSchedule:
    if not spec.normalized:
        raise ConfigError("build_schedule requires a normalised spec")
    d_tilde = math.lcm(*(grp.d for grp in spec.groups))
    rounds = []
    for r in range(d_tilde):
        slots = []
        for g, grp in enumerate(spec.groups, start=1):
            if r % grp.d == 0:
                slots.extend(SourceId(g, i) for i in range(1, grp.count + 1))
        rounds.append(tuple(slots))
    return IterationSchedule(spec=spec, d_tilde=d_tilde, rounds=tuple(rounds))


# -- slot counts --------------------------------------------------------------


def _slot_weight(spec: SystemSpec, g: int, limit: bool) -> float:
    if spec.is_virtual(g):
        return 0.0
    return spec.alpha(g) / spec.count(g) if limit else 1.0


def _J_minus(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int,
             limit: bool) -> float:
    spec.check_source(g, i, allow_virtual=True)
    if k < 1:
        raise KTooSmall(f"k={k} must be >= 1")
    r = spec.d(g) * (k - 1)
    if r % spec.d(g) != 0 or g not in sched.active_groups(r):
        raise SourceNotServedInRound(f"source ({g},{i}) not served in round {r}")
    total = 0.0
    for g2 in sched.active_groups(r):
        if g2 < g:
            total += _slot_weight(spec, g2, limit) * spec.count(g2)
    total += _slot_weight(spec, g, limit) * i
    return total


def count_J_minus(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int) -> int:
    """|J^-_{g,i}(k)|: real slots up to and including (g,i) in its k-th round."""
    return int(_J_minus(spec, sched, g, i, k, limit=False))


def frac_J_minus(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int) -> float:
    """Large-system limit of |J^-|/n with group ratios held fixed."""
    return _J_minus(spec, sched, g, i, k, limit=True)


def _I(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int,
       limit: bool) -> float:
    spec.check_source(g, i, allow_virtual=True)
    if k < 2:
        raise KTooSmall(f"count_I needs k >= 2, got k={k}")
    d_g = spec.d(g)
    r_prev = d_g * (k - 2)
    r_next = d_g * (k - 1)
    w_own = _slot_weight(spec, g, limit)
    # Tail of the round holding service k-1: own slot plus everything after it.
    total = w_own * (spec.count(g) - i + 1)
    for g2 in sched.active_groups(r_prev):
        if g2 > g:
            total += _slot_weight(spec, g2, limit) * spec.count(g2)
    # Full intermediate rounds.
    for r in range(r_prev + 1, r_next):
        for g2 in sched.active_groups(r):
            total += _slot_weight(spec, g2, limit) * spec.count(g2)
    # Head of the round holding service k: everything strictly before (g, i).
    for g2 in sched.active_groups(r_next):
        if g2 < g:
            total += _slot_weight(spec, g2, limit) * spec.count(g2)
    total += w_own * (i - 1)
    return total


def count_I(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int) -> int:
    """|I_{g,i}(k-1)|: real slots from service k-1 (incl.) to service k (excl.)."""
    return int(_I(spec, sched, g, i, k, limit=False))


def frac_I(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int) -> float:
    """Large-system limit of |I|/n with group ratios held fixed."""
    return _I(spec, sched, g, i, k, limit=True)
