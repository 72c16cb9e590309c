"""Domain types and configuration validation.

A system is a list of source groups with strictly increasing period
multipliers ``d``, a base period ``b``, one shared service-time law and a
scaling convention.  Group ``g`` (1-based position in ``groups``) has
``count`` sources whose packets arrive in batches every ``d_g * n_scale * b``
time units.

Two readings of the scaling count ``n`` coexist in practice and are selected
by ``n_scaling``:

* ``TOTAL`` -- ``n`` is the total number of real sources across groups (the
  convention under which the shipped figure presets are stable and the bound
  curves are informative);
* ``PER_GROUP`` -- ``n`` is the common per-group size, which inflates the
  relative load by the number of groups.

Every normalised quantity downstream (``alpha_g``, ``m``, ``t``, thresholds
``n * x`` and the ``exp(-n * exponent)`` scaling) consistently uses
``n_scale`` as ``n``, so both conventions are internally coherent.

Normalisation: when the user's first group has ``d > 1``, a one-source
zero-service *virtual* group with ``d = 1`` is prepended.  It anchors the
round structure but is excluded from source totals, fraction sums, slot
counts and reporting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .dist import Deterministic, ServiceLaw, law_from_config
from .errors import (
    ConfigError,
    DuplicateOrDecreasingD,
    EmptyGroups,
    NonPositiveParameter,
)

__all__ = [
    "NScaling",
    "GroupSpec",
    "SystemSpec",
    "SourceId",
    "validate_and_normalize",
    "spec_from_config",
]


class NScaling(enum.Enum):
    TOTAL = "total"
    PER_GROUP = "per_group"


class SourceId(NamedTuple):
    """1-based (group, within-group) index into a normalised spec."""

    g: int
    i: int


@dataclass(frozen=True)
class GroupSpec:
    d: int
    count: int
    virtual: bool = False


@dataclass(frozen=True)
class SystemSpec:
    groups: tuple[GroupSpec, ...]
    b: float
    service: ServiceLaw
    n_scaling: NScaling = NScaling.TOTAL
    normalized: bool = False

    # -- derived quantities ------------------------------------------------

    @property
    def eta(self) -> int:
        return len(self.groups)

    @property
    def real_groups(self) -> tuple[int, ...]:
        """1-based indices of non-virtual groups."""
        return tuple(g for g, grp in enumerate(self.groups, start=1) if not grp.virtual)

    @property
    def virtual_offset(self) -> int:
        """1 when a virtual anchor group was prepended, else 0."""
        return 1 if self.groups and self.groups[0].virtual else 0

    @property
    def n_total(self) -> int:
        return sum(grp.count for grp in self.groups if not grp.virtual)

    @property
    def n_scale(self) -> int:
        """The count that scales periods, thresholds and exponents."""
        if self.n_scaling is NScaling.TOTAL:
            return self.n_total
        counts = {grp.count for grp in self.groups if not grp.virtual}
        if len(counts) != 1:
            raise ConfigError("per_group scaling requires equal group sizes")
        return counts.pop()

    @property
    def round_period(self) -> float:
        return self.n_scale * self.b

    def d(self, g: int) -> int:
        return self.groups[g - 1].d

    def count(self, g: int) -> int:
        return self.groups[g - 1].count

    def is_virtual(self, g: int) -> bool:
        return self.groups[g - 1].virtual

    def alpha(self, g: int) -> float:
        """count_g / n_scale for real groups, 0 for the virtual anchor."""
        grp = self.groups[g - 1]
        return 0.0 if grp.virtual else grp.count / self.n_scale

    def period(self, g: int) -> float:
        return self.d(g) * self.round_period

    def service_law(self, g: int) -> ServiceLaw:
        return Deterministic(0.0) if self.groups[g - 1].virtual else self.service

    def check_source(self, g: int, i: int, allow_virtual: bool = False) -> None:
        if not 1 <= g <= self.eta:
            raise ConfigError(f"group index {g} out of range 1..{self.eta}")
        grp = self.groups[g - 1]
        if grp.virtual and not allow_virtual:
            raise ConfigError(f"group {g} is the virtual anchor group")
        if not 1 <= i <= grp.count:
            raise ConfigError(f"source index {i} out of range 1..{grp.count} in group {g}")

    def user_group(self, g_user: int) -> int:
        """Map the user's (pre-normalisation) group number to a groups index."""
        g = g_user + self.virtual_offset
        if not (1 <= g_user and g <= self.eta):
            raise ConfigError(f"group {g_user} out of range")
        return g


def validate_and_normalize(spec: SystemSpec) -> SystemSpec:
    """Validate a raw spec; prepend the virtual anchor group when needed.

    Idempotent: normalising an already-normalised spec returns an equal spec.
    """
    if not spec.groups:
        raise EmptyGroups("at least one group is required")
    for grp in spec.groups:
        if grp.d < 1 or int(grp.d) != grp.d:
            raise NonPositiveParameter(f"group multiplier d={grp.d} must be a positive integer")
        if grp.count < 1 or int(grp.count) != grp.count:
            raise NonPositiveParameter(f"group size {grp.count} must be a positive integer")
    if not (spec.b > 0 and math.isfinite(spec.b)):
        raise NonPositiveParameter(f"base period b={spec.b} must be positive and finite")
    ds = [grp.d for grp in spec.groups]
    if any(later <= earlier for earlier, later in zip(ds, ds[1:])):
        raise DuplicateOrDecreasingD(f"d values {ds} must be strictly increasing")
    if sum(grp.virtual for grp in spec.groups) > 1 or any(
        grp.virtual for grp in spec.groups[1:]
    ):
        raise ConfigError("at most one virtual group is allowed, and only in front")
    groups = spec.groups
    if ds[0] > 1:
        groups = (GroupSpec(d=1, count=1, virtual=True),) + groups
    normalized = replace(spec, groups=groups, normalized=True)
    if spec.n_scaling is NScaling.PER_GROUP:
        normalized.n_scale  # raises on unequal real group sizes
    return normalized


def spec_from_config(cfg: dict) -> SystemSpec:
    """Build and normalise a SystemSpec from a key-value config tree.

    Keys: ``groups`` (list of ``{"d": int, "count"?: int}``), ``b`` (float),
    ``service`` (``{"kind": ..., ...}``), ``n`` (default group count when a
    group omits ``count``), ``n_scaling`` (``"total"`` | ``"per_group"``).
    """
    try:
        raw_groups = cfg["groups"]
        b = float(cfg["b"])
        service = law_from_config(cfg["service"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    if not isinstance(raw_groups, list):
        raise ConfigError("'groups' must be a list")
    default_n = cfg.get("n")
    groups = []
    for entry in raw_groups:
        count = entry.get("count", default_n)
        if count is None:
            raise ConfigError("group omits 'count' and no top-level 'n' given")
        groups.append(GroupSpec(d=int(entry["d"]), count=int(count)))
    try:
        scaling = NScaling(cfg.get("n_scaling", "total"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spec = SystemSpec(groups=tuple(groups), b=b, service=service, n_scaling=scaling)
    return validate_and_normalize(spec)
