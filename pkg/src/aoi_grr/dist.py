"""Service-time laws: sampling, log-MGF, and the finite-MGF domain.

Every law exposes

* ``mean()``
* ``theta_max()`` -- sup of the interval [0, theta_max) where ``logmgf`` is finite
* ``logmgf(theta)``
* ``sample(rng)`` / ``sample_array(rng, size)`` -- i.i.d. draws
* ``sample_sum(count, size, rng)`` -- draws of a sum of ``count`` i.i.d. copies,
  used by the vectorised Monte Carlo estimators (Gamma for exponential,
  shifted negative binomial for geometric).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NonPositiveParameter, ThetaOutOfDomain

__all__ = [
    "ServiceLaw",
    "Exponential",
    "Geometric",
    "Deterministic",
    "law_from_config",
]


@dataclass(frozen=True)
class ServiceLaw:
    """Base class; concrete laws are the three dataclasses below."""

    def mean(self) -> float:
        raise NotImplementedError

    def theta_max(self) -> float:
        raise NotImplementedError

    def logmgf(self, theta: float) -> float:
        raise NotImplementedError

    def logmgf_deriv(self, theta: float) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.sample_array(rng, 1)[0])

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def sample_sum(self, count: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draws of the sum of ``count`` i.i.d. service times."""
        if count == 0:
            return np.zeros(size)
        total = np.zeros(size)
        for _ in range(count):
            total += self.sample_array(rng, size)
        return total

    def _check_theta(self, theta: float) -> None:
        if theta < 0.0 or theta >= self.theta_max():
            raise ThetaOutOfDomain(
                f"theta={theta} outside [0, {self.theta_max()}) for {self!r}"
            )


@dataclass(frozen=True)
class Exponential(ServiceLaw):
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise NonPositiveParameter("exponential rate must be > 0")

    def mean(self) -> float:
        return 1.0 / self.rate

    def theta_max(self) -> float:
        return self.rate

    def logmgf(self, theta: float) -> float:
        self._check_theta(theta)
        return -math.log1p(-theta / self.rate)

    def logmgf_deriv(self, theta: float) -> float:
        self._check_theta(theta)
        return 1.0 / (self.rate - theta)

    def sample_array(self, rng, size):
        return rng.exponential(1.0 / self.rate, size)

    def sample_sum(self, count, size, rng):
        if count == 0:
            return np.zeros(size)
        return rng.gamma(count, 1.0 / self.rate, size)


@dataclass(frozen=True)
class Geometric(ServiceLaw):
    """Retransmission-until-success slot count, support {1, 2, ...}."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise NonPositiveParameter("geometric success probability must be in (0,1)")

    def mean(self) -> float:
        return 1.0 / self.p

    def theta_max(self) -> float:
        return -math.log1p(-self.p)

    def logmgf(self, theta: float) -> float:
        self._check_theta(theta)
        q = 1.0 - self.p
        return theta + math.log(self.p) - math.log(1.0 - q * math.exp(theta))

    def logmgf_deriv(self, theta: float) -> float:
        self._check_theta(theta)
        return 1.0 / (1.0 - (1.0 - self.p) * math.exp(theta))

    def sample_array(self, rng, size):
        return rng.geometric(self.p, size).astype(float)

    def sample_sum(self, count, size, rng):
        # Sum of `count` geometric(>=1) variables = count + NegBinomial(count, p).
        if count == 0:
            return np.zeros(size)
        return (count + rng.negative_binomial(count, self.p, size)).astype(float)


@dataclass(frozen=True)
class Deterministic(ServiceLaw):
    v: float

    def __post_init__(self):
        if self.v < 0:
            raise NonPositiveParameter("deterministic service time must be >= 0")

    def mean(self) -> float:
        return self.v

    def theta_max(self) -> float:
        return math.inf

    def logmgf(self, theta: float) -> float:
        self._check_theta(theta)
        return theta * self.v

    def logmgf_deriv(self, theta: float) -> float:
        self._check_theta(theta)
        return self.v

    def sample_array(self, rng, size):
        return np.full(size, self.v)

    def sample_sum(self, count, size, rng):
        return np.full(size, count * self.v)


def law_from_config(cfg: dict) -> ServiceLaw:
    """Build a law from a ``{"kind": ..., <param>: ...}`` mapping."""
    try:
        kind = cfg["kind"]
    except (KeyError, TypeError):
        raise ConfigError("service config must carry a 'kind' key")
    if kind == "exponential":
        return Exponential(rate=float(cfg["rate"]))
    if kind == "geometric":
        return Geometric(p=float(cfg["p"]))
    if kind == "deterministic":
        return Deterministic(v=float(cfg["v"]))
    raise ConfigError(f"unknown service kind {kind!r}")


def law_param(law: ServiceLaw) -> tuple[str, float]:
    """(kind, parameter) pair used for self-describing CSV columns."""
    if isinstance(law, Exponential):
        return "exponential", law.rate
    if isinstance(law, Geometric):
        return "geometric", law.p
    if isinstance(law, Deterministic):
        return "deterministic", law.v
    raise ConfigError(f"unknown law {law!r}")
