"""Monte Carlo estimation of peak-age violation probabilities.

Three equivalent samplers of A_{g,i}(k) are provided:

* the waiting-time recursion sampler for GRR+IPQ (round sums drawn directly
  as Gamma / shifted negative-binomial variates, then the anchor recursion
  ``W <- (W + roundsum - n*b)^+``) -- this is the queue's own dynamics and is
  verified record-for-record against the event simulator by the test suite;
* a vectorised slot walker for SPQ and for the round-robin baseline, which
  replays the per-slot serve/idle/preempt decisions across replications;
* ``method="event"`` runs the scalar event simulator once per replication
  (slow; used for cross-validation).

Replications are split into fixed-size blocks with seeds spawned from the
base seed, so the violation count is reproducible and independent of the
worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import HorizonTooShort, KTooSmall
from .model import SystemSpec
from .schedule import IterationSchedule, build_schedule, count_J_minus, k_tilde
from .sim import Discipline, run

__all__ = [
    "McEstimate",
    "wilson_interval",
    "estimate_violation",
    "estimate_longrun_fraction",
    "fit_log_slope",
]

Z99 = 2.5758293035489004          # two-sided 99% normal quantile
RULE_OF_THREE_99 = 5.2983173665480363  # -ln(0.005): one-sided 99.5% zero-count bound
T99_19DF = 2.8609346486133354     # two-sided 99% t quantile, 19 degrees of freedom
BLOCK = 1 << 14


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    reps: int
    violations: int
    flags: tuple[str, ...] = ()


def wilson_interval(violations: int, reps: int) -> tuple[float, float, tuple[str, ...]]:
    """99% Wilson interval with rule-of-three replacements at the edges."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if violations == 0:
        return 0.0, min(1.0, RULE_OF_THREE_99 / reps), ("below_resolution",)
    if violations == reps:
        return max(0.0, 1.0 - RULE_OF_THREE_99 / reps), 1.0, ("at_saturation",)
    p = violations / reps
    z2 = Z99 * Z99
    denom = 1.0 + z2 / reps
    center = (p + z2 / (2.0 * reps)) / denom
    half = (Z99 / denom) * math.sqrt(p * (1.0 - p) / reps + z2 / (4.0 * reps * reps))
    return max(0.0, center - half), min(1.0, center + half), ()


# -- fast samplers --------------------------------------------------------------


def _round_counts(spec: SystemSpec, sched: IterationSchedule, n_rounds: int) -> list[int]:
    return [sched.round_size(r) for r in range(n_rounds)]


def _ipq_recursion_block(spec, sched, g, i, k, threshold, m, rng) -> int:
    """GRR+IPQ: Lindley recursion over round totals, then the partial round."""
    NB = spec.round_period
    d_g = spec.d(g)
    ktil = k_tilde(d_g, k)
    law = spec.service
    W = np.zeros(m)
    for r in range(ktil - 1):
        W = np.maximum(W + law.sample_sum(sched.round_size(r), m, rng) - NB, 0.0)
    partial = law.sample_sum(count_J_minus(spec, sched, g, i, k), m, rng)
    A = W + partial + d_g * NB
    return int(np.count_nonzero(A >= threshold))


def _slot_plan(spec: SystemSpec, sched: IterationSchedule, g: int, i: int, k: int,
               policy: str):
    """Flat slot list (round, uid, d, virtual, occurrence) up to the target's k-th slot."""
    uid = {}
    for gg, grp in enumerate(spec.groups, start=1):
        for ii in range(1, grp.count + 1):
            uid[(gg, ii)] = len(uid)
    all_sources = tuple(sorted(uid))
    last_round = (k - 1) * (1 if policy == "rr" else spec.d(g))
    plan = []
    occurrences = [0] * len(uid)
    for r in range(last_round + 1):
        slots = all_sources if policy == "rr" else sched.round_slots(r)
        for (gg, ii) in slots:
            u = uid[(gg, ii)]
            occurrences[u] += 1
            plan.append((r, gg, ii, u, spec.d(gg), spec.is_virtual(gg), occurrences[u]))
            if (gg, ii) == (g, i) and occurrences[u] == k:
                return plan, len(uid), uid[(g, i)]
    raise HorizonTooShort("target slot not reached; inconsistent plan")


def _spq_walk_block(spec, sched, g, i, k, threshold, m, rng, policy) -> int:
    """SPQ (and RR+SPQ): vectorised replay of serve/idle/preempt decisions."""
    NB = spec.round_period
    plan, n_src, target_uid = _slot_plan(spec, sched, g, i, k, policy)
    law = spec.service
    t = np.zeros(m)
    s = np.zeros((n_src, m), dtype=np.int64)
    j_prev = np.zeros(m, dtype=np.int64)
    P_target = spec.d(g) * NB
    for (r, gg, ii, u, d_g, virtual, occ) in plan:
        P = d_g * NB
        s_u = s[u]
        j_t = np.floor_divide(t, P).astype(np.int64) + 1
        late = j_t > s_u
        start = np.where(late, t, s_u * P)
        new_s = np.where(late, j_t, s_u + 1)
        s[u] = new_s
        v = 0.0 if virtual else law.sample_array(rng, m)
        is_target = u == target_uid
        if is_target and occ == k:
            S_prev = (j_prev - 1) * P_target
            A = start + v - S_prev
            return int(np.count_nonzero(A >= threshold))
        if is_target and occ == k - 1:
            j_prev = new_s.copy()
        t = start + v
    raise HorizonTooShort("slot plan ended before the target update")


def _ipq_walk_block(spec, sched, g, i, k, threshold, m, rng, policy) -> int:
    """IPQ under the RR baseline: per-slot FCFS walk with known arrival times."""
    NB = spec.round_period
    plan, _, target_uid = _slot_plan(spec, sched, g, i, k, policy)
    law = spec.service
    t = np.zeros(m)
    P_target = spec.d(g) * NB
    for (r, gg, ii, u, d_g, virtual, occ) in plan:
        arrival = (occ - 1) * d_g * NB
        start = np.maximum(t, arrival)
        v = 0.0 if virtual else law.sample_array(rng, m)
        if u == target_uid and occ == k:
            A = start + v - (k - 2) * P_target
            return int(np.count_nonzero(A >= threshold))
        t = start + v
    raise HorizonTooShort("slot plan ended before the target update")


def _event_block(spec, discipline, g, i, k, threshold, m, rng, policy) -> int:
    sched = build_schedule(spec)
    rounds_needed = (k - 1) * (1 if policy == "rr" else spec.d(g)) + 1
    horizon = math.ceil(rounds_needed / sched.d_tilde)
    count = 0
    for _ in range(m):
        seed = int(rng.integers(0, 2**63 - 1))
        trace = run(spec, discipline, horizon, seed, policy)
        recs = trace.records(g, i)
        idx = np.nonzero(recs["k"] == k)[0]
        if len(idx) == 0:
            raise HorizonTooShort(f"update k={k} not produced for source ({g},{i})")
        count += bool(recs["A"][idx[0]] >= threshold)
    return count


def estimate_violation(spec: SystemSpec, discipline: Discipline, g: int, i: int,
                       k: int, x: float, reps: int, base_seed: int,
                       threads: int | None = None, method: str = "fast",
                       policy: str = "grr") -> McEstimate:
    """Estimate Pr(A_{g,i}(k) >= n*x) over ``reps`` independent replications.

    The threshold is ``spec.n_scale * x``.  Results are reproducible for a
    fixed ``base_seed`` and independent of ``threads``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    spec.check_source(g, i)
    if discipline is Discipline.SPQ and k < 1:
        raise KTooSmall("k must be >= 1")
    if k < 1:
        raise KTooSmall("k must be >= 1")
    sched = build_schedule(spec)
    threshold = spec.n_scale * x

    if method == "event":
        def block_fn(m, rng):
            return _event_block(spec, discipline, g, i, k, threshold, m, rng, policy)
    elif discipline is Discipline.IPQ and policy == "grr":
        def block_fn(m, rng):
            return _ipq_recursion_block(spec, sched, g, i, k, threshold, m, rng)
    elif discipline is Discipline.IPQ:
        def block_fn(m, rng):
            return _ipq_walk_block(spec, sched, g, i, k, threshold, m, rng, policy)
    else:
        def block_fn(m, rng):
            return _spq_walk_block(spec, sched, g, i, k, threshold, m, rng, policy)

    sizes = [BLOCK] * (reps // BLOCK)
    if reps % BLOCK:
        sizes.append(reps % BLOCK)
    seeds = np.random.SeedSequence(base_seed).spawn(len(sizes))

    def run_block(args):
        size, seq = args
        return block_fn(size, np.random.default_rng(seq))

    n_workers = threads if threads is not None else (os.cpu_count() or 1)
    if n_workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            violations = sum(pool.map(run_block, zip(sizes, seeds)))
    else:
        violations = sum(run_block(a) for a in zip(sizes, seeds))

    p_hat = violations / reps
    lo, hi, flags = wilson_interval(violations, reps)
    return McEstimate(p_hat, lo, hi, reps, violations, flags)


def estimate_longrun_fraction(spec: SystemSpec, discipline: Discipline, g: int,
                              i: int, x: float, iterations: int,
                              seed: int) -> McEstimate:
    """Time-average violation fraction over one long trajectory.

    The first iteration is excluded as warmup; the 99% interval uses batch
    means over 20 consecutive batches of updates.
    """
    spec.check_source(g, i)
    sched = build_schedule(spec)
    trace = run(spec, discipline, iterations, seed)
    recs = trace.records(g, i)
    keep = recs["round"] >= sched.d_tilde
    indicators = (recs["A"][keep] >= spec.n_scale * x).astype(float)
    n_updates = len(indicators)
    if n_updates < 20:
        raise HorizonTooShort(
            f"only {n_updates} post-warmup updates for source ({g},{i}); "
            "increase iterations"
        )
    p_hat = float(indicators.mean())
    batches = np.array_split(indicators, 20)
    means = np.array([b.mean() for b in batches])
    half = T99_19DF * means.std(ddof=1) / math.sqrt(len(means))
    flags = ("below_resolution",) if indicators.sum() == 0 else ()
    return McEstimate(
        p_hat,
        max(0.0, p_hat - half),
        min(1.0, p_hat + half),
        n_updates,
        int(indicators.sum()),
        flags,
    )


def fit_log_slope(axis: np.ndarray, p_hat: np.ndarray,
                  min_p: float = 0.0) -> float:
    """Least-squares slope of ln(p_hat) against the axis, over points with p > min_p."""
    axis = np.asarray(axis, dtype=float)
    p_hat = np.asarray(p_hat, dtype=float)
    mask = p_hat > min_p
    if mask.sum() < 2:
        raise ValueError("need at least two positive estimates to fit a slope")
    coeffs = np.polyfit(axis[mask], np.log(p_hat[mask]), 1)
    return float(coeffs[0])
