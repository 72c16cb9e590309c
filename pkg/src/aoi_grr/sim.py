"""Event-driven simulator of the GRR-scheduled multi-source system.

The schedule is static, so the event loop is a flat walk over rounds rather
than a priority queue.  Round ``r`` nominally starts at ``r * n * b``; every
source served in round ``r`` under GRR has a fresh arrival exactly at that
instant.  The server walks the round's slots in order, idling only when the
scheduled source has no packet yet.

Disciplines:

* ``IPQ`` -- per-source unbounded FCFS queue; the k-th service of a source
  always delivers its k-th arrival.
* ``SPQ`` -- per-source buffer of capacity one holding the freshest arrival;
  an arrival displaces any queued (not in-service) packet, which counts as a
  preemption.  The delivered-update index counts served packets only.

Numerical layout: the running clock is kept *relative to the current round's
nominal start*, and peak ages are assembled from these small offsets plus
exact integer multiples of ``n * b``.  This keeps record-level identities
(waiting-time recursions, peak-age decompositions) reproducible to ~1e-12
even over long horizons.

A ``policy="rr"`` mode serves every source in every round (the conventional
round-robin baseline) while keeping the heterogeneous arrival periods; a
scheduled source without a fresh packet idles the server until its next
arrival.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, HorizonTooShort
from .model import SourceId, SystemSpec
from .schedule import IterationSchedule, build_schedule

__all__ = ["Discipline", "SimRun", "PeakAgeTrace", "run", "run_ipq", "run_spq",
           "trace_waiting_times"]


class Discipline(enum.Enum):
    IPQ = "ipq"
    SPQ = "spq"


@dataclass(frozen=True)
class SimRun:
    spec: SystemSpec
    discipline: Discipline
    horizon: int  # number of iterations (d_tilde rounds each)
    seed: int
    policy: str = "grr"  # "grr" | "rr"


@dataclass
class PeakAgeTrace:
    """Per-packet records plus the flat per-slot service log.

    Record columns (one entry per delivered packet, virtual anchor included
    but flagged via the spec's group table):

    ``g, i, k``        source and delivered-update index (k counts services)
    ``arrival_idx``    index of the arrival actually delivered (equals k under IPQ)
    ``S_prev, D, A``   previous delivered arrival time, departure, peak age
    ``W, V``           waiting and service time of the delivered packet
    ``T, N``           total service / total idle between service starts k-1 and k
                       (NaN for k = 1)
    ``preempted``      packets of this source discarded between updates k-1 and k
    ``slot``           index into the service-log arrays
    ``round``          absolute round number of the service

    Service-log columns (one entry per slot in service order):
    ``slot_g, slot_i, slot_k, slot_V, slot_idle, slot_round``.
    """

    run: SimRun
    g: np.ndarray = field(repr=False, default=None)
    i: np.ndarray = field(repr=False, default=None)
    k: np.ndarray = field(repr=False, default=None)
    arrival_idx: np.ndarray = field(repr=False, default=None)
    S_prev: np.ndarray = field(repr=False, default=None)
    D: np.ndarray = field(repr=False, default=None)
    A: np.ndarray = field(repr=False, default=None)
    W: np.ndarray = field(repr=False, default=None)
    V: np.ndarray = field(repr=False, default=None)
    T: np.ndarray = field(repr=False, default=None)
    N: np.ndarray = field(repr=False, default=None)
    preempted: np.ndarray = field(repr=False, default=None)
    slot: np.ndarray = field(repr=False, default=None)
    round: np.ndarray = field(repr=False, default=None)
    slot_g: np.ndarray = field(repr=False, default=None)
    slot_i: np.ndarray = field(repr=False, default=None)
    slot_k: np.ndarray = field(repr=False, default=None)
    slot_V: np.ndarray = field(repr=False, default=None)
    slot_idle: np.ndarray = field(repr=False, default=None)
    slot_round: np.ndarray = field(repr=False, default=None)

    def source_mask(self, g: int, i: int) -> np.ndarray:
        return (self.g == g) & (self.i == i)

    def records(self, g: int, i: int) -> dict[str, np.ndarray]:
        m = self.source_mask(g, i)
        return {
            name: getattr(self, name)[m]
            for name in ("k", "arrival_idx", "S_prev", "D", "A", "W", "V", "T",
                         "N", "preempted", "slot", "round")
        }

    def n_records(self) -> int:
        return len(self.A)


def _slot_table(spec: SystemSpec, sched: IterationSchedule, policy: str):
    """Per-round slot lists for one iteration as (g, i, uid, d_g, is_virtual)."""
    uid = {}
    next_uid = 0
    for g, grp in enumerate(spec.groups, start=1):
        for i in range(1, grp.count + 1):
            uid[(g, i)] = next_uid
            next_uid += 1
    all_sources = tuple(sorted(uid))
    rounds = []
    for r in range(sched.d_tilde):
        slots = all_sources if policy == "rr" else sched.round_slots(r)
        rounds.append(
            tuple(
                (g, i, uid[(g, i)], spec.d(g), spec.is_virtual(g))
                for (g, i) in slots
            )
        )
    return rounds, next_uid


class _DrawBuffer:
    """Sequential draws from the service law, pre-drawn in blocks."""

    def __init__(self, law, rng, block=1 << 14):
        self._law = law
        self._rng = rng
        self._block = block
        self._buf = law.sample_array(rng, block)
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._law.sample_array(self._rng, self._block)
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        return float(v)


def run(spec: SystemSpec, discipline: Discipline, horizon: int, seed: int,
        policy: str = "grr") -> PeakAgeTrace:
    if not spec.normalized:
        raise ConfigError("simulate requires a normalised spec")
    if horizon < 1:
        raise HorizonTooShort(f"horizon={horizon} must be >= 1 iteration")
    if policy not in ("grr", "rr"):
        raise ConfigError(f"unknown policy {policy!r}")

    sched = build_schedule(spec)
    rounds, n_uid = _slot_table(spec, sched, policy)
    NB = spec.round_period
    rng = np.random.default_rng(seed)
    draws = _DrawBuffer(spec.service, rng)

    # Per-source state.
    served = [0] * n_uid          # IPQ: delivered count; SPQ: last delivered arrival index
    n_done = [0] * n_uid          # delivered-update count (k of the next record - 1)
    prev_arrival = [0] * n_uid    # arrival index of the previous delivered packet
    prev_slot = [-1] * n_uid
    spq = discipline is Discipline.SPQ

    # Record buffers.
    rec_g, rec_i, rec_k, rec_j = [], [], [], []
    rec_Sprev, rec_D, rec_A, rec_W, rec_V = [], [], [], [], []
    rec_T, rec_N, rec_p, rec_slot, rec_round = [], [], [], [], []
    # Service-log buffers.
    log_g, log_i, log_k, log_V, log_idle, log_round = [], [], [], [], [], []

    rel = 0.0          # server clock minus current round's nominal start
    slot_idx = 0
    total_rounds = horizon * sched.d_tilde

    for r in range(total_rounds):
        for (g, i, u, d_g, virtual) in rounds[r % sched.d_tilde]:
            if spq:
                s = served[u]
                # Largest arrival index whose offset from the round base is <= rel.
                j = r // d_g + 1
                while j > 1 and ((j - 1) * d_g - r) * NB > rel:
                    j -= 1
                while (j * d_g - r) * NB <= rel:
                    j += 1
                arrived = ((j - 1) * d_g - r) * NB <= rel
                if arrived and j > s:
                    arr_off = ((j - 1) * d_g - r) * NB
                    start_rel = rel
                    idle = 0.0
                    wait = start_rel - arr_off
                    j_served = j
                else:
                    arr_off = (s * d_g - r) * NB
                    start_rel = arr_off
                    idle = start_rel - rel
                    wait = 0.0
                    j_served = s + 1
                served[u] = j_served
            else:
                j_served = served[u] + 1
                arr_off = ((j_served - 1) * d_g - r) * NB
                start_rel = arr_off if arr_off > rel else rel
                idle = start_rel - rel
                wait = start_rel - arr_off
                served[u] = j_served

            v = 0.0 if virtual else draws.next()
            k_now = n_done[u] + 1
            j_prev = prev_arrival[u]

            # Peak age assembled from the small offset plus an exact multiple of NB.
            age = start_rel + v + (r - (j_prev - 1) * d_g) * NB
            s_prev_abs = (j_prev - 1) * d_g * NB
            d_abs = r * NB + (start_rel + v)

            if k_now >= 2:
                lo, hi = prev_slot[u], slot_idx
                t_tot = 0.0
                n_tot = 0.0
                for q in range(lo, hi):
                    t_tot += log_V[q]
                for q in range(lo + 1, hi + 1):
                    if q == hi:
                        n_tot += idle
                    else:
                        n_tot += log_idle[q]
            else:
                t_tot = float("nan")
                n_tot = float("nan")

            rec_g.append(g); rec_i.append(i); rec_k.append(k_now)
            rec_j.append(j_served)
            rec_Sprev.append(s_prev_abs); rec_D.append(d_abs); rec_A.append(age)
            rec_W.append(wait); rec_V.append(v)
            rec_T.append(t_tot); rec_N.append(n_tot)
            rec_p.append(j_served - j_prev - 1)
            rec_slot.append(slot_idx); rec_round.append(r)

            log_g.append(g); log_i.append(i); log_k.append(k_now)
            log_V.append(v); log_idle.append(idle); log_round.append(r)

            n_done[u] = k_now
            prev_arrival[u] = j_served
            prev_slot[u] = slot_idx
            rel = start_rel + v
            slot_idx += 1
        rel -= NB

    trace = PeakAgeTrace(run=SimRun(spec, discipline, horizon, seed, policy))
    trace.g = np.array(rec_g, dtype=np.int32)
    trace.i = np.array(rec_i, dtype=np.int32)
    trace.k = np.array(rec_k, dtype=np.int64)
    trace.arrival_idx = np.array(rec_j, dtype=np.int64)
    trace.S_prev = np.array(rec_Sprev)
    trace.D = np.array(rec_D)
    trace.A = np.array(rec_A)
    trace.W = np.array(rec_W)
    trace.V = np.array(rec_V)
    trace.T = np.array(rec_T)
    trace.N = np.array(rec_N)
    trace.preempted = np.array(rec_p, dtype=np.int64)
    trace.slot = np.array(rec_slot, dtype=np.int64)
    trace.round = np.array(rec_round, dtype=np.int64)
    trace.slot_g = np.array(log_g, dtype=np.int32)
    trace.slot_i = np.array(log_i, dtype=np.int32)
    trace.slot_k = np.array(log_k, dtype=np.int64)
    trace.slot_V = np.array(log_V)
    trace.slot_idle = np.array(log_idle)
    trace.slot_round = np.array(log_round, dtype=np.int64)
    return trace


def run_ipq(spec: SystemSpec, horizon: int, seed: int, policy: str = "grr") -> PeakAgeTrace:
    return run(spec, Discipline.IPQ, horizon, seed, policy)


def run_spq(spec: SystemSpec, horizon: int, seed: int, policy: str = "grr") -> PeakAgeTrace:
    return run(spec, Discipline.SPQ, horizon, seed, policy)


def trace_waiting_times(trace: PeakAgeTrace) -> dict[SourceId, np.ndarray]:
    """Per-source waiting-time sequences, ordered by update index."""
    out = {}
    spec = trace.run.spec
    for g, grp in enumerate(spec.groups, start=1):
        for i in range(1, grp.count + 1):
            mask = trace.source_mask(g, i)
            order = np.argsort(trace.k[mask])
            out[SourceId(g, i)] = trace.W[mask][order]
    return out
