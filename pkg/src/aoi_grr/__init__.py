"""Peak-age violation analysis for generalized round-robin scheduling.

Simulator, Chernoff-style bounds and Monte Carlo estimators for periodic
multi-source systems under two per-source queueing disciplines (unbounded
FCFS and freshest-packet-only).
"""

from .dist import Deterministic, Exponential, Geometric, ServiceLaw, law_from_config
from .model import (
    GroupSpec,
    NScaling,
    SourceId,
    SystemSpec,
    spec_from_config,
    validate_and_normalize,
)
from .schedule import (
    IterationSchedule,
    build_schedule,
    count_I,
    count_J_minus,
    ell_prime,
    frac_I,
    frac_J_minus,
    k_prime,
    k_tilde,
)
from .sim import Discipline, PeakAgeTrace, SimRun, run, run_ipq, run_spq, trace_waiting_times
from .bounds_ipq import (
    BoundReport,
    approx_exponents_ipq,
    corollary1_asymptotic,
    corollary2_longrun,
    homogeneous_bounds,
    stability_margin,
    sup_rate,
    theorem1_upper,
    theorem2_lower,
)
from .bounds_spq import (
    SpqBoundQuery,
    approx_exponents_spq,
    corollary6_asymptotic,
    corollary7_longrun,
    theorem3_upper,
)
from .mc import (
    McEstimate,
    estimate_longrun_fraction,
    estimate_violation,
    fit_log_slope,
    wilson_interval,
)

__version__ = "0.1.0"
