import warnings

import numpy as np
import pytest

from aoi_grr.dist import Deterministic, Exponential, Geometric
from aoi_grr.errors import KTooSmall, WrongLaw
from aoi_grr.model import GroupSpec, NScaling, SystemSpec, validate_and_normalize
from aoi_grr.schedule import build_schedule, count_I
from aoi_grr.bounds_ipq import homogeneous_bounds, sup_rate
from aoi_grr.bounds_spq import (
    SpqBoundQuery,
    approx_exponents_spq,
    corollary6_asymptotic,
    corollary7_longrun,
    theorem3_upper,
)
from test_bounds_ipq import exp_rate_closed_form


def make_spec(d_counts, law, b, scaling=NScaling.TOTAL):
    groups = tuple(GroupSpec(d=d, count=c) for d, c in d_counts)
    return validate_and_normalize(
        SystemSpec(groups=groups, b=b, service=law, n_scaling=scaling)
    )


EXAMPLE1 = make_spec([(1, 1), (2, 1), (3, 1)], Exponential(rate=0.4), b=5.0)


def test_query_requires_predecessor():
    with pytest.raises(KTooSmall):
        SpqBoundQuery(1, 1, 1, 10.0)


def test_theorem3_coefficient_on_example_spec():
    # (2,1) at k=2: four slots between services over n=3 sources, plus 1/n.
    sched = build_schedule(EXAMPLE1)
    assert count_I(EXAMPLE1, sched, 2, 1, 2) == 4
    q = SpqBoundQuery(2, 1, 2, 21.0)
    rep = theorem3_upper(EXAMPLE1, sched, q)
    direct = sup_rate(21.0 - 2 * 5.0, 4 / 3 + 1 / 3, EXAMPLE1.service)
    assert rep.exponent == pytest.approx(direct.value, abs=1e-12)
    assert rep.prefactor == 1.0


def test_theorem3_deterministic_below_floor():
    spec = make_spec([(1, 3)], Deterministic(v=2.0), b=5.0)
    sched = build_schedule(spec)
    # x - b below (t + 1/n) * v: rate clamps to zero, probability one.
    with pytest.warns(UserWarning):
        rep = theorem3_upper(spec, sched, SpqBoundQuery(1, 2, 2, 7.0))
    assert rep.exponent == 0.0 and rep.probability == 1.0


def test_theorem3_homogeneous_coefficient():
    n = 6
    spec = make_spec([(1, n)], Exponential(rate=0.5), b=4.0)
    sched = build_schedule(spec)
    rep = theorem3_upper(spec, sched, SpqBoundQuery(1, 3, 2, 9.0))
    direct = sup_rate(9.0 - 4.0, (n + 1) / n, spec.service)
    assert rep.exponent == pytest.approx(direct.value, abs=1e-12)


def test_corollary6_drops_one_over_n():
    sched = build_schedule(EXAMPLE1)
    q = SpqBoundQuery(2, 1, 2, 21.0)
    finite = theorem3_upper(EXAMPLE1, sched, q).exponent
    asym = corollary6_asymptotic(EXAMPLE1, sched, q)
    assert asym >= finite  # smaller MGF coefficient -> larger rate
    direct = sup_rate(21.0 - 10.0, 4 / 3, EXAMPLE1.service)
    assert asym == pytest.approx(direct.value, abs=1e-12)


def test_corollary6_exponential_closed_form():
    spec = make_spec([(1, 4), (2, 4)], Exponential(rate=0.25), b=5.0)
    sched = build_schedule(spec)
    q = SpqBoundQuery(2, 4, 2, 30.0)
    t = count_I(spec, sched, 2, 4, 2) / spec.n_scale
    y = 30.0 - 2 * 5.0
    assert corollary6_asymptotic(spec, sched, q) == pytest.approx(
        exp_rate_closed_form(y, t, 0.25), abs=1e-8)


def test_corollary7_phase_structure():
    # homogeneous: a single phase
    spec1 = make_spec([(1, 5)], Exponential(rate=0.4), b=4.0)
    sched1 = build_schedule(spec1)
    total = corollary7_longrun(spec1, sched1, 1, 5, 9.0)
    only = corollary6_asymptotic(spec1, sched1, SpqBoundQuery(1, 5, 2, 9.0))
    assert total == pytest.approx(only, rel=1e-12)
    # two groups: group 1 has two phases with different slot counts
    spec2 = make_spec([(1, 3), (2, 3)], Exponential(rate=0.25), b=5.0)
    sched2 = build_schedule(spec2)
    t_by_phase = {count_I(spec2, sched2, 1, 3, k) for k in (2, 3)}
    assert len(t_by_phase) == 2
    total2 = corollary7_longrun(spec2, sched2, 1, 3, 12.0)
    parts = [corollary6_asymptotic(spec2, sched2, SpqBoundQuery(1, 3, k, 12.0))
             for k in (2, 3)]
    assert total2 == pytest.approx(sum(parts), rel=1e-12)
    assert all(p >= 0 for p in parts)


def test_homogeneous_spq_equals_ipq_ell0_exponent():
    # Large base period: both disciplines share sup { theta(x-b) - logmgf }.
    n, b, x = 12, 10.0, 12.0
    law = Exponential(rate=1.0)
    spq = sup_rate(x - b, 1.0, law)  # corollary-6 homogeneous form
    ub, _ = homogeneous_bounds(n=n, b=b, law=law, i=n, k=6, x=x)
    assert ub.argmin_ell == 0
    assert ub.exponent == pytest.approx(spq.value, abs=1e-9)


def test_exponent_nondecreasing_in_x():
    sched = build_schedule(EXAMPLE1)
    xs = np.linspace(11.0, 40.0, 12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = [theorem3_upper(EXAMPLE1, sched,
                               SpqBoundQuery(2, 1, 2, float(x))).exponent
                for x in xs]
    assert np.all(np.diff(vals) >= -1e-12)


def test_theorem3_dominates_monte_carlo():
    from aoi_grr.mc import estimate_violation
    from aoi_grr.sim import Discipline
    spec = make_spec([(1, 4), (2, 4), (4, 4)], Exponential(rate=0.2), b=5.0)
    sched = build_schedule(spec)
    for g, x in ((1, 13.5), (2, 21.0), (3, 36.0)):
        q = SpqBoundQuery(g, 4, 2, x)
        ub = theorem3_upper(spec, sched, q)
        est = estimate_violation(spec, Discipline.SPQ, g, 4, 2, x, 20000, 3,
                                 threads=2)
        assert est.ci_low <= ub.probability


def test_approx_plugin_matches_exact_when_shift_vanishes():
    spec = make_spec([(1, 4), (2, 4)], Exponential(rate=0.5), b=1e-9)
    sched = build_schedule(spec)
    q = SpqBoundQuery(2, 4, 2, 12.0)
    plug = approx_exponents_spq(spec, sched, q, "plugin")
    exact = corollary6_asymptotic(spec, sched, q)
    assert plug == pytest.approx(exact, abs=1e-6)


def test_approx_requires_exponential_and_orders_by_d():
    spec = make_spec([(1, 2)], Geometric(p=0.5), b=5.0)
    sched = build_schedule(spec)
    with pytest.raises(WrongLaw):
        approx_exponents_spq(spec, sched, SpqBoundQuery(1, 1, 2, 9.0), "plugin")
    for law, b, regime in ((Exponential(rate=1.0), 5.0, "large_rate"),
                           (Exponential(rate=0.21), 5.0, "small_rate")):
        spec = make_spec([(1, 5), (2, 5), (4, 5)], law, b=b)
        sched = build_schedule(spec)
        vals = [approx_exponents_spq(spec, sched, SpqBoundQuery(g, 5, 2, 25.0), regime)
                for g in (1, 2, 3)]
        assert vals[0] > vals[1] > vals[2]
