"""Period functions: frozen anchors, gradients, identities, asymptotics.

Reference values were computed independently with mpmath (tanh-sinh
quadrature at 25-40 digits, Richardson-extrapolated central differences
for the gradient anchors).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from fkpp_graphs.errors import InvalidDomain, OrbitNotClosed
from fkpp_graphs.period import (
    HOMOCLINIC_OFFSET,
    arclength_from_turning,
    asymptotic_T,
    center_limits,
    grad_T,
    grad_T0,
    interval_period_slope,
    period_T,
    period_T0,
)
from fkpp_graphs.phaseplane import PhasePoint, turning_point_p0, well

X0 = 1.316957896924816708625046

T_ANCHORS = {
    (0.5, 0.0): 2.078234042903682630247,
    (0.4, 0.0): 2.25916661787249385014,
    (0.6, 0.0): 1.936358574381786014084,
    (0.5, -0.2): 1.409035407387309398263,
    (0.2, -0.5): 1.260913645739494672919,  # orbit outside the homoclinic
    (0.5, -0.5): 0.8473873092093306205944,
}

T0_ANCHORS = {
    (0.9, -0.05): 0.5160640044065570742384,
    (0.45, -0.03): 0.1212724020370825351639,
    (0.3, -0.1): 0.4922137824226527345865,
}

# along q = -p, three decades toward the saddle
T_NEAR_SADDLE = {
    1e-2: 5.074933139535659497022,
    1e-3: 7.382056474524024963917,
    1e-4: 9.68509194052701977526,
}

GRAD_T_ANCHOR = (0.5, -0.5, -1.380244653295141903395, 1.23951069340971619321)
GRAD_T0_ANCHORS = [
    (0.9, -0.05, 3.886591338339682445382, -8.951893700922398641456),
    (0.45, -0.03, -0.05023745138729287708027, -4.046493428450984995202),
]


def test_homoclinic_offset_value():
    assert math.isclose(HOMOCLINIC_OFFSET, X0, rel_tol=1e-15)
    assert math.isclose(HOMOCLINIC_OFFSET, 2.0 * math.acosh(math.sqrt(1.5)),
                        rel_tol=1e-15)


@pytest.mark.parametrize("pq,want", sorted(T_ANCHORS.items()))
def test_period_anchors(pq, want):
    res = period_T(PhasePoint(*pq))
    assert math.isclose(res.value, want, rel_tol=1e-12)
    assert res.estimated_quadrature_error <= 1e-8


@pytest.mark.parametrize("pq,want", sorted(T0_ANCHORS.items()))
def test_lift_anchors(pq, want):
    res = period_T0(PhasePoint(*pq))
    assert math.isclose(res.value, want, rel_tol=1e-12)
    assert res.estimated_quadrature_error <= 1e-8


@pytest.mark.parametrize("p,want", sorted(T_NEAR_SADDLE.items()))
def test_near_saddle_anchors(p, want):
    assert math.isclose(period_T(PhasePoint(p, -p)).value, want, rel_tol=1e-12)


def test_lift_matches_independent_shooting():
    # integrate w'' = w - w^2 from the turning point until w reaches 0.9;
    # the crossing position is T0 by definition
    p, q = 0.9, -0.05
    p0 = turning_point_p0(PhasePoint(p, q))

    def rhs(x, y):
        return [y[1], y[0] - y[0] * y[0]]

    def hit(x, y):
        return y[0] - p

    hit.terminal = True
    hit.direction = 1.0
    sol = solve_ivp(rhs, (0.0, 5.0), [p0, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-14, events=hit)
    assert sol.t_events[0].size == 1
    assert abs(period_T0(PhasePoint(p, q)).value - sol.t_events[0][0]) <= 1e-8


def test_period_at_section_start_is_zero():
    assert period_T(PhasePoint(1.0, -0.3)).value == 0.0


def test_center_is_rejected():
    with pytest.raises(InvalidDomain):
        period_T(PhasePoint(1.0, 0.0))
    with pytest.raises(InvalidDomain):
        period_T0(PhasePoint(1.0, 0.0))


@pytest.mark.parametrize("p,q", [(0.2, -0.5), (1.0, -1.0 / math.sqrt(3.0))])
def test_lift_requires_closed_orbit(p, q):
    with pytest.raises(OrbitNotClosed):
        period_T0(PhasePoint(p, q))


def test_gradient_anchor_T():
    p, q, want_dp, want_dq = GRAD_T_ANCHOR
    g = grad_T(PhasePoint(p, q))
    assert math.isclose(g.dT_dp, want_dp, rel_tol=1e-11)
    assert math.isclose(g.dT_dq, want_dq, rel_tol=1e-11)


@pytest.mark.parametrize("p,q,want_dp,want_dq", GRAD_T0_ANCHORS)
def test_gradient_anchors_T0(p, q, want_dp, want_dq):
    g = grad_T0(PhasePoint(p, q))
    assert math.isclose(g.dT_dp, want_dp, rel_tol=1e-10)
    assert math.isclose(g.dT_dq, want_dq, rel_tol=1e-10)


def test_gradient_T_matches_finite_differences():
    p, q, h = 0.5, -0.5, 1e-5
    g = grad_T(PhasePoint(p, q))
    fd_p = (period_T(PhasePoint(p + h, q)).value
            - period_T(PhasePoint(p - h, q)).value) / (2.0 * h)
    fd_q = (period_T(PhasePoint(p, q + h)).value
            - period_T(PhasePoint(p, q - h)).value) / (2.0 * h)
    assert abs(g.dT_dp - fd_p) / abs(fd_p) <= 1e-5
    assert abs(g.dT_dq - fd_q) / abs(fd_q) <= 1e-5


def test_gradient_T0_matches_finite_differences():
    p, q, h = 0.45, -0.03, 1e-6
    g = grad_T0(PhasePoint(p, q))
    fd_p = (period_T0(PhasePoint(p + h, q)).value
            - period_T0(PhasePoint(p - h, q)).value) / (2.0 * h)
    fd_q = (period_T0(PhasePoint(p, q + h)).value
            - period_T0(PhasePoint(p, q - h)).value) / (2.0 * h)
    assert abs(g.dT_dp - fd_p) / abs(fd_p) <= 1e-4
    assert abs(g.dT_dq - fd_q) / abs(fd_q) <= 1e-4


def test_gradients_need_interior_points():
    with pytest.raises(InvalidDomain):
        grad_T(PhasePoint(0.5, 0.0))
    with pytest.raises(InvalidDomain):
        grad_T0(PhasePoint(0.5, 0.0))
    with pytest.raises(InvalidDomain):
        grad_T(PhasePoint(1.0, -0.5))


def test_interval_slope_matches_finite_differences():
    p, h = 0.5523884970850482, 1e-6
    fd = (period_T(PhasePoint(p + h, 0.0)).value
          - period_T(PhasePoint(p - h, 0.0)).value) / (2.0 * h)
    assert abs(interval_period_slope(p) - fd) / abs(fd) <= 1e-8


def test_arclength_from_turning_consistent_with_lift():
    pt = PhasePoint(0.9, -0.05)
    p0 = turning_point_p0(pt)
    direct = arclength_from_turning(pt.p, p0)
    assert math.isclose(direct, period_T0(pt).value, rel_tol=1e-11)
    with pytest.raises(InvalidDomain):
        arclength_from_turning(0.5, 0.7)


def test_asymptotic_T_closed_form():
    # p - q = 12 e^{-x0} zeroes the logarithm
    gap = 12.0 * math.exp(-X0)
    assert abs(asymptotic_T(PhasePoint(0.5, 0.5 - gap))) <= 1e-14
    want = math.log(12.0 / 2e-4) - X0
    assert math.isclose(asymptotic_T(PhasePoint(1e-4, -1e-4)), want,
                        rel_tol=1e-14)
    # the saddle-trace parameterization recovers the length exactly
    L = 10.0
    pl = 6.0 * math.exp(-L - X0)
    assert math.isclose(asymptotic_T(PhasePoint(pl, -pl)), L, rel_tol=1e-13)


def test_near_saddle_residual_is_linear_in_p():
    assert abs(period_T(PhasePoint(1e-3, -1e-3)).value
               - asymptotic_T(PhasePoint(1e-3, -1e-3))) <= 2e-2
    devs = [abs(period_T(PhasePoint(p, -p)).value
                - asymptotic_T(PhasePoint(p, -p))) / p
            for p in (1e-2, 1e-3, 1e-4)]
    assert max(devs) / min(devs) <= 1.05  # empirically ~0.50 each


@pytest.mark.parametrize("L", [6.0, 8.0, 10.0])
def test_homoclinic_trace_law(L):
    p = 6.0 * math.exp(-L - X0)
    q = -math.sqrt(well(p))
    assert abs(period_T(PhasePoint(p, q)).value - L) <= 10.0 * math.exp(-L)


def test_center_limit_values():
    t, t0 = center_limits(-1.0)
    assert math.isclose(t, math.pi / 4.0, rel_tol=1e-15)
    assert math.isclose(t0, math.pi / 4.0, rel_tol=1e-15)
    t, t0 = center_limits(-2.0)
    assert math.isclose(t, math.asin(1.0 / math.sqrt(5.0)), rel_tol=1e-15)
    t, t0 = center_limits(-1e-9)
    assert math.isclose(t, math.pi / 2.0, rel_tol=1e-9)
    assert t0 <= 2e-9


@pytest.mark.parametrize("Q", [-0.5, -1.0, -2.0])
def test_periods_approach_center_limits(Q):
    bp = 1e-3
    pt = PhasePoint(1.0 - bp, Q * bp)
    lim_t, lim_t0 = center_limits(Q)
    assert abs(period_T(pt).value - lim_t) <= 5e-3
    assert abs(period_T0(pt).value - lim_t0) <= 5e-3
    assert abs(period_T(pt).value + period_T0(pt).value - math.pi / 2.0) <= 5e-3


def test_very_near_center_uses_closed_form():
    pt = PhasePoint(1.0 - 1e-7, -2e-7)
    assert math.isclose(period_T(pt).value, math.asin(1.0 / math.sqrt(5.0)),
                        rel_tol=1e-6)
    total = period_T(pt).value + period_T0(pt).value
    assert math.isclose(total, math.pi / 2.0, rel_tol=1e-12)


def test_interval_boundary_period():
    assert abs(period_T(PhasePoint(1.0 - 1e-4, 0.0)).value - math.pi / 2.0) <= 5e-3


@settings(max_examples=80, deadline=None)
@given(p=st.floats(0.02, 0.98), q=st.floats(-2.5, -0.01))
def test_flow_translation_identity_T(p, q):
    # moving the base point along the flow changes T by exactly the
    # traversed arclength: q dT/dp + p(1-p) dT/dq = 1
    g = grad_T(PhasePoint(p, q))
    assert abs(q * g.dT_dp + p * (1.0 - p) * g.dT_dq - 1.0) <= 1e-8
    assert g.dT_dp < 0.0
    assert g.dT_dq > 0.0


@settings(max_examples=80, deadline=None)
@given(p=st.floats(0.02, 0.98), frac=st.floats(0.05, 0.95))
def test_flow_translation_identity_T0(p, frac):
    # the turning point is invariant along the orbit, so the same flow
    # derivative gives -1 for the arclength measured from it
    q = -math.sqrt(well(p)) * frac
    g = grad_T0(PhasePoint(p, q))
    assert abs(q * g.dT_dp + p * (1.0 - p) * g.dT_dq + 1.0) <= 1e-8
    assert g.dT_dq < 0.0
    if p <= 0.5:
        assert g.dT_dp < 0.0


@settings(max_examples=50, deadline=None)
@given(p=st.floats(0.02, 0.98), frac=st.floats(0.05, 0.95))
def test_periods_are_positive_and_finite(p, frac):
    q = -math.sqrt(well(p)) * frac
    t = period_T(PhasePoint(p, q)).value
    t0 = period_T0(PhasePoint(p, q)).value
    assert 0.0 < t < 30.0
    assert 0.0 <= t0 < 30.0
