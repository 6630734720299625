"""Arc lengths along phase-plane orbits and their gradients.

Two arc-length functions drive the whole ground-state construction, both
measured along orbits of w'' = w - w^2 with v = w' and v^2 = E + A(w):

    T(p, q)   from the section w = 1 (crossing with v = q_tilde < 0)
              down to the point (p, q), q <= 0:        int_p^1 du / v
    T0(p, q)  from the inner turning point (p0, 0)
              up to (p, q):                            int_{p0}^p du / v

T is the length a stem of boundary data (p, q) must have; T0 is the loop
half-length.  Both integrals have inverse-square-root endpoint behavior at
turning points, removed by the substitutions

    u = p  + (1 - p)  s^2        for T,
    u = p0 + (p - p0) s^2        for T0,

after which the integrands are analytic on [0, 1]; the remaining quadrature
is plain adaptive Gauss-Kronrod.  All well differences are evaluated in
factored form (see phaseplane), so the integrands keep full precision when p
approaches 1 (orbits shrinking onto the center) and when E approaches 0 from
below (loops hugging the homoclinic).

Gradients use the renormalized closed forms

    (E + 1/3) dT/dp  = -p (1-p) I1 + q
    (E + 1/3) dT/dq  =  q I1 + (1-p)(1+2p) / (3p)
    (E + 1/3) dT0/dp = -p (1-p) I2 - q
    (E + 1/3) dT0/dq =  q I2 - (1-p)(1+2p) / (3p)

with I1 = int_p^1 (1-u^2)/(3 u^2 v) du and I2 the same integrand over
[p0, p].  These follow from differentiating under the integral sign and
integrating the boundary-singular parts exactly; unlike the raw derivative
integrals they stay finite and numerically benign up to the homoclinic.

Useful sanity identities, exercised by the test suite:

    q dT/dp + p (1-p) dT/dq = 1                        (transport identity)
    T(p, q) -> -ln((p - q) / 12) - x0 + O(p)           (saddle asymptotics)
    T -> arcsin(1 / sqrt(1 + Q^2)) and T0 -> pi/2 - T  (center limits along
                                                        q = Q (1 - p))

where x0 = 2 arccosh(sqrt(3/2)) marks where the homoclinic profile
(3/2) sech^2((x + x0)/2) crosses 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import InvalidDomain
from .phaseplane import PhasePoint, turning_point_pair

__all__ = [
    "HOMOCLINIC_OFFSET",
    "PeriodValue",
    "PeriodGradient",
    "period_T",
    "period_T0",
    "grad_T",
    "grad_T0",
    "interval_period_slope",
    "arclength_from_turning",
    "asymptotic_T",
    "center_limits",
]

# offset x0 = 2 arccosh(sqrt(3/2)): the homoclinic profile crosses w = 1
# at distance x0 before its peak
HOMOCLINIC_OFFSET = 2.0 * math.acosh(math.sqrt(1.5))

_TWO_THIRDS = 2.0 / 3.0


@dataclass(frozen=True)
class PeriodValue:
    value: float
    estimated_quadrature_error: float


@dataclass(frozen=True)
class PeriodGradient:
    dT_dp: float
    dT_dq: float


def _quad(f, tol: float) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod on [0, 1] with an honest error estimate."""
    epsrel = 1.5e-14  # QUADPACK floor is ~50 eps
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, 0.0, 1.0, epsabs=0.5 * tol,
                                      epsrel=epsrel, limit=200)
        except integrate.IntegrationWarning:
            # retry with a deeper subdivision budget, keep whatever it reports
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err = integrate.quad(f, 0.0, 1.0, epsabs=0.5 * tol,
                                          epsrel=epsrel, limit=1000)
    return val, err


def _bracket(a: float, b: float) -> float:
    """(u+p) - (2/3)(u^2+up+p^2) written through a = 1-u, b = 1-p."""
    return a + b - _TWO_THIRDS * (a * a + a * b + b * b)


def _check_not_center(pt: PhasePoint) -> None:
    if pt.p == 1.0 and pt.q == 0.0:
        raise InvalidDomain("(p, q) = (1, 0) is the center; arc length is "
                            "undefined there (limits depend on the direction)")


def period_T(pt: PhasePoint, tol: float = 1e-10) -> PeriodValue:
    """Arc length from the section w = 1 down to (p, q)."""
    _check_not_center(pt)
    p, q = pt.p, pt.q
    if p == 1.0:
        return PeriodValue(0.0, 0.0)
    bp = 1.0 - p
    if bp < 1e-6:
        # quadrature endpoints collide this close to the center; the leading
        # circular-orbit form is accurate to O(1-p)
        hyp = math.hypot(bp, q)
        return PeriodValue(math.asin(bp / hyp), 4.0 * bp)
    q2 = q * q

    def f(s):
        s2 = s * s
        a = bp * (1.0 - s2)  # 1 - u
        v2 = q2 + bp * s2 * _bracket(a, bp)
        return 2.0 * bp * s / math.sqrt(v2)

    val, err = _quad(f, tol)
    return PeriodValue(val, err)


def period_T0(pt: PhasePoint, tol: float = 1e-10) -> PeriodValue:
    """Arc length from the inner turning point up to (p, q).

    Raises OrbitNotClosed when the orbit energy is >= 0 (no turning point).
    """
    _check_not_center(pt)
    p0, b0 = turning_point_pair(pt)
    bp = 1.0 - pt.p
    if bp < 1e-6:
        # circular-orbit limit, complement of the period_T delegation
        hyp = math.hypot(bp, pt.q)
        return PeriodValue(math.asin(-pt.q / hyp), 4.0 * bp)
    # p - p0 through whichever side is exact: 1-p is exact for p >= 1/2
    d = (pt.p - p0) if p0 <= 0.5 else (b0 - (1.0 - pt.p))
    if d <= 0.0:
        return PeriodValue(0.0, 0.0)
    sqrt_d = math.sqrt(d)

    def f(s):
        a = b0 - d * s * s  # 1 - u
        return 2.0 * sqrt_d / math.sqrt(_bracket(a, b0))

    val, err = _quad(f, tol)
    return PeriodValue(val, err)


def arclength_from_turning(p: float, p0: float, tol: float = 1e-10) -> float:
    """T0 with the turning point given directly instead of through (p, q).

    Used by solvers that parameterize loop orbits by p0: it avoids the
    lossy round trip p0 -> q -> energy -> p0 when the orbit hugs the
    homoclinic loop and A(p) - A(p0) cancels catastrophically.
    """
    if not 0.0 < p0 <= p <= 1.0:
        raise InvalidDomain(f"need 0 < p0 <= p <= 1, got p0={p0}, p={p}")
    b0 = 1.0 - p0
    d = p - p0
    if d == 0.0:
        return 0.0
    sqrt_d = math.sqrt(d)

    def f(s):
        return 2.0 * sqrt_d / math.sqrt(_bracket(b0 - d * s * s, b0))

    return _quad(f, tol)[0]


def _require_interior(pt: PhasePoint) -> None:
    if pt.q == 0.0:
        raise InvalidDomain("gradients need q < 0 strictly")
    if pt.p == 1.0:
        raise InvalidDomain("gradients need p < 1 strictly")


def _qt2(pt: PhasePoint) -> float:
    """E + 1/3 = q^2 + (1-p)^2 (1+2p)/3, positive to rounding."""
    return pt.q * pt.q + (1.0 - pt.p) ** 2 * (1.0 + 2.0 * pt.p) / 3.0


def grad_T(pt: PhasePoint, tol: float = 1e-10) -> PeriodGradient:
    """Analytic gradient of period_T; requires q < 0 and p < 1.

    The q = 0 section is served by interval_period_slope instead, which
    integrates the renormalized form that stays regular there.
    """
    _require_interior(pt)
    p, q = pt.p, pt.q
    bp = 1.0 - p
    q2 = q * q

    def f(s):
        s2 = s * s
        a = bp * (1.0 - s2)  # 1 - u
        u = 1.0 - a
        v = math.sqrt(q2 + bp * s2 * _bracket(a, bp))
        return (a * (2.0 - a)) / (3.0 * u * u * v) * 2.0 * bp * s

    i1, _ = _quad(f, tol)
    qt2 = _qt2(pt)
    dp = (-p * bp * i1 + q) / qt2
    dq = (q * i1 + bp * (1.0 + 2.0 * p) / (3.0 * p)) / qt2
    return PeriodGradient(dp, dq)


def interval_period_slope(p: float, tol: float = 1e-10) -> float:
    """d/dp of T(p, 0), the slope driving the interval dichotomy.

    On the q = 0 section v vanishes at the lower endpoint, but dividing the
    I1 integrand by v's sqrt(s) factor leaves a smooth integrand, so the
    slope is available right where grad_T's domain ends.
    """
    if not 0.0 < p < 1.0:
        raise InvalidDomain(f"interval slope needs 0 < p < 1, got {p}")
    bp = 1.0 - p

    def f(s):
        a = bp * (1.0 - s * s)  # 1 - u
        u = 1.0 - a
        return (a * (2.0 - a)) / (3.0 * u * u) \
            * 2.0 * bp / math.sqrt(bp * _bracket(a, bp))

    i1 = _quad(f, tol)[0]
    qt2 = bp * bp * (1.0 + 2.0 * p) / 3.0
    return -p * bp * i1 / qt2


def grad_T0(pt: PhasePoint, tol: float = 1e-10) -> PeriodGradient:
    """Analytic gradient of period_T0; requires q < 0 and a closed orbit."""
    _require_interior(pt)
    p, q = pt.p, pt.q
    p0, b0 = turning_point_pair(pt)
    d = (p - p0) if p0 <= 0.5 else (b0 - (1.0 - p))
    sqrt_d = math.sqrt(max(d, 0.0))

    def f(s):
        a = b0 - d * s * s  # 1 - u
        u = 1.0 - a
        return (a * (2.0 - a)) / (3.0 * u * u) * 2.0 * sqrt_d \
            / math.sqrt(_bracket(a, b0))

    i2, _ = _quad(f, tol)
    qt2 = _qt2(pt)
    bp = 1.0 - p
    dp = (-p * bp * i2 - q) / qt2
    dq = (q * i2 - bp * (1.0 + 2.0 * p) / (3.0 * p)) / qt2
    return PeriodGradient(dp, dq)


def asymptotic_T(pt: PhasePoint) -> float:
    """Saddle-regime law -ln((p - q)/12) - x0; accurate to O(p) as p -> 0."""
    return -math.log((pt.p - pt.q) / 12.0) - HOMOCLINIC_OFFSET


def center_limits(Q: float) -> tuple[float, float]:
    """Limits of (T, T0) along the ray q = Q (1 - p) into the center, Q <= 0.

    They sum to pi/2 for every slope Q.
    """
    if Q > 0.0 or math.isnan(Q):
        raise InvalidDomain(f"ray slope must be <= 0, got {Q}")
    t = math.asin(1.0 / math.sqrt(1.0 + Q * Q))
    return t, math.pi / 2.0 - t
