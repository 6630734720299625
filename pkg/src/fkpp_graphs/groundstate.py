"""Ground states on interval and flower graphs via the period system.

A strictly positive steady state of u_t = u'' + u(1-u) on a flower graph is
determined by N+1 numbers: the common vertex value through p = 1 - u(c) and
one slope parameter q_j < 0 per loop.  Writing w = 1 - u, each edge carries
an orbit of w'' = w - w^2; matching arc lengths to edge lengths gives

    T(p, 2*sum q_j) = L        (stem, from the Dirichlet section w = 1)
    T0(p, q_j)      = L_j      (loop j, half-length from the turning point)

with the stem slope tied to the loop slopes by the Kirchhoff flux balance.
The system is solved by a damped Newton method with the analytic period
gradients; the Jacobian is nonsingular on the admissible set (its
determinant has sign (-1)^(N+1)), so damping alone is enough.

Deep in the region (long edges) the loop equations become ill conditioned
in q_j: the orbit hugs the homoclinic loop and T0 moves by ~1e-8 per ulp of
q_j.  Two mitigations: initial guesses come from one-dimensional presolves
parameterized by the turning point (log-space bisection, uniformly well
conditioned), and convergence is declared against per-row floors

    floor_i = 8 eps (|target_i| + sum_k |z_k J_ik|)

which measure the best residual representable at the working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BelowThreshold,
    InvalidDomain,
    NewtonStalled,
    OrbitNotClosed,
    OutsideRegion,
    StepTooLarge,
)
from .graph import FlowerSpec
from .period import (
    HOMOCLINIC_OFFSET,
    arclength_from_turning,
    grad_T,
    grad_T0,
    interval_period_slope,
    period_T,
    period_T0,
)
from .phaseplane import PhasePoint, energy, q_tilde, turning_point_pair, well
from .spectral import lambda0_flower

__all__ = [
    "GroundStateSolution",
    "JacobianReport",
    "solve_interval",
    "solve_flower",
    "jacobian_report",
    "reconstruct_profile",
    "proximity_check",
    "energy_of",
]

EPS = float(np.finfo(float).eps)
THRESHOLD_LENGTH = math.pi / 2.0


@dataclass
class GroundStateSolution:
    """Solved period-system parameters plus sampled profiles."""

    spec: FlowerSpec
    p: float
    q_loops: tuple[float, ...]
    newton_iterations: int
    residuals: dict
    convergence_floor: float
    profiles: dict | None = None   # edge_id -> (x, u) sample arrays
    slopes: dict | None = None     # edge_id -> du/dx sample array

    @property
    def q_stem(self) -> float:
        return 2.0 * sum(self.q_loops)

    @property
    def stem_energy(self) -> float:
        return energy(self.p, self.q_stem)

    def loop_energies(self) -> tuple[float, ...]:
        return tuple(energy(self.p, q) for q in self.q_loops)

    def loop_turning_points(self) -> tuple[float, ...]:
        return tuple(turning_point_pair(PhasePoint(self.p, q))[0]
                     for q in self.q_loops)

    @property
    def sup_u(self) -> float:
        tp = self.loop_turning_points()
        return 1.0 - (min(tp) if tp else self.p)


def _admissible(p: float, qs) -> bool:
    if not 0.0 < p < 1.0:
        return False
    for q in qs:
        if not q < 0.0 or not energy(p, q) < 0.0:
            return False
    return True


def _system(spec: FlowerSpec, z: np.ndarray, quad_tol: float) -> np.ndarray:
    p, qs = z[0], z[1:]
    out = np.empty(z.size)
    out[0] = period_T(PhasePoint(p, 2.0 * qs.sum()), quad_tol).value - spec.stem
    for j, (q, half) in enumerate(zip(qs, spec.loop_halves), start=1):
        out[j] = period_T0(PhasePoint(p, q), quad_tol).value - half
    return out


def _jacobian(p: float, qs, quad_tol: float) -> np.ndarray:
    n = len(qs)
    J = np.zeros((n + 1, n + 1))
    g = grad_T(PhasePoint(p, 2.0 * float(np.sum(qs))), quad_tol)
    J[0, 0] = g.dT_dp
    J[0, 1:] = 2.0 * g.dT_dq
    for j, q in enumerate(qs, start=1):
        g0 = grad_T0(PhasePoint(p, q), quad_tol)
        J[j, 0] = g0.dT_dp
        J[j, j] = g0.dT_dq
    return J


def _floors(J: np.ndarray, z: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return 8.0 * EPS * (np.abs(targets) + np.abs(J) @ np.abs(z))


def _loop_q_presolve(p: float, half: float, quad_tol: float = 1e-12) -> float:
    """q < 0 with T0(p, q) = half, via log-space bisection on the turning point.

    T0 is strictly decreasing in p0 at fixed p (from 'infinity' on the
    homoclinic side to 0 at p0 = p), so the bracket is trivial and the
    conditioning is uniform even when the final q is pinned against
    -sqrt(A(p)) to the last ulp.
    """
    ap = well(p)

    def mismatch(y):
        return arclength_from_turning(p, math.exp(y), quad_tol) - half

    y_hi = math.log(p) - 1e-12
    if mismatch(y_hi) > 0.0:
        # even the shortest orbits are longer than the target: p is huge
        # relative to half, the root sits essentially at p0 = p
        y = y_hi
    else:
        y_lo = math.log(p) - 5.0
        for _ in range(140):
            if mismatch(y_lo) > 0.0:
                break
            y_lo -= 5.0
        else:
            raise OrbitNotClosed(
                f"no loop orbit of half-length {half} through p = {p}")
        y = brentq(mismatch, y_lo, y_hi, xtol=1e-13, rtol=4.0 * EPS, maxiter=300)
    p0 = math.exp(y)
    return -math.sqrt(max(ap - well(p0), 0.0))


def _newton(spec: FlowerSpec, z0: np.ndarray, tol: float, max_iter: int,
            quad_tol: float):
    """Damped Newton; returns (z, F, floors, iterations, converged)."""
    targets = np.array([spec.stem, *spec.loop_halves])
    z = np.asarray(z0, dtype=float).copy()
    F = _system(spec, z, quad_tol)
    floors = np.full_like(F, 8.0 * EPS)
    for it in range(1, max_iter + 1):
        J = _jacobian(z[0], z[1:], quad_tol)
        floors = _floors(J, z, targets)
        if np.all(np.abs(F) <= np.maximum(tol, floors)):
            return z, F, floors, it - 1, True
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return z, F, floors, it, False
        scale = 1.0
        accepted = False
        best = np.max(np.abs(F))
        while scale >= 2.0 ** -30:
            zt = z + scale * step
            if _admissible(zt[0], zt[1:]):
                Ft = _system(spec, zt, quad_tol)
                worst = np.max(np.abs(Ft))
                if worst <= (1.0 - 1e-4 * scale) * best or \
                        np.all(np.abs(Ft) <= np.maximum(tol, floors)):
                    z, F = zt, Ft
                    accepted = True
                    break
            scale *= 0.5
        if not accepted:
            return z, F, floors, it, False
    J = _jacobian(z[0], z[1:], quad_tol)
    floors = _floors(J, z, targets)
    return z, F, floors, max_iter, bool(np.all(np.abs(F) <= np.maximum(tol, floors)))


def _initial_candidates(spec: FlowerSpec, quad_tol: float):
    n = spec.n_loops
    base = 12.0 / (1.0 + 2.0 * n) * math.exp(-(spec.stem + HOMOCLINIC_OFFSET))
    base = min(max(base, 1e-8), 0.9)
    for scale in (1.0, 0.5, 2.0, 0.25, 4.0, 0.0625):
        p = min(max(base * scale, 1e-9), 0.97)
        try:
            qs = [_loop_q_presolve(p, half, quad_tol) for half in spec.loop_halves]
        except (OrbitNotClosed, ValueError):
            continue
        if _admissible(p, qs):
            yield np.array([p, *qs])


def _package(spec: FlowerSpec, z: np.ndarray, F: np.ndarray,
             floors: np.ndarray, iterations: int) -> GroundStateSolution:
    names = ["stem"] + [f"loop{j}" for j in range(1, spec.n_loops + 1)]
    residuals = {"period_residuals": dict(zip(names, np.abs(F).tolist()))}
    sol = GroundStateSolution(
        spec=spec,
        p=float(z[0]),
        q_loops=tuple(float(q) for q in z[1:]),
        newton_iterations=iterations,
        residuals=residuals,
        convergence_floor=float(np.max(floors)),
    )
    reconstruct_profile(sol, dx=_default_dx(spec))
    return sol


def _default_dx(spec: FlowerSpec, tol: float = 1e-8) -> float:
    longest = max([spec.stem] + [h for h in spec.loop_halves])
    return min(1e-2, (tol * math.exp(-longest)) ** 0.25)


def solve_interval(L: float, tol: float = 1e-10) -> GroundStateSolution:
    """Positive steady state on [0, L], Dirichlet at 0 and Neumann at L.

    The Neumann end is the orbit's turning point, so the single unknown p
    solves T(p, 0) = L; T(., 0) decreases strictly from infinity to pi/2,
    hence existence and uniqueness exactly for L > pi/2.
    """
    if not L > THRESHOLD_LENGTH:
        raise BelowThreshold(
            f"interval length {L} <= pi/2; the only nonnegative steady "
            "state is u = 0")
    quad_tol = min(1e-11, 0.1 * tol)

    def mismatch(p):
        return period_T(PhasePoint(p, 0.0), quad_tol).value - L

    lo = min(0.5, 6.0 * math.exp(-(L + HOMOCLINIC_OFFSET)))
    for _ in range(60):
        if mismatch(lo) > 0.0:
            break
        lo *= 0.5
    hi = 1.0 - 1e-15
    p, info = brentq(mismatch, lo, hi, xtol=1e-15, rtol=4.0 * EPS,
                     maxiter=200, full_output=True)
    iterations = info.iterations
    F = mismatch(p)
    for _ in range(3):
        if abs(F) <= tol:
            break
        slope = interval_period_slope(p, quad_tol)
        p = min(max(p - F / slope, 1e-300), 1.0 - 1e-16)
        F = mismatch(p)
        iterations += 1
    slope = interval_period_slope(p, quad_tol)
    floor = 8.0 * EPS * (L + abs(p * slope))
    spec = FlowerSpec(stem=L)
    sol = GroundStateSolution(
        spec=spec,
        p=float(p),
        q_loops=(),
        newton_iterations=iterations,
        residuals={"period_residuals": {"stem": abs(F)}},
        convergence_floor=floor,
    )
    reconstruct_profile(sol, dx=_default_dx(spec))
    return sol


def solve_flower(spec: FlowerSpec, tol: float = 1e-10, max_iter: int = 60,
                 init=None) -> GroundStateSolution:
    """Positive ground state on a flower graph by damped Newton.

    ``init`` optionally supplies a starting point (p, (q_1, ..., q_N)); by
    default the trace asymptotics seed p and per-loop presolves seed q_j,
    with rescaled retries and geometric continuation from an inflated
    (easier) geometry as fallbacks.
    """
    if spec.n_loops == 0:
        return solve_interval(spec.stem, tol)
    lam = lambda0_flower(spec).lambda0
    if lam >= 1.0:
        raise OutsideRegion(
            f"lambda0 = {lam:.12g} >= 1 for stem {spec.stem}, loops "
            f"{tuple(2 * h for h in spec.loop_halves)}: only u = 0 exists")
    quad_tol = min(1e-11, 0.01 * tol)

    best = None
    candidates = []
    if init is not None:
        p0, qs0 = init
        candidates.append(np.array([p0, *qs0], dtype=float))
    if init is None or not _admissible(candidates[0][0], candidates[0][1:]):
        candidates = []
    attempts = candidates or _initial_candidates(spec, quad_tol)
    for z0 in attempts:
        z, F, floors, its, ok = _newton(spec, z0, tol, max_iter, quad_tol)
        if ok:
            return _package(spec, z, F, floors, its)
        if best is None or np.max(np.abs(F)) < np.max(np.abs(best[1])):
            best = (z, F, floors, its)

    if init is None:
        sol = _continuation(spec, tol, max_iter, quad_tol)
        if sol is not None:
            return sol

    z, F, floors, its = best if best is not None else \
        (np.zeros(spec.n_loops + 1), np.full(spec.n_loops + 1, np.inf),
         np.zeros(spec.n_loops + 1), 0)
    raise NewtonStalled(
        f"Newton did not reach tol {tol} (best residual {np.max(np.abs(F)):.3e})",
        best=(float(z[0]), tuple(float(q) for q in z[1:])),
        diagnostics={
            "residuals": np.abs(F).tolist(),
            "floors": floors.tolist(),
            "iterations": its,
        })


def _continuation(spec: FlowerSpec, tol: float, max_iter: int,
                  quad_tol: float) -> GroundStateSolution | None:
    """Walk in from an inflated geometry where the asymptotic seed is safe."""
    inflate = 2.0
    easy = FlowerSpec(stem=spec.stem + inflate,
                      loop_halves=tuple(h + inflate for h in spec.loop_halves))
    z = None
    for z0 in _initial_candidates(easy, quad_tol):
        zt, F, floors, _, ok = _newton(easy, z0, tol, max_iter, quad_tol)
        if ok:
            z = zt
            break
    if z is None:
        return None
    # geometric approach: fraction of the inflation left after step k
    for k in list(range(1, 9)) + [None]:
        frac = 0.5 ** k if k is not None else 0.0
        stage = FlowerSpec(
            stem=spec.stem + inflate * frac,
            loop_halves=tuple(h + inflate * frac for h in spec.loop_halves))
        z, F, floors, its, ok = _newton(stage, z, tol, max_iter, quad_tol)
        if not ok:
            return None
    return _package(spec, z, F, floors, its)


@dataclass
class JacobianReport:
    matrix: np.ndarray
    determinant: float
    expected_sign: int
    sign_ok: bool


def jacobian_report(p: float, q_list, quad_tol: float = 1e-10) -> JacobianReport:
    """Period-system Jacobian at (p, q_1..q_N) with its sign check."""
    qs = list(q_list)
    if not _admissible(p, qs):
        raise InvalidDomain(
            f"(p, q) = ({p}, {qs}) is not an admissible flower state")
    J = _jacobian(p, qs, quad_tol)
    det = float(np.linalg.det(J))
    expected = -1 if len(qs) % 2 == 0 else 1   # sign (-1)^(N+1)
    return JacobianReport(J, det, expected, math.copysign(1.0, det) == expected)


def _rk4_path(w0: float, v0: float, length: float, n: int):
    """Integrate w'' = w - w^2 over [0, length] with n fixed RK4 steps."""
    h = length / n
    w = np.empty(n + 1)
    v = np.empty(n + 1)
    w[0], v[0] = w0, v0
    cw, cv = w0, v0
    half = 0.5 * h
    sixth = h / 6.0
    for k in range(n):
        a1w = cv
        a1v = cw * (1.0 - cw)
        w2 = cw + half * a1w
        a2w = cv + half * a1v
        a2v = w2 * (1.0 - w2)
        w3 = cw + half * a2w
        a3w = cv + half * a2v
        a3v = w3 * (1.0 - w3)
        w4 = cw + h * a3w
        a4w = cv + h * a3v
        a4v = w4 * (1.0 - w4)
        cw += sixth * (a1w + 2.0 * a2w + 2.0 * a3w + a4w)
        cv += sixth * (a1v + 2.0 * a2v + 2.0 * a3v + a4v)
        w[k + 1], v[k + 1] = cw, cv
    return w, v


def _edge_steps(length: float, dx: float, tol: float, max_steps: int) -> int:
    # near-saddle transits amplify local error by ~e^length
    cap = (tol * math.exp(-length)) ** 0.25
    h = max(min(dx, cap), length / max_steps)
    return max(2, int(math.ceil(length / h)))


def reconstruct_profile(solution: GroundStateSolution, dx: float,
                        tol: float = 1e-8,
                        max_steps_per_edge: int = 500_000) -> dict:
    """Sample u on every edge by integrating the orbit ODE.

    Stem: from the Dirichlet end (w, w') = (1, q_tilde).  Loops: from the
    midpoint turning point (p0_j, 0) toward the vertex, mirrored to the
    full loop, so evenness about the midpoint is exact.  End-state
    mismatches go into solution.residuals; a mismatch beyond 10*tol raises
    StepTooLarge (the fixed step dx was too coarse for these lengths).
    """
    p = solution.p
    spec = solution.spec
    profiles: dict = {}
    slopes: dict = {}

    qs = q_tilde(PhasePoint(p, solution.q_stem))
    n = _edge_steps(spec.stem, dx, tol, max_steps_per_edge)
    w, v = _rk4_path(1.0, qs, spec.stem, n)
    x = np.linspace(0.0, spec.stem, n + 1)
    profiles["stem"] = (x, 1.0 - w)
    slopes["stem"] = -v
    stem_w_err = abs(w[-1] - p)
    stem_v_err = abs(v[-1] - solution.q_stem)
    flux = v[-1]
    cont = stem_w_err
    mismatch = max(stem_w_err, stem_v_err)

    for j, (q, half) in enumerate(zip(solution.q_loops, spec.loop_halves), start=1):
        p0 = turning_point_pair(PhasePoint(p, q))[0]
        nh = _edge_steps(half, dx, tol, max_steps_per_edge)
        wh, vh = _rk4_path(p0, 0.0, half, nh)
        k = np.arange(2 * nh + 1)
        fold = np.abs(nh - k)
        xf = np.linspace(0.0, 2.0 * half, 2 * nh + 1)
        wf = wh[fold]
        # first half runs from the vertex down to the turning point
        vf = np.where(k <= nh, -vh[fold], vh[fold])
        profiles[f"loop{j}"] = (xf, 1.0 - wf)
        slopes[f"loop{j}"] = -vf
        cont = max(cont, abs(wh[-1] - p))
        mismatch = max(mismatch, abs(wh[-1] - p), abs(vh[-1] + q))
        flux += 2.0 * vh[-1]

    if mismatch > 10.0 * tol:
        raise StepTooLarge(
            f"profile end-state mismatch {mismatch:.3e} exceeds 10*tol = "
            f"{10.0 * tol:.3e}; reduce dx or raise max_steps_per_edge")

    solution.profiles = profiles
    solution.slopes = slopes
    solution.residuals["continuity"] = cont
    solution.residuals["kirchhoff_flux"] = abs(flux)
    solution.residuals["dirichlet"] = abs(profiles["stem"][1][0])
    return profiles


def proximity_check(solution: GroundStateSolution,
                    spec: FlowerSpec | None = None) -> float:
    """max |u - 1| over the loop subgraph (the stem pendant is excluded)."""
    spec = spec or solution.spec
    if spec.n_loops == 0:
        raise InvalidDomain("proximity is defined over loops; none present")
    if solution.profiles is None:
        reconstruct_profile(solution, dx=_default_dx(spec))
    worst = 0.0
    for j in range(1, spec.n_loops + 1):
        _, u = solution.profiles[f"loop{j}"]
        worst = max(worst, float(np.max(np.abs(u - 1.0))))
    return worst


def energy_of(solution: GroundStateSolution) -> float:
    """Free energy H(u) by composite trapezoid over the sampled profiles."""
    if solution.profiles is None or solution.slopes is None:
        reconstruct_profile(solution, dx=_default_dx(solution.spec))
    total = 0.0
    for edge_id, (x, u) in solution.profiles.items():
        du = solution.slopes[edge_id]
        integrand = 0.5 * (du * du - u * u) + u ** 3 / 3.0
        total += float(np.trapezoid(integrand, x))
    return total
