"""Time integration of u_t = u'' + u(1-u) on a metric graph.

Semi-implicit scheme on the lumped P1 discretization: the Laplacian is
treated implicitly, the reaction explicitly,

    (M + dt A) u+ = M (u + dt u(1-u)).

With dt(2C - 1) <= 1, C = max(1, sup u0), the update map is order
preserving: g(u) = u + dt u(1-u) is nondecreasing on [0, C] and
(M + dt A) is an M-matrix, so its inverse is entrywise nonnegative.
Consequences used here and checked at runtime:

* nonnegativity is preserved,
* sup u_k stays below the explicit logistic iterate started at sup u0
  (constants are discrete supersolutions since the stiffness rows sum
  to >= 0 after Dirichlet elimination),
* [0, 1] is invariant.

The free energy H(u) = int (u'^2 - u^2)/2 + u^3/3 is monitored every
step; the step size is halved (and the step retried) whenever H fails
to decrease within a small slack, so accepted trajectories are honest
gradient-flow descents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ComparisonViolated,
    InvalidDomain,
    LinearSolveFailure,
    NegativeInitialData,
)
from .mesh import Field, free_energy

__all__ = [
    "Terminal",
    "EvolutionTrace",
    "step",
    "run_to_attractor",
    "comparison_monitor",
    "stable_dt",
    "free_energy",
]

# slack for the per-step energy monotonicity test
ENERGY_SLACK = 1e-10
# smallest admissible time step before the run is declared stuck
DT_FLOOR = 1e-12


class Terminal(Enum):
    """How a time integration ended."""

    CONVERGED_TRIVIAL = "ConvergedTrivial"
    CONVERGED_NONTRIVIAL = "ConvergedNontrivial"
    MAX_STEPS_REACHED = "MaxStepsReached"


@dataclass
class EvolutionTrace:
    """Per-step history of a run plus the terminal state.

    times, energy, sup_norm and supersolution have one entry per accepted
    state (including t = 0); dt_history has one entry per accepted step.
    The supersolution column is the explicit logistic iterate dominating
    sup u, the quantity comparison_monitor checks.
    """

    times: np.ndarray
    energy: np.ndarray
    sup_norm: np.ndarray
    min_value: np.ndarray
    supersolution: np.ndarray
    dt_history: np.ndarray
    terminal: Terminal
    final: Field

    @property
    def steps(self) -> int:
        return len(self.dt_history)


def stable_dt(sup_u0: float, dt: float) -> float:
    """Largest step <= dt keeping the update monotone for data below sup_u0."""
    c = max(1.0, sup_u0)
    return min(dt, 0.99 / (2.0 * c - 1.0))


def _factor(mesh, dt: float):
    a, m = mesh.reduced_operators()
    b = (sp.diags(m) + dt * a).tocsc()
    try:
        return spla.splu(b), m
    except RuntimeError as exc:
        raise LinearSolveFailure(f"implicit step factorization failed: {exc}") from exc


def _advance(lu, m, u_free, dt: float) -> np.ndarray:
    rhs = m * (u_free + dt * u_free * (1.0 - u_free))
    return lu.solve(rhs)


def step(field: Field, dt: float) -> Field:
    """One semi-implicit step; standalone, factorizes the operator anew."""
    if not (dt > 0.0) or not math.isfinite(dt):
        raise InvalidDomain(f"time step must be positive and finite, got {dt}")
    mesh = field.mesh
    lu, m = _factor(mesh, dt)
    free = mesh.free_nodes
    out = field.copy()
    out.values[free] = _advance(lu, m, field.values[free], dt)
    out.pin_dirichlet()
    return out


def run_to_attractor(field0: Field, dt: float = 0.1, max_t: float = 500.0,
                     tol: float = 1e-9, max_steps: int = 200_000) -> EvolutionTrace:
    """Integrate until the discrete time derivative stalls below tol.

    Convergence means ||u+ - u||_inf / dt <= tol; the terminal state is
    classified trivial when its sup norm is below 10 tol.  The step size
    only shrinks: it is halved whenever a trial step breaks positivity,
    the logistic comparison bound, or energy monotonicity, and the step
    is retried from the same state.
    """
    u0 = np.asarray(field0.values, dtype=float)
    if not np.all(np.isfinite(u0)):
        raise InvalidDomain("initial data contains non-finite values")
    if u0.min() < 0.0:
        raise NegativeInitialData(
            f"initial data attains {u0.min():.6g} < 0; comparison arguments "
            "require nonnegative data")

    mesh = field0.mesh
    field = field0.copy()
    field.pin_dirichlet()
    free = mesh.free_nodes

    sup0 = field.sup_norm
    dt = stable_dt(sup0, dt)
    lu, m = _factor(mesh, dt)

    t = 0.0
    c = sup0
    h = free_energy(field)
    times = [0.0]
    energies = [h]
    sups = [sup0]
    mins = [field.min_value()]
    supers = [c]
    dts: list[float] = []
    terminal = Terminal.MAX_STEPS_REACHED

    while len(dts) < max_steps and t < max_t:
        u_free = field.values[free]
        u_new = _advance(lu, m, u_free, dt)
        c_new = c + dt * c * (1.0 - c)
        slack = 1e-9 * max(1.0, c)
        ok = (u_new.min() >= -slack and u_new.max() <= c_new + slack)
        if ok:
            trial = field.copy()
            trial.values[free] = u_new
            h_new = free_energy(trial)
            ok = h_new <= h + ENERGY_SLACK
        if not ok:
            dt *= 0.5
            if dt < DT_FLOOR:
                raise ComparisonViolated(
                    "time step collapsed below the floor while enforcing "
                    f"positivity/comparison/energy bounds at t={t:.6g}")
            lu, m = _factor(mesh, dt)
            continue

        diff = float(np.max(np.abs(u_new - u_free)))
        field = trial
        t += dt
        c = c_new
        h = h_new
        times.append(t)
        energies.append(h)
        sups.append(field.sup_norm)
        mins.append(field.min_value())
        supers.append(c)
        dts.append(dt)
        if diff / dt <= tol:
            if field.sup_norm <= 10.0 * tol:
                terminal = Terminal.CONVERGED_TRIVIAL
            else:
                terminal = Terminal.CONVERGED_NONTRIVIAL
            break

    return EvolutionTrace(
        times=np.asarray(times),
        energy=np.asarray(energies),
        sup_norm=np.asarray(sups),
        min_value=np.asarray(mins),
        supersolution=np.asarray(supers),
        dt_history=np.asarray(dts),
        terminal=terminal,
        final=field,
    )


def comparison_monitor(trace: EvolutionTrace, slack: float = 1e-9) -> None:
    """Raise unless 0 <= u <= logistic supersolution throughout the run.

    The upper bound implies u <= max(1, sup u0) at all times since the
    logistic iterates stay on their initial side of 1.
    """
    tol = slack * max(1.0, float(trace.supersolution.max(initial=1.0)))
    excess = trace.sup_norm - trace.supersolution
    worst = int(np.argmax(excess))
    if excess[worst] > tol:
        raise ComparisonViolated(
            f"sup norm {trace.sup_norm[worst]:.12g} exceeds the logistic "
            f"bound {trace.supersolution[worst]:.12g} at t={trace.times[worst]:.6g}")
    low = int(np.argmin(trace.min_value))
    if trace.min_value[low] < -tol:
        raise ComparisonViolated(
            f"minimum value {trace.min_value[low]:.12g} drops below 0 "
            f"at t={trace.times[low]:.6g}")
