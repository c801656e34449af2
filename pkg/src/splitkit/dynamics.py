"""Classical symplectic maps for splitting schemes and convergence studies.

The kinetic convention is T = p^2/2 (unit mass).  A scheme's factor word is
applied left-factor-first: drifts shift positions along the momentum, kicks
shift momenta along the force, and gradient kicks add the force derived
from |grad V|^2 scaled by h^3.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .construct import forest_ruth
from .errors import NonFinite, PreconditionViolated
from .scheme import SplittingScheme, factor_word

#: Sign of the gradient force relative to -grad(|grad V|^2), fixed once by the
#: sign-calibration test in the suite (the wrong sign drops gradient schemes
#: from fourth to second order).  The value follows from the bracket
#: convention {V,{T,V}} = -|grad V|^2 for T = p^2/2.
GRADIENT_FORCE_SIGN = -1.0


@dataclass(frozen=True)
class HamiltonianSystem:
    """A separable Hamiltonian p^2/2 + V(q) with the gradients kicks need."""

    dim: int
    potential: Callable[[np.ndarray], float]
    grad_potential: Callable[[np.ndarray], np.ndarray]
    grad_sq_gradient: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    exact_flow: Optional[Callable[["State", float], "State"]] = None


@dataclass(frozen=True)
class State:
    """Phase-space point (positions, momenta) at elapsed time t."""

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def copy(self) -> "State":
        return State(np.array(self.q, dtype=float), np.array(self.p, dtype=float), self.t)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([np.atleast_1d(self.q), np.atleast_1d(self.p)])


def make_state(q, p, t: float = 0.0) -> State:
    return State(np.atleast_1d(np.asarray(q, dtype=float)),
                 np.atleast_1d(np.asarray(p, dtype=float)), float(t))


def energy(system: HamiltonianSystem, state: State) -> float:
    return 0.5 * float(np.dot(state.p, state.p)) + float(system.potential(state.q))


# ---------------------------------------------------------------------------
# built-in systems
# ---------------------------------------------------------------------------

def harmonic_oscillator() -> HamiltonianSystem:
    """V = q^2/2; exact flow is a rotation of (q, p)."""

    def exact(state: State, t_final: float) -> State:
        c, s = math.cos(t_final), math.sin(t_final)
        q = c * state.q + s * state.p
        p = -s * state.q + c * state.p
        return State(q, p, state.t + t_final)

    return HamiltonianSystem(
        dim=1,
        potential=lambda q: 0.5 * float(q @ q),
        grad_potential=lambda q: q.copy(),
        grad_sq_gradient=lambda q: 2.0 * q,
        label="harmonic",
        exact_flow=exact,
    )


def pendulum() -> HamiltonianSystem:
    """V = -cos q; |grad V|^2 = sin^2 q."""
    return HamiltonianSystem(
        dim=1,
        potential=lambda q: -float(np.cos(q[0])),
        grad_potential=lambda q: np.sin(q),
        grad_sq_gradient=lambda q: np.sin(2.0 * q),
        label="pendulum",
    )


def kepler() -> HamiltonianSystem:
    """Planar V = -1/r; |grad V|^2 = r^-4, its gradient -4 q r^-6."""

    def potential(q):
        return -1.0 / float(np.hypot(q[0], q[1]))

    def grad(q):
        r2 = float(q @ q)
        return q / r2**1.5

    def grad_sq(q):
        r2 = float(q @ q)
        return -4.0 * q / r2**3

    return HamiltonianSystem(
        dim=2,
        potential=potential,
        grad_potential=grad,
        grad_sq_gradient=grad_sq,
        label="kepler",
    )


BUILTIN_SYSTEMS = {
    "harmonic": harmonic_oscillator,
    "pendulum": pendulum,
    "kepler": kepler,
}


def builtin_system(name: str) -> HamiltonianSystem:
    try:
        return BUILTIN_SYSTEMS[name]()
    except KeyError:
        raise KeyError(
            f"unknown system {name!r}; available: {', '.join(sorted(BUILTIN_SYSTEMS))}"
        ) from None


def kepler_initial_state(eccentricity: float = 0.5) -> State:
    """Apoapsis start on an orbit with semi-major axis 1 (period 2*pi)."""
    e = float(eccentricity)
    q = np.array([1.0 + e, 0.0])
    p = np.array([0.0, math.sqrt((1.0 - e) / (1.0 + e))])
    return State(q, p, 0.0)


def default_initial_state(system: HamiltonianSystem) -> State:
    if system.label == "kepler":
        return kepler_initial_state()
    return make_state([1.0] * system.dim, [0.0] * system.dim)


# ---------------------------------------------------------------------------
# elementary maps
# ---------------------------------------------------------------------------

def drift(state: State, h: float) -> State:
    """Free flight: q += h p."""
    return State(state.q + h * state.p, state.p, state.t + h)


def kick(state: State, h: float, system: HamiltonianSystem) -> State:
    """Force impulse: p -= h grad V(q)."""
    return State(state.q, state.p - h * system.grad_potential(state.q), state.t)


def gradient_kick(
    state: State,
    h: float,
    c: float,
    system: HamiltonianSystem,
    sign: Optional[float] = None,
) -> State:
    """Kick plus the gradient force: p -= h grad V + sign*c*h^3 grad|grad V|^2."""
    if sign is None:
        sign = GRADIENT_FORCE_SIGN
    dp = h * system.grad_potential(state.q)
    if c:
        dp = dp + (sign * c * h**3) * system.grad_sq_gradient(state.q)
    return State(state.q, state.p - dp, state.t)


@functools.lru_cache(maxsize=128)
def _float_word(scheme: SplittingScheme) -> tuple:
    return tuple(
        (gen, float(c), float(gc)) for gen, c, gc in factor_word(scheme)
    )


def step(
    scheme: SplittingScheme,
    system: HamiltonianSystem,
    state: State,
    h: float,
    sign: Optional[float] = None,
) -> State:
    """One full step of size h: the scheme word applied left-factor-first."""
    if sign is None:
        sign = GRADIENT_FORCE_SIGN
    q = np.array(state.q, dtype=float)
    p = np.array(state.p, dtype=float)
    h = float(h)
    h3 = h**3
    for gen, c, gc in _float_word(scheme):
        if gen == "T":
            if c:
                q = q + (c * h) * p
        else:
            if c:
                p = p - (c * h) * system.grad_potential(q)
            if gc:
                p = p - (sign * gc * h3) * system.grad_sq_gradient(q)
    return State(q, p, state.t + h)


@dataclass
class Trajectory:
    """Final state plus sampled times and energies of an integration run."""

    final: State
    times: np.ndarray
    energies: np.ndarray

    @property
    def energy_drift(self) -> float:
        e0 = self.energies[0]
        scale = max(abs(e0), 1e-30)
        return float(np.max(np.abs(self.energies - e0)) / scale)


def integrate(
    scheme: SplittingScheme,
    system: HamiltonianSystem,
    state0: State,
    h: float,
    n_steps: int,
    sample_interval: Optional[int] = None,
) -> Trajectory:
    """Apply n_steps steps of size h, recording energy every sample interval."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if sample_interval is None:
        sample_interval = max(1, n_steps // 1000)
    state = state0.copy()
    times = [state.t]
    energies = [energy(system, state)]
    for k in range(1, n_steps + 1):
        try:
            state = step(scheme, system, state, h)
            sampled = k % sample_interval == 0 or k == n_steps
            if sampled:
                if not (np.all(np.isfinite(state.q)) and np.all(np.isfinite(state.p))):
                    raise NonFinite(f"state left finite range at step {k}", step_index=k)
                times.append(state.t)
                energies.append(energy(system, state))
        except (OverflowError, ZeroDivisionError, FloatingPointError) as exc:
            raise NonFinite(f"state left finite range at step {k}: {exc}", step_index=k) from None
    return Trajectory(final=state, times=np.asarray(times), energies=np.asarray(energies))


# ---------------------------------------------------------------------------
# convergence measurement
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    """Error-vs-step-size study with a fitted log-log order slope."""

    step_sizes: list
    errors: list
    slope: float
    energy_drift: float
    energy_drifts: list = field(default_factory=list)
    scheme_label: str = ""
    system_label: str = ""

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme_label,
            "system": self.system_label,
            "step_sizes": list(self.step_sizes),
            "errors": list(self.errors),
            "energy_drifts": list(self.energy_drifts),
            "slope": self.slope,
            "energy_drift": self.energy_drift,
        }

    def csv_rows(self) -> list:
        rows = [("h", "error", "energy_drift")]
        for h, err, drift_ in zip(self.step_sizes, self.errors, self.energy_drifts):
            rows.append((repr(h), repr(err), repr(drift_)))
        return rows


def reference_final_state(
    system: HamiltonianSystem, state0: State, t_final: float, h_ref: float
) -> State:
    """High-accuracy final state from tiny-step integration of a 4th-order scheme."""
    n = max(1, round(t_final / h_ref))
    scheme = forest_ruth()
    state = state0.copy()
    h = t_final / n
    for _ in range(n):
        state = step(scheme, system, state, h)
    return state


def fit_order_slope(
    step_sizes: Sequence[float], errors: Sequence[float], floor: float = 1e-13
) -> float:
    """Least-squares slope of log(error) vs log(h) over the asymptotic range.

    Points with error below 100x the reference floor are dropped (round-off
    dominated), as are points across which the local slope jumps by more
    than 0.3 (pre-asymptotic); the largest consistent window wins.
    """
    hs = np.asarray(step_sizes, dtype=float)
    errs = np.asarray(errors, dtype=float)
    keep = errs > 100.0 * floor
    hs, errs = hs[keep], errs[keep]
    if len(hs) < 2:
        return float("nan")
    log_h = np.log(hs)
    log_e = np.log(errs)
    local = np.diff(log_e) / np.diff(log_h)  # local[i] joins points i, i+1
    lo, hi = 0, len(local) - 1
    if len(local) >= 2:
        runs = []
        start = 0
        for i in range(1, len(local)):
            if abs(local[i] - local[i - 1]) > 0.3:
                runs.append((start, i - 1))
                start = i
        runs.append((start, len(local) - 1))
        lo, hi = max(runs, key=lambda r: r[1] - r[0])
    coeffs = np.polyfit(log_h[lo : hi + 2], log_e[lo : hi + 2], 1)
    return float(coeffs[0])


def convergence_study(
    scheme: SplittingScheme,
    system: HamiltonianSystem,
    state0: State,
    t_final: float,
    h_list: Sequence[float],
    reference: Optional[State] = None,
    reference_refinement: float = 100.0,
) -> ConvergenceReport:
    """Final-state error versus step size with a fitted order slope.

    The reference solution is the system's exact flow when available and a
    tiny-step fourth-order run (h_min / reference_refinement) otherwise;
    ``reference`` short-circuits both for repeated studies.  Each h must
    divide t_final to within one part in 1e-9 of a step.
    """
    hs = sorted((float(h) for h in h_list), reverse=True)
    if not hs:
        raise ValueError("h_list must not be empty")
    steps = []
    for h in hs:
        n = round(t_final / h)
        if n < 1 or abs(n * h - t_final) > 1e-9 * t_final:
            raise PreconditionViolated(
                f"step size {h} does not divide t_final = {t_final}"
            )
        steps.append(n)
    exact_floor = 1e-13
    ref_floor = 1e-12
    if reference is not None:
        ref_vec = reference.as_vector()
        floor = ref_floor
    elif system.exact_flow is not None:
        ref_vec = system.exact_flow(state0, t_final).as_vector()
        floor = exact_floor
    else:
        h_ref = hs[-1] / reference_refinement
        ref_vec = reference_final_state(system, state0, t_final, h_ref).as_vector()
        floor = ref_floor
    errors = []
    drifts = []
    for h, n in zip(hs, steps):
        traj = integrate(scheme, system, state0, h, n)
        errors.append(float(np.linalg.norm(traj.final.as_vector() - ref_vec)))
        drifts.append(traj.energy_drift)
    slope = fit_order_slope(hs, errors, floor=floor)
    return ConvergenceReport(
        step_sizes=hs,
        errors=errors,
        slope=slope,
        energy_drift=float(max(drifts)),
        energy_drifts=drifts,
        scheme_label=scheme.label or "",
        system_label=system.label,
    )


# ---------------------------------------------------------------------------
# symplecticity
# ---------------------------------------------------------------------------

def symplectic_check(
    scheme: SplittingScheme,
    system: HamiltonianSystem,
    state: State,
    h: float,
    fd_step: float = 1e-5,
) -> float:
    """max |M^T J M - J| for the finite-difference Jacobian M of one step."""
    d = len(np.atleast_1d(state.q))
    m = 2 * d
    x0 = state.as_vector()

    def apply_map(x):
        s = State(x[:d].copy(), x[d:].copy(), state.t)
        out = step(scheme, system, s, h)
        return out.as_vector()

    jac = np.empty((m, m))
    for j in range(m):
        dx = np.zeros(m)
        dx[j] = fd_step
        jac[:, j] = (apply_map(x0 + dx) - apply_map(x0 - dx)) / (2 * fd_step)
    J = np.zeros((m, m))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return float(np.max(np.abs(jac.T @ J @ jac - J)))
