import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import splitkit as sk
from splitkit import dynamics
from splitkit.errors import NonFinite

TWO_PI = 2.0 * math.pi


def harmonic_state():
    return sk.make_state([1.0], [0.0])


# ---------------------------------------------------------------------------
# elementary maps
# ---------------------------------------------------------------------------

def test_drift_moves_along_momentum():
    out = sk.drift(sk.make_state([0.0], [1.0]), 0.5)
    assert_allclose(out.q, [0.5])
    assert_allclose(out.p, [1.0])
    assert out.t == 0.5


def test_drift_zero_step_is_identity():
    s = sk.make_state([0.3], [-0.7])
    out = sk.drift(s, 0.0)
    assert_allclose(out.q, s.q)
    assert_allclose(out.p, s.p)


def test_drifts_compose():
    s = sk.make_state([0.1], [2.0])
    once = sk.drift(s, 0.7)
    twice = sk.drift(sk.drift(s, 0.3), 0.4)
    assert_allclose(once.q, twice.q)


def test_kick_linear_force():
    system = sk.harmonic_oscillator()
    out = sk.kick(sk.make_state([1.0], [0.0]), 0.1, system)
    assert_allclose(out.p, [-0.1])
    assert_allclose(out.q, [1.0])


def test_kick_zero_step_and_inverse():
    system = sk.pendulum()
    s = sk.make_state([0.4], [0.2])
    assert_allclose(sk.kick(s, 0.0, system).p, s.p)
    back = sk.kick(sk.kick(s, 0.3, system), -0.3, system)
    assert_allclose(back.p, s.p, atol=1e-16)


def test_gradient_kick_harmonic_values():
    system = sk.harmonic_oscillator()
    c = 1.0 / 192.0
    out = sk.gradient_kick(sk.make_state([1.0], [0.0]), 1.0, c, system)
    sigma = dynamics.GRADIENT_FORCE_SIGN
    assert_allclose(out.p, [-1.0 - sigma * 2.0 * c])


def test_gradient_kick_with_zero_c_is_kick():
    system = sk.kepler()
    s = sk.kepler_initial_state()
    a = sk.gradient_kick(s, 0.2, 0.0, system)
    b = sk.kick(s, 0.2, system)
    assert_allclose(a.p, b.p)


# ---------------------------------------------------------------------------
# built-in systems: gradient consistency
# ---------------------------------------------------------------------------

def _fd_grad(f, q, eps=1e-6):
    out = np.zeros_like(q)
    for i in range(len(q)):
        dq = np.zeros_like(q)
        dq[i] = eps
        out[i] = (f(q + dq) - f(q - dq)) / (2 * eps)
    return out


@pytest.mark.parametrize("name", ["harmonic", "pendulum", "kepler"])
def test_grad_potential_matches_finite_differences(name):
    system = sk.builtin_system(name)
    rng = np.random.default_rng(7)
    for _ in range(10):
        q = rng.uniform(0.5, 1.5, size=system.dim)
        assert_allclose(system.grad_potential(q), _fd_grad(system.potential, q), rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("name", ["harmonic", "pendulum", "kepler"])
def test_grad_sq_gradient_matches_finite_differences(name):
    system = sk.builtin_system(name)
    rng = np.random.default_rng(11)

    def sq(q):
        g = system.grad_potential(q)
        return float(g @ g)

    for _ in range(10):
        q = rng.uniform(0.6, 1.4, size=system.dim)
        assert_allclose(system.grad_sq_gradient(q), _fd_grad(sq, q), rtol=1e-5, atol=1e-7)


# ---------------------------------------------------------------------------
# steps
# ---------------------------------------------------------------------------

def test_leapfrog_step_local_error_third_order():
    system = sk.harmonic_oscillator()
    s = harmonic_state()
    errs = []
    for h in (0.1, 0.05):
        stepped = sk.step(sk.leapfrog(), system, s, h)
        exact = system.exact_flow(s, h)
        errs.append(np.linalg.norm(stepped.as_vector() - exact.as_vector()))
    ratio = errs[0] / errs[1]
    assert 6.0 <= ratio <= 10.0  # ~2^3 for an O(h^3) local error


def test_forest_ruth_step_local_error_fifth_order():
    system = sk.harmonic_oscillator()
    s = harmonic_state()
    errs = []
    for h in (0.2, 0.1):
        stepped = sk.step(sk.forest_ruth(), system, s, h)
        exact = system.exact_flow(s, h)
        errs.append(np.linalg.norm(stepped.as_vector() - exact.as_vector()))
    ratio = errs[0] / errs[1]
    assert 24.0 <= ratio <= 40.0  # ~2^5


def test_gradient_scheme_step_local_error_fifth_order():
    system = sk.harmonic_oscillator()
    s = harmonic_state()
    scheme = sk.builtin_scheme("gradient-n4")
    errs = []
    for h in (0.2, 0.1):
        stepped = sk.step(scheme, system, s, h)
        exact = system.exact_flow(s, h)
        errs.append(np.linalg.norm(stepped.as_vector() - exact.as_vector()))
    ratio = errs[0] / errs[1]
    assert 24.0 <= ratio <= 40.0


@pytest.mark.parametrize(
    "name", ["leapfrog", "forest-ruth", "gradient-n4", "position-n4"]
)
def test_symmetric_schemes_are_time_reversible(name):
    system = sk.pendulum()
    scheme = sk.builtin_scheme(name)
    s = sk.make_state([0.9], [0.4])
    forward = sk.step(scheme, system, s, 0.2)
    back = sk.step(scheme, system, forward, -0.2)
    assert np.max(np.abs(back.as_vector() - s.as_vector())) <= 1e-12


def test_step_matches_exact_rotation_to_second_order():
    system = sk.harmonic_oscillator()
    s = harmonic_state()
    stepped = sk.step(sk.leapfrog(), system, s, 0.1)
    exact = system.exact_flow(s, 0.1)
    assert np.linalg.norm(stepped.as_vector() - exact.as_vector()) <= 5e-4


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------

def test_integrate_records_energy_and_final_state():
    system = sk.harmonic_oscillator()
    traj = sk.integrate(sk.leapfrog(), system, harmonic_state(), 0.1, 100, sample_interval=10)
    assert traj.final.t == pytest.approx(10.0)
    assert len(traj.energies) == 11  # initial + one sample per 10 steps
    assert traj.energy_drift <= 1e-2


def test_integrate_rejects_bad_step_count():
    with pytest.raises(ValueError):
        sk.integrate(sk.leapfrog(), sk.harmonic_oscillator(), harmonic_state(), 0.1, 0)


def test_integrate_raises_nonfinite_for_blowup():
    # leapfrog is unstable on the harmonic oscillator for h > 2: the state
    # grows geometrically and overflows to inf
    system = sk.harmonic_oscillator()
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFinite) as excinfo:
            sk.integrate(sk.leapfrog(), system, harmonic_state(), 10.0, 400, sample_interval=1)
    assert excinfo.value.step_index is not None


def test_energy_bounded_over_long_leapfrog_run():
    system = sk.harmonic_oscillator()
    traj = sk.integrate(sk.leapfrog(), system, harmonic_state(), 0.1, 100_000, sample_interval=100)
    n = len(traj.energies)
    early = np.max(np.abs(traj.energies[: n // 10] - traj.energies[0]))
    late = np.max(np.abs(traj.energies - traj.energies[0]))
    assert late <= 1.1 * early + 1e-12  # oscillates, no secular growth


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

def test_leapfrog_harmonic_slope_is_two():
    report = sk.convergence_study(
        sk.leapfrog(),
        sk.harmonic_oscillator(),
        harmonic_state(),
        TWO_PI,
        [TWO_PI / 2**k for k in range(4, 9)],
    )
    assert report.slope == pytest.approx(2.0, abs=0.1)


def test_forest_ruth_kepler_slope_is_four():
    report = sk.convergence_study(
        sk.forest_ruth(),
        sk.kepler(),
        sk.kepler_initial_state(0.5),
        TWO_PI,
        [TWO_PI / 2**k for k in range(7, 11)],
    )
    assert report.slope == pytest.approx(4.0, abs=0.15)


def test_gradient_force_sign_calibration():
    """The calibrated sign yields fourth order; the flipped sign degrades to second."""
    system = sk.harmonic_oscillator()
    scheme = sk.builtin_scheme("gradient-n4")
    hs = [TWO_PI / 2**k for k in range(4, 9)]
    exact = system.exact_flow(harmonic_state(), TWO_PI).as_vector()

    def slope_with_sign(sign):
        errs = []
        for h in hs:
            n = round(TWO_PI / h)
            state = harmonic_state()
            for _ in range(n):
                state = sk.step(scheme, system, state, h, sign=sign)
            errs.append(float(np.linalg.norm(state.as_vector() - exact)))
        return dynamics.fit_order_slope(hs, errs)

    good = slope_with_sign(dynamics.GRADIENT_FORCE_SIGN)
    bad = slope_with_sign(-dynamics.GRADIENT_FORCE_SIGN)
    assert good == pytest.approx(4.0, abs=0.15)
    assert bad == pytest.approx(2.0, abs=0.2)


def test_convergence_study_requires_dividing_steps():
    with pytest.raises(Exception):
        sk.convergence_study(
            sk.leapfrog(), sk.harmonic_oscillator(), harmonic_state(), 1.0, [0.3]
        )


def test_report_serialization():
    report = sk.convergence_study(
        sk.leapfrog(),
        sk.harmonic_oscillator(),
        harmonic_state(),
        TWO_PI,
        [TWO_PI / 2**k for k in range(4, 7)],
    )
    doc = report.to_dict()
    assert set(doc) == {
        "scheme", "system", "step_sizes", "errors", "energy_drifts", "slope", "energy_drift",
    }
    rows = report.csv_rows()
    assert rows[0] == ("h", "error", "energy_drift")
    assert len(rows) == 4


def test_fit_order_slope_drops_roundoff_points():
    hs = [0.1 / 2**k for k in range(8)]
    errs = [max(1e-3 * h**4, 2e-13) for h in hs]  # floor kicks in at small h
    slope = dynamics.fit_order_slope(hs, errs, floor=1e-14)
    assert slope == pytest.approx(4.0, abs=0.05)


# ---------------------------------------------------------------------------
# symplecticity
# ---------------------------------------------------------------------------

def test_drift_and_kick_are_symplectic_to_roundoff():
    system = sk.pendulum()
    drift_only = sk.SplittingScheme("velocity", (1,), (0,))
    kick_only = sk.SplittingScheme("velocity", (0,), (1,))
    s = sk.make_state([0.6], [0.1])
    assert sk.symplectic_check(drift_only, system, s, 0.3) <= 1e-9
    assert sk.symplectic_check(kick_only, system, s, 0.3) <= 1e-9


@pytest.mark.parametrize("name", sorted(sk.BUILTIN_SCHEMES))
def test_builtin_schemes_symplectic_on_pendulum(name):
    system = sk.pendulum()
    scheme = sk.builtin_scheme(name)
    s = sk.make_state([0.7], [0.3])
    assert sk.symplectic_check(scheme, system, s, 0.1) <= 1e-7
