import numpy as np
import pytest
import scipy.linalg

from cavgate.hilbert import basis_state, build_basis
from cavgate.lambda_gate import LambdaParams, build_generator_lambda, pulse_duration
from cavgate.propagator import (
    expm,
    no_photon_probability,
    output_times,
    plan,
    propagate,
)
from cavgate.raman_gate import RamanParams, build_generator_raman, raman_pulse_duration
from cavgate.shelving import ShelvingParams, build_generator_shelving


def random_matrix(rng, dim, scale):
    return scale * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))


@pytest.mark.parametrize("scale", [1e-3, 0.3, 2.0, 50.0])
def test_expm_matches_scipy(scale):
    rng = np.random.default_rng(11)
    a = random_matrix(rng, 12, scale / 12.0)
    ours = expm(a, tol=1e-13)
    ref = scipy.linalg.expm(a)
    denom = np.linalg.norm(ref)
    assert np.linalg.norm(ours - ref) / denom <= 1e-10


@pytest.mark.parametrize("scale", [1e2, 1e5])
def test_expm_matches_scipy_large_antihermitian(scale):
    # exponentials only stay bounded at huge norms for (near-)dissipative
    # matrices; the anti-Hermitian case exercises the deep squaring phase
    rng = np.random.default_rng(13)
    h = random_matrix(rng, 10, 1.0)
    h = scale * (h + h.conj().T) / np.linalg.norm(h + h.conj().T, 2)
    a = -1j * h
    ours = expm(a, tol=1e-13)
    ref = scipy.linalg.expm(a)
    assert np.linalg.norm(ours - ref) / np.linalg.norm(ref) <= 1e-9


def test_expm_dissipative_generator_large_time():
    # the step matrices of real runs: contractive, very large norm * time
    basis = build_basis("raman", 1)
    params = RamanParams(omega20=0.05, omega21=0.05)
    g = build_generator_raman(params, basis).matrix
    t = 300.0  # |G t| ~ 1e6
    ours = expm(g * t, tol=1e-11)
    ref = scipy.linalg.expm(g * t)
    assert np.linalg.norm(ours - ref) / np.linalg.norm(ref) <= 1e-9
    # contractive up to the roundoff of ~20 squarings
    assert np.linalg.norm(ours, 2) <= 1.0 + 1e-9


def test_expm_trivial_and_errors():
    assert np.abs(expm(np.zeros((4, 4))) - np.eye(4)).max() == 0.0
    with pytest.raises(ValueError):
        expm(np.ones((2, 3)))
    with pytest.raises(ValueError):
        expm(np.array([[np.nan, 0], [0, 1.0]]))
    with pytest.raises(ValueError):
        expm(np.eye(2), tol=0.0)


def test_expm_tolerance_ladder():
    rng = np.random.default_rng(5)
    a = random_matrix(rng, 8, 0.05)
    ref = scipy.linalg.expm(a)
    for tol in (1e-6, 1e-9, 1e-13):
        err = np.linalg.norm(expm(a, tol=tol) - ref) / np.linalg.norm(ref)
        assert err <= tol


def test_expm_extra_squarings_consistent():
    rng = np.random.default_rng(9)
    a = random_matrix(rng, 10, 1.0)
    base = expm(a, tol=1e-12)
    finer = expm(a, tol=1e-12, extra_squarings=3)
    assert np.linalg.norm(base - finer) / np.linalg.norm(base) <= 1e-11


def test_plan_diagonal_decay_is_exact():
    basis = build_basis("shelving", 0)
    g = np.diag([-0.5, -0.5, -0.5]).astype(complex)
    from cavgate.hilbert import ConditionalGenerator

    gen = ConditionalGenerator(basis, g)
    p = plan(gen, 10.0, n_outputs=10, eps=1e-9)
    expected = np.exp(-0.5 * p.dt)
    assert np.abs(np.diag(p.step_matrix) - expected).max() <= 1e-12 * expected


def test_plan_unitary_step_for_hermitian_limit():
    basis = build_basis("lambda", 2)
    gen = build_generator_lambda(LambdaParams(omega0=0.1, kappa=0.0, gamma=0.0), basis)
    eps = 1e-9
    p = plan(gen, 50.0, n_outputs=100, eps=eps)
    e = p.step_matrix
    assert np.abs(e.conj().T @ e - np.eye(basis.dim)).max() <= 10 * eps


def test_plan_long_horizon_step_budget():
    # the slowest supported run: six-level gate at its weakest drive
    basis = build_basis("raman", 2)
    params = RamanParams(omega20=0.01, omega21=0.01)
    gen = build_generator_raman(params, basis)
    t = raman_pulse_duration(params)
    assert t == pytest.approx(6.283185307179586e5, rel=1e-12)
    p = plan(gen, t)
    assert p.total_steps <= 2_000_000


def test_plan_input_validation():
    basis = build_basis("shelving", 0)
    from cavgate.hilbert import ConditionalGenerator

    gen = ConditionalGenerator(basis, -np.eye(3, dtype=complex))
    with pytest.raises(ValueError):
        plan(gen, 0.0)
    with pytest.raises(ValueError):
        plan(gen, 1.0, n_outputs=0)
    bad = ConditionalGenerator(basis, np.full((3, 3), np.inf + 0j))
    with pytest.raises(ValueError):
        plan(bad, 1.0)


def test_propagate_stationary_configuration():
    # the 01 configuration couples to neither laser nor cavity
    basis = build_basis("lambda", 2)
    params = LambdaParams(omega0=0.17, kappa=0.8, gamma=0.02)
    p = plan(build_generator_lambda(params, basis), 40.0, n_outputs=40)
    state = basis_state(basis, 0, "01")
    for out in propagate(p, state, output_times(p)):
        assert np.abs(out.amplitudes - state.amplitudes).max() <= 1e-12
        assert abs(out.squared_norm() - 1.0) <= 1e-12


def test_propagate_norm_conservation_hermitian_limit():
    basis = build_basis("lambda", 2)
    gen = build_generator_lambda(LambdaParams(omega0=0.1, kappa=0.0, gamma=0.0), basis)
    p = plan(gen, 100.0, n_outputs=200)
    out = propagate(p, basis_state(basis, 0, "10"), [100.0])[0]
    assert abs(out.squared_norm() - 1.0) <= 1e-10


def test_propagate_matches_first_order_probability():
    params = LambdaParams(omega0=0.1, kappa=1.0, gamma=0.0)
    basis = build_basis("lambda", 2)
    t = pulse_duration(params)
    p = plan(build_generator_lambda(params, basis), t, n_outputs=100)
    p0 = no_photon_probability(p, basis_state(basis, 0, "10"), t)
    assert p0 == pytest.approx(0.81347, abs=5e-2)


def test_propagate_grid_validation():
    basis = build_basis("shelving", 0)
    gen = build_generator_shelving(ShelvingParams(0.02, 1.0, 1.0), basis)
    p = plan(gen, 10.0, n_outputs=10)
    state = basis_state(basis, 0, "A")
    with pytest.raises(ValueError):
        propagate(p, state, [5.0, 2.0])
    with pytest.raises(ValueError):
        propagate(p, state, [11.0])
    with pytest.raises(ValueError):
        propagate(p, state, [0.123456])
    with pytest.raises(ValueError):
        propagate(p, state, [])


def test_propagate_rejects_foreign_basis():
    basis = build_basis("lambda", 2)
    other = build_basis("lambda", 3)
    gen = build_generator_lambda(LambdaParams(omega0=0.1), basis)
    p = plan(gen, 1.0, n_outputs=4)
    with pytest.raises(ValueError):
        propagate(p, basis_state(other, 0, "10"), [1.0])


def test_no_photon_probability_basics():
    basis = build_basis("shelving", 0)
    gen = build_generator_shelving(ShelvingParams(0.02, 1.0, 1.0), basis)
    p = plan(gen, 5000.0, n_outputs=500)
    state = basis_state(basis, 0, "A")
    assert no_photon_probability(p, state, 0.0) == pytest.approx(1.0, abs=1e-12)
    p_mid = no_photon_probability(p, state, 2500.0)
    assert np.exp(-1.0) / 2.0 <= p_mid <= np.exp(-1.0) * 2.0


def test_norm_monotone_on_output_grid():
    rng = np.random.default_rng(42)
    basis = build_basis("lambda", 2)
    params = LambdaParams(omega0=0.1, kappa=1.0, gamma=1e-3)
    p = plan(build_generator_lambda(params, basis), 60.0, n_outputs=60)
    for _ in range(10):
        amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        amps /= np.linalg.norm(amps)
        from cavgate.hilbert import StateVector

        traj = propagate(p, StateVector(basis, amps), output_times(p))
        norms = np.array([s.squared_norm() for s in traj])
        assert np.all(np.diff(norms) <= 1e-12)


def test_step_halving_changes_little():
    params = LambdaParams(omega0=0.1, kappa=1.0, gamma=0.0)
    basis = build_basis("lambda", 2)
    gen = build_generator_lambda(params, basis)
    t = pulse_duration(params)
    eps = 1e-9
    base = plan(gen, t, n_outputs=100, eps=eps)
    halved = plan(gen, t, n_outputs=100, eps=eps, min_substeps=2 * base.n_sub)
    s0 = propagate(base, basis_state(basis, 0, "10"), [t])[0]
    s1 = propagate(halved, basis_state(basis, 0, "10"), [t])[0]
    assert np.abs(s0.amplitudes - s1.amplitudes).max() <= 10 * eps


def test_output_times_span_the_run():
    basis = build_basis("shelving", 0)
    gen = build_generator_shelving(ShelvingParams(0.02, 1.0, 1.0), basis)
    p = plan(gen, 123.0, n_outputs=41)
    ts = output_times(p)
    assert len(ts) == 42
    assert ts[0] == 0.0
    assert ts[-1] == pytest.approx(123.0, rel=1e-12)
    propagate(p, basis_state(basis, 0, "A"), ts)
