import numpy as np
import pytest

from trijunction.diagnostics import decay_fit, record_from_state
from trijunction.errors import CflViolation
from trijunction.evolution import (
    EvolveConfig,
    Stepper,
    initial_state,
    junction_kinematics,
    run,
    step,
)
from trijunction.parameterization import GraphState, junction_angle_residuals, outer_bc_residual
from trijunction.stability import max_eigenvalue
from trijunction.tensions import junction_matrix, young_angles


def make_config(network, n, t_end, safety=0.4, **kw):
    dsig = float(network.lengths.min()) / n
    return EvolveConfig(dt=safety * dsig**2, t_end=t_end, n=n, **kw)


def test_zero_state_is_machine_fixed_point(disk, disk_network, unit_tensions):
    n = 24
    cfg = make_config(disk_network, n, 1.0)
    stepper = Stepper(disk_network, disk, unit_tensions, cfg)
    state = GraphState(np.zeros((3, n + 1)), np.zeros(3))
    for _ in range(1000):
        state = stepper.step(state)
    assert np.abs(state.rho).max() == 0.0
    assert np.abs(state.mu).max() == 0.0


def test_cfl_guard(disk, disk_network, unit_tensions):
    n = 24
    dsig = 1.0 / n
    cfg = EvolveConfig(dt=dsig**2, t_end=1.0, n=n)  # twice the guard
    state = GraphState(np.zeros((3, n + 1)), np.zeros(3))
    with pytest.raises(CflViolation):
        step(disk_network, disk, unit_tensions, state, cfg)


def test_initial_state_zero_perturbation(trefoil, trefoil_network, unit_tensions):
    cfg = make_config(trefoil_network, 24, 0.1)
    state = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                          kind="cosine", amplitude=0.0)
    assert np.abs(state.rho).max() == 0.0


def test_initial_state_compatibility(trefoil, trefoil_network, unit_tensions):
    n = 48
    cfg = make_config(trefoil_network, n, 0.1)
    spec = max_eigenvalue(trefoil_network, unit_tensions, n)
    state = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                          kind="eigenmode", amplitude=1e-2,
                          eigenfunction=spec.eigenfunction)
    g = unit_tensions.array
    assert abs(g @ state.rho[:, 0]) < 1e-12
    g12, g13 = junction_angle_residuals(trefoil_network, trefoil, unit_tensions, state)
    assert abs(g12) < 1e-10 and abs(g13) < 1e-10
    for i in range(3):
        assert abs(outer_bc_residual(trefoil_network, trefoil, state, i)) < 1e-10
    # the eigenfunction already satisfies the linear conditions, so the
    # nonlinear correction of the boundary values is second order
    raw = 1e-2 * spec.eigenfunction / np.abs(spec.eigenfunction).max()
    assert np.abs(state.rho - raw).max() < 5e-4


def test_initial_state_projects_constraint_violation(trefoil, trefoil_network,
                                                     unit_tensions):
    cfg = make_config(trefoil_network, 24, 0.1)
    state = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                          kind="cosine", amplitude=1e-2,
                          cosine_coefficients=[[1.0], [0.3], [0.0]])
    g = unit_tensions.array
    assert abs(g @ state.rho[:, 0]) < 1e-12


def test_constraints_preserved_along_run(trefoil, trefoil_network, unit_tensions):
    n = 32
    cfg = make_config(trefoil_network, n, 0.02, output_every=10)
    state = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                          kind="cosine", amplitude=5e-3)
    q = junction_matrix(young_angles(unit_tensions)).q
    g = unit_tensions.array
    stepper = Stepper(trefoil_network, trefoil, unit_tensions, cfg)
    for _ in range(50):
        state = stepper.step(state)
        assert abs(g @ state.rho[:, 0]) < 1e-10
        assert np.abs(state.mu - q @ state.rho[:, 0]).max() < 1e-10


def test_single_step_decreases_energy(trefoil, trefoil_network, unit_tensions):
    n = 48
    cfg = make_config(trefoil_network, n, 0.01)
    state = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                          kind="cosine", amplitude=2e-2)
    before = record_from_state(trefoil_network, trefoil, unit_tensions, state)
    stepper = Stepper(trefoil_network, trefoil, unit_tensions, cfg)
    for _ in range(5):
        state = stepper.step(state)
    after = record_from_state(trefoil_network, trefoil, unit_tensions, state)
    assert after.E < before.E


def test_eigenmode_decay_rate(trefoil, trefoil_network, unit_tensions):
    n = 48
    spec = max_eigenvalue(trefoil_network, unit_tensions, n)
    cfg = make_config(trefoil_network, n, 0.5, output_every=100)
    init = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                         kind="eigenmode", amplitude=1e-3,
                         eigenfunction=spec.eigenfunction)
    traj = run(trefoil_network, trefoil, unit_tensions, init, cfg)
    assert traj.status == "completed"
    # the state norm itself decays at lambda_max; kappa^2 at twice that
    norms = np.array([np.abs(s.rho).max() for s in traj.states])
    rate, _, r2 = decay_fit(traj.times, norms, window=0.8)
    assert abs(rate - spec.lambda_max) / abs(spec.lambda_max) < 0.05
    assert r2 > 0.999
    k2 = np.array([r.kappa_l2_sq for r in traj.records])
    rate2, _, _ = decay_fit(traj.times, k2, window=0.8)
    assert abs(rate2 - 2 * spec.lambda_max) / abs(2 * spec.lambda_max) < 0.05


def test_unstable_run_reports_amplitude_cap(two_dents, two_dents_network,
                                            unit_tensions):
    n = 32
    spec = max_eigenvalue(two_dents_network, unit_tensions, n)
    assert spec.lambda_max > 0
    cfg = make_config(two_dents_network, n, 10.0, output_every=100,
                      amplitude_cap=0.02)
    init = initial_state(two_dents_network, two_dents, unit_tensions, cfg,
                         kind="eigenmode", amplitude=5e-3,
                         eigenfunction=spec.eigenfunction)
    traj = run(two_dents_network, two_dents, unit_tensions, init, cfg)
    assert traj.status == "amplitude_cap"
    k2 = np.array([r.kappa_l2_sq for r in traj.records])
    assert k2[-1] > 4.0 * k2[0]


def test_run_reports_admissibility_loss(disk, disk_network, unit_tensions):
    # state engineered past the det M floor; run() must end with the typed
    # status on its first step instead of raising
    from trijunction.parameterization import state_from_rho

    n = 24
    sigma = disk_network.sigma_grid(n)
    l = disk_network.lengths[:, None]
    rho = -2.0 * sigma * (1.0 - sigma / l) ** 2
    state = state_from_rho(disk_network, unit_tensions, rho)
    cfg = make_config(disk_network, n, 0.01, output_every=5, amplitude_cap=5.0)
    traj = run(disk_network, disk, unit_tensions, state, cfg)
    assert traj.status == "MatrixMNotInvertible"
    assert "det M" in traj.message


def test_junction_kinematics_zero_on_stationary(trefoil, trefoil_network,
                                                unit_tensions):
    n = 24
    cfg = make_config(trefoil_network, n, 0.01)
    s0 = GraphState(np.zeros((3, n + 1)), np.zeros(3), t=0.0)
    stepper = Stepper(trefoil_network, trefoil, unit_tensions, cfg)
    s1 = stepper.step(s0)
    V, v = junction_kinematics(trefoil_network, trefoil, s0, s1)
    assert np.abs(V).max() < 1e-12
    assert np.abs(v).max() < 1e-12


def test_junction_kinematics_tangential_coupling(trefoil, trefoil_network,
                                                 unit_tensions):
    # v = Q V and sum gamma v = 0 at the junction, up to O(dt + dsigma)
    n = 64
    cfg = make_config(trefoil_network, n, 0.02, output_every=25)
    spec = max_eigenvalue(trefoil_network, unit_tensions, n)
    init = initial_state(trefoil_network, trefoil, unit_tensions, cfg,
                         kind="eigenmode", amplitude=5e-3,
                         eigenfunction=spec.eigenfunction)
    traj = run(trefoil_network, trefoil, unit_tensions, init, cfg)
    q = junction_matrix(young_angles(unit_tensions)).q
    g = unit_tensions.array
    scale = max(np.abs(r.kappa_linf) for r in traj.records)
    for s0, s1 in zip(traj.states[:-2], traj.states[1:-1]):
        V, v = junction_kinematics(trefoil_network, trefoil, s0, s1)
        dsig = float(trefoil_network.lengths.min()) / n
        dt_rec = s1.t - s0.t
        tol = 20.0 * scale * (dt_rec + dsig)
        assert np.abs(v - q @ V).max() < tol
        assert abs(g @ v) < tol
