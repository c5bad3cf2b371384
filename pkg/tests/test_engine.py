import math

import numpy as np
import pytest

from collisync.engine import (
    CARRIED_LABELS,
    InitialStateSpec,
    ModelParams,
    Strategy,
    build_step_channel,
    build_step_unitaries,
    initial_carried_state,
    run_expectation_series,
    run_trajectory,
    step,
    thermal_state,
)
from collisync.linalg import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SWAP_2,
    kron,
    partial_trace,
)
from collisync.observables import concurrence, mutual_information

from conftest import ptrace_bruteforce, random_density

BASELINE = dict(g_se=0.05, g_ss=0.03, omega1=1.0, omega2=1.1, dt_s=0.2, gamma=0.95 * math.pi / 2)


def params(**overrides):
    merged = {**BASELINE, **overrides}
    return ModelParams(**merged)


def apply_gate(op, psi, targets, n):
    """Independent gate application through tensor contraction."""
    k = len(targets)
    psi_t = psi.reshape([2] * n)
    op_t = op.reshape([2] * (2 * k))
    moved = np.moveaxis(psi_t, targets, range(k))
    res = np.tensordot(op_t, moved, axes=(list(range(k, 2 * k)), list(range(k))))
    return np.moveaxis(res, range(k), targets).reshape(-1)


class TestModelParams:
    def test_gamma_range(self):
        with pytest.raises(ValueError, match="gamma"):
            params(gamma=-0.1)
        with pytest.raises(ValueError, match="gamma"):
            params(gamma=math.pi)

    def test_negative_temperature(self):
        with pytest.raises(ValueError, match="temperatures"):
            params(temp1=-1.0)

    def test_dt_positive(self):
        with pytest.raises(ValueError, match="dt_s"):
            params(dt_s=0.0)

    def test_strategy_type(self):
        with pytest.raises(TypeError):
            params(strategy="keep")


class TestThermalState:
    def test_zero_temperature_is_ground_state(self):
        rho = thermal_state(0.0, 1.0)
        assert np.array_equal(rho.mat, np.diag([1.0, 0.0]))

    def test_high_temperature_is_maximally_mixed(self):
        rho = thermal_state(1e12, 1.0)
        assert np.abs(rho.mat - IDENTITY_2 / 2).max() < 1e-12

    def test_gibbs_populations(self):
        # p0 = 1 / (1 + exp(-omega/T)) at T = 5 omega
        rho = thermal_state(5.0, 1.0)
        assert abs(rho.mat[0, 0].real - 0.549833997312478) < 1e-12
        assert abs(np.trace(rho.mat).real - 1.0) == 0.0

    def test_population_ordering(self):
        rho = thermal_state(2.5, 1.3)
        assert rho.mat[0, 0].real > rho.mat[1, 1].real > 0.0

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            thermal_state(-0.1, 1.0)

    def test_nonpositive_omega_rejected_when_hot(self):
        with pytest.raises(ValueError, match="self-energy"):
            thermal_state(1.0, 0.0)


class TestInitialState:
    def test_default_is_plus_plus_with_ground_environments(self):
        state = initial_carried_state(InitialStateSpec(), params())
        plus = np.full((2, 2), 0.5, dtype=complex)
        ground = np.diag([1.0, 0.0]).astype(complex)
        expected = kron(plus, plus, ground, ground)
        assert np.abs(state.joint.mat - expected).max() < 1e-12
        assert state.joint.labels == CARRIED_LABELS

    def test_theta_zero_is_ground(self):
        spec = InitialStateSpec(theta1=0.0)
        state = initial_carried_state(spec, params(strategy=Strategy.ERASE))
        assert np.abs(state.sys1.mat - np.diag([1.0, 0.0])).max() < 1e-12

    def test_phase_angle_points_along_y(self):
        spec = InitialStateSpec(theta1=math.pi / 4, phi1=math.pi / 2)
        state = initial_carried_state(spec, params(strategy=Strategy.ERASE))
        sy = np.trace(state.sys1.mat @ PAULI_Y).real
        assert abs(sy - 1.0) < 1e-12

    def test_erase_shape(self):
        state = initial_carried_state(InitialStateSpec(), params(strategy=Strategy.ERASE))
        assert state.sys1.mat.shape == (2, 2)
        assert state.env_pair.mat.shape == (4, 4)


class TestStepUnitaries:
    def test_swap_limits(self):
        u = build_step_unitaries(params(gamma=0.0))
        assert np.abs(u.u_swap - np.eye(4)).max() < 1e-14
        u = build_step_unitaries(params(gamma=math.pi / 2))
        assert np.abs(u.u_swap - 1j * SWAP_2).max() < 1e-14

    def test_exchange_closed_form(self):
        u = build_step_unitaries(params())
        g = BASELINE["g_se"]
        expected = np.eye(4, dtype=complex)
        expected[1:3, 1:3] = [[math.cos(g), -1j * math.sin(g)], [-1j * math.sin(g), math.cos(g)]]
        assert np.abs(u.u_s1e1 - expected).max() < 1e-12
        assert np.abs(u.u_s2e2 - expected).max() < 1e-12

    def test_ising_closed_form(self):
        u = build_step_unitaries(params())
        g = BASELINE["g_ss"]
        expected = math.cos(g / 2) * np.eye(4) - 1j * math.sin(g / 2) * kron(PAULI_X, PAULI_X)
        assert np.abs(u.u_ss - expected).max() < 1e-12

    def test_free_rotation_closed_form(self):
        u = build_step_unitaries(params())
        half = 0.5 * BASELINE["omega1"] * BASELINE["dt_s"]
        expected = np.diag([np.exp(1j * half), np.exp(-1j * half)])
        assert np.abs(u.u_s1 - expected).max() < 1e-12

    def test_all_factors_unitary(self, rng):
        for _ in range(5):
            p = params(
                g_se=rng.uniform(0, 0.3),
                g_ss=rng.uniform(0, 0.3),
                omega1=rng.uniform(0.5, 2),
                omega2=rng.uniform(0.5, 2),
                gamma=rng.uniform(0, math.pi / 2),
            )
            u = build_step_unitaries(p)
            for factor in (u.u_s1e1, u.u_s2e2, u.u_ss, u.u_s1, u.u_s2, u.u_swap, u.u_total):
                d = factor.shape[0]
                assert np.abs(factor @ factor.conj().T - np.eye(d)).max() < 1e-12

    def test_total_matches_sequential_gate_application(self, rng):
        """Column-by-column check against an independent tensor-contraction
        route, for several random parameter draws."""
        for _ in range(5):
            p = params(
                g_se=rng.uniform(0, 0.3),
                g_ss=rng.uniform(0, 0.3),
                omega1=rng.uniform(0.5, 2),
                omega2=rng.uniform(0.5, 2),
                gamma=rng.uniform(0, math.pi / 2),
            )
            u = build_step_unitaries(p)
            gates = [
                (u.u_s1e1, (0, 2)),
                (u.u_s2e2, (1, 3)),
                (u.u_ss, (0, 1)),
                (u.u_s1, (0,)),
                (u.u_s2, (1,)),
                (u.u_swap, (3, 4)),
            ]
            for col in range(0, 64, 7):
                psi = np.zeros(64, dtype=complex)
                psi[col] = 1.0
                for op, targets in gates:
                    psi = apply_gate(op, psi, list(targets), 6)
                assert np.abs(psi - u.u_total[:, col]).max() < 1e-12


class TestStep:
    def test_single_step_against_bruteforce(self):
        """One full step recomputed from scratch: explicit six-spin state,
        independent unitary route, brute-force marginals."""
        p = params()
        init = InitialStateSpec()
        u = build_step_unitaries(p)
        state = initial_carried_state(init, p)
        new_state, rec = step(state, u, p)

        ground = np.diag([1.0, 0.0]).astype(complex)
        rho6 = kron(state.joint.mat, ground, ground)
        gates = [
            (u.u_s1e1, (0, 2)),
            (u.u_s2e2, (1, 3)),
            (u.u_ss, (0, 1)),
            (u.u_s1, (0,)),
            (u.u_s2, (1,)),
            (u.u_swap, (3, 4)),
        ]
        u_ref = np.eye(64, dtype=complex)
        for col in range(64):
            psi = np.zeros(64, dtype=complex)
            psi[col] = 1.0
            for op, targets in gates:
                psi = apply_gate(op, psi, list(targets), 6)
            u_ref[:, col] = psi
        rho6 = u_ref @ rho6 @ u_ref.conj().T
        rho_sys = ptrace_bruteforce(rho6, 6, [0, 1])
        assert abs(rec.sx1 - np.trace(rho_sys @ kron(PAULI_X, IDENTITY_2)).real) < 1e-12
        assert abs(rec.sx2 - np.trace(rho_sys @ kron(IDENTITY_2, PAULI_X)).real) < 1e-12
        assert abs(rec.sy1 - np.trace(rho_sys @ kron(PAULI_Y, IDENTITY_2)).real) < 1e-12
        assert abs(rec.sz2 - np.trace(rho_sys @ kron(IDENTITY_2, PAULI_Z)).real) < 1e-12
        assert abs(rec.concurrence - concurrence(rho_sys)) < 1e-12
        assert abs(rec.mutual_info - mutual_information(rho_sys)) < 1e-12
        carried_ref = ptrace_bruteforce(rho6, 6, [0, 1, 4, 5])
        assert np.abs(new_state.joint.mat - carried_ref).max() < 1e-12

    def test_free_precession_both_strategies(self):
        for strategy in (Strategy.KEEP, Strategy.ERASE):
            p = params(g_se=0.0, g_ss=0.0, gamma=0.4, strategy=strategy)
            traj = run_trajectory(InitialStateSpec(), p, 50)
            n = np.arange(1, 51)
            assert np.abs(traj.series("sx1") - np.cos(n * 0.2)).max() < 1e-10
            assert np.abs(traj.series("sy1") - (-np.sin(n * 0.2))).max() < 1e-10
            assert np.abs(traj.series("sx2") - np.cos(n * 0.22)).max() < 1e-10

    def test_phase_sign_against_explicit_conjugation(self):
        # one explicit 2x2 conjugation pins the precession direction
        p = params(g_se=0.0, g_ss=0.0, gamma=0.0)
        u1 = build_step_unitaries(p).u_s1
        plus = np.full((2, 2), 0.5, dtype=complex)
        rotated = u1 @ plus @ u1.conj().T
        traj = run_trajectory(InitialStateSpec(), p, 1)
        assert abs(traj.records[0].sy1 - np.trace(rotated @ PAULI_Y).real) < 1e-14

    def test_swapless_keep_run_stays_product(self):
        # gamma = 0 leaves the forthcoming pair untouched by the step unitary
        p = params(gamma=0.0)
        u = build_step_unitaries(p)
        state = initial_carried_state(InitialStateSpec(), p)
        ground = np.diag([1.0, 0.0]).astype(complex)
        for _ in range(5):
            state, _ = step(state, u, p)
            sys_pair = partial_trace(state.joint, ("s1", "s2"))
            expected = kron(sys_pair.mat, ground, ground)
            assert np.abs(state.joint.mat - expected).max() < 1e-12

    def test_purity_conserved_without_system_environment_coupling(self):
        p = params(g_se=0.0)
        u = build_step_unitaries(p)
        state = initial_carried_state(InitialStateSpec(), p)
        purities = []
        for _ in range(100):
            state, _ = step(state, u, p)
            rho_sys = partial_trace(state.joint, ("s1", "s2")).mat
            purities.append(np.trace(rho_sys @ rho_sys).real)
        assert max(purities) - min(purities) < 1e-10

    def test_strategies_agree_when_spins_are_uncoupled(self):
        # with no direct coupling and no environment swap nothing links the
        # spins, so keeping or erasing correlations cannot matter locally
        series = {}
        for strategy in (Strategy.KEEP, Strategy.ERASE):
            p = params(g_ss=0.0, gamma=0.0, strategy=strategy, temp1=0.7, temp2=1.2)
            traj = run_trajectory(InitialStateSpec(theta1=0.3, phi1=0.5, theta2=0.9), p, 200)
            series[strategy] = np.stack(
                [traj.series(name) for name in ("sx1", "sy1", "sz1", "sx2", "sy2", "sz2")]
            )
        assert np.abs(series[Strategy.KEEP] - series[Strategy.ERASE]).max() < 1e-10

    def test_exchange_symmetry_without_env_swap(self):
        forward = params(g_ss=0.03, gamma=0.0, omega1=1.0, omega2=1.3, temp1=0.5, temp2=2.0)
        swapped = params(g_ss=0.03, gamma=0.0, omega1=1.3, omega2=1.0, temp1=2.0, temp2=0.5)
        init_f = InitialStateSpec(theta1=0.3, phi1=0.7, theta2=1.1, phi2=0.2)
        init_s = InitialStateSpec(theta1=1.1, phi1=0.2, theta2=0.3, phi2=0.7)
        traj_f = run_trajectory(init_f, forward, 120)
        traj_s = run_trajectory(init_s, swapped, 120)
        assert np.abs(traj_f.series("sx1") - traj_s.series("sx2")).max() < 1e-10
        assert np.abs(traj_f.series("sx2") - traj_s.series("sx1")).max() < 1e-10

    def test_stored_invariants_over_many_steps(self):
        for strategy in (Strategy.KEEP, Strategy.ERASE):
            p = params(strategy=strategy)
            u = build_step_unitaries(p)
            state = initial_carried_state(InitialStateSpec(), p)
            for _ in range(600):
                state, _ = step(state, u, p)
            for dm in state.stored_matrices():
                dm.check(trace_tol=1e-10, herm_tol=1e-10, psd_tol=1e-8)

    def test_strategy_mismatch_rejected(self):
        p = params()
        u = build_step_unitaries(p)
        state = initial_carried_state(InitialStateSpec(), params(strategy=Strategy.ERASE))
        with pytest.raises(ValueError, match="carried state"):
            step(state, u, p)

    def test_records_count_from_one(self):
        traj = run_trajectory(InitialStateSpec(), params(), 3)
        assert [r.n for r in traj.records] == [1, 2, 3]

    def test_trajectory_base_case_matches_step(self):
        p = params()
        u = build_step_unitaries(p)
        _, rec = step(initial_carried_state(InitialStateSpec(), p), u, p)
        traj = run_trajectory(InitialStateSpec(), p, 1)
        assert traj.records[0] == rec

    def test_expectation_series_matches_trajectory(self):
        p = params(strategy=Strategy.ERASE, temp1=0.3)
        traj = run_trajectory(InitialStateSpec(), p, 40)
        x1, x2 = run_expectation_series(InitialStateSpec(), p, 40)
        assert np.abs(traj.series("sx1") - x1).max() == 0.0
        assert np.abs(traj.series("sx2") - x2).max() == 0.0

    def test_rejects_bad_n_max(self):
        with pytest.raises(ValueError, match="n_max"):
            run_trajectory(InitialStateSpec(), params(), 0)


class TestStepChannel:
    def test_rejects_erase_strategy(self):
        p = params(strategy=Strategy.ERASE)
        u = build_step_unitaries(p)
        with pytest.raises(ValueError, match="keep strategy"):
            build_step_channel(u, p)

    def test_preserves_trace(self):
        p = params()
        chan = build_step_channel(build_step_unitaries(p), p)
        out = chan.apply(np.eye(16, dtype=complex) / 16)
        assert abs(np.trace(out) - 1.0) < 1e-12

    def test_iteration_matches_direct_steps(self):
        p = params()
        u = build_step_unitaries(p)
        chan = build_step_channel(u, p)
        state = initial_carried_state(InitialStateSpec(), p)
        mat = state.joint.mat
        for _ in range(50):
            state, _ = step(state, u, p)
            mat = chan.apply(mat)
        assert np.abs(mat - state.joint.mat).max() < 1e-10

    def test_identity_on_system_block_when_generators_vanish(self, rng):
        p = params(g_se=0.0, g_ss=0.0, omega1=0.0, omega2=0.0, gamma=0.77)
        chan = build_step_channel(build_step_unitaries(p), p)
        rho = random_density(rng, 16)
        before = ptrace_bruteforce(rho, 4, [0, 1])
        after = ptrace_bruteforce(chan.apply(rho), 4, [0, 1])
        assert np.abs(before - after).max() < 1e-12

    def test_evolve_series_matches_apply_loop(self, rng):
        p = params()
        chan = build_step_channel(build_step_unitaries(p), p)
        x1 = kron(PAULI_X, IDENTITY_2, IDENTITY_2, IDENTITY_2)
        rho = initial_carried_state(InitialStateSpec(), p).joint.mat
        series, final = chan.evolve_series(rho, 20, [x1])
        mat = rho
        expected = []
        for _ in range(20):
            mat = chan.apply(mat)
            expected.append(np.trace(mat @ x1).real)
        assert np.abs(series[:, 0] - np.array(expected)).max() < 1e-12
        assert np.abs(final - mat).max() < 1e-12
