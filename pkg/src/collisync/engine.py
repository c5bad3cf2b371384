"""Repeated-collision evolution of two spins coupled to interacting spin streams.

One step acts on the six-spin register (s1, s2, e1, e2, f1, f2), where e1/e2
are the environment spins colliding now and f1/f2 are the forthcoming pair:

  (i)   s1-e1 and s2-e2 collide through an XX exchange;
  (ii)  s1-s2 couple through an Ising interaction;
  (iii) s1 and s2 precess freely while e2 partially swaps with f1;
  (iv)  e1 and e2 are traced out and the remainder is carried to the next
        step, either keeping the established correlations (a joint four-spin
        state) or erasing them (a product of the three marginals).

The partial swap in (iii) is the only channel through which information can
travel between the two otherwise independent environment streams.

A trajectory advances strictly sequentially and owns its carried state;
independent trajectories share only the immutable parameter and unitary
objects and may run fully in parallel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SWAP_2,
    TRACE_TOL,
    DensityMatrix,
    NumericalDriftError,
    embed,
    kron,
    ptrace_mat,
    unitary_from_hamiltonian,
)
from .observables import concurrence, mutual_information

__all__ = [
    "LAYOUT",
    "CARRIED_LABELS",
    "Strategy",
    "ModelParams",
    "InitialStateSpec",
    "StepUnitaries",
    "CarriedState",
    "StepRecord",
    "Trajectory",
    "build_step_unitaries",
    "thermal_state",
    "initial_carried_state",
    "step",
    "run_trajectory",
    "run_expectation_series",
    "StepChannel",
    "build_step_channel",
]

LAYOUT = ("s1", "s2", "e1", "e2", "f1", "f2")
CARRIED_LABELS = ("s1", "s2", "e1", "e2")

_POS_SYS = (0, 1)
_POS_KEEP = (0, 1, 4, 5)  # system pair plus the forthcoming environment pair
_HERM_STEP_TOL = 1e-10

_XX_YY = 0.5 * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y))
_XX = 0.5 * np.kron(PAULI_X, PAULI_X)

# single-spin Paulis lifted to the recorded two-spin system state
_OBS4 = {
    (axis, sub): kron(op, IDENTITY_2) if sub == 0 else kron(IDENTITY_2, op)
    for axis, op in (("x", PAULI_X), ("y", PAULI_Y), ("z", PAULI_Z))
    for sub in (0, 1)
}


class Strategy(enum.Enum):
    """What survives the end-of-step repack."""

    KEEP = "keep"
    ERASE = "erase"


@dataclass(frozen=True)
class ModelParams:
    """All physical knobs of one collision step.

    Couplings are dimensionless angle products: ``g_se`` for the
    system-environment exchange and ``g_ss`` for the direct system-system
    interaction.  Self-energies ``omega1``/``omega2`` and the free-evolution
    duration ``dt_s`` stay separate because the self-energies also set the
    thermal populations of the environment spins.  ``gamma`` in [0, pi/2] is
    the partial-swap strength; ``temp1``/``temp2`` are the reservoir
    temperatures feeding the two environment streams (Boltzmann constant 1).
    """

    g_se: float
    g_ss: float
    omega1: float
    omega2: float
    dt_s: float
    gamma: float
    temp1: float = 0.0
    temp2: float = 0.0
    strategy: Strategy = Strategy.KEEP

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= math.pi / 2:
            raise ValueError(f"gamma must lie in [0, pi/2], got {self.gamma}")
        if self.temp1 < 0 or self.temp2 < 0:
            raise ValueError("temperatures must be non-negative")
        if self.dt_s <= 0:
            raise ValueError("dt_s must be positive")
        if not isinstance(self.strategy, Strategy):
            raise TypeError(f"strategy must be a Strategy, got {self.strategy!r}")


@dataclass(frozen=True)
class InitialStateSpec:
    """Product state of the two system spins.

    Spin k starts in cos(theta_k)|0> + exp(i phi_k) sin(theta_k)|1>; the
    defaults put both spins on the +x axis of the Bloch sphere.
    """

    theta1: float = math.pi / 4
    phi1: float = 0.0
    theta2: float = math.pi / 4
    phi2: float = 0.0

    def ket(self, which: int) -> np.ndarray:
        theta, phi = ((self.theta1, self.phi1), (self.theta2, self.phi2))[which - 1]
        return np.array([math.cos(theta), np.exp(1j * phi) * math.sin(theta)])

    def system_state(self) -> np.ndarray:
        """4x4 density matrix of the s1 (x) s2 product."""
        joint = np.kron(self.ket(1), self.ket(2))
        return np.outer(joint, joint.conj())


@dataclass(frozen=True, eq=False)
class StepUnitaries:
    """The per-step unitaries and their embedded six-spin product.

    ``u_total`` composes the factors right-to-left: the two exchange
    collisions act first, then the Ising coupling, then the free rotations
    together with the environment partial swap.
    """

    u_s1e1: np.ndarray
    u_s2e2: np.ndarray
    u_ss: np.ndarray
    u_s1: np.ndarray
    u_s2: np.ndarray
    u_swap: np.ndarray
    u_total: np.ndarray


@dataclass(frozen=True, eq=False)
class CarriedState:
    """State passed between steps.

    Keep strategy: one joint state on (s1, s2, e1, e2), where e1/e2 hold the
    forthcoming pair of the previous step.  Erase strategy: the three
    marginals, stored as a product.
    """

    strategy: Strategy
    joint: DensityMatrix | None = None
    sys1: DensityMatrix | None = None
    sys2: DensityMatrix | None = None
    env_pair: DensityMatrix | None = None
    n_done: int = 0

    def __post_init__(self) -> None:
        if self.strategy is Strategy.KEEP:
            if self.joint is None or self.joint.n_spins != 4:
                raise ValueError("keep strategy carries one four-spin joint state")
        else:
            ok = (
                self.sys1 is not None
                and self.sys1.n_spins == 1
                and self.sys2 is not None
                and self.sys2.n_spins == 1
                and self.env_pair is not None
                and self.env_pair.n_spins == 2
            )
            if not ok:
                raise ValueError(
                    "erase strategy carries two single-spin and one two-spin state"
                )

    def stored_matrices(self) -> tuple[DensityMatrix, ...]:
        if self.strategy is Strategy.KEEP:
            return (self.joint,)
        return (self.sys1, self.sys2, self.env_pair)


@dataclass(frozen=True)
class StepRecord:
    """Observables of the system pair right after one step's unitary."""

    n: int
    sx1: float
    sx2: float
    sy1: float
    sy2: float
    sz1: float
    sz2: float
    concurrence: float
    mutual_info: float


@dataclass(frozen=True)
class Trajectory:
    """Per-collision records; record k corresponds to collision N = k + 1."""

    records: tuple[StepRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def series(self, name: str) -> np.ndarray:
        """Column of the trajectory as an array, e.g. ``series("sx1")``."""
        return np.array([getattr(r, name) for r in self.records])


def build_step_unitaries(params: ModelParams) -> StepUnitaries:
    """Generate all step unitaries from the model parameters.

    The exchange, Ising and free factors come from the spectral exponential
    of their Hermitian generators; the partial swap is assembled directly
    from its closed form cos(gamma) I + i sin(gamma) SWAP.
    """
    u_se = unitary_from_hamiltonian(_XX_YY, params.g_se)
    u_ss = unitary_from_hamiltonian(_XX, params.g_ss)
    u_s1 = unitary_from_hamiltonian(-0.5 * params.omega1 * PAULI_Z, params.dt_s)
    u_s2 = unitary_from_hamiltonian(-0.5 * params.omega2 * PAULI_Z, params.dt_s)
    u_swap = math.cos(params.gamma) * np.eye(4, dtype=complex) + 1j * math.sin(
        params.gamma
    ) * SWAP_2
    u_total = (
        embed(u_swap, 6, (3, 4))
        @ embed(u_s2, 6, (1,))
        @ embed(u_s1, 6, (0,))
        @ embed(u_ss, 6, (0, 1))
        @ embed(u_se, 6, (1, 3))
        @ embed(u_se, 6, (0, 2))
    )
    return StepUnitaries(
        u_s1e1=u_se,
        u_s2e2=u_se,
        u_ss=u_ss,
        u_s1=u_s1,
        u_s2=u_s2,
        u_swap=u_swap,
        u_total=u_total,
    )


def _thermal_mat(temp: float, omega: float) -> np.ndarray:
    if temp < 0:
        raise ValueError(f"temperature must be non-negative, got {temp}")
    if temp == 0:
        # |0> is the ground state for any positive self-energy and the
        # omega -> 0 limit; a negative one would flip the ground state
        if omega < 0:
            raise ValueError(f"self-energy must be non-negative, got {omega}")
        return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    if omega <= 0:
        raise ValueError(f"self-energy must be positive, got {omega}")
    # Gibbs weights of H = -(omega/2) sigma_z, so |0> is the ground state
    q = math.exp(-omega / temp)
    p0 = 1.0 / (1.0 + q)
    return np.array([[p0, 0.0], [0.0, 1.0 - p0]], dtype=complex)


def thermal_state(temp: float, omega: float, label: str = "e") -> DensityMatrix:
    """Single-spin Gibbs state at temperature ``temp`` (ground state |0> at 0)."""
    return DensityMatrix(_thermal_mat(temp, omega), (label,))


def _fresh_pair(params: ModelParams) -> np.ndarray:
    """4x4 product of fresh thermal spins for the two environment streams."""
    return np.kron(
        _thermal_mat(params.temp1, params.omega1),
        _thermal_mat(params.temp2, params.omega2),
    )


def initial_carried_state(init: InitialStateSpec, params: ModelParams) -> CarriedState:
    """System product state with fresh thermal spins in all environment slots."""
    sys_mat = init.system_state()
    f1 = _thermal_mat(params.temp1, params.omega1)
    f2 = _thermal_mat(params.temp2, params.omega2)
    if params.strategy is Strategy.KEEP:
        joint = DensityMatrix(kron(sys_mat, f1, f2), CARRIED_LABELS)
        return CarriedState(strategy=Strategy.KEEP, joint=joint.check())
    k1 = init.ket(1)
    k2 = init.ket(2)
    return CarriedState(
        strategy=Strategy.ERASE,
        sys1=DensityMatrix(np.outer(k1, k1.conj()), ("s1",)).check(),
        sys2=DensityMatrix(np.outer(k2, k2.conj()), ("s2",)).check(),
        env_pair=DensityMatrix(np.kron(f1, f2), ("e1", "e2")).check(),
    )


def _evolve_full(rho6: np.ndarray, u_total: np.ndarray) -> np.ndarray:
    """Conjugate by the step unitary, re-Hermitize, and verify invariants."""
    rho6 = u_total @ rho6 @ u_total.conj().T
    herm_dev = float(np.abs(rho6 - rho6.conj().T).max())
    if herm_dev > _HERM_STEP_TOL:
        raise NumericalDriftError(
            f"Hermiticity drift {herm_dev:.3e} after collision unitary"
        )
    rho6 = 0.5 * (rho6 + rho6.conj().T)
    tr_dev = abs(float(np.trace(rho6).real) - 1.0)
    if tr_dev > TRACE_TOL:
        raise NumericalDriftError(f"trace drift {tr_dev:.3e} after collision unitary")
    return rho6


def _advance(
    state: CarriedState, u_total: np.ndarray, fresh: np.ndarray
) -> tuple[CarriedState, np.ndarray]:
    """One full step; returns the repacked state and the post-unitary system
    marginal (recorded before anything is discarded)."""
    if state.strategy is Strategy.KEEP:
        rho6 = np.kron(state.joint.mat, fresh)
        rho6 = _evolve_full(rho6, u_total)
        rho_sys = ptrace_mat(rho6, 6, _POS_SYS)
        carried = DensityMatrix(ptrace_mat(rho6, 6, _POS_KEEP), CARRIED_LABELS)
        new_state = CarriedState(
            strategy=Strategy.KEEP, joint=carried.check(), n_done=state.n_done + 1
        )
        return new_state, rho_sys

    rho6 = kron(state.sys1.mat, state.sys2.mat, state.env_pair.mat, fresh)
    rho6 = _evolve_full(rho6, u_total)
    rho_sys = ptrace_mat(rho6, 6, _POS_SYS)
    # Product repack: each factor is divided by its computed trace.  All
    # three marginals inherit the full state's trace rounding, so the bare
    # product would cube that error every step and the run could not stay
    # within tolerance; genuine drift is still caught in _evolve_full before
    # this point.
    m1 = ptrace_mat(rho6, 6, (0,))
    m2 = ptrace_mat(rho6, 6, (1,))
    menv = ptrace_mat(rho6, 6, (4, 5))
    m1 /= np.trace(m1).real
    m2 /= np.trace(m2).real
    menv /= np.trace(menv).real
    new_state = CarriedState(
        strategy=Strategy.ERASE,
        sys1=DensityMatrix(m1, ("s1",)).check(),
        sys2=DensityMatrix(m2, ("s2",)).check(),
        env_pair=DensityMatrix(menv, ("e1", "e2")).check(),
        n_done=state.n_done + 1,
    )
    return new_state, rho_sys


def _expect(rho_sys: np.ndarray, axis: str, sub: int) -> float:
    return float(np.einsum("ij,ji->", rho_sys, _OBS4[(axis, sub)]).real)


def _full_record(n: int, rho_sys: np.ndarray) -> StepRecord:
    return StepRecord(
        n=n,
        sx1=_expect(rho_sys, "x", 0),
        sx2=_expect(rho_sys, "x", 1),
        sy1=_expect(rho_sys, "y", 0),
        sy2=_expect(rho_sys, "y", 1),
        sz1=_expect(rho_sys, "z", 0),
        sz2=_expect(rho_sys, "z", 1),
        concurrence=concurrence(rho_sys),
        mutual_info=mutual_information(rho_sys),
    )


def step(
    state: CarriedState, u: StepUnitaries, params: ModelParams
) -> tuple[CarriedState, StepRecord]:
    """Advance the carried state by one collision and record the observables."""
    if state.strategy is not params.strategy:
        raise ValueError(
            f"carried state uses {state.strategy}, parameters say {params.strategy}"
        )
    new_state, rho_sys = _advance(state, u.u_total, _fresh_pair(params))
    return new_state, _full_record(new_state.n_done, rho_sys)


def run_trajectory(
    init: InitialStateSpec, params: ModelParams, n_max: int
) -> Trajectory:
    """Run ``n_max`` sequential collisions with full per-step records."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    u = build_step_unitaries(params)
    fresh = _fresh_pair(params)
    state = initial_carried_state(init, params)
    records = []
    for _ in range(n_max):
        state, rho_sys = _advance(state, u.u_total, fresh)
        records.append(_full_record(state.n_done, rho_sys))
    return Trajectory(tuple(records))


def run_expectation_series(
    init: InitialStateSpec, params: ModelParams, n_max: int, axis: str = "x"
) -> tuple[np.ndarray, np.ndarray]:
    """Per-collision <sigma_axis> of both system spins, without the
    correlation measures (the cheap runner behind parameter sweeps)."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    u = build_step_unitaries(params)
    fresh = _fresh_pair(params)
    state = initial_carried_state(init, params)
    out1 = np.empty(n_max)
    out2 = np.empty(n_max)
    for k in range(n_max):
        state, rho_sys = _advance(state, u.u_total, fresh)
        out1[k] = _expect(rho_sys, axis, 0)
        out2[k] = _expect(rho_sys, axis, 1)
    return out1, out2


@dataclass(frozen=True, eq=False)
class StepChannel:
    """Matrix form of the linear map one keep-strategy step applies to the
    carried 16x16 state (row-major vectorization)."""

    matrix: np.ndarray

    def apply(self, mat16: np.ndarray) -> np.ndarray:
        mat16 = np.asarray(mat16, dtype=complex)
        return (self.matrix @ mat16.reshape(-1)).reshape(16, 16)

    def evolve_series(
        self, mat16: np.ndarray, n_steps: int, observables: list[np.ndarray]
    ) -> tuple[np.ndarray, np.ndarray]:
        """Iterate the channel, tracing each observable against the carried
        state after every application.

        Returns ``(series, final)`` where ``series[k, j]`` is observable j
        after k + 1 steps.  Dispatches to the compiled kernel when built.
        """
        state = np.asarray(mat16, dtype=complex).reshape(-1)
        # Tr[rho A] = vec(rho) . vec(A^T)
        obs_rows = np.ascontiguousarray(
            np.stack([np.asarray(a, dtype=complex).T.reshape(-1) for a in observables])
        )
        series, final = kernels.iterate_channel(
            np.ascontiguousarray(self.matrix), state, obs_rows, n_steps
        )
        return series, final.reshape(16, 16)


def build_step_channel(u: StepUnitaries, params: ModelParams) -> StepChannel:
    """Assemble the 256x256 step map by pushing each matrix unit through one
    keep-strategy step (fresh pair attached, unitary applied, used pair
    traced out)."""
    if params.strategy is not Strategy.KEEP:
        raise ValueError(
            "the step channel exists only for the keep strategy; the erasing "
            "repack is not linear on the joint carried state"
        )
    fresh = _fresh_pair(params)
    ud = u.u_total.conj().T
    matrix = np.empty((256, 256), dtype=complex)
    unit = np.zeros((16, 16), dtype=complex)
    for r in range(16):
        for c in range(16):
            unit[r, c] = 1.0
            rho6 = u.u_total @ np.kron(unit, fresh) @ ud
            matrix[:, r * 16 + c] = ptrace_mat(rho6, 6, _POS_KEEP).reshape(-1)
            unit[r, c] = 0.0
    return StepChannel(matrix)
