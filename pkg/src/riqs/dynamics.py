"""Trajectory engine: repeated-interaction stepping against fresh chain
elements, with energy bookkeeping and instantaneous (sliding-window)
observables.

Each step adjoins one fresh element in its Gibbs state, evolves the coupled
system for the interaction duration, and traces the element out; elements
never re-interact, so this contraction is exact.  Windowed observables with
depth ``l >= 1`` require keeping the last ``l`` elements untraced; the engine
supports a configurable retention depth (default 1).  Retained spectator
elements evolve freely while the current collision runs.

Only stroboscopic states at step boundaries are recorded; continuous-time
sampling within a step is not.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg, rdo
from .models import (
    BathModes,
    DensityMatrix,
    ModelSpec,
    SIGMA_X,
    bath_field_operator,
    bath_hamiltonian,
    build_step_hamiltonian,
    spin_spin_interaction,
)

__all__ = [
    "InstantaneousObservable",
    "EnergyRecords",
    "Trajectory",
    "step",
    "evolve",
    "instantaneous_expectation",
]


@dataclass(frozen=True)
class InstantaneousObservable:
    """A train of fixed observables sliding along the chain.

    ``a_sr`` acts on the system (or system + bath); ``past`` holds the window
    operators (B_{-l}, ..., B_0) on the elements up to and including the one
    currently interacting; ``future`` holds (B_1, ..., B_r) on elements that
    have not yet interacted.
    """

    a_sr: np.ndarray
    past: tuple[np.ndarray, ...]
    future: tuple[np.ndarray, ...] = ()
    label: str = ""

    def __post_init__(self):
        if len(self.past) < 1:
            raise ValueError("past window must contain at least B_0")

    @property
    def depth(self) -> int:
        """Number of already-interacted elements covered (l)."""
        return len(self.past) - 1

    @property
    def horizon(self) -> int:
        """Number of future elements covered (r)."""
        return len(self.future)


@dataclass
class EnergyRecords:
    """Per-boundary and per-step expectation bookkeeping for the ledger.

    Boundary arrays have length ``steps + 1``; per-step arrays ``steps``.
    ``v_se_*`` store the bare exchange-operator expectation (the coupling
    constant is applied in the ledger).  ``reservoir_effective`` is the energy
    transferred to the reservoir during the effective bath substep.
    """

    h_system: np.ndarray
    h_bath: np.ndarray
    v_sr: np.ndarray
    delta_chain: np.ndarray
    v_se_end: np.ndarray
    v_se_fresh: np.ndarray
    reservoir_effective: np.ndarray
    mode: str


@dataclass
class Trajectory:
    """Recorded repeated-interaction run."""

    states: list[DensityMatrix]
    window_states: list[np.ndarray | None]
    window_dims: list[tuple[int, ...] | None]
    energy: EnergyRecords | None
    observable_values: dict[str, np.ndarray] = field(default_factory=dict)
    retention: int = 0
    mode: str = "chain"
    model: ModelSpec | None = None

    @property
    def steps(self) -> int:
        return len(self.states) - 1


def _element_phase(model: ModelSpec) -> np.ndarray:
    return np.diag([1.0, np.exp(-1j * model.tau * model.E_E)]).astype(complex)


def step(
    state: DensityMatrix,
    model: ModelSpec,
    modes: BathModes | None = None,
    unitary: np.ndarray | None = None,
) -> DensityMatrix:
    """One exact interaction step of the system (+ bath) state.

    Couples a fresh element in its Gibbs state, evolves by the step unitary,
    traces the element out.  Trace and positivity are preserved.
    """
    if modes is None:
        modes = BathModes(np.zeros(0), np.zeros(0), np.zeros(0))
    d_sb = 2 * 2**modes.n_modes
    if state.dim != d_sb:
        raise ValueError(
            f"state dimension {state.dim} != system+bath dimension {d_sb}"
        )
    if unitary is None:
        unitary = linalg.expm_unitary(build_step_hamiltonian(model, modes), model.tau)
    joint = np.kron(state.matrix, model.element_state().matrix)
    joint = unitary @ joint @ unitary.conj().T
    out = linalg.partial_trace(joint, (d_sb, 2), keep=(0,))
    return DensityMatrix(out, state.dims)


def _chain_step_covectors(model: ModelSpec):
    """Linear functionals of the pre-collision system state used by the
    bookkeeping: end-of-step exchange energy, element energy, and the fresh
    exchange expectation (identically zero for diagonal element states)."""
    chan = rdo.chain_channel(model)
    h4 = build_step_hamiltonian(
        _no_reservoir(model), BathModes(np.zeros(0), np.zeros(0), np.zeros(0))
    )
    u4 = linalg.expm_unitary(h4, model.tau)
    rho_e = model.element_state().matrix
    v = spin_spin_interaction()
    h_e_full = linalg.kron(np.eye(2, dtype=complex), model.h_element())
    f_vend = np.empty(4, dtype=complex)
    f_hend = np.empty(4, dtype=complex)
    f_vfresh = np.empty(4, dtype=complex)
    for j in range(4):
        e = linalg.unvec(np.eye(4, dtype=complex)[:, j], 2)
        joint = np.kron(e, rho_e)
        evolved = u4 @ joint @ u4.conj().T
        f_vend[j] = np.trace(evolved @ v)
        f_hend[j] = np.trace(evolved @ h_e_full)
        f_vfresh[j] = np.trace(joint @ v)
    return chan.matrix, f_vend, f_hend, f_vfresh


def _no_reservoir(model: ModelSpec) -> ModelSpec:
    return dataclasses.replace(model, lambda1=0.0)


def _evolve_fast(
    initial: DensityMatrix,
    steps: int,
    model: ModelSpec,
    effective_bath: bool,
    include_chain: bool,
    mode: str,
) -> Trajectory:
    """Covector fast path for two-level trajectories without retention.

    Exactly equivalent to the explicit engine: every recorded quantity is a
    linear functional of the state, precomputed once.
    """
    if initial.dim != 2:
        raise ValueError(f"initial state dimension {initial.dim} != 2")
    m_bath = (
        rdo.bath_channel_effective(model).matrix
        if effective_bath
        else np.eye(4, dtype=complex)
    )
    if include_chain:
        m_chain, f_vend, f_hend, f_vfresh = _chain_step_covectors(model)
    else:
        m_chain = np.eye(4, dtype=complex)
        f_vend = f_hend = f_vfresh = np.zeros(4, dtype=complex)
    w_hs = linalg.vec(model.h_system()).conj()
    e_element = model.element_state().expectation(model.h_element()).real

    h_system = np.empty(steps + 1)
    delta_chain = np.empty(steps)
    v_se_end = np.empty(steps)
    v_se_fresh = np.empty(steps)
    reservoir_eff = np.empty(steps)
    states = [initial]
    rv = linalg.vec(initial.matrix)
    h_system[0] = np.real(w_hs @ rv)
    for k in range(steps):
        sv = m_bath @ rv
        reservoir_eff[k] = -(np.real(w_hs @ sv) - np.real(w_hs @ rv))
        if include_chain:
            v_se_fresh[k] = np.real(f_vfresh @ sv)
            v_se_end[k] = np.real(f_vend @ sv)
            delta_chain[k] = np.real(f_hend @ sv) - e_element
        else:
            v_se_fresh[k] = v_se_end[k] = delta_chain[k] = 0.0
        rv = m_chain @ sv
        h_system[k + 1] = np.real(w_hs @ rv)
        states.append(DensityMatrix(linalg.unvec(rv, 2), (2,)))
    energy = EnergyRecords(
        h_system=h_system,
        h_bath=np.zeros(steps + 1),
        v_sr=np.zeros(steps + 1),
        delta_chain=delta_chain,
        v_se_end=v_se_end,
        v_se_fresh=v_se_fresh,
        reservoir_effective=reservoir_eff,
        mode=mode,
    )
    return Trajectory(
        states=states,
        window_states=[None] * (steps + 1),
        window_dims=[None] * (steps + 1),
        energy=energy,
        retention=0,
        mode=mode,
        model=model,
    )


def evolve(
    initial: DensityMatrix,
    steps: int,
    model: ModelSpec,
    modes: BathModes | None = None,
    *,
    effective_bath: bool = False,
    include_chain: bool = True,
    retention: int = 1,
    observables: Sequence[InstantaneousObservable] = (),
    validate_states: bool = False,
    state_tol: float = 1e-9,
) -> Trajectory:
    """Run ``steps`` repeated-interaction steps and record the trajectory.

    Parameters
    ----------
    initial:
        State of the system alone (``effective_bath`` or no modes) or of
        system (x) bath (exact reservoir path).
    modes:
        Discretized reservoir; ``None`` or zero modes selects the chain-only
        exact path.
    effective_bath:
        Replace the microscopic reservoir by the weak-coupling one-step
        channel acting before each collision.
    include_chain:
        Disable to propagate the bath substep alone ("bath-only").
    retention:
        Number of past elements kept untraced for windowed observables.
    observables:
        Instantaneous observables evaluated at every step where their window
        fits; values are recorded under their labels.

    Two runs with identical inputs produce bitwise-identical records.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    observables = tuple(observables)
    if effective_bath and modes is not None and modes.n_modes > 0:
        raise ValueError("effective_bath replaces the microscopic bath; drop modes")
    n_modes = 0 if modes is None else modes.n_modes
    exact_bath = not effective_bath and n_modes > 0
    if effective_bath:
        mode = "effective" if include_chain else "bath-only"
    else:
        mode = "exact" if exact_bath else "chain"
    if not include_chain and not effective_bath:
        raise ValueError("include_chain=False requires the effective bath substep")

    need_windows = retention > 0 or any(o.depth > 0 for o in observables)
    max_depth = max((o.depth for o in observables), default=0)
    if max_depth > retention:
        raise ValueError(
            f"observable window depth {max_depth} exceeds retention {retention}"
        )
    if not exact_bath and not need_windows and not observables:
        return _evolve_fast(initial, steps, model, effective_bath, include_chain, mode)

    # --- explicit windowed engine ---
    base_dims: tuple[int, ...] = (2,) if not exact_bath else (2, 2**n_modes)
    d_base = int(np.prod(base_dims))
    if initial.dim != d_base:
        raise ValueError(f"initial state dimension {initial.dim} != {d_base}")
    n_base = len(base_dims)

    if exact_bath:
        u_step = linalg.expm_unitary(build_step_hamiltonian(model, modes), model.tau)
        h_bath_op = bath_hamiltonian(modes)
        v_sr_op = (
            linalg.kron(SIGMA_X, bath_field_operator(modes))
            if model.lambda1 != 0.0
            else None
        )
    else:
        u_step = linalg.expm_unitary(
            build_step_hamiltonian(
                _no_reservoir(model), BathModes(np.zeros(0), np.zeros(0), np.zeros(0))
            ),
            model.tau,
        )
        h_bath_op = None
        v_sr_op = None
    m_bath = rdo.bath_channel_effective(model).matrix if effective_bath else None
    rho_e = model.element_state().matrix
    h_el = model.h_element()
    e_element = model.element_state().expectation(h_el).real
    phase_el = _element_phase(model)
    h_sys = model.h_system()
    # exchange operator on (system[, bath identity], fresh element)
    if n_base == 1:
        v_se_full = spin_spin_interaction()
        act_v = lambda fresh: (0, fresh)  # noqa: E731
    else:
        from .models import LOWERING, RAISING

        eye_b = np.eye(base_dims[1], dtype=complex)
        v_se_full = linalg.nkron([LOWERING, eye_b, RAISING]) + linalg.nkron(
            [RAISING, eye_b, LOWERING]
        )
        act_v = lambda fresh: (0, 1, fresh)  # noqa: E731

    h_system = np.empty(steps + 1)
    h_bath_rec = np.zeros(steps + 1)
    v_sr_rec = np.zeros(steps + 1)
    delta_chain = np.zeros(steps)
    v_se_end = np.zeros(steps)
    v_se_fresh = np.zeros(steps)
    reservoir_eff = np.zeros(steps)
    obs_values = {
        (o.label or f"obs{i}"): np.full(steps + 1, np.nan, dtype=complex)
        for i, o in enumerate(observables)
    }

    def record_boundary(k: int, rho_base: np.ndarray) -> None:
        h_system[k] = np.real(
            linalg.expectation_value(rho_base, base_dims, h_sys, (0,))
        )
        if h_bath_op is not None:
            h_bath_rec[k] = np.real(
                linalg.expectation_value(rho_base, base_dims, h_bath_op, (1,))
            )
        if v_sr_op is not None:
            v_sr_rec[k] = np.real(np.trace(rho_base @ v_sr_op))

    rho = np.asarray(initial.matrix, dtype=complex)
    dims: tuple[int, ...] = base_dims
    states = [DensityMatrix(rho.copy(), base_dims)]
    window_states: list[np.ndarray | None] = [None]
    window_dims: list[tuple[int, ...] | None] = [None]
    record_boundary(0, rho)

    for k in range(steps):
        if m_bath is not None:
            before = np.real(linalg.expectation_value(rho, dims, h_sys, (0,)))
            rho = linalg.apply_superop_on_factor(rho, dims, m_bath, 0)
            after = np.real(linalg.expectation_value(rho, dims, h_sys, (0,)))
            reservoir_eff[k] = -(after - before)
        if include_chain:
            # adjoin fresh element (product state), then evolve
            rho = np.kron(rho, rho_e)
            dims = dims + (2,)
            fresh = len(dims) - 1
            v_se_fresh[k] = np.real(
                linalg.expectation_value(rho, dims, v_se_full, act_v(fresh))
            )
            # spectator elements evolve freely during the collision
            for f in range(n_base, fresh):
                rho = linalg.conjugate_on_factors(rho, dims, phase_el, (f,))
            act = (0, fresh) if n_base == 1 else (0, 1, fresh)
            rho = linalg.conjugate_on_factors(rho, dims, u_step, act)
            v_se_end[k] = np.real(
                linalg.expectation_value(rho, dims, v_se_full, act_v(fresh))
            )
            delta_chain[k] = (
                np.real(linalg.expectation_value(rho, dims, h_el, (fresh,)))
                - e_element
            )
        # evaluate observables on the post-collision window
        for i, obs in enumerate(observables):
            label = obs.label or f"obs{i}"
            available = len(dims) - n_base - 1
            if obs.depth <= available and (k + 1) - obs.depth >= 1:
                obs_values[label][k + 1] = _window_expectation(
                    rho, dims, n_base, obs, model
                )
        if need_windows:
            window_states.append(rho.copy())
            window_dims.append(dims)
        else:
            window_states.append(None)
            window_dims.append(None)
        # trim to the retention depth
        excess = (len(dims) - n_base) - retention
        for _ in range(max(excess, 0)):
            keep = tuple(f for f in range(len(dims)) if f != n_base)
            rho = linalg.partial_trace(rho, dims, keep)
            dims = base_dims + dims[n_base + 1 :]
        rho_base = (
            linalg.partial_trace(rho, dims, tuple(range(n_base)))
            if len(dims) > n_base
            else rho
        )
        states.append(DensityMatrix(rho_base, base_dims))
        record_boundary(k + 1, rho_base)
        if validate_states:
            states[-1].validate(state_tol)

    energy = EnergyRecords(
        h_system=h_system,
        h_bath=h_bath_rec,
        v_sr=v_sr_rec,
        delta_chain=delta_chain,
        v_se_end=v_se_end,
        v_se_fresh=v_se_fresh,
        reservoir_effective=reservoir_eff,
        mode=mode,
    )
    return Trajectory(
        states=states,
        window_states=window_states,
        window_dims=window_dims,
        energy=energy,
        observable_values=obs_values,
        retention=retention,
        mode=mode,
        model=model,
    )


def _window_expectation(
    rho: np.ndarray,
    dims: tuple[int, ...],
    n_base: int,
    obs: InstantaneousObservable,
    model: ModelSpec,
) -> complex:
    """Expectation of a windowed observable on the stored joint state times
    the exact Gibbs factors of the future elements."""
    n_elem = len(dims) - n_base
    need = obs.depth + 1
    if need > n_elem:
        raise ValueError("window deeper than the retained element history")
    # trace out elements older than the window
    work, wdims = rho, dims
    for _ in range(n_elem - need):
        keep = tuple(f for f in range(len(wdims)) if f != n_base)
        work = linalg.partial_trace(work, wdims, keep)
        wdims = wdims[:n_base] + wdims[n_base + 1 :]
    full = linalg.nkron([obs.a_sr, *obs.past])
    val = complex(np.trace(work @ full))
    rho_e = model.element_state()
    for b in obs.future:
        val *= rho_e.expectation(b)
    return val


def instantaneous_expectation(
    traj: Trajectory, obs: InstantaneousObservable, m: int
) -> complex:
    """Expectation of an instantaneous observable at step ``m``.

    The past window is evaluated on the stored post-interaction joint state
    of the system (+ bath) with the last ``l + 1`` elements; each future
    factor contributes its expectation in the fresh-element Gibbs state, so
    the factorized form is exact at every step.
    """
    if m < 1 or m > traj.steps:
        raise ValueError(f"step {m} outside trajectory range 1..{traj.steps}")
    if m - obs.depth < 1:
        raise ValueError(
            f"window of depth {obs.depth} reaches before the first element at step {m}"
        )
    if obs.depth > 0 and obs.depth > traj.retention:
        raise ValueError(
            f"window depth {obs.depth} exceeds trajectory retention {traj.retention}"
        )
    if obs.depth == 0 and traj.window_states[m] is None:
        # no stored windows: reconstruct from the plain expectation when the
        # window is trivial on elements
        if all(_is_identity(b) for b in obs.past):
            val = complex(np.trace(traj.states[m].matrix @ obs.a_sr))
            rho_e = traj.model.element_state()
            for b in obs.future:
                val *= rho_e.expectation(b)
            return val
        raise ValueError(
            "trajectory stored no window states; rerun evolve with retention >= 1 "
            "or pass the observable to evolve"
        )
    rho = traj.window_states[m]
    dims = traj.window_dims[m]
    n_base = len(traj.states[0].dims)
    return _window_expectation(rho, dims, n_base, obs, traj.model)


def _is_identity(b: np.ndarray) -> bool:
    return b.shape[0] == b.shape[1] and np.allclose(b, np.eye(b.shape[0]), atol=1e-14)
