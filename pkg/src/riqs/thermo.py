"""Energy and entropy bookkeeping over recorded trajectories.

Per step, the ledger assembles the energy variations of the system, the
reservoir, and the chain, the total-energy jump carried by the moving
interaction, and the entropy-production increment.  Fluxes are computed from
expectation differences (the bookkeeping route); the commutator-integral flux
observables agree with them identically by the fundamental theorem of
calculus along the step, and are provided only as a coarse-quadrature
cross-check.

On exact system+bath runs the system-reservoir coupling energy is attributed
to the reservoir column (``dE_R = d<H_bath> + lambda1 * d<v_SR>``): this is
what unitarity of the step conserves, and it makes the per-step balance
``dE_tot = dE_S + dE_R + dE_C`` an exact identity.  The bare ``<H_bath>``
difference is recovered from the records; the two agree in the step average
because the coupling term telescopes and is bounded.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import Trajectory
from .models import DensityMatrix, ModelSpec, build_step_hamiltonian, BathModes, spin_spin_interaction

__all__ = ["FluxReport", "energy_ledger", "asymptotic_rates", "chain_step_flux_quadrature"]


@dataclass(frozen=True)
class FluxReport:
    """Per-step energy/entropy sequences and (optionally) their averages.

    ``dS`` applies the entropy-production formula
    ``(beta_R - beta_E) dE_R + beta_E dE_tot`` per step.  After
    :func:`asymptotic_rates` the averages are filled, together with the
    second-law cross-check ``beta_E dE_C + beta_R dE_R`` and the difference
    between the two entropy rates.
    """

    dE_S: np.ndarray
    dE_R: np.ndarray
    dE_C: np.ndarray
    dE_tot: np.ndarray
    dS: np.ndarray
    balance_residual: float
    beta_E: float
    beta_R: float
    mode: str
    burn_in: int | None = None
    avg_dE_S: float | None = None
    avg_dE_R: float | None = None
    avg_dE_C: float | None = None
    avg_dE_tot: float | None = None
    avg_dS: float | None = None
    avg_dS_second_law: float | None = None
    dS_consistency: float | None = None

    @property
    def steps(self) -> int:
        return int(self.dE_S.size)


def energy_ledger(traj: Trajectory, model: ModelSpec) -> FluxReport:
    """Assemble per-step energy variations from a recorded trajectory.

    ``dE_S`` comes from system-energy differences, ``dE_R`` from the
    reservoir bookkeeping of the trajectory mode, ``dE_C`` from the
    interacting element's energy gain, and ``dE_tot`` from the exchange
    interaction expectation jump ``lambda2 * (<v fresh> - <v end>)`` (the
    fresh-element expectation vanishes for product starts with diagonal
    element states).
    """
    rec = traj.energy
    if rec is None:
        raise ValueError("trajectory carries no energy bookkeeping")
    dE_S = np.diff(rec.h_system)
    if rec.mode == "exact":
        dE_R = np.diff(rec.h_bath) + model.lambda1 * np.diff(rec.v_sr)
    elif rec.mode in ("effective", "bath-only"):
        dE_R = rec.reservoir_effective.copy()
    else:
        dE_R = np.zeros_like(dE_S)
    dE_C = rec.delta_chain.copy()
    dE_tot = model.lambda2 * (rec.v_se_fresh - rec.v_se_end)
    residual = float(np.max(np.abs(dE_tot - (dE_S + dE_R + dE_C)))) if dE_S.size else 0.0
    dS = (model.beta_R - model.beta_E) * dE_R + model.beta_E * dE_tot
    return FluxReport(
        dE_S=dE_S,
        dE_R=dE_R,
        dE_C=dE_C,
        dE_tot=dE_tot,
        dS=dS,
        balance_residual=residual,
        beta_E=model.beta_E,
        beta_R=model.beta_R,
        mode=rec.mode,
    )


def asymptotic_rates(report: FluxReport, burn_in: int | None = None) -> FluxReport:
    """Fill the Cesaro averages over the steps after ``burn_in``.

    ``burn_in`` defaults to half the trajectory (the transient decays like
    ``exp(-gamma * m)``; judge the default against the spectral gap).  The
    entropy rate is filled twice: via the entropy-production formula and via
    the second-law identity; both are reported with their difference.
    """
    steps = report.steps
    if burn_in is None:
        burn_in = steps // 2
    if not 0 <= burn_in < steps:
        raise ValueError(f"burn_in {burn_in} outside [0, {steps})")
    sl = slice(burn_in, None)
    avg_S = float(np.mean(report.dE_S[sl]))
    avg_R = float(np.mean(report.dE_R[sl]))
    avg_C = float(np.mean(report.dE_C[sl]))
    avg_tot = float(np.mean(report.dE_tot[sl]))
    avg_dS = (report.beta_R - report.beta_E) * avg_R + report.beta_E * avg_tot
    avg_dS2 = report.beta_E * avg_C + report.beta_R * avg_R
    return dataclasses.replace(
        report,
        burn_in=burn_in,
        avg_dE_S=avg_S,
        avg_dE_R=avg_R,
        avg_dE_C=avg_C,
        avg_dE_tot=avg_tot,
        avg_dS=avg_dS,
        avg_dS_second_law=avg_dS2,
        dS_consistency=abs(avg_dS - avg_dS2),
    )


def chain_step_flux_quadrature(
    state: DensityMatrix, model: ModelSpec, nodes: int = 16
) -> tuple[float, float]:
    """Commutator-integral form of the per-step system and element fluxes.

    Evaluates ``int_0^tau <i [lambda2 v, h]>_t dt`` for ``h`` the system and
    element Hamiltonians by Gauss-Legendre quadrature along one collision,
    starting from ``state (x) fresh element``.  Agrees with the bookkeeping
    differences up to quadrature error (coarse by design; 16 nodes reach
    about 1e-3 at unit energies).
    """
    if state.dim != 2:
        raise ValueError("quadrature cross-check is for two-level system states")
    h4 = build_step_hamiltonian(
        dataclasses.replace(model, lambda1=0.0),
        BathModes(np.zeros(0), np.zeros(0), np.zeros(0)),
    )
    v = spin_spin_interaction()
    eye = np.eye(2, dtype=complex)
    h_s = linalg.kron(model.h_system(), eye)
    h_e = linalg.kron(eye, model.h_element())
    joint0 = np.kron(state.matrix, model.element_state().matrix)
    x, wts = np.polynomial.legendre.leggauss(int(nodes))
    t_nodes = 0.5 * model.tau * (x + 1.0)
    t_wts = 0.5 * model.tau * wts
    flux_s = 0.0
    flux_e = 0.0
    comm_s = 1j * model.lambda2 * (v @ h_s - h_s @ v)
    comm_e = 1j * model.lambda2 * (v @ h_e - h_e @ v)
    for t, wt in zip(t_nodes, t_wts):
        u = linalg.expm_unitary(h4, t)
        rho_t = u @ joint0 @ u.conj().T
        flux_s += wt * float(np.real(np.trace(rho_t @ comm_s)))
        flux_e += wt * float(np.real(np.trace(rho_t @ comm_e)))
    return flux_s, flux_e
