"""One-step reduced dynamics channels and their spectral analysis.

A channel is the completely positive trace-preserving map that advances the
reduced state of the system (or system + bath) across one interaction step,
stored as a ``d^2 x d^2`` matrix in the column-stacking vectorization.  Its
spectrum governs the long-time behaviour: eigenvalue 1 carries the invariant
state, and the modulus of the second-largest eigenvalue sets the convergence
rate per step.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg, perturbation
from .errors import NumericalCheckError
from .models import BathModes, DensityMatrix, ModelSpec, build_step_hamiltonian

__all__ = [
    "Channel",
    "chain_channel",
    "bath_channel_effective",
    "combined_channel",
    "exact_srbath_channel",
    "choi_matrix",
    "ChannelChecks",
    "channel_checks",
    "SpectralData",
    "spectral_analysis",
    "ContractionReport",
    "check_contraction",
    "top_eigenvalues",
    "population_block_eigenvalues",
]

DENSE_N_MODES_LIMIT = 4


@dataclass(frozen=True)
class Channel:
    """One-step reduced dynamics map on d x d states.

    ``matrix`` is the vectorized map (column-stacking); it is ``None`` for
    matrix-free channels, which carry an ``apply_fn`` instead.
    """

    matrix: np.ndarray | None
    dim: int
    label: str
    apply_fn: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def is_dense(self) -> bool:
        return self.matrix is not None

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return linalg.apply_map_matrix(self.matrix, x)
        if self.apply_fn is None:
            raise ValueError("channel carries neither a matrix nor an applier")
        return self.apply_fn(x)


def _conjugate_and_trace_step(
    u: np.ndarray, fresh: np.ndarray, d_keep: int
) -> Callable[[np.ndarray], np.ndarray]:
    """Applier X -> Tr_element[ U (X (x) fresh) U^dagger ]."""
    d_e = fresh.shape[0]

    def apply(x: np.ndarray) -> np.ndarray:
        joint = np.kron(x, fresh)
        joint = u @ joint @ u.conj().T
        return linalg.partial_trace(joint, (d_keep, d_e), keep=(0,))

    return apply


_EMPTY_MODES = BathModes(np.zeros(0), np.zeros(0), np.zeros(0))


def chain_channel(model: ModelSpec) -> Channel:
    """Exact one-step channel for the system driven by the chain alone.

    X -> Tr_element[ U (X (x) gibbs(E_E, beta_E)) U^dagger ] with
    U = exp(-i tau (h_S + h_E + lambda2 v)).  The reservoir coupling is
    ignored.  No perturbation theory is involved.
    """
    h = build_step_hamiltonian(dataclasses.replace(model, lambda1=0.0), _EMPTY_MODES)
    u = linalg.expm_unitary(h, model.tau)
    apply = _conjugate_and_trace_step(u, model.element_state().matrix, 2)
    return Channel(matrix=linalg.map_to_matrix(apply, 2), dim=2, label="chain")


def bath_channel_effective(model: ModelSpec, lamb_pv: float | None = None) -> Channel:
    """Weak-coupling one-step channel for the reservoir acting alone.

    The step is ``exp(tau * lambda1^2 * G)`` for the unique two-level
    dissipative generator with population rates obeying detailed balance at
    beta_R (total relaxation rate gamma_th2), coherence decay gamma_th2 / 2,
    and a coherence phase shift per unit time equal to the second-order Lamb
    term (principal-value integral with coefficient 1/4).  The exponential is
    assembled in closed form: the generator is block diagonal between
    populations and coherences.

    By construction the fixed point is gibbs(E_S, beta_R) and the population
    eigenvalue is exactly ``exp(-tau lambda1^2 gamma_th2)``.  Includes no free
    system rotation; compose with the chain step for the full model.
    """
    model.require_valid()
    g_th = perturbation.gamma_th2(model)
    rate = model.tau * model.lambda1**2 * g_th
    decay = np.exp(-rate)
    excited = float(np.exp(-model.beta_R * model.E_S) / (1.0 + np.exp(-model.beta_R * model.E_S)))
    if lamb_pv is None:
        lamb_pv = (
            perturbation.pv_integral(perturbation.pv_weight(model), model.E_S)
            if model.lambda1 != 0.0
            else 0.0
        )
    phase = model.tau * model.lambda1**2 * lamb_pv / 4.0
    coh = np.exp(-rate / 2.0) * np.exp(-1j * phase)
    # vec basis order (X_00, X_10, X_01, X_11), column stacking
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 1.0 - excited * (1.0 - decay)
    m[3, 0] = excited * (1.0 - decay)
    m[0, 3] = (1.0 - excited) * (1.0 - decay)
    m[3, 3] = 1.0 - (1.0 - excited) * (1.0 - decay)
    m[1, 1] = np.conj(coh)
    m[2, 2] = coh
    return Channel(matrix=m, dim=2, label="bath-effective")


def combined_channel(model: ModelSpec, order: str = "bath-first") -> Channel:
    """Composition of the effective reservoir step and the exact chain step.

    The default order applies the reservoir step first, then the collision;
    the two orders agree to second order in the couplings, and their
    difference is a useful diagnostic of the composition ambiguity.
    """
    bath = bath_channel_effective(model)
    chain = chain_channel(model)
    if order == "bath-first":
        m = chain.matrix @ bath.matrix
    elif order == "chain-first":
        m = bath.matrix @ chain.matrix
    else:
        raise ValueError(f"unknown composition order {order!r}")
    return Channel(matrix=m, dim=2, label="combined")


def exact_srbath_channel(
    model: ModelSpec,
    modes: BathModes,
    dense_limit: int = DENSE_N_MODES_LIMIT,
) -> Channel:
    """Exact one-step channel on system (x) bath.

    X -> Tr_element[ U (X (x) gibbs(E_E, beta_E)) U^dagger ] with the full
    three-body step unitary.  Because every chain element is fresh and
    independent, repeated application of this map is the exact reduced
    dynamics at every step.  The dense ``d^2 x d^2`` matrix is built for
    ``n_modes <= dense_limit``; larger mode counts return a matrix-free
    applier (use :func:`top_eigenvalues` for its leading spectrum).
    """
    h = build_step_hamiltonian(model, modes)
    u = linalg.expm_unitary(h, model.tau)
    d = 2 * 2**modes.n_modes
    apply = _conjugate_and_trace_step(u, model.element_state().matrix, d)
    if modes.n_modes <= dense_limit:
        return Channel(
            matrix=linalg.map_to_matrix(apply, d), dim=d, label="exact-srbath"
        )
    return Channel(matrix=None, dim=d, label="exact-srbath", apply_fn=apply)


def choi_matrix(channel: Channel) -> np.ndarray:
    """Choi matrix sum_jk E_jk (x) Lambda(E_jk), by reshuffling the
    vectorized map matrix.  Positive semidefinite iff the map is completely
    positive; Hermitian iff the map is Hermiticity-preserving."""
    if not channel.is_dense:
        raise ValueError("Choi matrix requires a dense channel")
    d = channel.dim
    m4 = channel.matrix.reshape(d, d, d, d)  # axes [j, i, l, k] of M[(i,j),(k,l)]
    return m4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


@dataclass(frozen=True)
class ChannelChecks:
    """Residuals of the defining channel properties (dense channels)."""

    unitality_residual: float  # adjoint unitality = trace preservation
    hermiticity_residual: float
    choi_min_eigenvalue: float

    def ok(self, tp_tol: float = 1e-10, cp_tol: float = 1e-8) -> bool:
        return (
            self.unitality_residual <= tp_tol
            and self.hermiticity_residual <= tp_tol
            and self.choi_min_eigenvalue >= -cp_tol
        )


def channel_checks(channel: Channel) -> ChannelChecks:
    """Trace preservation, Hermiticity preservation and complete positivity."""
    if not channel.is_dense:
        raise ValueError("channel checks require a dense channel")
    d = channel.dim
    ident = linalg.vec(np.eye(d, dtype=complex))
    unitality = float(np.max(np.abs(ident @ channel.matrix - ident)))
    herm = 0.0
    rng = np.random.default_rng(7)
    for _ in range(4):
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lhs = channel.apply(x.conj().T)
        rhs = channel.apply(x).conj().T
        herm = max(herm, float(np.max(np.abs(lhs - rhs))))
    choi = choi_matrix(channel)
    herm = max(herm, linalg.hermiticity_defect(choi) / 2.0)
    lo = float(np.linalg.eigvalsh(linalg.hermitianize(choi)).min())
    return ChannelChecks(
        unitality_residual=unitality,
        hermiticity_residual=herm,
        choi_min_eigenvalue=lo,
    )


@dataclass(frozen=True)
class SpectralData:
    """Spectral summary of a channel."""

    eigenvalues: np.ndarray
    spectral_radius: float
    gap: float
    fixed_point: DensityMatrix
    fgr_ok: bool
    peripheral_semisimple: bool
    fixed_point_unique: bool


def _fixed_point_from_vector(v: np.ndarray, dim: int) -> DensityMatrix:
    """Hermitize and renormalize an eigenvalue-1 right eigenvector to a state.

    Numerical eigenvectors carry an arbitrary phase and scale; trace
    renormalization and Hermitization remove both.
    """
    x = linalg.unvec(v, dim)
    x = linalg.hermitianize(x)
    tr = np.trace(x).real
    if abs(tr) < 1e-12:
        raise NumericalCheckError(
            "eigenvalue-1 eigenvector has (near-)zero trace; cannot normalize"
        )
    return DensityMatrix(x / tr, (dim,))


def spectral_analysis(
    channel: Channel,
    one_tol: float = 1e-9,
    k: int = 5,
    ritz_tol: float = 1e-3,
) -> SpectralData:
    """Eigenvalues, spectral gap, fixed point, and the golden-rule verdict.

    Dense channels are analyzed by full eigendecomposition; ``fgr_ok`` is
    True when the eigenvalue 1 is simple within ``one_tol`` and every other
    eigenvalue has modulus at most ``1 - one_tol``.

    Matrix-free channels use subspace iteration for the ``k`` leading
    eigenvalues.  Those converge only down to the last modulus gap and at the
    (physical) mixing rate, so the eigenvalue-1 Ritz value is accepted within
    the coarser ``ritz_tol`` and the flags refer to the leading Ritz data at
    that resolution; use the dense path when verdicts at ``one_tol`` matter.
    """
    if channel.is_dense:
        w, vr, _ = linalg.eig_general(channel.matrix)
        tol = one_tol
    else:
        w, vr = top_eigenvalues(channel, k=k)
        tol = ritz_tol
    dist_to_one = np.abs(w - 1.0)
    if dist_to_one.min() > tol:
        raise NumericalCheckError(
            f"no eigenvalue within {tol:g} of 1 (closest at distance "
            f"{dist_to_one.min():.3e}); not a trace-preserving step map?"
        )
    idx_one = int(np.argmin(dist_to_one))
    near_one = int(np.sum(dist_to_one <= tol))
    others = np.delete(np.abs(w), idx_one)
    second = float(others.max()) if others.size else 0.0
    gap = float(-np.log(second)) if second > 0 else np.inf
    fgr = near_one == 1 and (others.size == 0 or second <= 1.0 - tol)
    fixed_point = _fixed_point_from_vector(vr[:, idx_one], channel.dim)
    if channel.is_dense:
        semisimple = check_contraction(channel).all_peripheral_semisimple
    else:
        semisimple = near_one == 1
    return SpectralData(
        eigenvalues=w,
        spectral_radius=float(np.abs(w).max()),
        gap=gap,
        fixed_point=fixed_point,
        fgr_ok=bool(fgr),
        peripheral_semisimple=bool(semisimple),
        fixed_point_unique=near_one == 1,
    )


@dataclass(frozen=True)
class ContractionReport:
    """Contraction-property verdicts for a channel."""

    spectral_radius: float
    spr_within_unit: bool
    peripheral_eigenvalues: tuple[complex, ...]
    peripheral_multiplicities: tuple[int, ...]
    semisimple_flags: tuple[bool, ...]

    @property
    def all_peripheral_semisimple(self) -> bool:
        return all(self.semisimple_flags)


def _matrix_rank(m: np.ndarray, scale: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > 1e-8 * max(scale, 1.0)))


def check_contraction(channel: Channel, peripheral_tol: float = 1e-9) -> ContractionReport:
    """Verify spectral radius <= 1 and semisimplicity of peripheral spectrum.

    Peripheral eigenvalues (modulus >= 1 - tol) are clustered; each cluster is
    semisimple iff ``rank(M - z) == rank((M - z)^2)`` (a Jordan block of size
    two or more strictly lowers the rank of the square).
    """
    if not channel.is_dense:
        raise ValueError("contraction check requires a dense channel")
    m = channel.matrix
    w, _, _ = linalg.eig_general(m)
    spr = float(np.abs(w).max())
    peripheral = w[np.abs(w) >= 1.0 - peripheral_tol]
    # cluster eigenvalues closer than 1e-8
    clusters: list[list[complex]] = []
    for z in sorted(peripheral, key=lambda z: (round(z.real, 12), round(z.imag, 12))):
        if clusters and abs(z - clusters[-1][0]) < 1e-8:
            clusters[-1].append(z)
        else:
            clusters.append([z])
    scale = float(np.abs(m).max())
    reps, mults, flags = [], [], []
    eye = np.eye(m.shape[0], dtype=complex)
    for cluster in clusters:
        z = complex(np.mean(cluster))
        shifted = m - z * eye
        r1 = _matrix_rank(shifted, scale)
        r2 = _matrix_rank(shifted @ shifted, scale * scale)
        reps.append(z)
        mults.append(len(cluster))
        flags.append(r1 == r2)
    return ContractionReport(
        spectral_radius=spr,
        spr_within_unit=spr <= 1.0 + 1e-9,
        peripheral_eigenvalues=tuple(reps),
        peripheral_multiplicities=tuple(mults),
        semisimple_flags=tuple(flags),
    )


def population_block_eigenvalues(channel: Channel) -> tuple[np.ndarray, float]:
    """Eigenvalues of the population block of a two-level channel.

    Excitation-number covariance decouples populations from coherences in
    every channel of this family; the returned residual measures that
    decoupling on the channel matrix (column-stacking vec order puts the
    populations at indices 0 and 3).
    """
    if channel.dim != 2 or not channel.is_dense:
        raise ValueError("population block analysis requires a dense 2-level channel")
    m = channel.matrix
    residual = max(
        float(np.max(np.abs(m[np.ix_((0, 3), (1, 2))]))),
        float(np.max(np.abs(m[np.ix_((1, 2), (0, 3))]))),
    )
    w = np.linalg.eigvals(m[np.ix_((0, 3), (0, 3))])
    return w[np.argsort(-np.abs(w))], residual


def top_eigenvalues(
    channel: Channel,
    k: int = 5,
    iters: int = 400,
    tol: float = 1e-11,
    seed: int = 0,
    buffer: int = 3,
) -> tuple[np.ndarray, np.ndarray]:
    """Leading eigenvalues of a channel by subspace (orthogonal) iteration.

    Iterates a ``k + buffer`` dimensional subspace and returns the ``k``
    leading Ritz pairs ``(eigenvalues, vectors)`` in the package sort order,
    with vectorized right eigenvectors as columns.  Deterministic for a fixed
    seed.  Eigenvalues are resolved down to the last modulus gap inside the
    window; Ritz values inside a cluster of nearly equal moduli at the window
    edge may be mixtures.
    """
    d = channel.dim
    n = d * d
    k = min(k, n)
    kb = min(k + buffer, n)
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(n, kb)) + 1j * rng.normal(size=(n, kb))
    # seed the invariant direction: the identity always has overlap with it
    q[:, 0] = linalg.vec(np.eye(d, dtype=complex))
    q, _ = np.linalg.qr(q)

    def apply_block(block: np.ndarray) -> np.ndarray:
        return np.column_stack(
            [
                linalg.vec(channel.apply(linalg.unvec(block[:, j], d)))
                for j in range(block.shape[1])
            ]
        )

    prev = None
    for _ in range(iters):
        z = apply_block(q)
        q, _ = np.linalg.qr(z)
        w = np.linalg.eigvals(q.conj().T @ apply_block(q))
        w = w[np.argsort(-np.abs(w))][:k]
        if prev is not None and prev.size == w.size and np.max(np.abs(w - prev)) < tol:
            break
        prev = w
    # Ritz pairs from the final projected problem
    w, s = np.linalg.eig(q.conj().T @ apply_block(q))
    order = np.argsort(-np.abs(w))[:k]
    w = w[order]
    vecs = q @ s[:, order]
    idx = np.lexsort((-np.round(w.imag, 12), -np.round(w.real, 12), -np.round(np.abs(w), 12)))
    return w[idx], vecs[:, idx]
