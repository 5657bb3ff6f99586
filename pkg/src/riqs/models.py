"""Physical ingredients of the repeated-interaction model.

Two-level systems use the basis convention index 0 = ground, 1 = excited,
so the free Hamiltonian of a gap-E system is ``diag(0, E)`` and the lowering
operator maps the excited state to the ground state.

The reservoir is represented at finite size by a grid of fermionic modes.
Mode operators are built with the standard parity-string (Jordan-Wigner)
tensor construction so that the canonical anticommutation relations hold
exactly on the ``2**n_modes`` dimensional bath space.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
import numpy as np
from scipy.integrate import trapezoid

from . import linalg
from .errors import AssumptionError

__all__ = [
    "LOWERING",
    "RAISING",
    "SIGMA_X",
    "NUMBER",
    "two_level_hamiltonian",
    "DensityMatrix",
    "gibbs_state",
    "spin_spin_interaction",
    "FormFactor",
    "spectral_weight",
    "effective_form_factor",
    "coupling_spectral_density",
    "integrated_spectral_weight",
    "BathSpec",
    "BathModes",
    "discretize_bath",
    "fermion_lowering_ops",
    "bath_hamiltonian",
    "bath_field_operator",
    "bath_thermal_state",
    "bath_correlation",
    "golden_rule_rate",
    "ModelSpec",
    "Validity",
    "build_step_hamiltonian",
]

LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
RAISING = LOWERING.conj().T
SIGMA_X = LOWERING + RAISING
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
NUMBER = np.diag([0.0, 1.0]).astype(complex)
_EYE2 = np.eye(2, dtype=complex)


def two_level_hamiltonian(gap: float) -> np.ndarray:
    """Free Hamiltonian ``diag(0, gap)`` of a two-level system."""
    return np.diag([0.0, float(gap)]).astype(complex)


@dataclass(frozen=True)
class DensityMatrix:
    """State of a finite system with an annotated tensor factorization."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if int(np.prod(self.dims)) != m.shape[0] or m.shape[0] != m.shape[1]:
            raise ValueError(
                f"state shape {m.shape} inconsistent with factorization {self.dims}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = 1e-10) -> None:
        """Check Hermiticity, unit trace and positivity within ``tol``."""
        defect = linalg.hermiticity_defect(self.matrix)
        if defect > tol:
            raise ValueError(f"state not Hermitian: defect {defect:.3e}")
        tr = complex(np.trace(self.matrix))
        if abs(tr - 1.0) > tol:
            raise ValueError(f"state trace {tr} differs from 1 beyond {tol:.1e}")
        lo = float(np.linalg.eigvalsh(linalg.hermitianize(self.matrix)).min())
        if lo < -tol:
            raise ValueError(f"state has negative eigenvalue {lo:.3e}")

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.matrix @ np.asarray(op, dtype=complex)))


def gibbs_state(gap: float, beta: float) -> DensityMatrix:
    """Two-level Gibbs state ``diag(1, exp(-beta*gap)) / Z``."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    if beta < 0:
        raise ValueError("inverse temperature must be non-negative")
    p = np.array([1.0, np.exp(-beta * gap)])
    p /= p.sum()
    return DensityMatrix(np.diag(p).astype(complex), (2,))


def spin_spin_interaction() -> np.ndarray:
    """Excitation-exchange coupling between two two-level systems.

    Acts on the ordered pair (system, chain element); nonzero only on the
    single-excitation block spanned by |ground,excited> and |excited,ground>.
    """
    return linalg.kron(LOWERING, RAISING) + linalg.kron(RAISING, LOWERING)


# ---------------------------------------------------------------------------
# Form factors and the reservoir spectral data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FormFactor:
    """Radial coupling profile of the system-reservoir interaction.

    Presets:

    * ``gaussian``: f(k) = amplitude * exp(-|k|^2 / 2)
    * ``flat``:     f(k) = amplitude for |k| <= cutoff, else 0
    """

    name: str
    amplitude: float = 1.0
    cutoff: float | None = None

    _PRESETS = ("gaussian", "flat")

    def __post_init__(self):
        if self.name not in self._PRESETS:
            raise ValueError(
                f"unknown form factor {self.name!r}; presets: {self._PRESETS}"
            )
        if self.name == "flat" and (self.cutoff is None or self.cutoff <= 0):
            raise ValueError("flat form factor requires a positive cutoff")

    @classmethod
    def gaussian(cls, amplitude: float = 1.0) -> "FormFactor":
        return cls("gaussian", amplitude=amplitude)

    @classmethod
    def flat(cls, cutoff: float, amplitude: float = 1.0) -> "FormFactor":
        return cls("flat", amplitude=amplitude, cutoff=cutoff)

    def radial(self, k):
        """Profile value at radial wavenumber ``k >= 0`` (vectorized)."""
        k = np.asarray(k, dtype=float)
        if self.name == "gaussian":
            return self.amplitude * np.exp(-(k**2) / 2.0)
        return np.where(k <= self.cutoff, self.amplitude, 0.0)


def spectral_weight(ff: FormFactor, energy) -> np.ndarray | float:
    """Angular integral of |f|^2 over the sphere at one-particle energy E.

    For the radial presets this is ``4*pi*|f(sqrt(E))|^2``.
    """
    energy = np.asarray(energy, dtype=float)
    if np.any(energy < 0):
        raise ValueError("spectral_weight requires energy >= 0")
    out = 4.0 * np.pi * np.abs(ff.radial(np.sqrt(energy))) ** 2
    return float(out) if out.ndim == 0 else out


def effective_form_factor(ff: FormFactor, beta_R: float, s) -> np.ndarray | float:
    """Squared fiber norm of the thermally dressed form factor at energy s.

    Defined on all of R as
    ``(1/2) * sqrt(|s|) / (1 + exp(-beta_R * s)) * spectral_weight(|s|)``;
    at beta_R = 0 it is even in s, and it vanishes at s = 0.
    """
    s = np.asarray(s, dtype=float)
    out = 0.5 * np.sqrt(np.abs(s)) / (1.0 + np.exp(-beta_R * s)) * spectral_weight(
        ff, np.abs(s)
    )
    return float(out) if out.ndim == 0 else out


def coupling_spectral_density(ff: FormFactor, energy) -> np.ndarray | float:
    """Spectral density of the dipole coupling: (sqrt(E)/2) * spectral_weight(E).

    The total golden-rule relaxation rate of a gap-E system equals
    ``pi`` times this density at E, independent of temperature.
    """
    energy = np.asarray(energy, dtype=float)
    out = 0.5 * np.sqrt(energy) * spectral_weight(ff, energy)
    return float(out) if out.ndim == 0 else out


def integrated_spectral_weight(ff: FormFactor, s_max: float, n: int = 20001) -> float:
    """Quadrature of the coupling spectral density over [0, s_max].

    Equals the squared L2 norm of the form factor over the ball of radius
    ``sqrt(s_max)``; the discretized couplings satisfy ``sum g_j^2 -> this``.
    """
    s = np.linspace(0.0, float(s_max), int(n))
    return float(trapezoid(coupling_spectral_density(ff, s), s))


@dataclass(frozen=True)
class BathSpec:
    """Discretization recipe for the fermionic reservoir."""

    form_factor: FormFactor = FormFactor.gaussian()
    n_modes: int = 0
    s_max: float = 4.0

    def __post_init__(self):
        if self.n_modes < 0:
            raise ValueError("n_modes must be >= 0")
        if self.s_max <= 0:
            raise ValueError("s_max must be positive")


@dataclass(frozen=True)
class BathModes:
    """Finite set of fermionic reservoir modes.

    ``energies`` ascend on a uniform midpoint grid, ``couplings`` are the
    non-negative g_j with g_j^2 = (cell width) * coupling spectral density,
    and ``occupations`` are Fermi-Dirac at the reservoir temperature.
    """

    energies: np.ndarray
    couplings: np.ndarray
    occupations: np.ndarray

    def __post_init__(self):
        for name in ("energies", "couplings", "occupations"):
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=float)
            )
        if not (
            self.energies.shape == self.couplings.shape == self.occupations.shape
        ):
            raise ValueError("mode arrays must have identical shapes")

    @property
    def n_modes(self) -> int:
        return int(self.energies.size)

    @property
    def grid_spacing(self) -> float:
        if self.n_modes < 2:
            return 2.0 * float(self.energies[0]) if self.n_modes else np.inf
        return float(self.energies[1] - self.energies[0])

    @property
    def recurrence_time(self) -> float:
        """Time horizon 2*pi / (grid spacing) beyond which the finite grid
        produces revivals."""
        return 2.0 * np.pi / self.grid_spacing


def discretize_bath(spec: BathSpec, beta_R: float) -> BathModes:
    """Finite-mode truncation of the reservoir on a uniform midpoint grid."""
    if beta_R < 0:
        raise ValueError("beta_R must be non-negative")
    n = spec.n_modes
    if n == 0:
        z = np.zeros(0)
        return BathModes(z, z, z)
    width = spec.s_max / n
    energies = (np.arange(n) + 0.5) * width
    g2 = width * coupling_spectral_density(spec.form_factor, energies)
    occupations = 1.0 / (np.exp(beta_R * energies) + 1.0)
    return BathModes(energies, np.sqrt(g2), occupations)


# ---------------------------------------------------------------------------
# Fermionic bath operators (parity-string construction)
# ---------------------------------------------------------------------------


def fermion_lowering_ops(n_modes: int) -> list[np.ndarray]:
    """Jordan-Wigner lowering operators c_j on the 2**n bath space.

    c_j = sigma_z^(j) (x) lowering (x) identity^(n-1-j); they satisfy
    {c_j, c_k^dagger} = delta_jk and {c_j, c_k} = 0 exactly.
    """
    ops = []
    for j in range(n_modes):
        ops.append(linalg.nkron([SIGMA_Z] * j + [LOWERING] + [_EYE2] * (n_modes - 1 - j)))
    return ops


def bath_hamiltonian(modes: BathModes) -> np.ndarray:
    """Free bath Hamiltonian sum_j eps_j c_j^dagger c_j (diagonal)."""
    n = modes.n_modes
    if n == 0:
        return np.zeros((1, 1), dtype=complex)
    # occupation-number diagonal; parity strings drop out of c^dag c
    diag = np.zeros(2**n)
    for j, e in enumerate(modes.energies):
        bit = (np.arange(2**n) >> (n - 1 - j)) & 1
        diag += e * bit
    return np.diag(diag).astype(complex)


def bath_field_operator(modes: BathModes) -> np.ndarray:
    """Coupling field phi = (B + B^dagger)/sqrt(2) with B = sum_j g_j c_j."""
    n = modes.n_modes
    if n == 0:
        return np.zeros((1, 1), dtype=complex)
    ops = fermion_lowering_ops(n)
    b = sum(g * c for g, c in zip(modes.couplings, ops))
    return (b + b.conj().T) / np.sqrt(2.0)


def bath_thermal_state(modes: BathModes) -> DensityMatrix:
    """Thermal (Fermi-Dirac) product state of the free bath."""
    n = modes.n_modes
    if n == 0:
        return DensityMatrix(np.ones((1, 1), dtype=complex), (1,))
    mats = [np.diag([1.0 - o, o]).astype(complex) for o in modes.occupations]
    return DensityMatrix(linalg.nkron(mats), (2**n,))


def bath_correlation(modes: BathModes, times: np.ndarray) -> np.ndarray:
    """Two-time thermal correlation function of the coupling field.

    C(t) = (1/2) sum_j g_j^2 [(1-n_j) e^{-i eps_j t} + n_j e^{+i eps_j t}].
    """
    times = np.asarray(times, dtype=float)
    out = np.zeros(times.shape, dtype=complex)
    g2 = modes.couplings**2
    occ = modes.occupations
    eps = modes.energies
    chunk = 512
    for lo in range(0, modes.n_modes, chunk):
        hi = min(lo + chunk, modes.n_modes)
        phases = np.exp(-1j * np.outer(eps[lo:hi], times))
        out += 0.5 * (
            (g2[lo:hi] * (1.0 - occ[lo:hi])) @ phases
            + (g2[lo:hi] * occ[lo:hi]) @ phases.conj()
        )
    return out


def golden_rule_rate(
    modes: BathModes,
    energy: float,
    horizon: float = 100.0,
    num_times: int | None = None,
    window: str = "hann",
) -> float:
    """Total golden-rule relaxation rate from the time-domain correlation
    function, by quadrature over [0, horizon].

    rate = 4 Re int_0^T w(t) cos(E t) C(t) dt with a smooth window w
    (``hann`` cos^2 taper or ``fejer`` triangular).  Converges to
    ``pi * coupling_spectral_density(E)`` for horizons well below the grid
    recurrence time.
    """
    if num_times is None:
        num_times = max(2001, int(40 * horizon) + 1)
    t = np.linspace(0.0, float(horizon), int(num_times))
    corr = bath_correlation(modes, t)
    if window == "hann":
        w = np.cos(np.pi * t / (2 * horizon)) ** 2
    elif window == "fejer":
        w = 1.0 - t / horizon
    elif window == "rect":
        w = np.ones_like(t)
    else:
        raise ValueError(f"unknown window {window!r}")
    return float(4.0 * np.real(trapezoid(w * np.cos(energy * t) * corr, t)))


# ---------------------------------------------------------------------------
# Full model configuration and step Hamiltonian
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Validity:
    """Non-degeneracy flags of a model configuration.

    ``chain_ok``:    tau*(E_E - E_S) is not a nonzero multiple of 2*pi.
    ``spectral_ok``: tau*E_S is not a positive multiple of pi.
    """

    chain_ok: bool
    spectral_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.chain_ok and self.spectral_ok

    def violations(self) -> list[str]:
        out = []
        if not self.chain_ok:
            out.append("tau*(E_E - E_S) in 2*pi*Z* (chain resonance degeneracy)")
        if not self.spectral_ok:
            out.append("tau*E_S in pi*N (unperturbed eigenvalue collision)")
        return out


@dataclass(frozen=True)
class ModelSpec:
    """Full physical configuration of the driven two-level system."""

    E_S: float
    E_E: float
    beta_E: float
    beta_R: float
    tau: float
    lambda1: float
    lambda2: float
    bath: BathSpec = dataclasses.field(default_factory=BathSpec)

    def __post_init__(self):
        if self.E_S <= 0 or self.E_E <= 0:
            raise ValueError("energy gaps E_S, E_E must be strictly positive")
        if self.tau <= 0:
            raise ValueError("interaction duration tau must be strictly positive")
        if self.beta_E < 0 or self.beta_R < 0:
            raise ValueError("inverse temperatures must be non-negative")

    def validity(self, tol: float = 1e-9) -> Validity:
        x = self.tau * (self.E_E - self.E_S)
        k = round(x / (2 * np.pi))
        chain_ok = k == 0 or abs(x - 2 * np.pi * k) > tol
        y = self.tau * self.E_S
        m = round(y / np.pi)
        spectral_ok = m == 0 or abs(y - np.pi * m) > tol
        return Validity(chain_ok=chain_ok, spectral_ok=spectral_ok)

    def require_valid(self, tol: float = 1e-9) -> None:
        flags = self.validity(tol)
        if not flags.all_ok:
            raise AssumptionError(flags.violations()[0])

    def h_system(self) -> np.ndarray:
        return two_level_hamiltonian(self.E_S)

    def h_element(self) -> np.ndarray:
        return two_level_hamiltonian(self.E_E)

    def element_state(self) -> DensityMatrix:
        """Fresh chain element in its Gibbs state."""
        return gibbs_state(self.E_E, self.beta_E)

    def modes(self) -> BathModes:
        return discretize_bath(self.bath, self.beta_R)


MAX_DENSE_N_MODES = 10


def build_step_hamiltonian(
    model: ModelSpec, modes: BathModes, max_n_modes: int = MAX_DENSE_N_MODES
) -> np.ndarray:
    """One-step Hamiltonian on system (x) bath (x) fresh element.

    H = h_S + H_bath + h_E + lambda1 * sigma_x (x) phi + lambda2 * v_exchange.
    With both couplings zero it is the direct sum of the free parts; with
    lambda1 = 0 it commutes with the total excitation number of system plus
    element, which closes the population dynamics into a 2x2 flow.
    """
    n = modes.n_modes
    if n > max_n_modes:
        raise ValueError(
            f"n_modes={n} exceeds the dense limit {max_n_modes} "
            f"(2*2**{n}*2 = {4 * 2**n} dimensions); use the matrix-free path "
            "or lower the mode count"
        )
    d_b = 2**n
    eye_b = np.eye(d_b, dtype=complex)
    h = (
        linalg.nkron([model.h_system(), eye_b, _EYE2])
        + linalg.nkron([_EYE2, bath_hamiltonian(modes), _EYE2])
        + linalg.nkron([_EYE2, eye_b, model.h_element()])
    )
    if model.lambda1 != 0.0 and n > 0:
        h = h + model.lambda1 * linalg.nkron([SIGMA_X, bath_field_operator(modes), _EYE2])
    if model.lambda2 != 0.0:
        h = h + model.lambda2 * (
            linalg.nkron([LOWERING, eye_b, RAISING])
            + linalg.nkron([RAISING, eye_b, LOWERING])
        )
    return h
