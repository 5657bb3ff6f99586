"""riqs: repeated-interaction quantum system simulator.

Exact small-matrix dynamics and closed-form perturbation theory for a
two-level system simultaneously coupled to a chain of fresh thermal elements
(repeated interaction) and a fermionic heat reservoir, with spectral analysis
of the one-step reduced dynamics and energy/entropy bookkeeping.
"""

from .errors import AssumptionError, NumericalCheckError
from .models import (
    BathModes,
    BathSpec,
    DensityMatrix,
    FormFactor,
    ModelSpec,
    discretize_bath,
    gibbs_state,
    spin_spin_interaction,
)
from .rdo import (
    Channel,
    SpectralData,
    bath_channel_effective,
    chain_channel,
    check_contraction,
    combined_channel,
    exact_srbath_channel,
    spectral_analysis,
)
from .dynamics import InstantaneousObservable, Trajectory, evolve, instantaneous_expectation, step
from .thermo import FluxReport, asymptotic_rates, energy_ledger
from .perturbation import (
    ClosedFormPredictions,
    beta_prime,
    closed_form_predictions,
    gamma_ri2,
    gamma_th2,
    psi_star_S,
    pv_integral,
    rdo_eigenvalues_2nd_order,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "NumericalCheckError",
    "BathModes",
    "BathSpec",
    "DensityMatrix",
    "FormFactor",
    "ModelSpec",
    "discretize_bath",
    "gibbs_state",
    "spin_spin_interaction",
    "Channel",
    "SpectralData",
    "bath_channel_effective",
    "chain_channel",
    "check_contraction",
    "combined_channel",
    "exact_srbath_channel",
    "spectral_analysis",
    "InstantaneousObservable",
    "Trajectory",
    "evolve",
    "instantaneous_expectation",
    "step",
    "FluxReport",
    "asymptotic_rates",
    "energy_ledger",
    "ClosedFormPredictions",
    "beta_prime",
    "closed_form_predictions",
    "gamma_ri2",
    "gamma_th2",
    "psi_star_S",
    "pv_integral",
    "rdo_eigenvalues_2nd_order",
    "__version__",
]
