"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the code paths they check: fixed points
come from power iteration instead of eigendecomposition, flip probabilities
from the closed-form two-level Rabi formulas instead of the channel
construction, and angular integrals from explicit sphere quadrature instead
of the radial closed forms.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from riqs import linalg
from riqs.models import BathSpec, FormFactor, ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_state(rng, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def chain_flip_probability(model: ModelSpec) -> float:
    """Closed-form one-step exchange probability from the Rabi formulas.

    The single-excitation block of the collision Hamiltonian is a 2x2 matrix
    with detuning E_E - E_S and coupling lambda2; the transition probability
    after time tau is (lambda^2 / Omega^2) sin^2(Omega tau)."""
    delta = model.E_E - model.E_S
    omega = np.sqrt(model.lambda2**2 + delta**2 / 4.0)
    if omega == 0.0:
        return 0.0
    return (model.lambda2**2 / omega**2) * np.sin(omega * model.tau) ** 2


def chain_coherence_eigenvalue(model: ModelSpec) -> complex:
    """Closed-form coherence-sector eigenvalue of the exact collision step."""
    delta = model.E_E - model.E_S
    mean = (model.E_E + model.E_S) / 2.0
    omega = np.sqrt(model.lambda2**2 + delta**2 / 4.0)
    c, s = np.cos(omega * model.tau), np.sin(omega * model.tau)
    ratio = 0.0 if omega == 0.0 else delta / (2.0 * omega)
    return np.exp(1j * model.tau * mean) * (c - 1j * ratio * s)


def power_iteration_fixed_point(
    matrix: np.ndarray, dim: int, iters: int = 200000, tol: float = 1e-14
) -> np.ndarray:
    """Fixed point of a vectorized channel by plain power iteration."""
    rho = np.eye(dim, dtype=complex) / dim
    v = linalg.vec(rho)
    for _ in range(iters):
        nxt = matrix @ v
        nxt = nxt / np.trace(linalg.unvec(nxt, dim)).real
        if np.max(np.abs(nxt - v)) < tol:
            v = nxt
            break
        v = nxt
    out = linalg.hermitianize(linalg.unvec(v, dim))
    return out / np.trace(out).real


def sphere_quadrature_weight(ff: FormFactor, energy: float, n_polar: int = 64) -> float:
    """Angular integral of |f(sqrt(E) sigma)|^2 over the unit sphere.

    Product quadrature (Gauss-Legendre in cos(theta), uniform in azimuth)
    over explicit 3D points; independent of the radial closed form used by
    the package."""
    mu, w_mu = np.polynomial.legendre.leggauss(n_polar)
    n_az = 2 * n_polar
    phi = np.linspace(0.0, 2 * np.pi, n_az, endpoint=False)
    d_phi = 2 * np.pi / n_az
    k = np.sqrt(energy)
    total = 0.0
    for m, wt in zip(mu, w_mu):
        sin_t = np.sqrt(1.0 - m**2)
        points = np.stack(
            [k * sin_t * np.cos(phi), k * sin_t * np.sin(phi), k * m * np.ones(n_az)]
        )
        radii = np.linalg.norm(points, axis=0)
        total += wt * d_phi * float(np.sum(np.abs(ff.radial(radii)) ** 2))
    return float(total)


def draw_admissible(
    rng: np.random.Generator,
    chain_only: bool,
    margin: float = 1e-3,
) -> ModelSpec:
    """Random model configuration away from the degenerate parameter sets."""
    while True:
        model = ModelSpec(
            E_S=rng.uniform(0.5, 2.0),
            E_E=rng.uniform(0.5, 2.0),
            beta_E=rng.uniform(0.0, 2.0),
            beta_R=rng.uniform(0.0, 2.0),
            tau=rng.uniform(0.5, 2.0),
            lambda1=0.0 if chain_only else rng.uniform(0.05, 0.3),
            lambda2=rng.uniform(0.05, 0.3),
            bath=BathSpec(form_factor=FormFactor.gaussian(), n_modes=0, s_max=8.0),
        )
        if not model.validity(tol=margin).all_ok:
            continue
        if chain_flip_probability(model) < 1e-6:
            continue
        return model


def with_couplings(model: ModelSpec, lambda1: float, lambda2: float) -> ModelSpec:
    return dataclasses.replace(model, lambda1=lambda1, lambda2=lambda2)
