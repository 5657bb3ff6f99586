"""Acceptance suite.

Each test enforces one acceptance criterion at its stated tolerance, measures
its runtime against the stated budget, and prints a single pass/fail line
(visible with ``pytest -s`` or ``-v``).
"""

import dataclasses
import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from riqs import cli, linalg, rdo, thermo
from riqs.dynamics import InstantaneousObservable, evolve
from riqs.models import (
    BathSpec,
    DensityMatrix,
    FormFactor,
    ModelSpec,
    bath_thermal_state,
    discretize_bath,
    gibbs_state,
    golden_rule_rate,
)
from riqs.perturbation import (
    beta_prime,
    closed_form_predictions,
    rdo_eigenvalues_2nd_order,
)

from conftest import chain_flip_probability, draw_admissible

DATA_DIR = Path(__file__).parent / "data"

CRITERION_1_MODEL = ModelSpec(
    E_S=1.0, E_E=1.5, beta_E=1.0, beta_R=1.0, tau=1.0, lambda1=0.0, lambda2=0.2
)

CRITERION_5_MODEL = ModelSpec(
    E_S=1.0, E_E=1.0, beta_E=1.5, beta_R=0.5, tau=1.0, lambda1=0.05, lambda2=0.05
)


@contextmanager
def criterion(number: int, name: str, budget_seconds: float):
    start = time.monotonic()
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number:02d} {name}: FAIL")
        raise
    elapsed = time.monotonic() - start
    print(f"ACCEPTANCE {number:02d} {name}: PASS ({elapsed:.2f}s / {budget_seconds:g}s)")
    assert elapsed < budget_seconds, f"runtime {elapsed:.2f}s over budget"


def plus_state():
    return DensityMatrix(np.full((2, 2), 0.5, dtype=complex), (2,))


def test_criterion_1_chain_asymptotic_state():
    with criterion(1, "chain-only asymptotic state (renormalized Gibbs law)", 1.0):
        sd = rdo.spectral_analysis(rdo.chain_channel(CRITERION_1_MODEL))
        target = gibbs_state(1.0, 1.5).matrix
        assert abs(target[0, 0].real - 0.817574) < 1e-6
        fp = sd.fixed_point.matrix
        assert np.max(np.abs(np.diag(fp) - np.diag(target))) <= 1e-9
        assert abs(fp[0, 1]) <= 1e-9 and abs(fp[1, 0]) <= 1e-9
        assert sd.fixed_point_unique


def test_criterion_2_second_order_eigenvalue_scaling():
    with criterion(2, "second-order population eigenvalue scaling", 1.0):
        lams = np.array([0.05, 0.1, 0.2])
        for detuning in (0.0, 1.0):
            errs = []
            for lam in lams:
                model = dataclasses.replace(
                    CRITERION_1_MODEL, E_E=1.0 + detuning, lambda2=float(lam)
                )
                pops, residual = rdo.population_block_eigenvalues(
                    rdo.chain_channel(model)
                )
                assert residual < 1e-12
                exact_e0 = pops[-1].real
                formula = rdo_eigenvalues_2nd_order(model).e0.real
                errs.append(abs(exact_e0 - formula))
            slope = float(np.polyfit(np.log(lams), np.log(errs), 1)[0])
            assert slope >= 2.5, f"detuning {detuning}: slope {slope}"
        resonant = dataclasses.replace(CRITERION_1_MODEL, E_E=1.0, lambda2=0.1)
        pops, _ = rdo.population_block_eigenvalues(rdo.chain_channel(resonant))
        assert abs(pops[-1].real - 0.990033288920620) < 1e-12  # sanity vs oracle
        assert abs(pops[-1].real - 0.99) <= 5e-5
        assert abs(chain_flip_probability(resonant) - np.sin(0.1) ** 2) < 1e-15


def test_criterion_3_golden_rule_rate_cross_check():
    with criterion(3, "golden-rule rate from bath correlation quadrature", 10.0):
        spec = BathSpec(form_factor=FormFactor.gaussian(), n_modes=2000, s_max=4.0)
        modes = discretize_bath(spec, beta_R=1.0)
        rate = golden_rule_rate(modes, energy=1.0, horizon=100.0)
        target = 2 * np.pi**2 * np.exp(-1.0)
        assert abs(target - 7.2617) < 1e-3
        assert abs(rate - target) / target <= 0.01


def test_criterion_4_combined_fixed_point():
    with criterion(4, "combined fixed point is the convex combination", 5.0):
        pred = closed_form_predictions(CRITERION_5_MODEL)
        sd = rdo.spectral_analysis(rdo.combined_channel(CRITERION_5_MODEL))
        dist = linalg.trace_distance(sd.fixed_point.matrix, pred.rho_plus_S.matrix)
        assert dist <= 0.02
        lams = np.array([0.025, 0.05, 0.1])
        dists = []
        for lam in lams:
            model = dataclasses.replace(
                CRITERION_5_MODEL, lambda1=float(lam), lambda2=float(lam)
            )
            p = closed_form_predictions(model)
            s = rdo.spectral_analysis(rdo.combined_channel(model))
            dists.append(
                linalg.trace_distance(s.fixed_point.matrix, p.rho_plus_S.matrix)
            )
        slope = float(np.polyfit(np.log(lams), np.log(dists), 1)[0])
        assert slope >= 0.8, f"fixed-point deviation slope {slope}"


def _flux_run(model, steps=2000, burn_in=1000):
    traj = evolve(plus_state(), steps, model, effective_bath=True, retention=0)
    return thermo.asymptotic_rates(thermo.energy_ledger(traj, model), burn_in)


def _sign_check_draws(count, seed):
    rng = np.random.default_rng(seed)
    draws = []
    while len(draws) < count:
        model = draw_admissible(rng, chain_only=False)
        model = dataclasses.replace(
            model,
            E_E=float(np.clip(model.E_S + rng.uniform(-1.0, 1.0), 0.5, 2.0)),
            tau=float(rng.uniform(0.8, 1.2)),
            lambda1=float(rng.uniform(0.08, 0.14)),
            lambda2=float(rng.uniform(0.08, 0.14)),
        )
        if not model.validity(1e-3).all_ok:
            continue
        boltz = np.exp(-model.beta_R * model.E_S) - np.exp(
            -beta_prime(model) * model.E_S
        )
        if abs(boltz) < 0.08:  # resolvable temperature mismatch
            continue
        draws.append(model)
    return draws


def test_criterion_5_and_6_fluxes_entropy_second_law():
    with criterion(5, "flux and entropy formulas on the effective model", 30.0):
        model = CRITERION_5_MODEL
        pred = closed_form_predictions(model)
        report = _flux_run(model)
        assert report.balance_residual <= 1e-9
        assert abs(report.avg_dE_S) <= 1e-6
        assert report.avg_dS >= -1e-12
        tau = model.tau
        scale = pred.kappa * max(model.E_S, model.E_E) * abs(
            np.exp(-model.beta_R * model.E_S)
            - np.exp(-beta_prime(model) * model.E_S)
        )
        for measured, predicted in (
            (report.avg_dE_C, tau * pred.dE_C),
            (report.avg_dE_R, tau * pred.dE_R),
            (report.avg_dE_tot, tau * pred.dE_tot),
            (report.avg_dS, tau * pred.dS),
        ):
            # relative to the prediction, with the natural flux magnitude as
            # the scale floor (dE_tot vanishes identically at resonance)
            assert abs(measured - predicted) <= 0.10 * max(abs(predicted), scale)
        consistency = [report.dS_consistency]
        for draw in _sign_check_draws(20, seed=2024):
            r = _flux_run(draw, steps=2600, burn_in=1300)
            assert r.balance_residual <= 1e-9
            assert r.avg_dS >= -1e-12
            t_r = 1.0 / draw.beta_R if draw.beta_R > 0 else np.inf
            bp = beta_prime(draw)
            t_e = 1.0 / bp if bp > 0 else np.inf
            assert np.sign(r.avg_dE_C) == np.sign(t_r - t_e)
            consistency.append(r.dS_consistency)
    with criterion(6, "asymptotic second law at the bookkeeping level", 1.0):
        assert max(consistency) <= 1e-9


def test_criterion_7_contraction_and_fgr_property_suite():
    with criterion(7, "contraction and golden-rule property suite", 60.0):
        rng = np.random.default_rng(7)
        checked = 0
        for i in range(200):
            chain_only = i < 100
            model = draw_admissible(rng, chain_only=chain_only)
            channel = (
                rdo.chain_channel(model)
                if chain_only
                else rdo.combined_channel(model)
            )
            contraction = rdo.check_contraction(channel)
            assert contraction.spectral_radius <= 1.0 + 1e-9
            assert contraction.all_peripheral_semisimple
            sd = rdo.spectral_analysis(channel)
            assert min(abs(sd.eigenvalues - 1.0)) <= 1e-9
            if model.lambda1 * model.lambda2 != 0.0:
                assert sd.fgr_ok and sd.fixed_point_unique
                assert sd.gap > 0.0
            checked += 1
        assert checked == 200


def test_criterion_8_exact_bath_relaxation():
    with criterion(8, "exact system+bath relaxation at desk scale", 300.0):
        spec = BathSpec(form_factor=FormFactor.gaussian(), n_modes=8, s_max=4.0)
        model = ModelSpec(
            E_S=1.0, E_E=1.0, beta_E=1.0, beta_R=1.0, tau=0.5,
            lambda1=0.2, lambda2=0.0, bath=spec,
        )
        modes = model.modes()
        d_b = 2**modes.n_modes
        init = DensityMatrix(
            np.kron(np.diag([0.0, 1.0]).astype(complex), bath_thermal_state(modes).matrix),
            (2, d_b),
        )
        traj = evolve(init, 40, model, modes, retention=0)
        target = gibbs_state(model.E_S, model.beta_R).matrix
        horizon_steps = int(modes.recurrence_time / model.tau)
        dists = []
        for state in traj.states:
            marginal = linalg.partial_trace(state.matrix, (2, d_b), keep=(0,))
            dists.append(linalg.trace_distance(marginal, target))
            assert abs(np.trace(state.matrix) - 1.0) <= 1e-8
            low = float(
                np.linalg.eigvalsh(linalg.hermitianize(state.matrix)).min()
            )
            assert low >= -1e-8
        within = dists[: horizon_steps + 1]
        assert min(within) <= 0.5 * dists[0]


def test_criterion_9_instantaneous_observable_factorization():
    with criterion(9, "instantaneous-observable factorization (r=2)", 1.0):
        model = dataclasses.replace(CRITERION_1_MODEL, lambda2=0.3)
        h_e = model.h_element()
        b1 = np.array([[0.4, 0.2 + 0.3j], [0.2 - 0.3j, -1.1]], dtype=complex)
        obs = InstantaneousObservable(
            a_sr=np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
            past=(h_e,),
            future=(b1, h_e),
            label="train",
        )
        traj = evolve(plus_state(), 50, model, retention=1, observables=[obs])
        rho_e = model.element_state().matrix
        for m in range(1, 51):
            window = traj.window_states[m]
            dims = traj.window_dims[m]
            joint = linalg.nkron([window, rho_e, rho_e])
            op = linalg.nkron(
                [obs.a_sr]
                + [np.eye(d, dtype=complex) for d in dims[1:-1]]
                + [h_e, b1, h_e]
            )
            brute = complex(np.trace(joint @ op))
            assert abs(traj.observable_values["train"][m] - brute) <= 1e-12


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "CLI determinism and golden artifacts", 30.0):
        cfg_text = (
            "system.E_S = 1.0\n"
            "chain.E_E = 1.5\n"
            "chain.beta = 1.0\n"
            "reservoir.beta = 1.0\n"
            "step.tau = 1.0\n"
            "coupling.lambda1 = 0.0\n"
            "coupling.lambda2 = 0.2\n"
            "bath.n_modes = 0\n"
            "run.mode = chain-only\n"
            "run.steps = 100\n"
            "run.seed = 0\n"
        )
        cfg = tmp_path / "criterion1.cfg"
        cfg.write_text(cfg_text)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["run", str(cfg), "--out", str(out_a)]) == 0
        assert cli.main(["run", str(cfg), "--out", str(out_b)]) == 0
        for name in ("spectrum.csv", "trajectory.csv", "report.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
        # golden values: frozen from the criterion-1 configuration
        golden = json.loads((DATA_DIR / "criterion1_golden.json").read_text())
        report = json.loads((out_a / "report.json").read_text())
        fp = report["spectral"]["fixed_point"]
        for i in range(2):
            for j in range(2):
                assert abs(fp[i][j][0] - golden["fixed_point"][i][j][0]) <= 1e-9
                assert abs(fp[i][j][1] - golden["fixed_point"][i][j][1]) <= 1e-9
        assert abs(report["spectral"]["gap"] - golden["gap"]) <= 1e-9
        eig = sorted(abs(complex(*z)) for z in report["spectral"]["eigenvalues"])
        eig_g = sorted(abs(complex(*z)) for z in golden["eigenvalue_moduli_source"])
        assert np.max(np.abs(np.array(eig) - np.array(eig_g))) <= 1e-9
        last = (out_a / "trajectory.csv").read_text().strip().splitlines()[-1]
        got = [float(x) for x in last.split(",")]
        want = golden["last_trajectory_row"]
        assert got[0] == want[0]
        assert np.max(np.abs(np.array(got[1:]) - np.array(want[1:]))) <= 1e-9
