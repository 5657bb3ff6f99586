"""Batch front end.

Reads flat key-value configs (dotted section keys, ``#`` comments), runs one
of the experiment modes, and writes deterministic artifacts into an output
directory:

* ``spectrum.csv``   eigenvalues of the mode's one-step channel
* ``trajectory.csv`` per-step populations, coherence, and energy variations
* ``report.json``    spectral data, flux averages, closed-form predictions,
  and measured-vs-predicted deltas

Identical config and seed reproduce byte-identical artifacts.  Exit codes:
0 ok, 2 config error, 3 model assumption violated, 4 numerical invariant
failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dynamics, linalg, rdo, thermo
from .errors import AssumptionError, NumericalCheckError
from .models import (
    BathSpec,
    DensityMatrix,
    FormFactor,
    ModelSpec,
    bath_thermal_state,
    discretize_bath,
)
from .perturbation import closed_form_predictions

__all__ = ["main", "parse_config", "normalize_config", "run_experiment", "ConfigError"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERIC = 4

MODES = ("chain-only", "bath-only", "combined-effective", "exact-srbath", "predictions")
INITIAL_STATES = ("ground", "excited", "mixed", "plus")


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration."""


# key -> (value type, required)
_SCHEMA: dict[str, tuple[type, bool]] = {
    "system.E_S": (float, True),
    "chain.E_E": (float, True),
    "chain.beta": (float, True),
    "reservoir.beta": (float, False),
    "step.tau": (float, True),
    "coupling.lambda1": (float, True),
    "coupling.lambda2": (float, True),
    "bath.form_factor": (str, False),
    "bath.ff_amplitude": (float, False),
    "bath.ff_cutoff": (float, False),
    "bath.n_modes": (int, False),
    "bath.s_max": (float, False),
    "run.mode": (str, True),
    "run.steps": (int, True),
    "run.burn_in": (int, False),
    "run.seed": (int, False),
    "run.initial": (str, False),
    "run.out": (str, False),
    "tol.trace_preservation": (float, False),
    "tol.complete_positivity": (float, False),
    "tol.state": (float, False),
}


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    mode: str
    steps: int
    burn_in: int
    seed: int
    initial: str
    out: str | None
    tolerances: dict[str, float]
    normalized: dict[str, object]


def _parse_value(key: str, raw: str):
    typ, _ = _SCHEMA[key]
    try:
        if typ is float:
            return float(raw)
        if typ is int:
            return int(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"key {key}: cannot parse {raw!r} as {typ.__name__}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a flat key-value config.

    Unknown keys are rejected; every physical invariant of the model is
    enforced here so later stages can assume a well-formed configuration.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (line {lineno})")
        values[key] = _parse_value(key, raw)
    for key, (_, required) in _SCHEMA.items():
        if required and key not in values:
            raise ConfigError(f"missing required key {key!r}")

    mode = values["run.mode"]
    if mode not in MODES:
        raise ConfigError(f"key run.mode: {mode!r} not in {MODES}")
    initial = values.get("run.initial", "plus")
    if initial not in INITIAL_STATES:
        raise ConfigError(f"key run.initial: {initial!r} not in {INITIAL_STATES}")
    steps = int(values["run.steps"])
    if steps < 0:
        raise ConfigError("key run.steps: must be >= 0")
    burn_in = int(values.get("run.burn_in", steps // 2))
    if steps > 0 and not 0 <= burn_in < steps:
        raise ConfigError(f"key run.burn_in: {burn_in} outside [0, {steps})")
    seed = int(values.get("run.seed", 0))
    ff_name = values.get("bath.form_factor", "gaussian")
    try:
        if ff_name == "flat":
            if "bath.ff_cutoff" not in values:
                raise ConfigError("key bath.ff_cutoff: required for the flat profile")
            ff = FormFactor.flat(
                float(values["bath.ff_cutoff"]),
                float(values.get("bath.ff_amplitude", 1.0)),
            )
        else:
            ff = FormFactor(ff_name, amplitude=float(values.get("bath.ff_amplitude", 1.0)))
    except ValueError as exc:
        raise ConfigError(f"key bath.form_factor: {exc}") from exc
    e_s = float(values["system.E_S"])
    e_e = float(values["chain.E_E"])
    s_max = float(values.get("bath.s_max", 4.0 * max(e_s, e_e)))
    n_modes = int(values.get("bath.n_modes", 0))
    try:
        bath = BathSpec(form_factor=ff, n_modes=n_modes, s_max=s_max)
        model = ModelSpec(
            E_S=e_s,
            E_E=e_e,
            beta_E=float(values["chain.beta"]),
            beta_R=float(values.get("reservoir.beta", 0.0)),
            tau=float(values["step.tau"]),
            lambda1=float(values["coupling.lambda1"]),
            lambda2=float(values["coupling.lambda2"]),
            bath=bath,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    tolerances = {
        "trace_preservation": float(values.get("tol.trace_preservation", 1e-10)),
        "complete_positivity": float(values.get("tol.complete_positivity", 1e-8)),
        "state": float(values.get("tol.state", 1e-9)),
    }
    normalized = {
        "system.E_S": model.E_S,
        "chain.E_E": model.E_E,
        "chain.beta": model.beta_E,
        "reservoir.beta": model.beta_R,
        "step.tau": model.tau,
        "coupling.lambda1": model.lambda1,
        "coupling.lambda2": model.lambda2,
        "bath.form_factor": ff.name,
        "bath.ff_amplitude": ff.amplitude,
        "bath.n_modes": n_modes,
        "bath.s_max": s_max,
        "run.mode": mode,
        "run.steps": steps,
        "run.burn_in": burn_in,
        "run.seed": seed,
        "run.initial": initial,
        "tol.trace_preservation": tolerances["trace_preservation"],
        "tol.complete_positivity": tolerances["complete_positivity"],
        "tol.state": tolerances["state"],
    }
    if ff.cutoff is not None:
        normalized["bath.ff_cutoff"] = ff.cutoff
    if "run.out" in values:
        normalized["run.out"] = values["run.out"]
    return ExperimentConfig(
        model=model,
        mode=mode,
        steps=steps,
        burn_in=burn_in,
        seed=seed,
        initial=initial,
        out=values.get("run.out"),
        tolerances=tolerances,
        normalized=normalized,
    )


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def normalize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form of a parsed config (sorted keys, 17 digits)."""
    lines = [f"{k} = {_fmt(v)}" for k, v in sorted(cfg.normalized.items())]
    return "\n".join(lines) + "\n"


def _initial_state(name: str) -> DensityMatrix:
    if name == "ground":
        m = np.diag([1.0, 0.0])
    elif name == "excited":
        m = np.diag([0.0, 1.0])
    elif name == "mixed":
        m = np.diag([0.5, 0.5])
    else:  # plus
        m = np.full((2, 2), 0.5)
    return DensityMatrix(m.astype(complex), (2,))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _spectral_section(data: rdo.SpectralData) -> dict:
    return {
        "eigenvalues": [[z.real, z.imag] for z in data.eigenvalues],
        "spectral_radius": data.spectral_radius,
        "gap": data.gap,
        "fgr_ok": data.fgr_ok,
        "peripheral_semisimple": data.peripheral_semisimple,
        "fixed_point_unique": data.fixed_point_unique,
        "fixed_point": _jsonable(
            [[complex(z) for z in row] for row in data.fixed_point.matrix]
        ),
    }


def _flux_section(report: thermo.FluxReport) -> dict:
    return {
        "balance_residual": report.balance_residual,
        "burn_in": report.burn_in,
        "avg_dE_S": report.avg_dE_S,
        "avg_dE_R": report.avg_dE_R,
        "avg_dE_C": report.avg_dE_C,
        "avg_dE_tot": report.avg_dE_tot,
        "avg_dS": report.avg_dS,
        "avg_dS_second_law": report.avg_dS_second_law,
        "dS_consistency": report.dS_consistency,
    }


def _predictions_section(model: ModelSpec) -> dict:
    try:
        pred = closed_form_predictions(model)
    except AssumptionError as exc:
        return {"refused": exc.assumption}
    return {
        "gamma_th2": pred.gamma_th2,
        "gamma_ri2": pred.gamma_ri2,
        "beta_prime": pred.beta_prime,
        "gamma_mix": pred.gamma_mix,
        "kappa": pred.kappa,
        "rho_plus_S": _jsonable(
            [[complex(z) for z in row] for row in pred.rho_plus_S.matrix]
        ),
        "dE_C": pred.dE_C,
        "dE_R": pred.dE_R,
        "dE_tot": pred.dE_tot,
        "dS": pred.dS,
        "e0": [pred.e0.real, pred.e0.imag],
        "e_plus": [pred.e_plus.real, pred.e_plus.imag],
        "e_minus": [pred.e_minus.real, pred.e_minus.imag],
        "Z_betaR": pred.Z_betaR,
        "Z_betaPrime": pred.Z_betaPrime,
        "lamb_pv": pred.lamb_pv,
    }


def _build_channel(cfg: ExperimentConfig):
    model = cfg.model
    if cfg.mode == "chain-only":
        return rdo.chain_channel(model)
    if cfg.mode == "bath-only":
        return rdo.bath_channel_effective(model)
    if cfg.mode == "combined-effective":
        return rdo.combined_channel(model)
    if cfg.mode == "exact-srbath":
        modes = discretize_bath(model.bath, model.beta_R)
        return rdo.exact_srbath_channel(model, modes)
    return None


def _run_trajectory(cfg: ExperimentConfig):
    model = cfg.model
    init = _initial_state(cfg.initial)
    if cfg.mode == "chain-only":
        return dynamics.evolve(init, cfg.steps, model, retention=0)
    if cfg.mode == "bath-only":
        return dynamics.evolve(
            init, cfg.steps, model, effective_bath=True, include_chain=False,
            retention=0,
        )
    if cfg.mode == "combined-effective":
        return dynamics.evolve(init, cfg.steps, model, effective_bath=True, retention=0)
    if cfg.mode == "exact-srbath":
        modes = discretize_bath(model.bath, model.beta_R)
        joint = DensityMatrix(
            np.kron(init.matrix, bath_thermal_state(modes).matrix),
            (2 * 2**modes.n_modes,),
        )
        return dynamics.evolve(joint, cfg.steps, model, modes, retention=0)
    return None


def run_experiment(cfg: ExperimentConfig) -> tuple[dict, list[str], list[str] | None]:
    """Execute one experiment; returns (report, spectrum rows, trajectory rows).

    Raises :class:`AssumptionError` for degenerate-parameter refusals and
    :class:`NumericalCheckError` when an internal invariant check fails.
    """
    model = cfg.model
    report: dict = {
        "config": dict(sorted(cfg.normalized.items())),
        "mode": cfg.mode,
        "validity": {
            "chain_ok": model.validity().chain_ok,
            "spectral_ok": model.validity().spectral_ok,
        },
    }

    if cfg.mode == "predictions":
        pred = closed_form_predictions(model)  # raises AssumptionError if degenerate
        report["predictions"] = _predictions_section(model)
        eigs = [1.0 + 0.0j, pred.e0, pred.e_plus, pred.e_minus]
        order = np.lexsort(
            (
                [-round(z.imag, 12) for z in eigs],
                [-round(z.real, 12) for z in eigs],
                [-round(abs(z), 12) for z in eigs],
            )
        )
        spectrum = [eigs[i] for i in order]
        rows = ["index,real,imag,modulus"]
        for i, z in enumerate(spectrum):
            rows.append(f"{i},{z.real:.17g},{z.imag:.17g},{abs(z):.17g}")
        return report, rows, None

    channel = _build_channel(cfg)
    spectral = rdo.spectral_analysis(channel)
    report["spectral"] = _spectral_section(spectral)
    if channel.is_dense:
        checks = rdo.channel_checks(channel)
        checks_ok = checks.ok(
            tp_tol=cfg.tolerances["trace_preservation"],
            cp_tol=cfg.tolerances["complete_positivity"],
        )
        report["checks"] = {
            "unitality_residual": checks.unitality_residual,
            "hermiticity_residual": checks.hermiticity_residual,
            "choi_min_eigenvalue": checks.choi_min_eigenvalue,
            "passed": checks_ok,
        }
        if not checks_ok:
            raise NumericalCheckError(
                f"channel invariant checks failed: unitality "
                f"{checks.unitality_residual:.3e}, choi min eigenvalue "
                f"{checks.choi_min_eigenvalue:.3e}"
            )
        contraction = rdo.check_contraction(channel)
        report["contraction"] = {
            "spectral_radius": contraction.spectral_radius,
            "spr_within_unit": contraction.spr_within_unit,
            "all_peripheral_semisimple": contraction.all_peripheral_semisimple,
        }
        if channel.dim == 2:
            pop, block_residual = rdo.population_block_eigenvalues(channel)
            report["spectral"]["population_eigenvalues"] = [
                [z.real, z.imag] for z in pop
            ]
            report["spectral"]["population_block_residual"] = block_residual

    rows = ["index,real,imag,modulus"]
    for i, z in enumerate(spectral.eigenvalues):
        rows.append(f"{i},{z.real:.17g},{z.imag:.17g},{abs(z):.17g}")

    traj_rows: list[str] | None = None
    if cfg.steps > 0:
        traj = _run_trajectory(cfg)
        for state in traj.states:
            state.validate(cfg.tolerances["state"])
        ledger = thermo.energy_ledger(traj, model)
        ledger = thermo.asymptotic_rates(ledger, cfg.burn_in)
        report["fluxes"] = _flux_section(ledger)
        traj_rows = ["step,p0,p1,coherence_modulus,dE_S,dE_R,dE_C,dE_tot"]
        for m, state in enumerate(traj.states):
            s = state.matrix if state.dim == 2 else _system_marginal(state)
            p0, p1 = s[0, 0].real, s[1, 1].real
            coh = abs(s[0, 1])
            if m == 0:
                flux = (0.0, 0.0, 0.0, 0.0)
            else:
                flux = (
                    ledger.dE_S[m - 1],
                    ledger.dE_R[m - 1],
                    ledger.dE_C[m - 1],
                    ledger.dE_tot[m - 1],
                )
            traj_rows.append(
                f"{m},{p0:.17g},{p1:.17g},{coh:.17g},"
                + ",".join(f"{x:.17g}" for x in flux)
            )

    if cfg.mode in ("combined-effective", "bath-only", "chain-only", "exact-srbath"):
        report["predictions"] = _predictions_section(model)

    if cfg.mode == "combined-effective" and "refused" not in report["predictions"]:
        pred = closed_form_predictions(model)
        fp = spectral.fixed_point.matrix
        deltas = {
            "fixed_point_trace_distance": linalg.trace_distance(
                fp, pred.rho_plus_S.matrix
            )
        }
        pop, _ = rdo.population_block_eigenvalues(channel)
        e0_exact = pop[-1]  # the non-unit population eigenvalue
        deltas["e0_abs_delta"] = abs(complex(e0_exact) - pred.e0)
        if cfg.steps > 0:
            tau = model.tau
            deltas["dE_C_abs_delta"] = abs(report["fluxes"]["avg_dE_C"] - tau * pred.dE_C)
            deltas["dE_R_abs_delta"] = abs(report["fluxes"]["avg_dE_R"] - tau * pred.dE_R)
            deltas["dE_tot_abs_delta"] = abs(
                report["fluxes"]["avg_dE_tot"] - tau * pred.dE_tot
            )
            deltas["dS_abs_delta"] = abs(report["fluxes"]["avg_dS"] - tau * pred.dS)
        report["deltas"] = deltas
        reversed_channel = rdo.combined_channel(model, order="chain-first")
        report["diagnostics"] = {
            "composition_order_delta": float(
                np.max(np.abs(channel.matrix - reversed_channel.matrix))
            )
        }
    return report, rows, traj_rows


def _system_marginal(state: DensityMatrix) -> np.ndarray:
    d = state.dim
    return linalg.partial_trace(state.matrix, (2, d // 2), keep=(0,))


def _write_artifacts(outdir: Path, report: dict, spectrum, trajectory) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "spectrum.csv").write_text("\n".join(spectrum) + "\n")
    if trajectory is not None:
        (outdir / "trajectory.csv").write_text("\n".join(trajectory) + "\n")
    (outdir / "report.json").write_text(
        json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    )


def _cmd_run(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    outdir = Path(args.out or cfg.out or "riqs_out")
    report, spectrum, trajectory = run_experiment(cfg)
    _write_artifacts(outdir, report, spectrum, trajectory)
    print(f"wrote {outdir}/report.json")
    return EXIT_OK


_SWEEPABLE = ("coupling.lambda1", "coupling.lambda2", "coupling.lambda")


def _cmd_sweep(args) -> int:
    base_text = Path(args.config).read_text()
    if args.param not in _SWEEPABLE:
        raise ConfigError(f"sweep parameter {args.param!r} not in {_SWEEPABLE}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values {args.values!r}") from exc
    if not values:
        raise ConfigError("empty sweep value list")
    outdir = Path(args.out or "riqs_sweep")

    def one(value: float):
        cfg = parse_config(base_text)
        overrides = dict(cfg.normalized)
        if args.param == "coupling.lambda":
            overrides["coupling.lambda1"] = value
            overrides["coupling.lambda2"] = value
        else:
            overrides[args.param] = value
        text = "\n".join(f"{k} = {_fmt(v)}" for k, v in sorted(overrides.items()))
        sub = parse_config(text)
        return run_experiment(sub)

    workers = int(os.environ.get("RIQS_THREADS", "0")) or min(4, os.cpu_count() or 1)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, values))
    reports = []
    for value, (report, spectrum, trajectory) in zip(values, results):
        sub = outdir / f"value_{_fmt(value)}"
        _write_artifacts(sub, report, spectrum, trajectory)
        reports.append(report)
    merged = {"param": args.param, "values": values, "reports": reports}
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "sweep.json").write_text(
        json.dumps(_jsonable(merged), indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {outdir}/sweep.json")
    return EXIT_OK


_FAMILY_EXCLUDE = {
    "run.mode",
    "run.steps",
    "run.burn_in",
    "run.initial",
    "run.out",
    "coupling.lambda1",
    "coupling.lambda2",
}


def _load_sweep(path: str) -> dict:
    data = json.loads(Path(path).read_text())
    if "reports" in data:
        return data
    # single report: wrap as a one-entry sweep
    lam = data["config"].get("coupling.lambda2", 0.0)
    return {"param": "coupling.lambda2", "values": [lam], "reports": [data]}


def _family_key(report: dict) -> dict:
    return {
        k: v for k, v in report["config"].items() if k not in _FAMILY_EXCLUDE
    }


def _cmd_compare(args) -> int:
    a = _load_sweep(args.report_a)
    b = _load_sweep(args.report_b)
    if a["values"] != b["values"]:
        raise ConfigError("sweep value grids differ between the two reports")
    for ra, rb in zip(a["reports"], b["reports"]):
        if _family_key(ra) != _family_key(rb):
            raise ConfigError("reports come from different model families")
    quantities: dict[str, list[float]] = {}
    lam = [abs(float(v)) for v in a["values"]]
    for ra, rb in zip(a["reports"], b["reports"]):
        pred = rb.get("predictions")
        if pred is None or "refused" in pred:
            raise ConfigError("second report carries no usable predictions")
        tau = float(ra["config"]["step.tau"])
        if "spectral" in ra:
            fp = _matrix_from_json(ra["spectral"]["fixed_point"])
            rp = _matrix_from_json(pred["rho_plus_S"])
            quantities.setdefault("fixed_point_trace_distance", []).append(
                linalg.trace_distance(fp, rp)
            )
            pe = ra["spectral"].get("population_eigenvalues")
            if pe is not None:
                e0 = complex(*pe[-1])
                quantities.setdefault("e0_abs_delta", []).append(
                    abs(e0 - complex(*pred["e0"]))
                )
        if "fluxes" in ra and ra["fluxes"]["avg_dE_C"] is not None:
            for q in ("dE_C", "dE_R", "dE_tot", "dS"):
                measured = float(ra["fluxes"][f"avg_{q}"])
                quantities.setdefault(f"{q}_abs_delta", []).append(
                    abs(measured - tau * float(pred[q]))
                )
    table: dict[str, dict] = {}
    for name, deltas in sorted(quantities.items()):
        entry: dict = {"deltas": deltas}
        if len(deltas) >= 2 and all(d > 0 for d in deltas) and len(set(lam)) > 1:
            slope = float(np.polyfit(np.log(lam), np.log(deltas), 1)[0])
            entry["loglog_slope"] = slope
        table[name] = entry
    out = {"values": a["values"], "quantities": table}
    text = json.dumps(_jsonable(out), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="riqs",
        description="Repeated-interaction quantum system simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(func=_cmd_run)
    p_sweep = sub.add_parser("sweep", help="fan out runs over a coupling parameter")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=_cmd_sweep)
    p_cmp = sub.add_parser("compare", help="compare measured and predicted reports")
    p_cmp.add_argument("report_a")
    p_cmp.add_argument("report_b")
    p_cmp.add_argument("--out", default=None)
    p_cmp.set_defaults(func=_cmd_compare)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssumptionError as exc:
        print(f"assumption violated: {exc.assumption}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except NumericalCheckError as exc:
        print(f"numerical invariant failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
