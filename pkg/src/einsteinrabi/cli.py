"""Command-line front end: ``einsteinrabi <command> --config run.json``.

Exit codes: 0 success, 2 invalid config, data or input domain, 3 numerical
failure, 4 fit finished without converging.
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from .config import RunSetup, build_setup, frequency, load_config
from .coupling import einstein_b0, free_space_a0
from .dynamics import (
    RateParams,
    entropy_over_kb_of,
    excited_weight,
    generalized_solution,
)
from .errors import ConfigError, DomainError, FitError, NumericalError, TraceFormatError
from .fit import LossyRabiTemplate, fit_trace
from .photons import photon_number_fluctuation, planck_density_per_photon
from .timeseries import TimeSeries
from .traceio import read_trace
from .transition import (
    absorption_rate,
    generalized_A,
    generalized_B21,
    prob_ideal,
    prob_lossy,
    prob_lossy_low_nbar,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NOT_CONVERGED = 4


def _q(value, unit, formula):
    return {"value": float(value), "unit": unit, "formula": formula}


def constants_report(setup: RunSetup) -> dict:
    system, coupling = setup.system, setup.coupling
    nbar = setup.nbar
    a0 = coupling.a0_coefficient
    report = {
        "omega0": _q(system.omega0, "rad/s", "input"),
        "d21": _q(system.d21, "C m", "input"),
        "nbar": _q(nbar, "1", "bose_einstein" if setup.field.is_thermal else "input"),
        "delta_n": _q(photon_number_fluctuation(setup.field), "1",
                      "sqrt(nbar(nbar+1))" if setup.field.is_thermal else "sqrt(nbar)"),
        "a0_free_space": _q(free_space_a0(system), "1/s", "d^2 w0^3 / (3 pi c^3 eps0 hbar)"),
        "b0_free_space": _q(einstein_b0(system), "m^3/(J s^2)", "pi d^2 / (3 eps0 hbar^2)"),
        "u_tilde": _q(planck_density_per_photon(system.omega0), "J s/m^3", "hbar w0^3 / (pi^2 c^3)"),
        "a0": _q(a0, "1/s", "A(0) used by the scenario"),
        "b0": _q(coupling.b0_coefficient, "m^3/(J s^2)", "A(0) / u_tilde"),
        "r0": _q(a0 * nbar, "1/s", "B21(0) u(w0) = A(0) nbar"),
        "g_prime": _q(coupling.g_prime, "rad/s", _coupling_formula(setup)),
        "omega_rabi": _q(coupling.omega_rabi, "rad/s", "2 g' sqrt(nbar+1)"),
        "a0_over_omega_rabi": _q(a0 / coupling.omega_rabi, "1", "A(0) / Omega_R"),
        "r0_over_omega_rabi": _q(a0 * nbar / coupling.omega_rabi, "1", "A(0) nbar / Omega_R"),
        "rwa_ratio": _q(2.0 * coupling.g_prime / system.omega0, "1", "2 g' / w0"),
    }
    if setup.geometry is not None:
        report["p0"] = _q(setup.geometry.escape_probability, "1", "1 / (1 + r/h)")
        report["Q"] = _q(setup.geometry.q_factor, "1", "input")
    if setup.is_lossy:
        report["Qnet"] = _q(coupling.q_net, "1", "1 / (1/Q + p0 A(0) / w0)")
        report["linewidth"] = _q(system.omega0 / coupling.q_net, "rad/s", "w0 / Qnet")
    return {"scenario": coupling.scenario.value, "renorm": setup.renorm, "quantities": report}


def _coupling_formula(setup: RunSetup) -> str:
    if not setup.is_lossy:
        return "A(0) Li_{-1/2}(nbar/(1+nbar)) / nbar"
    if setup.renorm == "mean":
        return "lossy fixed point at nbar"
    return "lossy long-time limit = 1/2 over p_n"


def rabi_series(setup: RunSetup) -> TimeSeries:
    t = setup.times()
    opts = setup.raw.get("rabi", {})
    method = opts.get("method", "auto")
    if not setup.is_lossy:
        p = prob_ideal(setup.model, t)
    elif opts.get("evaluator", "full") == "low_nbar":
        p = prob_lossy_low_nbar(setup.model, t, method=method)
    else:
        p = prob_lossy(setup.model, t, method=method)
    return TimeSeries(t, {"p21": p})


def coefficient_series(setup: RunSetup, mode: str) -> TimeSeries:
    t = setup.times()
    coupling, field = setup.coupling, setup.field
    nbar = setup.nbar
    u_tilde = planck_density_per_photon(setup.system.omega0)
    a_t = np.asarray(generalized_A(coupling, field, t, mode))
    if nbar > 0:
        b21 = np.asarray(generalized_B21(coupling, field, t, mode))
        stim = u_tilde * nbar * b21
    else:
        stim = np.zeros_like(a_t)
    r12 = np.asarray(absorption_rate(setup.model, t, mode))
    if setup.raw.get("coefficients", {}).get("normalize", False):
        scale = 1.0 / coupling.a0_coefficient
        a_t, stim, r12 = a_t * scale, stim * scale, r12 * scale
    return TimeSeries(t, {"a_t": a_t, "b21_u": stim, "r12": r12})


def rate_params(setup: RunSetup) -> RateParams:
    rates = setup.raw.get("dynamics", {}).get("rates")
    if rates is None:
        return RateParams.from_coupling(setup.coupling)
    om = setup.coupling.omega_rabi
    return RateParams.from_ratios(rates["a0_over_omega_rabi"], rates["r0_over_omega_rabi"], om)


def dynamics_series(setup: RunSetup) -> TimeSeries:
    t = setup.times()
    params = rate_params(setup)
    init = setup.raw.get("dynamics", {}).get("init", "excited")
    start = 0.0 if init == "ground" else 1.0
    state = generalized_solution(params, start, t)
    series = TimeSeries(t, {
        "p1": state.p1,
        "p2": state.p2,
        "entropy_over_kB": entropy_over_kb_of(state),
    })
    if init == "thermal-average":
        if not setup.field.is_thermal or setup.field.temperature <= 0:
            raise ConfigError("config error at field: thermal-average needs a positive temperature")
        w2 = excited_weight(setup.field.temperature, setup.system.omega0)
        ground = generalized_solution(params, 0.0, t)
        s_avg = w2 * entropy_over_kb_of(state) + (1.0 - w2) * entropy_over_kb_of(ground)
        series.add("s_avg_over_kB", s_avg)
    return series


def fit_template(setup: RunSetup) -> LossyRabiTemplate:
    if not setup.is_lossy:
        raise ConfigError("config error at cavity.mode: fitting needs a lossy cavity")
    cav = setup.raw["cavity"]
    initial = setup.raw["fit"].get("initial", {})
    cal = cav.get("calibration", {})
    if "omega_rabi" in initial:
        omega_rabi = frequency(initial["omega_rabi"])
    elif "omega_rabi" in cal:
        omega_rabi = frequency(cal["omega_rabi"])
    else:
        omega_rabi = setup.coupling.omega_rabi
    geometry = None
    if setup.geometry is not None:
        geometry = (setup.geometry.mirror_radius, setup.geometry.mirror_separation)
        q_factor = setup.geometry.q_factor
    else:
        q_factor = setup.coupling.q_net
    nbar = cal.get("nbar", setup.nbar)
    return LossyRabiTemplate(
        omega0=setup.system.omega0,
        omega_rabi=omega_rabi,
        q_factor=float(initial.get("q_factor", q_factor)),
        nbar=float(initial.get("nbar", nbar)),
        amplitude=float(initial.get("amplitude", 1.0)),
        offset=float(initial.get("offset", 0.0)),
        geometry=geometry,
    )


def fit_bounds(raw_bounds: dict) -> dict:
    out = {}
    for name, spec in raw_bounds.items():
        if isinstance(spec, dict):
            lo = frequency({"value": spec["lo"], "unit": spec["unit"]})
            hi = frequency({"value": spec["hi"], "unit": spec["unit"]})
        else:
            lo, hi = spec
        out[name] = (float(lo), float(hi))
    return out


def run_fit(setup: RunSetup, data_path: str, seed: int):
    cfg = setup.raw.get("fit")
    if cfg is None:
        raise ConfigError("config error at fit: the fit command needs a fit section")
    data = read_trace(data_path)
    return fit_trace(
        data,
        fit_template(setup),
        cfg["vary"],
        fit_bounds(cfg["bounds"]),
        seed=seed,
        restarts=cfg.get("restarts", 3),
        budget=cfg.get("budget", 2000),
    )


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="einsteinrabi",
        description="Generalized Einstein coefficients and quantum Rabi oscillations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "constants": "report derived constants as JSON",
        "rabi": "emission probability P21(t) as CSV",
        "coefficients": "generalized A(t), stimulated and absorption rates as CSV",
        "dynamics": "level populations and entropy as CSV",
        "fit": "fit a measured trace, report JSON",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if name == "coefficients":
            p.add_argument("--mode", choices=["exact", "approx"], default="approx",
                           help="photon-number sum or |J0(Omega_R t)| form")
        if name == "fit":
            p.add_argument("--data", required=True, help="trace CSV: t_s,value[,weight]")
            p.add_argument("--seed", type=int, default=0, help="seed for restart points")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        setup = build_setup(load_config(args.config))
        if args.command == "constants":
            text = _dump_json(constants_report(setup))
            status = EXIT_OK
        elif args.command == "rabi":
            text, status = rabi_series(setup).to_csv(), EXIT_OK
        elif args.command == "coefficients":
            text, status = coefficient_series(setup, args.mode).to_csv(), EXIT_OK
        elif args.command == "dynamics":
            text, status = dynamics_series(setup).to_csv(), EXIT_OK
        else:
            result = run_fit(setup, args.data, args.seed)
            text = _dump_json(result.to_dict())
            status = EXIT_OK if result.converged else EXIT_NOT_CONVERGED
    except (ConfigError, TraceFormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    with _output(args.out) as fh:
        fh.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
