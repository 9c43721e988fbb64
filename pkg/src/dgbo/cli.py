"""Command-line surface and run/report persistence.

Subcommands:

* ``solve``            -- integrate one datum and save the diagnostics record
* ``verify-estimates`` -- run a symbol-bound scan or a convolution sweep
* ``check-dispersion`` -- admissibility report for a dispersion relation
* ``probe``            -- run a behavioral scenario
* ``export``           -- convert a saved run between json and csv

Exit codes: 0 all checks passed, 2 configuration error, 3 numerical blow-up,
4 a verified property failed.  The only environment input is
``DGBO_NUM_THREADS`` (thread count for sweep parallelism).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .boxes import (
    BoxLab,
    convolution_sweep,
    frequency_sweep_configs,
    modulation_sweep_configs,
)
from .config import FullConfig, parse_config, serialize_config
from .dispersion import check_conditions, fractional_bo, whitham_capillary
from .errors import BlowUpError, ConfigurationError, DgboError
from .experiments import ScenarioConfig, packet_datum, random_smooth_datum, run_scenario
from .littlewood_paley import DEFAULT_BUMP
from .resonance import BoundCase, BoundCaseKind, worst_constant
from .solver import RunRecord, SolverConfig, solve
from .spectral import SpectralField, TorusGrid, to_spectral

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_FAILED = 4


def _envelope(payload: dict, config_echo: dict, seed: int) -> dict:
    return {
        "artifact_version": __version__,
        "bump_profile": DEFAULT_BUMP.identifier,
        "seed": seed,
        "config": config_echo,
        **payload,
    }


def run_to_dict(record: RunRecord, seed: int = 0) -> dict:
    payload = {
        "schema": "dgbo-run",
        "times": record.times.tolist(),
        "mean": record.mean.tolist(),
        "mass": record.mass.tolist(),
        "hamiltonian": record.hamiltonian.tolist(),
        "sobolev": {repr(float(s)): v.tolist() for s, v in record.sobolev.items()},
    }
    return _envelope(payload, record.config, seed)


def run_from_dict(data: dict) -> RunRecord:
    return RunRecord(
        times=np.array(data["times"], dtype=float),
        mean=np.array(data["mean"], dtype=float),
        mass=np.array(data["mass"], dtype=float),
        hamiltonian=np.array(data["hamiltonian"], dtype=float),
        sobolev={float(k): np.array(v, dtype=float)
                 for k, v in data.get("sobolev", {}).items()},
        config=data.get("config", {}),
    )


def _csv_header(record: RunRecord) -> str:
    cols = ["t", "mean", "mass", "hamiltonian"]
    cols += [f"hs_norm[s={repr(float(s))}]" for s in sorted(record.sobolev)]
    return ",".join(cols)


def run_to_csv(record: RunRecord, seed: int = 0) -> str:
    lines = [f"# artifact_version = {__version__}",
             f"# bump_profile = {DEFAULT_BUMP.identifier}",
             f"# seed = {seed}"]
    for key, value in sorted(record.config.items()):
        lines.append(f"# {key} = {value}")
    lines.append(_csv_header(record))
    svals = [record.sobolev[s] for s in sorted(record.sobolev)]
    for i, t in enumerate(record.times):
        row = [repr(float(t)), repr(float(record.mean[i])),
               repr(float(record.mass[i])), repr(float(record.hamiltonian[i]))]
        row += [repr(float(v[i])) for v in svals]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export_run(record_or_report, fmt: str, seed: int = 0) -> bytes:
    """Serialize a run record or any report object to file bytes."""
    if fmt not in ("json", "csv"):
        raise ConfigurationError("format must be json or csv")
    if isinstance(record_or_report, RunRecord):
        if fmt == "json":
            return (json.dumps(run_to_dict(record_or_report, seed), indent=1)
                    + "\n").encode()
        return run_to_csv(record_or_report, seed).encode()
    to_dict = getattr(record_or_report, "to_dict", None)
    if to_dict is None:
        raise ConfigurationError(
            f"cannot export object of type {type(record_or_report).__name__}"
        )
    data = _envelope({"report": to_dict()},
                     to_dict().get("config", {}), seed)
    if fmt == "json":
        return (json.dumps(data, indent=1) + "\n").encode()
    ratios = to_dict().get("ratios")
    if ratios is None:
        raise ConfigurationError("csv export is only defined for runs and "
                                 "scenario reports")
    keys = sorted({k for row in ratios for k in row})
    lines = [f"# artifact_version = {__version__}",
             f"# bump_profile = {DEFAULT_BUMP.identifier}",
             f"# seed = {seed}",
             ",".join(keys)]
    for row in ratios:
        lines.append(",".join(repr(row.get(k, "")) if not isinstance(
            row.get(k, ""), str) else str(row.get(k, "")) for k in keys))
    return ("\n".join(lines) + "\n").encode()


# ---------------------------------------------------------------------------
# subcommand implementations


def _load_config(path: str | None) -> FullConfig:
    if path is None:
        return parse_config("")
    with open(path, "rb") as fh:
        return parse_config(fh.read())


def _dispersion_from(cfg: FullConfig):
    if cfg.dispersion.name == "whitham":
        kappa = cfg.dispersion.kappa if cfg.dispersion.kappa is not None else 10.0
        return whitham_capillary(cfg.dispersion.tau, kappa)
    return fractional_bo(cfg.solver.alpha)


def _datum_from(cfg: FullConfig, grid: TorusGrid) -> SpectralField:
    sol = cfg.solver
    if sol.datum == "cos":
        x = grid.nodes()
        return to_spectral(grid, sol.amplitude * np.cos(sol.datum_mode * x))
    if sol.datum == "packet":
        return packet_datum(grid, sol.datum_mode, cfg.scenario.s, sol.amplitude)
    return random_smooth_datum(grid, cfg.scenario.s, sol.amplitude, cfg.seed)


def _write(path: str | None, data: bytes) -> None:
    if path is None:
        sys.stdout.write(data.decode())
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ConfigurationError(f"cannot write '{path}': {exc}") from exc


def _cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    grid = TorusGrid(cfg.solver.n)
    solver_cfg = SolverConfig(
        dispersion=_dispersion_from(cfg),
        grid=grid,
        dt=cfg.solver.dt,
        horizon=cfg.solver.t,
        integrator=cfg.solver.integrator,
        record_every=cfg.solver.record_every,
        sobolev_s=cfg.solver.sobolev_s,
    )
    record = solve(_datum_from(cfg, grid), solver_cfg)
    record.config["config_echo"] = cfg.echo()
    _write(args.out, export_run(record, "json", seed=cfg.seed))
    if args.csv:
        _write(args.csv, export_run(record, "csv", seed=cfg.seed))
    return EXIT_OK


_SYMBOL_CASES = {
    "resonance": (BoundCaseKind.RESONANCE_ASYMPTOTIC, 0),
    "inv-resonance": (BoundCaseKind.INV_RESONANCE_DIFF, 0),
    "nu": (BoundCaseKind.NU_SYMBOL, 0),
    **{f"sigma{j}": (BoundCaseKind.SIGMA_J, j) for j in (1, 2, 3)},
    **{f"m{j}": (BoundCaseKind.M_FAMILY, j) for j in (1, 2, 3, 4, 5)},
    **{f"a{i}": (BoundCaseKind.A_FAMILY, i) for i in (1, 2, 3)},
    **{f"ap{i}": (BoundCaseKind.A_PRIME_FAMILY, i) for i in (1, 2, 3)},
}


def default_case(name: str, alpha: float, kmax: int) -> BoundCase:
    """Standard scan ranges for each named bound case."""
    kind, member = _SYMBOL_CASES[name]
    lows = 0
    if kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
        ranges = ((0, kmax),) * 3
    elif kind is BoundCaseKind.INV_RESONANCE_DIFF:
        ranges = ((3, kmax), (0, kmax), (3, kmax), (0, max(kmax - 3, 0)))
    elif kind in (BoundCaseKind.SIGMA_J, BoundCaseKind.NU_SYMBOL):
        hi3 = max(kmax - 3, 0)
        ranges = ((3, kmax), (3, kmax), (lows, hi3))
        if kind is BoundCaseKind.NU_SYMBOL:
            ranges = ((3, kmax), (lows, hi3))
    elif kind is BoundCaseKind.A_PRIME_FAMILY:
        low_hi = min(2, kmax)
        ranges = ((4, kmax), (0, low_hi), (4, kmax), (4, kmax), (0, low_hi))
    else:
        low_hi = min(2, kmax)
        ranges = ((4, kmax), (4, kmax), (0, low_hi), (4, kmax), (0, low_hi))
    return BoundCase(kind=kind, alpha=alpha, k_ranges=ranges, member=member)


def _cmd_verify(args) -> int:
    n_threads = int(os.environ.get("DGBO_NUM_THREADS", "1"))
    alpha = args.alpha
    if args.case.startswith("conv"):
        n_inputs = 3 if args.case in ("conv3", "conv3-improved") else 4
        variant = "improved" if args.case.endswith("improved") else "generic"
        lab = BoxLab(fractional_bo(alpha), l_max=args.lmax, k_max=args.kmax)
        configs = modulation_sweep_configs(lab, n_inputs)
        configs += frequency_sweep_configs(lab, n_inputs, k_top=min(args.kmax, 7))
        report = convolution_sweep(
            lab, configs, n_samples=args.samples, bound_variant=variant,
            seed=args.seed, n_threads=n_threads,
        )
        passed = report.trend_slope is not None and report.trend_slope <= 0.05
    elif args.case in _SYMBOL_CASES:
        case = default_case(args.case, alpha, args.kmax)
        report = worst_constant(case, budget=args.budget, seed=args.seed)
        passed = (
            np.isfinite(report.max_ratio)
            and (report.trend_slope is None or report.trend_slope <= 0.05)
        )
        if case.kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
            passed = passed and report.min_ratio is not None and report.min_ratio > 0
    else:
        raise ConfigurationError(
            f"unknown case '{args.case}'; choose from "
            f"{sorted(_SYMBOL_CASES) + ['conv3', 'conv4', 'conv3-improved', 'conv4-improved']}"
        )
    _write(args.out, export_run(report, "json", seed=args.seed))
    return EXIT_OK if passed else EXIT_FAILED


def _cmd_check_dispersion(args) -> int:
    if args.spec == "whitham":
        spec = whitham_capillary(tau=args.tau, kappa=args.kappa or 10.0)
    elif args.spec == "fractional":
        spec = fractional_bo(args.alpha)
    else:
        raise ConfigurationError("spec must be 'fractional' or 'whitham'")
    report = check_conditions(spec, xi_max=args.xi_max)
    _write(args.out, export_run(report, "json"))
    return EXIT_OK if report.passed else EXIT_FAILED


def _cmd_probe(args) -> int:
    cfg = _load_config(args.config)
    sc = cfg.scenario
    scenario = ScenarioConfig(
        kind=args.kind,
        alpha=cfg.solver.alpha,
        s=sc.s,
        r=sc.r,
        n_points=cfg.solver.n,
        dt=cfg.solver.dt,
        horizon=cfg.solver.t,
        seed=cfg.seed,
        n_data=sc.n_data,
        amplitude=sc.amplitude,
        ratio_cap=sc.ratio_cap,
        delta=sc.delta,
        c_values=sc.c_values,
        n_grid=sc.n_grid,
        lambdas=sc.lambdas,
        packet_freqs=sc.packet_freqs,
        record_every=cfg.solver.record_every,
        integrator=cfg.solver.integrator,
    )
    report = run_scenario(scenario)
    report.config["config_echo"] = cfg.echo()
    _write(args.out, export_run(report, "json", seed=cfg.seed))
    if report.passed is False:
        return EXIT_FAILED
    return EXIT_OK


def _cmd_export(args) -> int:
    try:
        with open(getattr(args, "in"), "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read input: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"input is not a dgbo json file: {exc}") from exc
    if data.get("schema") != "dgbo-run":
        raise ConfigurationError("input is not a saved run (schema dgbo-run)")
    record = run_from_dict(data)
    _write(args.out, export_run(record, args.format, seed=data.get("seed", 0)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgbo",
        description="Pseudo-spectral solver and estimate-verification toolkit "
                    "for the periodic dispersion-generalized Benjamin-Ono equation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate one datum")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify-estimates", help="scan a stated bound")
    p.add_argument("--case", required=True)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--lmax", type=int, default=12)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("check-dispersion", help="admissibility report")
    p.add_argument("--spec", required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--xi-max", dest="xi_max", type=int, default=512)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_check_dispersion)

    p = sub.add_parser("probe", help="run a behavioral scenario")
    p.add_argument("--kind", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("export", help="convert a saved run")
    p.add_argument("--format", required=True, choices=("json", "csv"))
    p.add_argument("--in", dest="in", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except DgboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
