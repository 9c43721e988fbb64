"""Flat key-value configuration with dotted section keys.

The format is deliberately primitive so any tool can produce it:

    # comment
    seed = 42
    solver.alpha = 0.5
    solver.n = 256
    scenario.kind = apriori

Unknown keys are rejected; every key has a typed default, so the empty
document parses to the full default configuration.  parse -> serialize ->
parse is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, fields, replace

from .errors import ConfigurationError

_VALID_KINDS = (
    "apriori", "difference_low", "difference_hs", "bona_smith",
    "galilean", "scaling", "threshold_probe",
)
_VALID_INTEGRATORS = ("etdrk4", "ifrk4")
_VALID_DISPERSIONS = ("fractional", "whitham")


@dataclass(frozen=True)
class SolverSection:
    alpha: float = 0.5
    n: int = 256
    dt: float = 1e-3
    t: float = 0.5
    integrator: str = "etdrk4"
    record_every: int = 5
    sobolev_s: tuple[float, ...] = (1.1,)
    datum: str = "random"
    amplitude: float = 1.0
    datum_mode: int = 1


@dataclass(frozen=True)
class ScenarioSection:
    kind: str = "apriori"
    s: float = 1.1
    r: float | None = None
    n_data: int = 5
    amplitude: float = 1.0
    ratio_cap: float = 10.0
    delta: float = 1e-3
    c_values: tuple[float, ...] = (0.0, 0.3, 1.0)
    n_grid: tuple[int, ...] = (3, 4, 5, 6, 7)
    lambdas: tuple[int, ...] = (2, 4)
    packet_freqs: tuple[int, ...] = (16, 32, 64)


@dataclass(frozen=True)
class VerifierSection:
    case: str = "sigma1"
    kmax: int = 8
    budget: int = 10_000_000
    n_samples: int = 200
    variant: str = "generic"


@dataclass(frozen=True)
class DispersionSection:
    name: str = "fractional"
    tau: float = 1.0
    kappa: float | None = None
    xi_max: int = 512


@dataclass(frozen=True)
class FullConfig:
    seed: int = 0
    solver: SolverSection = dc_field(default_factory=SolverSection)
    scenario: ScenarioSection = dc_field(default_factory=ScenarioSection)
    verifier: VerifierSection = dc_field(default_factory=VerifierSection)
    dispersion: DispersionSection = dc_field(default_factory=DispersionSection)

    def echo(self) -> dict:
        return {k: v for k, v in sorted(_flatten(self).items())}


def _parse_bool(v: str) -> bool:
    if v.lower() in ("true", "yes", "1"):
        return True
    if v.lower() in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {v}")


def _tuple_of(cast):
    def parse(v: str):
        parts = [p.strip() for p in v.split(",") if p.strip()]
        return tuple(cast(p) for p in parts)
    return parse


def _optional_float(v: str):
    return None if v.lower() in ("none", "") else float(v)


_SECTION_TYPES = {
    "solver": SolverSection,
    "scenario": ScenarioSection,
    "verifier": VerifierSection,
    "dispersion": DispersionSection,
}

_PARSERS = {
    ("", "seed"): int,
    ("solver", "alpha"): float,
    ("solver", "n"): int,
    ("solver", "dt"): float,
    ("solver", "t"): float,
    ("solver", "integrator"): str,
    ("solver", "record_every"): int,
    ("solver", "sobolev_s"): _tuple_of(float),
    ("solver", "datum"): str,
    ("solver", "amplitude"): float,
    ("solver", "datum_mode"): int,
    ("scenario", "kind"): str,
    ("scenario", "s"): float,
    ("scenario", "r"): _optional_float,
    ("scenario", "n_data"): int,
    ("scenario", "amplitude"): float,
    ("scenario", "ratio_cap"): float,
    ("scenario", "delta"): float,
    ("scenario", "c_values"): _tuple_of(float),
    ("scenario", "n_grid"): _tuple_of(int),
    ("scenario", "lambdas"): _tuple_of(int),
    ("scenario", "packet_freqs"): _tuple_of(int),
    ("verifier", "case"): str,
    ("verifier", "kmax"): int,
    ("verifier", "budget"): int,
    ("verifier", "n_samples"): int,
    ("verifier", "variant"): str,
    ("dispersion", "name"): str,
    ("dispersion", "tau"): float,
    ("dispersion", "kappa"): _optional_float,
    ("dispersion", "xi_max"): int,
}


def _flatten(cfg: FullConfig) -> dict:
    out = {"seed": cfg.seed}
    for section in ("solver", "scenario", "verifier", "dispersion"):
        obj = getattr(cfg, section)
        for f in fields(obj):
            out[f"{section}.{f.name}"] = getattr(obj, f.name)
    return out


def parse_config(text) -> FullConfig:
    """Parse the flat key-value format; fill defaults; validate semantics."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigurationError(f"config is not UTF-8: {exc}") from exc
    updates: dict[tuple[str, str], object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            col = len(raw) - len(raw.lstrip()) + 1
            raise ConfigurationError(
                f"syntax error at line {lineno}, column {col}: expected 'key = value'"
            )
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if "." in key:
            section, name = key.split(".", 1)
        else:
            section, name = "", key
        parser = _PARSERS.get((section, name))
        if parser is None:
            col = raw.index(key.split(".")[0]) + 1
            raise ConfigurationError(
                f"unknown key '{key}' at line {lineno}, column {col}"
            )
        try:
            updates[(section, name)] = parser(value)
        except ValueError as exc:
            col = raw.index("=") + 2
            raise ConfigurationError(
                f"bad value for '{key}' at line {lineno}, column {col}: {exc}"
            ) from exc

    cfg = FullConfig()
    if ("", "seed") in updates:
        cfg = replace(cfg, seed=updates.pop(("", "seed")))
    by_section: dict[str, dict] = {}
    for (section, name), value in updates.items():
        by_section.setdefault(section, {})[name] = value
    for section, kv in by_section.items():
        cfg = replace(cfg, **{section: replace(getattr(cfg, section), **kv)})
    _validate(cfg)
    return cfg


def _validate(cfg: FullConfig) -> None:
    sol, sc, ver, disp = cfg.solver, cfg.scenario, cfg.verifier, cfg.dispersion
    if not 0.0 < sol.alpha < 1.0:
        raise ConfigurationError("alpha must lie in (0,1)")
    if sol.n < 8 or (sol.n & (sol.n - 1)) != 0:
        raise ConfigurationError("solver.n must be a power of two >= 8")
    if sol.dt <= 0:
        raise ConfigurationError("solver.dt must be positive")
    if sol.t <= 0:
        raise ConfigurationError("solver.t must be positive")
    if sol.integrator not in _VALID_INTEGRATORS:
        raise ConfigurationError(
            f"solver.integrator must be one of {_VALID_INTEGRATORS}"
        )
    if sol.datum not in ("random", "cos", "packet"):
        raise ConfigurationError("solver.datum must be random, cos or packet")
    if sc.kind not in _VALID_KINDS:
        raise ConfigurationError(f"scenario.kind must be one of {_VALID_KINDS}")
    if sc.kind in ("apriori", "difference_hs", "bona_smith"):
        if sc.s <= 1.5 - sol.alpha:
            raise ConfigurationError(
                f"scenario.s must exceed 3/2 - alpha = {1.5 - sol.alpha} "
                f"for the '{sc.kind}' preset"
            )
    if sc.r is not None and sc.r < sc.s:
        raise ConfigurationError("scenario.r must satisfy r >= s")
    if ver.budget <= 0 or ver.n_samples <= 0 or ver.kmax < 0:
        raise ConfigurationError("verifier settings must be positive")
    if ver.variant not in ("generic", "improved"):
        raise ConfigurationError("verifier.variant must be generic or improved")
    if disp.name not in _VALID_DISPERSIONS:
        raise ConfigurationError(
            f"dispersion.name must be one of {_VALID_DISPERSIONS}"
        )
    if disp.tau <= 0:
        raise ConfigurationError("dispersion.tau must be positive")


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: FullConfig) -> str:
    lines = [f"seed = {cfg.seed}"]
    for section in ("solver", "scenario", "verifier", "dispersion"):
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{section}.{f.name} = {_format_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"
