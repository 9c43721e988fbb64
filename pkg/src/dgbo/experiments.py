"""Scenario runners probing the quantitative behavior of the flow.

Each scenario turns one of the solution-map properties into a desk-scale
numerical experiment with seeded data and a pass/fail verdict:

* apriori          -- growth of the H^r norm against the datum norm
* difference_low   -- Lipschitz-type stability of differences in H^(-1/2)
* difference_hs    -- the same at the data regularity H^s
* bona_smith       -- solution error induced by smooth truncation of the datum
* galilean         -- adding a constant shifts the solution by a moving frame
* scaling          -- frequency-rescaling covariance of the flow
* threshold_probe  -- norm growth tracking around s = 3/2 - alpha (no verdict)

The underlying constants of the continuum estimates are unspecified, so pass
criteria are boundedness, trend and tolerance checks, never specific values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .dispersion import fractional_bo, DispersionSpec
from .errors import BlowUpError, ConfigurationError
from .littlewood_paley import lp_project_gt, lp_project_le, sobolev_norm
from .solver import RunRecord, SolverConfig, effective_dt, solve
from .spectral import TWO_PI, SpectralField, TorusGrid, apply_multiplier

KINDS = (
    "apriori",
    "difference_low",
    "difference_hs",
    "bona_smith",
    "galilean",
    "scaling",
    "threshold_probe",
)


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    alpha: float = 0.5
    s: float | None = None
    r: float | None = None
    n_points: int = 256
    dt: float = 5e-3
    horizon: float = 0.5
    seed: int = 0
    n_data: int = 5
    amplitude: float = 1.0
    ratio_cap: float = 10.0
    delta: float = 1e-3
    c_values: tuple = (0.0, 0.3, 1.0)
    n_grid: tuple = (3, 4, 5, 6, 7)
    lambdas: tuple = (2, 4)
    packet_freqs: tuple = (16, 32, 64)
    record_every: int = 5
    residual_tol: float = 1e-8
    scaling_tol: float = 1e-6
    trend_tol: float = 0.05
    integrator: str = "etdrk4"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown scenario kind '{self.kind}'")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in (0, 1]")
        threshold = 1.5 - self.alpha
        s = self.s if self.s is not None else threshold + 0.1
        if self.kind in ("apriori", "difference_hs", "bona_smith") and s <= threshold:
            raise ConfigurationError(
                f"scenario '{self.kind}' needs s > 3/2 - alpha = {threshold}"
            )
        r = self.r if self.r is not None else s
        if r < s:
            raise ConfigurationError("r >= s required where both appear")

    @property
    def s_value(self) -> float:
        return self.s if self.s is not None else 1.5 - self.alpha + 0.1

    @property
    def r_value(self) -> float:
        return self.r if self.r is not None else self.s_value

    def describe(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "kind", "alpha", "n_points", "dt", "horizon", "seed", "n_data",
            "amplitude", "ratio_cap", "delta", "record_every", "integrator",
        )}
        d["s"] = self.s_value
        d["r"] = self.r_value
        for k in ("c_values", "n_grid", "lambdas", "packet_freqs"):
            d[k] = list(getattr(self, k))
        return d


@dataclass
class ScenarioReport:
    kind: str
    passed: bool | None
    ratios: list[dict]
    trend: dict
    runs: list[dict]
    notes: list[str]
    config: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def random_smooth_datum(
    grid: TorusGrid, s: float, norm_target: float, seed: int
) -> SpectralField:
    """Mean-zero real field with coefficients ~ <xi>^(-s-1) times seeded
    normals, rescaled so that its block H^s norm equals norm_target."""
    if norm_target <= 0:
        raise ConfigurationError("norm_target must be positive")
    rng = np.random.default_rng(seed)
    n = grid.n_points
    cutoff = grid.dealias_cutoff
    coeffs = np.zeros(n, dtype=np.complex128)
    xi = np.arange(1, cutoff + 1, dtype=np.float64)
    weights = (1.0 + xi**2) ** (-(s + 1.0) / 2.0)
    g = rng.standard_normal(cutoff) + 1j * rng.standard_normal(cutoff)
    coeffs[1:cutoff + 1] = weights * g
    coeffs[-cutoff:] = np.conj(coeffs[1:cutoff + 1][::-1])
    field = SpectralField(grid, coeffs)
    norm = sobolev_norm(field, s)
    return SpectralField(grid, coeffs * (norm_target / norm))


def packet_datum(grid: TorusGrid, center: int, s: float, norm_target: float,
                 width: float | None = None) -> SpectralField:
    """Real field concentrated at frequencies +-center, unit H^s norm."""
    cutoff = grid.dealias_cutoff
    if center + 1 > cutoff:
        raise ConfigurationError("packet centre exceeds the resolved band")
    width = center / 8.0 if width is None else width
    n = grid.n_points
    coeffs = np.zeros(n, dtype=np.complex128)
    xi = np.arange(1, cutoff + 1, dtype=np.float64)
    profile = np.exp(-((xi - center) ** 2) / (2.0 * width**2))
    coeffs[1:cutoff + 1] = profile
    coeffs[-cutoff:] = np.conj(coeffs[1:cutoff + 1][::-1])
    field = SpectralField(grid, coeffs)
    return SpectralField(grid, coeffs * (norm_target / sobolev_norm(field, s)))


def _spec(cfg: ScenarioConfig) -> DispersionSpec:
    return fractional_bo(cfg.alpha)


def _common_dt(cfg: ScenarioConfig, fields: list[SpectralField]) -> float:
    """One fixed step size honoring the stability policy for every datum, so
    paired trajectories share their time grid exactly."""
    base = SolverConfig(_spec(cfg), fields[0].grid, dt=cfg.dt, horizon=cfg.horizon)
    return 0.9 * min(effective_dt(f, base) for f in fields)


def _run(cfg: ScenarioConfig, u0: SpectralField, dt: float, s_list=()) -> RunRecord:
    solver_cfg = SolverConfig(
        _spec(cfg),
        u0.grid,
        dt=dt,
        horizon=cfg.horizon,
        integrator=cfg.integrator,
        record_every=cfg.record_every,
        sobolev_s=tuple(s_list),
        keep_snapshots=True,
    )
    return solve(u0, solver_cfg)


def _run_summary(rec: RunRecord) -> dict:
    return {
        "t_final": float(rec.times[-1]),
        "n_steps": rec.config["n_steps"],
        "effective_dt": rec.config["effective_dt"],
        "mass_initial": float(rec.mass[0]),
        "mass_final": float(rec.mass[-1]),
    }


def run_scenario(cfg: ScenarioConfig) -> ScenarioReport:
    handler = {
        "apriori": _apriori,
        "difference_low": _difference,
        "difference_hs": _difference,
        "bona_smith": _bona_smith,
        "galilean": _galilean,
        "scaling": _scaling,
        "threshold_probe": _threshold_probe,
    }[cfg.kind]
    return handler(cfg)


def _apriori(cfg: ScenarioConfig) -> ScenarioReport:
    grid = TorusGrid(cfg.n_points)
    r = cfg.r_value
    ratios, runs, notes = [], [], []
    passed = True
    for i in range(cfg.n_data):
        seed = cfg.seed + i
        if cfg.amplitude == 0.0:
            # zero datum: the flow is identically zero and the ratio is 0/0
            ratios.append({"seed": seed, "ratio": None, "numerator": 0.0,
                           "denominator": 0.0, "degenerate": True})
            continue
        u0 = random_smooth_datum(grid, cfg.s_value, cfg.amplitude, seed)
        denom = sobolev_norm(u0, r)
        try:
            rec = _run(cfg, u0, _common_dt(cfg, [u0]), s_list=(r,))
        except BlowUpError as exc:
            passed = False
            notes.append(f"seed {seed}: {exc}")
            ratios.append({"seed": seed, "ratio": None, "blowup": True})
            continue
        numer = float(np.max(rec.sobolev[r]))
        ratios.append({"seed": seed, "ratio": numer / denom,
                       "numerator": numer, "denominator": denom})
        runs.append(_run_summary(rec))
        if numer / denom > cfg.ratio_cap:
            passed = False
    finite = [row["ratio"] for row in ratios if row.get("ratio") is not None]
    trend = {"max_ratio": max(finite) if finite else None, "cap": cfg.ratio_cap}
    return ScenarioReport(cfg.kind, passed, ratios, trend, runs, notes,
                          cfg.describe())


def _difference(cfg: ScenarioConfig) -> ScenarioReport:
    grid = TorusGrid(cfg.n_points)
    norm_s = -0.5 if cfg.kind == "difference_low" else cfg.s_value
    u0 = random_smooth_datum(grid, cfg.s_value, cfg.amplitude, cfg.seed)
    direction = random_smooth_datum(grid, cfg.s_value, 1.0, cfg.seed + 1)
    dir_scale = sobolev_norm(direction, norm_s)

    ratios, runs, notes = [], [], []
    passed = True
    values = []
    for delta in (cfg.delta, cfg.delta / 2.0):
        pert = SpectralField(grid, direction.coeffs * (delta / dir_scale))
        u2_0 = SpectralField(grid, u0.coeffs + pert.coeffs)
        dt = _common_dt(cfg, [u0, u2_0])
        try:
            rec1 = _run(cfg, u0, dt)
            rec2 = _run(cfg, u2_0, dt)
        except BlowUpError as exc:
            notes.append(str(exc))
            passed = False
            break
        v_norms = [
            sobolev_norm(SpectralField(grid, a.coeffs - b.coeffs), norm_s)
            for a, b in zip(rec1.snapshots, rec2.snapshots)
        ]
        denom = v_norms[0]
        numer = float(np.max(v_norms))
        values.append(numer / denom)
        ratios.append({"delta": delta, "ratio": numer / denom,
                       "numerator": numer, "denominator": denom})
        runs.extend([_run_summary(rec1), _run_summary(rec2)])
    change = None
    if len(values) == 2:
        change = abs(values[1] - values[0]) / values[0]
        if not np.isfinite(values[1]) or change > 0.20:
            passed = False
    else:
        passed = False
    trend = {"ratio_change": change, "norm_index": norm_s}
    return ScenarioReport(cfg.kind, passed, ratios, trend, runs, notes,
                          cfg.describe())


def _bona_smith(cfg: ScenarioConfig) -> ScenarioReport:
    grid = TorusGrid(cfg.n_points)
    s = cfg.s_value
    u0 = random_smooth_datum(grid, s, cfg.amplitude, cfg.seed)
    truncations = [lp_project_le(u0, n) for n in cfg.n_grid]
    tails = [sobolev_norm(lp_project_gt(u0, n), s) for n in cfg.n_grid]
    if any(t == 0.0 for t in tails):
        raise ConfigurationError(
            "datum has no content above some truncation level; "
            "increase n_points or lower n_grid"
        )
    dt = _common_dt(cfg, [u0] + truncations)
    ratios, runs, notes = [], [], []
    passed = True
    try:
        rec_full = _run(cfg, u0, dt)
        r_values = []
        for n, u2_0, tail in zip(cfg.n_grid, truncations, tails):
            rec_tr = _run(cfg, u2_0, dt)
            diff = [
                sobolev_norm(SpectralField(grid, a.coeffs - b.coeffs), s)
                for a, b in zip(rec_full.snapshots, rec_tr.snapshots)
            ]
            numer = float(np.max(diff))
            r_values.append(numer / tail)
            ratios.append({"n": n, "ratio": numer / tail,
                           "numerator": numer, "denominator": tail})
            runs.append(_run_summary(rec_tr))
    except BlowUpError as exc:
        notes.append(str(exc))
        passed = False
        r_values = []
    slope = None
    if len(r_values) >= 2:
        slope = float(np.polyfit(np.array(cfg.n_grid, dtype=float),
                                 np.log2(r_values), 1)[0])
        if not all(np.isfinite(r_values)) or slope > cfg.trend_tol:
            passed = False
    trend = {"log2_slope": slope, "tolerance": cfg.trend_tol}
    return ScenarioReport(cfg.kind, passed, ratios, trend, runs, notes,
                          cfg.describe())


def _shift_field(field: SpectralField, a: float) -> SpectralField:
    """u(x) -> u(x + a) as the phase multiplier exp(i*a*xi)."""
    return apply_multiplier(
        field, lambda xi: np.exp(1j * a * xi.astype(np.float64))
    )


def _galilean(cfg: ScenarioConfig) -> ScenarioReport:
    grid = TorusGrid(cfg.n_points)
    u0 = random_smooth_datum(grid, max(cfg.s_value, 2.0), cfg.amplitude, cfg.seed)
    ratios, runs, notes = [], [], []
    passed = True
    for c in cfg.c_values:
        shifted0 = u0.coeffs.copy()
        shifted0[0] += TWO_PI * c
        u0_c = SpectralField(grid, shifted0)
        dt = _common_dt(cfg, [u0, u0_c])
        try:
            rec_base = _run(cfg, u0, dt)
            rec_c = _run(cfg, u0_c, dt)
        except BlowUpError as exc:
            notes.append(f"c={c}: {exc}")
            passed = False
            continue
        residual = 0.0
        for t, a, b in zip(rec_base.times, rec_base.snapshots, rec_c.snapshots):
            moved = _shift_field(a, 2.0 * c * t).coeffs.copy()
            moved[0] += TWO_PI * c
            residual = max(
                residual,
                SpectralField(grid, b.coeffs - moved).l2_norm(),
            )
        ratios.append({"c": c, "residual": residual})
        runs.extend([_run_summary(rec_base), _run_summary(rec_c)])
        if residual > cfg.residual_tol or (c == 0.0 and residual != 0.0):
            passed = False
    trend = {"tolerance": cfg.residual_tol}
    return ScenarioReport(cfg.kind, passed, ratios, trend, runs, notes,
                          cfg.describe())


def rescale_field(field: SpectralField, lam: int, alpha: float,
                  grid_out: TorusGrid) -> SpectralField:
    """The symmetry u(x) -> lam^alpha * u(lam x) in coefficients:
    u_hat_out(lam*m) = lam^alpha * u_hat(m)."""
    if lam < 1:
        raise ConfigurationError("lambda must be a positive integer")
    n_in = field.grid.n_points
    out = np.zeros(grid_out.n_points, dtype=np.complex128)
    half = n_in // 2
    for m in range(-half + 1, half):
        target = lam * m
        if abs(target) <= grid_out.dealias_cutoff:
            out[target % grid_out.n_points] = lam**alpha * field.coeffs[m % n_in]
    return SpectralField(grid_out, out)


def _scaling(cfg: ScenarioConfig) -> ScenarioReport:
    grid = TorusGrid(cfg.n_points)
    u0 = packet_datum(grid, center=max(4, cfg.n_points // 32), s=cfg.s_value,
                      norm_target=cfg.amplitude)
    ratios, runs, notes = [], [], []
    passed = True
    dt0 = _common_dt(cfg, [u0])
    try:
        rec = _run(cfg, u0, dt0)
    except BlowUpError as exc:
        notes.append(str(exc))
        return ScenarioReport(cfg.kind, False, [], {}, [], notes, cfg.describe())
    alpha = cfg.alpha
    for lam in cfg.lambdas:
        grid_l = TorusGrid(cfg.n_points * int(lam))
        v0 = rescale_field(u0, int(lam), alpha, grid_l)
        time_factor = float(lam) ** (1.0 + alpha)
        cfg_l = ScenarioConfig(
            kind=cfg.kind, alpha=cfg.alpha, s=cfg.s, r=cfg.r,
            n_points=grid_l.n_points, dt=dt0 / time_factor,
            horizon=cfg.horizon / time_factor, seed=cfg.seed,
            record_every=cfg.record_every, integrator=cfg.integrator,
        )
        try:
            rec_l = _run(cfg_l, v0, dt0 / time_factor)
        except BlowUpError as exc:
            notes.append(f"lambda={lam}: {exc}")
            passed = False
            continue
        expect = rescale_field(rec.snapshots[-1], int(lam), alpha, grid_l)
        mismatch = SpectralField(
            grid_l, rec_l.snapshots[-1].coeffs - expect.coeffs
        ).l2_norm() / expect.l2_norm()
        ratios.append({"lambda": int(lam), "mismatch": mismatch,
                       "numerator": mismatch * expect.l2_norm(),
                       "denominator": expect.l2_norm()})
        runs.append(_run_summary(rec_l))
        if mismatch > cfg.scaling_tol:
            passed = False
    notes.append(
        "integer frequency rescaling on the fixed torus makes the symmetry "
        "exact up to time-integration error"
    )
    trend = {"tolerance": cfg.scaling_tol}
    return ScenarioReport(cfg.kind, passed, ratios, trend, runs, notes,
                          cfg.describe())


def _threshold_probe(cfg: ScenarioConfig) -> ScenarioReport:
    threshold = 1.5 - cfg.alpha
    ratios, runs, notes = [], [], []
    grid = TorusGrid(cfg.n_points)
    for s in (threshold - 0.2, threshold + 0.2):
        for center in cfg.packet_freqs:
            u0 = packet_datum(grid, center, s, cfg.amplitude)
            dt = _common_dt(cfg, [u0])
            try:
                solver_cfg = SolverConfig(
                    _spec(cfg), grid, dt=dt, horizon=cfg.horizon,
                    record_every=cfg.record_every, sobolev_s=(s,),
                )
                rec = solve(u0, solver_cfg)
            except BlowUpError as exc:
                notes.append(f"s={s:.3g}, packet {center}: {exc}")
                ratios.append({"s": s, "packet": center, "blowup": True})
                continue
            series = rec.sobolev[s]
            growth = float(np.log(series[-1] / series[0]) / rec.times[-1])
            ratios.append({
                "s": s,
                "packet": center,
                "growth_exponent": growth,
                "numerator": float(series[-1]),
                "denominator": float(series[0]),
                "max_over_initial": float(np.max(series) / series[0]),
            })
            runs.append(_run_summary(rec))
    notes.append("exploratory probe: the estimates assert nothing below the "
                 "threshold, so no verdict is emitted")
    return ScenarioReport(cfg.kind, None, ratios, {}, runs, notes,
                          cfg.describe())
