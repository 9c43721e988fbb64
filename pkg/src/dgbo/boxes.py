"""Discrete modulation-frequency boxes and convolution-estimate experiments.

A box function lives on the lattice (tau, xi) in (dtau*Z) x Z and is
supported where tau - omega(xi) lies in supp eta_l and xi in supp chi_k,
i.e. within distance ~2^l of the dispersive surface in a dyadic frequency
shell.  Convolutions at the origin of such functions are the quantities the
trilinear and quadrilinear estimates control; this module computes them by
direct summation (dtau-weighted in tau, counting measure in xi) and compares
against the stated majorants.

The continuous tau variable is replaced by a fixed lattice, so absolute
constants depend on dtau; every report records the discretization so the
ratios stay comparable across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.signal import fftconvolve

from .dispersion import DispersionSpec
from .errors import ConfigurationError, DomainError, ResourceError
from .littlewood_paley import eta_support
from .resonance import shell
from .spectral import SpectralField


@dataclass(frozen=True)
class BoxLab:
    """Capacity of the discrete (tau, xi) grid.

    The tau window covers supp eta_l for the largest modulation scale in the
    scan; boxes whose dispersive surface exits the window are truncated, and
    a box with no lattice point at all is a capacity error.
    """

    dispersion: DispersionSpec
    dtau: float = 0.25
    l_max: int = 12
    k_max: int = 10

    def __post_init__(self):
        if self.dtau <= 0:
            raise ConfigurationError("dtau must be positive")
        if self.l_max < 0 or self.k_max < 0:
            raise ConfigurationError("capacity indices must be >= 0")

    @property
    def tau_window(self) -> float:
        return eta_support(self.l_max)[1]

    @property
    def max_index(self) -> int:
        return int(np.ceil(self.tau_window / self.dtau))

    def discretization(self) -> dict:
        return {
            "dtau": self.dtau,
            "tau_window": self.tau_window,
            "l_max": self.l_max,
            "k_max": self.k_max,
            "note": "lattice surrogate of continuous tau; constants depend on dtau",
        }


def _box_geometry(lab: BoxLab, l: int, k: int):
    """Frequencies, per-frequency start indices and row length of D_{l,k}."""
    xis = shell(k)
    hi = eta_support(l)[1]
    om = lab.dispersion.omega_fn(xis.astype(np.float64))
    starts = np.ceil((om - hi) / lab.dtau).astype(np.int64)
    length = int(np.floor(2.0 * hi / lab.dtau)) + 1
    return xis, starts, length


def _box_mask(lab: BoxLab, l: int, k: int, xis, starts, length) -> np.ndarray:
    lo, hi = eta_support(l)
    om = lab.dispersion.omega_fn(xis.astype(np.float64))
    idx = starts[:, None] + np.arange(length)[None, :]
    tau = idx * lab.dtau
    mu = np.abs(tau - om[:, None])
    mask = (mu < hi) & (np.abs(idx) <= lab.max_index)
    if l > 0:
        mask &= mu > lo
    return mask


@dataclass(frozen=True)
class BoxFunction:
    """Nonnegative values on one discrete box D_{l,k}.

    ``values[i, j]`` sits at frequency ``xis[i]`` and lattice index
    ``starts[i] + j`` (tau = index * dtau).  A leading batch axis is allowed
    (values of shape (n_batch, n_xi, length)) for seeded sweeps; batched
    samples are unit-normalized individually.
    """

    lab: BoxLab
    l: int
    k: int
    xis: np.ndarray = dc_field(repr=False)
    starts: np.ndarray = dc_field(repr=False)
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        for arr in (self.xis, self.starts, self.values):
            arr.flags.writeable = False
        if self.values.ndim not in (2, 3) or self.values.shape[-2] != self.xis.shape[0]:
            raise ConfigurationError("value rows must match the frequency shell")
        if np.any(self.values < 0):
            raise ConfigurationError("box functions are nonnegative")

    @property
    def l2_norm(self) -> float:
        v = self.values if self.values.ndim == 2 else self.values[0]
        return float(np.sqrt(np.sum(v**2) * self.lab.dtau))

    def scaled(self, factor: float) -> "BoxFunction":
        if factor < 0:
            raise ConfigurationError("scaling factor must be nonnegative")
        return BoxFunction(
            self.lab, self.l, self.k, self.xis, self.starts, self.values * factor
        )

    def support_mask(self) -> np.ndarray:
        return _box_mask(
            self.lab, self.l, self.k, self.xis, self.starts, self.values.shape[-1]
        )

    def support_contained(self) -> bool:
        off_box = self.values * ~self.support_mask()
        return bool(np.all(off_box == 0.0))


def sample_box_function(lab: BoxLab, l: int, k: int, seed: int) -> BoxFunction:
    """Deterministic pseudo-random unit-norm function supported in D_{l,k}."""
    return _sampled_boxes(lab, l, k, [seed], batched=False)


def batched_box_functions(lab: BoxLab, l: int, k: int, seeds) -> BoxFunction:
    """Several seeded samples sharing geometry, stacked on a batch axis."""
    return _sampled_boxes(lab, l, k, list(seeds), batched=True)


def _sampled_boxes(lab, l, k, seeds, batched):
    if l > lab.l_max or k > lab.k_max:
        raise ResourceError(
            f"box (l={l}, k={k}) exceeds lab capacity "
            f"(l_max={lab.l_max}, k_max={lab.k_max})"
        )
    xis, starts, length = _box_geometry(lab, l, k)
    mask = _box_mask(lab, l, k, xis, starts, length)
    if not mask.any():
        raise ResourceError(
            f"box (l={l}, k={k}) has no lattice point inside the tau window"
        )
    vals = np.empty((len(seeds), xis.shape[0], length))
    for i, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        v = rng.random((xis.shape[0], length))
        v[~mask] = 0.0
        vals[i] = v / np.sqrt(np.sum(v**2) * lab.dtau)
    if not batched:
        return BoxFunction(lab, l, k, xis, starts, vals[0])
    return BoxFunction(lab, l, k, xis, starts, vals)


def point_mass_box(lab: BoxLab, l: int, k: int, xi: int, tau_index: int,
                   amplitude: float = 1.0) -> BoxFunction:
    """Single lattice-point mass, for hand-checkable convolution values."""
    xis, starts, length = _box_geometry(lab, l, k)
    mask = _box_mask(lab, l, k, xis, starts, length)
    rows = np.nonzero(xis == xi)[0]
    if rows.size == 0:
        raise DomainError(f"frequency {xi} is not in the shell of chi_{k}")
    i = int(rows[0])
    j = int(tau_index - starts[i])
    if not (0 <= j < length) or not mask[i, j]:
        raise DomainError("requested lattice point lies outside the box")
    values = np.zeros((xis.shape[0], length))
    values[i, j] = amplitude
    return BoxFunction(lab, l, k, xis, starts, values)


def box_feasible(lab: BoxLab, l: int, k: int) -> bool:
    if l > lab.l_max or k > lab.k_max:
        return False
    xis, starts, length = _box_geometry(lab, l, k)
    return bool(_box_mask(lab, l, k, xis, starts, length).any())


# ---------------------------------------------------------------------------
# convolution at the origin


def majorant_factor(ls, ks, variant: str, alpha: float | None = None) -> float:
    """Stated majorant for unit-norm inputs; multiply by the norm product."""
    n = len(ls)
    lss = sorted(ls, reverse=True)
    kss = sorted(ks, reverse=True)
    if variant == "generic":
        if n == 3:
            return 2.0 ** (lss[2] / 2.0 + kss[2] / 2.0)
        return 2.0 ** ((lss[2] + lss[3]) / 2.0 + (kss[2] + kss[3]) / 2.0)
    if variant == "improved":
        if alpha is None:
            raise ConfigurationError("improved variant needs alpha")
        prefactor = float(np.sqrt(1.0 + 2.0 ** (lss[2] - alpha * kss[0])))
        if n == 3:
            return prefactor * 2.0 ** (lss[0] / 2.0)
        return prefactor * 2.0 ** ((lss[0] + lss[1]) / 2.0 + kss[3] / 2.0)
    raise ConfigurationError(f"unknown bound variant '{variant}'")


def majorant(fs: list[BoxFunction], variant: str = "generic") -> float:
    norms = float(np.prod([f.l2_norm for f in fs]))
    return majorant_factor(
        [f.l for f in fs], [f.k for f in fs], variant, fs[0].lab.dispersion.alpha
    ) * norms


def _as_batched(f: BoxFunction) -> np.ndarray:
    v = f.values
    return v if v.ndim == 3 else v[None, ...]


def _xi_row_lookup(f: BoxFunction):
    off = int(np.abs(f.xis).max())
    table = np.full(2 * off + 1, -1, dtype=np.int64)
    table[f.xis + off] = np.arange(f.xis.shape[0])
    return table, off


def convolution_at_origin(fs: list[BoxFunction], cell_budget: int = 2 * 10**7):
    """(f_1 * ... * f_n)(0, 0) by direct summation over the zero-sum lattice.

    The frequency sum runs over zero-sum tuples drawn from the shells; the
    tau sum is a chain of linear convolutions of the per-frequency rows,
    evaluated where the lattice indices cancel.  Work proceeds in chunks of
    frequency tuples sized so that batch * chunk * row-length stays below
    ``cell_budget`` cells.

    Returns a scalar for plain boxes, a batch vector for batched ones.
    """
    n = len(fs)
    if n not in (3, 4):
        raise ConfigurationError("convolution takes 3 or 4 box functions")
    lab = fs[0].lab
    for f in fs[1:]:
        if f.lab != lab:
            raise ConfigurationError("box functions from different labs")
    batched = any(f.values.ndim == 3 for f in fs)
    batch = max(_as_batched(f).shape[0] for f in fs)
    for f in fs:
        b = _as_batched(f).shape[0]
        if b not in (1, batch):
            raise ConfigurationError("batch sizes must match")

    order = np.argsort([f.xis.shape[0] for f in fs])
    free = [int(i) for i in order[: n - 1]]
    derived = int(order[n - 1])
    lookup, off = _xi_row_lookup(fs[derived])

    free_rows = np.meshgrid(
        *[np.arange(fs[i].xis.shape[0]) for i in free], indexing="ij"
    )
    free_rows = [g.ravel() for g in free_rows]
    xi_sum = sum(fs[i].xis[r] for i, r in zip(free, free_rows))
    xi_d = -xi_sum
    inside = np.abs(xi_d) <= off
    rows_d = np.full(xi_d.shape, -1, dtype=np.int64)
    rows_d[inside] = lookup[xi_d[inside] + off]
    valid = rows_d >= 0

    vals = [_as_batched(fs[i]) for i in range(n)]
    lengths = [v.shape[-1] for v in vals]
    conv_len = sum(lengths[i] for i in free) - (n - 2)

    # exact pruning: the tau sums cancel only if the combined index offset
    # lands inside the convolution support (this encodes the resonance gap)
    start_sum = sum(fs[i].starts[r] for i, r in zip(free, free_rows))
    start_sum = start_sum + np.where(valid, fs[derived].starts[np.maximum(rows_d, 0)], 0)
    r_all = -start_sum
    valid &= (r_all >= 0) & (r_all <= conv_len + lengths[derived] - 2)

    free_rows = [r[valid] for r in free_rows]
    rows_d = rows_d[valid]
    n_combos = rows_d.shape[0]
    if n_combos == 0:
        result = np.zeros(batch)
        return result if batched else 0.0

    cells = batch * (conv_len + lengths[derived])
    chunk = max(1, int(cell_budget // max(cells, 1)))

    total = np.zeros(batch)
    dvals_rev = vals[derived][..., ::-1]
    ld = lengths[derived]
    for lo in range(0, n_combos, chunk):
        sel = slice(lo, min(lo + chunk, n_combos))
        rows = [r[sel] for r in free_rows]
        rd = rows_d[sel]
        c = vals[free[0]][:, rows[0], :]
        start_c = fs[free[0]].starts[rows[0]]
        for i, r in zip(free[1:], rows[1:]):
            c = fftconvolve(c, vals[i][:, r, :], axes=-1)
            start_c = start_c + fs[i].starts[r]
        lc = c.shape[-1]
        r_tot = -(start_c + fs[derived].starts[rd])
        # pair c[p] with d[q] over p + q = r_tot: p_j = r_tot - (ld-1) + j
        j = np.arange(ld)
        p = r_tot[:, None] - (ld - 1) + j[None, :]
        ok = (p >= 0) & (p < lc)
        p_clip = np.clip(p, 0, lc - 1)
        m = rd.shape[0]
        gathered = c[:, np.arange(m)[:, None], p_clip]
        dseg = dvals_rev[:, rd, :]
        total += np.einsum("bmj,bmj,mj->b", gathered, dseg, ok.astype(np.float64))
    total *= lab.dtau ** (n - 1)
    return total if batched else float(total[0])


@dataclass
class ConvolutionReport:
    """Convolution value against its majorant for one tuple of boxes."""

    ls: list[int]
    ks: list[int]
    value: float
    majorant: float
    ratio: float
    variant: str
    norms: list[float]
    discretization: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def multi_convolution_at_origin(
    fs: list[BoxFunction], bound_variant: str = "generic"
) -> ConvolutionReport:
    value = float(convolution_at_origin(fs))
    maj = majorant(fs, bound_variant)
    return ConvolutionReport(
        ls=[f.l for f in fs],
        ks=[f.k for f in fs],
        value=value,
        majorant=maj,
        ratio=value / maj,
        variant=bound_variant,
        norms=[f.l2_norm for f in fs],
        discretization=fs[0].lab.discretization(),
    )


# ---------------------------------------------------------------------------
# seeded sweeps across dyadic configurations


@dataclass
class SweepReport:
    """Max convolution/majorant ratio per scale index plus its trend."""

    variant: str
    n_samples: int
    seed: int
    scales: list[int]
    max_ratios: list[float]
    trend_slope: float | None
    configs: list[dict]
    discretization: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def convolution_sweep(
    lab: BoxLab,
    configs: list[tuple[int, tuple[int, ...], tuple[int, ...]]],
    n_samples: int = 200,
    bound_variant: str = "generic",
    seed: int = 0,
    n_threads: int = 1,
) -> SweepReport:
    """Seeded random boxes for each (scale, ls, ks) configuration.

    For every configuration, ``n_samples`` independent tuples are drawn and
    the max ratio of the convolution to the majorant recorded; the trend
    slope is the least-squares slope of log2(max ratio) against the scale
    index.  No growth (slope below a small threshold) is the verifiable
    content of the estimates, since their implicit constants are unspecified.
    Configurations are independent, so they may be mapped over ``n_threads``.
    """

    def one_config(idx_cfg):
        idx, (scale, ls, ks) = idx_cfg
        boxes = [
            batched_box_functions(
                lab, l, k,
                [seed + 7919 * idx + 104729 * j + 13 * s for s in range(n_samples)],
            )
            for j, (l, k) in enumerate(zip(ls, ks))
        ]
        values = np.asarray(convolution_at_origin(boxes), dtype=np.float64)
        factor = majorant_factor(list(ls), list(ks), bound_variant,
                                 lab.dispersion.alpha)
        mx = float((values / factor).max())  # batched samples are unit-norm
        return scale, {"scale": scale, "ls": list(ls), "ks": list(ks),
                       "max_ratio": mx}

    if n_threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(one_config, enumerate(configs)))
    else:
        results = [one_config(ic) for ic in enumerate(configs)]

    per_scale: dict[int, float] = {}
    cfg_rows = []
    for scale, row in results:
        per_scale[scale] = max(per_scale.get(scale, 0.0), row["max_ratio"])
        cfg_rows.append(row)
    scales = sorted(per_scale)
    maxima = [per_scale[s] for s in scales]
    slope = None
    finite = [(s, m) for s, m in zip(scales, maxima) if m > 0]
    if len(finite) >= 2:
        xs = np.array([s for s, _ in finite], dtype=float)
        ys = np.log2([m for _, m in finite])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return SweepReport(
        variant=bound_variant,
        n_samples=n_samples,
        seed=seed,
        scales=scales,
        max_ratios=maxima,
        trend_slope=slope,
        configs=cfg_rows,
        discretization=lab.discretization(),
    )


def modulation_sweep_configs(lab: BoxLab, n_inputs: int = 3,
                             base_k: tuple[int, ...] | None = None) -> list:
    """All-equal modulation scales l = 0..l_max at small fixed frequency shells."""
    if base_k is None:
        base_k = (1, 1, 0, 0)[:n_inputs]
    configs = []
    for l in range(0, lab.l_max + 1):
        if all(box_feasible(lab, l, k) for k in base_k):
            configs.append((l, (l,) * n_inputs, tuple(base_k)))
    return configs


def minimal_interacting_l(lab: BoxLab, ks: tuple[int, ...]) -> int | None:
    """Smallest common modulation scale at which boxes on the given shells can
    produce a nonzero zero-sum convolution.

    The tau variables can cancel only if the summed distance to the
    dispersive surface reaches the resonance of the frequency tuple, so the
    scale must satisfy n * sup(supp eta_l) >= min |Omega| over admissible
    tuples.  Returns None if that exceeds the lab capacity.
    """
    n = len(ks)
    shells = [shell(k) for k in ks]
    grids = np.meshgrid(*shells[: n - 1], indexing="ij")
    last = -sum(g for g in grids)
    lo, hi = (0.0, 8.0 / 5.0) if ks[-1] == 0 else (
        5.0 * 2.0 ** ks[-1] / 8.0, 8.0 * 2.0 ** ks[-1] / 5.0
    )
    mask = (np.abs(last) > lo if ks[-1] > 0 else np.abs(last) >= 1)
    mask &= np.abs(last) < hi
    if not mask.any():
        return None
    om = lab.dispersion.omega_fn
    total = sum(om(g.astype(np.float64)) for g in grids) + om(last.astype(np.float64))
    min_res = float(np.abs(total[mask]).min())
    for l in range(0, lab.l_max + 1):
        if n * eta_support(l)[1] >= min_res and all(
            box_feasible(lab, l, k) for k in ks
        ):
            return l
    return None


def frequency_sweep_configs(lab: BoxLab, n_inputs: int = 3,
                            k_top: int | None = None) -> list:
    """Frequency shells k = 0..k_top with one low slot, at the smallest
    modulation scale where the resonance allows interaction."""
    configs = []
    top = lab.k_max if k_top is None else k_top
    for k in range(0, top + 1):
        ks = (k,) * (n_inputs - 1) + (max(k - 3, 0),)
        l = minimal_interacting_l(lab, ks)
        if l is not None:
            configs.append((k, (l,) * n_inputs, ks))
    return configs


# ---------------------------------------------------------------------------
# the quadrilinear time-integrated functional


def s_phi(
    times: np.ndarray,
    fields: list[SpectralField],
    phi,
    T: float,
    band_limit: int | None = None,
) -> complex:
    """Time integral over [0, T] of the zero-sum quadrilinear coefficient sum

        sum_{xi1+xi2+xi3+xi4=0, xi_i != 0} phi(xi) u^(xi1) u^(xi2) u^(xi3) u^(xi4)

    evaluated on a recorded trajectory (trapezoidal in time, exact in xi over
    the resolved band).  ``phi`` is a callable of four integer arrays.
    """
    times = np.asarray(times, dtype=np.float64)
    if len(fields) != times.shape[0]:
        raise ConfigurationError("one field per recorded time required")
    if times.shape[0] < 2 or np.any(np.diff(times) <= 0):
        raise ConfigurationError("times must be strictly increasing, length >= 2")
    if T > times[-1] + 1e-12 or T <= times[0]:
        raise DomainError(f"horizon T={T} not covered by the trajectory")
    grid = fields[0].grid
    band = grid.dealias_cutoff if band_limit is None else int(band_limit)
    if (2 * band + 1) ** 3 > 2 * 10**7:
        raise ResourceError("band too large for the dense quadrilinear sum")

    xi = np.arange(-band, band + 1)
    x1 = xi[:, None, None]
    x2 = xi[None, :, None]
    x3 = xi[None, None, :]
    x4 = -(x1 + x2 + x3)
    valid = (np.abs(x4) <= band) & (x1 != 0) & (x2 != 0) & (x3 != 0) & (x4 != 0)
    weight = np.asarray(
        phi(
            np.broadcast_to(x1, valid.shape),
            np.broadcast_to(x2, valid.shape),
            np.broadcast_to(x3, valid.shape),
            x4,
        ),
        dtype=np.complex128,
    )
    weight = np.where(valid, weight, 0.0)
    idx4 = np.clip(x4 + band, 0, 2 * band)

    def quad_sum(field: SpectralField) -> complex:
        full = field.coeffs
        n = grid.n_points
        u = np.concatenate([full[n - band:], full[: band + 1]])  # -band..band
        outer = u[:, None, None] * u[None, :, None] * u[None, None, :]
        return complex(np.sum(weight * outer * u[idx4]))

    q = np.array([quad_sum(f) for f in fields], dtype=np.complex128)
    j = int(np.searchsorted(times, T, side="right") - 1)
    value = np.trapezoid(q[: j + 1], times[: j + 1]) if j >= 1 else 0.0
    if T > times[j] + 1e-15 and j + 1 < times.shape[0]:
        frac = (T - times[j]) / (times[j + 1] - times[j])
        q_t = q[j] + frac * (q[j + 1] - q[j])
        value = value + 0.5 * (q[j] + q_t) * (T - times[j])
    return complex(value)
