"""Fourier calculus on the 2*pi-periodic torus.

Conventions: the forward transform carries the quadrature weight 2*pi/N so
that a coefficient u_hat(xi) approximates the integral of u(x)*exp(-i*x*xi)
over the torus.  Consequently the inversion reads

    u(x_j) = (1/(2*pi)) * sum_xi u_hat(xi) * exp(i*x_j*xi)

and Parseval takes the form  int |u|^2 dx = (1/(2*pi)) * sum_xi |u_hat(xi)|^2.
Coefficients are stored in FFT order for frequencies in [-N/2, N/2); the
Nyquist mode xi = -N/2 has no Hermitian partner and is always forced to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericError

TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Uniform collocation grid on the torus R/(2*pi*Z).

    ``dealias_cutoff`` implements the 2/3 rule: quadratic products are exact
    on the retained band because N is a power of two (never divisible by 3),
    so aliased images of frequencies up to 2*cutoff land strictly outside
    [-cutoff, cutoff].
    """

    n_points: int

    def __post_init__(self):
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise ConfigurationError(
                f"n_points must be a power of two >= 8, got {self.n_points}"
            )

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def dealias_cutoff(self) -> int:
        return self.n_points // 3

    def nodes(self) -> np.ndarray:
        """Collocation points x_j = 2*pi*j/N."""
        return TWO_PI * np.arange(self.n_points) / self.n_points

    def frequencies(self) -> np.ndarray:
        """Integer frequencies in FFT order: 0, 1, ..., N/2-1, -N/2, ..., -1."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(np.int64)

    def nyquist_index(self) -> int:
        return self.n_points // 2


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a scalar field on a :class:`TorusGrid`.

    The coefficient array is frozen after construction; all operations return
    new fields, so values are safe to share across threads.
    """

    grid: TorusGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"coefficient array must have length {self.grid.n_points}, "
                f"got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs.view(np.float64))):
            raise NumericError("non-finite spectral coefficient")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def coeff(self, xi: int) -> complex:
        """Coefficient at integer frequency xi in [-N/2, N/2)."""
        n = self.grid.n_points
        if not -n // 2 <= xi < n // 2:
            raise ConfigurationError(f"frequency {xi} outside resolvable band")
        return complex(self.coeffs[xi % n])

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    @property
    def mean(self) -> float:
        """The conserved zero mode u_hat(0) = int u dx."""
        return float(self.coeffs[0].real)

    def l2_norm(self) -> float:
        """L^2(T) norm via Parseval."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) / TWO_PI))

    def hermitian_defect(self) -> float:
        """Max |u_hat(-xi) - conj(u_hat(xi))|; zero for a real-valued field."""
        c = self.coeffs
        mirrored = np.conj(np.concatenate(([c[0]], c[:0:-1])))
        return float(np.max(np.abs(c - mirrored)))

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return self.hermitian_defect() <= tol


def zero_field(grid: TorusGrid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_points, dtype=np.complex128))


def to_spectral(grid: TorusGrid, samples: np.ndarray) -> SpectralField:
    """Transform real samples at the grid nodes to Fourier coefficients.

    Exact (up to rounding) for band-limited input; the roundtrip with
    :func:`from_spectral` then reconstructs the samples to ~1e-15.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.n_points,):
        raise ConfigurationError(
            f"expected {grid.n_points} samples, got shape {samples.shape}"
        )
    coeffs = np.fft.fft(samples) * (TWO_PI / grid.n_points)
    coeffs[grid.nyquist_index()] = 0.0
    return SpectralField(grid, coeffs)


def from_spectral(field: SpectralField) -> np.ndarray:
    """Reconstruct the real samples at the grid nodes."""
    n = field.grid.n_points
    return np.fft.ifft(field.coeffs).real * (n / TWO_PI)


def apply_multiplier(field: SpectralField, symbol) -> SpectralField:
    """Apply a Fourier multiplier, given as a callable xi -> value or an array.

    Array input must be in FFT order.  A symbol with sym(-xi) = conj(sym(xi))
    preserves Hermitian symmetry and hence reality of the field.
    """
    xi = field.grid.frequencies()
    if callable(symbol):
        try:
            values = np.asarray(symbol(xi), dtype=np.complex128)
            if values.shape != xi.shape:
                raise TypeError
        except (TypeError, ValueError):
            values = np.array([symbol(int(x)) for x in xi], dtype=np.complex128)
    else:
        values = np.asarray(symbol, dtype=np.complex128)
    if values.shape != field.coeffs.shape:
        raise ConfigurationError("multiplier array length does not match grid")
    if not np.all(np.isfinite(values.view(np.float64))):
        raise NumericError("non-finite multiplier symbol value")
    return SpectralField(field.grid, field.coeffs * values)


def derivative(field: SpectralField) -> SpectralField:
    """d/dx as the multiplier i*xi."""
    return apply_multiplier(field, lambda xi: 1j * xi.astype(np.float64))


def fractional_derivative(field: SpectralField, beta: float) -> SpectralField:
    """|D|^beta as the multiplier |xi|^beta, beta >= 0."""
    if beta < 0:
        raise ConfigurationError("fractional_derivative requires beta >= 0")
    return apply_multiplier(field, lambda xi: np.abs(xi).astype(np.float64) ** beta)


def product_dealiased(f: SpectralField, g: SpectralField) -> SpectralField:
    """Spectral coefficients of the pointwise product f*g, 2/3-rule dealiased.

    Output frequencies with |xi| > dealias_cutoff are zeroed.  On the retained
    band the result is the exact convolution (1/(2*pi)) * (f_hat * g_hat)
    whenever both inputs are supported in the retained band.
    """
    if f.grid != g.grid:
        raise ConfigurationError("product of fields on different grids")
    n = f.grid.n_points
    fx = np.fft.ifft(f.coeffs) * (n / TWO_PI)
    gx = np.fft.ifft(g.coeffs) * (n / TWO_PI)
    coeffs = np.fft.fft(fx * gx) * (TWO_PI / n)
    xi = f.grid.frequencies()
    coeffs[np.abs(xi) > f.grid.dealias_cutoff] = 0.0
    coeffs[f.grid.nyquist_index()] = 0.0
    return SpectralField(f.grid, coeffs)


def reflect(field: SpectralField) -> SpectralField:
    """Spatial reflection u(x) -> u(-x): coefficients u_hat(xi) -> u_hat(-xi)."""
    c = field.coeffs
    mirrored = np.concatenate(([c[0]], c[:0:-1]))
    return SpectralField(field.grid, mirrored)


def truncate(field: SpectralField, cutoff: int) -> SpectralField:
    """Zero all coefficients with |xi| > cutoff."""
    coeffs = field.coeffs.copy()
    coeffs[np.abs(field.grid.frequencies()) > cutoff] = 0.0
    return SpectralField(field.grid, coeffs)


def resample(field: SpectralField, grid: TorusGrid) -> SpectralField:
    """Re-embed a field on a finer or coarser grid (coefficients preserved
    where both bands overlap, truncated otherwise)."""
    out = np.zeros(grid.n_points, dtype=np.complex128)
    half = min(field.grid.n_points, grid.n_points) // 2
    src = field.coeffs
    out[:half] = src[:half]
    out[-half + 1:] = src[-half + 1:]
    out[grid.nyquist_index() % grid.n_points] = 0.0
    return SpectralField(grid, out)


def quadrature(samples: np.ndarray) -> float:
    """Trapezoidal (here: exact periodic) quadrature of samples over the torus."""
    samples = np.asarray(samples)
    return float(np.sum(samples) * TWO_PI / samples.shape[0])


def integral_of_power(field: SpectralField, power: int) -> float:
    """int u^power dx, evaluated on a grid padded enough to be alias-free."""
    if power < 1:
        raise ConfigurationError("power must be a positive integer")
    n = field.grid.n_points
    half = n // 2
    m = 1 << (power * n - 1).bit_length()  # m >= power*n/2 modes resolved
    padded = np.zeros(m, dtype=np.complex128)
    padded[:half] = field.coeffs[:half]
    padded[-half + 1:] = field.coeffs[-half + 1:]
    ux = np.fft.ifft(padded).real * (m / TWO_PI)
    return quadrature(ux**power)
