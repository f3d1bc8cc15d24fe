"""
Spectral post-processing of torque and tooth-force series.

Conventions (stored on every spectrum as ``normalization``):

* 1-D, one-sided amplitude: A_0 is the mean, A_k = 2|X_k|/N for
  0 < k < N/2, the Nyquist bin is |X_{N/2}|/N (not doubled). Then
  mean(x^2) = A_0^2 + sum A_k^2/2 + A_nyq^2.
* 2-D, tooth index x time: f(k, i) = sum c(m, n) exp(i(m*theta_k - n*tau_i))
  with theta_k = 2*pi*k/N_s (phase referenced to tooth 0) and tau_i the
  electrical angle. A wave a*cos(m*theta - n*tau + phi) appears as
  c(m, n) = a/2*exp(i*phi) plus its conjugate partner; the reported pair
  amplitude is 2|c|, or |c| on self-conjugate bins.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .core import (
    ConventionMismatchError,
    InvalidArgumentError,
    ToothForceSeries,
    TorqueSeries,
)

ONE_SIDED = "one-sided amplitude; A0=mean, Ak=2|Xk|/N, Nyquist |X|/N"
SPACE_TIME = "space-time pairs; c(m,n)=X[m,-n]/(Ns*Nt), amplitude=2|c| (|c| if self-conjugate)"
TOOTH_AVERAGE = "tooth-averaged; " + SPACE_TIME
RATIO_FLOOR = 1e-12


# =============================================================================
# 1-D SPECTRA
# =============================================================================

@dataclass(frozen=True)
class Spectrum1D:
    """One-sided spectrum; ``orders[k] = k * order_step`` (mechanical orders for torque)."""
    coefficients: np.ndarray
    n_samples: int
    order_step: int = 1
    normalization: str = ONE_SIDED

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.coefficients.size) * self.order_step

    @property
    def amplitudes(self) -> np.ndarray:
        a = np.abs(self.coefficients)
        a[0] = self.coefficients[0].real
        return a

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.coefficients)

    @property
    def mean(self) -> float:
        return float(self.coefficients[0].real)

    def rows(self):
        """(m, n, amplitude, phase) rows; m is 0 for a 1-D spectrum."""
        amps, phases = self.amplitudes, self.phases
        return [(0, int(o), float(a), float(p)) for o, a, p in zip(self.orders, amps, phases)]


def _as_series(series) -> tuple[np.ndarray, int]:
    if isinstance(series, TorqueSeries):
        return series.torque, series.pole_pairs
    return np.asarray(series, dtype=float), 1


def spectrum_time(series: Union[TorqueSeries, np.ndarray], order_step: Optional[int] = None) -> Spectrum1D:
    """
    One-sided amplitude spectrum of a periodic series.

    A TorqueSeries spans one electrical period, so its bins are reported as
    mechanical orders (bin k -> order k*pole_pairs) unless ``order_step`` is given.
    """
    x, default_step = _as_series(series)
    if x.ndim != 1 or x.size < 4:
        raise InvalidArgumentError("need a 1-D series with at least 4 samples")
    n = x.size
    coeffs = np.fft.rfft(x) / n
    coeffs[1:] *= 2.0
    if n % 2 == 0:
        coeffs[-1] /= 2.0
    return Spectrum1D(coeffs, n, default_step if order_step is None else int(order_step))


def parseval_terms(spectrum: Spectrum1D) -> float:
    """A_0^2 + sum_k A_k^2/2 (+ A_nyq^2), equal to the series' mean square."""
    a = np.abs(spectrum.coefficients)
    total = a[0] ** 2
    if spectrum.n_samples % 2 == 0:
        return float(total + np.sum(a[1:-1] ** 2) / 2 + a[-1] ** 2)
    return float(total + np.sum(a[1:] ** 2) / 2)


def peak_to_peak(series) -> float:
    x, _ = _as_series(series)
    if x.size == 0:
        raise InvalidArgumentError("empty series")
    return float(x.max() - x.min())


@dataclass(frozen=True)
class RippleMetrics:
    mean: float
    peak_to_peak: float
    amplitudes: dict

    def __post_init__(self):
        if self.peak_to_peak < 0:
            raise InvalidArgumentError("peak-to-peak cannot be negative")


def ripple_metrics(series, orders=None) -> RippleMetrics:
    """Mean, peak-to-peak and per-order amplitudes (all orders when ``orders`` is None)."""
    spec = spectrum_time(series)
    amps = spec.amplitudes
    if orders is None:
        table = {int(o): float(a) for o, a in zip(spec.orders, amps)}
    else:
        table = {int(o): order_amplitude(spec, o) for o in orders}
    return RippleMetrics(spec.mean, peak_to_peak(series), table)


# =============================================================================
# 2-D SPECTRA
# =============================================================================

class SpectrumMode(str, Enum):
    SPACE_TIME = "space_time"
    TOOTH_AVERAGE = "tooth_average"


@dataclass(frozen=True)
class Spectrum2D:
    """
    Complex coefficients c(m, n) on the FFT grid, shape (spatial bins, temporal bins).

    ``spatial_orders`` are cycles per revolution (signed, aliased into
    [-N_s/2, N_s/2)); ``temporal_orders`` are cycles per electrical period.
    """
    coefficients: np.ndarray
    spatial_orders: np.ndarray
    temporal_orders: np.ndarray
    pole_count: int = 2
    normalization: str = SPACE_TIME

    @property
    def shape(self):
        return self.coefficients.shape

    @property
    def spatial_in_poles(self) -> np.ndarray:
        return self.spatial_orders / self.pole_count

    def _index(self, m: int, n: int) -> tuple[int, int]:
        ns, nt = self.shape
        if ns == 1:
            if m != 0:
                raise InvalidArgumentError(f"spatial order {m} out of range for a tooth-averaged spectrum")
        elif not -(ns // 2) <= m <= ns // 2:
            raise InvalidArgumentError(f"spatial order {m} outside +-{ns // 2}")
        if not -(nt // 2) <= n <= nt // 2:
            raise InvalidArgumentError(f"temporal order {n} outside +-{nt // 2}")
        # X[m, -n] is stored at temporal slot -n
        return m % ns, (-n) % nt

    def coefficient(self, m: int, n: int) -> complex:
        return complex(self.coefficients[self._index(m, n)])

    def is_self_conjugate(self, m: int, n: int) -> bool:
        ns, nt = self.shape
        return (m % ns, n % nt) == ((-m) % ns, (-n) % nt)

    def amplitude(self, m: int, n: int) -> float:
        c = abs(self.coefficient(m, n))
        return c if self.is_self_conjugate(m, n) else 2.0 * c

    def rows(self):
        """One row (m, n, amplitude, phase) per conjugate pair, sorted by (n, m)."""
        ns, nt = self.shape
        out = []
        for n in range(nt // 2 + 1):
            paired_column = n == 0 or 2 * n == nt  # -n aliases to n
            for mi in range(ns):
                m = mi if mi <= ns // 2 else mi - ns
                if paired_column and m < 0:
                    continue
                c = self.coefficient(m, n)
                amp = abs(c) if self.is_self_conjugate(m, n) else 2.0 * abs(c)
                out.append((m, n, float(amp), float(np.angle(c))))
        out.sort(key=lambda r: (r[1], r[0]))
        return out


def _space_time(matrix: np.ndarray, pole_count: int, normalization: str) -> Spectrum2D:
    ns, nt = matrix.shape
    coeffs = np.fft.fft2(matrix) / (ns * nt)
    m = np.fft.fftfreq(ns, 1.0 / ns).astype(int)
    # column j holds temporal order -j (wave convention exp(-i n tau))
    n = (-np.fft.fftfreq(nt, 1.0 / nt)).astype(int)
    return Spectrum2D(coeffs, m, n, pole_count, normalization)


def spectrum_space_time(forces: Union[ToothForceSeries, np.ndarray], component: str = "radial",
                        mode: str = "space_time", pole_count: int = 2) -> Spectrum2D:
    """
    2-D DFT over (tooth, time) of one force component.

    ``space_time`` treats the teeth as spatial sample points; ``tooth_average``
    first averages the component over teeth and keeps only m = 0.
    """
    mode = SpectrumMode(mode)
    matrix = forces.component(component) if isinstance(forces, ToothForceSeries) else np.asarray(forces, float)
    if matrix.ndim != 2:
        raise InvalidArgumentError("expected a (teeth, times) matrix")
    if mode is SpectrumMode.TOOTH_AVERAGE:
        return _space_time(matrix.mean(axis=0, keepdims=True), pole_count, TOOTH_AVERAGE)
    return _space_time(matrix, pole_count, SPACE_TIME)


def inverse_space_time(spectrum: Spectrum2D) -> np.ndarray:
    ns, nt = spectrum.shape
    return np.real(np.fft.ifft2(spectrum.coefficients * (ns * nt)))


# =============================================================================
# LOOKUPS AND RATIOS
# =============================================================================

def order_amplitude(spectrum, order) -> float:
    """Exact bin lookup: an integer order for 1-D spectra, (m, n) for 2-D ones."""
    if isinstance(spectrum, Spectrum2D):
        m, n = order
        return spectrum.amplitude(int(m), int(n))
    k, rem = divmod(int(order), spectrum.order_step)
    if rem or order < 0 or k >= spectrum.coefficients.size:
        raise InvalidArgumentError(
            f"order {order} is not a bin of this spectrum (step {spectrum.order_step}, "
            f"max {spectrum.orders[-1]})")
    return float(spectrum.amplitudes[k])


def _conventions(spectrum):
    if isinstance(spectrum, Spectrum2D):
        return ("2d", spectrum.normalization, spectrum.shape)
    return ("1d", spectrum.normalization, spectrum.n_samples, spectrum.order_step)


def suppression_ratio(skewed, reference, order) -> Optional[float]:
    """
    amplitude(skewed) / amplitude(reference) at ``order``.

    Returns None (not a ratio) when the reference amplitude is below 1e-12.
    """
    if _conventions(skewed) != _conventions(reference):
        raise ConventionMismatchError("spectra use different conventions or grids")
    ref = abs(order_amplitude(reference, order))
    if ref < RATIO_FLOOR:
        return None
    return abs(order_amplitude(skewed, order)) / ref


def ratio_table(skewed: Spectrum1D, reference: Spectrum1D, floor: float = RATIO_FLOOR) -> dict:
    """suppression_ratio for every order whose reference amplitude exceeds ``floor``."""
    out = {}
    for o in reference.orders[1:]:
        if abs(order_amplitude(reference, o)) >= floor:
            out[int(o)] = suppression_ratio(skewed, reference, o)
    return out
