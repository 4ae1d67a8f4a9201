import logging
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
import scipy.fft

pylogger = logging.getLogger(__name__)

EVM_FLOOR_DB = -300.0


def _frozen_array(values, dtype=None) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DtSignal:
    """One period of an N-periodic complex sequence sampled at the symbol rate."""

    samples: np.ndarray
    symbol_rate: float = 1.0

    def __post_init__(self):
        samples = np.atleast_1d(np.asarray(self.samples))
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError(f"DtSignal needs a non-empty 1-D sequence, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("DtSignal samples must be finite")
        object.__setattr__(self, "samples", _frozen_array(samples, dtype=np.complex128))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def i(self) -> np.ndarray:
        return self.samples.real

    @property
    def q(self) -> np.ndarray:
        return self.samples.imag

    def with_samples(self, samples) -> "DtSignal":
        return replace(self, samples=samples)

    def roll(self, shift: int) -> "DtSignal":
        return self.with_samples(np.roll(self.samples, shift))


@dataclass(frozen=True, eq=False)
class CtSignal:
    """Continuous-time signal on an L-times oversampled periodic grid.

    Real signals (passband) keep a float dtype, complex envelopes keep a complex dtype.
    """

    samples: np.ndarray
    sample_rate: float
    oversample_factor: int
    n_symbols: int

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise ValueError(f"CtSignal needs a 1-D sequence, got shape {samples.shape}")
        if self.oversample_factor < 1 or self.n_symbols < 1:
            raise ValueError(
                f"Invalid grid: oversample_factor={self.oversample_factor}, n_symbols={self.n_symbols}"
            )
        if samples.size != self.oversample_factor * self.n_symbols:
            raise ValueError(
                f"CtSignal has {samples.size} samples, expected L * n_symbols = "
                f"{self.oversample_factor * self.n_symbols}"
            )
        dtype = np.complex128 if np.iscomplexobj(samples) else np.float64
        object.__setattr__(self, "samples", _frozen_array(samples, dtype=dtype))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def symbol_rate(self) -> float:
        return self.sample_rate / self.oversample_factor

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    def with_samples(self, samples) -> "CtSignal":
        return replace(self, samples=samples)


@dataclass(frozen=True, eq=False)
class FreqResponse:
    """Frequency response sampled on the DFT bin grid (natural FFT order)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values))
        if values.ndim != 1 or values.size < 1:
            raise ValueError(f"FreqResponse needs a non-empty 1-D sequence, got shape {values.shape}")
        object.__setattr__(self, "values", _frozen_array(values, dtype=np.complex128))

    @property
    def grid_length(self) -> int:
        return self.values.size

    @property
    def is_hermitian(self) -> bool:
        """True when H[k] == conj(H[-k]) exactly, so real inputs stay real."""
        mirrored = np.conj(np.roll(self.values[::-1], 1))
        return bool(np.array_equal(self.values, mirrored))

    def __mul__(self, other: "FreqResponse") -> "FreqResponse":
        if not isinstance(other, FreqResponse):
            return NotImplemented
        _check_lengths(self.grid_length, other.grid_length)
        return FreqResponse(self.values * other.values)

    @classmethod
    def ones(cls, n: int) -> "FreqResponse":
        return cls(np.ones(n, dtype=np.complex128))


Signal = Union[DtSignal, CtSignal]


def _check_lengths(expected: int, got: int) -> None:
    if expected != got:
        raise ValueError(f"Grid length mismatch: {expected} != {got}")


def _samples_of(s: Union[Signal, np.ndarray]) -> np.ndarray:
    if isinstance(s, (DtSignal, CtSignal)):
        return s.samples
    return np.asarray(s)


def centered_bins(n: int) -> np.ndarray:
    """Integer bin representatives in [-n/2, n/2), in natural FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def dft(s: Union[Signal, np.ndarray]) -> FreqResponse:
    """Forward DFT without normalisation."""
    samples = _samples_of(s)
    if samples.size < 1:
        raise ValueError("Cannot transform an empty signal")
    return FreqResponse(scipy.fft.fft(samples))


def idft(spectrum: Union[FreqResponse, np.ndarray]) -> np.ndarray:
    """Inverse DFT carrying the 1/N factor."""
    values = spectrum.values if isinstance(spectrum, FreqResponse) else np.asarray(spectrum)
    return scipy.fft.ifft(values)


def apply_freq_response(s: Signal, H: FreqResponse, real: Optional[bool] = None) -> Signal:
    """Circular filtering: the output spectrum is H times the input spectrum, bin by bin.

    Args:
        s: signal to filter
        H: response on the grid of `s`
        real: force a real (True) or complex (False) output; by default the output is real
            exactly when `s` is real and `H` is Hermitian-symmetric

    Returns:
        a signal of the same type and grid as `s`
    """
    samples = _samples_of(s)
    _check_lengths(samples.size, H.grid_length)

    if real is None:
        real = not np.iscomplexobj(samples) and H.is_hermitian

    filtered = idft(scipy.fft.fft(samples) * H.values)
    if real:
        filtered = filtered.real

    return s.with_samples(filtered)


def evm_db(reference: Union[DtSignal, np.ndarray], actual: Union[DtSignal, np.ndarray]) -> float:
    """Error vector magnitude in dB, floored at -300 dB for an exact match."""
    reference = _samples_of(reference)
    actual = _samples_of(actual)
    _check_lengths(reference.size, actual.size)

    reference_norm = np.linalg.norm(reference)
    if reference_norm == 0:
        raise ValueError("EVM is undefined for an all-zero reference")

    error_norm = np.linalg.norm(actual - reference)
    if error_norm == 0:
        return EVM_FLOOR_DB

    return max(float(20 * np.log10(error_norm / reference_norm)), EVM_FLOOR_DB)


def relative_error(reference: Union[Signal, np.ndarray], actual: Union[Signal, np.ndarray]) -> float:
    reference = _samples_of(reference)
    actual = _samples_of(actual)
    _check_lengths(reference.size, actual.size)
    return float(np.linalg.norm(actual - reference) / np.linalg.norm(reference))
