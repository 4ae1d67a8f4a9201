import logging
from typing import Union

import numpy as np
import scipy.fft

from bbdpd.signals.core import DtSignal, centered_bins

pylogger = logging.getLogger(__name__)

QAM64_LEVELS = np.array([-7, -5, -3, -1, 1, 3, 5, 7], dtype=np.float64)
# mean of i^2 + q^2 over the 8x8 grid
QAM64_ENERGY = 42.0

Seed = Union[int, np.random.SeedSequence, np.random.Generator]


def qam64_source(n: int, seed: Seed, symbol_rate: float = 1.0) -> DtSignal:
    """i.i.d. uniform 64QAM symbols with unit average power."""
    if n < 1:
        raise ValueError(f"Need at least one symbol, got n={n}")
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, QAM64_LEVELS.size, size=(2, n))
    symbols = (QAM64_LEVELS[indices[0]] + 1j * QAM64_LEVELS[indices[1]]) / np.sqrt(QAM64_ENERGY)
    return DtSignal(symbols, symbol_rate=symbol_rate)


def gaussian_source(n: int, seed: Seed) -> DtSignal:
    """Circular complex Gaussian samples with unit average power."""
    rng = np.random.default_rng(seed)
    return DtSignal((rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2))


def oversampled_source(symbols: DtSignal, factor: int) -> DtSignal:
    """Zero insertion followed by an ideal low-pass keeping |Omega| < pi / factor.

    The output runs at factor times the symbol rate and keeps the symbol values at multiples of factor.
    """
    if factor < 1:
        raise ValueError(f"Oversampling factor must be >= 1, got {factor}")
    if factor == 1:
        return symbols

    n = len(symbols) * factor
    upsampled = np.zeros(n, dtype=np.complex128)
    upsampled[::factor] = symbols.samples

    k = centered_bins(n)
    mask = (2 * factor * k >= -n) & (2 * factor * k < n)
    filtered = scipy.fft.ifft(scipy.fft.fft(upsampled) * mask) * factor
    return DtSignal(filtered, symbol_rate=symbols.symbol_rate * factor)


def ofdm_modulate(u: DtSignal, n_carriers: int) -> DtSignal:
    """Serial to parallel, unitary inverse DFT per block, parallel to serial; no cyclic prefix."""
    blocks = _blocks(u, n_carriers)
    return u.with_samples(scipy.fft.ifft(blocks, axis=1, norm="ortho").reshape(-1))


def ofdm_demodulate(w: DtSignal, n_carriers: int) -> DtSignal:
    blocks = _blocks(w, n_carriers)
    return w.with_samples(scipy.fft.fft(blocks, axis=1, norm="ortho").reshape(-1))


def _blocks(s: DtSignal, n_carriers: int) -> np.ndarray:
    if n_carriers < 1 or len(s) % n_carriers:
        raise ValueError(f"{n_carriers} carriers do not divide a frame of {len(s)} symbols")
    return s.samples.reshape(-1, n_carriers)
