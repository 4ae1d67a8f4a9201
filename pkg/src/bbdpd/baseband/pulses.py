import logging
from dataclasses import dataclass
from enum import auto
from typing import Sequence, Union

import numpy as np

from bbdpd.baseband.indexing import MIndex
from bbdpd.chain.params import ModulationParams

try:
    from enum import StrEnum
except ImportError:  # python < 3.11
    from backports.strenum import StrEnum

pylogger = logging.getLogger(__name__)


class PulseModel(StrEnum):
    # exact DFT of the sampled pulse on the periodic grid
    GRID = auto()
    # Fourier transform of the continuous pulse, the limit of GRID for L -> infinity
    CONTINUOUS = auto()


@dataclass(frozen=True)
class PulseWindow:
    """Support [tau_min, tau_max) of the shortened pulse p_{m,tau}."""

    tau_min: float
    tau_max: float

    @property
    def empty(self) -> bool:
        return self.tau_min >= self.tau_max

    @property
    def length(self) -> float:
        return 0.0 if self.empty else self.tau_max - self.tau_min

    @classmethod
    def full(cls, T: float) -> "PulseWindow":
        return cls(0.0, T)


def pulse_window(m: MIndex, tau_prime: Sequence[float], T: float) -> PulseWindow:
    """Window of the pulse that multiplies the monomial of class m.

    Entries of class 2 and 4 delay the start to their tau', entries of class 1 and 3 cut the end at theirs.
    """
    tau_prime = np.asarray(tau_prime, dtype=float)
    if tau_prime.shape != (m.d,):
        raise ValueError(f"Expected {m.d} delays, got {tau_prime.shape}")
    if np.any(tau_prime < 0) or np.any(tau_prime >= T):
        raise ValueError(f"Within-symbol delays must lie in [0, T), got {tau_prime}")

    starts = [tau_prime[i] for i in m.s2 + m.s4]
    ends = [tau_prime[i] for i in m.s1 + m.s3]
    return PulseWindow(max(starts, default=0.0), min(ends, default=T))


def pulse_ft(window: PulseWindow, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """Fourier transform of the indicator of the window at angular frequency omega."""
    omega_array = np.asarray(omega, dtype=float)
    result = np.zeros(omega_array.shape, dtype=np.complex128)

    if not window.empty:
        nonzero = omega_array != 0
        w = omega_array[nonzero]
        result[nonzero] = (np.exp(-1j * w * window.tau_min) - np.exp(-1j * w * window.tau_max)) / (1j * w)
        result[~nonzero] = window.tau_max - window.tau_min

    if np.ndim(omega) == 0:
        return complex(result)
    return result


def window_samples(window: PulseWindow, p: ModulationParams):
    """Window edges as integer grid samples."""
    start = int(round(window.tau_min / p.dt))
    stop = int(round(window.tau_max / p.dt))
    return start, stop


def grid_pulse_ft(window: PulseWindow, bins: np.ndarray, p: ModulationParams, n_symbols: int) -> np.ndarray:
    """DFT (times dt) of the sampled window on the K = L N grid, at integer CT bins.

    Uses the Dirichlet form dt e^{-j pi kappa (a + b - 1)/K} sin(pi kappa c / K) / sin(pi kappa / K)
    for samples [a, b), c = b - a, which stays accurate for bins close to a multiple of K.
    """
    bins = np.asarray(bins, dtype=np.int64)
    result = np.zeros(bins.shape, dtype=np.complex128)
    if window.empty:
        return result

    K = p.grid_length(n_symbols)
    start, stop = window_samples(window, p)
    count = stop - start
    if count <= 0:
        return result

    kappa = bins % K
    at_dc = kappa == 0
    kappa = kappa[~at_dc]

    phase = np.pi * ((kappa * (start + stop - 1)) % (2 * K)) / K
    numerator = np.sin(np.pi * ((kappa * count) % (2 * K)) / K)
    denominator = np.sin(np.pi * kappa / K)

    result[~at_dc] = p.dt * np.exp(-1j * phase) * numerator / denominator
    result[at_dc] = count * p.dt
    return result


def pulse_spectrum(
    window: PulseWindow, bins: np.ndarray, p: ModulationParams, n_symbols: int, pulse: PulseModel = PulseModel.GRID
) -> np.ndarray:
    """Pulse spectrum normalised by T at integer CT bins (so the full pulse has value 1 at DC)."""
    if pulse == PulseModel.GRID:
        return grid_pulse_ft(window, bins, p, n_symbols) / p.T
    omega = 2 * np.pi * np.asarray(bins, dtype=float) / (n_symbols * p.T)
    return pulse_ft(window, omega) / p.T
