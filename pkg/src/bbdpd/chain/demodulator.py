import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from bbdpd.baseband.pulses import PulseModel, PulseWindow, pulse_spectrum
from bbdpd.chain.params import ModulationParams
from bbdpd.signals.core import FreqResponse, centered_bins, dft, idft

pylogger = logging.getLogger(__name__)

SINGULARITY_THRESHOLD = 1e-12


class SingularCorrectionError(ValueError):
    def __init__(self, bin_index: int, centered_bin: int, determinant: complex):
        super().__init__(
            f"Demodulator correction is singular at DT bin {bin_index} (centered bin {centered_bin}): "
            f"|P_0^2 - P_i^2 - P_q^2| = {abs(determinant):.3e}; check the (M, L) configuration"
        )
        self.bin_index = bin_index
        self.centered_bin = centered_bin


def mirror(h: np.ndarray) -> np.ndarray:
    """conj(h(-Omega)) on the natural-order DFT grid."""
    return np.conj(np.roll(h[::-1], 1))


@dataclass(frozen=True, eq=False)
class DemodCorrection:
    """The correction filter A: Re/Im channel mixing undoing the ZOH shaping and the image at theta."""

    rr: FreqResponse
    ri: FreqResponse
    ir: FreqResponse
    ii: FreqResponse

    @property
    def grid_length(self) -> int:
        return self.rr.grid_length

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.size != self.grid_length:
            raise ValueError(f"Grid length mismatch: {u.size} != {self.grid_length}")

        real_spectrum = dft(u.real).values
        imag_spectrum = dft(u.imag).values
        re = idft(self.rr.values * real_spectrum + self.ri.values * imag_spectrum).real
        im = idft(self.ir.values * real_spectrum + self.ii.values * imag_spectrum).real
        return re + 1j * im


@lru_cache(maxsize=32)
def demod_correction(p: ModulationParams, n_symbols: int, pulse: PulseModel = PulseModel.GRID) -> DemodCorrection:
    """Builds A from P_0(Omega) and its images P^{+/-}(Omega) = P_0(Omega +/- theta).

    With P_0 split into its conjugate-symmetric part P_0 and antisymmetric part P_0a (nonzero only at the
    Nyquist bin of an even-length frame, whose mirror falls outside the band), D H M acts on (Re, Im) as
    [[P_0 + P_i, P_q - P_0a], [P_q + P_0a, P_0 - P_i]] and A is its inverse.
    """
    pylogger.debug(f"Building the demodulator correction for {p}, N={n_symbols}, pulse={pulse}")

    k = centered_bins(n_symbols)
    window = PulseWindow.full(p.T)

    p0_raw = pulse_spectrum(window, k, p, n_symbols, pulse)
    p_plus = pulse_spectrum(window, k + 2 * p.carrier_bin(n_symbols), p, n_symbols, pulse)
    p_minus = mirror(p_plus)

    p0 = (p0_raw + mirror(p0_raw)) / 2
    p0a = (p0_raw - mirror(p0_raw)) / 2j
    p_i = (p_plus + p_minus) / 2
    p_q = (p_plus - p_minus) / 2j

    determinant = p0**2 - p_i**2 - p_q**2 + p0a**2
    singular = np.flatnonzero(np.abs(determinant) < SINGULARITY_THRESHOLD)
    if singular.size:
        bad = int(singular[0])
        raise SingularCorrectionError(bad, int(k[bad]), determinant[bad])

    Q = 1 / determinant
    return DemodCorrection(
        rr=FreqResponse((p0 - p_i) * Q),
        ri=FreqResponse(-(p_q - p0a) * Q),
        ir=FreqResponse(-(p_q + p0a) * Q),
        ii=FreqResponse((p0 + p_i) * Q),
    )
