import logging

import numpy as np

from bbdpd.baseband.pulses import PulseModel
from bbdpd.chain.demodulator import demod_correction
from bbdpd.chain.params import ModulationParams
from bbdpd.chain.volterra import CtVolterraModel, ct_volterra
from bbdpd.signals.core import CtSignal, DtSignal, FreqResponse, apply_freq_response, centered_bins

pylogger = logging.getLogger(__name__)


def _check_grid(x: CtSignal, p: ModulationParams) -> None:
    if x.oversample_factor != p.L or not np.isclose(x.sample_rate, p.sample_rate, rtol=1e-12, atol=0):
        raise ValueError(
            f"Signal grid (L={x.oversample_factor}, f_s={x.sample_rate}) does not match "
            f"the modulation parameters (L={p.L}, f_s={p.sample_rate})"
        )


def zoh(u: DtSignal, p: ModulationParams) -> CtSignal:
    """Holds every symbol for L grid samples (no 1/T gain)."""
    return CtSignal(
        samples=np.repeat(u.samples, p.L),
        sample_rate=p.sample_rate,
        oversample_factor=p.L,
        n_symbols=len(u),
    )


def mixer(x0: CtSignal, p: ModulationParams) -> CtSignal:
    """x(t) = 2 Re[exp(j w_c t) x_0(t)]."""
    _check_grid(x0, p)
    carrier = p.carrier(x0.n_symbols)
    return x0.with_samples(2 * (carrier * x0.samples).real)


def bandpass_response(p: ModulationParams, n_symbols: int) -> FreqResponse:
    """0/1 mask of the band around +/- w_c on the CT grid.

    The positive band keeps bins MN - N/2 <= kappa < MN + N/2 and the negative band is its mirror image,
    so the response is Hermitian and covers exactly N bins per side.
    """
    kappa = centered_bins(p.grid_length(n_symbols))
    carrier_bin = p.carrier_bin(n_symbols)
    upper = 2 * (kappa - carrier_bin)
    lower = 2 * (kappa + carrier_bin)
    mask = ((upper >= -n_symbols) & (upper < n_symbols)) | ((lower > -n_symbols) & (lower <= n_symbols))
    return FreqResponse(mask.astype(np.complex128))


def lowpass_response(p: ModulationParams, n_symbols: int) -> FreqResponse:
    """0/1 mask of the baseband [-w_b, w_b) on the CT grid."""
    kappa = centered_bins(p.grid_length(n_symbols))
    mask = (2 * kappa >= -n_symbols) & (2 * kappa < n_symbols)
    return FreqResponse(mask.astype(np.complex128))


def ideal_bandpass(y: CtSignal, p: ModulationParams) -> CtSignal:
    _check_grid(y, p)
    return apply_freq_response(y, bandpass_response(p, y.n_symbols))


def demodulate(z: CtSignal, p: ModulationParams, pulse: PulseModel = PulseModel.GRID) -> DtSignal:
    """Ideal demodulator: dual mix, low-pass, sample at t = nT, then correct with A."""
    _check_grid(z, p)
    n_symbols = z.n_symbols

    mixed = z.with_samples(z.samples * np.conj(p.carrier(n_symbols)))
    baseband = apply_freq_response(mixed, lowpass_response(p, n_symbols), real=False)
    u = baseband.samples[:: p.L]

    correction = demod_correction(p, n_symbols, pulse)
    return DtSignal(correction.apply(u), symbol_rate=p.symbol_rate)


def simulate_S(
    w: DtSignal, F: CtVolterraModel, p: ModulationParams, pulse: PulseModel = PulseModel.GRID
) -> DtSignal:
    """Brute-force oracle v = D H F M w on the oversampled periodic grid."""
    x = mixer(zoh(w, p), p)
    y = ct_volterra(x, F, p)
    z = ideal_bandpass(y, p)
    return demodulate(z, p, pulse)


class PassbandChain:
    """S = D H F M for fixed F and modulation parameters, callable on baseband frames."""

    def __init__(self, model: CtVolterraModel, params: ModulationParams, pulse: PulseModel = PulseModel.GRID):
        self.model = model
        self.params = params
        self.pulse = pulse

    def __call__(self, w: DtSignal) -> DtSignal:
        return simulate_S(w, self.model, self.params, self.pulse)

    def __repr__(self) -> str:
        return f"PassbandChain(M={self.params.M}, L={self.params.L}, terms={len(self.model.terms)})"
