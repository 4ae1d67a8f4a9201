import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from bbdpd.baseband.indexing import (
    PREVIOUS_SYMBOL_CLASSES,
    SINE_CLASSES,
    DelaySplit,
    MIndex,
    all_mindices,
    sigma_tilde,
    split_delays,
)
from bbdpd.baseband.pulses import PulseModel, PulseWindow, pulse_spectrum, pulse_window
from bbdpd.chain.demodulator import DemodCorrection, demod_correction
from bbdpd.chain.params import ModulationParams
from bbdpd.chain.volterra import CtVolterraModel
from bbdpd.signals.core import DtSignal, FreqResponse, centered_bins, dft, evm_db, idft
from bbdpd.utils.io_utils import read_versioned_records, write_versioned_records

pylogger = logging.getLogger(__name__)

MODEL_DUMP_KIND = "baseband-model"


class FirFilter(NamedTuple):
    """Taps h[first_lag], ..., h[first_lag + n_taps - 1] of a circular FIR filter."""

    taps: np.ndarray
    first_lag: int

    @property
    def n_taps(self) -> int:
        return self.taps.size


@dataclass(frozen=True, eq=False)
class Branch:
    coefficient: float
    mindex: MIndex
    k: Tuple[int, ...]
    window: PulseWindow
    response: FreqResponse
    fir: Optional[FirFilter] = None
    term_index: int = 0


@dataclass(frozen=True, eq=False)
class BasebandModel:
    """S = A o L o V: monomial generator V, reconstruction filter bank L and demodulator correction A."""

    params: ModulationParams
    n_symbols: int
    branches: Tuple[Branch, ...]
    demod_correction: DemodCorrection
    pulse: PulseModel = PulseModel.GRID
    n_candidates: int = 0

    def __len__(self) -> int:
        return len(self.branches)

    @property
    def has_fir(self) -> bool:
        return all(branch.fir is not None for branch in self.branches)


def recon_filter(
    m: MIndex,
    split: DelaySplit,
    p: ModulationParams,
    n_symbols: int,
    pulse: PulseModel = PulseModel.GRID,
) -> FreqResponse:
    """Samples of G_m on Omega_k = 2 pi k / N, k in [-N/2, N/2), returned in natural DFT order.

    G_m = j^{N2} sum_{r_c, r_s} [prod r_s] P_{m,tau'}(Omega/T - w_c (sigma~(r) - 1)) / T
          * exp(-j w_c [(r_c, P^1 tau') + (r_s, P^2 tau')]).

    The mixer gain 2 on every factor cancels the 1/2 of the cosine/sine expansion, hence no 2^{-d}.
    """
    if split.d != m.d:
        raise ValueError(f"Delay split of degree {split.d} does not match m={m}")

    window = pulse_window(m, split.tau_prime, p.T)
    if window.empty:
        return FreqResponse(np.zeros(n_symbols, dtype=np.complex128))

    k = centered_bins(n_symbols)
    carrier_bin = p.carrier_bin(n_symbols)
    cosine_tau, sine_tau = m.project(split.tau_prime)
    if split.offsets is not None:
        cosine_offsets, sine_offsets = m.project(split.offsets)

    spectra: Dict[int, np.ndarray] = {}
    G = np.zeros(n_symbols, dtype=np.complex128)
    cosine_signs, sine_signs = m.sign_sets()
    for r_c in cosine_signs:
        for r_s in sine_signs:
            shift = sigma_tilde(r_c) + sigma_tilde(r_s) - 1
            if shift not in spectra:
                spectra[shift] = pulse_spectrum(window, k - shift * carrier_bin, p, n_symbols, pulse)

            if split.offsets is not None:
                # w_c tau' = 2 pi M a' / L, reduced exactly
                turns = (p.M * (int(np.dot(r_c, cosine_offsets)) + int(np.dot(r_s, sine_offsets)))) % p.L
                phase = 2 * np.pi * turns / p.L
            else:
                phase = p.omega_c * (np.dot(r_c, cosine_tau) + np.dot(r_s, sine_tau))

            G += np.prod(r_s) * np.exp(-1j * phase) * spectra[shift]

    return FreqResponse(1j**m.n2 * G)


def _monomial(i: np.ndarray, q: np.ndarray, m: MIndex, k: Sequence[int]) -> np.ndarray:
    x = np.ones(i.shape, dtype=np.float64)
    for entry, k_i in zip(m.m, k):
        channel = q if entry in SINE_CLASSES else i
        shift = k_i + 1 if entry in PREVIOUS_SYMBOL_CLASSES else k_i
        x = x * np.roll(channel, shift)
    return x


def monomial_eval(w: DtSignal, m: MIndex, k: Sequence[int]) -> DtSignal:
    """x_{m,k}[n]: product of i/q samples, classes 1 and 3 delayed by k_i + 1, classes 2 and 4 by k_i."""
    if len(k) != m.d:
        raise ValueError(f"Need {m.d} delays for m={m}, got {len(k)}")
    return w.with_samples(_monomial(w.i, w.q, m, k))


def fir_taps(G: FreqResponse, n_taps: int) -> FirFilter:
    """Centered truncation of the unit sample response of G to n_taps taps."""
    n = G.grid_length
    if n_taps < 1:
        raise ValueError(f"n_taps must be positive, got {n_taps}")
    n_taps = min(n_taps, n)

    impulse = idft(G)
    first_lag = -(n_taps // 2)
    taps = impulse[np.arange(first_lag, first_lag + n_taps) % n]

    total = np.sum(np.abs(impulse) ** 2)
    if total > 0 and np.sum(np.abs(taps) ** 2) < 0.9 * total:
        pylogger.warning(f"{n_taps} taps keep less than 90% of the impulse response energy")
    return FirFilter(taps=taps, first_lag=first_lag)


def fir_response(fir: FirFilter, n: int) -> FreqResponse:
    impulse = np.zeros(n, dtype=np.complex128)
    np.add.at(impulse, np.arange(fir.first_lag, fir.first_lag + fir.n_taps) % n, fir.taps)
    return dft(impulse)


def model_from_ct(
    F: CtVolterraModel,
    p: ModulationParams,
    n_symbols: int,
    pulse: PulseModel = PulseModel.GRID,
    drop_empty: bool = True,
    n_taps: Optional[int] = None,
) -> BasebandModel:
    """Baseband equivalent of D H F M, one branch per (term, m) with a non-empty pulse window.

    The constant b0 has no branch: its output sits at DC, outside the band-pass.
    """
    branches: List[Branch] = []
    n_candidates = 0

    for term_index, term in enumerate(F.terms):
        split = split_delays(term.delays, p.T, oversample_factor=p.L)
        for mindex in all_mindices(term.degree):
            n_candidates += 1
            window = pulse_window(mindex, split.tau_prime, p.T)
            if window.empty and drop_empty:
                continue

            response = recon_filter(mindex, split, p, n_symbols, pulse)
            branches.append(
                Branch(
                    coefficient=term.coefficient,
                    mindex=mindex,
                    k=split.k,
                    window=window,
                    response=response,
                    fir=fir_taps(response, n_taps) if n_taps is not None else None,
                    term_index=term_index,
                )
            )

    pylogger.debug(f"Baseband model: {len(branches)} branches out of {n_candidates} candidates")

    return BasebandModel(
        params=p,
        n_symbols=n_symbols,
        branches=tuple(branches),
        demod_correction=demod_correction(p, n_symbols, pulse),
        pulse=pulse,
        n_candidates=n_candidates,
    )


def with_fir_taps(model: BasebandModel, n_taps: int) -> BasebandModel:
    branches = tuple(replace(branch, fir=fir_taps(branch.response, n_taps)) for branch in model.branches)
    return replace(model, branches=branches)


def _check_frame(model: BasebandModel, w: DtSignal) -> None:
    if len(w) != model.n_symbols:
        raise ValueError(f"Model built for N={model.n_symbols} symbols, got a frame of {len(w)}")


def model_monomials(model: BasebandModel, w: DtSignal) -> np.ndarray:
    """Output of the V stage: one real monomial column per branch."""
    _check_frame(model, w)
    columns = [_monomial(w.i, w.q, branch.mindex, branch.k) for branch in model.branches]
    if not columns:
        return np.zeros((model.n_symbols, 0))
    return np.stack(columns, axis=1)


def model_apply(model: BasebandModel, w: DtSignal, use_fir: bool = False) -> DtSignal:
    """v = A(sum_branches b_k g_m * x_{m,k}), circular convolutions evaluated on the DFT grid."""
    _check_frame(model, w)
    if use_fir and not model.has_fir:
        raise ValueError("Model has no FIR taps; build it with n_taps or with_fir_taps")

    monomial_cache: Dict[Tuple[MIndex, Tuple[int, ...]], np.ndarray] = {}
    spectrum = np.zeros(model.n_symbols, dtype=np.complex128)
    for branch in model.branches:
        key = (branch.mindex, branch.k)
        if key not in monomial_cache:
            monomial_cache[key] = dft(_monomial(w.i, w.q, branch.mindex, branch.k)).values
        response = fir_response(branch.fir, model.n_symbols) if use_fir else branch.response
        spectrum += branch.coefficient * response.values * monomial_cache[key]

    u = idft(spectrum)
    return w.with_samples(model.demod_correction.apply(u))


def fir_study(model: BasebandModel, w: DtSignal, taps_list: Sequence[int]) -> List[Dict[str, float]]:
    """EVM of FIR-truncated reconstruction filters against the exact model output."""
    exact = model_apply(model, w)
    records = []
    for n_taps in tqdm(taps_list, desc="FIR truncation"):
        approximation = model_apply(with_fir_taps(model, n_taps), w, use_fir=True)
        records.append({"n_taps": int(n_taps), "evm_db": evm_db(exact, approximation)})
    return records


def dump_model(model: BasebandModel, path: Union[str, Path]) -> Path:
    """Writes one JSON record per branch after a versioned header; see docs/formats.md."""
    meta = {
        "T": model.params.T,
        "M": model.params.M,
        "L": model.params.L,
        "n_symbols": model.n_symbols,
        "pulse": str(model.pulse),
        "n_candidates": model.n_candidates,
    }
    records = []
    for branch in model.branches:
        records.append(
            {
                "term": branch.term_index,
                "coefficient": branch.coefficient,
                "m": list(branch.mindex.m),
                "k": list(branch.k),
                "window": [branch.window.tau_min, branch.window.tau_max],
                "fir_first_lag": branch.fir.first_lag if branch.fir is not None else None,
                "fir_taps": [[tap.real, tap.imag] for tap in branch.fir.taps] if branch.fir is not None else None,
            }
        )
    return write_versioned_records(path, MODEL_DUMP_KIND, meta, records)


def load_model_records(path: Union[str, Path]) -> Tuple[Dict, List[Dict]]:
    return read_versioned_records(path, MODEL_DUMP_KIND)
