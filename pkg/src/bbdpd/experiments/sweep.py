import logging
import time
from typing import Dict, List, NamedTuple, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from bbdpd.chain.passband import PassbandChain
from bbdpd.chain.volterra import CtVolterraModel
from bbdpd.dpd.fitting import FittedCompensator, closed_loop_evaluator, compensate, fit_compensator, prune_significant
from bbdpd.dpd.structures import CompensatorStructure, IdealOracle
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sources import ofdm_demodulate, ofdm_modulate, oversampled_source, qam64_source
from bbdpd.signals.core import DtSignal, evm_db

pylogger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["delta", "structure", "evm_db", "n_coeffs", "n_significant", "runtime_s"]
TABLE1_COLUMNS = ["model", "n_coeffs", "n_significant"]


class SweepRecord(NamedTuple):
    delta: float
    structure: str
    evm_db: float
    n_coeffs: int
    n_significant: int
    runtime_s: float


class OfdmResult(NamedTuple):
    evm_without_dpd: float
    evm_with_dpd: Optional[float]


def training_frames(cfg: ExperimentConfig) -> Tuple[DtSignal, DtSignal]:
    """(train, validate) 64QAM frames drawn from independent seed streams."""
    train_seed, validate_seed = cfg.seed_streams()
    n_train = cfg.n_train // cfg.source_oversampling
    n_validate = cfg.n_validate // cfg.source_oversampling
    if n_train < 1 or n_validate < 1:
        raise ValueError(f"source_oversampling={cfg.source_oversampling} exceeds the frame length")

    u_train = qam64_source(n_train, train_seed, symbol_rate=cfg.f_symb)
    u_validate = qam64_source(n_validate, validate_seed, symbol_rate=cfg.f_symb)
    return oversampled_source(u_train, cfg.source_oversampling), oversampled_source(
        u_validate, cfg.source_oversampling
    )


def bind_structure(structure: CompensatorStructure, chain: PassbandChain) -> CompensatorStructure:
    if isinstance(structure, IdealOracle):
        return structure.bind(chain)
    return structure


def fit_and_evaluate(
    structure: CompensatorStructure,
    chain: PassbandChain,
    u_train: DtSignal,
    v_train: DtSignal,
    u_validate: DtSignal,
    prune: bool,
    prune_tolerance: float,
) -> Tuple[FittedCompensator, float, int]:
    """Fits on the training frame and returns (fit, validation EVM, significant coefficient count)."""
    structure = bind_structure(structure, chain)
    fit = fit_compensator(structure, u_train, v_train)
    evaluate = closed_loop_evaluator(chain, u_validate)
    evm = evaluate(fit)

    n_significant = fit.n_significant
    if prune and structure.is_fitted:
        baseline = evm_db(u_validate, chain(u_validate))
        n_significant = prune_significant(fit, evaluate, prune_tolerance, baseline=baseline).n_significant
    return fit, evm, n_significant


def run_sweep(cfg: ExperimentConfig) -> pd.DataFrame:
    """Validation EVM of every compensator structure at every distortion level."""
    if not cfg.structures:
        raise ValueError("The sweep needs at least one compensator structure")

    p = cfg.params
    u_train, u_validate = training_frames(cfg)
    order = {name: index for index, name in enumerate(cfg.structures)}

    records: List[SweepRecord] = []
    for delta in tqdm(cfg.delta_list, desc="Distortion levels"):
        chain = PassbandChain(cfg.distortion(delta), p)
        v_train = chain(u_train)

        for name, structure in cfg.structures.items():
            start = time.perf_counter()
            fit, evm, n_significant = fit_and_evaluate(
                structure, chain, u_train, v_train, u_validate, cfg.prune, cfg.prune_tolerance
            )
            runtime = time.perf_counter() - start if cfg.record_runtime else 0.0
            pylogger.info(f"delta={delta:.3f} {name}: EVM {evm:.2f} dB with {fit.n_coeffs} coefficients")
            records.append(SweepRecord(float(delta), name, evm, fit.n_coeffs, n_significant, runtime))

    records.sort(key=lambda record: (record.delta, order[record.structure]))
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


def reproduce_table1(cfg: ExperimentConfig) -> pd.DataFrame:
    """Coefficient counts of the fitted structures at table1_delta, before and after pruning."""
    p = cfg.params
    u_train, u_validate = training_frames(cfg)
    chain = PassbandChain(cfg.distortion(cfg.table1_delta), p)
    v_train = chain(u_train)

    rows = []
    fitted = {name: structure for name, structure in cfg.structures.items() if structure.is_fitted}
    for name, structure in tqdm(fitted.items(), desc="Table rows"):
        fit, _, n_significant = fit_and_evaluate(
            structure, chain, u_train, v_train, u_validate, prune=True, prune_tolerance=cfg.prune_tolerance
        )
        rows.append({"model": name, "n_coeffs": fit.n_coeffs, "n_significant": n_significant})

    return pd.DataFrame(rows, columns=TABLE1_COLUMNS)


def ofdm_roundtrip(
    n_carriers: int,
    F: CtVolterraModel,
    cfg: ExperimentConfig,
    structure: Optional[CompensatorStructure] = None,
) -> OfdmResult:
    """Symbol-domain EVM of an OFDM link through S, without and (when a structure is given) with DPD."""
    if cfg.n_symbols % n_carriers:
        raise ValueError(f"{n_carriers} carriers do not divide n_symbols={cfg.n_symbols}")

    train_seed, validate_seed = cfg.seed_streams()
    u_validate = qam64_source(cfg.n_symbols, validate_seed, symbol_rate=cfg.f_symb)
    w_validate = ofdm_modulate(u_validate, n_carriers)
    chain = PassbandChain(F, cfg.params)

    without = evm_db(u_validate, ofdm_demodulate(chain(w_validate), n_carriers))
    pylogger.info(f"OFDM with {n_carriers} carriers, no DPD: EVM {without:.2f} dB")
    if structure is None:
        return OfdmResult(without, None)

    u_train = qam64_source(cfg.n_symbols, train_seed, symbol_rate=cfg.f_symb)
    w_train = ofdm_modulate(u_train, n_carriers)
    structure = bind_structure(structure, chain)
    fit = fit_compensator(structure, w_train, chain(w_train))

    with_dpd = evm_db(u_validate, ofdm_demodulate(chain(compensate(w_validate, fit)), n_carriers))
    pylogger.info(f"OFDM with {n_carriers} carriers, {structure.name} DPD: EVM {with_dpd:.2f} dB")
    return OfdmResult(without, with_dpd)


def structure_counts(structures: Dict[str, CompensatorStructure]) -> pd.DataFrame:
    """Regressor counts without fitting anything."""
    rows = [
        {"model": name, "n_coeffs": structure.n_coeffs, "n_significant": structure.n_coeffs}
        for name, structure in structures.items()
        if structure.is_fitted
    ]
    return pd.DataFrame(rows, columns=TABLE1_COLUMNS)
