import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Union

import hydra
import numpy as np
import scipy.linalg
from tqdm import tqdm

from bbdpd.chain.params import ModulationParams
from bbdpd.chain.passband import PassbandChain, simulate_S
from bbdpd.chain.volterra import CtVolterraModel
from bbdpd.dpd.structures import CompensatorStructure
from bbdpd.signals.core import DtSignal, evm_db
from bbdpd.utils.io_utils import read_versioned_records, write_versioned_records

pylogger = logging.getLogger(__name__)

COEFFICIENTS_DUMP_KIND = "coefficients"
CHANNELS = ("re", "im")


def fit_least_squares(X: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of X c = target through an SVD-based LAPACK driver."""
    X = np.asarray(X, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if X.ndim != 2 or target.shape != (X.shape[0],):
        raise ValueError(f"Shape mismatch: X {X.shape}, target {target.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(target))):
        raise ValueError("Regressor matrix and target must be finite")
    if X.shape[1] == 0:
        return np.zeros(0)

    if X.shape[0] < X.shape[1]:
        pylogger.warning(f"Under-determined least squares: {X.shape[0]} rows for {X.shape[1]} columns")

    coefficients, _, rank, singular_values = scipy.linalg.lstsq(X, target, lapack_driver="gelsd")
    smallest = singular_values[-1] if singular_values.size else 0.0
    condition = singular_values[0] / smallest if smallest > 0 else np.inf
    pylogger.info(f"Least squares on {X.shape}: rank {rank}, condition number {condition:.3e}")
    return coefficients


@dataclass(frozen=True, eq=False)
class FittedCompensator:
    structure: CompensatorStructure
    coefficients_re: np.ndarray
    coefficients_im: np.ndarray
    mask_re: np.ndarray
    mask_im: np.ndarray

    @classmethod
    def unfitted(cls, structure: CompensatorStructure) -> "FittedCompensator":
        empty = np.zeros(0)
        return cls(structure, empty, empty, empty.astype(bool), empty.astype(bool))

    @classmethod
    def from_coefficients(
        cls, structure: CompensatorStructure, coefficients_re: np.ndarray, coefficients_im: np.ndarray
    ) -> "FittedCompensator":
        coefficients_re = np.asarray(coefficients_re, dtype=np.float64)
        coefficients_im = np.asarray(coefficients_im, dtype=np.float64)
        if coefficients_re.shape != (structure.n_columns,) or coefficients_im.shape != (structure.n_columns,):
            raise ValueError(
                f"{structure.name} has {structure.n_columns} columns, got coefficient vectors "
                f"{coefficients_re.shape} and {coefficients_im.shape}"
            )
        mask = np.ones(structure.n_columns, dtype=bool)
        return cls(structure, coefficients_re, coefficients_im, mask, mask.copy())

    @property
    def n_coeffs(self) -> int:
        return self.coefficients_re.size + self.coefficients_im.size

    @property
    def n_significant(self) -> int:
        return int(self.mask_re.sum() + self.mask_im.sum())

    @property
    def masked_re(self) -> np.ndarray:
        return np.where(self.mask_re, self.coefficients_re, 0.0)

    @property
    def masked_im(self) -> np.ndarray:
        return np.where(self.mask_im, self.coefficients_im, 0.0)

    def with_mask(self, mask_re: np.ndarray, mask_im: np.ndarray) -> "FittedCompensator":
        return replace(self, mask_re=np.asarray(mask_re, dtype=bool), mask_im=np.asarray(mask_im, dtype=bool))


def fit_compensator(structure: CompensatorStructure, w_train: DtSignal, v_train: DtSignal) -> FittedCompensator:
    """Fits the inverse of S: regressors from the chain output v = S(w), target the chain input w."""
    if not structure.is_fitted:
        return FittedCompensator.unfitted(structure)
    if len(w_train) != len(v_train):
        raise ValueError(f"Training input and output differ in length: {len(w_train)} != {len(v_train)}")

    X = structure.regressor_matrix(v_train)
    coefficients_re = fit_least_squares(X, w_train.i)
    coefficients_im = fit_least_squares(X, w_train.q)
    return FittedCompensator.from_coefficients(structure, coefficients_re, coefficients_im)


def compensate(w: DtSignal, fit: FittedCompensator) -> DtSignal:
    return fit.structure.apply(w, fit.masked_re, fit.masked_im)


def ideal_compensator(w: DtSignal, F: CtVolterraModel, p: ModulationParams) -> DtSignal:
    """2w - S(w), the first-order inverse of S around the identity."""
    return w.with_samples(2 * w.samples - simulate_S(w, F, p).samples)


def closed_loop_evaluator(chain: PassbandChain, u: DtSignal) -> Callable[[FittedCompensator], float]:
    """EVM(u, S(C(u))) of a compensator on held-out data."""

    def evaluate(fit: FittedCompensator) -> float:
        return evm_db(u, chain(compensate(u, fit)))

    return evaluate


def prune_significant(
    fit: FittedCompensator,
    evaluate: Callable[[FittedCompensator], float],
    tolerance: float = 0.01,
    baseline: Optional[float] = None,
) -> FittedCompensator:
    """Zeroes the smallest coefficients while the validation EVM stays within tolerance of the best.

    Coefficients of both channels are ranked together by magnitude; a bisection over the number of
    zeroed coefficients keeps the largest count whose EVM satisfies evm <= best + tolerance * |best|.
    When `baseline` (the uncompensated EVM) is given, the limit never exceeds it. At least one
    coefficient always survives, and a fit whose best EVM is not below 0 dB is returned unpruned.
    """
    n = fit.n_coeffs
    if n == 0:
        return fit

    best = evaluate(fit)
    if best >= 0:
        pylogger.warning(f"{fit.structure.name}: best EVM {best:.2f} dB is not below 0 dB, skipping pruning")
        return fit

    limit = best + tolerance * abs(best)
    if baseline is not None:
        limit = min(limit, max(baseline, best))

    magnitudes = np.abs(np.concatenate([fit.masked_re, fit.masked_im]))
    order = np.argsort(magnitudes, kind="stable")
    n_re = fit.coefficients_re.size

    def candidate(n_zeroed: int) -> FittedCompensator:
        keep = np.ones(n, dtype=bool)
        keep[order[:n_zeroed]] = False
        keep &= np.concatenate([fit.mask_re, fit.mask_im])
        return fit.with_mask(keep[:n_re], keep[n_re:])

    # n_zeroed = lo always passes; lo = 0 is the unpruned fit
    lo, hi = 0, n
    with tqdm(total=max(1, math.ceil(math.log2(n))), desc=f"Pruning {fit.structure.name}", leave=False) as progress:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if evaluate(candidate(mid)) <= limit:
                lo = mid
            else:
                hi = mid
            progress.update()

    pruned = candidate(lo)
    pylogger.info(
        f"{fit.structure.name}: kept {pruned.n_significant}/{n} coefficients "
        f"(threshold {magnitudes[order[lo]]:.3e}, best EVM {best:.2f} dB, limit {limit:.2f} dB)"
    )
    return pruned


def export_coefficients(fit: FittedCompensator, path: Union[str, Path]) -> Path:
    """Versioned dump: structure descriptor, then one record per (column, channel)."""
    records = []
    for channel, coefficients, mask in (
        ("re", fit.coefficients_re, fit.mask_re),
        ("im", fit.coefficients_im, fit.mask_im),
    ):
        for column, ((block, pattern), value, significant) in enumerate(
            zip(fit.structure.columns, coefficients, mask)
        ):
            records.append(
                {
                    "column": column,
                    "block": block,
                    "window": list(pattern.window),
                    "alpha": list(pattern.alpha),
                    "beta": list(pattern.beta),
                    "channel": channel,
                    "value": float(value),
                    "significant": bool(significant),
                }
            )
    return write_versioned_records(path, COEFFICIENTS_DUMP_KIND, fit.structure.describe(), records)


def import_coefficients(
    path: Union[str, Path], structure: Optional[CompensatorStructure] = None
) -> FittedCompensator:
    meta, records = read_versioned_records(path, COEFFICIENTS_DUMP_KIND)
    if structure is None:
        structure = hydra.utils.instantiate(meta)

    n_columns = structure.n_columns
    values = {channel: np.zeros(n_columns) for channel in CHANNELS}
    masks = {channel: np.zeros(n_columns, dtype=bool) for channel in CHANNELS}
    seen = {channel: np.zeros(n_columns, dtype=bool) for channel in CHANNELS}
    columns = structure.columns

    for record in records:
        column, channel = record["column"], record["channel"]
        if channel not in CHANNELS or not 0 <= column < n_columns:
            raise ValueError(f"Invalid coefficient record {record}")
        block, pattern = columns[column]
        if (
            record["block"] != block
            or tuple(record["window"]) != pattern.window
            or tuple(record["alpha"]) != pattern.alpha
            or tuple(record["beta"]) != pattern.beta
        ):
            raise ValueError(f"Record {record} does not match column {column} of {structure.name}")
        values[channel][column] = record["value"]
        masks[channel][column] = record["significant"]
        seen[channel][column] = True

    if not all(seen[channel].all() for channel in CHANNELS):
        raise ValueError(f"{path} misses coefficients for {structure.name}")

    return FittedCompensator(structure, values["re"], values["im"], masks["re"], masks["im"])
