import logging
from pathlib import Path

import hydra
import omegaconf
import pandas as pd
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.baseband.model import fir_study, model_from_ct
from bbdpd.chain.params import ModulationParams
from bbdpd.chain.volterra import CtVolterraModel, snap_to_grid
from bbdpd.experiments.model_check import run_model_check
from bbdpd.experiments.sources import gaussian_source
from bbdpd.utils.io_utils import save_csv
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)

TOLERANCE = 1e-6


@timeit
def run(cfg: DictConfig) -> pd.DataFrame:
    cfg = cfg.model_check
    output_dir = Path(cfg.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    df = run_model_check(
        n_trials=cfg.n_trials,
        carrier_ratios=list(cfg.carrier_ratios),
        n_symbols=cfg.n_symbols,
        seed=cfg.seed,
        L=cfg.L,
        max_degree=cfg.max_degree,
        max_terms=cfg.max_terms,
        max_delay_symbols=cfg.max_delay_symbols,
        max_coefficient=cfg.max_coefficient,
    )
    csv_path = save_csv(df, output_dir / "model_check.csv")
    pylogger.info(f"Model check results saved to {to_relative_path(csv_path)}")

    failed = df[df["rel_error"] > TOLERANCE]
    if len(failed):
        pylogger.error(f"{len(failed)} of {len(df)} models exceed a relative error of {TOLERANCE:g}")
    else:
        pylogger.info(f"All {len(df)} models within a relative error of {TOLERANCE:g}")

    if cfg.fir_taps:
        M = int(cfg.carrier_ratios[0])
        p = ModulationParams(T=1.0, M=M, L=max(cfg.L, 2 * M + 2))
        F = snap_to_grid(CtVolterraModel.cubic_distortion(cfg.fir_delta, (0.2, 0.3, 0.4)), p)
        model = model_from_ct(F, p, cfg.n_symbols)
        records = fir_study(model, gaussian_source(cfg.n_symbols, cfg.seed), list(cfg.fir_taps))
        fir_path = save_csv(pd.DataFrame(records, columns=["n_taps", "evm_db"]), output_dir / "fir_study.csv")
        pylogger.info(f"FIR truncation study saved to {to_relative_path(fir_path)}")

    return df


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="model_check", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
