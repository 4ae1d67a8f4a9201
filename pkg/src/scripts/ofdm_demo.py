import logging

import hydra
import omegaconf
import pandas as pd
from hydra.utils import instantiate
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.chain.volterra import CtVolterraModel
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sweep import OfdmResult, ofdm_roundtrip
from bbdpd.utils.io_utils import save_csv
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)


@timeit
def run(cfg: DictConfig) -> OfdmResult:
    experiment = ExperimentConfig.from_cfg(cfg.experiment)
    structure = instantiate(cfg.compensator)
    cfg = cfg.ofdm_demo

    F = CtVolterraModel.identity() if cfg.identity else experiment.distortion(cfg.delta)
    result = ofdm_roundtrip(cfg.n_carriers, F, experiment, structure)

    df = pd.DataFrame(
        [
            {
                "n_carriers": cfg.n_carriers,
                "delta": 0.0 if cfg.identity else cfg.delta,
                "structure": structure.name,
                "evm_without_dpd": result.evm_without_dpd,
                "evm_with_dpd": result.evm_with_dpd,
            }
        ]
    )
    csv_path = save_csv(df, experiment.output_path / cfg.csv_file)
    pylogger.info(f"OFDM results saved to {to_relative_path(csv_path)}")
    return result


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="ofdm_demo", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
