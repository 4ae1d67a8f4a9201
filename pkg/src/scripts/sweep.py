import logging

import hydra
import omegaconf
import pandas as pd
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sweep import run_sweep
from bbdpd.utils.io_utils import save_csv
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)


@timeit
def run(cfg: DictConfig) -> pd.DataFrame:
    experiment = ExperimentConfig.from_cfg(cfg.experiment, structures=cfg.structures)

    df = run_sweep(experiment)
    csv_path = save_csv(df, experiment.output_path / cfg.sweep.csv_file)
    pylogger.info(f"EVM sweep saved to {to_relative_path(csv_path)}")
    return df


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="sweep", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
