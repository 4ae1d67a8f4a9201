import logging

import hydra
import omegaconf
import pandas as pd
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sweep import reproduce_table1, structure_counts
from bbdpd.utils.io_utils import save_csv
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)


@timeit
def run(cfg: DictConfig) -> pd.DataFrame:
    experiment = ExperimentConfig.from_cfg(cfg.experiment, structures=cfg.structures)

    if cfg.table1.counts_only:
        df = structure_counts(experiment.structures)
    else:
        df = reproduce_table1(experiment)

    csv_path = save_csv(df, experiment.output_path / cfg.table1.csv_file)
    pylogger.info(f"Coefficient table saved to {to_relative_path(csv_path)}")
    return df


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="table1", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
