import logging

import hydra
import omegaconf
from hydra.utils import instantiate
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.chain.passband import PassbandChain
from bbdpd.dpd.fitting import FittedCompensator, export_coefficients
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sweep import fit_and_evaluate, training_frames
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)


@timeit
def run(cfg: DictConfig) -> FittedCompensator:
    experiment = ExperimentConfig.from_cfg(cfg.experiment)
    structure = instantiate(cfg.compensator)
    cfg = cfg.fit

    chain = PassbandChain(experiment.distortion(cfg.delta), experiment.params)
    u_train, u_validate = training_frames(experiment)
    fit, evm, n_significant = fit_and_evaluate(
        structure, chain, u_train, chain(u_train), u_validate, cfg.prune, experiment.prune_tolerance
    )
    pylogger.info(
        f"{structure.name} at delta={cfg.delta}: validation EVM {evm:.2f} dB, "
        f"{n_significant}/{fit.n_coeffs} significant coefficients"
    )

    if structure.is_fitted:
        path = export_coefficients(fit, experiment.output_path / cfg.coefficients_file)
        pylogger.info(f"Coefficients saved to {to_relative_path(path)}")
    return fit


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="fit", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
