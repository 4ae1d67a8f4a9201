import logging

import hydra
import numpy as np
import omegaconf
from omegaconf import DictConfig

import bbdpd  # noqa
from bbdpd.baseband.model import dump_model, model_apply, model_from_ct
from bbdpd.chain.passband import ideal_bandpass, mixer, simulate_S, zoh
from bbdpd.chain.volterra import CtVolterraModel, ct_volterra
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.sources import qam64_source
from bbdpd.signals.core import dft, evm_db, relative_error
from bbdpd.utils.utils import PROJECT_ROOT, timeit, to_relative_path

pylogger = logging.getLogger(__name__)


@timeit
def run(cfg: DictConfig) -> None:
    experiment = ExperimentConfig.from_cfg(cfg.experiment)
    cfg = cfg.simulate

    p = experiment.params
    F = CtVolterraModel.identity() if cfg.identity else experiment.distortion(cfg.delta)
    train_seed, _ = experiment.seed_streams()
    u = qam64_source(experiment.n_symbols, train_seed, symbol_rate=experiment.f_symb)

    v = simulate_S(u, F, p)
    pylogger.info(f"Oracle EVM without compensation: {evm_db(u, v):.2f} dB")

    # the CT spectrum after the band-pass, for inspection of the distortion products
    spectrum = np.abs(dft(ideal_bandpass(ct_volterra(mixer(zoh(u, p), p), F, p), p)).values)

    output_path = experiment.output_path
    signals_path = output_path / cfg.signals_file
    np.savez(signals_path, u=u.samples, w=u.samples, v=v.samples, passband_spectrum=spectrum)
    pylogger.info(f"Signals saved to {to_relative_path(signals_path)}")

    if cfg.dump_model:
        model = model_from_ct(F, p, experiment.n_symbols)
        pylogger.info(f"Analytic model vs oracle: relative error {relative_error(v, model_apply(model, u)):.3e}")
        model_path = dump_model(model, output_path / cfg.model_file)
        pylogger.info(f"Baseband model with {len(model)} branches saved to {to_relative_path(model_path)}")


@hydra.main(config_path=str(PROJECT_ROOT / "conf"), config_name="simulate", version_base="1.1")
def main(cfg: omegaconf.DictConfig):
    run(cfg)


if __name__ == "__main__":
    main()
