import logging
from typing import List

import numpy as np
import pytest
from hydra import compose, initialize
from omegaconf import DictConfig
from pytest import FixtureRequest, TempPathFactory

import bbdpd  # noqa
import bbdpd.utils.utils  # noqa
from bbdpd.chain.params import ModulationParams
from bbdpd.experiments.sources import gaussian_source
from bbdpd.signals.core import DtSignal
from scripts import fit, model_check, ofdm_demo, simulate, sweep, table1

logging.basicConfig(force=True, level=logging.DEBUG)

# desk-scale grid used by the property suites
N_SYMBOLS = 256
DESK_M = 10
DESK_L = 64


#
# Base configurations
#
def compose_cfg(config_name: str, overrides: List[str]) -> DictConfig:
    with initialize(config_path="../conf", version_base="1.1"):
        return compose(config_name=config_name, overrides=overrides)


def desk_overrides(output_dir: str, seed: int = 0) -> List[str]:
    return [
        "experiment=desk",
        "experiment.L=64",
        "experiment.n_symbols=256",
        "experiment.delta_list=[0.02,0.1,0.2]",
        f"experiment.seed={seed}",
        f"experiment.output_dir={output_dir}",
        "experiment.record_runtime=false",
    ]


@pytest.fixture(scope="package")
def output_dir(tmp_path_factory: TempPathFactory) -> str:
    return str(tmp_path_factory.mktemp("bbdpd_output"))


@pytest.fixture(scope="package")
def cfg_sweep(output_dir: str) -> DictConfig:
    return compose_cfg("sweep", desk_overrides(output_dir))


@pytest.fixture(scope="package")
def cfg_table1(output_dir: str) -> DictConfig:
    return compose_cfg("table1", desk_overrides(output_dir))


@pytest.fixture(scope="package")
def cfg_fit(output_dir: str) -> DictConfig:
    return compose_cfg("fit", desk_overrides(output_dir))


SCRIPTS = {
    "simulate": simulate.run,
    "model_check": model_check.run,
    "fit": fit.run,
    "sweep": sweep.run,
    "table1": table1.run,
    "ofdm_demo": ofdm_demo.run,
}

# keeps the script runs at a few seconds each
FAST_OVERRIDES = {
    "model_check": ["model_check.n_trials=4", "model_check.fir_taps=[4,8]"],
    "table1": ["table1.counts_only=true"],
    # enough training symbols for the 210 regressors of the default compensator
    "ofdm_demo": ["experiment.n_symbols=1024"],
}


#
# Script configurations aggregations
#
@pytest.fixture(scope="package", params=list(SCRIPTS))
def script_name(request: FixtureRequest) -> str:
    return request.param


@pytest.fixture(scope="package")
def cfg_all(script_name: str, output_dir: str) -> DictConfig:
    overrides = FAST_OVERRIDES.get(script_name, [])
    if script_name == "model_check":
        return compose_cfg(script_name, [f"model_check.output_dir={output_dir}", *overrides])
    return compose_cfg(script_name, desk_overrides(output_dir) + overrides)


#
# Script fixtures
#
@pytest.fixture(scope="package")
def run_scripts(script_name: str, cfg_all: DictConfig):
    yield SCRIPTS[script_name](cfg_all)


#
# Signal fixtures
#
@pytest.fixture
def params() -> ModulationParams:
    return ModulationParams(T=1.0, M=DESK_M, L=DESK_L)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def w(rng: np.random.Generator) -> DtSignal:
    return gaussian_source(N_SYMBOLS, rng)
