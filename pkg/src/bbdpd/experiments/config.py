import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from hydra.utils import instantiate
from omegaconf import DictConfig, OmegaConf

from bbdpd.chain.params import ModulationParams
from bbdpd.chain.volterra import CtVolterraModel, snap_to_grid
from bbdpd.dpd.structures import CompensatorStructure
from bbdpd.utils.utils import is_power_of_two

pylogger = logging.getLogger(__name__)

MAX_DELTA = 0.2


@dataclass
class ExperimentConfig:
    """Parameters of one simulation campaign; build it from a hydra config with `from_cfg`."""

    f_symb: float = 2e6
    M: int = 10
    L: int = 1000
    n_symbols: int = 4096
    seed: int = 0
    delta_list: List[float] = field(default_factory=lambda: [round(0.02 * i, 2) for i in range(1, 11)])
    tau_over_T: List[float] = field(default_factory=lambda: [0.2, 0.3, 0.4])
    structures: Dict[str, CompensatorStructure] = field(default_factory=dict)
    n_train: Optional[int] = None
    n_validate: Optional[int] = None
    output_dir: str = "output"
    prune: bool = False
    prune_tolerance: float = 0.01
    table1_delta: float = 0.02
    n_carriers: int = 64
    source_oversampling: int = 1
    record_runtime: bool = True

    def __post_init__(self):
        if self.n_train is None:
            self.n_train = self.n_symbols
        if self.n_validate is None:
            self.n_validate = self.n_symbols
        self.validate()

    def validate(self) -> None:
        if self.L < 2 * self.M + 2:
            raise ValueError(f"L={self.L} must be at least 2M+2={2 * self.M + 2}")
        for key in ("n_symbols", "n_train", "n_validate"):
            value = getattr(self, key)
            if not is_power_of_two(value):
                raise ValueError(f"{key}={value} must be a power of two")
        bad = [delta for delta in self.delta_list if not 0 < delta <= MAX_DELTA]
        if bad:
            raise ValueError(f"delta values must lie in (0, {MAX_DELTA}], got {bad}")
        if not 0 < self.table1_delta <= MAX_DELTA:
            raise ValueError(f"table1_delta must lie in (0, {MAX_DELTA}], got {self.table1_delta}")
        if any(tau < 0 for tau in self.tau_over_T):
            raise ValueError(f"Delays must be non-negative, got {self.tau_over_T}")
        if self.source_oversampling < 1:
            raise ValueError(f"source_oversampling must be >= 1, got {self.source_oversampling}")
        if self.prune_tolerance < 0:
            raise ValueError(f"prune_tolerance must be non-negative, got {self.prune_tolerance}")

    @classmethod
    def from_cfg(cls, cfg: DictConfig, structures: Optional[DictConfig] = None) -> "ExperimentConfig":
        """Reads the `experiment` node and instantiates every compensator under `structures`."""
        values = OmegaConf.to_container(cfg, resolve=True, throw_on_missing=True)
        values["output_dir"] = str(values["output_dir"])
        instantiated = {}
        if structures is not None:
            for name, structure_cfg in structures.items():
                instantiated[str(name)] = instantiate(structure_cfg)
        return cls(**values, structures=instantiated)

    @property
    def T(self) -> float:
        return 1.0 / self.f_symb

    @property
    def f_c(self) -> float:
        return self.M * self.f_symb

    @property
    def params(self) -> ModulationParams:
        return ModulationParams(T=self.T, M=self.M, L=self.L)

    @property
    def taus(self) -> Tuple[float, ...]:
        return tuple(fraction * self.T for fraction in self.tau_over_T)

    def distortion(self, delta: float) -> CtVolterraModel:
        """x - delta x(t - tau_1) x(t - tau_2) x(t - tau_3) with the delays snapped to the grid."""
        return snap_to_grid(CtVolterraModel.cubic_distortion(delta, self.taus), self.params)

    @property
    def output_path(self) -> Path:
        path = Path(self.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def seed_streams(self) -> Tuple[np.random.SeedSequence, np.random.SeedSequence]:
        """Independent (train, validate) seed streams."""
        train, validate = np.random.SeedSequence(self.seed).spawn(2)
        return train, validate
