import logging
from dataclasses import dataclass

import numpy as np

pylogger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModulationParams:
    """Symbol period T, carrier ratio M (w_c = 2 pi M / T) and oversampling factor L of the CT grid."""

    T: float
    M: int
    L: int

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0:
            raise ValueError(f"Symbol interval must be positive, got T={self.T}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"Carrier ratio M must be a positive integer, got {self.M}")
        if int(self.L) != self.L or self.L < 2 * self.M + 2:
            raise ValueError(
                f"Oversample factor L={self.L} too small for M={self.M}: the grid must cover w_c + w_b (L >= 2M+2)"
            )
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "L", int(self.L))

    @classmethod
    def from_rates(cls, f_symb: float, f_c: float, L: int) -> "ModulationParams":
        ratio = f_c / f_symb
        M = int(round(ratio))
        if not np.isclose(ratio, M, rtol=0, atol=1e-9):
            raise ValueError(f"Carrier {f_c} Hz is not an integer multiple of the symbol rate {f_symb} Hz")
        return cls(T=1.0 / f_symb, M=M, L=L)

    @property
    def symbol_rate(self) -> float:
        return 1.0 / self.T

    @property
    def sample_rate(self) -> float:
        return self.L / self.T

    @property
    def dt(self) -> float:
        return self.T / self.L

    @property
    def omega_c(self) -> float:
        return 2 * np.pi * self.M / self.T

    @property
    def omega_b(self) -> float:
        return np.pi / self.T

    @property
    def theta(self) -> float:
        return 4 * np.pi * self.M

    def grid_length(self, n_symbols: int) -> int:
        return self.L * n_symbols

    def carrier_bin(self, n_symbols: int) -> int:
        """CT DFT bin of the carrier on a frame of n_symbols symbols."""
        return self.M * n_symbols

    def carrier(self, n_symbols: int) -> np.ndarray:
        """exp(j w_c t) on the grid; the phase is reduced modulo 2 pi in integer arithmetic."""
        s = np.arange(self.grid_length(n_symbols), dtype=np.int64)
        return np.exp(2j * np.pi * ((self.M * s) % self.L) / self.L)
