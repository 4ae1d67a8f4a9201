import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.fft

from bbdpd.chain.passband import PassbandChain
from bbdpd.dpd.basis import ExponentPattern, enumerate_basis, evaluate_patterns
from bbdpd.signals.core import DtSignal, FreqResponse, centered_bins

pylogger = logging.getLogger(__name__)

# (block index, pattern) of every regressor column
ColumnDescriptor = Tuple[int, ExponentPattern]


def polynomial_filter(j: int, n: int) -> FreqResponse:
    """H_j on Omega in [-pi, pi): (j Omega)^j for odd j, Omega^j for even j.

    At the Nyquist bin of an even-length grid only the real part is kept, so real columns stay real.
    """
    if j < 0:
        raise ValueError(f"Filter order must be non-negative, got {j}")
    k = centered_bins(n)
    omega = 2 * np.pi * k / n
    values = (1j * omega) ** j if j % 2 else (omega**j).astype(np.complex128)
    if n % 2 == 0:
        nyquist = np.flatnonzero(k == -n // 2)
        values[nyquist] = values[nyquist].real
    return FreqResponse(values)


class CompensatorStructure:
    is_fitted = True

    def __init__(self, name: str):
        self.name = name

    @property
    def columns(self) -> List[ColumnDescriptor]:
        return []

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def n_coeffs(self) -> int:
        # one coefficient vector for the real and one for the imaginary part
        return 2 * self.n_columns

    def regressor_matrix(self, w: DtSignal) -> np.ndarray:
        raise NotImplementedError

    def apply(self, w: DtSignal, coefficients_re: np.ndarray, coefficients_im: np.ndarray) -> DtSignal:
        X = self.regressor_matrix(w)
        return w.with_samples(X @ coefficients_re + 1j * (X @ coefficients_im))

    def params(self) -> Dict[str, Any]:
        return {}

    def describe(self) -> Dict[str, Any]:
        """Hydra-instantiable descriptor of the structure."""
        cls = type(self)
        return {"_target_": f"{cls.__module__}.{cls.__qualname__}", "name": self.name, **self.params()}

    def __repr__(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self.params().items())
        return f"{type(self).__name__}({self.name!r}{', ' if params else ''}{params})"


class NoCompensation(CompensatorStructure):
    is_fitted = False

    def apply(self, w: DtSignal, coefficients_re: np.ndarray, coefficients_im: np.ndarray) -> DtSignal:
        return w


class PlainVolterra(CompensatorStructure):
    """sum_k c_k prod_{l=-m1}^{m2} i[n-l]^alpha_l(k) q[n-l]^beta_l(k), total degree <= d."""

    def __init__(self, name: str, m1: int, m2: int, degree: int):
        super().__init__(name)
        self.m1 = m1
        self.m2 = m2
        self.degree = degree
        self.patterns = enumerate_basis(m1, m2, degree)

    @property
    def columns(self) -> List[ColumnDescriptor]:
        return [(0, pattern) for pattern in self.patterns]

    def regressor_matrix(self, w: DtSignal) -> np.ndarray:
        X = evaluate_patterns(w.i, w.q, self.patterns)
        _warn_if_underdetermined(self, X)
        return X

    def params(self) -> Dict[str, Any]:
        return {"m1": self.m1, "m2": self.m2, "degree": self.degree}


class ProposedLV(CompensatorStructure):
    """sum_j H_j V_j w: Volterra blocks V_0..V_p of memory m and degree d, each post-filtered by H_j."""

    def __init__(self, name: str, memory: int = 1, degree: int = 3, poly_order: int = 2):
        super().__init__(name)
        if poly_order < 0:
            raise ValueError(f"poly_order must be non-negative, got {poly_order}")
        self.memory = memory
        self.degree = degree
        self.poly_order = poly_order
        self.patterns = enumerate_basis(0, memory, degree)

    @property
    def columns(self) -> List[ColumnDescriptor]:
        return [(j, pattern) for j in range(self.poly_order + 1) for pattern in self.patterns]

    def regressor_matrix(self, w: DtSignal) -> np.ndarray:
        V = evaluate_patterns(w.i, w.q, self.patterns)
        V_spectrum = scipy.fft.fft(V, axis=0)

        blocks = [V]
        for j in range(1, self.poly_order + 1):
            H = polynomial_filter(j, len(w)).values
            blocks.append(scipy.fft.ifft(H[:, None] * V_spectrum, axis=0).real)

        X = np.concatenate(blocks, axis=1)
        _warn_if_underdetermined(self, X)
        return X

    def params(self) -> Dict[str, Any]:
        return {"memory": self.memory, "degree": self.degree, "poly_order": self.poly_order}


class IdealOracle(CompensatorStructure):
    """C = 2I - S, evaluated through the passband oracle."""

    is_fitted = False

    def __init__(self, name: str, chain: Optional[PassbandChain] = None):
        super().__init__(name)
        self.chain = chain

    def bind(self, chain: PassbandChain) -> "IdealOracle":
        return IdealOracle(self.name, chain=chain)

    def apply(self, w: DtSignal, coefficients_re: np.ndarray, coefficients_im: np.ndarray) -> DtSignal:
        if self.chain is None:
            raise ValueError(f"Oracle compensator {self.name!r} is not bound to a passband chain")
        return w.with_samples(2 * w.samples - self.chain(w).samples)


def _warn_if_underdetermined(structure: CompensatorStructure, X: np.ndarray) -> None:
    if X.shape[0] < X.shape[1]:
        pylogger.warning(
            f"{structure.name}: {X.shape[0]} samples for {X.shape[1]} regressors, the fit is under-determined"
        )


def regressor_matrix(w: DtSignal, structure: CompensatorStructure) -> np.ndarray:
    return structure.regressor_matrix(w)
