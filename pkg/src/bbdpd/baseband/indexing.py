import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bbdpd.chain.volterra import GRID_TOLERANCE, OffGridDelayError

pylogger = logging.getLogger(__name__)

SignVector = Tuple[int, ...]

# m_i = 1, 2 pick the real channel, 3, 4 the imaginary one; 1, 3 take the previous symbol
COSINE_CLASSES = (1, 2)
SINE_CLASSES = (3, 4)
PREVIOUS_SYMBOL_CLASSES = (1, 3)


@dataclass(frozen=True)
class MIndex:
    """A class vector m in {1,2,3,4}^d together with its partition S^1..S^4 (0-based positions)."""

    m: Tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(entry) for entry in self.m)
        if len(m) < 1:
            raise ValueError("m must have at least one entry")
        bad = [entry for entry in m if entry not in (1, 2, 3, 4)]
        if bad:
            raise ValueError(f"m entries must be in {{1,2,3,4}}, got {bad}")
        object.__setattr__(self, "m", m)

    @property
    def d(self) -> int:
        return len(self.m)

    def positions(self, cls: int) -> Tuple[int, ...]:
        return tuple(i for i, entry in enumerate(self.m) if entry == cls)

    @property
    def s1(self) -> Tuple[int, ...]:
        return self.positions(1)

    @property
    def s2(self) -> Tuple[int, ...]:
        return self.positions(2)

    @property
    def s3(self) -> Tuple[int, ...]:
        return self.positions(3)

    @property
    def s4(self) -> Tuple[int, ...]:
        return self.positions(4)

    @property
    def cosine_positions(self) -> Tuple[int, ...]:
        """Sorted S^1 u S^2, the coordinates kept by the first projection."""
        return tuple(i for i, entry in enumerate(self.m) if entry in COSINE_CLASSES)

    @property
    def sine_positions(self) -> Tuple[int, ...]:
        return tuple(i for i, entry in enumerate(self.m) if entry in SINE_CLASSES)

    @property
    def n1(self) -> int:
        return len(self.cosine_positions)

    @property
    def n2(self) -> int:
        return len(self.sine_positions)

    def project(self, x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x)
        if x.shape != (self.d,):
            raise ValueError(f"Cannot project a vector of shape {x.shape} with a degree-{self.d} index")
        return x[list(self.cosine_positions)], x[list(self.sine_positions)]

    def sign_sets(self) -> Tuple[List[SignVector], List[SignVector]]:
        """R^c = {-1,1}^N1 and R^s = {-1,1}^N2 in a fixed order."""
        return sign_vectors(self.n1), sign_vectors(self.n2)

    def __str__(self) -> str:
        return "".join(str(entry) for entry in self.m)


def classify(m: Sequence[int]) -> MIndex:
    return MIndex(tuple(m))


def all_mindices(d: int) -> List[MIndex]:
    """The 4^d class vectors of degree d, in lexicographic order."""
    return [MIndex(m) for m in itertools.product((1, 2, 3, 4), repeat=d)]


def sign_vectors(n: int) -> List[SignVector]:
    return list(itertools.product((1, -1), repeat=n))


def sigma_tilde(r: Sequence[int]) -> int:
    return int(sum(r))


def sigma(r: Sequence[int]) -> int:
    return sigma_tilde(r) - 1


@dataclass(frozen=True)
class DelaySplit:
    """tau = k T + tau', with 0 <= tau' < T.

    When the split is taken on an oversampled grid, `offsets` holds tau' in grid samples.
    """

    tau: Tuple[float, ...]
    k: Tuple[int, ...]
    tau_prime: Tuple[float, ...]
    offsets: Optional[Tuple[int, ...]] = None

    @property
    def d(self) -> int:
        return len(self.tau)


def split_delays(tau: Sequence[float], T: float, oversample_factor: Optional[int] = None) -> DelaySplit:
    """Splits delays into whole symbols and a remainder in [0, T).

    Args:
        tau: delays in seconds
        T: symbol interval
        oversample_factor: when given, delays must lie on the T/L grid and the split is exact in samples

    Returns:
        the DelaySplit of `tau`
    """
    tau = tuple(float(t) for t in tau)
    if any(not np.isfinite(t) or t < 0 for t in tau):
        raise ValueError(f"Delays must be finite and non-negative, got {tau}")

    if oversample_factor is not None:
        L = int(oversample_factor)
        samples = []
        for t in tau:
            exact = t * L / T
            rounded = int(round(exact))
            if abs(exact - rounded) > GRID_TOLERANCE * max(1.0, exact):
                raise OffGridDelayError(t, abs(exact - rounded))
            samples.append(rounded)
        k = tuple(a // L for a in samples)
        offsets = tuple(a % L for a in samples)
        tau_prime = tuple(a * T / L for a in offsets)
        return DelaySplit(tau=tau, k=k, tau_prime=tau_prime, offsets=offsets)

    k = []
    tau_prime = []
    for t in tau:
        ratio = t / T
        nearest = round(ratio)
        if abs(ratio - nearest) <= GRID_TOLERANCE:
            k.append(int(nearest))
            tau_prime.append(0.0)
        else:
            whole = int(np.floor(ratio))
            k.append(whole)
            tau_prime.append(t - whole * T)
    return DelaySplit(tau=tau, k=tuple(k), tau_prime=tuple(tau_prime))
