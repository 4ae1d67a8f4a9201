import logging
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from bbdpd.chain.params import ModulationParams
from bbdpd.signals.core import CtSignal

pylogger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-9


class OffGridDelayError(ValueError):
    def __init__(self, delay: float, residual: float):
        super().__init__(
            f"Delay {delay:.6e} s is {residual:.3e} samples away from the sampling grid; snap it with snap_to_grid"
        )
        self.delay = delay
        self.residual = residual


def delay_in_samples(tau: float, sample_rate: float) -> int:
    """Integer grid delay of `tau`, raising OffGridDelayError when it falls between samples."""
    exact = tau * sample_rate
    rounded = int(round(exact))
    residual = abs(exact - rounded)
    if residual > GRID_TOLERANCE * max(1.0, abs(exact)):
        raise OffGridDelayError(tau, residual)
    return rounded


class VolterraTerm(NamedTuple):
    coefficient: float
    delays: Tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.delays)


@dataclass(frozen=True)
class CtVolterraModel:
    """y(t) = b0 + sum_k b_k prod_i x(t - t_{k,i})."""

    b0: float = 0.0
    terms: Tuple[VolterraTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(VolterraTerm(float(b), tuple(float(t) for t in delays)) for b, delays in self.terms)
        for term in terms:
            if term.degree < 1:
                raise ValueError("Every Volterra term needs degree >= 1; put constants in b0")
            if not np.isfinite(term.coefficient):
                raise ValueError(f"Non-finite coefficient {term.coefficient}")
            if any(not np.isfinite(t) or t < 0 for t in term.delays):
                raise ValueError(f"Delays must be finite and non-negative, got {term.delays}")
        object.__setattr__(self, "b0", float(self.b0))
        object.__setattr__(self, "terms", terms)

    @property
    def degree(self) -> int:
        return max((term.degree for term in self.terms), default=0)

    @property
    def depth(self) -> float:
        return max((max(term.delays) for term in self.terms), default=0.0)

    @classmethod
    def identity(cls) -> "CtVolterraModel":
        return cls(terms=(VolterraTerm(1.0, (0.0,)),))

    @classmethod
    def cubic_distortion(cls, delta: float, taus: Sequence[float]) -> "CtVolterraModel":
        """y = x - delta * x(t - tau_1) x(t - tau_2) x(t - tau_3)."""
        return cls(terms=(VolterraTerm(1.0, (0.0,)), VolterraTerm(-delta, tuple(taus))))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        p: ModulationParams,
        max_degree: int = 3,
        max_terms: int = 3,
        max_delay_symbols: int = 2,
        max_coefficient: float = 0.2,
    ) -> "CtVolterraModel":
        """Random on-grid model; the first term is always linear so the in-band output never vanishes."""
        n_terms = int(rng.integers(1, max_terms + 1))
        terms = []
        for term_index in range(n_terms):
            degree = 1 if term_index == 0 else int(rng.integers(1, max_degree + 1))
            delays = rng.integers(0, max_delay_symbols * p.L, size=degree) * p.dt
            coefficient = rng.uniform(-max_coefficient, max_coefficient)
            terms.append(VolterraTerm(coefficient, tuple(delays)))
        return cls(terms=tuple(terms))


def snap_to_grid(F: CtVolterraModel, p: ModulationParams) -> CtVolterraModel:
    worst = 0.0
    terms = []
    for term in F.terms:
        exact = np.asarray(term.delays) / p.dt
        snapped = np.round(exact)
        worst = max(worst, float(np.max(np.abs(exact - snapped))))
        terms.append(VolterraTerm(term.coefficient, tuple(snapped * p.dt)))

    if worst > GRID_TOLERANCE:
        pylogger.warning(f"Snapped delays to the {p.L}x grid, worst snapping error {worst:.3e} samples")
    else:
        pylogger.info(f"Delays already on the {p.L}x grid (worst error {worst:.1e} samples)")

    return CtVolterraModel(b0=F.b0, terms=tuple(terms))


def ct_volterra(x: CtSignal, F: CtVolterraModel, p: Optional[ModulationParams] = None) -> CtSignal:
    """Applies F sample-wise with circular delays on the periodic frame."""
    sample_rate = p.sample_rate if p is not None else x.sample_rate
    shifted: Dict[int, np.ndarray] = {}

    def delayed(tau: float) -> np.ndarray:
        shift = delay_in_samples(tau, sample_rate)
        if shift not in shifted:
            shifted[shift] = np.roll(x.samples, shift)
        return shifted[shift]

    y = np.full(x.samples.shape, F.b0, dtype=x.samples.dtype)
    for term in F.terms:
        product = term.coefficient * delayed(term.delays[0])
        for tau in term.delays[1:]:
            product = product * delayed(tau)
        y = y + product

    return x.with_samples(y)

