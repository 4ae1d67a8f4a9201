import itertools
import logging
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import comb

pylogger = logging.getLogger(__name__)


class ExponentPattern(NamedTuple):
    """prod_l i[n-l]^alpha_l * q[n-l]^beta_l over the lag window [-m1, m2]."""

    window: Tuple[int, int]
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.alpha) + sum(self.beta)

    @property
    def lags(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def describe(self) -> str:
        factors = []
        for channel, exponents in (("i", self.alpha), ("q", self.beta)):
            for lag, e in zip(self.lags, exponents):
                if e:
                    index = "n" if lag == 0 else (f"n-{lag}" if lag > 0 else f"n+{-lag}")
                    factors.append(f"{channel}[{index}]" + (f"^{e}" if e > 1 else ""))
        return " ".join(factors) if factors else "1"


def basis_size(m1: int, m2: int, d: int) -> int:
    """C(2(m1+m2+1)+d, d): monomials of total degree <= d in the i and q samples of the window."""
    return int(comb(2 * (m1 + m2 + 1) + d, d, exact=True))


def volterra_monomial_count(n_lags: int, degree: int, with_linear: bool = True) -> int:
    """Monomials of exactly `degree` over n_lags delayed samples, plus the single linear term if asked.

    101 lags at degree 5 with the linear term gives 1 + C(105, 5) = 96,560,647.
    """
    return int(comb(n_lags + degree - 1, degree, exact=True)) + (1 if with_linear else 0)


def enumerate_basis(m1: int, m2: int, d: int) -> List[ExponentPattern]:
    """All exponent patterns of total degree <= d, in graded-lex order, starting with the constant."""
    if m1 < 0 or m2 < 0:
        raise ValueError(f"Memory depths must be non-negative, got m1={m1}, m2={m2}")
    if d < 1:
        raise ValueError(f"Degree must be at least 1, got {d}")

    n_lags = m1 + m2 + 1
    n_variables = 2 * n_lags
    window = (-m1, m2)

    patterns = []
    for degree in range(d + 1):
        for variables in itertools.combinations_with_replacement(range(n_variables), degree):
            exponents = np.bincount(np.asarray(variables, dtype=np.int64), minlength=n_variables)
            patterns.append(
                ExponentPattern(
                    window=window,
                    alpha=tuple(int(e) for e in exponents[:n_lags]),
                    beta=tuple(int(e) for e in exponents[n_lags:]),
                )
            )

    assert len(patterns) == basis_size(m1, m2, d)
    return patterns


def evaluate_patterns(i: np.ndarray, q: np.ndarray, patterns: Sequence[ExponentPattern]) -> np.ndarray:
    """Real matrix with one column per pattern, circular lags on the frame."""
    n = i.size
    if not patterns:
        return np.zeros((n, 0))

    window = patterns[0].window
    if any(pattern.window != window for pattern in patterns):
        raise ValueError("All patterns of one block must share the lag window")

    lags = range(window[0], window[1] + 1)
    variables = [np.roll(i, lag) for lag in lags] + [np.roll(q, lag) for lag in lags]
    max_degree = max(pattern.degree for pattern in patterns)

    # powers[v][e] = variables[v] ** e
    powers = [[np.ones(n)] for _ in variables]
    for v, values in enumerate(variables):
        for _ in range(max_degree):
            powers[v].append(powers[v][-1] * values)

    X = np.empty((n, len(patterns)))
    for column, pattern in enumerate(patterns):
        product = np.ones(n)
        for v, exponent in enumerate(pattern.alpha + pattern.beta):
            if exponent:
                product = product * powers[v][exponent]
        X[:, column] = product
    return X
