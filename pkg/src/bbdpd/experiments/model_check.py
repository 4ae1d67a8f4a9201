import logging
from typing import Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from bbdpd.baseband.model import model_apply, model_from_ct
from bbdpd.chain.params import ModulationParams
from bbdpd.chain.passband import simulate_S
from bbdpd.chain.volterra import CtVolterraModel
from bbdpd.experiments.sources import gaussian_source
from bbdpd.signals.core import relative_error

pylogger = logging.getLogger(__name__)

MODEL_CHECK_COLUMNS = ["trial", "M", "L", "degree", "n_terms", "n_branches", "rel_error"]


def run_model_check(
    n_trials: int,
    carrier_ratios: Sequence[int],
    n_symbols: int,
    seed: int,
    L: int = 0,
    max_degree: int = 3,
    max_terms: int = 3,
    max_delay_symbols: int = 2,
    max_coefficient: float = 0.2,
) -> pd.DataFrame:
    """Compares the analytic baseband model with the oversampled oracle on random CT Volterra models.

    Trials cycle through `carrier_ratios`; L defaults to the smallest valid value 2M + 2 when left at 0.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for trial in tqdm(range(n_trials), desc="Model check"):
        M = int(carrier_ratios[trial % len(carrier_ratios)])
        p = ModulationParams(T=1.0, M=M, L=max(L, 2 * M + 2))
        F = CtVolterraModel.random(
            rng,
            p,
            max_degree=max_degree,
            max_terms=max_terms,
            max_delay_symbols=max_delay_symbols,
            max_coefficient=max_coefficient,
        )
        w = gaussian_source(n_symbols, rng)

        oracle = simulate_S(w, F, p)
        model = model_from_ct(F, p, n_symbols)
        error = relative_error(oracle, model_apply(model, w))

        rows.append(
            {
                "trial": trial,
                "M": M,
                "L": p.L,
                "degree": F.degree,
                "n_terms": len(F.terms),
                "n_branches": len(model),
                "rel_error": error,
            }
        )

    df = pd.DataFrame(rows, columns=MODEL_CHECK_COLUMNS)
    pylogger.info(f"Worst relative error over {n_trials} models: {df['rel_error'].max():.3e}")
    return df
