from __future__ import annotations

import numpy as np

from ..core import ResidueProfile, Subset


def poisson_sample(p: ResidueProfile, rng=None) -> Subset:
    """Independent Bernoulli(p_i) inclusion for every party; the size is random.

    Not a rounding rule; audits use it as a simulation cross-check of the
    Poisson-trial quantities.
    """
    rng = np.random.default_rng(rng)
    values = np.array([float(x) for x in p.residues])
    hits = rng.random(len(values)) < values
    return tuple(int(i) + 1 for i in np.flatnonzero(hits))


def poisson_sample_sizes(p: ResidueProfile, size: int, rng=None) -> np.ndarray:
    """Sizes |B| of ``size`` independent Poisson trials."""
    rng = np.random.default_rng(rng)
    values = np.array([float(x) for x in p.residues])
    return (rng.random((size, len(values))) < values).sum(axis=1)
