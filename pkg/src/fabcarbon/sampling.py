"""Seeded sampling from grid distributions.

Draws are inverse-CDF transforms of the deterministic uniform substreams in
:mod:`fabcarbon.rng`, so a :class:`SampleSet` is a pure function of
``(distribution, n, seed)``: rerunning reproduces it bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .rng import substream_uniforms

#: Substream name used by :func:`sample`; a fixed tag keeps the contract that
#: identical (distribution, n, seed) always reproduce identical values.
SAMPLE_STREAM = "sample"


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Immutable Monte Carlo sample with its generating seed and a label."""

    values: np.ndarray
    seed: int
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValidationError("SampleSet needs a non-empty 1-D array")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def sample(dist, n: int, seed: int, label: str = "") -> SampleSet:
    """Draw ``n`` inverse-CDF samples from ``dist`` (anything with ``.ppf``).

    ``label`` is carried as metadata only; it does not enter the random
    stream, so the draw depends exactly on (dist, n, seed).
    """
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    u = substream_uniforms(seed, SAMPLE_STREAM, n)
    return SampleSet(values=dist.ppf(u), seed=seed, label=label)
