"""Per-task random streams that do not depend on scheduling order."""
from __future__ import annotations

import numpy as np


def cell_rng(base_seed: int, *index: int) -> np.random.Generator:
    """Independent generator for the grid cell (or replication) ``index``.

    The stream is a pure function of ``(base_seed, index)``, so results are the
    same whether cells run serially or in any number of worker processes.
    """
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFFFFFFFFFF, *map(int, index)])
    return np.random.Generator(np.random.PCG64(ss))
