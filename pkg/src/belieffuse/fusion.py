"""Backend dispatch and left-to-right folding of several sources."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuits import run_fusion
from .evidence import CBBA, EXACT, Backend, FusionResult, Mode, combine_cdrc, combine_drc

CLI_BACKENDS = {
    "classical": Backend.CLASSICAL_DRC,
    "cdrc": Backend.CLASSICAL_CDRC,
    "qadrc": Backend.QADRC,
    "qdrc": Backend.QDRC,
}


def combine(m1: CBBA, m2: CBBA, backend: Backend | str, mode: Mode = EXACT) -> FusionResult:
    backend = Backend(CLI_BACKENDS.get(backend, backend))
    if backend is Backend.CLASSICAL_DRC:
        return combine_drc(m1, m2)
    if backend is Backend.CLASSICAL_CDRC:
        return combine_cdrc(m1, m2)
    return run_fusion(m1, m2, backend, mode)


def step_mode(mode: Mode, step: int) -> Mode:
    """Mode for fold step ``step``; shot seeds after the first are derived from the master seed."""
    if mode.exact or step == 0:
        return mode
    seed = int(np.random.SeedSequence([mode.seed, step]).generate_state(1)[0])
    return Mode(mode.shots, seed)


def fold(sources: Sequence[CBBA], backend: Backend | str, mode: Mode = EXACT) -> FusionResult:
    """Pairwise left fold in the given order.

    The reported conflict is the overall one, ``1 - prod(1 - K_i)``.
    """
    if len(sources) < 2:
        raise ValueError(f"need at least two sources to combine, got {len(sources)}")
    acc = sources[0]
    kept = 1.0
    result = None
    for step, nxt in enumerate(sources[1:]):
        result = combine(acc, nxt, backend, step_mode(mode, step))
        kept *= 1.0 - result.conflict
        acc = result.combined
    return FusionResult(result.combined, 1.0 - kept, result.backend, mode)
