"""Random mass functions for tests, benchmarks and experiment scripts."""
from __future__ import annotations

import numpy as np

from .evidence import BBA, CBBA, Frame


def random_bba(frame: Frame, rng: np.random.Generator, n_focal: int | None = None) -> BBA:
    """Dirichlet masses on ``n_focal`` distinct random non-empty subsets (all of them by default)."""
    n_subsets = frame.full
    if n_focal is None:
        n_focal = n_subsets
    focal = np.sort(rng.choice(np.arange(1, n_subsets + 1), size=n_focal, replace=False))
    masses = rng.dirichlet(np.ones(n_focal))
    return BBA(frame, {int(k): float(v) for k, v in zip(focal, masses)})


def random_cbba(
    frame: Frame, rng: np.random.Generator, n_focal: int | None = None, spread: float = 0.3
) -> CBBA:
    """Complex masses summing to 1+0i with every modulus <= 1.

    Real parts are Dirichlet; imaginary parts are zero-mean noise of width ``spread``.
    """
    n_subsets = frame.full
    if n_focal is None:
        n_focal = int(rng.integers(2, n_subsets + 1)) if n_subsets > 1 else 1
    while True:
        focal = np.sort(rng.choice(np.arange(1, n_subsets + 1), size=n_focal, replace=False))
        re = rng.dirichlet(np.ones(n_focal))
        im = rng.uniform(-spread, spread, n_focal)
        im -= im.mean()
        im[-1] = -im[:-1].sum()
        values = re + 1j * im
        if np.all(np.abs(values) <= 1.0):
            return CBBA(frame, {int(k): complex(v) for k, v in zip(focal, values)})


def frame_of_size(n: int) -> Frame:
    names = "abcdefghijklmnopqrstuvwxyz"
    return Frame(tuple(names[:n]) if n <= len(names) else tuple(f"h{k}" for k in range(n)))
