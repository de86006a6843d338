"""Lattice points, model parameters and hyperoctahedral orbit bookkeeping."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ModelParams",
    "ParameterError",
    "as_point",
    "as_points",
    "euclidean_norm",
    "max_norm",
    "orbit_key",
    "orbit_representatives",
    "orbit_sizes",
]


class ParameterError(ValueError):
    """A model or kernel parameter outside its admissible range."""


@dataclass(frozen=True)
class ModelParams:
    """Dimension ``d`` and fractional order ``sigma`` of the operator.

    ``sigma`` lies in (0, 1]; for d = 1, 2 it must also be below d/2 so that
    the lattice is transient for the fractional Laplacian.
    """

    d: int
    sigma: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d!r}")
        if not 0.0 < self.sigma <= 1.0:
            raise ParameterError(f"sigma must lie in (0, 1], got {self.sigma!r}")
        if self.d in (1, 2) and not self.sigma < self.d / 2.0:
            raise ParameterError(
                f"for d = {self.d} sigma must be below d/2 = {self.d / 2}, got {self.sigma!r}"
            )

    @property
    def alpha0(self) -> float:
        """Threshold (d/2 + sigma)/2 of the Hardy weight family."""
        return (self.d / 2.0 + self.sigma) / 2.0


def as_point(x, d: int | None = None) -> tuple[int, ...]:
    """Coerce ``x`` (int or sequence of ints) to a tuple of ints."""
    if isinstance(x, (int, np.integer)):
        pt = (int(x),)
    else:
        pt = tuple(int(c) for c in x)
        if any(int(c) != c for c in x):
            raise ParameterError(f"lattice point must have integer coordinates, got {x!r}")
    if not pt:
        raise ParameterError("lattice point must have at least one coordinate")
    if d is not None and len(pt) != d:
        raise ParameterError(f"expected a point in Z^{d}, got {pt!r}")
    return pt


def as_points(xs, d: int | None = None) -> np.ndarray:
    """Coerce a collection of points to an integer array of shape (n, d)."""
    arr = np.asarray(xs)
    if arr.ndim == 1:
        arr = arr[None, :] if d is None or arr.size == d else arr[:, None]
    if arr.ndim != 2:
        raise ParameterError(f"points must form a 2-D array, got shape {arr.shape}")
    out = arr.astype(np.int64)
    if not np.array_equal(out, arr):
        raise ParameterError("lattice points must have integer coordinates")
    if d is not None and out.shape[1] != d:
        raise ParameterError(f"expected points in Z^{d}, got dimension {out.shape[1]}")
    return out


def euclidean_norm(x) -> float:
    return math.sqrt(sum(int(c) * int(c) for c in as_point(x)))


def max_norm(x) -> int:
    return max(abs(int(c)) for c in as_point(x))


def orbit_key(x) -> tuple[int, ...]:
    """Canonical representative under signed coordinate permutations."""
    return tuple(sorted((abs(int(c)) for c in as_point(x)), reverse=True))


def orbit_representatives(d: int, radius: int) -> np.ndarray:
    """All tuples radius >= a_1 >= ... >= a_d >= 0, as an (n, d) array."""
    combos = itertools.combinations_with_replacement(range(radius, -1, -1), d)
    reps = np.fromiter(itertools.chain.from_iterable(combos), dtype=np.int64)
    return reps.reshape(-1, d)


def orbit_sizes(reps: np.ndarray) -> np.ndarray:
    """Number of lattice points in the orbit of each canonical representative."""
    reps = np.asarray(reps, dtype=np.int64)
    n, d = reps.shape
    sizes = np.full(n, math.factorial(d), dtype=np.int64)
    # divide by the factorials of runs of equal coordinates
    run = np.ones(n, dtype=np.int64)
    for j in range(1, d):
        same = reps[:, j] == reps[:, j - 1]
        run = np.where(same, run + 1, 1)
        sizes //= np.where(same, run, 1)
    nonzero = np.count_nonzero(reps, axis=1)
    return sizes * (2**nonzero)


def signed_permutations(x: Sequence[int]) -> Iterable[tuple[int, ...]]:
    """Every image of ``x`` under the hyperoctahedral group (with repeats)."""
    for perm in itertools.permutations(x):
        for signs in itertools.product((1, -1), repeat=len(x)):
            yield tuple(s * c for s, c in zip(signs, perm))
