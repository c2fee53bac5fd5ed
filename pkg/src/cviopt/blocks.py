"""Block-structured vectors, sampling, and weighted-average bookkeeping.

A decision vector x in R^n is partitioned into d contiguous blocks
x = (x^(1); ...; x^(d)).  Every solver in this package updates one randomly
sampled block per step, so the block layout, the sampling distribution and
the running weighted average of iterates all live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BlockStructure:
    """Cartesian decomposition of R^n into d blocks with sampling weights.

    dims[i] is the dimension of block i; probs[i] is the probability that
    block i is drawn at a step.  Probabilities must be strictly positive
    and sum to one.
    """

    dims: tuple[int, ...]
    probs: tuple[float, ...]
    slices: tuple[slice, ...] = field(init=False, repr=False)

    def __init__(self, dims, probs=None):
        dims = tuple(int(m) for m in dims)
        if len(dims) == 0:
            raise ValueError("need at least one block")
        if any(m < 1 for m in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        if probs is None:
            probs = tuple(1.0 / len(dims) for _ in dims)
        else:
            probs = tuple(float(p) for p in probs)
        if len(probs) != len(dims):
            raise ValueError("dims and probs must have equal length")
        if any(p <= 0.0 for p in probs):
            raise ValueError(f"sampling probabilities must be > 0, got {probs}")
        if abs(sum(probs) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"sampling probabilities must sum to 1, got {sum(probs)!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "probs", probs)
        offsets = np.concatenate(([0], np.cumsum(dims)))
        object.__setattr__(
            self, "slices", tuple(slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:]))
        )

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return sum(self.dims)

    @property
    def p_min(self) -> float:
        return min(self.probs)

    @property
    def p_max(self) -> float:
        return max(self.probs)

    def block(self, x: np.ndarray, i: int) -> np.ndarray:
        """View of block i of a flat vector (no copy)."""
        return x[self.slices[i]]

    def split(self, x: np.ndarray) -> list[np.ndarray]:
        return [x[s] for s in self.slices]

    def assemble(self, parts) -> np.ndarray:
        out = np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts])
        if out.size != self.n:
            raise ValueError(f"assembled length {out.size} != structure dimension {self.n}")
        return out

    def check_vector(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"vector shape {x.shape} does not match structure (n={self.n})")
        return x

    def cumulative_probs(self) -> np.ndarray:
        return np.cumsum(self.probs)


def sample_block(structure: BlockStructure, rng: np.random.Generator) -> int:
    """Draw a block index from the structure's distribution (inverse CDF)."""
    u = rng.random()
    return int(np.searchsorted(structure.cumulative_probs(), u, side="right").clip(max=structure.d - 1))


def sample_blocks(structure: BlockStructure, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized i.i.d. block draws; same stream semantics as sample_block."""
    u = rng.random(size)
    idx = np.searchsorted(structure.cumulative_probs(), u, side="right")
    return np.minimum(idx, structure.d - 1).astype(np.int64)


def block_distance(structure: BlockStructure, x: np.ndarray, y: np.ndarray) -> float:
    """Probability-weighted squared distance sum_i ||x_i - y_i||^2 / p_i.

    Sandwiched between ||x-y||^2 / p_max and ||x-y||^2 / p_min.
    """
    x = structure.check_vector(x)
    y = structure.check_vector(y)
    diff = x - y
    total = 0.0
    for s, p in zip(structure.slices, structure.probs):
        seg = diff[s]
        total += float(seg @ seg) / p
    return total


@dataclass
class SolverState:
    """Mutable per-run state: iterate, weighted average, and bookkeeping.

    The average satisfies xbar_k = sum_j w_j x_j / S_k where w_j is the
    j-th step size raised to the averaging exponent and S_k = sum_j w_j.
    """

    k: int
    x: np.ndarray
    xbar: np.ndarray
    S: float
    rng: np.random.Generator
    evals: int = 0


def make_state(x0: np.ndarray, gamma0: float, r: float, rng: np.random.Generator) -> SolverState:
    x0 = np.asarray(x0, dtype=float)
    return SolverState(k=0, x=x0.copy(), xbar=x0.copy(), S=float(gamma0) ** r, rng=rng, evals=0)


def update_average(state: SolverState, x_next: np.ndarray, gamma_next: float, r: float) -> SolverState:
    """Fold x_{k+1} into the running weighted average with weight gamma_{k+1}^r."""
    w = float(gamma_next) ** r
    state.S += w
    state.xbar += (w / state.S) * (x_next - state.xbar)
    state.x = x_next
    state.k += 1
    return state


def weighted_average(xs, gammas, r: float) -> np.ndarray:
    """Closed-form average sum_k gamma_k^r x_k / sum_k gamma_k^r (reference path)."""
    xs = [np.asarray(x, dtype=float) for x in xs]
    w = np.asarray([float(g) ** r for g in gammas])
    if len(xs) != w.size:
        raise ValueError("need one weight per iterate")
    acc = np.zeros_like(xs[0])
    for wi, xi in zip(w, xs):
        acc += wi * xi
    return acc / w.sum()
