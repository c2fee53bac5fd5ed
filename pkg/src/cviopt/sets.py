"""Euclidean projections and membership tests for the supported block sets.

Every feasible-set kind used by the problem builders is one of: a box,
the nonnegative orthant, the whole space, a Euclidean ball, or the
"balanced box" of a production/sales strategy (generation bounded per
node, sales nonnegative, total generation equal to total sales).  All
projections are exact; the balanced box uses a breakpoint search on the
scalar dual of its projection QP, so there is no iterative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONTAINS_TOL = 1e-9


class SetDescriptor:
    """Base for block feasible sets.  Subclasses are cheap immutable records."""

    dim: int
    is_bounded: bool = False

    def project(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, v: np.ndarray, tol: float = CONTAINS_TOL) -> bool:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        """A random point of the set (full-support probing for estimators)."""
        raise NotImplementedError

    def sample_batch(self, rng: np.random.Generator, m: int, scale: float = 1.0) -> np.ndarray:
        """(dim, m) array of independent samples; default loops over sample()."""
        return np.stack([self.sample(rng, scale) for _ in range(m)], axis=1)

    def project_batch(self, V: np.ndarray) -> np.ndarray:
        """Columnwise projection of a (dim, m) array; default loops."""
        return np.stack([self.project(V[:, j]) for j in range(V.shape[1])], axis=1)

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"vector shape {v.shape} does not match set dim {self.dim}")
        return v


@dataclass(frozen=True)
class WholeSpace(SetDescriptor):
    dim: int
    is_bounded = False

    def project(self, v):
        return self._check(v).copy()

    def contains(self, v, tol=CONTAINS_TOL):
        self._check(v)
        return True

    def sample(self, rng, scale=1.0):
        return scale * rng.standard_normal(self.dim)


@dataclass(frozen=True)
class NonnegOrthant(SetDescriptor):
    dim: int
    is_bounded = False

    def project(self, v):
        return np.maximum(self._check(v), 0.0)

    def contains(self, v, tol=CONTAINS_TOL):
        return bool(np.all(self._check(v) >= -tol))

    def sample(self, rng, scale=1.0):
        return scale * np.abs(rng.standard_normal(self.dim))


class Box(SetDescriptor):
    """Coordinatewise bounds; infinite entries allowed on either side."""

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=float).ravel()
        upper = np.asarray(upper, dtype=float).ravel()
        if lower.shape != upper.shape:
            raise ValueError("lower and upper must have equal length")
        if np.any(lower > upper):
            raise ValueError("infeasible box: lower > upper somewhere")
        self.lower = lower
        self.upper = upper
        self.dim = lower.size

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def project(self, v):
        return np.clip(self._check(v), self.lower, self.upper)

    def contains(self, v, tol=CONTAINS_TOL):
        v = self._check(v)
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))

    def sample(self, rng, scale=1.0):
        if not self.is_bounded:
            raise ValueError("cannot sample uniformly from an unbounded box")
        return self.lower + rng.random(self.dim) * (self.upper - self.lower)

    def sample_batch(self, rng, m, scale=1.0):
        if not self.is_bounded:
            raise ValueError("cannot sample uniformly from an unbounded box")
        return self.lower[:, None] + rng.random((self.dim, m)) * (self.upper - self.lower)[:, None]

    def project_batch(self, V):
        return np.clip(V, self.lower[:, None], self.upper[:, None])

    def __repr__(self):
        return f"Box(lower={self.lower!r}, upper={self.upper!r})"


class Ball(SetDescriptor):
    def __init__(self, center, radius: float):
        center = np.asarray(center, dtype=float).ravel()
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        self.center = center
        self.radius = float(radius)
        self.dim = center.size

    is_bounded = True

    def project(self, v):
        v = self._check(v)
        diff = v - self.center
        norm = float(np.linalg.norm(diff))
        if norm <= self.radius:
            return v.copy()
        return self.center + (self.radius / norm) * diff

    def contains(self, v, tol=CONTAINS_TOL):
        v = self._check(v)
        return bool(np.linalg.norm(v - self.center) <= self.radius + tol)

    def sample(self, rng, scale=1.0):
        u = rng.standard_normal(self.dim)
        u /= max(np.linalg.norm(u), 1e-300)
        return self.center + self.radius * rng.random() ** (1.0 / self.dim) * u

    def __repr__(self):
        return f"Ball(center={self.center!r}, radius={self.radius})"


class BalancedBox(SetDescriptor):
    """Strategy set {(y, s): sum(y) = sum(s), 0 <= y <= caps, s >= 0}.

    Layout is (y_1..y_J, s_1..s_J), so dim = 2J.  The origin is always
    feasible, hence the set is never empty.  Note s_j <= sum(caps) on the
    set, so it is bounded.
    """

    def __init__(self, caps):
        caps = np.asarray(caps, dtype=float).ravel()
        if caps.size == 0 or np.any(caps <= 0):
            raise ValueError("caps must be positive and nonempty")
        self.caps = caps
        self.J = caps.size
        self.dim = 2 * self.J

    is_bounded = True

    def project(self, v):
        v = self._check(v)
        y, s = project_balanced(self.caps, v[: self.J], v[self.J :])
        return np.concatenate([y, s])

    def contains(self, v, tol=CONTAINS_TOL):
        v = self._check(v)
        y, s = v[: self.J], v[self.J :]
        if np.any(y < -tol) or np.any(y > self.caps + tol) or np.any(s < -tol):
            return False
        return bool(abs(y.sum() - s.sum()) <= tol)

    def sample(self, rng, scale=1.0):
        # Uniform in the bounding boxes, then projected: full support on the set.
        y0 = rng.random(self.J) * self.caps
        s0 = rng.random(self.J) * self.caps.max()
        y, s = project_balanced(self.caps, y0, s0)
        return np.concatenate([y, s])

    def sample_batch(self, rng, m, scale=1.0):
        Y0 = rng.random((self.J, m)) * self.caps[:, None]
        S0 = rng.random((self.J, m)) * self.caps.max()
        Y, S = project_balanced_batch(self.caps, Y0, S0)
        return np.concatenate([Y, S], axis=0)

    def project_batch(self, V):
        Y, S = project_balanced_batch(self.caps, V[: self.J], V[self.J :])
        return np.concatenate([Y, S], axis=0)

    def __repr__(self):
        return f"BalancedBox(caps={self.caps!r})"


def project_balanced(caps, y0, s0) -> tuple[np.ndarray, np.ndarray]:
    """Exact projection of (y0, s0) onto the balanced box.

    The KKT system of  min ||y-y0||^2 + ||s-s0||^2  subject to
    sum(y) = sum(s), 0 <= y <= caps, s >= 0  reduces to a scalar equation:
    with multiplier lam for the balance constraint,

        y_j(lam) = clip(y0_j - lam, 0, caps_j),  s_j(lam) = max(s0_j + lam, 0),

    and g(lam) = sum(y(lam)) - sum(s(lam)) is continuous, piecewise linear
    and nonincreasing, with g(-inf) = sum(caps) > 0 and g(+inf) = -inf.
    The root is found by sorting the breakpoints and interpolating on the
    bracketing segment, which is exact up to rounding.
    """
    caps = np.asarray(caps, dtype=float).ravel()
    y0 = np.asarray(y0, dtype=float).ravel()
    s0 = np.asarray(s0, dtype=float).ravel()
    if not (caps.size == y0.size == s0.size):
        raise ValueError("caps, y0, s0 must have equal length")
    J = caps.size

    def g(lam):
        y = np.clip(y0 - lam, 0.0, caps)
        s = np.maximum(s0 + lam, 0.0)
        return y.sum() - s.sum()

    bps = np.unique(np.concatenate([y0, y0 - caps, -s0]))
    gv = np.array([g(b) for b in bps])
    below = np.nonzero(gv <= 0.0)[0]
    if below.size == 0:
        # Right of every breakpoint all caps are inactive and all s are
        # active, so g has slope exactly -J there.
        lam = bps[-1] + gv[-1] / J
    else:
        m = int(below[0])
        if gv[m] == 0.0 or m == 0:
            lam = bps[m]
        else:
            lam = bps[m - 1] + (bps[m] - bps[m - 1]) * gv[m - 1] / (gv[m - 1] - gv[m])
    y = np.clip(y0 - lam, 0.0, caps)
    s = np.maximum(s0 + lam, 0.0)
    # Piecewise-linear interpolation is exact; anything larger is a bug.
    assert abs(y.sum() - s.sum()) <= 1e-10 * (1.0 + caps.sum())
    return y, s


def project_balanced_batch(caps, Y0, S0) -> tuple[np.ndarray, np.ndarray]:
    """Columnwise :func:`project_balanced` for (J, m) inputs, vectorized."""
    caps = np.asarray(caps, dtype=float).ravel()
    Y0 = np.asarray(Y0, dtype=float)
    S0 = np.asarray(S0, dtype=float)
    J, m = Y0.shape
    B = np.sort(np.concatenate([Y0, Y0 - caps[:, None], -S0], axis=0), axis=0)  # (3J, m)
    Yc = np.clip(Y0[None, :, :] - B[:, None, :], 0.0, caps[None, :, None])
    Sc = np.maximum(S0[None, :, :] + B[:, None, :], 0.0)
    G = Yc.sum(axis=1) - Sc.sum(axis=1)  # (3J, m), nonincreasing down each column
    neg = G <= 0.0
    has = neg.any(axis=0)
    idx = np.where(has, neg.argmax(axis=0), 3 * J - 1)
    take = lambda M, ii: np.take_along_axis(M, ii[None, :], 0)[0]
    g_hi, b_hi = take(G, idx), take(B, idx)
    idx_lo = np.maximum(idx - 1, 0)
    g_lo, b_lo = take(G, idx_lo), take(B, idx_lo)
    denom = g_lo - g_hi
    safe = np.where(denom > 0.0, denom, 1.0)
    interp = b_lo + (b_hi - b_lo) * g_lo / safe
    lam_beyond = B[-1] + G[-1] / J  # slope is exactly -J right of all breakpoints
    lam = np.where(~has, lam_beyond, np.where((idx == 0) | (denom <= 0.0), b_hi, interp))
    Y = np.clip(Y0 - lam[None, :], 0.0, caps[:, None])
    S = np.maximum(S0 + lam[None, :], 0.0)
    return Y, S


def project(set_: SetDescriptor, v: np.ndarray) -> np.ndarray:
    return set_.project(v)


def contains(set_: SetDescriptor, v: np.ndarray, tol: float = CONTAINS_TOL) -> bool:
    return set_.contains(v, tol)


def project_all(sets, structure, x: np.ndarray) -> np.ndarray:
    """Blockwise projection of a full vector onto the product set."""
    x = structure.check_vector(x)
    out = np.empty_like(x)
    for i, s in enumerate(structure.slices):
        out[s] = sets[i].project(x[s])
    return out


def contains_all(sets, structure, x: np.ndarray, tol: float = CONTAINS_TOL) -> bool:
    x = structure.check_vector(x)
    return all(sets[i].contains(x[s], tol) for i, s in enumerate(structure.slices))
