"""Problem model and constructors for every supported problem family.

A problem bundles the Cartesian block structure, one feasible set per
block, a monotone mapping F evaluated blockwise, a convex objective f
with a (sub)gradient, and whatever constants and reference solutions are
known for it.  All evaluators are deterministic functions of x; gradient
information is supplied analytically by the builders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .blocks import BlockStructure
from .oracles import (
    max_norm_over_box_vertices,
    max_over_box_vertices,
    min_l1_over_affine_box,
    min_quadratic_over_lcp_solutions,
)
from .sets import BalancedBox, Box, NonnegOrthant, SetDescriptor, contains_all, project_all


@dataclass(frozen=True)
class Constants:
    """Known problem constants; any may be absent (None).

    C_F / C_f bound ||F|| and the subgradient norms over the feasible set;
    M bounds ||x|| over the set; mu_f is the strong-convexity modulus of f;
    L_F, B_F give ||F(x)-F(y)||^2 <= L_F^2 ||x-y||^2 + B_F; L_f is the
    gradient Lipschitz constant of f.
    """

    C_F: Optional[float] = None
    C_f: Optional[float] = None
    M: Optional[float] = None
    mu_f: Optional[float] = None
    L_F: Optional[float] = None
    B_F: Optional[float] = None
    L_f: Optional[float] = None

    def require(self, *names: str) -> list[float]:
        missing = [nm for nm in names if getattr(self, nm) is None]
        if missing:
            raise ValueError(f"problem constants missing: {', '.join(missing)}")
        return [getattr(self, nm) for nm in names]


@dataclass
class ProblemSpec:
    """A VI-constrained optimization instance: min f(x) over solutions of VI(X, F)."""

    name: str
    structure: BlockStructure
    sets: tuple[SetDescriptor, ...]
    F_block: Callable[[np.ndarray, int], np.ndarray]
    f: Callable[[np.ndarray], float]
    grad_f_block: Callable[[np.ndarray, int], np.ndarray]
    constants: Constants = field(default_factory=Constants)
    known_solution: Optional[np.ndarray] = None
    known_opt_value: Optional[float] = None
    F_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jac_T_vec: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    jac_T_vec_batch: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    potential: Optional[Callable[[np.ndarray], float]] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.sets) != self.structure.d:
            raise ValueError("need one set descriptor per block")
        for s, m in zip(self.sets, self.structure.dims):
            if s.dim != m:
                raise ValueError(f"set dim {s.dim} does not match block dim {m}")

    # -- full-vector evaluations assembled from the blockwise primitives --

    def F(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(self.structure.n)
        for i, sl in enumerate(self.structure.slices):
            out[sl] = self.F_block(x, i)
        return out

    def grad_f(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(self.structure.n)
        for i, sl in enumerate(self.structure.slices):
            out[sl] = self.grad_f_block(x, i)
        return out

    def project(self, x: np.ndarray) -> np.ndarray:
        return project_all(self.sets, self.structure, x)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return contains_all(self.sets, self.structure, x, tol)

    def sample_feasible(self, rng: np.random.Generator) -> np.ndarray:
        parts = [s.sample(rng) for s in self.sets]
        return np.concatenate(parts)

    def sample_feasible_batch(self, rng: np.random.Generator, m: int) -> np.ndarray:
        parts = [s.sample_batch(rng, m) for s in self.sets]
        return np.concatenate(parts, axis=0)

    def project_batch(self, V: np.ndarray) -> np.ndarray:
        out = np.empty_like(V)
        for i, sl in enumerate(self.structure.slices):
            out[sl] = self.sets[i].project_batch(V[sl])
        return out

    def F_columns(self, Y: np.ndarray) -> np.ndarray:
        """F applied columnwise; uses the batched evaluator when present."""
        if self.F_batch is not None:
            return self.F_batch(Y)
        return np.stack([self.F(Y[:, j]) for j in range(Y.shape[1])], axis=1)

    def initial_point(self, rng: np.random.Generator, x0: Optional[np.ndarray] = None) -> np.ndarray:
        """Default start: a standard-normal draw projected onto the set."""
        if x0 is not None:
            return self.project(np.asarray(x0, dtype=float))
        return self.project(rng.standard_normal(self.structure.n))

    @property
    def is_bounded(self) -> bool:
        return all(s.is_bounded for s in self.sets)

    def optimal_value(self) -> float:
        if self.known_opt_value is not None:
            return float(self.known_opt_value)
        if self.known_solution is not None:
            return float(self.f(self.known_solution))
        raise ValueError(f"problem {self.name!r} carries no reference optimum")


# ---------------------------------------------------------------------------
# Networked Cournot competition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CournotParams:
    """Firms x nodes market data.

    c_slopes[i, j] is the linear production cost slope of firm i at node j,
    alpha/beta the price intercept and slope per node, caps[i, j] the
    generation capacity, and sigma >= 1 the price exponent.  Monotonicity
    of the game mapping needs sigma = 1, or 1 < sigma <= 3 with
    d <= (3 sigma - 1) / (sigma - 1).
    """

    c_slopes: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    caps: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c_slopes", np.atleast_2d(np.asarray(self.c_slopes, dtype=float)))
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float).ravel())
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float).ravel())
        object.__setattr__(self, "caps", np.atleast_2d(np.asarray(self.caps, dtype=float)))
        d, J = self.c_slopes.shape
        if self.caps.shape != (d, J) or self.alpha.shape != (J,) or self.beta.shape != (J,):
            raise ValueError("inconsistent firm/node shapes")
        if np.any(self.alpha <= 0) or np.any(self.beta <= 0) or np.any(self.caps <= 0):
            raise ValueError("alpha, beta and caps must be positive")
        if self.sigma < 1.0:
            raise ValueError("price exponent sigma must be >= 1")
        if self.sigma > 1.0:
            if self.sigma > 3.0 or d > (3.0 * self.sigma - 1.0) / (self.sigma - 1.0):
                raise ValueError(
                    f"monotonicity guard failed: need sigma = 1 or "
                    f"1 < sigma <= 3 with d <= (3*sigma-1)/(sigma-1) = "
                    f"{(3.0 * self.sigma - 1.0) / (self.sigma - 1.0):.4g}, got d={d}"
                )

    @property
    def d(self) -> int:
        return self.c_slopes.shape[0]

    @property
    def J(self) -> int:
        return self.c_slopes.shape[1]


def _pow_pos(v: np.ndarray, expo: float) -> np.ndarray:
    """v^expo extended by 0 for v <= 0 (evaluators clamp aggregate sales)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    pos = v > 0.0
    out[pos] = v[pos] ** expo
    return out


def build_cournot(params: CournotParams, probs=None) -> ProblemSpec:
    """Best-equilibrium selection problem for the networked Cournot game.

    Each firm's block is (y_i; s_i) in R^{2J} constrained to its balanced
    box.  The game mapping stacks the partial gradients of the firms' net
    cost functions; the objective is the aggregate (utilitarian) surplus.
    """
    d, J = params.d, params.J
    c, alpha, beta, sigma = params.c_slopes, params.alpha, params.beta, params.sigma
    structure = BlockStructure([2 * J] * d, probs)
    sets = tuple(BalancedBox(params.caps[i]) for i in range(d))

    def _sales(x):
        return x.reshape(d, 2 * J)[:, J:]

    def F_block(x, i):
        S = _sales(x)
        sbar = S.sum(axis=0)
        gy = c[i].copy()
        gs = -alpha + beta * _pow_pos(sbar, sigma) + sigma * beta * S[i] * _pow_pos(sbar, sigma - 1.0)
        return np.concatenate([gy, gs])

    def f(x):
        X = x.reshape(d, 2 * J)
        sbar = X[:, J:].sum(axis=0)
        revenue = alpha * sbar - beta * _pow_pos(sbar, sigma + 1.0)
        return float(np.sum(c * X[:, :J]) - revenue.sum())

    def grad_f_block(x, i):
        S = _sales(x)
        sbar = S.sum(axis=0)
        gs = -alpha + (1.0 + sigma) * beta * _pow_pos(sbar, sigma)
        return np.concatenate([c[i].copy(), gs])

    def F_batch(X):
        m = X.shape[1]
        X3 = X.reshape(d, 2 * J, m)
        S3 = X3[:, J:, :]
        sbar = S3.sum(axis=0)  # (J, m)
        t_sig = _pow_pos(sbar, sigma)
        t_sm1 = _pow_pos(sbar, sigma - 1.0)
        out = np.empty_like(X3)
        for i in range(d):
            out[i, :J, :] = c[i][:, None]
            out[i, J:, :] = -alpha[:, None] + beta[:, None] * t_sig + sigma * beta[:, None] * S3[i] * t_sm1
        return out.reshape(2 * J * d, m)

    def jac_T_vec(x, v):
        # Only sales rows of F vary, and only with the sales of the same node.
        S = _sales(x)
        sbar = S.sum(axis=0)
        V = v.reshape(d, 2 * J)[:, J:]
        t1 = _pow_pos(sbar, sigma - 1.0)
        t2 = (sigma - 1.0) * _pow_pos(sbar, sigma - 2.0)
        col_sum = V.sum(axis=0)
        weighted = (S * V).sum(axis=0)
        out = np.zeros((d, 2 * J))
        out[:, J:] = sigma * beta * (t1 * (col_sum + V) + t2 * weighted)
        return out.reshape(-1)

    def jac_T_vec_batch(X, V):
        m = X.shape[1]
        S3 = X.reshape(d, 2 * J, m)[:, J:, :]
        V3 = V.reshape(d, 2 * J, m)[:, J:, :]
        sbar = S3.sum(axis=0)  # (J, m)
        t1 = _pow_pos(sbar, sigma - 1.0)
        t2 = (sigma - 1.0) * _pow_pos(sbar, sigma - 2.0)
        col_sum = V3.sum(axis=0)
        weighted = (S3 * V3).sum(axis=0)
        out = np.zeros((d, 2 * J, m))
        out[:, J:, :] = sigma * beta[None, :, None] * (
            t1[None] * (col_sum[None] + V3) + t2[None] * weighted[None]
        )
        return out.reshape(2 * J * d, m)

    # Analytic constants over the compact strategy set.
    firm_total = params.caps.sum(axis=1)  # per-firm sales ceiling
    s_tot = float(firm_total.sum())  # aggregate sales ceiling per node
    m_bound = float(np.sqrt(np.sum(params.caps**2) + np.sum(J * firm_total**2)))
    t_sig_max = s_tot**sigma
    t_sm1_max = s_tot ** (sigma - 1.0)
    cf_coord_s = np.maximum(alpha, (1.0 + sigma) * beta * t_sig_max - alpha)
    c_f = float(np.sqrt(np.sum(c**2) + d * np.sum(cf_coord_s**2)))
    u_max = beta[None, :] * t_sig_max + sigma * beta[None, :] * firm_total[:, None] * t_sm1_max
    cF_coord_s = np.maximum(alpha[None, :], u_max - alpha[None, :])
    c_F = float(np.sqrt(np.sum(c**2) + np.sum(cF_coord_s**2)))
    entry = sigma * (sigma + 1.0) * t_sm1_max * np.sqrt(np.sum(beta**2))
    l_F = float(d * entry)
    l_f = float(d * (1.0 + sigma) * sigma * t_sm1_max * np.sqrt(np.sum(beta**2)))

    return ProblemSpec(
        name="cournot",
        structure=structure,
        sets=sets,
        F_block=F_block,
        f=f,
        grad_f_block=grad_f_block,
        constants=Constants(C_F=c_F, C_f=c_f, M=m_bound, mu_f=0.0, L_F=l_F, B_F=0.0, L_f=l_f),
        F_batch=F_batch,
        jac_T_vec=jac_T_vec,
        jac_T_vec_batch=jac_T_vec_batch,
        extras={"params": params},
    )


def benchmark_cournot(seed: int = 0, d: int = 4, J: int = 3, alpha: float = 50.0,
                      beta: float = 0.05, cap: float = 120.0, sigma: float = 1.01,
                      slope_range=(10.0, 50.0)) -> ProblemSpec:
    """The 4-firm, 3-node benchmark market with seeded uniform cost slopes."""
    rng = np.random.default_rng(seed)
    slopes = rng.uniform(slope_range[0], slope_range[1], size=(d, J))
    params = CournotParams(
        c_slopes=slopes,
        alpha=np.full(J, alpha),
        beta=np.full(J, beta),
        caps=np.full((d, J), cap),
        sigma=sigma,
    )
    prob = build_cournot(params)
    prob.extras["instance_seed"] = seed
    return prob


# ---------------------------------------------------------------------------
# Penalized feasibility mapping for constrained convex programs
# ---------------------------------------------------------------------------


class QuadraticConstraint:
    """Smooth convex constraint h(x) = 0.5 x'Px + r'x + c with P >= 0."""

    def __init__(self, P, r, c):
        self.P = np.atleast_2d(np.asarray(P, dtype=float))
        self.r = np.asarray(r, dtype=float).ravel()
        self.c = float(c)

    def value(self, x):
        return 0.5 * float(x @ (self.P @ x)) + float(self.r @ x) + self.c

    def grad(self, x):
        return self.P @ x + self.r

    def hess_vec(self, x, v):
        return self.P @ v

    def value_batch(self, X):
        return 0.5 * np.sum(X * (self.P @ X), axis=0) + self.r @ X + self.c

    def grad_batch(self, X):
        return self.P @ X + self.r[:, None]


def build_penalized_program(A, b, constraints=(), sets=None, dims=None, probs=None,
                            name: str = "penalized_program") -> ProblemSpec:
    """Monotone mapping whose VI solutions are exactly a program's feasible set.

    For the program {Ax = b, h_j(x) <= 0, x in X} with convex smooth h_j,
    the gradient of 0.5 ||Ax-b||^2 + 0.5 sum max(0, h_j)^2 is

        F(x) = A'(Ax - b) + sum_j max(0, h_j(x)) grad h_j(x),

    and the solutions of VI(X, F) coincide with the feasible set whenever
    the program is feasible.  The objective defaults to zero; callers
    overlay their own f on the returned spec.
    """
    constraints = tuple(constraints)
    if A is not None:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        n = A.shape[1]
    else:
        if not constraints:
            raise ValueError("need an affine part or at least one constraint")
        n = constraints[0].r.size
    if dims is None:
        dims = [n]
    structure = BlockStructure(dims, probs)
    if structure.n != n:
        raise ValueError("block dims do not sum to the variable dimension")
    if sets is None:
        sets = tuple(Box(np.full(m, -np.inf), np.full(m, np.inf)) for m in structure.dims)
    sets = tuple(sets)

    def _penalty_grad(x):
        acc = np.zeros(n)
        for h in constraints:
            hv = h.value(x)
            if hv > 0.0:
                acc += hv * h.grad(x)
        return acc

    def F_block(x, i):
        sl = structure.slices[i]
        out = np.zeros(structure.dims[i])
        if A is not None:
            out += A[:, sl].T @ (A @ x - b)
        if constraints:
            out += _penalty_grad(x)[sl]
        return out

    def potential(x):
        val = 0.0
        if A is not None:
            resid = A @ x - b
            val += 0.5 * float(resid @ resid)
        for h in constraints:
            val += 0.5 * max(0.0, h.value(x)) ** 2
        return val

    def F_batch(X):
        out = np.zeros_like(X)
        if A is not None:
            out += A.T @ (A @ X - b[:, None])
        for h in constraints:
            if hasattr(h, "value_batch"):
                hv = np.maximum(h.value_batch(X), 0.0)
                out += hv[None, :] * h.grad_batch(X)
            else:
                for col in range(X.shape[1]):
                    hv = h.value(X[:, col])
                    if hv > 0.0:
                        out[:, col] += hv * h.grad(X[:, col])
        return out

    def jac_T_vec(x, v):
        # The mapping is a gradient, so its Jacobian is symmetric.
        out = np.zeros(n)
        if A is not None:
            out += A.T @ (A @ v)
        for h in constraints:
            hv = h.value(x)
            if hv > 0.0:
                g = h.grad(x)
                out += g * float(g @ v)
                if hasattr(h, "hess_vec"):
                    out += hv * h.hess_vec(x, v)
        return out

    def jac_T_vec_batch(X, V):
        out = np.zeros_like(V)
        if A is not None:
            out += A.T @ (A @ V)
        for h in constraints:
            if isinstance(h, QuadraticConstraint):
                hv = h.value_batch(X)
                act = hv > 0.0
                if act.any():
                    G = h.grad_batch(X)
                    out += G * (np.einsum("ij,ij->j", G, V) * act)[None, :]
                    out += (np.maximum(hv, 0.0))[None, :] * (h.P @ V)
            else:
                for col in range(X.shape[1]):
                    out[:, col] = jac_T_vec(X[:, col], V[:, col])
        return out

    lip = None
    if all(isinstance(s, Box) and s.is_bounded for s in sets):
        lower = np.concatenate([s.lower for s in sets])
        upper = np.concatenate([s.upper for s in sets])
        lip = 0.0
        if A is not None:
            lip += float(np.linalg.eigvalsh(A.T @ A)[-1])
        for h in constraints:
            h_max = max_over_box_vertices(h.value, lower, upper)
            g_max = max_norm_over_box_vertices(h.grad, lower, upper)
            hess_norm = float(np.linalg.eigvalsh(h.P)[-1]) if isinstance(h, QuadraticConstraint) else 0.0
            lip += g_max**2 + max(h_max, 0.0) * hess_norm

    return ProblemSpec(
        name=name,
        structure=structure,
        sets=sets,
        F_block=F_block,
        f=lambda x: 0.0,
        grad_f_block=lambda x, i: np.zeros(structure.dims[i]),
        constants=Constants(L_F=lip, B_F=0.0 if lip is not None else None),
        F_batch=F_batch,
        jac_T_vec=jac_T_vec,
        jac_T_vec_batch=jac_T_vec_batch,
        potential=potential,
        extras={"A": A, "b": b, "constraints": constraints, "lipschitz_bound": lip},
    )


def build_l1_over_affine_box(A, b, lower, upper, dims=None, probs=None) -> ProblemSpec:
    """Least-l1 selection over the solutions of an affine feasibility VI.

    f(x) = ||x||_1 with the sign subgradient (zero at kinks); the mapping
    is the affine feasibility penalty gradient.  The reference optimum is
    computed exactly by basic-point enumeration at construction time, and
    all rate-bound constants are derived exactly over the box.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    n = A.shape[1]
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("box must be finite")
    xstar, fstar = min_l1_over_affine_box(A, b, lower, upper)

    if dims is None:
        dims = [n]
    structure = BlockStructure(dims, probs)
    offsets = [s.start for s in structure.slices]
    sets = tuple(
        Box(lower[o : o + m], upper[o : o + m]) for o, m in zip(offsets, structure.dims)
    )
    base = build_penalized_program(A, b, sets=sets, dims=dims, probs=probs, name="l1_affine_box")

    def f(x):
        return float(np.sum(np.abs(x)))

    def grad_f_block(x, i):
        return np.sign(x[structure.slices[i]])

    c_F = max_norm_over_box_vertices(lambda v: A.T @ (A @ v - b), lower, upper)
    constants = Constants(
        C_F=c_F,
        C_f=float(np.sqrt(n)),
        M=float(np.sqrt(np.sum(np.maximum(np.abs(lower), np.abs(upper)) ** 2))),
        mu_f=0.0,
        L_F=float(np.linalg.eigvalsh(A.T @ A)[-1]),
        B_F=0.0,
    )
    base.f = f
    base.grad_f_block = grad_f_block
    base.constants = constants
    base.known_solution = xstar
    base.known_opt_value = fstar
    return base


def scalar_tikhonov_instance() -> ProblemSpec:
    """1-D instance with a closed-form trajectory: F(x) = x - 1 on the line,
    f = x^2/2, so the eta-regularized solution is 1/(1+eta) and the limit is 1."""
    from .sets import WholeSpace

    structure = BlockStructure([1])
    return ProblemSpec(
        name="scalar_tikhonov",
        structure=structure,
        sets=(WholeSpace(1),),
        F_block=lambda x, i: x - 1.0,
        f=lambda x: 0.5 * float(x @ x),
        grad_f_block=lambda x, i: x.copy(),
        constants=Constants(mu_f=1.0, L_f=1.0, L_F=1.0, B_F=0.0),
        known_solution=np.array([1.0]),
        extras={"trajectory": lambda eta: np.array([1.0 / (1.0 + eta)])},
    )


# ---------------------------------------------------------------------------
# Complementarity and strongly convex selection instances
# ---------------------------------------------------------------------------


def benchmark_l1_instance(seed: int = 0, n: int = 8, d: int = 4, m: int = 3,
                          box: float = 1.0) -> ProblemSpec:
    """Seeded least-l1 test bed over {Ax = b} in [-box, box]^n with d blocks.

    The anchor point defining b is drawn away from the origin so the
    optimal l1 value is well separated from zero.
    """
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n))
    anchor = rng.uniform(0.35 * box, 0.9 * box, size=n) * np.where(rng.random(n) < 0.5, -1.0, 1.0)
    b = A @ anchor
    if n % d != 0:
        raise ValueError("block count must divide the dimension")
    prob = build_l1_over_affine_box(A, b, np.full(n, -box), np.full(n, box), dims=[n // d] * d)
    prob.extras["instance_seed"] = seed
    prob.extras["anchor"] = anchor
    return prob


def benchmark_unbounded_instance(seed: int = 0, n: int = 6, d: int = 3) -> ProblemSpec:
    """Seeded strongly-convex selection instance on the nonnegative orthant.

    Q is symmetric positive definite with unit minimum eigenvalue margin,
    so the complementarity solution is unique and the pattern oracle pins
    the reference point exactly.
    """
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(n, n))
    Q = G.T @ G / n + np.eye(n)
    q = rng.normal(size=n)
    xhat = min_quadratic_over_lcp_solutions(Q, q, np.zeros(n))
    center = xhat + 0.5 * rng.normal(size=n) / np.sqrt(n)
    if n % d != 0:
        raise ValueError("block count must divide the dimension")
    prob = build_strongly_convex_unbounded(Q, q, center, dims=[n // d] * d)
    prob.extras["instance_seed"] = seed
    return prob


def build_lcp(F, n, dims=None, probs=None, f=None, grad_f=None, name: str = "lcp") -> ProblemSpec:
    """Objective selection over the solutions of a complementarity problem.

    The feasible set {x'F(x) = 0, x >= 0, F(x) >= 0} equals the solution
    set of the VI over the nonnegative orthant.  f defaults to the
    least-norm selection 0.5 ||x||^2.
    """
    if dims is None:
        dims = [n]
    structure = BlockStructure(dims, probs)
    if structure.n != n:
        raise ValueError("block dims do not sum to n")
    sets = tuple(NonnegOrthant(m) for m in structure.dims)
    if f is None:
        f = lambda x: 0.5 * float(x @ x)
        grad_f = lambda x: x
    if grad_f is None:
        raise ValueError("custom f needs a matching gradient")

    return ProblemSpec(
        name=name,
        structure=structure,
        sets=sets,
        F_block=lambda x, i: np.asarray(F(x), dtype=float)[structure.slices[i]],
        f=f,
        grad_f_block=lambda x, i: np.asarray(grad_f(x), dtype=float)[structure.slices[i]],
        constants=Constants(mu_f=1.0, L_f=1.0),
    )


def build_strongly_convex_unbounded(Q, q, center, dims=None, probs=None) -> ProblemSpec:
    """Strongly convex selection over an affine complementarity solution set.

    X is the nonnegative orthant (unbounded), F(x) = Qx + q with Q
    symmetric positive semidefinite (pass Q=None for the F=0 degenerate
    case), and f(x) = 0.5 ||x - center||^2.  The reference solution is the
    exact projection of center onto the complementarity solution set,
    obtained by pattern enumeration.
    """
    q = np.asarray(q, dtype=float).ravel()
    center = np.asarray(center, dtype=float).ravel()
    n = center.size
    if Q is None:
        Q = np.zeros((n, n))
        xstar = np.maximum(center, 0.0)
    else:
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        if np.linalg.eigvalsh(Q)[0] < -1e-10:
            raise ValueError("Q must be positive semidefinite")
        xstar = min_quadratic_over_lcp_solutions(Q, q, center)
    if dims is None:
        dims = [n]
    structure = BlockStructure(dims, probs)
    if structure.n != n:
        raise ValueError("block dims do not sum to the dimension of center")
    sets = tuple(NonnegOrthant(m) for m in structure.dims)

    return ProblemSpec(
        name="strongly_convex_unbounded",
        structure=structure,
        sets=sets,
        F_block=lambda x, i: Q[structure.slices[i], :] @ x + q[structure.slices[i]],
        f=lambda x: 0.5 * float(np.sum((x - center) ** 2)),
        grad_f_block=lambda x, i: x[structure.slices[i]] - center[structure.slices[i]],
        constants=Constants(
            mu_f=1.0,
            L_f=1.0,
            L_F=float(np.linalg.eigvalsh(Q)[-1]) if Q.size else 0.0,
            B_F=0.0,
        ),
        known_solution=xstar,
        F_batch=lambda X: Q @ X + q[:, None],
        jac_T_vec=lambda x, v: Q.T @ v,
        jac_T_vec_batch=lambda X, V: Q.T @ V,
        extras={"Q": Q, "q": q, "center": center},
    )
