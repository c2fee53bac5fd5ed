"""Small brute-force reference solvers.

Everything in here trades speed for certainty: exhaustive enumeration of
active sets, complementarity patterns, or polytope vertices on instances
small enough that the enumeration is exact.  These routines are used to
pin down known solutions at problem-construction time and as independent
references in the test suite; none of them is on any solver's hot path.
"""

from __future__ import annotations

import itertools

import numpy as np


def balanced_projection_qp(caps, y0, s0, feas_tol=1e-9):
    """Projection onto the balanced box by active-set enumeration.

    Each y_j is tried at its lower bound, at its cap, or free; each s_j at
    zero or free.  Free coordinates of a candidate move with the balance
    multiplier lam (y_j = y0_j - lam, s_j = s0_j + lam).  Among all
    primal-feasible candidates the one with the least squared distance is
    the projection.  Cost grows like 6^J; intended for J <= 4.
    """
    caps = np.asarray(caps, dtype=float).ravel()
    y0 = np.asarray(y0, dtype=float).ravel()
    s0 = np.asarray(s0, dtype=float).ravel()
    J = caps.size
    best = None
    best_obj = np.inf
    for y_state in itertools.product((0, 1, 2), repeat=J):  # 0: at 0, 1: at cap, 2: free
        for s_state in itertools.product((0, 1), repeat=J):  # 0: at 0, 1: free
            fixed_y = sum(caps[j] for j in range(J) if y_state[j] == 1)
            free_y = [j for j in range(J) if y_state[j] == 2]
            free_s = [j for j in range(J) if s_state[j] == 1]
            n_free = len(free_y) + len(free_s)
            rhs = fixed_y + sum(y0[j] for j in free_y) - sum(s0[j] for j in free_s)
            if n_free == 0:
                if abs(rhs) > feas_tol * (1.0 + caps.sum()):
                    continue
                lam = 0.0
            else:
                lam = rhs / n_free
            y = np.where(np.asarray(y_state) == 1, caps, 0.0)
            s = np.zeros(J)
            ok = True
            for j in free_y:
                y[j] = y0[j] - lam
                if y[j] < -feas_tol or y[j] > caps[j] + feas_tol:
                    ok = False
                    break
            if not ok:
                continue
            for j in free_s:
                s[j] = s0[j] + lam
                if s[j] < -feas_tol:
                    ok = False
                    break
            if not ok:
                continue
            obj = float(np.sum((y - y0) ** 2) + np.sum((s - s0) ** 2))
            if obj < best_obj - 1e-15:
                best_obj = obj
                best = (y.copy(), s.copy())
    assert best is not None, "balanced box is never empty; enumeration missed a pattern"
    return best


def lcp_solution_faces(Q, q, tol=1e-9):
    """Enumerate the solution set of  x >= 0, Qx + q >= 0, x'(Qx+q) = 0.

    Q must be symmetric positive semidefinite (monotone affine map).
    Returns a list of faces, each described by (support, x_part, nullbasis)
    where the solutions on the face are {x_part + nullbasis @ t} restricted
    to the feasibility conditions.  For nonsingular principal blocks the
    nullbasis is empty and the face is a single point.
    """
    Q = np.asarray(Q, dtype=float)
    q = np.asarray(q, dtype=float).ravel()
    n = q.size
    faces = []
    for mask_bits in itertools.product((0, 1), repeat=n):
        sup = np.array(mask_bits, dtype=bool)
        x = np.zeros(n)
        if sup.any():
            Qpp = Q[np.ix_(sup, sup)]
            qp = q[sup]
            xp, *_ = np.linalg.lstsq(Qpp, -qp, rcond=None)
            if np.linalg.norm(Qpp @ xp + qp) > tol * (1.0 + np.linalg.norm(qp)):
                continue  # inconsistent: no complementary solution on this support
            x[sup] = xp
            # Null space of the principal block spans the face directions.
            u, sv, vt = np.linalg.svd(Qpp)
            rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 0.0)))
            null = vt[rank:].T  # (|sup| x nu)
        else:
            null = np.zeros((0, 0))
        w = Q @ x + q
        if np.any(x < -tol) or np.any(w[~sup] < -tol):
            if null.size == 0:
                continue
        nu = null.shape[1] if null.size else 0
        if nu == 0:
            if np.all(x >= -tol) and np.all(w >= -tol):
                faces.append((sup, x, np.zeros((n, 0))))
            continue
        basis = np.zeros((n, nu))
        basis[sup] = null
        faces.append((sup, x, basis))
    return faces


def min_quadratic_over_lcp_solutions(Q, q, c, tol=1e-9):
    """argmin of 0.5*||x - c||^2 over the affine-LCP solution set.

    Walks every complementarity face from :func:`lcp_solution_faces` and,
    on faces with free directions, enumerates active subsets of the face's
    inequality constraints to find the exact projection of c.  Intended
    for n <= 10.
    """
    Q = np.asarray(Q, dtype=float)
    q = np.asarray(q, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    n = q.size
    best, best_obj = None, np.inf

    def consider(x):
        nonlocal best, best_obj
        w = Q @ x + q
        if np.any(x < -tol) or np.any(w < -tol):
            return
        if abs(float(x @ w)) > tol * (1.0 + np.linalg.norm(x) * np.linalg.norm(w)):
            return
        obj = 0.5 * float(np.sum((x - c) ** 2))
        if obj < best_obj - 1e-15:
            best_obj, best = obj, x.copy()

    for sup, x0, basis in lcp_solution_faces(Q, q, tol):
        nu = basis.shape[1]
        if nu == 0:
            consider(x0)
            continue
        # Feasibility on the face: x0 + basis t >= 0 and Q(x0 + basis t) + q >= 0,
        # i.e. G t >= h with G = [basis; Q basis], h = [-x0; -(Q x0 + q)].
        G = np.vstack([basis, Q @ basis])
        h = np.concatenate([-x0, -(Q @ x0 + q)])
        m = G.shape[0]
        # Unconstrained projection of c onto the affine face, then every
        # active subset; the true minimizer's active set is among them.
        candidates = [()]
        for size in range(1, min(m, nu) + 1):
            candidates.extend(itertools.combinations(range(m), size))
        H = basis.T @ basis
        g0 = basis.T @ (x0 - c)
        for act in candidates:
            if act:
                A = G[list(act)]
                bvec = h[list(act)]
                # KKT of min 0.5 t'Ht + g0't  s.t.  A t = bvec
                k = len(act)
                kkt = np.block([[H, A.T], [A, np.zeros((k, k))]])
                rhs = np.concatenate([-g0, bvec])
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
                t = sol[:nu]
                if np.linalg.norm(A @ t - bvec) > 1e-8 * (1.0 + np.linalg.norm(bvec)):
                    continue
            else:
                t, *_ = np.linalg.lstsq(H, -g0, rcond=None)
            if np.all(G @ t >= h - 1e-9):
                consider(x0 + basis @ t)
    if best is None:
        raise ValueError("affine complementarity problem has no solution")
    return best


def min_l1_over_affine_box(A, b, lower, upper, tol=1e-9):
    """Exact min of ||x||_1 over {Ax = b} intersected with a finite box.

    The objective is linear on each sign orthant, so some minimizer is a
    basic point: n - m coordinates pinned to a bound or to zero and the
    rest solved from the equalities.  All such candidates are enumerated.
    Returns (x_star, f_star); raises if the feasible set is empty.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    m, n = A.shape
    if m >= n:
        raise ValueError("expected an underdetermined system (m < n)")
    best, best_obj = None, np.inf
    coords = range(n)
    for basic in itertools.combinations(coords, m):
        nonbasic = [j for j in coords if j not in basic]
        AB = A[:, basic]
        if abs(np.linalg.det(AB)) < 1e-12:
            continue
        pins = []
        for j in nonbasic:
            vals = {lower[j], upper[j], 0.0 if lower[j] <= 0.0 <= upper[j] else lower[j]}
            pins.append(sorted(vals))
        for combo in itertools.product(*pins):
            x = np.zeros(n)
            x[nonbasic] = combo
            rhs = b - A[:, nonbasic] @ x[nonbasic]
            xb = np.linalg.solve(AB, rhs)
            x[list(basic)] = xb
            if np.any(x < lower - tol) or np.any(x > upper + tol):
                continue
            obj = float(np.sum(np.abs(x)))
            if obj < best_obj - 1e-12:
                best_obj, best = obj, x.copy()
    if best is None:
        raise ValueError("no feasible point: {Ax=b} does not meet the box")
    return best, best_obj


def max_linear_over_box(cvec, lower, upper):
    """max of c'y over a finite box, in closed form."""
    cvec = np.asarray(cvec, dtype=float).ravel()
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    y = np.where(cvec >= 0, upper, lower)
    return float(cvec @ y), y


def max_norm_over_box_vertices(fun, lower, upper):
    """max of ||fun(x)|| over the vertices of a finite box.

    Exact for norms of affine maps (convex in x), where the maximum over
    the box is attained at a vertex.  Cost 2^n.
    """
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    n = lower.size
    best = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        v = np.where(np.asarray(bits, dtype=bool), upper, lower)
        best = max(best, float(np.linalg.norm(fun(v))))
    return best


def max_over_box_vertices(fun, lower, upper):
    """max of a scalar convex function over the vertices of a finite box."""
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    n = lower.size
    best = -np.inf
    for bits in itertools.product((0, 1), repeat=n):
        v = np.where(np.asarray(bits, dtype=bool), upper, lower)
        best = max(best, float(fun(v)))
    return best


def grid_max_2d(fun, lower, upper, npts=2001):
    """Exhaustive maximum of a scalar function on a 2-D grid over a box."""
    xs = np.linspace(lower[0], upper[0], npts)
    ys = np.linspace(lower[1], upper[1], npts)
    best = -np.inf
    # Row-at-a-time to keep memory flat.
    for xv in xs:
        pts = np.stack([np.full(npts, xv), ys])
        vals = fun(pts)
        best = max(best, float(np.max(vals)))
    return best
