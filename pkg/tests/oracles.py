"""Independent reference computations used by the tests.

None of these share code with the package: they solve the same problems by
different routes (dense linear algebra, exhaustive enumeration, proximal
gradient), so agreement is evidence rather than tautology.
"""

import itertools

import numpy as np


def ridge_normal_equations(X, y, lam, costs):
    """argmin ||y - Xb||^2 + lam * sum c_j b_j^2, no intercept."""
    return np.linalg.solve(X.T @ X + lam * np.diag(costs), X.T @ y)


def orthonormal_lasso(X, y, lam, costs):
    """Closed form for X'X = I: b_j = S(x_j'y, lam * c_j / 2)."""
    z = X.T @ y
    t = lam * np.asarray(costs) / 2.0
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def enet_enumerate(X, y, lam, alpha, costs):
    """Exact cost-weighted elastic net (no intercept) for small p.

    Tries every sign pattern in {-1, 0, +1}^p, solves the stationarity
    equations on the support and keeps the pattern whose solution is
    sign-consistent and satisfies the zero-coordinate subgradient bounds.
    Among consistent patterns the lowest objective wins.
    """
    n, p = X.shape
    c = np.asarray(costs, dtype=float)
    l1 = (1 - alpha) * lam * c
    l2 = alpha * lam * c
    G = X.T @ X
    q = X.T @ y
    best, best_val = None, np.inf
    for signs in itertools.product((-1, 0, 1), repeat=p):
        s = np.array(signs, dtype=float)
        S = np.flatnonzero(s)
        b = np.zeros(p)
        if S.size:
            A = G[np.ix_(S, S)] + np.diag(l2[S])
            try:
                b[S] = np.linalg.solve(A, q[S] - 0.5 * l1[S] * s[S])
            except np.linalg.LinAlgError:
                continue
            if np.any(np.sign(b[S]) != s[S]):
                continue
        grad = 2 * (G @ b - q)
        Z = np.flatnonzero(s == 0)
        if np.any(np.abs(grad[Z]) > l1[Z] * (1 + 1e-9) + 1e-12):
            continue
        r = y - X @ b
        val = r @ r + l1 @ np.abs(b) + l2 @ (b * b)
        if val < best_val:
            best, best_val = b, val
    return best


def enet_fista(X, y, lam, alpha, costs, iters=200_000, tol=1e-14):
    """Cost-weighted elastic net by accelerated proximal gradient, no intercept."""
    c = np.asarray(costs, dtype=float)
    l1 = (1 - alpha) * lam * c
    l2 = alpha * lam * c
    L = 2 * np.linalg.eigvalsh(X.T @ X).max() + 2 * l2.max()
    b = np.zeros(X.shape[1])
    z = b.copy()
    t = 1.0
    for _ in range(iters):
        grad = 2 * X.T @ (X @ z - y) + 2 * l2 * z
        u = z - grad / L
        b_new = np.sign(u) * np.maximum(np.abs(u) - l1 / L, 0.0)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        z = b_new + (t - 1) / t_new * (b_new - b)
        if np.max(np.abs(b_new - b)) < tol:
            b = b_new
            break
        b, t = b_new, t_new
    return b


def center(X, y):
    return X - X.mean(axis=0), y - y.mean()


def brute_force_coverage(W, importance, budget, tol=1e-8):
    """Best importance-weighted coverage over all subsets of size <= budget."""
    hits = np.abs(W) > tol
    best = 0.0
    n = W.shape[0]
    for k in range(1, min(budget, n) + 1):
        for sub in itertools.combinations(range(n), k):
            cov = importance[hits[list(sub)].any(axis=0)].sum()
            best = max(best, cov)
    return best


def logistic_loss(params, X, y, l2):
    """Mean log-loss plus (l2/2)||w||^2, written from the likelihood directly."""
    w, b = params[:-1], params[-1]
    p = 1 / (1 + np.exp(-(X @ w + b)))
    return -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)) + 0.5 * l2 * (w @ w)
