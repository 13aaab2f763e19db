"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np
import sympy as sp
from scipy.optimize import linprog


def lp_member(points: np.ndarray, x: np.ndarray) -> bool:
    """x in conv(points) + R_+^d, by LP feasibility."""
    n, d = points.shape
    res = linprog(
        np.zeros(n),
        A_ub=points.T,
        b_ub=x,
        A_eq=np.ones((1, n)),
        b_eq=[1.0],
        bounds=[(0, None)] * n,
        method="highs",
    )
    return res.status == 0


def lp_newton_distance(points, v, rel_width: float = 1e-4) -> float:
    """Bisection on LP membership along t -> t v, then one slack LP.

    The slack LP maximizes s with sum l_i p_i + s v <= t v (l in the simplex)
    at a t known to be inside, so the crossing is t - s*.
    """
    pts = np.asarray(points, dtype=float)
    v = np.asarray(v, dtype=float)
    lo = max(float(np.min(pts[:, k])) / v[k] for k in range(len(v)))
    hi = min(float(np.max(p / v)) for p in pts)
    lo = min(lo, hi)
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if lp_member(pts, mid * v):
            hi = mid
        else:
            lo = mid
    n, d = pts.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([pts.T, v[:, None]])
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=hi * v,
        A_eq=np.hstack([np.ones((1, n)), [[0.0]]]),
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
    )
    assert res.status == 0, res.message
    return hi - res.x[-1]


def lp_is_vertex(points, i: int) -> bool:
    """points[i] is a vertex iff it is not in conv(others) + R_+^d."""
    pts = np.asarray(points, dtype=float)
    others = np.delete(pts, i, axis=0)
    keep = [q for q in others if not np.array_equal(q, pts[i])]
    if not keep:
        return True
    return not lp_member(np.asarray(keep), pts[i])


def sympy_poly(terms, d):
    xs = sp.symbols(f"x0:{d}")
    expr = sum(sp.Float(c) * sp.Mul(*[x**a for x, a in zip(xs, alpha)]) for alpha, c in terms)
    return expr, xs


def sympy_derivative_value(terms, d, beta, point) -> float:
    expr, xs = sympy_poly(terms, d)
    for x, b in zip(xs, beta):
        if b:
            expr = sp.diff(expr, x, b)
    return float(expr.subs(dict(zip(xs, point))))


def brute_dyadic_sum(vertices, delta, v, gamma, lam) -> float:
    """Plain loops over the index box, one term at a time."""
    log_lam = math.log2(lam)
    tops = [math.ceil(log_lam / (delta * vk) - 1e-12) for vk in v]
    total = 0.0
    for j in itertools.product(*[range(t + 1) for t in tops]):
        a = 2.0 ** -sum(jk * vk for jk, vk in zip(j, v))
        b = min(
            lam ** (-1.0 / gamma)
            * 2.0 ** sum(jk * (ak / gamma - vk) for jk, ak, vk in zip(j, alpha, v))
            for alpha in vertices
        )
        total += min(a, b)
    return total


def dense_alpha_min(vertices, j, v, gamma, lam, samples: int = 400, seed: int = 0) -> float:
    """min over sampled alpha in conv(vertices) + R_+^d of the second term,
    to confirm that the vertex minimum is the polyhedron minimum."""
    rng = np.random.default_rng(seed)
    verts = np.asarray(vertices, float)
    w = rng.dirichlet(np.ones(len(verts)), size=samples)
    alphas = w @ verts + rng.exponential(0.5, size=(samples, verts.shape[1])) * rng.integers(0, 2, size=(samples, verts.shape[1]))
    alphas = np.vstack([alphas, verts])
    j = np.asarray(j, float)
    expo = j @ (alphas / gamma - np.asarray(v)).T
    return float(lam ** (-1.0 / gamma) * 2.0 ** expo.min())
