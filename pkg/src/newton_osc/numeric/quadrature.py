"""Tensor-product Gauss-Legendre evaluation of

    Lambda_d(f_1, ..., f_d) = int e^{i lam S(x)} psi(x) prod_j f_j(x with x_j removed) dx

over the orthant [0, 1]^d, for separable box/power test functions.

Two routes:

* ``general``: panels per axis scale with lam * sup|d_k S| * box_k so every
  oscillation is resolved; cost grows like lam^d, so only small boxes or
  small lam are affordable (d <= 3, or d = 4 for monomials).
* ``linear``: if some variable x_m enters every term to the first power then
  S = x_m T(x'), the x_m-integral of a piecewise polynomial against
  e^{i mu t} is done in closed form and the remaining (d-1)-dim integral is
  taken on a dyadically graded mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from ..phase import Phase, eval_phase
from . import cutoff


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class TestFunction:
    """f_j(x_hat_j) = prod_{k != j} 1[0, widths[k]](x_k) * x_k^powers[k].

    Entry j of both tuples is ignored. A width >= 1 means no restriction
    inside the unit cube; all functions are taken on [0, 1]^(d-1).
    """

    __test__ = False  # not a pytest class

    j: int
    widths: tuple[float, ...]
    powers: tuple[float, ...]

    def factor(self, k: int) -> tuple[float, float]:
        if k == self.j:
            return 1.0, 0.0
        return min(1.0, float(self.widths[k])), float(self.powers[k])

    def norm(self, p) -> float:
        """||f_j||_p over [0, 1]^(d-1) (closed form)."""
        out = 1.0
        for k in range(len(self.widths)):
            if k == self.j:
                continue
            b, beta = self.factor(k)
            if p == math.inf:
                if beta < 0:
                    return math.inf
                out *= b**beta
            else:
                p = float(p)
                e = beta * p + 1.0
                if e <= 0:
                    return math.inf
                out *= (b**e / e) ** (1.0 / p)
        return out

    def to_dict(self) -> dict:
        return {"j": self.j, "widths": list(self.widths), "powers": list(self.powers)}


def box_functions(widths: Sequence[float]) -> list[TestFunction]:
    """f_j = prod_{k != j} 1[0, widths[k]]."""
    d = len(widths)
    return [TestFunction(j, tuple(widths), (0.0,) * d) for j in range(d)]


def unit_functions(d: int) -> list[TestFunction]:
    return box_functions([1.0] * d)


def sharpness_functions(lam: float, normal: Sequence[float]) -> list[TestFunction]:
    """Box widths lam^-n_k for a supporting normal n."""
    return box_functions([lam ** -float(n) for n in normal])


def off_diagonal_functions(lam: float, d: int, mu: float = 1.0) -> list[TestFunction]:
    """f_j = 1(x_{d-1}) 1(x_d) for j <= d-2, f_{d-1} = 1(x_d), f_d = 1(x_{d-1}),
    all indicators of [0, |lam mu|^(-1/2)]."""
    w = abs(lam * mu) ** -0.5
    out = []
    for j in range(d):
        widths = [1.0] * d
        if j < d - 2:
            widths[d - 2] = widths[d - 1] = w
        elif j == d - 2:
            widths[d - 1] = w
        else:
            widths[d - 2] = w
        out.append(TestFunction(j, tuple(widths), (0.0,) * d))
    return out


def power_functions(p_recips: Sequence[float], gamma: float) -> list[TestFunction]:
    """f_j(x_hat_j) = prod_{k != j} x_k^(-1/p_j + gamma/(d-1))."""
    d = len(p_recips)
    out = []
    for j in range(d):
        e = -float(p_recips[j]) + gamma / (d - 1)
        out.append(TestFunction(j, (1.0,) * d, tuple(e if k != j else 0.0 for k in range(d))))
    return out


def norm_product(functions: Sequence[TestFunction], reciprocals: Sequence) -> float:
    out = 1.0
    for f, r in zip(functions, reciprocals):
        out *= f.norm(math.inf if r == 0 else 1.0 / float(r))
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    lam: float
    panels_per_axis: int = 4
    nodes_per_panel: int = 8
    oversample: int = 4
    cutoff: str = cutoff.NAME
    max_points: int = 40_000_000

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(
            self.lam,
            2 * self.panels_per_axis,
            self.nodes_per_panel,
            self.oversample,
            self.cutoff,
            self.max_points,
        )


@dataclass
class LambdaResult:
    value: complex
    coarse: complex
    converged: bool
    rel_change: float
    method: str
    points: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "abs": abs(self.value),
            "converged": self.converged,
            "rel_change": self.rel_change,
            "method": self.method,
            "points": self.points,
        }


CONVERGENCE_TOL = 0.01


def _coordinate_weights(functions: Sequence[TestFunction], d: int):
    """Per-coordinate support bound B_k and combined power beta_k."""
    bounds, betas = [], []
    for k in range(d):
        b, beta = 1.0, 0.0
        for f in functions:
            bk, ek = f.factor(k)
            b = min(b, bk)
            beta += ek
        if beta <= -1:
            raise QuadratureError(f"combined power {beta} in x_{k} is not integrable")
        bounds.append(b)
        betas.append(beta)
    return np.array(bounds), np.array(betas)


def _derivative_bounds(phase: Phase, box: np.ndarray) -> np.ndarray:
    """sup over prod[0, box] of |d_k S|, bounded term by term."""
    out = np.zeros(phase.dim)
    for alpha, c in phase.terms:
        for k, a in enumerate(alpha):
            if a == 0:
                continue
            e = np.array(alpha, dtype=float)
            e[k] -= 1
            out[k] += abs(c) * a * float(np.prod(box**e))
    return out


def _gl_panels(edges: np.ndarray, n: int):
    x, w = leggauss(n)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def _general_axes(phase, spec, bounds, betas):
    lip = _derivative_bounds(phase, bounds)
    axes = []
    for k in range(phase.dim):
        b, beta = bounds[k], betas[k]
        q = 1.0 / (1.0 + beta)
        osc = spec.lam * lip[k] * b / (2 * math.pi)
        n = max(spec.panels_per_axis, math.ceil(osc) * spec.oversample)
        edges = np.linspace(0.0, 1.0, n + 1)
        if b > cutoff.PLATEAU:
            edges = np.union1d(edges, [(cutoff.PLATEAU / b) ** (1.0 / q)])
        t, wt = _gl_panels(edges, spec.nodes_per_panel)
        # x = b t^q absorbs x^beta: x^beta dx = b^(1+beta) q dt
        x = b * t**q
        w = wt * b ** (1.0 + beta) * q * cutoff.bump(x)
        axes.append((x, w))
    return axes


def _tensor_sum(phase: Phase, lam: float, axes) -> complex:
    d = phase.dim
    x0, w0 = axes[0]
    rest = axes[1:]
    if rest:
        grids = np.meshgrid(*[a[0] for a in rest], indexing="ij")
        wgrid = np.ones_like(grids[0])
        for g, (_, w) in zip(range(len(rest)), rest):
            shape = [1] * len(rest)
            shape[g] = -1
            wgrid = wgrid * w.reshape(shape)
        pts_rest = np.stack(grids, axis=-1)
    total = 0.0 + 0.0j
    # fixed-order accumulation over the first axis keeps results reproducible
    for xi, wi in zip(x0, w0):
        if wi == 0.0:
            continue
        if rest:
            pts = np.concatenate([np.full(pts_rest.shape[:-1] + (1,), xi), pts_rest], axis=-1)
            s = eval_phase(phase, pts)
            total += wi * np.sum(wgrid * np.exp(1j * lam * s))
        else:
            total += wi * np.exp(1j * lam * eval_phase(phase, np.array([xi])))
    return complex(total)


def _general(phase, functions, spec):
    bounds, betas = _coordinate_weights(functions, phase.dim)
    axes = _general_axes(phase, spec, bounds, betas)
    npts = int(np.prod([a[0].size for a in axes]))
    if npts > spec.max_points:
        raise QuadratureError(
            f"general quadrature needs {npts} nodes at lambda={spec.lam:g} (cap {spec.max_points})"
        )
    return _tensor_sum(phase, spec.lam, axes), npts


def linear_variable(phase: Phase) -> int | None:
    """Index m with alpha_m == 1 for every term, preferring the last one."""
    for m in reversed(range(phase.dim)):
        if all(a[m] == 1 for a in phase.indices):
            return m
    return None


def _poly_exp_integral(poly: Polynomial, a: float, b: float, mu: np.ndarray) -> np.ndarray:
    """int_a^b poly(t) e^{i mu t} dt for an array of mu."""
    mu = np.asarray(mu, dtype=float)
    out = np.zeros(mu.shape, dtype=complex)
    if b <= a:
        return out
    small = np.abs(mu) * (b - a) <= 8.0
    if np.any(small):
        x, w = leggauss(32)
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        vals = poly(t) * w * 0.5 * (b - a)
        out[small] = np.exp(1j * np.outer(mu[small], t)) @ vals
    big = ~small
    if np.any(big):
        m = mu[big]
        # repeated integration by parts, exact for polynomials
        derivs = [poly.deriv(k) for k in range(poly.degree() + 1)]
        acc = np.zeros(m.shape, dtype=complex)
        for end, sign in ((b, 1.0), (a, -1.0)):
            s = np.zeros(m.shape, dtype=complex)
            for k, dp in enumerate(derivs):
                s += (-1) ** k * dp(end) / (1j * m) ** (k + 1)
            acc += sign * np.exp(1j * m * end) * s
        out[big] = acc
    return out


def inner_linear_integral(mu, upper: float, beta: int) -> np.ndarray:
    """J(mu) = int_0^upper e^{i mu t} B(t) t^beta dt in closed form."""
    tp = Polynomial([0.0] * beta + [1.0])
    out = np.zeros(np.shape(mu), dtype=complex)
    for a, b, piece in cutoff.pieces(upper):
        out += _poly_exp_integral(piece * tp, a, b, mu)
    return out


def _graded_axis(b: float, beta: float, levels: int, sub: int, nodes: int):
    edges = [b * 2.0**-i for i in range(levels + 1)] + [0.0]
    if b > cutoff.PLATEAU:
        edges.append(cutoff.PLATEAU)
    edges = np.unique(np.array(edges))
    fine = [np.linspace(lo, hi, sub + 1)[:-1] for lo, hi in zip(edges[:-1], edges[1:])]
    fine = np.append(np.concatenate(fine), edges[-1])
    x, w = _gl_panels(fine, nodes)
    return x, w * cutoff.bump(x) * x**beta


LINEAR_CHUNK = 1 << 18


def _linear(phase, functions, spec, m):
    d = phase.dim
    bounds, betas = _coordinate_weights(functions, d)
    beta_m = betas[m]
    if abs(beta_m - round(beta_m)) > 1e-12 or beta_m < 0:
        raise QuadratureError("linear route needs a nonnegative integer power in the linear variable")
    others = [k for k in range(d) if k != m]
    # T(x') = S / x_m
    t_terms = [
        (tuple(a for k, a in enumerate(alpha) if k != m), c) for alpha, c in phase.terms
    ]
    t_phase = Phase.from_terms(d - 1, t_terms)
    levels = max(8, int(math.ceil(math.log2(max(spec.lam, 2.0)))) + 12)
    axes = [
        _graded_axis(bounds[k], betas[k], levels, spec.panels_per_axis // 2 or 1, spec.nodes_per_panel)
        for k in others
    ]
    npts = int(np.prod([a[0].size for a in axes]))
    if npts > spec.max_points:
        raise QuadratureError(f"linear route needs {npts} outer nodes (cap {spec.max_points})")
    pts = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1).reshape(-1, d - 1)
    wts = np.ones(npts)
    for g, (_, w) in enumerate(axes):
        shape = [1] * (d - 1)
        shape[g] = -1
        wts = (wts.reshape([a[0].size for a in axes]) * w.reshape(shape)).ravel()
    upper = bounds[m]
    beta_i = int(round(beta_m))
    total = 0.0 + 0.0j
    # fixed chunk order keeps the sum reproducible
    for lo in range(0, npts, LINEAR_CHUNK):
        sl = slice(lo, lo + LINEAR_CHUNK)
        mu = spec.lam * np.asarray(eval_phase(t_phase, pts[sl]))
        total += complex(np.sum(wts[sl] * inner_linear_integral(mu, upper, beta_i)))
    return complex(total), npts


def _check_dims(phase: Phase, functions):
    d = phase.dim
    if len(functions) != d:
        raise QuadratureError(f"need {d} test functions, got {len(functions)}")
    if d > 4:
        raise QuadratureError(f"quadrature supports d <= 4, got d = {d}")
    if d == 4 and not phase.is_monomial():
        raise QuadratureError("d = 4 quadrature is limited to single-monomial phases")


def eval_lambda_form(
    phase: Phase, functions: Sequence[TestFunction], spec: QuadratureSpec, method: str = "auto"
) -> LambdaResult:
    """Approximate Lambda_d with a panels vs 2x panels convergence check."""
    _check_dims(phase, functions)
    if method not in ("auto", "general", "linear"):
        raise QuadratureError(f"unknown method {method!r}")
    m = linear_variable(phase)
    chosen = method
    if method == "auto":
        bounds, betas = _coordinate_weights(functions, phase.dim)
        axes_cost = 1
        lip = _derivative_bounds(phase, bounds)
        for k in range(phase.dim):
            osc = spec.lam * lip[k] * bounds[k] / (2 * math.pi)
            n = max(spec.refined().panels_per_axis, math.ceil(osc) * spec.oversample * 2)
            axes_cost *= (n + 1) * spec.nodes_per_panel
        chosen = "general" if (axes_cost <= spec.max_points or m is None) else "linear"
    if chosen == "linear" and m is None:
        raise QuadratureError("no variable enters every term linearly")

    def run(s):
        if chosen == "general":
            return _general(phase, functions, s)
        return _linear(phase, functions, s, m)

    coarse, _ = run(spec)
    fine, npts = run(spec.refined())
    scale = max(abs(fine), 1e-300)
    rel = abs(fine - coarse) / scale
    return LambdaResult(fine, coarse, bool(rel < CONVERGENCE_TOL), float(rel), chosen, npts)
