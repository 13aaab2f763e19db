"""Numeric experiments that compare measured decay with predictions.

Each experiment returns a section dict with its samples (as JSON-lines
records and CSV text), the rate fit, the prediction and a status:
"pass", "fail", or "flagged" when some quadrature did not converge or a
Monte Carlo estimate was inconclusive.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

from ._rational import fmt
from .decay import (
    ExponentTuple,
    decay_to_sublevel,
    off_diagonal_tuple,
    predict,
    sharpness_prediction,
)
from .newton import from_phase
from .numeric import dyadic, quadrature, sublevel
from .numeric.fit import dyadic_grid, rate_fit
from .phase import Phase

RATE_TOL = 0.05


def thread_count() -> int:
    raw = os.environ.get("NEWTON_OSC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    """Ordered map; parallel across grid points when threads are allowed."""
    n = thread_count()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _log_powers(d: int) -> list[int]:
    return list(range(d + 1))


def _status(ok: bool, clean: bool) -> str:
    if not clean:
        return "flagged"
    return "pass" if ok else "fail"


def sharpness_experiment(phase: Phase, p: ExponentTuple, lambdas, normal=None, spec_kw=None):
    """Box test functions of widths lam^-n_k; the quotient |Lambda|/prod||f|| should
    decay like lam^(-1/delta)."""
    spec_kw = spec_kw or {}
    pred = sharpness_prediction(phase, p, normal)
    n = [float(a) for a in pred.normal]

    def one(lam):
        fs = quadrature.sharpness_functions(lam, n)
        res = quadrature.eval_lambda_form(phase, fs, quadrature.QuadratureSpec(lam, **spec_kw))
        norms = quadrature.norm_product(fs, p.reciprocals)
        return lam, res, norms

    runs = _map(one, lambdas)
    records, rows = [], []
    for lam, res, norms in runs:
        ratio = abs(res.value) / norms
        records.append(
            {
                "experiment": "sharpness",
                "lambda": lam,
                "value": abs(res.value),
                "norm_product": norms,
                "ratio": ratio,
                "error": abs(res.value - res.coarse),
                "converged": res.converged,
                "method": res.method,
            }
        )
        rows.append((lam, abs(res.value), norms, ratio))
    d = phase.dim
    fit_ratio = rate_fit([(r[0], r[3]) for r in rows], _log_powers(d))
    fit_form = rate_fit([(r[0], r[1]) for r in rows], _log_powers(d))
    fit_norm = rate_fit([(r[0], r[2]) for r in rows], [0])
    target = float(1 / pred.delta)
    clean = all(r["converged"] for r in records)
    return {
        "mode": "sharpness",
        "prediction": pred.to_dict(),
        "predicted_rate": target,
        "fit": fit_ratio.to_dict(),
        "fit_lambda_form": fit_form.to_dict(),
        "fit_norm_product": fit_norm.to_dict(),
        "records": records,
        "csv": _csv(["lambda", "abs_lambda_form", "norm_product", "ratio"], rows),
        "converged": clean,
        "status": _status(abs(fit_ratio.rate - target) <= RATE_TOL, clean),
    }


def off_diagonal_experiment(lambdas, d: int = 3, spec_kw=None):
    """S = x_1...x_d with indicators of width lam^(-1/2) in the last two
    variables, measured against the off-diagonal tuple."""
    spec_kw = spec_kw or {}
    phase = Phase.monomial((1,) * d)
    p = off_diagonal_tuple(d)

    def one(lam):
        fs = quadrature.off_diagonal_functions(lam, d)
        res = quadrature.eval_lambda_form(phase, fs, quadrature.QuadratureSpec(lam, **spec_kw))
        return lam, res, quadrature.norm_product(fs, p.reciprocals)

    runs = _map(one, lambdas)
    records, rows = [], []
    for lam, res, norms in runs:
        records.append(
            {
                "experiment": "off-diagonal",
                "lambda": lam,
                "value": abs(res.value),
                "norm_product": norms,
                "error": abs(res.value - res.coarse),
                "converged": res.converged,
            }
        )
        rows.append((lam, abs(res.value), norms))
    fit_form = rate_fit([(r[0], r[1]) for r in rows], _log_powers(d))
    fit_norm = rate_fit([(r[0], r[2]) for r in rows], [0])
    form_target = 1.0
    norm_target = 2.0 ** (1 - d) + 1
    clean = all(r["converged"] for r in records)
    ok_form = abs(fit_form.rate - form_target) <= RATE_TOL
    ok_norm = abs(fit_norm.rate - norm_target) <= RATE_TOL
    return {
        "mode": "off-diagonal",
        "exponents": p.labels(),
        "predicted_rate": form_target,
        "predicted_norm_rate": norm_target,
        "fit": fit_form.to_dict(),
        "fit_norm_product": fit_norm.to_dict(),
        "records": records,
        "csv": _csv(["lambda", "abs_lambda_form", "norm_product"], rows),
        "converged": clean,
        "form_ok": ok_form,
        "norm_ok": ok_norm,
        "status": _status(ok_form and ok_norm, clean),
    }


def fixed_f_experiment(phase: Phase, p: ExponentTuple, lambdas, spec_kw=None):
    """f_j = 1 on the unit cube; one fixed input only bounds the decay from
    below, so the check is r_hat >= r_pred - tol."""
    spec_kw = spec_kw or {}
    est = predict(phase, p)
    fs = quadrature.unit_functions(phase.dim)

    def one(lam):
        return lam, quadrature.eval_lambda_form(phase, fs, quadrature.QuadratureSpec(lam, **spec_kw))

    runs = _map(one, lambdas)
    records = [
        {
            "experiment": "fixed-f",
            "lambda": lam,
            "value": abs(res.value),
            "error": abs(res.value - res.coarse),
            "converged": res.converged,
            "method": res.method,
        }
        for lam, res in runs
    ]
    rows = [(r["lambda"], r["value"]) for r in records]
    fit = rate_fit(rows, _log_powers(phase.dim))
    target = float(est.rate)
    clean = all(r["converged"] for r in records)
    return {
        "mode": "fixed-f",
        "predicted_rate": target,
        "predicted_log_power": est.log_power,
        "fit": fit.to_dict(),
        "records": records,
        "csv": _csv(["lambda", "abs_lambda_form"], rows),
        "converged": clean,
        "status": _status(fit.rate >= target - RATE_TOL, clean),
    }


def dyadic_case(vertices, delta, v, m: int, d: int, lambdas):
    """Dyadic min-sum against its envelope for a synthetic vertex list."""
    gamma = 2 ** (d - 1)
    c = dyadic.cutoff_vector(delta, v)
    env = dyadic.envelope(delta, gamma, d, m)
    rows = []
    for lam in lambdas:
        val = dyadic.dyadic_min_sum(vertices, delta, gamma, lam, c)
        rows.append((lam, val, float(env(lam)), val / float(env(lam))))
    fit = rate_fit([(r[0], r[1]) for r in rows], _log_powers(d))
    ratios = [r[3] for r in rows]
    return {
        "regime": env.regime,
        "envelope": {"rate": fmt(env.rate), "log_power": env.log_power},
        "predicted_rate": float(env.rate),
        "fit": fit.to_dict(),
        "ratio_min": min(ratios),
        "ratio_max": max(ratios),
        "records": [
            {"experiment": "dyadic-sum", "lambda": r[0], "value": r[1], "error": 0.0, "converged": True}
            for r in rows
        ],
        "csv": _csv(["lambda", "sum", "envelope", "ratio"], rows),
    }


def dyadic_experiment(phase: Phase, p: ExponentTuple, lambdas):
    """Dyadic min-sum built from the phase's own polyhedron."""
    est = predict(phase, p)
    poly = from_phase(phase)
    delta, point = poly.newton_distance(p.direction)
    vecs, _ = poly.convex_decomposition(point)
    out = dyadic_case(poly.vertices, delta, p.direction, len(vecs), phase.dim, lambdas)
    out["mode"] = "dyadic-sum"
    out["converged"] = True
    out["status"] = _status(abs(out["fit"]["rate"] - float(est.rate)) <= RATE_TOL, True)
    return out


def sublevel_experiment(phase: Phase, eps_values, samples: int, seed: int):
    """Monte Carlo sublevel volumes against the transferred decay bound
    (direction (1,...,1), i.e. all exponents infinite)."""
    d = phase.dim
    est = predict(phase, ExponentTuple([math.inf] * d))
    bound = decay_to_sublevel(est)
    vols = sublevel.monte_carlo(phase, list(eps_values), n=samples, seed=seed)
    rows = [(v.eps, v.estimate, v.error, float(bound(v.eps))) for v in vols]
    inconclusive = any(v.inconclusive for v in vols)
    records = [
        {
            "experiment": "sublevel",
            "epsilon": v.eps,
            "value": v.estimate,
            "error": v.error,
            "converged": not v.inconclusive,
        }
        for v in vols
    ]
    usable = [(1 / r[0], r[1]) for r in rows if r[1] > 0]
    fit = rate_fit(usable, _log_powers(d)) if len(usable) >= 4 else None
    target = float(bound.exponent)
    ok = fit is not None and fit.rate >= target - RATE_TOL
    return {
        "mode": "sublevel",
        "bound": bound.to_dict(),
        "predicted_exponent": target,
        "fit": fit.to_dict() if fit else None,
        "envelope_respected": all(r[1] <= r[3] for r in rows),
        "records": records,
        "csv": _csv(["epsilon", "volume", "error", "envelope"], rows),
        "converged": not inconclusive,
        "status": _status(ok, not inconclusive and fit is not None),
    }


def lambda_grid(lo: float, hi: float) -> list[float]:
    return dyadic_grid(lo, hi)


__all__ = [
    "dyadic_case",
    "dyadic_experiment",
    "fixed_f_experiment",
    "lambda_grid",
    "off_diagonal_experiment",
    "sharpness_experiment",
    "sublevel_experiment",
]
