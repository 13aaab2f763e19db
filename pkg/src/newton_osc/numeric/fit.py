"""Least-squares fits of value ~ C t^-r log^s t."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_LOG_POWERS = (0, 1, 2, 3)


class FitError(ValueError):
    pass


@dataclass
class RateFit:
    samples: list[tuple[float, float]]
    rate: float
    log_power: int
    constant: float
    max_rel_residual: float
    residual: float
    by_log_power: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "samples": [list(s) for s in self.samples],
            "rate": self.rate,
            "log_power": self.log_power,
            "constant": self.constant,
            "max_rel_residual": self.max_rel_residual,
            "residual": self.residual,
            "rate_by_log_power": {str(k): v for k, v in self.by_log_power.items()},
        }


def rate_fit(samples: Sequence[tuple[float, float]], log_power_candidates=DEFAULT_LOG_POWERS) -> RateFit:
    """Fit log v = log C - r log t + s log log t for each candidate s.

    Keeps the s with the smallest residual sum of squares; ties (within
    1e-12 relative) go to the smaller s.
    """
    pts = sorted((float(t), float(v)) for t, v in samples)
    if len(pts) < 4:
        raise FitError(f"need at least 4 samples, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FitError("values must be positive and finite")
    if np.any(t <= 1):
        raise FitError("t must exceed 1 so that log log t is defined")
    logt = np.log(t)
    y = np.log(v)
    a = np.column_stack([np.ones_like(logt), -logt])
    best = None
    by_s = {}
    for s in sorted(set(int(k) for k in log_power_candidates)):
        rhs = y - s * np.log(logt)
        coef, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        res = rhs - a @ coef
        rss = float(res @ res)
        by_s[s] = float(coef[1])
        if best is None or rss < best[0] * (1 - 1e-12) - 1e-24:
            best = (rss, s, coef, res)
    rss, s, coef, res = best
    return RateFit(
        samples=pts,
        rate=float(coef[1]),
        log_power=s,
        constant=float(math.exp(coef[0])),
        max_rel_residual=float(np.max(np.abs(np.expm1(res)))),
        residual=rss,
        by_log_power=by_s,
    )


def dyadic_grid(lo: float, hi: float) -> list[float]:
    """Powers of two from lo to hi inclusive (both rounded to powers of two)."""
    a, b = round(math.log2(lo)), round(math.log2(hi))
    if b < a:
        raise FitError(f"empty dyadic range [{lo}, {hi}]")
    return [2.0**k for k in range(a, b + 1)]


def write_records(records: Iterable[dict], fh) -> None:
    """Stream experiment records as JSON lines."""
    for rec in records:
        fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_records(fh) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]
