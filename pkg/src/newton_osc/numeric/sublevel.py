"""Volumes of sublevel sets {x in [0,1]^d : |S(x)| < eps}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..phase import Phase, eval_phase

BATCH = 1 << 20


@dataclass
class VolumeEstimate:
    eps: float
    estimate: float
    error: float
    method: str
    inconclusive: bool = False

    def to_dict(self) -> dict:
        return {
            "epsilon": self.eps,
            "value": self.estimate,
            "error": self.error,
            "method": self.method,
            "inconclusive": self.inconclusive,
        }


def _check_eps(eps_list):
    for e in eps_list:
        if not 0 < e <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {e}")


def monte_carlo(
    phase: Phase, eps: float | Sequence[float], n: int = 1_000_000, seed: int = 0
) -> list[VolumeEstimate]:
    """Fraction of n uniform points with |S| < eps, for every eps at once.

    Points come from a Philox generator keyed by ``seed`` and are drawn in
    fixed-size batches, so the estimate does not depend on the machine.
    """
    eps_list = [float(e) for e in np.atleast_1d(eps)]
    _check_eps(eps_list)
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.Generator(np.random.Philox(seed))
    thresholds = np.asarray(eps_list)
    counts = np.zeros(len(eps_list), dtype=np.int64)
    left = n
    while left:
        m = min(BATCH, left)
        vals = np.abs(eval_phase(phase, rng.random((m, phase.dim))))
        vals.sort()
        counts += np.searchsorted(vals, thresholds, side="left")
        left -= m
    out = []
    for e, c in zip(eps_list, counts):
        p = c / n
        # with no hits use the rule-of-three bound as the error bar
        err = math.sqrt(p * (1 - p) / n) if c else 3.0 / n
        out.append(VolumeEstimate(e, float(p), float(err), "monte-carlo", inconclusive=c == 0))
    return out


def grid(phase: Phase, eps: float | Sequence[float], m: int = 200) -> list[VolumeEstimate]:
    """Midpoint rule on m^d cells; the error bar counts cells whose corner
    range straddles the threshold (those are the only undecided cells)."""
    eps_list = [float(e) for e in np.atleast_1d(eps)]
    _check_eps(eps_list)
    d = phase.dim
    h = 1.0 / m
    mids = (np.arange(m) + 0.5) * h
    corners = np.arange(m + 1) * h
    counts = np.zeros(len(eps_list))
    unsure = np.zeros(len(eps_list))
    rest_mid = np.stack(np.meshgrid(*([mids] * (d - 1)), indexing="ij"), axis=-1) if d > 1 else None
    rest_cor = (
        np.stack(np.meshgrid(*([corners] * (d - 1)), indexing="ij"), axis=-1) if d > 1 else None
    )
    thresholds = np.asarray(eps_list)
    for i in range(m):
        if d > 1:
            pm = np.concatenate([np.full(rest_mid.shape[:-1] + (1,), mids[i]), rest_mid], -1)
            vals = np.abs(eval_phase(phase, pm)).ravel()
            lo_c = np.concatenate([np.full(rest_cor.shape[:-1] + (1,), corners[i]), rest_cor], -1)
            hi_c = np.concatenate([np.full(rest_cor.shape[:-1] + (1,), corners[i + 1]), rest_cor], -1)
            cv = np.stack([np.abs(eval_phase(phase, lo_c)), np.abs(eval_phase(phase, hi_c))])
            # cell corner extremes (|S| is monotone per coordinate on monomial-type phases)
            cmin, cmax = _cell_extremes(cv, d)
        else:
            vals = np.abs(eval_phase(phase, np.array([[mids[i]]]))).ravel()
            cv = np.abs(eval_phase(phase, np.array([[corners[i]], [corners[i + 1]]])))
            cmin, cmax = np.array([cv.min()]), np.array([cv.max()])
        vals.sort()
        counts += np.searchsorted(vals, thresholds, side="left")
        unsure += ((cmin[None, :] < thresholds[:, None]) & (cmax[None, :] >= thresholds[:, None])).sum(axis=1)
    cell = h**d
    return [
        VolumeEstimate(e, float(c * cell), float(u * cell), "grid", inconclusive=c == 0)
        for e, c, u in zip(eps_list, counts, unsure)
    ]


def _cell_extremes(cv: np.ndarray, d: int):
    """Min/max of |S| over the 2^d corners of each cell from the corner grid."""
    lo = np.minimum(cv[0], cv[1])
    hi = np.maximum(cv[0], cv[1])
    for ax in range(d - 1):
        n = lo.shape[ax] - 1
        a = [slice(None)] * (d - 1)
        b = [slice(None)] * (d - 1)
        a[ax] = slice(0, n)
        b[ax] = slice(1, n + 1)
        lo = np.minimum(lo[tuple(a)], lo[tuple(b)])
        hi = np.maximum(hi[tuple(a)], hi[tuple(b)])
    return lo.ravel(), hi.ravel()


def xyz_volume(eps: float) -> float:
    """|{x in [0,1]^3 : xyz < eps}| = eps (1 + L + L^2/2), L = log(1/eps), eps <= 1."""
    if eps >= 1:
        return 1.0
    L = math.log(1 / eps)
    return eps * (1 + L + L * L / 2)


def xyz_squared_volume(eps: float) -> float:
    """Sublevel volume of x^2 y^2 z^2, i.e. of xyz at sqrt(eps)."""
    return xyz_volume(math.sqrt(eps))


def sublevel_volume(phase: Phase, eps: float, method: str = "monte-carlo", **kw) -> VolumeEstimate:
    if method == "monte-carlo":
        return monte_carlo(phase, eps, **kw)[0]
    if method == "grid":
        return grid(phase, eps, **kw)[0]
    raise ValueError(f"unknown method {method!r}")
