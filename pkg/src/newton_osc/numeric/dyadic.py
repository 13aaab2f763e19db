"""The truncated dyadic min-sum that controls the decay of Lambda_d.

With eps_k = 2^-j_k, boundary point alpha = delta v and vertices alpha^i, the
summand is

    min{ 2^(-j.v), min_i lam^(-1/gamma) 2^(j.(alpha^i/gamma - v)) },

summed over j in prod_k [0, ceil(c_k log2 lam)] with c_k = 1/(delta v_k).

Only vertices are needed: the exponent j.(alpha'/gamma - v) is linear in
alpha', so over conv(vertices) its minimum sits at a vertex, and moving along
a recession direction e_k adds j_k/gamma >= 0, which never lowers it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .._rational import to_fraction


class DyadicError(ValueError):
    pass


def _grid(c: Sequence[float], lam: float) -> np.ndarray:
    log_lam = math.log2(lam)
    tops = [int(math.ceil(float(ck) * log_lam - 1e-12)) for ck in c]
    axes = [np.arange(t + 1, dtype=float) for t in tops]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(c))


def dyadic_min_sum(vertices, delta, gamma, lam: float, c: Sequence) -> float:
    """Evaluate the truncated sum; ``c`` holds c_k = 1/(delta v_k)."""
    if not len(vertices):
        raise DyadicError("vertex list is empty")
    delta, gamma, lam = float(delta), float(gamma), float(lam)
    if delta <= 0 or gamma <= 0:
        raise DyadicError("delta and gamma must be positive")
    if lam < 2:
        raise DyadicError(f"lambda must be >= 2, got {lam}")
    c = np.asarray([float(a) for a in c])
    if np.any(c <= 0):
        raise DyadicError("cutoff vector must be positive")
    verts = np.asarray(vertices, dtype=float)
    if verts.shape[1] != c.size:
        raise DyadicError("vertex length does not match the cutoff vector")
    v = 1.0 / (delta * c)
    j = _grid(c, lam)
    # exponents in base 2; the minimum of powers is the power of the minimum
    first = -(j @ v)
    second = -math.log2(lam) / gamma + j @ (verts / gamma - v).T
    expo = np.minimum(first, second.min(axis=1))
    return float(math.fsum(np.exp2(expo)))


def cutoff_vector(delta, v: Sequence) -> list[Fraction]:
    d = to_fraction(delta)
    return [1 / (d * to_fraction(a)) for a in v]


@dataclass(frozen=True)
class Envelope:
    rate: Fraction
    log_power: int
    regime: str

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return lam ** -float(self.rate) * np.log2(lam) ** self.log_power


def envelope(delta, gamma, d: int, m: int) -> Envelope:
    """Predicted size of the sum; m counts the independent vectors whose
    convex hull contains the boundary point."""
    delta, gamma = to_fraction(delta), to_fraction(gamma)
    if delta > gamma:
        return Envelope(1 / delta, d - m, "above-critical")
    if delta == gamma:
        return Envelope(1 / delta, d, "critical")
    return Envelope(1 / gamma, 0, "below-critical")


@dataclass(frozen=True)
class TailCheck:
    start: int
    tail: Fraction | float
    ratio: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.ratio <= self.bound * (1 + 1e-12)


def tail_bound_check(delta, v_k, lam: float) -> TailCheck:
    """Discarded tail sum_{j >= c log2 lam} 2^(-j v_k) against lam^(-1/delta).

    The start index is J = ceil(c log2 lam) with c = 1/(delta v_k), so
    J v_k >= log2(lam)/delta and the tail 2^(-J v_k)/(1 - 2^(-v_k)) is at
    most lam^(-1/delta)/(1 - 2^(-v_k)).
    """
    delta = float(delta)
    vk = float(v_k)
    if vk <= 0:
        raise DyadicError("v_k must be positive")
    log_lam = math.log2(lam)
    start = int(math.ceil(log_lam / (delta * vk) - 1e-12))
    q = 1.0 - 2.0**-vk
    # logs keep lam near 2 and huge lam both finite
    log_ratio = -start * vk + log_lam / delta
    ratio = 2.0**log_ratio / q
    tail = 2.0 ** (-start * vk) / q
    return TailCheck(start, tail, ratio, 1.0 / q)
