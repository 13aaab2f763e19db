"""The fixed cutoff psi(x) = prod_j B(x_j).

B is 1 on [0, 1/2], falls to 0 on [1/2, 1] through a quintic smoothstep and
vanishes beyond 1; it is C^2 with the even extension smooth at 0. Only the
orthant [0, 1]^d is integrated.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import Polynomial

NAME = "plateau-quintic"
PLATEAU = 0.5

# smoothstep s(u) = 10u^3 - 15u^4 + 6u^5, u = 2t - 1 on [1/2, 1]
_s = Polynomial([0, 0, 0, 10, -15, 6])
_u = Polynomial([-1, 2])
FALL = Polynomial([1.0]) - _s(_u)
FLAT = Polynomial([1.0])

# integral of B over [0, 1]: 1/2 + (1/2) * (1 - 1/2)
INTEGRAL = 0.75


def bump(t):
    t = np.abs(np.asarray(t, dtype=float))
    out = np.where(t <= PLATEAU, 1.0, FALL(np.clip(t, PLATEAU, 1.0)))
    return np.where(t >= 1.0, 0.0, out)


def psi(x):
    x = np.asarray(x, dtype=float)
    return np.prod(bump(x), axis=-1)


def pieces(upper: float) -> list[tuple[float, float, Polynomial]]:
    """Polynomial pieces of B on [0, upper] as (a, b, poly)."""
    upper = min(float(upper), 1.0)
    out = [(0.0, min(upper, PLATEAU), FLAT)]
    if upper > PLATEAU:
        out.append((PLATEAU, upper, FALL))
    return out


def lipschitz_bounds():
    """sup |B'| and sup |B''| (bounded derivatives of the profile)."""
    t = np.linspace(PLATEAU, 1.0, 20001)
    return float(np.abs(FALL.deriv()(t)).max()), float(np.abs(FALL.deriv(2)(t)).max())
