"""Exponent algebra and predicted decay rates for the oscillatory
Loomis-Whitney form.

All exponent arithmetic is exact: finite exponents are Fractions and an
infinite exponent contributes reciprocal 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._rational import dot, fmt, to_fraction
from .newton import NewtonPolyhedron, from_phase
from .nondeg import DegeneratePhaseError, NondegeneracyVerdict, check_nondegenerate
from .phase import Phase

INF = math.inf


class ExponentError(ValueError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def parse_exponent(token) -> Fraction | float:
    """'p/q', a decimal, an int, or 'inf'."""
    if isinstance(token, (int, Fraction)):
        return Fraction(token)
    if isinstance(token, float):
        return INF if math.isinf(token) else to_fraction(token)
    text = str(token).strip().lower()
    if text in ("inf", "infinity", "+inf", "oo"):
        return INF
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ExponentError(f"cannot parse exponent {token!r}") from None


@dataclass(frozen=True)
class ExponentTuple:
    p: tuple

    def __init__(self, p):
        vals = tuple(parse_exponent(x) for x in p)
        for x in vals:
            if x != INF and x < 1:
                raise ExponentError(f"exponents must be >= 1, got {fmt(x)}")
        object.__setattr__(self, "p", vals)

    @classmethod
    def parse(cls, text: str) -> "ExponentTuple":
        return cls([t for t in text.split(",") if t.strip()])

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def reciprocals(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(0) if x == INF else 1 / x for x in self.p)

    @property
    def P(self) -> Fraction:
        return sum(self.reciprocals, Fraction(0))

    @property
    def direction(self) -> tuple[Fraction, ...]:
        """v_j = 1 - P + 1/p_j."""
        big_p = self.P
        return tuple(1 - big_p + r for r in self.reciprocals)

    @property
    def has_infinite(self) -> bool:
        return any(x == INF for x in self.p)

    def labels(self) -> list[str]:
        return ["inf" if x == INF else fmt(x) for x in self.p]

    def permuted(self, perm: Sequence[int]) -> "ExponentTuple":
        return ExponentTuple([self.p[i] for i in perm])

    def __str__(self):
        return "(" + ", ".join(self.labels()) + ")"


def from_reciprocals(recips: Sequence[Fraction]) -> ExponentTuple:
    return ExponentTuple([INF if r == 0 else 1 / Fraction(r) for r in recips])


def on_diagonal_threshold(d: int) -> Fraction:
    """p(d) = (d-1) 2^(d-1) / (2^(d-1) - 1)."""
    if d < 3:
        raise ExponentError(f"p(d) is defined for d >= 3, got {d}")
    g = 2 ** (d - 1)
    return Fraction((d - 1) * g, g - 1)


def off_diagonal_tuple(d: int) -> ExponentTuple:
    """(2^(d-1), 2^(d-1), 2^(d-2), ..., 4, 2)."""
    if d < 3:
        raise ExponentError(f"the off-diagonal tuple needs d >= 3, got {d}")
    return ExponentTuple([2 ** (d - 1)] + [2 ** (d + 1 - j) for j in range(2, d + 1)])


@dataclass
class HypothesisCheck:
    status: str  # "off-diagonal-ok" | "on-diagonal-ok" | "neither"
    off_diagonal: bool
    on_diagonal: bool
    direction_positive: bool
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "off_diagonal": self.off_diagonal,
            "on_diagonal": self.on_diagonal,
            "direction_positive": self.direction_positive,
            "failures": self.failures,
        }


def _ge(x, bound) -> bool:
    return x == INF or x >= bound


def validate_hypotheses(p: ExponentTuple) -> HypothesisCheck:
    d = p.d
    failures = []
    if d < 3:
        return HypothesisCheck("neither", False, False, False, [f"d = {d} < 3"])
    off_bounds = [2 ** (d - 1)] + [2 ** (d + 1 - j) for j in range(2, d + 1)]
    off = True
    for j, (x, b) in enumerate(zip(p.p, off_bounds), start=1):
        if not _ge(x, b):
            off = False
            failures.append(f"off-diagonal: p_{j} = {p.labels()[j - 1]} < {b}")
    pd = on_diagonal_threshold(d)
    on = True
    for j, x in enumerate(p.p, start=1):
        if not _ge(x, pd):
            on = False
            failures.append(f"on-diagonal: p_{j} = {p.labels()[j - 1]} < p({d}) = {fmt(pd)}")
    v = p.direction
    positive = all(a > 0 for a in v)
    if not positive:
        failures.append("some 1 - P + 1/p_j <= 0")
    status = "off-diagonal-ok" if off else ("on-diagonal-ok" if on else "neither")
    return HypothesisCheck(status, off, on, positive, failures)


REGIMES = ("above-critical", "critical", "below-critical")


@dataclass
class DecayEstimate:
    """|Lambda_d| <~ lambda^-rate log^log_power(lambda) prod ||f_j||_{p_j}."""

    rate: Fraction
    log_power: int
    regime: str
    delta: Fraction
    k: int
    d: int
    boundary_point: tuple[Fraction, ...] = ()
    notes: list[str] = field(default_factory=list)

    @property
    def gamma(self) -> int:
        return 2 ** (self.d - 1)

    def to_dict(self) -> dict:
        out = {
            "rate": fmt(self.rate),
            "log_power": self.log_power,
            "regime": self.regime,
            "delta": fmt(self.delta),
            "k": self.k,
        }
        if self.boundary_point:
            out["boundary_point"] = [fmt(a) for a in self.boundary_point]
        if self.notes:
            out["notes"] = self.notes
        return out

    @classmethod
    def from_dict(cls, data: dict, d: int) -> "DecayEstimate":
        return cls(
            Fraction(data["rate"]),
            int(data["log_power"]),
            data["regime"],
            Fraction(data["delta"]),
            int(data["k"]),
            d,
        )


def estimate_from_delta(delta: Fraction, k: int, d: int) -> DecayEstimate:
    """Regime case logic against gamma = 2^(d-1).

    Above critical the log power is k - 1 (k = codimension of the face hit);
    at delta = gamma the merged statement carries log^d; below critical the
    rate saturates at 2^(1-d) with no log.
    """
    gamma = 2 ** (d - 1)
    delta = Fraction(delta)
    if delta > gamma:
        return DecayEstimate(1 / delta, k - 1, "above-critical", delta, k, d)
    if delta == gamma:
        return DecayEstimate(1 / delta, d, "critical", delta, k, d)
    return DecayEstimate(Fraction(1, gamma), 0, "below-critical", delta, k, d)


def _check_dims(phase: Phase, p: ExponentTuple):
    if phase.dim != p.d:
        raise ExponentError(f"phase has dim {phase.dim} but {p.d} exponents were given")


def predict(
    phase: Phase,
    p: ExponentTuple,
    verdict: NondegeneracyVerdict | None = None,
    poly: NewtonPolyhedron | None = None,
) -> DecayEstimate:
    _check_dims(phase, p)
    hyp = validate_hypotheses(p)
    if hyp.status == "neither" or not hyp.direction_positive:
        raise ExponentError("exponents satisfy neither hypothesis set", hyp.to_dict())
    if verdict is None:
        verdict = check_nondegenerate(phase)
    if not verdict.nondegenerate:
        raise DegeneratePhaseError(f"phase is degenerate; witness {verdict.witness}", verdict)
    poly = poly or from_phase(phase)
    delta, point = poly.newton_distance(p.direction)
    est = estimate_from_delta(delta, point.codim, p.d)
    est.boundary_point = point.coords
    if p.has_infinite:
        est.notes.append("upper-bound regime only (infinite exponent)")
    if est.regime == "below-critical":
        est.notes.append("upper bound only; sharpness not established below critical")
    return est


def interpolate_exponents(p: ExponentTuple, other: ExponentTuple, theta1) -> ExponentTuple:
    """1/q_j = theta1/p_j + (1 - theta1)/other_j."""
    t1 = to_fraction(theta1)
    if not 0 < t1 < 1:
        raise ExponentError(f"theta1 must lie in (0, 1), got {theta1}")
    if p.d != other.d:
        raise ExponentError("tuples have different lengths")
    return from_reciprocals(
        [t1 * a + (1 - t1) * b for a, b in zip(p.reciprocals, other.reciprocals)]
    )


def interpolate_tuple(p: ExponentTuple, theta1) -> ExponentTuple:
    """Interpolate against the Loomis-Whitney tuple (d-1, ..., d-1)."""
    return interpolate_exponents(p, ExponentTuple([p.d - 1] * p.d), theta1)


@dataclass
class IdentityCheck:
    delta: Fraction
    delta_prime: Fraction
    check: bool


def interpolated_delta_identity(phase: Phase, p: ExponentTuple, theta1) -> IdentityCheck:
    """delta' for the interpolated tuple should equal delta / theta1."""
    _check_dims(phase, p)
    t1 = to_fraction(theta1)
    q = interpolate_tuple(p, t1)
    poly = from_phase(phase)
    delta, _ = poly.newton_distance(p.direction)
    delta_q, _ = poly.newton_distance(q.direction)
    target = delta / t1
    ok = abs(float((delta_q - target) / target)) < 1e-9
    return IdentityCheck(delta, delta_q, ok)


@dataclass
class SublevelBound:
    """|{|S| < eps}| <~ eps^exponent log^log_power(1/eps)."""

    exponent: Fraction
    log_power: int
    submultiplicativity_constant: float

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        return eps ** float(self.exponent) * np.log(1 / eps) ** self.log_power

    def to_dict(self) -> dict:
        return {
            "exponent": fmt(self.exponent),
            "log_power": self.log_power,
            "A": self.submultiplicativity_constant,
        }


def decay_to_sublevel(est: DecayEstimate) -> SublevelBound:
    """Transfer M(lambda) = lambda^-r log^s(2+lambda) to the sublevel bound M(1/eps).

    M(l1 l2) <= A M(l1) M(l2) with A = (2/log 2)^s: the power part is exactly
    multiplicative and log(2 + l1 l2) <= log(2+l1) + log(2+l2)
    <= (2/log 2) log(2+l1) log(2+l2) because each log is >= log 2.
    """
    if est.rate <= 0:
        raise ExponentError(f"decay rate must be positive, got {fmt(est.rate)}")
    return SublevelBound(est.rate, est.log_power, (2 / math.log(2)) ** est.log_power)


def submultiplicativity_holds(s: int, lambdas=None, rate: float = 0.0) -> bool:
    """Grid check of M(l1 l2) <= A M(l1) M(l2) for M = l^-rate log^s(2+l), l >= 2."""
    lam = np.geomspace(2.0, 1e6, 60) if lambdas is None else np.asarray(lambdas, float)
    a = (2 / math.log(2)) ** s
    l1, l2 = np.meshgrid(lam, lam)

    def m(x):
        return x**-rate * np.log(2 + x) ** s

    return bool(np.all(m(l1 * l2) <= a * m(l1) * m(l2) * (1 + 1e-12)))


def log_sum_product_holds(n: int = 100, hi: float = 20.0) -> bool:
    """x + y <= (2/log 2) x y on an n x n grid of [log 2, hi]^2."""
    g = np.linspace(math.log(2), hi, n)
    x, y = np.meshgrid(g, g)
    return bool(np.all(x + y <= (2 / math.log(2)) * x * y * (1 + 1e-12)))


@dataclass
class SharpnessExponents:
    norm_product: Fraction
    form: Fraction
    ratio: Fraction
    normal: tuple[Fraction, ...]
    delta: Fraction

    def to_dict(self) -> dict:
        return {
            "norm_product": fmt(self.norm_product),
            "lambda_form": fmt(self.form),
            "ratio": fmt(self.ratio),
            "normal": [fmt(a) for a in self.normal],
            "delta": fmt(self.delta),
        }


def default_normal(poly: NewtonPolyhedron, p: ExponentTuple) -> tuple[Fraction, ...]:
    """Mean of the facet normals tight at delta*v; supporting and tight by convexity."""
    _, point = poly.newton_distance(p.direction)
    normals = [poly.facets[i] for i in point.tight_facets]
    m = len(normals)
    return tuple(sum((n[j] for n in normals), Fraction(0)) / m for j in range(poly.dim))


def sharpness_prediction(phase: Phase, p: ExponentTuple, n=None) -> SharpnessExponents:
    """Exponents of lambda for the box test functions of widths lambda^-n_k.

    prod ||f_j||_{p_j} ~ lambda^(1/delta - 1.n), |Lambda_d| ~ lambda^(-1.n),
    so the quotient is lambda^(-1/delta).
    """
    _check_dims(phase, p)
    poly = from_phase(phase)
    if n is None:
        n = default_normal(poly, p)
    nq = tuple(to_fraction(a) for a in n)
    if len(nq) != p.d or any(a < 0 for a in nq):
        raise ExponentError("normal must be a nonnegative vector of length d")
    if any(dot(nq, v) < 1 for v in poly.vertices):
        raise ExponentError("normal does not define a supporting hyperplane of N(S)")
    delta, point = poly.newton_distance(p.direction)
    if abs(float(dot(nq, point.coords)) - 1) > 1e-9:
        raise ExponentError(
            f"normal is not tight at delta*v: (delta v).n = {float(dot(nq, point.coords))}"
        )
    total = sum(nq, Fraction(0))
    # direct from the construction: ||f_j||_{p_j} = lambda^{-(1.n - n_j)/p_j}
    norm_exp = -sum(((total - nj) * r for nj, r in zip(nq, p.reciprocals)), Fraction(0))
    return SharpnessExponents(norm_exp, -total, -total - norm_exp, nq, delta)
