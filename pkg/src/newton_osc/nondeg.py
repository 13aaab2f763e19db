"""Numeric nondegeneracy test and the growth estimates for D_d S."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._rational import dot
from .newton import Face, NewtonPolyhedron, from_phase
from .phase import Phase, eval_phase, face_restriction, mixed_derivative, partial_derivative

DEFAULT_GRID_H = 2.0**-6
ZERO_TOL = 1e-9
SAMPLES_PER_AXIS = 5


class DegeneratePhaseError(ValueError):
    def __init__(self, message: str, verdict: "NondegeneracyVerdict"):
        super().__init__(message)
        self.verdict = verdict


@dataclass
class NondegeneracyVerdict:
    status: str  # "nondegenerate" | "degenerate"
    resolution: float
    witness: list[float] | None = None
    face: list[list[int]] | None = None
    value: float | None = None
    faces_checked: int = 0

    @property
    def nondegenerate(self) -> bool:
        return self.status == "nondegenerate"

    def to_dict(self) -> dict:
        out = {
            "status": self.status if self.status == "degenerate" else "nondegenerate (numeric)",
            "resolution": self.resolution,
            "faces_checked": self.faces_checked,
        }
        if self.witness is not None:
            out["witness"] = {"x": self.witness, "face": self.face, "D_d S_F": self.value}
        return out


def face_terms(poly: NewtonPolyhedron, face: Face, indices) -> list[tuple[int, ...]]:
    """Phase multi-indices lying on ``face`` (not only its vertices)."""
    containing = [
        n
        for n in poly.facets
        if all(dot(n, v) == 1 for v in face.vertices) and all(n[j] == 0 for j in face.rays)
    ]
    return [a for a in indices if all(dot(n, a) == 1 for n in containing)]


def _bisect_edge(dpoly: Phase, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa = eval_phase(dpoly, a)
    lo, hi = a.copy(), b.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = eval_phase(dpoly, mid)
        if abs(fm) < ZERO_TOL * 1e-3:
            return mid
        if np.sign(fm) == np.sign(fa):
            lo, fa = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan(dpoly: Phase, d: int, h: float) -> np.ndarray | None:
    """First zero or sign change of ``dpoly`` on {+-h, ..., +-1}^d, refined."""
    k = int(round(1.0 / h))
    axis = np.concatenate([-np.arange(k, 0, -1) * h, np.arange(1, k + 1) * h])
    n = axis.size
    # edges between index k-1 (-h) and k (+h) cross a coordinate hyperplane
    valid = np.ones(n - 1, dtype=bool)
    valid[k - 1] = False
    rest = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1) if d > 1 else None
    prev = None
    prev_pts = None
    for i in range(n):
        if d > 1:
            pts = np.concatenate([np.full(rest.shape[:-1] + (1,), axis[i]), rest], axis=-1)
        else:
            pts = np.array([axis[i]])
        vals = np.asarray(eval_phase(dpoly, pts))
        hit = np.argwhere(np.abs(vals) < ZERO_TOL)
        if hit.size:
            return pts[tuple(hit[0])]
        sgn = np.sign(vals)
        for ax in range(d - 1):
            a = np.take(sgn, range(n - 1), axis=ax)
            b = np.take(sgn, range(1, n), axis=ax)
            shape = [1] * (d - 1)
            shape[ax] = n - 1
            change = (a != b) & valid.reshape(shape)
            idx = np.argwhere(change)
            if idx.size:
                j = tuple(idx[0])
                j2 = list(j)
                j2[ax] += 1
                return _bisect_edge(dpoly, pts[j], pts[tuple(j2)])
        if prev is not None and valid[i - 1]:
            idx = np.argwhere(prev != sgn)
            if idx.size:
                j = tuple(idx[0])
                return _bisect_edge(dpoly, prev_pts[j], pts[j])
        prev, prev_pts = sgn, pts
    return None


def check_nondegenerate(phase: Phase, grid_h: float = DEFAULT_GRID_H) -> NondegeneracyVerdict:
    """Test D_d S_F != 0 off the coordinate hyperplanes for every compact face F.

    Single-term faces are decided exactly (D_d of a monomial with all
    exponents >= 1 never vanishes there); other faces are sampled on the
    grid {+-h, +-2h, ..., +-1}^d with sign changes refined by bisection.
    """
    if not 0 < grid_h <= 0.1:
        raise ValueError(f"grid_h must lie in (0, 0.1], got {grid_h}")
    poly = from_phase(phase)
    faces = [f for f in poly.faces() if f.compact]
    for face in faces:
        members = face_terms(poly, face, phase.indices)
        dpoly = mixed_derivative(face_restriction(phase, members))
        if dpoly.is_monomial():
            continue
        if dpoly.is_zero():
            witness = np.full(phase.dim, 0.5)
        else:
            witness = _scan(dpoly, phase.dim, grid_h)
        if witness is not None:
            return NondegeneracyVerdict(
                "degenerate",
                grid_h,
                witness=[float(a) for a in witness],
                face=[list(v) for v in face.vertices],
                value=float(eval_phase(dpoly, witness)),
                faces_checked=len(faces),
            )
    return NondegeneracyVerdict("nondegenerate", grid_h, faces_checked=len(faces))


@dataclass
class GrowthReport:
    kind: str  # "upper" | "lower"
    scales: list[list[float]]
    constants: list[float]
    beta: list[int] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def uniformity_ratio(self) -> float:
        c = np.asarray(self.constants)
        if np.all(c == 0):
            return 1.0
        return float(c.max() / c.min()) if c.min() > 0 else float("inf")

    @property
    def inf(self) -> float:
        return float(min(self.constants))

    @property
    def sup(self) -> float:
        return float(max(self.constants))

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "scales": self.scales,
            "constants": self.constants,
            "uniformity_ratio": self.uniformity_ratio,
            "inf": self.inf,
            "sup": self.sup,
        }
        if self.beta is not None:
            out["beta"] = self.beta
        return out


def _scale_vectors(scales, d: int) -> list[np.ndarray]:
    out = []
    for s in scales:
        eps = np.full(d, float(s)) if np.ndim(s) == 0 else np.asarray(s, dtype=float)
        if eps.shape != (d,) or np.any(eps <= 0) or np.any(eps > 0.5):
            raise ValueError(f"scale {s} must lie in (0, 1/2] per coordinate")
        out.append(eps)
    return out


def _box_grid(eps: np.ndarray) -> np.ndarray:
    axes = [np.linspace(e, 4 * e, SAMPLES_PER_AXIS) for e in eps]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, eps.size)


def _vertex_max(x: np.ndarray, vertices, shift: Sequence[int]) -> np.ndarray:
    """max over vertices of |x^(alpha - shift)| for each row of x."""
    logs = np.log(np.abs(x))
    exps = np.asarray(vertices, dtype=float) - np.asarray(shift, dtype=float)
    return np.exp((logs @ exps.T).max(axis=1))


def check_upper_growth(phase: Phase, beta: Sequence[int], scales) -> GrowthReport:
    """Smallest C with |d^beta S| <= C max_vertices |x^(alpha-beta)| on each eps-box."""
    poly = from_phase(phase)
    deriv = partial_derivative(phase, beta)
    constants = []
    vecs = _scale_vectors(scales, phase.dim)
    for eps in vecs:
        x = _box_grid(eps)
        num = np.abs(eval_phase(deriv, x)) if not deriv.is_zero() else np.zeros(len(x))
        constants.append(float(np.max(num / _vertex_max(x, poly.vertices, beta))))
    return GrowthReport("upper", [v.tolist() for v in vecs], constants, beta=list(beta))


def check_lower_growth(
    phase: Phase, scales, verdict: NondegeneracyVerdict | None = None
) -> GrowthReport:
    """c(eps) = min_box |D_d S| / max_vertices eps^(alpha-1) for each eps-box."""
    if verdict is None:
        verdict = check_nondegenerate(phase)
    if not verdict.nondegenerate:
        raise DegeneratePhaseError(
            f"lower growth needs a nondegenerate phase; witness {verdict.witness}", verdict
        )
    poly = from_phase(phase)
    dpoly = mixed_derivative(phase)
    ones = (1,) * phase.dim
    constants = []
    vecs = _scale_vectors(scales, phase.dim)
    for eps in vecs:
        x = _box_grid(eps)
        low = float(np.min(np.abs(eval_phase(dpoly, x))))
        constants.append(low / float(_vertex_max(eps[None, :], poly.vertices, ones)[0]))
    return GrowthReport("lower", [v.tolist() for v in vecs], constants)


def dyadic_scales(j_min: int = 1, j_max: int = 8) -> list[float]:
    return [2.0**-j for j in range(j_min, j_max + 1)]
