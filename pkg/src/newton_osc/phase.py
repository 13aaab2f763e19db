"""Sparse polynomial phases over multi-indices.

A phase is a finite map ``alpha -> c_alpha`` with ``alpha`` a tuple of
nonnegative integers. Input phases (the ones handed to the geometry) must
have every exponent >= 1; derived polynomials such as ``D_d S`` may carry
zero exponents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_DIM = 6

MultiIndex = tuple[int, ...]


class PhaseError(ValueError):
    """Malformed phase input or dimension mismatch."""


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


@dataclass(frozen=True)
class Phase:
    dim: int
    terms: tuple[tuple[MultiIndex, float], ...]

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise PhaseError(f"dim must be in [1, {MAX_DIM}], got {self.dim}")
        seen = set()
        for alpha, c in self.terms:
            if len(alpha) != self.dim:
                raise PhaseError(f"multi-index {alpha} has length != dim {self.dim}")
            if any(a < 0 for a in alpha):
                raise PhaseError(f"negative exponent in {alpha}")
            if alpha in seen:
                raise PhaseError(f"duplicate multi-index {alpha}")
            if c == 0:
                raise PhaseError(f"zero coefficient stored for {alpha}")
            seen.add(alpha)
        if list(self.terms) != sorted(self.terms):
            raise PhaseError("terms must be sorted by multi-index")

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping[Sequence[int], float] | Iterable):
        """Collect terms (summing repeats, dropping zeros) into a Phase."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, float] = {}
        for alpha, c in items:
            alpha = tuple(int(a) for a in alpha)
            acc[alpha] = acc.get(alpha, 0.0) + float(c)
        kept = tuple(sorted((a, c) for a, c in acc.items() if c != 0.0))
        return cls(dim, kept)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: float = 1.0):
        return cls.from_terms(len(alpha), [(alpha, coeff)])

    @property
    def indices(self) -> list[MultiIndex]:
        return [a for a, _ in self.terms]

    @property
    def coeffs(self) -> list[float]:
        return [c for _, c in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def check_input_phase(self) -> None:
        """Raise unless the phase is usable as input: nonempty, all exponents >= 1."""
        if not self.terms:
            raise PhaseError("phase has no terms")
        for alpha in self.indices:
            if any(a < 1 for a in alpha):
                raise PhaseError(
                    f"term {alpha} has an exponent 0; phase terms must be >= 1 in every variable"
                )

    # -- calculus -------------------------------------------------------

    def __call__(self, x):
        return eval_phase(self, x)

    def partial(self, beta: Sequence[int]) -> "Phase":
        return partial_derivative(self, beta)

    def mixed(self) -> "Phase":
        return mixed_derivative(self)

    def restrict(self, face_indices) -> "Phase":
        return face_restriction(self, face_indices)

    def scaled(self, a: float) -> "Phase":
        return Phase.from_terms(self.dim, [(al, a * c) for al, c in self.terms])

    def __add__(self, other: "Phase") -> "Phase":
        if other.dim != self.dim:
            raise PhaseError("dimension mismatch")
        return Phase.from_terms(self.dim, list(self.terms) + list(other.terms))

    def permuted(self, perm: Sequence[int]) -> "Phase":
        """Phase in permuted variables: new variable i is old variable perm[i]."""
        return Phase.from_terms(
            self.dim, [(tuple(al[p] for p in perm), c) for al, c in self.terms]
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"alpha": list(a), "coeff": c} for a, c in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Phase":
        if not isinstance(data, dict):
            raise PhaseError("phase JSON must be an object")
        if "dim" not in data:
            raise PhaseError("phase JSON missing field 'dim'")
        if "terms" not in data or not isinstance(data["terms"], list):
            raise PhaseError("phase JSON missing list field 'terms'")
        dim = data["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise PhaseError("field 'dim' must be an integer")
        seen = set()
        terms = []
        for i, t in enumerate(data["terms"]):
            if not isinstance(t, dict) or "alpha" not in t or "coeff" not in t:
                raise PhaseError(f"terms[{i}] must have fields 'alpha' and 'coeff'")
            alpha = t["alpha"]
            if not isinstance(alpha, list) or not all(
                isinstance(a, int) and not isinstance(a, bool) for a in alpha
            ):
                raise PhaseError(f"terms[{i}].alpha must be a list of integers")
            if len(alpha) != dim:
                raise PhaseError(f"terms[{i}].alpha has length {len(alpha)}, expected {dim}")
            key = tuple(alpha)
            if key in seen:
                raise PhaseError(f"terms[{i}].alpha duplicates {list(key)}")
            seen.add(key)
            try:
                coeff = float(t["coeff"])
            except (TypeError, ValueError):
                raise PhaseError(f"terms[{i}].coeff is not a number") from None
            terms.append((key, coeff))
        phase = cls.from_terms(dim, terms)
        phase.check_input_phase()
        return phase

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Phase":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PhaseError(f"phase is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def __str__(self):
        if not self.terms:
            return "0"
        names = "xyzwuv" if self.dim <= 6 else None
        parts = []
        for alpha, c in self.terms:
            mono = "".join(
                names[j] + (f"^{a}" if a > 1 else "") for j, a in enumerate(alpha) if a
            )
            coef = "" if (c == 1.0 and mono) else f"{c:g}"
            parts.append(coef + mono)
        return " + ".join(parts)


def eval_phase(phase: Phase, x) -> np.ndarray | float:
    """Evaluate ``sum c_alpha x^alpha``; ``x`` has trailing axis of length d."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (phase.dim,):
        raise PhaseError(f"point has trailing length {arr.shape[-1:]}, expected {phase.dim}")
    out = np.zeros(arr.shape[:-1])
    for alpha, c in phase.terms:
        term = np.full(arr.shape[:-1], c)
        for j, a in enumerate(alpha):
            if a:
                term = term * arr[..., j] ** a
        out = out + term
    if out.ndim == 0:
        return float(out)
    return out


def partial_derivative(phase: Phase, beta: Sequence[int]) -> Phase:
    beta = tuple(int(b) for b in beta)
    if len(beta) != phase.dim:
        raise PhaseError(f"beta has length {len(beta)}, expected {phase.dim}")
    if any(b < 0 for b in beta):
        raise PhaseError("beta entries must be nonnegative")
    out = []
    for alpha, c in phase.terms:
        if any(a < b for a, b in zip(alpha, beta)):
            continue
        factor = 1
        for a, b in zip(alpha, beta):
            factor *= _falling(a, b)
        out.append((tuple(a - b for a, b in zip(alpha, beta)), c * factor))
    return Phase.from_terms(phase.dim, out)


def mixed_derivative(phase: Phase) -> Phase:
    """``D_d S = d_1 d_2 ... d_d S``."""
    return partial_derivative(phase, (1,) * phase.dim)


def face_restriction(phase: Phase, face_indices) -> Phase:
    """Sub-polynomial keeping only the listed multi-indices."""
    lookup = dict(phase.terms)
    wanted = {tuple(int(a) for a in al) for al in face_indices}
    missing = wanted - lookup.keys()
    if missing:
        raise PhaseError(f"indices not present in phase: {sorted(missing)}")
    return Phase.from_terms(phase.dim, [(a, lookup[a]) for a in wanted])
