"""Generic 2-local and 3-local open chains: term bases, random instances, assembly."""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pauli import PauliString, apply, column_phases

AXES = "XYZ"


class ModelKind(str, enum.Enum):
    H2 = "h2"
    H3 = "h3"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown model {value!r}; expected h2 or h3") from None

    @property
    def min_length(self) -> int:
        return 2 if self is ModelKind.H2 else 3


def _check_length(kind: ModelKind, L: int) -> None:
    if L < kind.min_length:
        raise ValueError(f"{kind.name} needs L >= {kind.min_length}, got {L}")


@dataclass(frozen=True)
class TermBasis:
    kind: ModelKind
    length: int
    terms: tuple[PauliString, ...]

    @property
    def count(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def dim(self) -> int:
        return 1 << self.length


def enumerate_terms(kind, L: int) -> TermBasis:
    """Ordered term basis.

    Order: single-site terms (site, axis), nearest-neighbour pairs
    (bond, axis, axis), then for H3 the width-3 block per starting site with
    outer axes in XYZ and the middle site in IXYZ.
    """
    kind = ModelKind.parse(kind)
    _check_length(kind, L)
    terms = []
    for site in range(1, L + 1):
        for a in AXES:
            terms.append(PauliString.from_sites(L, {site: a}))
    for site in range(1, L):
        for a, b in itertools.product(AXES, AXES):
            terms.append(PauliString.from_sites(L, {site: a, site + 1: b}))
    if kind is ModelKind.H3:
        for site in range(1, L - 1):
            for a, b, c in itertools.product(AXES, "I" + AXES, AXES):
                terms.append(
                    PauliString.from_sites(L, {site: a, site + 1: b, site + 2: c})
                )
    return TermBasis(kind, L, tuple(terms))


def term_count(kind, L: int) -> int:
    kind = ModelKind.parse(kind)
    _check_length(kind, L)
    return 12 * L - 9 if kind is ModelKind.H2 else 48 * L - 81


@dataclass(frozen=True)
class CoefficientVector:
    kind: ModelKind
    length: int
    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size != term_count(self.kind, self.length):
            raise ValueError("coefficient vector length does not match the term basis")
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "values", values)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind.value,
                "L": self.length,
                "seed": self.seed,
                "values": [float(v) for v in self.values],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CoefficientVector":
        data = json.loads(text)
        return cls(ModelKind.parse(data["kind"]), int(data["L"]), np.array(data["values"]), data.get("seed"))


def random_instance(kind, L: int, seed: int) -> CoefficientVector:
    """i.i.d. N(0, 1) coefficients from a PCG64 generator seeded with ``seed``."""
    kind = ModelKind.parse(kind)
    rng = np.random.default_rng(seed)
    return CoefficientVector(kind, L, rng.standard_normal(term_count(kind, L)), seed)


def _values(basis: TermBasis, a) -> np.ndarray:
    values = a.values if isinstance(a, CoefficientVector) else np.asarray(a, dtype=float)
    if values.shape != (basis.count,):
        raise ValueError(f"expected {basis.count} coefficients, got shape {values.shape}")
    return values


def assemble_dense(basis: TermBasis, a) -> np.ndarray:
    """Dense ``sum_n a_n h_n`` built by scattering each term's permutation."""
    values = _values(basis, a)
    dim = basis.dim
    H = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for coef, P in zip(values, basis.terms):
        if coef != 0.0:
            H[cols ^ P.x_mask, cols] += coef * column_phases(P)
    return H


def applier(basis: TermBasis, a) -> Callable[[np.ndarray], np.ndarray]:
    """Matrix-free ``psi -> H psi``."""
    values = _values(basis, a)

    def apply_h(psi):
        out = np.zeros(np.shape(psi), dtype=complex)
        for coef, P in zip(values, basis.terms):
            if coef != 0.0:
                out += coef * apply(P, psi)
        return out

    return apply_h


def assemble(basis: TermBasis, a) -> tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
    return assemble_dense(basis, a), applier(basis, a)
