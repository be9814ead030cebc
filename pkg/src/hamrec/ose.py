"""Orthogonal-space equations: LIE counting, assembly and nullspace recovery."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .models import CoefficientVector, ModelKind, TermBasis, term_count
from .pauli import apply
from .spectral import WeightBlocks

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class DegeneracyProfile:
    q: tuple[int, ...]
    length: int

    def __post_init__(self):
        q = tuple(int(x) for x in self.q)
        object.__setattr__(self, "q", q)
        if not q or any(x < 1 for x in q):
            raise ValueError("degeneracies must be positive and at least one class is required")
        if sum(q) > 2 ** self.length:
            raise ValueError(f"profile {q} does not fit in 2**{self.length} states")

    @property
    def Q(self) -> int:
        return sum(self.q)


def predicted_lie_count(profile: DegeneracyProfile) -> int:
    """Real equations from cross blocks (strictly m < m') plus block/complement pairs."""
    q = profile.q
    Q = profile.Q
    cross = sum(q[m] * q[k] for m in range(len(q)) for k in range(m + 1, len(q)))
    return 2 * cross + 2 * Q * (2 ** profile.length - Q)


def resolve_profile(template, L: int) -> DegeneracyProfile:
    """Turn a profile template into a concrete profile at length ``L``.

    ``template`` is a sequence of degeneracies, or ``"full"`` for a single
    class covering the whole space.
    """
    if isinstance(template, str):
        if template != "full":
            raise ValueError(f"unknown profile template {template!r}")
        return DegeneracyProfile((2**L,), L)
    return DegeneracyProfile(tuple(template), L)


def critical_length(kind, template, L_max: int) -> int | None:
    """Smallest L with ``S >= N - 1``; ``None`` if no such L up to ``L_max``."""
    kind = ModelKind.parse(kind)
    for L in range(kind.min_length, L_max + 1):
        try:
            profile = resolve_profile(template, L)
        except ValueError:
            continue
        if predicted_lie_count(profile) >= term_count(kind, L) - 1:
            return L
    return None


@dataclass
class EquationSystem:
    matrix: np.ndarray  # (S, N) real
    row_tags: list[tuple]

    @property
    def S(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.matrix.shape[1]


def applied_blocks(basis: TermBasis, vectors: np.ndarray) -> np.ndarray:
    """``out[n] = h_n @ vectors`` for every basis term, shape ``(N, dim, k)``."""
    out = np.empty((basis.count,) + vectors.shape, dtype=complex)
    for n, P in enumerate(basis.terms):
        out[n] = apply(P, vectors)
    return out


def assemble_equations(blocks: WeightBlocks, basis: TermBasis) -> EquationSystem:
    """Stack the real and imaginary parts of every OSE matrix element.

    Complex rows, in order: ``("cross", m, m2, i, j)`` for ``<lam_m2^i|h_n|lam_m^j>``
    with ``m < m2``, then ``("complement", l, m, j)`` for ``<nu_l|h_n|lam_m^j>``.
    Each complex row becomes a ``re`` row followed by an ``im`` row.
    """
    if blocks.dim != basis.dim:
        raise ValueError(f"blocks live in dimension {blocks.dim}, basis in {basis.dim}")
    lam = blocks.stacked()
    N = basis.count
    if lam.shape[1] == 0:
        return EquationSystem(np.zeros((0, N)), [])
    X = applied_blocks(basis, lam)  # (N, dim, Q)
    offsets = np.cumsum((0,) + blocks.profile)

    rows, tags = [], []
    for m in range(len(blocks.blocks)):
        for m2 in range(m + 1, len(blocks.blocks)):
            B2 = blocks.blocks[m2]
            # (N, q_m2, q_m)
            elems = np.einsum("di,ndj->nij", B2.conj(), X[:, :, offsets[m]:offsets[m + 1]])
            rows.append(elems.reshape(N, -1))
            tags.extend(
                ("cross", m, m2, i, j)
                for i in range(B2.shape[1])
                for j in range(offsets[m + 1] - offsets[m])
            )
    n_comp = blocks.dim - blocks.Q
    if n_comp:
        # (dim-Q, N*Q) -> (dim-Q, N, Q)
        flat = X.transpose(1, 0, 2).reshape(blocks.dim, -1)
        elems = blocks.complement_coordinates(flat).reshape(n_comp, N, -1)
        for m in range(len(blocks.blocks)):
            part = elems[:, :, offsets[m]:offsets[m + 1]]  # (l, N, j)
            rows.append(part.transpose(1, 0, 2).reshape(N, -1))
            tags.extend(("complement", l, m, j) for l in range(n_comp) for j in range(part.shape[2]))
    if not rows:
        return EquationSystem(np.zeros((0, N)), [])
    Z = np.concatenate(rows, axis=1).T  # (complex rows, N)
    M = np.empty((2 * Z.shape[0], N))
    M[0::2] = Z.real
    M[1::2] = Z.imag
    row_tags = [t + (part,) for t in tags for part in ("re", "im")]
    return EquationSystem(M, row_tags)


def rank_threshold(sigma: np.ndarray, shape: tuple[int, int]) -> float:
    return float(sigma.max(initial=0.0)) * max(shape) * EPS


@dataclass
class RecoveryReport:
    a_rec: np.ndarray
    rank: int
    nullity: int
    singular_tail: list[float]
    success: bool
    S: int
    N: int
    delta: float | None = None
    null_basis: np.ndarray | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.meta)
        out.update(
            S=self.S,
            N=self.N,
            rank=self.rank,
            nullity=self.nullity,
            delta=self.delta,
            success=self.success,
            singular_tail=[float(s) for s in self.singular_tail],
        )
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _right_singular(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values (descending, padded with zeros to N) and ``V^T`` (N x N)."""
    S, N = M.shape
    if S > N:
        # identical singular values and right vectors, without the S x N left factor
        M = scipy.linalg.qr(M, mode="r", check_finite=False)[0][:N]
    _, sigma, vt = np.linalg.svd(M, full_matrices=True)
    if sigma.size < N:
        sigma = np.concatenate([sigma, np.zeros(N - sigma.size)])
    return sigma, vt


def solve_nullspace(system: EquationSystem) -> RecoveryReport:
    """Numeric rank and smallest right singular vector of the OSE matrix."""
    S, N = system.matrix.shape
    if S == 0:
        return RecoveryReport(
            a_rec=np.zeros(N), rank=0, nullity=N, singular_tail=[0.0] * min(3, N),
            success=False, S=0, N=N, null_basis=np.eye(N),
        )
    sigma, vt = _right_singular(system.matrix)
    tau = rank_threshold(sigma, (S, N))
    rank = int(np.count_nonzero(sigma > tau))
    a = vt[-1].copy()
    a /= np.linalg.norm(a)
    if a[np.argmax(np.abs(a))] < 0:
        a = -a
    return RecoveryReport(
        a_rec=a,
        rank=rank,
        nullity=N - rank,
        singular_tail=sigma[-3:].tolist(),
        success=(N - rank == 1),
        S=S,
        N=N,
        null_basis=vt[rank:].T,
    )


def recovery_error(a_true, a_rec) -> float:
    """``1 - |cos|`` between the two coefficient vectors."""
    x = a_true.values if isinstance(a_true, CoefficientVector) else np.asarray(a_true, float)
    y = a_rec.values if isinstance(a_rec, CoefficientVector) else np.asarray(a_rec, float)
    if x.shape != y.shape:
        raise ValueError("coefficient vectors belong to different bases")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("recovery error undefined for a zero vector")
    cos = abs(float(np.dot(x, y))) / (nx * ny)
    return max(0.0, 1.0 - min(cos, 1.0))


def overlap_with_span(a: np.ndarray, basis: np.ndarray) -> float:
    """Squared norm of the projection of normalized ``a`` onto orthonormal columns."""
    a = np.asarray(a, float) / np.linalg.norm(a)
    if basis.size == 0:
        return 0.0
    return float(np.sum((basis.T @ a) ** 2))


def profile_lie_counts(kind, template, lengths: Sequence[int]) -> list[tuple[int, int, int, bool]]:
    """``(L, S, N, recoverable)`` rows for each length where the profile fits."""
    kind = ModelKind.parse(kind)
    out = []
    for L in lengths:
        try:
            profile = resolve_profile(template, L)
        except ValueError:
            continue
        S = predicted_lie_count(profile)
        N = term_count(kind, L)
        out.append((L, S, N, S >= N - 1))
    return out
