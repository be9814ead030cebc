"""Eigendecomposition, steady-state construction and weight-block detection."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.linalg.lapack

CLUSTER_TOL = 1e-10
ZERO_FLOOR = 1e-12


class AmbiguousClusteringWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


def _check_hermitian(A: np.ndarray, tol: float, what: str) -> None:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{what} must be square")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tol * scale:
        raise ValueError(f"{what} is not Hermitian")


def eigendecompose(H: np.ndarray, subset: tuple[int, int] | None = None) -> SpectralDecomposition:
    """Ascending eigenpairs of a dense Hermitian matrix.

    ``subset=(lo, hi)`` restricts to eigenvalue indices lo..hi inclusive.
    """
    _check_hermitian(H, 1e-12, "H")
    w, v = scipy.linalg.eigh(H, subset_by_index=subset, check_finite=False)
    return SpectralDecomposition(w, v)


@dataclass(frozen=True)
class WeightClass:
    weight: float
    indices: tuple[int, ...]


@dataclass(frozen=True)
class SteadyStateSpec:
    """Mixture of eigenstates; each class shares one mixing weight."""

    classes: tuple[WeightClass, ...]

    def __post_init__(self):
        classes = tuple(
            c if isinstance(c, WeightClass) else WeightClass(float(c[0]), tuple(c[1]))
            for c in self.classes
        )
        object.__setattr__(self, "classes", classes)
        if not classes:
            raise ValueError("steady state needs at least one weight class")
        seen: set[int] = set()
        for c in classes:
            if c.weight <= 0:
                raise ValueError("weights must be strictly positive")
            if not c.indices:
                raise ValueError("empty weight class")
            if seen.intersection(c.indices) or len(set(c.indices)) != len(c.indices):
                raise ValueError("eigenstate index sets must be disjoint")
            seen.update(c.indices)
        weights = sorted(c.weight for c in classes)
        if any(b - a <= CLUSTER_TOL * weights[-1] for a, b in zip(weights, weights[1:])):
            raise ValueError("weight classes must carry pairwise distinct weights; merge their indices instead")
        if abs(self.trace - 1.0) > 1e-12:
            raise ValueError(f"weights give trace {self.trace!r}, expected 1")

    @property
    def trace(self) -> float:
        return sum(c.weight * len(c.indices) for c in self.classes)

    @property
    def profile(self) -> tuple[int, ...]:
        return tuple(len(c.indices) for c in self.classes)

    def to_json(self) -> str:
        return json.dumps({"classes": [{"weight": c.weight, "indices": list(c.indices)} for c in self.classes]})

    @classmethod
    def from_json(cls, text: str) -> "SteadyStateSpec":
        data = json.loads(text)
        return cls(tuple(WeightClass(float(c["weight"]), tuple(int(i) for i in c["indices"])) for c in data["classes"]))


class _Completion:
    """Householder QR of stacked block vectors; its trailing columns span the complement."""

    def __init__(self, V: np.ndarray):
        self.dim, self.Q = V.shape
        geqrf, unmqr = scipy.linalg.lapack.get_lapack_funcs(("geqrf", "unmqr"), (V.astype(complex),))
        self._unmqr = unmqr
        qr, tau, _, info = geqrf(V.astype(complex))
        if info != 0:
            raise np.linalg.LinAlgError(f"geqrf failed with info={info}")
        self._qr, self._tau = qr, tau

    def _apply(self, X: np.ndarray, trans: str) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        flat = X.reshape(self.dim, -1) if X.ndim != 2 else X
        if flat.shape[1] == 0:
            return flat.copy()
        lwork = max(1, flat.shape[1]) * 64
        out, _, info = self._unmqr("L", trans, self._qr, self._tau, np.asfortranarray(flat), lwork)
        if info != 0:
            raise np.linalg.LinAlgError(f"unmqr failed with info={info}")
        return out

    def basis(self) -> np.ndarray:
        E = np.zeros((self.dim, self.dim - self.Q), dtype=complex)
        E[self.Q:] = np.eye(self.dim - self.Q)
        return self._apply(E, "N")

    def coordinates(self, X: np.ndarray) -> np.ndarray:
        """``basis().conj().T @ X`` without forming the basis."""
        return self._apply(X, "C")[self.Q:]


def _stack(blocks, dim: int) -> np.ndarray:
    blocks = list(blocks)
    if not blocks:
        return np.zeros((dim, 0), dtype=complex)
    V = np.hstack(blocks)
    if V.shape[0] != dim:
        raise ValueError("block vectors do not live in the requested dimension")
    return V


class WeightBlocks:
    """Degenerate eigenspaces of a steady state and their orthogonal complement.

    ``blocks[m]`` is a ``(dim, q_m)`` array with orthonormal columns carrying
    weight ``weights[m]``. The complement basis is built lazily by orthonormal
    completion of the stacked block vectors.
    """

    def __init__(self, weights, blocks, dim: int):
        if len(weights) != len(blocks):
            raise ValueError("one weight per block required")
        self.weights = [float(p) for p in weights]
        self.blocks = [np.asarray(B, dtype=complex) for B in blocks]
        self.dim = dim
        self._stacked = _stack(self.blocks, dim)
        self._completion = None
        self._complement = None

    @property
    def profile(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.blocks)

    @property
    def Q(self) -> int:
        return sum(self.profile)

    @property
    def length(self) -> int:
        return self.dim.bit_length() - 1

    def stacked(self) -> np.ndarray:
        return self._stacked

    def _completer(self) -> _Completion:
        if self._completion is None:
            self._completion = _Completion(self._stacked)
        return self._completion

    @property
    def complement(self) -> np.ndarray:
        if self._complement is None:
            self._complement = complement_basis(self.blocks, self.dim) if self.Q in (0, self.dim) else self._completer().basis()
        return self._complement

    def complement_coordinates(self, X: np.ndarray) -> np.ndarray:
        """``complement^dagger @ X`` for ``X`` of shape ``(dim, k)``."""
        if self.Q == 0:
            return np.asarray(X, dtype=complex)
        if self.Q == self.dim:
            return np.zeros((0, X.shape[1]), dtype=complex)
        return self._completer().coordinates(X)

    def density_matrix(self) -> np.ndarray:
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        for p, B in zip(self.weights, self.blocks):
            rho += p * (B @ B.conj().T)
        return rho


def complement_basis(blocks, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the stacked blocks.

    Computed by completing the stacked block vectors to a unitary with a
    Householder QR.
    """
    V = _stack(blocks, dim)
    Q = V.shape[1]
    if Q == 0:
        return np.eye(dim, dtype=complex)
    if Q >= dim:
        return np.zeros((dim, 0), dtype=complex)
    return _Completion(V).basis()


def build_steady_state(spec: SteadyStateSpec, eig: SpectralDecomposition):
    """Mix the selected eigenvectors; return ``(rho, blocks)`` with exact blocks."""
    n_vec = eig.eigenvectors.shape[1]
    dim = eig.eigenvectors.shape[0]
    weights, blocks = [], []
    for c in spec.classes:
        if max(c.indices) >= n_vec or min(c.indices) < 0:
            raise IndexError(f"eigenstate index out of range 0..{n_vec - 1}")
        weights.append(c.weight)
        blocks.append(eig.eigenvectors[:, list(c.indices)].astype(complex))
    wb = WeightBlocks(weights, blocks, dim)
    return wb.density_matrix(), wb


FULL_EIGH_DIM = 256


def _psd_eigh(rho: np.ndarray, zero_floor: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a PSD matrix on a subspace containing its range.

    For large ``rho`` the range is captured with a seeded Gaussian sketch
    ``rho @ Omega`` of width k, doubled until fewer than k eigenvalues of the
    compressed matrix exceed ``zero_floor``. Eigenvalues outside the sketch are
    zero up to rounding and are not returned.
    """
    dim = rho.shape[0]
    k = 32
    rng = np.random.default_rng(0)
    while 2 * k <= dim and dim > FULL_EIGH_DIM:
        omega = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
        B, _ = np.linalg.qr(rho @ omega)
        w, u = scipy.linalg.eigh(B.conj().T @ rho @ B, check_finite=False)
        if np.count_nonzero(w > zero_floor) < k:
            return w, B @ u
        k *= 2
    return scipy.linalg.eigh(rho, check_finite=False)


def cluster_weights(rho: np.ndarray, tol: float = CLUSTER_TOL, zero_floor: float = ZERO_FLOOR) -> WeightBlocks:
    """Group the nonzero spectrum of ``rho`` into degenerate weight blocks.

    Blocks come out in ascending weight order. Eigenvalues at or below
    ``zero_floor`` form the complement, which is rebuilt by orthonormal
    completion of the weight blocks.
    """
    _check_hermitian(rho, 1e-10, "rho")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"rho has trace {tr}, expected 1")
    w, v = _psd_eigh(rho, zero_floor)
    if w[0] < -1e-10:
        raise ValueError("rho is not positive semidefinite")
    dim = rho.shape[0]
    top = w[-1]
    nonzero = np.flatnonzero(w > zero_floor)
    groups: list[list[int]] = []
    for i in nonzero:
        if groups and w[i] - w[groups[-1][-1]] <= tol * top:
            groups[-1].append(i)
        else:
            if groups:
                gap = w[i] - w[groups[-1][-1]]
                if gap < 10 * tol * top:
                    warnings.warn(
                        f"eigenvalue gap {gap:.3e} is close to the clustering tolerance",
                        AmbiguousClusteringWarning,
                        stacklevel=2,
                    )
            groups.append([i])
    weights, blocks = [], []
    for g in groups:
        B, _ = np.linalg.qr(v[:, g])
        weights.append(float(np.mean(w[g])))
        blocks.append(B)
    return WeightBlocks(weights, blocks, dim)
