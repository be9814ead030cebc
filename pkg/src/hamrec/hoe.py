"""Rank of the commutator map ``a -> [H(a), rho]`` via its real Gram matrix.

For ``rho = sum_k p_k |l_k><l_k|`` and ``C_n = [h_n, rho]`` (anti-Hermitian),

    K_mn = Re Tr(C_m^dag C_n)
         = 2 sum_k p_k^2 Re <h_m l_k | h_n l_k> - 2 Re Tr(P A_m P A_n),

with ``(A_n)_{kk'} = <l_k|h_n|l_k'>`` and ``P = diag(p_k)``. No 2^L x 2^L
commutator is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import TermBasis
from .ose import EPS, applied_blocks
from .pauli import dense
from .spectral import WeightBlocks

GRAM_SAFETY = 1e3


@dataclass(frozen=True)
class HoeGram:
    K: np.ndarray

    @property
    def N(self) -> int:
        return self.K.shape[0]


def hoe_gram(basis: TermBasis, blocks: WeightBlocks) -> HoeGram:
    if blocks.dim != basis.dim:
        raise ValueError(f"blocks live in dimension {blocks.dim}, basis in {basis.dim}")
    N = basis.count
    lam = blocks.stacked()
    if lam.shape[1] == 0:
        return HoeGram(np.zeros((N, N)))
    p = np.concatenate([np.full(q, w) for w, q in zip(blocks.weights, blocks.profile)])
    X = applied_blocks(basis, lam)  # (N, dim, Q): X[n, :, k] = h_n |l_k>
    K = np.zeros((N, N))
    for k in range(lam.shape[1]):
        G = X[:, :, k]  # (N, dim)
        K += 2 * p[k] ** 2 * (G.conj() @ G.T).real
    # A[n] = lam^dag h_n lam, scaled to sqrt(P) A sqrt(P)
    s = np.sqrt(p)
    A = np.einsum("dk,ndj->nkj", lam.conj(), X) * s[None, :, None] * s[None, None, :]
    flat = A.reshape(N, -1)
    K -= 2 * (flat.conj() @ flat.T).real
    return HoeGram(0.5 * (K + K.T))


def hoe_rank(g: HoeGram) -> int:
    w = np.linalg.eigvalsh(g.K)
    top = w.max(initial=0.0)
    if top <= 0:
        return 0
    return int(np.count_nonzero(w > top * g.N * EPS * GRAM_SAFETY))


def commutator_matrix(basis: TermBasis, rho: np.ndarray) -> np.ndarray:
    """Real-stacked vectorized dense commutators, one column per term (small L only)."""
    cols = []
    for P in basis.terms:
        h = dense(P)
        c = (h @ rho - rho @ h).ravel()
        cols.append(np.concatenate([c.real, c.imag]))
    return np.array(cols).T
