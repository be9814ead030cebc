"""Matrix-free Pauli strings acting on L-qubit state vectors.

Computational basis convention: site 1 is the most significant bit of the
state index, so ``|s_1 s_2 ... s_L>`` has index ``sum_k s_k 2**(L-k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

PAULI_LABELS = "IXYZ"

#: Largest chain length for which :func:`dense` will build a matrix.
DENSE_LIMIT = 6

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A word over ``{I, X, Y, Z}``; ``ops[0]`` acts on site 1."""

    ops: str

    def __post_init__(self):
        ops = self.ops.upper()
        if not ops or any(c not in PAULI_LABELS for c in ops):
            raise ValueError(f"invalid Pauli string {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_sites(cls, length: int, sites: dict[int, str]) -> "PauliString":
        """Build from ``{site: label}`` with 1-based sites; others are identity."""
        ops = ["I"] * length
        for site, label in sites.items():
            if not 1 <= site <= length:
                raise ValueError(f"site {site} outside chain of length {length}")
            ops[site - 1] = label.upper()
        return cls("".join(ops))

    @property
    def length(self) -> int:
        return len(self.ops)

    @cached_property
    def x_mask(self) -> int:
        L = self.length
        return sum(1 << (L - 1 - k) for k, c in enumerate(self.ops) if c in "XY")

    @cached_property
    def z_mask(self) -> int:
        L = self.length
        return sum(1 << (L - 1 - k) for k, c in enumerate(self.ops) if c in "YZ")

    @cached_property
    def y_phase(self) -> complex:
        return 1j ** (self.ops.count("Y") % 4)

    @property
    def support(self) -> tuple[int, ...]:
        """1-based sites where the string is not the identity."""
        return tuple(k + 1 for k, c in enumerate(self.ops) if c != "I")

    def __str__(self) -> str:
        return self.ops


def _parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & 1).astype(np.int8)


def _check_dim(P: PauliString, dim: int) -> None:
    if dim != 1 << P.length:
        raise ValueError(
            f"state dimension {dim} does not match Pauli string of length {P.length}"
        )


def column_phases(P: PauliString) -> np.ndarray:
    """Phases ``c_b`` with ``P|b> = c_b |b ^ x_mask>``."""
    idx = np.arange(1 << P.length)
    signs = 1 - 2 * _parity(idx & P.z_mask)
    return P.y_phase * signs


def apply(P: PauliString, psi: np.ndarray) -> np.ndarray:
    """Return ``P @ psi`` in O(2**L) without building a matrix.

    ``psi`` may be a vector of length ``2**L`` or a ``(2**L, k)`` stack of
    column vectors.
    """
    psi = np.asarray(psi)
    _check_dim(P, psi.shape[0])
    idx = np.arange(psi.shape[0])
    src = idx ^ P.x_mask
    # (P psi)[c] = phase(c ^ x) * psi[c ^ x]
    phase = P.y_phase * (1 - 2 * _parity(src & P.z_mask))
    if psi.ndim == 1:
        return phase * psi[src]
    return phase[:, None] * psi[src]


def matrix_element(phi: np.ndarray, P: PauliString, psi: np.ndarray) -> complex:
    """``<phi| P |psi>``."""
    phi = np.asarray(phi)
    if phi.shape != np.shape(psi):
        raise ValueError("bra and ket dimensions differ")
    return complex(np.vdot(phi, apply(P, psi)))


def dense(P: PauliString, limit: int | None = None) -> np.ndarray:
    """Explicit Kronecker-product matrix; only for small chains."""
    limit = DENSE_LIMIT if limit is None else limit
    if P.length > limit:
        raise ValueError(f"dense() refused for L={P.length} > limit {limit}")
    out = np.ones((1, 1), dtype=complex)
    for c in P.ops:
        out = np.kron(out, _SINGLE[c])
    return out
