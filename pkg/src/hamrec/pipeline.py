"""End-to-end recovery: random model -> steady state -> OSE -> recovered coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .models import ModelKind, TermBasis, assemble_dense, enumerate_terms, random_instance
from .ose import RecoveryReport, assemble_equations, recovery_error, solve_nullspace
from .spectral import SteadyStateSpec, WeightClass, build_steady_state, cluster_weights, eigendecompose

RHO_ME = (2, 2)


def ladder_weights(q) -> list[float]:
    """Distinct weights proportional to 2, 3, 4, ... normalized to unit trace.

    For ``q = (2, 2)`` this gives 0.2 and 0.3; for a single class it gives ``1/q``.
    """
    raw = [m + 2 for m in range(len(q))]
    norm = sum(r * n for r, n in zip(raw, q))
    return [r / norm for r in raw]


def spec_from_profile(q) -> SteadyStateSpec:
    """Weight classes on the lowest eigenstates, in ascending weight order."""
    classes, start = [], 0
    for p, n in zip(ladder_weights(q), q):
        classes.append(WeightClass(p, tuple(range(start, start + n))))
        start += n
    return SteadyStateSpec(tuple(classes))


def parse_profile(text: str):
    """``"2"``, ``"2,2"``, ``"rho-me"`` or ``"full"``."""
    text = text.strip().lower()
    if text in ("rho-me", "rho_me", "me"):
        return RHO_ME
    if text == "full":
        return "full"
    try:
        q = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse profile {text!r}") from None
    if not q or any(x < 1 for x in q):
        raise ValueError(f"degeneracies must be positive: {text!r}")
    return q


@lru_cache(maxsize=32)
def cached_basis(kind: ModelKind, L: int) -> TermBasis:
    return enumerate_terms(kind, L)


@dataclass
class TrialResult:
    report: RecoveryReport
    a_true: np.ndarray


def prepare(kind, L: int, spec: SteadyStateSpec, seed: int):
    """Sample a Hamiltonian, mix its eigenstates and re-read the blocks from rho.

    Returns ``(basis, a_true, rho, blocks)``.
    """
    kind = ModelKind.parse(kind)
    basis = cached_basis(kind, L)
    a = random_instance(kind, L, seed)
    H = assemble_dense(basis, a)
    top = max(max(c.indices) for c in spec.classes)
    if top >= basis.dim:
        raise ValueError(f"steady state uses eigenstate {top} but L={L} has only {basis.dim}")
    eig = eigendecompose(H, subset=(0, top))
    rho, _ = build_steady_state(spec, eig)
    return basis, a, rho, cluster_weights(rho)


def recover(kind, L: int, spec: SteadyStateSpec, seed: int) -> TrialResult:
    """Run one full recovery from a freshly sampled Hamiltonian."""
    kind = ModelKind.parse(kind)
    basis, a, rho, blocks = prepare(kind, L, spec, seed)
    system = assemble_equations(blocks, basis)
    report = solve_nullspace(system)
    report.delta = recovery_error(a.values, report.a_rec) if system.S else 1.0
    report.meta.update(kind=kind.value, L=L, profile=list(spec.profile), seed=seed)
    return TrialResult(report, a.values)
