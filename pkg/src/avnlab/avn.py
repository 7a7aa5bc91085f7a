"""The three-singlet state, its perfect correlations and the Mermin operators.

Register layout: six qubits named 1..6 in the default order, so Debbie's
qubits 2, 4, 6 sit at positions 1, 3, 5 and Alice/Bob/Charlie's qubits 1, 3, 5
at positions 0, 2, 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from avnlab.errors import BracketError
from avnlab.qcore import (
    ATOL,
    DensityMatrix,
    MerminOperator,
    PauliProduct,
    PauliString,
    StateVector,
    dm_from_state,
    dm_kron,
    dm_mix,
    expectation,
    kron_all,
    maximally_mixed,
)

DEBBIE = (2, 4, 6)
OBSERVERS = (1, 3, 5)

# Debbie's four commuting triples, in the order of the O-terms.
TRIPLES = ("x2y4y6", "y2x4y6", "y2y4x6", "x2x4x6")

# Local partners of each triple in the perfect correlations.
LOCAL_PARTNERS = {
    "x2y4y6": ("x1", "y3", "y5"),
    "y2x4y6": ("y1", "x3", "y5"),
    "y2y4x6": ("y1", "y3", "x5"),
    "x2x4x6": ("x1", "x3", "x5"),
}

# Single-qubit factors of each triple on Debbie's side.
TRIPLE_SINGLES = {
    "x2y4y6": ("x2", "y4", "y6"),
    "y2x4y6": ("y2", "x4", "y6"),
    "y2y4x6": ("y2", "y4", "x6"),
    "x2x4x6": ("x2", "x4", "x6"),
}

# Order in which the triple product identity is written.
TRIPLE_PRODUCT_ORDER = ("x2x4x6", "x2y4y6", "y2x4y6", "y2y4x6")


@dataclass(frozen=True)
class EigenEquation:
    product: PauliProduct
    eigenvalue: int

    @property
    def label(self) -> str:
        return self.product.label


@dataclass(frozen=True)
class EigenCheckResult:
    operator_label: str
    expected_eigenvalue: float
    residual: float


@dataclass(frozen=True)
class OperatorIdentity:
    """``product == sign * I`` on Debbie's three qubits."""

    product: PauliProduct
    sign: int

    @property
    def label(self) -> str:
        return self.product.label


@dataclass(frozen=True)
class NoiseParams:
    """Werner-noise fidelity ``F`` of each singlet."""

    F: float

    def __post_init__(self):
        if not (0.0 <= self.F <= 1.0) or math.isnan(self.F):
            raise ValueError(f"fidelity F={self.F!r} outside [0, 1]")


def build_singlet() -> StateVector:
    return StateVector(np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2))


def build_psi() -> StateVector:
    """``|psi->_12 (x) |psi->_34 (x) |psi->_56``."""
    s = build_singlet()
    return kron_all((s, s, s))


def _six(label: str) -> PauliString:
    return PauliString.parse(label, 6)


def _three(label: str) -> PauliString:
    return PauliString.parse(label, DEBBIE)


def eigen_system() -> list[EigenEquation]:
    """The five perfect correlations obeyed by ``build_psi()``, all with eigenvalue -1."""
    eqs = [
        EigenEquation(PauliProduct(tuple(_six(l) for l in (t, *LOCAL_PARTNERS[t]))), -1)
        for t in TRIPLES
    ]
    eqs.append(EigenEquation(PauliProduct(tuple(_six(t) for t in TRIPLE_PRODUCT_ORDER)), -1))
    return eqs


def verify_eigenequations(state: StateVector) -> list[EigenCheckResult]:
    out = []
    for eq in eigen_system():
        applied = eq.product.apply(state).amplitudes
        residual = float(np.linalg.norm(applied - eq.eigenvalue * state.amplitudes))
        out.append(EigenCheckResult(eq.label, float(eq.eigenvalue), residual))
    return out


def operator_identities() -> list[OperatorIdentity]:
    """The five state-independent identities on qubits 2, 4, 6."""
    ids = [
        OperatorIdentity(PauliProduct(tuple(_three(l) for l in (t, *TRIPLE_SINGLES[t]))), 1)
        for t in TRIPLES
    ]
    ids.append(OperatorIdentity(PauliProduct(tuple(_three(t) for t in TRIPLE_PRODUCT_ORDER)), -1))
    return ids


def verify_identities() -> list[tuple[str, float]]:
    """Max entrywise ``|LHS - RHS|`` of each identity, from dense 8x8 matrices."""
    eye = np.eye(8, dtype=np.complex128)
    return [(ident.label, float(np.max(np.abs(ident.product.matrix() - ident.sign * eye))))
            for ident in operator_identities()]


def mermin_O() -> MerminOperator:
    terms = tuple((1.0, eq.product) for eq in eigen_system()[:4])
    return MerminOperator(terms, label="O")


def mermin_Oprime() -> MerminOperator:
    terms = tuple((1.0, ident.product) for ident in operator_identities()[:4])
    return MerminOperator(terms, label="O'")


def noisy_singlet(p: NoiseParams) -> DensityMatrix:
    """``F |psi-><psi-| + (1-F) I/4``."""
    return dm_mix([(p.F, dm_from_state(build_singlet())), (1.0 - p.F, maximally_mixed(2))])


def noisy_psi(p: NoiseParams, fidelities: Optional[Sequence[float]] = None) -> DensityMatrix:
    """Three Werner singlets on pairs (1,2), (3,4), (5,6).

    ``fidelities`` optionally gives a separate F per pair; by default all
    three use ``p.F``.
    """
    fs = [p.F] * 3 if fidelities is None else list(fidelities)
    if len(fs) != 3:
        raise ValueError("exactly three per-pair fidelities are required")
    pairs = [noisy_singlet(NoiseParams(f)) for f in fs]
    return dm_kron(dm_kron(pairs[0], pairs[1]), pairs[2])


@lru_cache(maxsize=None)
def _o_matrix() -> np.ndarray:
    m = mermin_O().matrix()
    m.setflags(write=False)
    return m


def expectation_O_noisy(p: NoiseParams, fidelities: Optional[Sequence[float]] = None) -> float:
    """``Tr[(rho(F) (x) rho(F) (x) rho(F)) O]`` by a full 64x64 contraction."""
    rho = noisy_psi(p, fidelities).entries
    value = complex(np.einsum("ij,ji->", rho, _o_matrix()))
    if abs(value.imag) > ATOL:
        raise ArithmeticError(f"<O> has imaginary part {value.imag!r}")
    return value.real


def expectation_O_closed_form(F: float) -> float:
    return -4.0 * F ** 3


def violation_threshold(bound: float = 2.0, tol: float = 1e-9) -> float:
    """Smallest F with ``|<O>_F| >= bound``, by bisection on [0, 1]."""
    if not 0.0 < bound <= 4.0:
        raise BracketError(f"bound {bound!r} outside (0, 4]")

    def g(F: float) -> float:
        return abs(expectation_O_noisy(NoiseParams(F))) - bound

    lo, hi = 0.0, 1.0
    g_lo, g_hi = g(lo), g(hi)
    if g_lo > 0 or g_hi < -ATOL:
        raise BracketError(f"|<O>| = {bound} is not bracketed by F in [0, 1]")
    if abs(g_hi) <= ATOL:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
