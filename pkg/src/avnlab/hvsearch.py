"""Hidden-variable value assignments: exhaustive search and parity certificates.

An assignment gives every observable label a value of +1 or -1. Labels are
sorted lexicographically and enumerated by index: bit ``i`` of the index set
means label ``i`` takes the value -1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from avnlab import avn, kernels
from avnlab.errors import UniverseTooLargeError

MAX_UNIVERSE = 20

OBSERVABLE_LABELS = frozenset({
    "x1", "y1", "x3", "y3", "x5", "y5",
    "x2", "y2", "x4", "y4", "x6", "y6",
    "x2y4y6", "y2x4y6", "y2y4x6", "x2x4x6",
})


@dataclass(frozen=True)
class Equation:
    """``prod v(label) == required_product``."""

    labels: tuple[str, ...]
    required_product: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.required_product not in (1, -1):
            raise ValueError(f"required product must be +1 or -1, got {self.required_product!r}")

    def holds(self, assignment: Mapping[str, int]) -> bool:
        prod = 1
        for label in self.labels:
            prod *= assignment[label]
        return prod == self.required_product


@dataclass(frozen=True)
class ConstraintSystem:
    equations: tuple[Equation, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({l for eq in self.equations for l in eq.labels}))

    def occurrences(self) -> Counter:
        return Counter(l for eq in self.equations for l in eq.labels)

    def with_product(self, index: int, required_product: int) -> ConstraintSystem:
        """Copy with equation ``index`` given a different right-hand side."""
        eqs = list(self.equations)
        eqs[index] = Equation(eqs[index].labels, required_product)
        return ConstraintSystem(tuple(eqs), self.name)

    def satisfied_by(self, assignment: Mapping[str, int]) -> bool:
        return all(eq.holds(assignment) for eq in self.equations)


@dataclass(frozen=True)
class Assignment:
    values: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        values = dict(sorted(self.values.items()))
        bad = {k: v for k, v in values.items() if v not in (1, -1)}
        if bad:
            raise ValueError(f"assignment values must be +1 or -1: {bad!r}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, label: str) -> int:
        return self.values[label]

    @classmethod
    def from_index(cls, labels: Sequence[str], index: int) -> Assignment:
        return cls({l: -1 if (index >> i) & 1 else 1 for i, l in enumerate(labels)})


@dataclass(frozen=True)
class EnumerationResult:
    count: int
    total: int
    witnesses: tuple[Assignment, ...]


@dataclass(frozen=True)
class ParityCertificate:
    unsatisfiable: bool
    reason: str
    equation_subset: tuple[int, ...] = ()


@dataclass(frozen=True)
class BoundResult:
    max_value: int
    argmax: Optional[Assignment]


def _factor_labels(factors) -> tuple[str, ...]:
    return tuple(f.label for f in factors)


def _real_sign(phase: complex) -> int:
    if abs(phase.imag) > 0 or phase.real not in (1, -1):
        raise ValueError(f"operator product has non-real phase {phase!r}")
    return int(phase.real)


def lhv_system() -> ConstraintSystem:
    """Value equations read off the perfect correlations of the three-singlet state."""
    eqs = [Equation(_factor_labels(eq.product.factors), eq.eigenvalue) for eq in avn.eigen_system()]
    return ConstraintSystem(tuple(eqs), "LHV")


def nchv_system() -> ConstraintSystem:
    """Value equations read off the operator identities on qubits 2, 4, 6.

    Each right-hand side is the phase obtained by multiplying the factors out,
    so the system follows from the algebra rather than from a transcription.
    """
    eqs = []
    for ident in avn.operator_identities():
        phase, rest = ident.product.reduce()
        if any(f.value != "I" for f in rest.factors):
            raise ValueError(f"{ident.label} does not reduce to a multiple of the identity")
        eqs.append(Equation(_factor_labels(ident.product.factors), _real_sign(phase)))
    return ConstraintSystem(tuple(eqs), "NCHV")


def _mask(labels: Iterable[str], index: Mapping[str, int]) -> int:
    m = 0
    for l in labels:
        m ^= 1 << index[l]
    return m


def _check_universe(n: int) -> None:
    if n > MAX_UNIVERSE:
        raise UniverseTooLargeError(f"{n} labels exceeds the enumeration limit of {MAX_UNIVERSE}")


def enumerate_satisfying(system: ConstraintSystem, max_witnesses: int = 64) -> EnumerationResult:
    """Scan all ``2**n`` assignments of the system's labels."""
    labels = system.labels
    _check_universe(len(labels))
    index = {l: i for i, l in enumerate(labels)}
    masks = np.array([_mask(eq.labels, index) for eq in system.equations], dtype=np.uint64)
    rhs = np.array([1 if eq.required_product == -1 else 0 for eq in system.equations],
                   dtype=np.uint8)
    count, wit = kernels.scan_equations(masks, rhs, len(labels), max_witnesses)
    witnesses = tuple(Assignment.from_index(labels, int(a)) for a in wit)
    return EnumerationResult(int(count), 1 << len(labels), witnesses)


def parity_certificate(system: ConstraintSystem) -> ParityCertificate:
    """Look for equations whose labels cancel pairwise while their products multiply to -1.

    First tries the whole system: every label occurring an even number of
    times with required products multiplying to -1. Otherwise runs Gaussian
    elimination over GF(2) on the label-incidence rows and reports the first
    contradictory subset found, which makes the verdict exact (a parity system
    is unsatisfiable iff such a subset exists).
    """
    labels = system.labels
    index = {l: i for i, l in enumerate(labels)}
    n_eq = len(system.equations)
    occ = system.occurrences()
    all_even = all(c % 2 == 0 for c in occ.values())
    rhs_total = 1
    for eq in system.equations:
        rhs_total *= eq.required_product
    if all_even and rhs_total == -1:
        return ParityCertificate(
            True,
            f"parity: every label occurs an even number of times across all {n_eq} "
            "equations, so the left-hand sides multiply to +1, but the required "
            "products multiply to -1",
            tuple(range(n_eq)),
        )

    # rows: (label mask, rhs bit, equation-combination mask)
    pivots: dict[int, tuple[int, int, int]] = {}
    for k, eq in enumerate(system.equations):
        m = _mask(eq.labels, index)
        b = 1 if eq.required_product == -1 else 0
        comb = 1 << k
        while m:
            top = m.bit_length() - 1
            if top not in pivots:
                pivots[top] = (m, b, comb)
                break
            pm, pb, pc = pivots[top]
            m ^= pm
            b ^= pb
            comb ^= pc
        else:
            if b:
                subset = tuple(i for i in range(n_eq) if (comb >> i) & 1)
                return ParityCertificate(
                    True,
                    f"parity: in equations {list(subset)} every label occurs an even "
                    "number of times, but their required products multiply to -1",
                    subset,
                )
    return ParityCertificate(False, "not parity-blocked: the equations are consistent over GF(2)")


def classical_bound(
    terms: Sequence[tuple[Sequence[str], int]],
    constraint: Optional[Equation] = None,
) -> BoundResult:
    """Max of ``sum sign * prod v(labels)`` over assignments obeying ``constraint``.

    Ties go to the assignment with the smallest enumeration index.
    """
    labels = sorted({l for ls, _ in terms for l in ls} | set(constraint.labels if constraint else ()))
    _check_universe(len(labels))
    index = {l: i for i, l in enumerate(labels)}
    masks = np.array([_mask(ls, index) for ls, _ in terms], dtype=np.uint64)
    signs = np.array([int(s) for _, s in terms], dtype=np.int64)
    if constraint is None:
        cmask, cbit = 0, -1
    else:
        cmask = _mask(constraint.labels, index)
        cbit = 1 if constraint.required_product == -1 else 0
    best, idx = kernels.scan_bound(masks, signs, len(labels), cmask, cbit)
    if idx < 0:
        return BoundResult(0, None)
    return BoundResult(int(best), Assignment.from_index(labels, int(idx)))


def triple_constraint() -> Equation:
    """The analyzer-enforced rule: the four triple values multiply to -1."""
    return Equation(avn.TRIPLE_PRODUCT_ORDER, -1)


def mermin_terms(which: str) -> list[tuple[tuple[str, ...], int]]:
    """Classical value terms for ``"O"`` (local realism) or ``"O'"`` (noncontextuality)."""
    op = {"O": avn.mermin_O, "O'": avn.mermin_Oprime}[which]()
    return [(_factor_labels(p.factors), int(c)) for c, p in op.terms]
