"""Dense state vectors, density matrices and Pauli strings for up to six qubits.

Qubit ordering: position 0 (qubit 1 in the default naming) is the most
significant bit of the amplitude index, so ``|01>`` has its amplitude at
index 1 of 4. Basis conventions: ``|0> = |H>``, ``|1> = |V>``,
``|+> = (|0>+|1>)/sqrt2`` and ``|R> = (|0>+i|1>)/sqrt2`` are the +1
eigenstates of X and Y.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from avnlab import kernels
from avnlab.errors import (
    CapacityError,
    DimensionError,
    NumericalIntegrityError,
    WeightSumError,
)

MAX_QUBITS = 6
ATOL = 1e-12
PSD_ATOL = 1e-10


class PauliAxis(enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _SINGLE[self].copy()


_SINGLE = {
    PauliAxis.I: np.eye(2, dtype=np.complex128),
    PauliAxis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    PauliAxis.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    PauliAxis.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# (a, b) -> (phase, c) with a.matrix @ b.matrix == phase * c.matrix
_MULT: dict[tuple[PauliAxis, PauliAxis], tuple[complex, PauliAxis]] = {}
for _a in PauliAxis:
    _MULT[(PauliAxis.I, _a)] = (1, _a)
    _MULT[(_a, PauliAxis.I)] = (1, _a)
    _MULT[(_a, _a)] = (1, PauliAxis.I)
for _a, _b, _c in ((PauliAxis.X, PauliAxis.Y, PauliAxis.Z),
                   (PauliAxis.Y, PauliAxis.Z, PauliAxis.X),
                   (PauliAxis.Z, PauliAxis.X, PauliAxis.Y)):
    _MULT[(_a, _b)] = (1j, _c)
    _MULT[(_b, _a)] = (-1j, _c)


def _check_qubits(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise DimensionError(f"length {dim} is not a power of two")
    _check_qubits(n)
    return n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over ``n_qubits`` qubits.

    ``normalized=False`` marks an intermediate (e.g. a projected state) that
    is exempt from the unit-norm check.
    """

    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        _n_from_dim(amps.shape[0])
        if not np.all(np.isfinite(amps)):
            raise NumericalIntegrityError("non-finite amplitude")
        if self.normalized:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > ATOL:
                raise NumericalIntegrityError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Computational basis state, e.g. ``StateVector.basis("01")``."""
        if bits == "":
            return cls(np.ones(1))
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> StateVector:
        norm = self.norm()
        if norm == 0.0:
            raise NumericalIntegrityError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / norm)

    def inner(self, other: StateVector) -> complex:
        """``<self|other>``."""
        if self.n_qubits != other.n_qubits:
            raise DimensionError("inner product of states on different qubit counts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def permute(self, order: Sequence[int]) -> StateVector:
        """Reorder qubits: new position ``k`` holds old position ``order[k]``."""
        n = self.n_qubits
        if sorted(order) != list(range(n)):
            raise DimensionError(f"{order!r} is not a permutation of {n} positions")
        tensor = self.amplitudes.reshape((2,) * n) if n else self.amplitudes
        out = np.transpose(tensor, order).reshape(-1) if n else tensor
        return StateVector(out, normalized=self.normalized)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, normalized={self.normalized})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        _n_from_dim(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise NumericalIntegrityError("non-finite density-matrix entry")
        if np.max(np.abs(m - m.conj().T)) >= ATOL:
            raise NumericalIntegrityError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > ATOL:
            raise NumericalIntegrityError(f"density matrix trace {tr!r} differs from 1")
        if np.min(np.linalg.eigvalsh(m)) < -PSD_ATOL:
            raise NumericalIntegrityError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", m)

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


_LABEL_TOKEN = re.compile(r"([ixyzIXYZ])(\d+)")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis.

    ``qubits`` names each position (1-based physical numbering) and is only used for
    labels; it defaults to ``1..n``.
    """

    factors: tuple[PauliAxis, ...]
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(PauliAxis(f) if not isinstance(f, PauliAxis) else f
                        for f in self.factors)
        _check_qubits(len(factors))
        qubits = tuple(self.qubits) or tuple(range(1, len(factors) + 1))
        if len(qubits) != len(factors):
            raise DimensionError("qubit names and factors differ in length")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "qubits", qubits)

    @classmethod
    def parse(cls, label: str, qubits: Sequence[int] | int = MAX_QUBITS) -> PauliString:
        """Build from a label such as ``"x2y4y6"``.

        ``qubits`` is either the number of qubits (named ``1..n``) or the
        explicit position names, e.g. ``(2, 4, 6)``.
        """
        names = tuple(range(1, qubits + 1)) if isinstance(qubits, int) else tuple(qubits)
        factors = [PauliAxis.I] * len(names)
        text = label.replace("·", "")
        pos = 0
        for m in _LABEL_TOKEN.finditer(text):
            if m.start() != pos:
                break
            pos = m.end()
            q = int(m.group(2))
            if q not in names:
                raise DimensionError(f"qubit {q} not among {names}")
            factors[names.index(q)] = PauliAxis(m.group(1).upper())
        if pos != len(text):
            raise ValueError(f"cannot parse Pauli label {label!r}")
        return cls(tuple(factors), names)

    @classmethod
    def identity(cls, n_qubits: int, qubits: Sequence[int] = ()) -> PauliString:
        return cls((PauliAxis.I,) * n_qubits, tuple(qubits))

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    @property
    def label(self) -> str:
        parts = [f"{f.value.lower()}{q}" for f, q in zip(self.factors, self.qubits)
                 if f is not PauliAxis.I]
        if not parts:
            return "I" + "".join(str(q) for q in self.qubits)
        return "".join(parts)

    def masks(self) -> tuple[int, int, int]:
        """``(xmask, zmask, n_y)`` for the bit-flip/phase action."""
        n = self.n_qubits
        xmask = zmask = n_y = 0
        for k, f in enumerate(self.factors):
            bit = 1 << (n - 1 - k)
            if f in (PauliAxis.X, PauliAxis.Y):
                xmask |= bit
            if f in (PauliAxis.Z, PauliAxis.Y):
                zmask |= bit
            if f is PauliAxis.Y:
                n_y += 1
        return xmask, zmask, n_y

    def embed(self, positions: Sequence[int], n_qubits: int) -> PauliString:
        """Place this string at ``positions`` (0-based) of a larger register."""
        if len(positions) != self.n_qubits:
            raise DimensionError("one position per factor is required")
        factors = [PauliAxis.I] * n_qubits
        names = list(range(1, n_qubits + 1))
        for pos, f, q in zip(positions, self.factors, self.qubits):
            factors[pos] = f
            names[pos] = q
        return PauliString(tuple(factors), tuple(names))

    def __mul__(self, other: PauliString) -> tuple[complex, PauliString]:
        """Operator product ``self @ other`` as ``(phase, string)``."""
        if self.n_qubits != other.n_qubits:
            raise DimensionError("product of Pauli strings on different registers")
        phase: complex = 1
        out = []
        for a, b in zip(self.factors, other.factors):
            p, c = _MULT[(a, b)]
            phase *= p
            out.append(c)
        return phase, PauliString(tuple(out), self.qubits)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class PauliProduct:
    """Ordered product of Pauli strings on one register, e.g. ``x2y4y6·x1·y3·y5``.

    Applying it to a state applies the rightmost factor first.
    """

    factors: tuple[PauliString, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a Pauli product needs at least one factor")
        if len({f.n_qubits for f in factors}) != 1:
            raise DimensionError("all factors must act on the same register")
        object.__setattr__(self, "factors", factors)

    @property
    def n_qubits(self) -> int:
        return self.factors[0].n_qubits

    @property
    def label(self) -> str:
        return "·".join(f.label for f in self.factors)

    def reduce(self) -> tuple[complex, PauliString]:
        """Collapse to a single ``phase * string`` by Pauli multiplication."""
        phase: complex = 1
        acc = self.factors[0]
        for f in self.factors[1:]:
            p, acc = acc * f
            phase *= p
        return phase, acc

    def apply(self, state: StateVector) -> StateVector:
        for f in reversed(self.factors):
            state = apply_pauli(f, state)
        return state

    def matrix(self) -> np.ndarray:
        return reduce(np.matmul, (pauli_matrix(f) for f in self.factors))

    def __str__(self) -> str:
        return self.label


Operator = Union[PauliString, PauliProduct, "MerminOperator"]


@dataclass(frozen=True)
class MerminOperator:
    """Real-weighted sum of Pauli products on a common register."""

    terms: tuple[tuple[float, PauliProduct], ...]
    label: str = ""

    def __post_init__(self):
        terms = tuple((float(c), p if isinstance(p, PauliProduct) else PauliProduct((p,)))
                      for c, p in self.terms)
        if not terms:
            raise ValueError("operator has no terms")
        if len({p.n_qubits for _, p in terms}) != 1:
            raise DimensionError("all terms must act on the same register")
        object.__setattr__(self, "terms", terms)

    @property
    def n_qubits(self) -> int:
        return self.terms[0][1].n_qubits

    def apply(self, state: StateVector) -> StateVector:
        acc = np.zeros_like(state.amplitudes)
        for c, p in self.terms:
            acc = acc + c * p.apply(state).amplitudes
        return StateVector(acc, normalized=False)

    def matrix(self) -> np.ndarray:
        return sum(c * p.matrix() for c, p in self.terms)


def kron(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; ``a`` occupies the more significant index block."""
    _check_qubits(a.n_qubits + b.n_qubits)
    return StateVector(np.kron(a.amplitudes, b.amplitudes),
                       normalized=a.normalized and b.normalized)


def kron_all(states: Iterable[StateVector]) -> StateVector:
    return reduce(kron, states, StateVector(np.ones(1)))


def apply_pauli(p: PauliString, s: StateVector) -> StateVector:
    """``P|s>`` via per-qubit bit flips and phases (no matrix is built)."""
    if p.n_qubits != s.n_qubits:
        raise DimensionError(f"{p.n_qubits}-qubit Pauli applied to {s.n_qubits}-qubit state")
    xmask, zmask, n_y = p.masks()
    out = kernels.pauli_apply(np.ascontiguousarray(s.amplitudes), xmask, zmask, n_y)
    return StateVector(out, normalized=s.normalized)


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of ``p``."""
    return reduce(np.kron, (_SINGLE[f] for f in p.factors), np.ones((1, 1), dtype=np.complex128))


def _operator_matrix(op: Operator) -> np.ndarray:
    if isinstance(op, PauliString):
        return pauli_matrix(op)
    return op.matrix()


def _apply(op: Operator, s: StateVector) -> StateVector:
    if isinstance(op, PauliString):
        return apply_pauli(op, s)
    return op.apply(s)


def expectation(op: Operator, state: StateVector | DensityMatrix) -> float:
    """``<s|Op|s>`` or ``Tr(rho Op)``; raises if the result is not real."""
    if op.n_qubits != state.n_qubits:
        raise DimensionError(f"{op.n_qubits}-qubit operator on {state.n_qubits}-qubit state")
    if isinstance(state, DensityMatrix):
        value = complex(np.trace(state.entries @ _operator_matrix(op)))
    else:
        value = state.inner(_apply(op, state))
    if abs(value.imag) >= ATOL * max(1.0, abs(value.real)):
        raise NumericalIntegrityError(f"expectation has imaginary part {value.imag!r}")
    return value.real


def dm_from_state(s: StateVector) -> DensityMatrix:
    a = s.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def dm_mix(components: Sequence[tuple[float, DensityMatrix]]) -> DensityMatrix:
    """Convex combination ``sum w_k rho_k``."""
    if not components:
        raise WeightSumError("empty mixture")
    weights = [float(w) for w, _ in components]
    if any(w < 0 for w in weights):
        raise WeightSumError(f"negative weight in {weights!r}")
    if abs(sum(weights) - 1.0) > ATOL:
        raise WeightSumError(f"weights sum to {sum(weights)!r}, not 1")
    dims = {rho.n_qubits for _, rho in components}
    if len(dims) != 1:
        raise DimensionError("mixing density matrices of different sizes")
    return DensityMatrix(sum(w * rho.entries for w, (_, rho) in zip(weights, components)))


def dm_kron(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    _check_qubits(a.n_qubits + b.n_qubits)
    return DensityMatrix(np.kron(a.entries, b.entries))


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    d = 1 << n_qubits
    return DensityMatrix(np.eye(d, dtype=np.complex128) / d)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian)."""
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(v / np.linalg.norm(v))


def random_pauli(n_qubits: int, rng: np.random.Generator) -> PauliString:
    axes = list(PauliAxis)
    return PauliString(tuple(axes[i] for i in rng.integers(0, 4, size=n_qubits)))


KET_0 = StateVector.basis("0")
KET_1 = StateVector.basis("1")
KET_PLUS = StateVector(np.array([1, 1]) / np.sqrt(2))
KET_MINUS = StateVector(np.array([1, -1]) / np.sqrt(2))
KET_R = StateVector(np.array([1, 1j]) / np.sqrt(2))
KET_L = StateVector(np.array([1, -1j]) / np.sqrt(2))


def eigenstate(axis: PauliAxis, sign: int) -> StateVector:
    """Single-qubit eigenstate of X, Y or Z with eigenvalue ``sign``."""
    table = {
        (PauliAxis.X, 1): KET_PLUS, (PauliAxis.X, -1): KET_MINUS,
        (PauliAxis.Y, 1): KET_R, (PauliAxis.Y, -1): KET_L,
        (PauliAxis.Z, 1): KET_0, (PauliAxis.Z, -1): KET_1,
    }
    try:
        return table[(PauliAxis(axis), int(sign))]
    except KeyError:
        raise ValueError(f"no eigenstate for axis {axis!r} with sign {sign!r}") from None
