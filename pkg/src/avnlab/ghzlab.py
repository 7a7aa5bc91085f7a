"""GHZ basis, entanglement swapping and the partial GHZ-state analyzer.

The analyzer is an ideal projective GHZ-basis measurement that can only
report Phi0+ and Phi0-; the other six outcomes are lumped together as a
failure. Acceptance statistics come from Born-rule weights alone. The extra
1/8 chance of all three photons reaching the optical analyzer is a device
effect and is deliberately not modeled.

GHZ outcomes are always ordered (k, sign) = (0,+), (0,-), (1,+), ..., (3,-).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from avnlab import avn, kernels
from avnlab.errors import (
    DimensionError,
    InsufficientStatisticsError,
    NoSupportError,
    PhysicsViolationError,
)
from avnlab.qcore import (
    ATOL,
    PauliAxis,
    PauliString,
    StateVector,
    apply_pauli,
    eigenstate,
    kron_all,
)

_SUB = str.maketrans("0123", "₀₁₂₃")

# Computational-basis pair (|abc>, |a'b'c'>) behind Phi_k.
_GHZ_PAIRS = {0: ("000", "111"), 1: ("100", "011"), 2: ("010", "101"), 3: ("001", "110")}

# Order of the four triple-operator columns in the eigenvalue table.
TABLE_COLUMNS = ("x2x4x6", "x2y4y6", "y2x4y6", "y2y4x6")

# Positions (0-based, in the 1..6 register) of Debbie's qubits, then the others.
SWAP_ORDER = (1, 3, 5, 0, 2, 4)


@dataclass(frozen=True, order=True)
class GhzIndex:
    k: int
    sign: int

    def __post_init__(self):
        if self.k not in range(4) or self.sign not in (1, -1):
            raise ValueError(f"invalid GHZ index ({self.k!r}, {self.sign!r})")

    @property
    def position(self) -> int:
        return 2 * self.k + (0 if self.sign == 1 else 1)

    @property
    def ascii(self) -> str:
        return f"Phi{self.k}{'+' if self.sign == 1 else '-'}"

    @property
    def unicode(self) -> str:
        return f"Φ{str(self.k).translate(_SUB)}{'⁺' if self.sign == 1 else '⁻'}"

    @classmethod
    def parse(cls, text: str) -> GhzIndex:
        t = text.strip()
        if t.startswith("Phi") and len(t) == 5:
            return cls(int(t[3]), 1 if t[4] == "+" else -1)
        raise ValueError(f"cannot parse GHZ label {text!r}")

    def __str__(self) -> str:
        return self.ascii


GHZ_ORDER: tuple[GhzIndex, ...] = tuple(GhzIndex(k, s) for k in range(4) for s in (1, -1))
PHI0_PLUS, PHI0_MINUS = GHZ_ORDER[0], GHZ_ORDER[1]


class AnalyzerOutcome(enum.Enum):
    PHI0_PLUS = "Phi0+"
    PHI0_MINUS = "Phi0-"
    FAIL = "Fail"


@dataclass(frozen=True)
class MeasurementRecord:
    """``conditional_state`` is None when no pure conditional state exists (Fail)."""

    outcome: object
    probability: float
    conditional_state: Optional[StateVector]


@lru_cache(maxsize=None)
def _basis_matrix() -> np.ndarray:
    rows = []
    for g in GHZ_ORDER:
        lo, hi = _GHZ_PAIRS[g.k]
        v = np.zeros(8, dtype=np.complex128)
        v[int(lo, 2)] = 1 / math.sqrt(2)
        v[int(hi, 2)] = g.sign / math.sqrt(2)
        rows.append(v)
    m = np.array(rows)
    m.setflags(write=False)
    return m


def ghz_basis() -> list[StateVector]:
    return [StateVector(row) for row in _basis_matrix()]


def ghz_state(g: GhzIndex) -> StateVector:
    return StateVector(_basis_matrix()[g.position])


def ghz_expand(state: StateVector) -> np.ndarray:
    """Coefficients ``<g|state>`` of a 3-qubit state, in GHZ order."""
    if state.n_qubits != 3:
        raise DimensionError("GHZ expansion needs a 3-qubit state")
    return _basis_matrix().conj() @ state.amplitudes


@lru_cache(maxsize=None)
def _eigen_table() -> np.ndarray:
    table = np.zeros((8, 4), dtype=np.int64)
    for col, label in enumerate(TABLE_COLUMNS):
        op = PauliString.parse(label, avn.DEBBIE)
        for g in GHZ_ORDER:
            s = ghz_state(g)
            out = apply_pauli(op, s).amplitudes
            value = complex(np.vdot(s.amplitudes, out))
            if abs(value.imag) > ATOL or abs(abs(value.real) - 1) > ATOL:
                raise PhysicsViolationError(f"{g} has no real unit eigenvalue under {label}")
            ev = int(round(value.real))
            if np.linalg.norm(out - ev * s.amplitudes) >= ATOL:
                raise PhysicsViolationError(f"{g} is not an eigenstate of {label}")
            table[g.position, col] = ev
    table.setflags(write=False)
    return table


def ghz_eigen_table() -> np.ndarray:
    """8x4 eigenvalues of the triple operators (columns ``TABLE_COLUMNS``) on each GHZ state."""
    return _eigen_table().copy()


# Eigenvalue table as printed; rows in GHZ order, columns TABLE_COLUMNS.
PRINTED_EIGEN_TABLE = np.array([
    [+1, -1, -1, -1],
    [-1, +1, +1, +1],
    [+1, -1, +1, +1],
    [-1, +1, -1, -1],
    [+1, +1, -1, +1],
    [-1, -1, +1, -1],
    [+1, +1, +1, -1],
    [-1, -1, -1, +1],
])
PRINTED_EIGEN_TABLE.setflags(write=False)


def triple_value(g: GhzIndex, triple: str) -> int:
    return int(_eigen_table()[g.position, TABLE_COLUMNS.index(triple)])


@dataclass(frozen=True, eq=False)
class SwapDecomposition:
    """``coefficients[i, j]`` multiplies GHZ_ORDER[i] on (2,4,6) times GHZ_ORDER[j] on (1,3,5)."""

    coefficients: np.ndarray

    def support(self, tol: float = ATOL) -> list[tuple[GhzIndex, GhzIndex, complex]]:
        out = []
        for i, j in zip(*np.nonzero(np.abs(self.coefficients) > tol)):
            out.append((GHZ_ORDER[i], GHZ_ORDER[j], complex(self.coefficients[i, j])))
        return out

    def reconstruct(self) -> StateVector:
        """Sum of ``c * g (x) h`` with the qubits put back in 1..6 order."""
        b = _basis_matrix()
        permuted = np.einsum("ij,ia,jb->ab", self.coefficients, b, b).reshape(-1)
        inverse = np.argsort(SWAP_ORDER)
        amps = permuted.reshape((2,) * 6).transpose(inverse).reshape(-1)
        return StateVector(amps, normalized=False)


# Signs of the swap expansion as printed, keyed by (Debbie outcome, remote state).
PRINTED_SWAP_SIGNS: dict[tuple[GhzIndex, GhzIndex], int] = {
    (GhzIndex(0, -1), GhzIndex(0, 1)): 1,
    (GhzIndex(0, 1), GhzIndex(0, -1)): -1,
    **{(GhzIndex(k, 1), GhzIndex(k, -1)): 1 for k in (1, 2, 3)},
    **{(GhzIndex(k, -1), GhzIndex(k, 1)): -1 for k in (1, 2, 3)},
}


def decompose_swap(psi: StateVector) -> SwapDecomposition:
    if psi.n_qubits != 6:
        raise DimensionError("swap decomposition needs a 6-qubit state")
    block = psi.permute(SWAP_ORDER).amplitudes.reshape(8, 8)
    b = _basis_matrix().conj()
    return SwapDecomposition(b @ block @ b.T)


def match_printed_swap(decomp: SwapDecomposition, tol: float = ATOL) -> tuple[bool, complex]:
    """Compare with the printed expansion up to one global phase.

    Returns ``(matches, phase)`` where ``coefficients = phase * printed``.
    """
    printed = np.zeros((8, 8), dtype=np.complex128)
    for (g, h), s in PRINTED_SWAP_SIGNS.items():
        printed[g.position, h.position] = s / math.sqrt(8)
    anchor = GhzIndex(0, -1).position, GhzIndex(0, 1).position
    if abs(decomp.coefficients[anchor]) < tol:
        return False, 0j
    phase = complex(decomp.coefficients[anchor] / printed[anchor])
    ok = abs(abs(phase) - 1) < tol and np.max(np.abs(decomp.coefficients - phase * printed)) < tol
    return bool(ok), phase


def _remote_block(psi: StateVector) -> np.ndarray:
    return psi.permute(SWAP_ORDER).amplitudes.reshape(8, 8)


def postselect(psi: StateVector, outcome: GhzIndex) -> MeasurementRecord:
    """Project Debbie's qubits (2,4,6) onto ``outcome``.

    For a 6-qubit input the conditional state lives on qubits (1,3,5); a
    3-qubit input is measured directly and collapses to the GHZ state itself.
    """
    g = _basis_matrix()[outcome.position]
    if psi.n_qubits == 3:
        amp = complex(np.vdot(g, psi.amplitudes))
        prob = abs(amp) ** 2
        if prob < 1e-15:
            raise NoSupportError(f"{outcome} has no support")
        return MeasurementRecord(outcome, prob, ghz_state(outcome))
    if psi.n_qubits != 6:
        raise DimensionError("postselection needs a 3- or 6-qubit state")
    remainder = g.conj() @ _remote_block(psi)
    prob = float(np.vdot(remainder, remainder).real)
    if prob < 1e-15:
        raise NoSupportError(f"{outcome} has no support")
    return MeasurementRecord(outcome, prob, StateVector(remainder / math.sqrt(prob)))


def outcome_probabilities(psi: StateVector) -> np.ndarray:
    """Born probabilities of the eight GHZ outcomes on Debbie's qubits."""
    if psi.n_qubits == 3:
        return np.abs(ghz_expand(psi)) ** 2
    if psi.n_qubits != 6:
        raise DimensionError("GHZ measurement needs a 3- or 6-qubit state")
    rem = _basis_matrix().conj() @ _remote_block(psi)
    return np.sum(np.abs(rem) ** 2, axis=1)


def analyzer_measure(psi: StateVector) -> list[MeasurementRecord]:
    """Records for Phi0+, Phi0- and the aggregated failure, in that order."""
    probs = outcome_probabilities(psi)
    records = []
    for g, name in ((PHI0_PLUS, AnalyzerOutcome.PHI0_PLUS), (PHI0_MINUS, AnalyzerOutcome.PHI0_MINUS)):
        p = float(probs[g.position])
        state = postselect(psi, g).conditional_state if p >= 1e-15 else None
        records.append(MeasurementRecord(name, p, state))
    records.append(MeasurementRecord(AnalyzerOutcome.FAIL, float(np.sum(probs[2:])), None))
    return records


def product_eigenstate(axes: Sequence, signs: Sequence[int]) -> StateVector:
    """Tensor product of X/Y eigenstates, e.g. ``(X, Y, Y), (+1, +1, +1) -> |+RR>``."""
    axes = [PauliAxis(a) for a in axes]
    if len(axes) != 3 or len(signs) != 3:
        raise ValueError("need three axes and three signs")
    if any(a not in (PauliAxis.X, PauliAxis.Y) for a in axes):
        raise ValueError(f"axes must be X or Y, got {axes!r}")
    return kron_all(eigenstate(a, s) for a, s in zip(axes, signs))


# identity number -> (axis pattern on qubits 2,4,6, triple operator read out)
IDENTITY_PATTERNS = {
    1: ((PauliAxis.X, PauliAxis.Y, PauliAxis.Y), "x2y4y6"),
    2: ((PauliAxis.Y, PauliAxis.X, PauliAxis.Y), "y2x4y6"),
    3: ((PauliAxis.Y, PauliAxis.Y, PauliAxis.X), "y2y4x6"),
    4: ((PauliAxis.X, PauliAxis.X, PauliAxis.X), "x2x4x6"),
}

# GHZ expansions printed for the all-(+1) eigenstates, keyed by identity number.
PRINTED_EXPANSIONS: dict[int, dict[GhzIndex, complex]] = {
    1: {GhzIndex(0, -1): 0.5, GhzIndex(1, -1): 0.5, GhzIndex(2, 1): 0.5j, GhzIndex(3, 1): 0.5j},
    2: {GhzIndex(0, -1): 0.5, GhzIndex(1, 1): 0.5j, GhzIndex(2, -1): 0.5, GhzIndex(3, 1): 0.5j},
    3: {GhzIndex(0, -1): 0.5, GhzIndex(1, 1): 0.5j, GhzIndex(2, 1): 0.5j, GhzIndex(3, -1): 0.5},
    4: {GhzIndex(k, 1): 0.5 for k in range(4)},
}


@dataclass(frozen=True)
class ContextualityRun:
    identity_index: int
    signs: tuple[int, int, int]
    triple: str
    coefficients: tuple[complex, ...]
    support: frozenset
    triple_value: int
    identity_holds: bool
    identifiable_probability: float


def contextuality_run(identity_index: int, signs: Sequence[int]) -> ContextualityRun:
    """Prepare a product eigenstate for one identity and read the triple off the GHZ analyzer."""
    if identity_index not in IDENTITY_PATTERNS:
        raise ValueError(f"identity index must be 1..4, got {identity_index!r}")
    signs = tuple(int(s) for s in signs)
    axes, triple = IDENTITY_PATTERNS[identity_index]
    coeffs = ghz_expand(product_eigenstate(axes, signs))
    support = frozenset(g for g in GHZ_ORDER if abs(coeffs[g.position]) > ATOL)
    values = {triple_value(g, triple) for g in support}
    if len(values) != 1:
        raise PhysicsViolationError(
            f"support states disagree on {triple}: {sorted(values)} for signs {signs}")
    value = values.pop()
    p_ident = float(abs(coeffs[PHI0_PLUS.position]) ** 2 + abs(coeffs[PHI0_MINUS.position]) ** 2)
    return ContextualityRun(
        identity_index=identity_index,
        signs=signs,
        triple=triple,
        coefficients=tuple(complex(c) for c in coeffs),
        support=support,
        triple_value=value,
        identity_holds=value == math.prod(signs),
        identifiable_probability=p_ident,
    )


# --- Monte-Carlo experiment ---------------------------------------------------

@dataclass(frozen=True, slots=True)
class ShotResult:
    setting: int
    ghz_outcome: GhzIndex
    debbie_outcome: AnalyzerOutcome
    local_values: Optional[tuple[int, int, int]]
    accepted: bool
    product: Optional[int]


@dataclass(frozen=True)
class SampleResult:
    estimate: float
    std_error: float
    accepted: int
    n_shots: int
    setting_means: dict
    setting_counts: dict
    shots: tuple[ShotResult, ...]

    @property
    def acceptance_fraction(self) -> float:
        return self.accepted / self.n_shots


SETTING_POLICIES = ("round-robin", "fixed")

_ACCEPTED = (PHI0_PLUS, PHI0_MINUS)


def _local_axes(setting: int) -> tuple[PauliAxis, ...]:
    labels = avn.LOCAL_PARTNERS[avn.TRIPLES[setting - 1]]
    return tuple(PauliAxis(l[0].upper()) for l in labels)


def _clean_cdf(p: np.ndarray) -> np.ndarray:
    p = np.where(p < 1e-15, 0.0, p)
    c = np.cumsum(p / p.sum())
    c[-1] = 1.0
    return np.ascontiguousarray(c)


@lru_cache(maxsize=32)
def _shot_tables(F: float) -> tuple[np.ndarray, np.ndarray]:
    """CDFs of Debbie's 8 outcomes and of the local outcome triple per (setting, accepted outcome)."""
    rho = avn.noisy_psi(avn.NoiseParams(F)).entries.reshape((2,) * 12)
    perm = list(SWAP_ORDER) + [6 + k for k in SWAP_ORDER]
    r = rho.transpose(perm).reshape(8, 8, 8, 8)
    b = _basis_matrix()
    # conditional (unnormalized) states on qubits 1,3,5 for each Debbie outcome
    sigma = np.einsum("gd,dafb,gf->gab", b.conj(), r, b)
    p_first = np.einsum("gaa->g", sigma).real
    cdf_first = _clean_cdf(p_first)
    cdf_second = np.empty((4, len(_ACCEPTED), 8))
    for s in range(1, 5):
        axes = _local_axes(s)
        vecs = np.array([
            kron_all(eigenstate(a, 1 - 2 * ((idx >> (2 - q)) & 1)) for q, a in enumerate(axes)).amplitudes
            for idx in range(8)
        ])
        for gi, g in enumerate(_ACCEPTED):
            probs = np.einsum("ka,ab,kb->k", vecs.conj(), sigma[g.position], vecs).real
            cdf_second[s - 1, gi] = _clean_cdf(probs)
    return cdf_first, np.ascontiguousarray(cdf_second)


def sample_shots(
    n: int,
    seed: int,
    fidelity: avn.NoiseParams,
    setting_policy: str = "round-robin",
    fixed_setting: int = 1,
) -> SampleResult:
    """Simulate the four-party experiment shot by shot.

    Each shot draws Debbie's GHZ outcome on qubits (2,4,6) of three Werner
    singlets and keeps it only if it is Phi0+ or Phi0-. Accepted shots then
    measure qubits 1, 3, 5 along the axes of one O-term; the term's product
    is the triple eigenvalue of Debbie's outcome times the three local
    values. ``<O>`` is estimated as 4 times the mean of the per-setting means.
    """
    if n < 1:
        raise ValueError("need at least one shot")
    if setting_policy not in SETTING_POLICIES:
        raise ValueError(f"unknown setting policy {setting_policy!r}")
    if fixed_setting not in range(1, 5):
        raise ValueError("fixed setting must be 1..4")
    cdf_first, cdf_second = _shot_tables(float(fidelity.F))

    rng = np.random.default_rng(seed)
    u_first = rng.random(n)
    u_second = rng.random(n)
    if setting_policy == "round-robin":
        settings = np.arange(n, dtype=np.int64) % 4
    else:
        settings = np.full(n, fixed_setting - 1, dtype=np.int64)

    first, second = kernels.sample_outcomes(
        settings, u_first, u_second, cdf_first, len(_ACCEPTED), cdf_second)

    table = _eigen_table()
    columns = [TABLE_COLUMNS.index(t) for t in avn.TRIPLES]
    analyzer = {0: AnalyzerOutcome.PHI0_PLUS, 1: AnalyzerOutcome.PHI0_MINUS}
    products: dict[int, list[int]] = {s: [] for s in range(1, 5)}
    shots = []
    for s_idx, g_idx, loc in zip(settings.tolist(), first.tolist(), second.tolist()):
        setting = s_idx + 1
        g = GHZ_ORDER[g_idx]
        if loc < 0:
            shots.append(ShotResult(setting, g, AnalyzerOutcome.FAIL, None, False, None))
            continue
        local = tuple(1 - 2 * ((loc >> (2 - q)) & 1) for q in range(3))
        prod = int(table[g_idx, columns[s_idx]]) * local[0] * local[1] * local[2]
        products[setting].append(prod)
        shots.append(ShotResult(setting, g, analyzer[g_idx], local, True, prod))

    used = [s for s in range(1, 5) if setting_policy == "round-robin" or s == fixed_setting]
    means, counts, var_terms = {}, {}, 0.0
    for s in used:
        vals = np.asarray(products[s], dtype=float)
        if vals.size == 0:
            raise InsufficientStatisticsError(f"no accepted shots for setting {s}")
        means[s] = float(vals.mean())
        counts[s] = int(vals.size)
        if vals.size > 1:
            var_terms += float(vals.var(ddof=1)) / vals.size
    k = len(used)
    estimate = 4.0 * sum(means.values()) / k
    std_error = 4.0 * math.sqrt(var_terms) / k
    accepted = sum(len(v) for v in products.values())
    return SampleResult(estimate, std_error, accepted, n, means, counts, tuple(shots))
